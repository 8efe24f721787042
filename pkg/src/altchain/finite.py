"""Open-chain ground states and entanglement-entropy scaling.

The ground state is found by imaginary-time TEBD sweeps that keep the chain in
mixed canonical form (gates applied left-to-right then right-to-left, which is
a symmetric second-order splitting).  For long chains at gapless points the
imaginary-time relaxation is slow, so a two-site variational sweep (DMRG) can
polish the TEBD result; both routes share the same MPS container.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
import scipy.sparse.linalg as spla

from .imps import contract_operator_string, entropy_of_weights, push_left
from .itebd import Schedule
from .model import ModelParams, exchange, spin_operators, trotter_gate, BondHamiltonian

log = logging.getLogger(__name__)

_OPS = spin_operators()
SCHMIDT_CUTOFF = 1e-12


@dataclass
class FiniteMPS:
    """Open-chain MPS with tensors indexed (physical, left, right).

    After :func:`canonical_form` every tensor is left-canonical and
    ``schmidt[i]`` holds the Schmidt values of the cut between sites i and i+1.
    """

    tensors: list
    schmidt: list = field(default_factory=list)
    energy: float = float("nan")
    trace: list = field(default_factory=list)
    params: ModelParams | None = None

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> list:
        return [t.shape[2] for t in self.tensors[:-1]]


# ---------------------------------------------------------------------------
# construction and gauge


def product_mps(vectors: Sequence) -> FiniteMPS:
    ts = []
    for v in vectors:
        v = np.asarray(v, dtype=complex)
        ts.append((v / np.linalg.norm(v)).reshape(-1, 1, 1))
    return canonical_form(FiniteMPS(ts))


def random_mps(n: int, chi: int, seed: int, d: int = 2, real: bool = False) -> FiniteMPS:
    rng = np.random.default_rng(seed)
    dims = [1] + [min(chi, d ** min(k, n - k)) for k in range(1, n)] + [1]
    ts = []
    for k in range(n):
        shape = (d, dims[k], dims[k + 1])
        t = rng.standard_normal(shape)
        ts.append(t if real else t + 1j * rng.standard_normal(shape))
    return canonical_form(FiniteMPS(ts))


def from_vector(psi: np.ndarray, n: int, d: int = 2) -> FiniteMPS:
    """Exact MPS of a dense state vector (site 0 most significant)."""
    ts = []
    rest = np.asarray(psi, dtype=complex).reshape(1, -1)
    for _ in range(n - 1):
        chil = rest.shape[0]
        rest = rest.reshape(chil * d, -1)
        u, s, vh = np.linalg.svd(rest, full_matrices=False)
        keep = max(1, int(np.sum(s > SCHMIDT_CUTOFF * s[0])))
        ts.append(u[:, :keep].reshape(chil, d, keep).transpose(1, 0, 2))
        rest = s[:keep, None] * vh[:keep]
    ts.append(rest.reshape(rest.shape[0], d, 1).transpose(1, 0, 2))
    return canonical_form(FiniteMPS(ts))


def canonical_form(mps: FiniteMPS, chi_max: int | None = None) -> FiniteMPS:
    """Right-to-left QR pass, then a left-to-right SVD pass recording Schmidt values."""
    ts = [t.copy() for t in mps.tensors]
    n = len(ts)
    for k in range(n - 1, 0, -1):
        d, l, r = ts[k].shape
        q, rr = np.linalg.qr(ts[k].transpose(1, 0, 2).reshape(l, d * r).T)
        ts[k] = q.T.reshape(-1, d, r).transpose(1, 0, 2)
        ts[k - 1] = np.tensordot(ts[k - 1], rr.T, axes=(2, 0))
    ts[0] = ts[0] / np.linalg.norm(ts[0])
    schmidt = []
    for k in range(n - 1):
        d, l, r = ts[k].shape
        u, s, vh = np.linalg.svd(ts[k].transpose(1, 0, 2).reshape(l * d, r), full_matrices=False)
        keep = max(1, int(np.sum(s > SCHMIDT_CUTOFF * s[0])))
        if chi_max is not None:
            keep = min(keep, chi_max)
        u, s, vh = u[:, :keep], s[:keep], vh[:keep]
        s = s / np.linalg.norm(s)
        ts[k] = u.reshape(l, d, keep).transpose(1, 0, 2)
        ts[k + 1] = np.tensordot(s[:, None] * vh, ts[k + 1], axes=(1, 1)).transpose(1, 0, 2)
        schmidt.append(s)
    ts[-1] = ts[-1] / np.linalg.norm(ts[-1])
    return FiniteMPS(ts, schmidt, mps.energy, list(mps.trace), mps.params)


def to_vector(mps: FiniteMPS) -> np.ndarray:
    psi = np.ones((1, 1), dtype=complex)
    for t in mps.tensors:
        psi = np.tensordot(psi, t, axes=(1, 1)).reshape(-1, t.shape[2])
    return psi.reshape(-1)


# ---------------------------------------------------------------------------
# Hamiltonian pieces


def chain_bond_hamiltonians(params: ModelParams, n: int) -> list:
    """Bond terms of the open chain with the field split between the two bonds of
    each bulk site; end sites carry their full field on their only bond."""
    hs = []
    for i in range(n - 1):
        c = params.j if i % 2 == 0 else params.lam
        wl = 1.0 if i == 0 else 0.5
        wr = 1.0 if i == n - 2 else 0.5
        h = c * exchange(params.delta) - params.b * (
            wl * np.kron(_OPS.sz, _OPS.identity) + wr * np.kron(_OPS.identity, _OPS.sz)
        )
        parity = "odd" if i % 2 == 0 else "even"
        hs.append(BondHamiltonian(h, parity))
    return hs


def two_site_rdm(mps: FiniteMPS, i: int) -> np.ndarray:
    """RDM of sites (i, i+1); requires the left-canonical form."""
    a, b = mps.tensors[i], mps.tensors[i + 1]
    s = mps.schmidt[i + 1] if i + 1 < mps.n_sites - 1 else np.ones(1)
    theta = np.tensordot(a, b * s[None, None, :], axes=(2, 1))  # (s, l, t, r)
    theta = theta.transpose(1, 0, 2, 3).reshape(theta.shape[1], -1, theta.shape[3])
    return np.tensordot(theta, theta.conj(), axes=([0, 2], [0, 2]))


def mps_energy(mps: FiniteMPS, params: ModelParams) -> float:
    hs = chain_bond_hamiltonians(params, mps.n_sites)
    return float(sum(np.trace(two_site_rdm(mps, i) @ h.matrix).real for i, h in enumerate(hs)))


def string_expectation(mps: FiniteMPS, ops: dict) -> complex:
    """<prod_i O_i> for a {site: 2x2 matrix} map; requires the left-canonical form."""
    if not ops:
        return 1.0 + 0j
    first, last = min(ops), max(ops)
    tensors = mps.tensors[first : last + 1]
    oplist = [ops.get(k) for k in range(first, last + 1)]
    chil = tensors[0].shape[1]
    s = mps.schmidt[last] if last < mps.n_sites - 1 else np.ones(1)
    return contract_operator_string(
        tensors, oplist, np.eye(chil, dtype=complex), np.diag(s**2).astype(complex)
    )


# ---------------------------------------------------------------------------
# imaginary-time TEBD


def _gate_bond(ts, i, gate, chi_max, move_right):
    a, b = ts[i], ts[i + 1]
    d = a.shape[0]
    theta = np.tensordot(a, b, axes=(2, 1))  # (s, l, t, r)
    theta = np.tensordot(gate.reshape(d, d, d, d), theta, axes=([2, 3], [0, 2]))  # (s,t,l,r)
    l, r = theta.shape[2], theta.shape[3]
    theta = theta.transpose(2, 0, 1, 3).reshape(l * d, d * r)
    u, s, vh = np.linalg.svd(theta, full_matrices=False)
    total = np.sum(s**2)
    keep = max(1, min(chi_max, int(np.sum(s > SCHMIDT_CUTOFF * s[0]))))
    trunc = float(np.sum(s[keep:] ** 2) / total)
    u, s, vh = u[:, :keep], s[:keep] / np.sqrt(np.sum(s[:keep] ** 2)), vh[:keep]
    if move_right:
        ts[i] = u.reshape(l, d, keep).transpose(1, 0, 2)
        ts[i + 1] = (s[:, None] * vh).reshape(keep, d, r).transpose(1, 0, 2)
    else:
        ts[i] = (u * s[None, :]).reshape(l, d, keep).transpose(1, 0, 2)
        ts[i + 1] = vh.reshape(keep, d, r).transpose(1, 0, 2)
    return trunc


def tebd_sweeps(mps: FiniteMPS, gates: list, n_sweeps: int, chi_max: int) -> tuple[FiniteMPS, float]:
    """Symmetric sweeps: every bond left-to-right, then right-to-left.

    ``gates[i]`` should be exp(-tau/2 h_i) so one sweep advances by tau.
    Expects and returns the left-canonical form (center on the last site).
    """
    ts = [t.copy() for t in mps.tensors]
    n = len(ts)
    trunc = 0.0
    for _ in range(n_sweeps):
        # center is at the right end; sweep right-to-left then left-to-right
        for i in range(n - 2, -1, -1):
            trunc = max(trunc, _gate_bond(ts, i, gates[i].matrix, chi_max, move_right=False))
        for i in range(n - 1):
            trunc = max(trunc, _gate_bond(ts, i, gates[i].matrix, chi_max, move_right=True))
    out = canonical_form(FiniteMPS(ts, [], mps.energy, mps.trace, mps.params))
    return out, trunc


def tebd_ground_state(
    params: ModelParams,
    n: int,
    chi: int,
    schedule: Schedule | None = None,
    seed: int = 0,
    initial: FiniteMPS | None = None,
) -> FiniteMPS:
    if n < 2 or n % 2:
        raise ValueError("n must be even and >= 2")
    schedule = schedule or Schedule()
    mps = initial if initial is not None else random_mps(n, chi, seed)
    mps = canonical_form(mps, chi)
    hs = chain_bond_hamiltonians(params, n)
    energy = mps_energy(mps, params)
    trace = [(float("nan"), 0, energy, 0.0)]
    sweeps = 0
    k = max(1, schedule.check_every // 10)
    for tau in schedule.taus():
        gates = [trotter_gate(h, tau / 2) for h in hs]
        steps = 0
        while steps < schedule.sweeps_per_tau:
            m = min(k, schedule.sweeps_per_tau - steps)
            mps, trunc = tebd_sweeps(mps, gates, m, chi)
            steps += m
            sweeps += m
            new = mps_energy(mps, params)
            trace.append((tau, sweeps, new, trunc))
            change = abs(new - energy)
            energy = new
            if change < schedule.energy_tol:
                break
        log.debug("finite tebd tau=%g sweeps=%d E=%.12f", tau, steps, energy)
    mps.energy = energy
    mps.trace = trace
    mps.params = params
    return mps


# ---------------------------------------------------------------------------
# two-site DMRG


def mpo(params: ModelParams, n: int) -> list:
    """W[i] indexed (left, right, s_out, s_in); lower-triangular, bond dimension 5.

    All entries are real (S+ and S- instead of Sx and Sy).
    """
    o = _OPS
    ws = []
    for i in range(n):
        c = params.j if i % 2 == 0 else params.lam
        w = np.zeros((5, 5, 2, 2))
        w[0, 0] = o.identity.real
        w[1, 0] = o.s_plus.real
        w[2, 0] = o.s_minus.real
        w[3, 0] = o.sz.real
        w[4, 0] = -params.b * o.sz.real
        w[4, 1] = 0.5 * c * o.s_minus.real
        w[4, 2] = 0.5 * c * o.s_plus.real
        w[4, 3] = c * params.delta * o.sz.real
        w[4, 4] = o.identity.real
        ws.append(w)
    ws[0] = ws[0][4:5]
    ws[-1] = ws[-1][:, 0:1]
    return ws


def _grow_left(env, a, w):
    # env (bra, w, ket); a (s, l, r); w (wl, wr, s_out, s_in)
    t = np.tensordot(env, a, axes=(2, 1))  # (bra, wl, s_in, r)
    t = np.tensordot(t, w, axes=([1, 2], [0, 3]))  # (bra, r, wr, s_out)
    return np.tensordot(a.conj(), t, axes=([0, 1], [3, 0]))  # (r_bra, r, wr) -> reorder


def _left_env(env, a, w):
    out = _grow_left(env, a, w)  # (r_bra, r_ket, wr)
    return out.transpose(0, 2, 1)


def _right_env(env, b, w):
    # env (bra, w, ket) on the right; b (s, l, r)
    t = np.tensordot(b, env, axes=(2, 2))  # (s_in, l, bra, wr)
    t = np.tensordot(w, t, axes=([1, 3], [3, 0]))  # (wl, s_out, l, bra)
    out = np.tensordot(t, b.conj(), axes=([1, 3], [0, 2]))  # (wl, l, l_bra)
    return out.transpose(2, 0, 1)


def _heff_matvec(lenv, w1, w2, renv, shape):
    def matvec(x):
        theta = x.reshape(shape)  # (l, s, t, r)
        t = np.tensordot(lenv, theta, axes=(2, 0))  # (a, wl, s, t, r)
        t = np.tensordot(t, w1, axes=([1, 2], [0, 3]))  # (a, t, r, wm, s')
        t = np.tensordot(t, w2, axes=([3, 1], [0, 3]))  # (a, r, s', wr, t')
        t = np.tensordot(t, renv, axes=([3, 1], [1, 2]))  # (a, s', t', b)
        return t.reshape(-1)

    return matvec


def _chi_ramp(chi_max: int, start: int = 32) -> list:
    ramp = []
    c = min(start, chi_max)
    while c < chi_max:
        ramp.append(c)
        c *= 2
    return ramp + [chi_max]


def dmrg(
    params: ModelParams,
    initial: FiniteMPS,
    chi_max: int,
    max_sweeps: int = 20,
    energy_tol: float = 1e-10,
    lanczos_tol: float = 1e-10,
) -> FiniteMPS:
    """Two-site DMRG starting from ``initial``; returns the left-canonical form.

    The bond dimension is ramped up (32, 64, ...) over the first sweeps and
    the Lanczos tolerance tightens as the energy settles.  Real initial
    tensors keep the whole calculation in real arithmetic.
    """
    n = initial.n_sites
    ws = mpo(params, n)
    mps = canonical_form(initial, chi_max)
    dtype = np.result_type(*mps.tensors)
    ts = [t.astype(dtype) for t in mps.tensors]
    ws = [w.astype(dtype) for w in ws]
    # bring center to site 0: right-canonicalize sites 1..n-1
    for k in range(n - 1, 0, -1):
        d, l, r = ts[k].shape
        u, s, vh = np.linalg.svd(ts[k].transpose(1, 0, 2).reshape(l, d * r), full_matrices=False)
        ts[k] = vh.reshape(-1, d, r).transpose(1, 0, 2)
        ts[k - 1] = np.tensordot(ts[k - 1], u * s[None, :], axes=(2, 0))
    one = np.ones((1, 1, 1), dtype=dtype)
    renvs = [None] * (n + 1)
    renvs[n] = one
    for k in range(n - 1, 1, -1):
        renvs[k] = _right_env(renvs[k + 1], ts[k], ws[k])
    lenvs = [None] * (n + 1)
    lenvs[0] = one
    energy = np.inf
    trace = list(initial.trace)
    ramp = _chi_ramp(chi_max)
    for sweep in range(max_sweeps):
        chi = ramp[min(sweep, len(ramp) - 1)]
        tol = lanczos_tol if sweep >= len(ramp) else max(lanczos_tol, 1e-6)
        e_sweep = None
        max_trunc = 0.0
        order = [(i, True) for i in range(n - 1)] + [(i, False) for i in range(n - 2, -1, -1)]
        for i, right in order:
            a, b = ts[i], ts[i + 1]
            theta = np.tensordot(a, b, axes=(2, 1)).transpose(1, 0, 2, 3)  # (l, s, t, r)
            shape = theta.shape
            dim = theta.size
            matvec = _heff_matvec(lenvs[i], ws[i], ws[i + 1], renvs[i + 2], shape)
            if dim <= 16:
                mat = np.stack([matvec(e) for e in np.eye(dim, dtype=dtype)], axis=1)
                w, v = np.linalg.eigh(0.5 * (mat + mat.conj().T))
            else:
                op = spla.LinearOperator((dim, dim), matvec=matvec, dtype=dtype)
                w, v = spla.eigsh(op, k=1, which="SA", v0=theta.reshape(-1), tol=tol, ncv=min(dim - 1, 20))
            e_sweep, vec = w[0], v[:, 0]
            l, d1, d2, r = shape
            u, s, vh = np.linalg.svd(vec.reshape(l * d1, d2 * r), full_matrices=False)
            keep = max(1, min(chi, int(np.sum(s > SCHMIDT_CUTOFF * s[0]))))
            max_trunc = max(max_trunc, float(np.sum(s[keep:] ** 2)))
            u, s, vh = u[:, :keep], s[:keep] / np.linalg.norm(s[:keep]), vh[:keep]
            if right:
                ts[i] = u.reshape(l, d1, keep).transpose(1, 0, 2)
                ts[i + 1] = (s[:, None] * vh).reshape(keep, d2, r).transpose(1, 0, 2)
                lenvs[i + 1] = _left_env(lenvs[i], ts[i], ws[i])
            else:
                ts[i] = (u * s[None, :]).reshape(l, d1, keep).transpose(1, 0, 2)
                ts[i + 1] = vh.reshape(keep, d2, r).transpose(1, 0, 2)
                renvs[i + 1] = _right_env(renvs[i + 2], ts[i + 1], ws[i + 1])
        trace.append(("dmrg", sweep + 1, float(e_sweep), max_trunc))
        log.debug("dmrg sweep %d chi=%d E=%.14f trunc=%.2e", sweep + 1, chi, e_sweep, max_trunc)
        done = chi == chi_max and abs(e_sweep - energy) < energy_tol * max(1.0, abs(e_sweep))
        energy = e_sweep
        if done:
            break
    out = canonical_form(FiniteMPS(ts, [], float(energy), trace, params))
    out.energy = mps_energy(out, params)
    return out


def finite_ground_state(
    params: ModelParams,
    n: int,
    chi: int,
    schedule: Schedule | None = None,
    seed: int = 0,
    method: Literal["tebd", "dmrg", "tebd+dmrg"] = "tebd",
    dmrg_sweeps: int = 20,
) -> FiniteMPS:
    """Open-chain ground state.

    ``method="tebd"`` runs the imaginary-time schedule only; ``"tebd+dmrg"``
    follows it with two-site variational sweeps; ``"dmrg"`` starts the sweeps
    from a random MPS.
    """
    if n < 4 or n % 2:
        raise ValueError("n must be even and >= 4")
    if method == "dmrg":
        mps = random_mps(n, min(chi, 16), seed, real=True)
        return dmrg(params, mps, chi, dmrg_sweeps)
    mps = tebd_ground_state(params, n, chi, schedule, seed)
    if method == "tebd+dmrg":
        mps = dmrg(params, mps, chi, dmrg_sweeps)
    elif method != "tebd":
        raise ValueError(f"unknown method {method!r}")
    return mps


# ---------------------------------------------------------------------------
# entropy profile and CFT fit


@dataclass(frozen=True)
class EntropyProfile:
    n_sites: int
    entropies: np.ndarray  # S_L for L = 1..n-1
    params: ModelParams | None = None
    boundary: str = "open"

    def lengths(self) -> np.ndarray:
        return np.arange(1, self.n_sites)

    def write_csv(self, path, fit: "CentralChargeFit | None" = None) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["L", "S_L", "chord_log2", "fitted"])
            x = chord_log2(self.n_sites, self.lengths())
            for L, s, xl in zip(self.lengths(), self.entropies, x):
                fitted = fit.predict(self.n_sites, L) if fit else ""
                w.writerow([int(L), repr(float(s)), repr(float(xl)), fitted])


@dataclass(frozen=True)
class CentralChargeFit:
    c: float
    a_const: float
    residual: float
    parity_used: str
    l_window: tuple
    boundary: str = "open"

    def predict(self, n, L) -> float:
        pref = 6.0 if self.boundary == "open" else 3.0
        return float(self.c / pref * chord_log2(n, L) + self.a_const)


def entropy_profile(mps: FiniteMPS) -> EntropyProfile:
    return EntropyProfile(
        mps.n_sites, np.array([entropy_of_weights(s) for s in mps.schmidt]), mps.params
    )


def chord_log2(n: int, L) -> np.ndarray:
    return np.log2(n / np.pi * np.sin(np.pi * np.asarray(L, dtype=float) / n))


def fit_central_charge(
    profile: EntropyProfile,
    parity: Literal["even", "odd", "all"] = "even",
    l_window: tuple | None = None,
    boundary: str | None = None,
) -> CentralChargeFit:
    """Least-squares fit of S_L = (c/k) log2[(N/pi) sin(pi L/N)] + A.

    k = 6 for open chains and 3 for periodic ones.  The default window is
    L in [N/8, 7N/8].
    """
    n = profile.n_sites
    boundary = boundary or profile.boundary
    if l_window is None:
        l_window = (max(1, n // 8), min(n - 1, (7 * n) // 8))
    lo, hi = l_window
    if not 1 <= lo <= hi <= n - 1:
        raise ValueError(f"window {l_window} outside [1, {n - 1}]")
    L = np.arange(lo, hi + 1)
    if parity == "even":
        L = L[L % 2 == 0]
    elif parity == "odd":
        L = L[L % 2 == 1]
    elif parity != "all":
        raise ValueError(f"parity must be even, odd or all, got {parity!r}")
    if len(L) < 4:
        raise ValueError("need at least 4 points for the fit")
    x = chord_log2(n, L)
    y = profile.entropies[L - 1]
    design = np.stack([x, np.ones_like(x)], axis=1)
    (slope, const), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sqrt(np.mean((design @ [slope, const] - y) ** 2)))
    pref = 6.0 if boundary == "open" else 3.0
    return CentralChargeFit(float(pref * slope), float(const), resid, parity, (lo, hi), boundary)
