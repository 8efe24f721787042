"""Infinite MPS with a two-site unit cell stored in Vidal (Gamma, lambda) form.

Site A is the odd site 2i-1 and site B the even site 2i.  ``weights_a`` sits on
the odd bond A|B, ``weights_b`` on the even bond B|A.  Site tensors are indexed
``(physical, left, right)``.

Transfer-map conventions used throughout:

* left environments ``L[bra, ket]`` are pushed right with ``sum_s A^s+ L A^s``;
* right environments ``R[ket, bra]`` are pushed left with ``sum_s A^s R A^s+``.

so that an overlap closes as ``trace(L @ R)``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from .errors import NumericalBreakdown, TransferNonConvergence
from .model import TrotterGate

Bond = Literal["odd", "even"]

WEIGHT_CUTOFF = 1e-12
CANONICAL_TOL = 1e-6
DENSE_TRANSFER_MAX_CHI = 8
DEGENERACY_TOL = 1e-8
DENSE_FALLBACK_MAX_CHI = 64


@dataclass(frozen=True)
class IMPSState:
    gamma_a: np.ndarray
    gamma_b: np.ndarray
    weights_a: np.ndarray
    weights_b: np.ndarray
    chi_max: int

    @property
    def d(self) -> int:
        return self.gamma_a.shape[0]

    @property
    def chi(self) -> tuple[int, int]:
        return len(self.weights_a), len(self.weights_b)

    def weights(self, bond: Bond) -> np.ndarray:
        if bond == "odd":
            return self.weights_a
        if bond == "even":
            return self.weights_b
        raise ValueError(f"bond must be 'odd' or 'even', got {bond!r}")

    def left_tensors(self) -> tuple[np.ndarray, np.ndarray]:
        """Left-canonical (lambda Gamma) tensors for sites A and B."""
        a = self.weights_b[None, :, None] * self.gamma_a
        b = self.weights_a[None, :, None] * self.gamma_b
        return a, b

    def right_tensors(self) -> tuple[np.ndarray, np.ndarray]:
        """Right-canonical (Gamma lambda) tensors for sites A and B."""
        a = self.gamma_a * self.weights_a[None, None, :]
        b = self.gamma_b * self.weights_b[None, None, :]
        return a, b


@dataclass(frozen=True)
class TransferEigenpair:
    eigenvalue: complex
    left_vector: np.ndarray
    right_vector: np.ndarray


# ---------------------------------------------------------------------------
# transfer-map primitives


def push_left(ket: np.ndarray, bra: np.ndarray, env: np.ndarray, op=None) -> np.ndarray:
    """sum_{s,s'} op[s,s'] bra^s+ env ket^{s'}; env is (bra_left, ket_left)."""
    if op is not None:
        ket = np.tensordot(op, ket, axes=(1, 0))
    t = np.tensordot(env, ket, axes=(1, 1))  # (a, s, d)
    return np.tensordot(bra.conj(), t, axes=([0, 1], [1, 0]))


def push_right(ket: np.ndarray, bra: np.ndarray, env: np.ndarray) -> np.ndarray:
    """sum_s ket^s env bra^s+; env is (ket_right, bra_right)."""
    t = np.tensordot(ket, env, axes=(2, 0))  # (s, l, r')
    return np.tensordot(t, bra.conj(), axes=([0, 2], [0, 2]))


def contract_operator_string(
    tensors: Sequence[np.ndarray],
    ops: Sequence[np.ndarray | None],
    left_env: np.ndarray,
    right_env: np.ndarray,
) -> complex:
    """<op_1 op_2 ... op_n> over consecutive sites; ``None`` means identity."""
    env = left_env
    for a, op in zip(tensors, ops):
        env = push_left(a, a, env, op)
    return complex(np.trace(env @ right_env))


def _as_hermitian_psd(m: np.ndarray) -> np.ndarray:
    tr = np.trace(m)
    if abs(tr) > 0:
        m = m * (abs(tr) / tr)
    else:
        k = np.argmax(np.abs(m))
        m = m * (abs(m.flat[k]) / m.flat[k])
    return 0.5 * (m + m.conj().T)


def _on_positive_axis(z: complex) -> bool:
    return z.real > 0 and abs(z.imag) <= DEGENERACY_TOL * abs(z)


def _leading_eig(apply, shape, x0, tol=1e-13):
    """Largest-magnitude eigenpair of a linear map acting on matrices of ``shape``."""
    n = shape[0] * shape[1]
    w = None
    if n > DENSE_TRANSFER_MAX_CHI**2:
        op = spla.LinearOperator(
            (n, n), matvec=lambda x: apply(x.reshape(shape)).ravel(), dtype=complex
        )
        v0 = np.asarray(x0, complex).ravel()
        try:
            w, v = spla.eigs(op, k=1, which="LM", v0=v0, tol=tol)
            if not _on_positive_axis(w[0]):
                w, v = spla.eigs(op, k=min(4, n - 2), which="LM", v0=v[:, 0], tol=tol)
        except spla.ArpackNoConvergence as exc:
            # clustered top spectra (nearly non-injective states) can stall Arnoldi;
            # the explicit matrix is still affordable at moderate bond dimension
            if n > DENSE_FALLBACK_MAX_CHI**2:
                raise TransferNonConvergence("Arnoldi iteration did not converge") from exc
            w = None
    if w is None:
        basis = np.eye(n, dtype=complex)
        mat = np.stack([apply(basis[k].reshape(shape)).ravel() for k in range(n)], axis=1)
        w, v = np.linalg.eig(mat)
    # a non-injective state (e.g. a superposition of two translates) has several
    # eigenvalues on the top circle; the positive fixed point belongs to the one
    # on the positive real axis
    top = np.abs(w) >= (1 - DEGENERACY_TOL) * np.abs(w).max()
    k = np.flatnonzero(top)[np.argmax(w[top].real)]
    return w[k], v[:, k].reshape(shape)


# ---------------------------------------------------------------------------
# canonical form


def _factor_right(r: np.ndarray, cutoff: float) -> np.ndarray:
    w, v = np.linalg.eigh(r)
    keep = w > cutoff * max(w.max(), 0.0)
    return v[:, keep] * np.sqrt(w[keep])


def _factor_left(l: np.ndarray, cutoff: float) -> np.ndarray:
    w, v = np.linalg.eigh(l)
    keep = w > cutoff * max(w.max(), 0.0)
    return np.sqrt(w[keep])[:, None] * v[:, keep].conj().T


def canonicalize(state: IMPSState, chi_max: int | None = None) -> IMPSState:
    """Restore exact Vidal canonical form from the transfer-map fixed points.

    Works for any (normalized or not) injective two-site iMPS; bond weights are
    renormalized so that each bond has unit norm.
    """
    chi_max = state.chi_max if chi_max is None else chi_max
    ma, mb = state.right_tensors()
    if not (np.all(np.isfinite(ma)) and np.all(np.isfinite(mb))):
        raise NumericalBreakdown("non-finite tensor entries")
    chib = ma.shape[1]

    def right_map(r):
        return push_right(ma, ma, push_right(mb, mb, r))

    def left_map(l):
        return push_left(mb, mb, push_left(ma, ma, l))

    lb = state.weights_b
    eta, rb = _leading_eig(right_map, (chib, chib), np.eye(chib))
    _, lft = _leading_eig(left_map, (chib, chib), np.diag(lb**2))
    eta = abs(eta)
    if eta == 0 or not np.isfinite(eta):
        raise NumericalBreakdown("vanishing transfer-map spectrum")
    rb = _as_hermitian_psd(rb)
    lft = _as_hermitian_psd(lft)
    ma = ma / np.sqrt(eta)
    ra = push_right(mb, mb, rb)
    la = push_left(ma, ma, lft)
    norm = np.trace(lft @ rb).real
    rb, ra = rb / norm, ra / norm

    def bond_gauge(l, r):
        x = _factor_right(r, 1e-15)
        y = _factor_left(l, 1e-15)
        u, s, vh = np.linalg.svd(y @ x, full_matrices=False)
        keep = max(1, min(chi_max, int(np.sum(s > WEIGHT_CUTOFF * s[0]))))
        u, s, vh = u[:, :keep], s[:keep], vh[:keep]
        # P = s^-1 U+ Y acts on the tensor right of the bond, Q = X V+ s^-1 on the one left of it
        p = (u.conj().T @ y) / s[:, None]
        q = (x @ vh.conj().T) / s[None, :]
        return p, q, s / np.linalg.norm(s)

    pb, qb, wb = bond_gauge(lft, rb)
    pa, qa, wa = bond_gauge(la, ra)
    ga = np.einsum("ij,sjk,kl->sil", pb, ma, qa)
    gb = np.einsum("ij,sjk,kl->sil", pa, mb, qb)
    return IMPSState(ga, gb, wa, wb, chi_max)


def canonical_residual(state: IMPSState) -> float:
    """Max deviation from the left and right isometry conditions on both sites."""
    res = 0.0
    for a in state.left_tensors():
        e = push_left(a, a, np.eye(a.shape[1]))
        res = max(res, np.max(np.abs(e - np.eye(e.shape[0]))))
    for b in state.right_tensors():
        e = push_right(b, b, np.eye(b.shape[2]))
        res = max(res, np.max(np.abs(e - np.eye(e.shape[0]))))
    return float(res)


# ---------------------------------------------------------------------------
# constructors


def init_random(chi: int, seed: int, d: int = 2) -> IMPSState:
    """Random full-rank iMPS brought to canonical form; deterministic in ``seed``."""
    if chi < 1:
        raise ValueError("chi must be >= 1")
    rng = np.random.default_rng(seed)

    def rand(shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    w = np.full(chi, 1 / np.sqrt(chi))
    raw = IMPSState(rand((d, chi, chi)), rand((d, chi, chi)), w, w.copy(), chi)
    return canonicalize(raw, chi)


def perturb(state: IMPSState, eps: float, seed: int) -> IMPSState:
    """Pad to ``chi_max`` and add relative noise ``eps`` to the right tensors.

    Used to release a warm start from a symmetry sector it cannot leave under
    symmetric gates (e.g. a fixed magnetization).
    """
    rng = np.random.default_rng(seed)
    chi = state.chi_max
    out = []
    for m in state.right_tensors():
        pad = np.zeros((m.shape[0], chi, chi), dtype=complex)
        pad[:, : m.shape[1], : m.shape[2]] = m
        noise = rng.standard_normal(pad.shape) + 1j * rng.standard_normal(pad.shape)
        out.append(pad + eps * np.max(np.abs(m)) * noise)
    one = np.ones(chi)
    return canonicalize(IMPSState(out[0], out[1], one, one.copy(), chi), chi)


def product_state(site_a, site_b=None, chi_max: int = 1) -> IMPSState:
    """Translation-invariant product state with given (unnormalized) qubit vectors."""
    va = np.asarray(site_a, dtype=complex)
    vb = va if site_b is None else np.asarray(site_b, dtype=complex)
    va = va / np.linalg.norm(va)
    vb = vb / np.linalg.norm(vb)
    one = np.ones(1)
    return IMPSState(va.reshape(-1, 1, 1), vb.reshape(-1, 1, 1), one, one.copy(), chi_max)


def dimer_state(bond: Bond = "odd", chi_max: int = 2) -> IMPSState:
    """Singlets (|ud> - |du>)/sqrt2 on every odd (or every even) bond."""
    left = np.zeros((2, 1, 2), dtype=complex)
    left[0, 0, 0] = left[1, 0, 1] = 1.0
    right = np.zeros((2, 2, 1), dtype=complex)
    right[1, 0, 0] = 1.0
    right[0, 1, 0] = -1.0
    half = np.full(2, 1 / np.sqrt(2))
    one = np.ones(1)
    if bond == "odd":
        return IMPSState(left, right, half, one, chi_max)
    return IMPSState(right, left, one, half, chi_max)


# ---------------------------------------------------------------------------
# gate application


def _update_bond(gl, gr, w_out, w_mid, gate, chi_max):
    """Two-site update of gl -w_mid- gr embedded between outer weights ``w_out``.

    Returns new (gl, gr, w_mid, truncation_error).
    """
    d = gl.shape[0]
    x = w_out[None, :, None] * gl * w_mid[None, None, :]
    y = gr * w_out[None, None, :]
    theta = np.tensordot(x, y, axes=(2, 1))  # (s, l, t, r)
    g = gate.reshape(d, d, d, d)
    theta = np.tensordot(g, theta, axes=([2, 3], [0, 2]))  # (s', t', l, r)
    chil, chir = theta.shape[2], theta.shape[3]
    theta = theta.transpose(0, 2, 1, 3).reshape(d * chil, d * chir)
    if not np.all(np.isfinite(theta)):
        raise NumericalBreakdown("non-finite entries in two-site wavefunction")
    try:
        u, s, vh = np.linalg.svd(theta, full_matrices=False)
    except np.linalg.LinAlgError:
        try:
            u, s, vh = scipy.linalg.svd(theta, full_matrices=False, lapack_driver="gesvd")
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericalBreakdown("SVD failed") from exc
    total = np.sum(s**2)
    if total == 0 or not np.isfinite(total):
        raise NumericalBreakdown("two-site wavefunction vanished")
    keep = max(1, min(chi_max, int(np.sum(s > WEIGHT_CUTOFF * s[0]))))
    trunc = float(np.sum(s[keep:] ** 2) / total)
    s = s[:keep] / np.sqrt(np.sum(s[:keep] ** 2))
    new_l = u[:, :keep].reshape(d, chil, keep) / w_out[None, :, None]
    new_r = vh[:keep].reshape(keep, d, chir).transpose(1, 0, 2) / w_out[None, None, :]
    return new_l, new_r, s, trunc


def apply_gate(
    state: IMPSState, gate: TrotterGate, chi_max: int | None = None, *, recanonicalize: bool = True
) -> tuple[IMPSState, float]:
    """Apply a two-site gate on every odd (A|B) or every even (B|A) bond.

    Returns the new state and the discarded weight sum(lambda^2) of the
    truncation.  If the update leaves the state further than ``CANONICAL_TOL``
    from canonical form it is re-canonicalized.
    """
    chi_max = state.chi_max if chi_max is None else chi_max
    if gate.parity == "odd":
        ga, gb, wa, trunc = _update_bond(
            state.gamma_a, state.gamma_b, state.weights_b, state.weights_a, gate.matrix, chi_max
        )
        new = IMPSState(ga, gb, wa, state.weights_b, chi_max)
    else:
        gb, ga, wb, trunc = _update_bond(
            state.gamma_b, state.gamma_a, state.weights_a, state.weights_b, gate.matrix, chi_max
        )
        new = IMPSState(ga, gb, state.weights_a, wb, chi_max)
    if recanonicalize and canonical_residual(new) > CANONICAL_TOL:
        new = canonicalize(new, chi_max)
    return new, trunc


# ---------------------------------------------------------------------------
# measurements


def entropy_of_weights(w: np.ndarray) -> float:
    p = np.asarray(w, dtype=float) ** 2
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def bond_entropy(state: IMPSState, bond: Bond) -> float:
    """Entanglement entropy (bits) of a half-infinite cut at the given bond."""
    return entropy_of_weights(state.weights(bond))


def block_tensor(state: IMPSState, start: int, length: int) -> np.ndarray:
    """Contract ``length`` sites from site A (start=0) or B (start=1).

    Returns (chi_left, d**length, chi_right) including the outer bond weights.
    """
    if start not in (0, 1) or length < 1:
        raise ValueError("start must be 0 (site A) or 1 (site B), length >= 1")
    gammas = (state.gamma_a, state.gamma_b)
    rights = (state.weights_a, state.weights_b)
    left_w = state.weights_b if start == 0 else state.weights_a
    t = np.diag(left_w).astype(complex)[:, None, :]
    for k in range(length):
        site = (start + k) % 2
        g = gammas[site] * rights[site][None, None, :]
        t = np.tensordot(t, g, axes=(2, 1))  # (l, p, s, r)
        t = t.reshape(t.shape[0], -1, t.shape[3])
    return t


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    site_labels: tuple


def rdm(state: IMPSState, sites: str | tuple = "odd") -> DensityMatrix:
    """Reduced density matrix of one site or a contiguous block.

    ``sites`` is "A" / "B" for one site, "odd" / "even" for the pair on that
    bond, or ``(start, length)`` with start 0 for A and 1 for B.
    """
    named = {"A": (0, 1), "B": (1, 1), "odd": (0, 2), "even": (1, 2)}
    start, length = named[sites] if isinstance(sites, str) else sites
    t = block_tensor(state, start, length)
    rho = np.tensordot(t, t.conj(), axes=([0, 2], [0, 2]))
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    labels = tuple("AB"[(start + k) % 2] for k in range(length))
    return DensityMatrix(rho, labels)


def string_expectation(
    state: IMPSState, left_op, string_op, right_op, r: int
) -> complex:
    """<left_op_i  prod_{i<l<j} string_op_l  right_op_j> with i on site A, j = i + r."""
    if r < 1 or r % 2 == 0:
        raise ValueError("r must be an odd integer >= 1")
    a, b = state.left_tensors()
    tensors = [a if k % 2 == 0 else b for k in range(r + 1)]
    ops = [left_op] + [string_op] * (r - 1) + [right_op]
    left_env = np.eye(a.shape[1], dtype=complex)
    right_env = np.diag(state.weights_b**2).astype(complex)
    return contract_operator_string(tensors, ops, left_env, right_env)


def _mixed_maps(state1: IMPSState, state2: IMPSState):
    a1, b1 = state1.left_tensors()
    a2, b2 = state2.left_tensors()
    if a1.shape[0] != a2.shape[0]:
        raise ValueError("physical dimensions differ")

    def left_map(env):  # env (bra=2, ket=1)
        return push_left(b1, b2, push_left(a1, a2, env))

    def right_map(env):  # env (ket=1, bra=2)
        return push_right(a1, a2, push_right(b1, b2, env))

    return left_map, right_map, (a2.shape[1], a1.shape[1])


def _power_iteration(apply, x0, tol, maxiter):
    x = x0 / np.linalg.norm(x0)
    mu = 0.0
    for it in range(1, maxiter + 1):
        y = apply(x)
        ny = np.linalg.norm(y)
        if ny < 1e-300:
            return 0.0, x, it, True
        mu = np.vdot(x, y)  # Rayleigh quotient, |x| = 1
        res = np.linalg.norm(y - mu * x)
        x = y / ny
        if res <= tol * max(abs(mu), 1e-300):
            return mu, x, it, True
    return mu, x, maxiter, False


def mixed_transfer_leading(
    state1: IMPSState,
    state2: IMPSState,
    *,
    method: str = "power",
    tol: float = 1e-12,
    maxiter: int = 20000,
) -> TransferEigenpair:
    """Leading eigenpair of the unit-cell map sum_s A1^s (x) conj(A2^s).

    ``method="power"`` uses power iteration with an Arnoldi fallback when the
    iteration cap is hit; ``method="dense"`` builds the explicit matrix and is
    meant as a cross-check for small bond dimensions.
    """
    left_map, right_map, shape = _mixed_maps(state1, state2)
    rshape = shape[::-1]
    if method == "dense":
        n = shape[0] * shape[1]
        basis = np.eye(n, dtype=complex)
        mat = np.stack([left_map(basis[k].reshape(shape)).ravel() for k in range(n)], axis=1)
        w, vl = np.linalg.eig(mat)
        k = np.argmax(np.abs(w))
        lam, lvec = w[k], vl[:, k].reshape(shape)
        rbasis = np.eye(n, dtype=complex)
        rmat = np.stack([right_map(rbasis[k].reshape(rshape)).ravel() for k in range(n)], axis=1)
        wr, vr = np.linalg.eig(rmat)
        rvec = vr[:, np.argmax(np.abs(wr))].reshape(rshape)
    elif method == "power":
        lam, lvec = _leading_power(left_map, shape, tol, maxiter)
        _, rvec = _leading_power(right_map, rshape, tol, maxiter)
    else:
        raise ValueError(f"unknown method {method!r}")
    overlap = np.trace(lvec @ rvec)
    if abs(overlap) > 1e-300:
        rvec = rvec / overlap
    return TransferEigenpair(complex(lam), lvec, rvec)


def mixed_transfer_modulus(
    state1: IMPSState, state2: IMPSState, *, tol: float = 1e-12, maxiter: int = 20000
) -> float:
    """|leading eigenvalue| of the mixed unit-cell map.

    Unlike :func:`mixed_transfer_leading` this accepts a degenerate top of the
    spectrum (e.g. a +mu/-mu pair when the states differ by a period-two
    modulation of the cell), since only the modulus is asked for.
    """
    left_map, _, shape = _mixed_maps(state1, state2)
    mu, x, _, ok = _power_iteration(left_map, np.eye(*shape, dtype=complex), tol, maxiter)
    if ok:
        return float(abs(mu))
    n = shape[0] * shape[1]
    if n <= 64:
        basis = np.eye(n, dtype=complex)
        mat = np.stack([left_map(basis[k].reshape(shape)).ravel() for k in range(n)], axis=1)
        return float(np.max(np.abs(np.linalg.eigvals(mat))))
    op = spla.LinearOperator((n, n), matvec=lambda v: left_map(v.reshape(shape)).ravel(), dtype=complex)
    try:
        w = spla.eigs(op, k=min(4, n - 2), which="LM", v0=x.ravel(), tol=tol, return_eigenvectors=False)
    except spla.ArpackNoConvergence as exc:
        raise TransferNonConvergence("leading transfer eigenvalue did not converge") from exc
    return float(np.max(np.abs(w)))


def _leading_power(apply, shape, tol, maxiter):
    x0 = np.eye(*shape, dtype=complex)
    mu, x, _, ok = _power_iteration(apply, x0, tol, maxiter)
    if ok:
        return mu, x
    n = shape[0] * shape[1]
    op = spla.LinearOperator(
        (n, n), matvec=lambda v: apply(v.reshape(shape)).ravel(), dtype=complex
    )
    try:
        k = 2 if n > 3 else 1
        w, v = spla.eigs(op, k=k, which="LM", v0=x.ravel(), tol=tol)
    except spla.ArpackNoConvergence as exc:
        raise TransferNonConvergence("leading transfer eigenvalue did not converge") from exc
    order = np.argsort(-np.abs(w))
    w, v = w[order], v[:, order]
    if len(w) > 1 and abs(abs(w[0]) - abs(w[1])) <= 1e-8 * abs(w[0]) and abs(w[0]) > 1e-12:
        raise TransferNonConvergence(
            f"degenerate leading transfer eigenvalues {w[0]:.6g}, {w[1]:.6g}"
        )
    return w[0], v[:, 0].reshape(shape)


# ---------------------------------------------------------------------------
# checkpoint format
#
# header (little-endian, 28 bytes):
#   4s  magic  b"IMPS"
#   H   format version (1)
#   H   physical dimension d
#   H   unit-cell size (2)
#   H   reserved (0)
#   I   chi of the odd bond (weights_a)
#   I   chi of the even bond (weights_b)
#   I   chi_max
# body:
#   gamma_a  (d, chi_b, chi_a)  complex128 as (re, im) float64 pairs, C order
#   gamma_b  (d, chi_a, chi_b)  same encoding
#   weights_a (chi_a,) float64
#   weights_b (chi_b,) float64

_MAGIC = b"IMPS"
_VERSION = 1
_HEADER = struct.Struct("<4sHHHHIII")


def dumps(state: IMPSState) -> bytes:
    chi_a, chi_b = state.chi
    head = _HEADER.pack(_MAGIC, _VERSION, state.d, 2, 0, chi_a, chi_b, state.chi_max)
    parts = [
        head,
        np.ascontiguousarray(state.gamma_a, dtype="<c16").tobytes(),
        np.ascontiguousarray(state.gamma_b, dtype="<c16").tobytes(),
        np.ascontiguousarray(state.weights_a, dtype="<f8").tobytes(),
        np.ascontiguousarray(state.weights_b, dtype="<f8").tobytes(),
    ]
    return b"".join(parts)


def loads(data: bytes) -> IMPSState:
    if len(data) < _HEADER.size:
        raise ValueError("checkpoint too short")
    magic, version, d, cell, _, chi_a, chi_b, chi_max = _HEADER.unpack_from(data)
    if magic != _MAGIC:
        raise ValueError("not an IMPS checkpoint")
    if version != _VERSION or cell != 2:
        raise ValueError(f"unsupported checkpoint version {version} / cell {cell}")
    off = _HEADER.size
    arrays = []
    for shape, dt in (
        ((d, chi_b, chi_a), "<c16"),
        ((d, chi_a, chi_b), "<c16"),
        ((chi_a,), "<f8"),
        ((chi_b,), "<f8"),
    ):
        n = int(np.prod(shape))
        size = n * np.dtype(dt).itemsize
        if off + size > len(data):
            raise ValueError("truncated checkpoint")
        arrays.append(np.frombuffer(data, dtype=dt, count=n, offset=off).reshape(shape).copy())
        off += size
    if off != len(data):
        raise ValueError("trailing bytes in checkpoint")
    return IMPSState(*arrays, chi_max=chi_max)


def save(state: IMPSState, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps(state))


def load(path) -> IMPSState:
    with open(path, "rb") as fh:
        return loads(fh.read())
