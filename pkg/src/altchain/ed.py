"""Dense exact diagonalization of the alternating chain for N <= 14.

Basis states are labelled by sigma_i in {0: up, 1: down} with site 0 the most
significant bit, so the full state vector reshapes to ``(2,) * N`` with axis i
belonging to site i, matching ``np.kron`` ordering of local operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
import scipy.linalg

from .model import ModelParams

Boundary = Literal["open", "periodic"]

N_MAX = 14


@dataclass(frozen=True)
class EDResult:
    energy: float
    ground_vector: np.ndarray
    degeneracy: int
    n_sites: int
    boundary: str
    magnetization: float = 0.0


def _check_n(n):
    if n < 2 or n > N_MAX or n % 2:
        raise ValueError(f"n must be even with 2 <= n <= {N_MAX}, got {n}")


def bonds(params: ModelParams, n: int, boundary: Boundary):
    """(i, j, coupling) for every bond; site 0 is the first odd site."""
    out = [(i, i + 1, params.j if i % 2 == 0 else params.lam) for i in range(n - 1)]
    if boundary == "periodic" and n > 2:
        out.append((n - 1, 0, params.lam))
    elif boundary not in ("open", "periodic"):
        raise ValueError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    return out


def _popcount(states, n):
    return sum(((states >> k) & 1) for k in range(n))


def sector_hamiltonian(params: ModelParams, n: int, boundary: Boundary, n_down: int):
    """Dense block of H with a fixed number of down spins; returns (states, H)."""
    all_states = np.arange(2**n, dtype=np.int64)
    states = all_states[_popcount(all_states, n) == n_down]
    dim = len(states)
    h = np.zeros((dim, dim))
    sz_total = 0.5 * (n - 2 * n_down)
    diag = np.full(dim, -params.b * sz_total)
    for i, j, coupling in bonds(params, n, boundary):
        if coupling == 0:
            continue
        bi = (states >> (n - 1 - i)) & 1
        bj = (states >> (n - 1 - j)) & 1
        same = bi == bj
        diag += coupling * params.delta * np.where(same, 0.25, -0.25)
        flip = states[~same] ^ ((1 << (n - 1 - i)) | (1 << (n - 1 - j)))
        rows = np.searchsorted(states, flip)
        cols = np.nonzero(~same)[0]
        h[rows, cols] += 0.5 * coupling
    h[np.diag_indices(dim)] += diag
    return states, h


def ed_ground_state(
    params: ModelParams, n: int, boundary: Boundary = "open", degeneracy_tol: float = 1e-9
) -> EDResult:
    """Lowest eigenpair over all total-Sz blocks."""
    _check_n(n)
    best = None
    lows = []
    for n_down in range(n + 1):
        states, h = sector_hamiltonian(params, n, boundary, n_down)
        k = min(len(states), 4)
        w, v = scipy.linalg.eigh(h, subset_by_index=[0, k - 1])
        lows.extend(w)
        if best is None or w[0] < best[0]:
            best = (w[0], states, v[:, 0], n_down)
    energy, states, vec, n_down = best
    full = np.zeros(2**n, dtype=complex)
    full[states] = vec
    lows = np.asarray(lows)
    degeneracy = int(np.sum(np.abs(lows - energy) <= degeneracy_tol * max(1.0, abs(energy))))
    return EDResult(float(energy), full, degeneracy, n, boundary, 0.5 * (n - 2 * n_down))


def full_hamiltonian(params: ModelParams, n: int, boundary: Boundary = "open") -> np.ndarray:
    """Dense 2^n x 2^n matrix, built from Kronecker products (slow; for cross-checks)."""
    _check_n(n)
    from .model import exchange, spin_operators

    ops = spin_operators()
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i, j, coupling in bonds(params, n, boundary):
        pair = coupling * exchange(params.delta).reshape(2, 2, 2, 2)
        h += _embed_two(pair, i, j, n)
    for i in range(n):
        h += _embed([(i, -params.b * ops.sz)], n)
    return h


def _embed(ops, n):
    mats = [np.eye(2, dtype=complex)] * n
    for site, m in ops:
        mats[site] = m
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _embed_two(pair, i, j, n):
    out = np.zeros((2**n, 2**n), dtype=complex)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    if pair[a, b, c, d] == 0:
                        continue
                    ea = np.zeros((2, 2))
                    ea[a, c] = 1
                    eb = np.zeros((2, 2))
                    eb[b, d] = 1
                    out += pair[a, b, c, d] * _embed([(i, ea), (j, eb)], n)
    return out


def apply_operators(vector: np.ndarray, n: int, operator_string: Sequence) -> np.ndarray:
    sites = [s for s, _ in operator_string]
    if len(set(sites)) != len(sites):
        raise ValueError("site collision in operator string")
    psi = vector.reshape((2,) * n)
    for site, op in operator_string:
        if not 0 <= site < n:
            raise ValueError(f"site {site} out of range")
        psi = np.moveaxis(np.tensordot(op, psi, axes=(1, site)), 0, site)
    return psi.reshape(-1)


def ed_expectation(result: EDResult, operator_string: Sequence) -> complex:
    """<v| prod_i O_i |v> for a list of (site, 2x2 matrix)."""
    v = result.ground_vector
    return complex(np.vdot(v, apply_operators(v, result.n_sites, operator_string)))


def ed_rdm(result: EDResult, sites: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of the listed sites (in the given order)."""
    n = result.n_sites
    psi = result.ground_vector.reshape((2,) * n)
    rest = [k for k in range(n) if k not in sites]
    psi = np.transpose(psi, list(sites) + rest).reshape(2 ** len(sites), -1)
    return psi @ psi.conj().T


def ed_spectrum(params: ModelParams, n: int, boundary: Boundary = "open", levels: int = 4):
    """Lowest ``levels`` eigenvalues in every total-Sz sector: list of (Sz, energies)."""
    _check_n(n)
    out = []
    for n_down in range(n + 1):
        states, h = sector_hamiltonian(params, n, boundary, n_down)
        k = min(len(states), levels)
        w = scipy.linalg.eigh(h, eigvals_only=True, subset_by_index=[0, k - 1])
        out.append((0.5 * (n - 2 * n_down), w))
    return out
