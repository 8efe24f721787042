"""Quantum-information measures on iMPS ground states and density matrices."""

from __future__ import annotations

import numpy as np

from . import imps
from .imps import DensityMatrix, IMPSState
from .model import spin_operators

_OPS = spin_operators()
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
# exp(i pi S^x) for spin 1/2
STRING_X = 1j * SIGMA_X

PSD_TOL = 1e-10


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def _validate(rho: np.ndarray, dim: int | None = None) -> None:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if dim is not None and rho.shape[0] != dim:
        raise ValueError(f"expected a {dim}x{dim} density matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > PSD_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > PSD_TOL:
        raise ValueError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
        raise ValueError("density matrix is not positive semidefinite")


def fidelity_per_site(state1: IMPSState, state2: IMPSState) -> float:
    """Ground-state fidelity per site from leading mixed-transfer eigenvalues.

    The transfer maps span the two-site unit cell, so the per-cell ratio is
    square-rooted to get a per-site value.
    """
    mu12 = imps.mixed_transfer_modulus(state1, state2)
    if mu12 == 0:
        return 0.0
    mu11 = imps.mixed_transfer_modulus(state1, state1)
    mu22 = imps.mixed_transfer_modulus(state2, state2)
    d = np.sqrt(mu12 / np.sqrt(mu11 * mu22))
    return float(min(d, 1.0 + 1e-10))


def spin_flip(rho: np.ndarray) -> np.ndarray:
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    return yy @ rho.conj() @ yy


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state.

    The beta_i are the square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy), in descending order.  They are computed as the
    singular values of W^T (sy x sy) W with rho = W W^dag, which avoids square
    roots of round-off eigenvalues for low-rank states.
    """
    m = _matrix(rho)
    _validate(m, 4)
    p, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = v * np.sqrt(np.clip(p, 0, None))[None, :]
    beta = np.linalg.svd(w.T @ np.kron(SIGMA_Y, SIGMA_Y) @ w, compute_uv=False)
    return float(max(0.0, beta[0] - beta[1] - beta[2] - beta[3]))


def entropy(rho, cutoff: float = 1e-14) -> float:
    """von Neumann entropy in bits."""
    m = _matrix(rho)
    p = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    p = p[p > cutoff]
    return float(-np.sum(p * np.log2(p)))


def l1_coherence(rho, absolute: bool = True) -> float:
    """Sum of off-diagonal elements in the computational basis.

    ``absolute=False`` returns the plain (signed) sum of the off-diagonal entries
    for comparison; it is real for Hermitian input.
    """
    m = _matrix(rho)
    off = m - np.diag(np.diag(m))
    if absolute:
        return float(np.sum(np.abs(off)))
    return float(np.sum(off).real)


def wysi(rho, k) -> float:
    """Wigner-Yanase skew information -Tr([rho, K]^2) / 4."""
    m = _matrix(rho)
    k = np.asarray(k, dtype=complex)
    if k.shape != m.shape:
        raise ValueError(f"observable shape {k.shape} does not match density matrix {m.shape}")
    c = m @ k - k @ m
    return float(max(0.0, -np.trace(c @ c).real / 4))


def site_wysi(state: IMPSState, site: str = "average") -> float:
    """I(rho, sigma^x) on a single-site RDM: site "A" (odd), "B" (even) or "average"."""
    if site == "average":
        return 0.5 * (site_wysi(state, "A") + site_wysi(state, "B"))
    return wysi(imps.rdm(state, site), SIGMA_X)


def string_order(state: IMPSState, r: int) -> float:
    """-4 <S^x_i exp(i pi sum_{i<l<j} S^x_l) S^x_j> with i odd and j = i + r even."""
    val = -4 * imps.string_expectation(state, _OPS.sx, STRING_X, _OPS.sx, r)
    if abs(val.imag) > 1e-8:
        raise ArithmeticError(f"string order has imaginary part {val.imag:.3g}")
    return float(val.real)
