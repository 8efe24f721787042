"""Exact free-fermion solution of the dimerized XX chain (delta = 0).

After Jordan-Wigner the chain is a tight-binding model with hoppings 1/2 on odd
bonds and lam/2 on even bonds and on-site energy -B.  Single-particle bands are

    eps_pm(k) = +-1/2 sqrt(1 + lam^2 + 2 lam cos k) - B.

A periodic spin chain with an even number of fermions maps onto antiperiodic
fermions, whose momenta are k = 2 pi m / N with m odd; those are the momenta
returned by :func:`allowed_momenta`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import integrate

FermionBC = Literal["periodic", "antiperiodic", "open"]

ZERO_MODE_TOL = 1e-12


@dataclass(frozen=True)
class FermionSpectrum:
    momenta: np.ndarray
    eps_plus: np.ndarray
    eps_minus: np.ndarray
    lam: float
    b: float


@dataclass(frozen=True)
class CorrelationMatrix:
    matrix: np.ndarray
    n_sites: int
    boundary: str


def _check_even(n):
    if n < 2 or n % 2:
        raise ValueError(f"number of sites must be even and >= 2, got {n}")


def allowed_momenta(n: int) -> np.ndarray:
    _check_even(n)
    m = np.arange(-(n // 2 - 1), n // 2, 2)
    return 2 * np.pi * m / n


def dispersion(lam: float, b: float, k):
    half_width = 0.5 * np.sqrt(1 + lam**2 + 2 * lam * np.cos(k))
    return half_width - b, -half_width - b


def spectrum(n: int, lam: float, b: float) -> FermionSpectrum:
    k = allowed_momenta(n)
    ep, em = dispersion(lam, b, k)
    return FermionSpectrum(k, ep, em, lam, b)


def phase_boundaries(lam: float) -> tuple[float, float]:
    """Fields where the upper band touches zero: |1+lam|/2 (k=0) and |1-lam|/2 (k=pi)."""
    lo, hi = sorted((abs(1 + lam) / 2, abs(1 - lam) / 2))
    return lo, hi


def _mode_energy(ep, em):
    return np.minimum(ep, 0) + np.minimum(em, 0) - (ep + em) / 2


def gs_energy_per_site(lam: float, b: float, n: int | None = None) -> float:
    """Ground-state energy per site; ``n=None`` gives the thermodynamic limit."""
    if n is not None:
        s = spectrum(n, lam, b)
        return float(np.sum(_mode_energy(s.eps_plus, s.eps_minus)) / n)

    def f(k):
        return _mode_energy(*dispersion(lam, b, k))

    # kinks where eps_plus crosses zero: cos k = (4 b^2 - 1 - lam^2) / (2 lam)
    points = []
    if lam != 0:
        c = (4 * b**2 - 1 - lam**2) / (2 * lam)
        if -1 < c < 1:
            k0 = float(np.arccos(c))
            points = [-k0, k0]
    val, _ = integrate.quad(f, -np.pi, np.pi, points=points or None, epsabs=1e-13, epsrel=1e-12, limit=400)
    # N/2 momenta per N sites: (1/N) sum_k -> (1/2) (1/2pi) integral
    return float(val / (4 * np.pi))


def hopping_matrix(n: int, lam: float, b: float, bc: FermionBC = "antiperiodic") -> np.ndarray:
    """Real-space single-particle Hamiltonian (sites 0..n-1, site 0 is an odd site)."""
    _check_even(n)
    h = np.zeros((n, n))
    for i in range(n - 1):
        t = 0.5 if i % 2 == 0 else 0.5 * lam
        h[i, i + 1] = h[i + 1, i] = t
    if bc != "open":
        sign = 1.0 if bc == "periodic" else -1.0
        h[n - 1, 0] += sign * 0.5 * lam
        h[0, n - 1] += sign * 0.5 * lam
    h[np.diag_indices(n)] = -b
    return h


def correlation_matrix(
    n: int, lam: float, b: float, boundary: FermionBC = "antiperiodic"
) -> CorrelationMatrix:
    """<c_i^+ c_j> with every strictly negative mode filled (zero modes empty).

    The default boundary is the one compatible with ``allowed_momenta``.
    """
    h = hopping_matrix(n, lam, b, boundary)
    eps, u = np.linalg.eigh(h)
    occ = u[:, eps < -ZERO_MODE_TOL]
    c = occ.conj() @ occ.T
    return CorrelationMatrix(c, n, boundary)


def block_entropy_from_correlations(c: CorrelationMatrix, l: int) -> float:
    """Entropy (bits) of sites 0..l-1 from the eigenvalues of the l x l block."""
    if not 1 <= l < c.n_sites:
        raise ValueError(f"block length must be in [1, {c.n_sites - 1}], got {l}")
    nu = np.linalg.eigvalsh(c.matrix[:l, :l])
    nu = nu[(nu > 1e-15) & (nu < 1 - 1e-15)]
    return float(-np.sum(nu * np.log2(nu) + (1 - nu) * np.log2(1 - nu)))


def entropy_profile(c: CorrelationMatrix) -> np.ndarray:
    """S_L for L = 1..n-1."""
    return np.array([block_entropy_from_correlations(c, l) for l in range(1, c.n_sites)])


def _sector_energy(n, lam, b, bc, parity):
    eps = np.linalg.eigvalsh(hopping_matrix(n, lam, b, bc))
    neg = eps[eps < -ZERO_MODE_TOL]
    rest = eps[eps >= -ZERO_MODE_TOL]
    e = neg.sum()
    if len(neg) % 2 != parity:
        options = []
        if len(rest):
            options.append(e + rest.min())
        if len(neg):
            options.append(e - neg.max())
        e = min(options)
    return e + n * b / 2


def periodic_chain_energy(n: int, lam: float, b: float) -> float:
    """Exact ground-state energy per site of the periodic spin chain at delta = 0.

    The Jordan-Wigner boundary term makes fermions antiperiodic for even
    particle number and periodic for odd; both sectors are solved and the
    lower energy kept.
    """
    _check_even(n)
    even = _sector_energy(n, lam, b, "antiperiodic", 0)
    odd = _sector_energy(n, lam, b, "periodic", 1)
    return float(min(even, odd) / n)


def open_chain_energy(n: int, lam: float, b: float) -> float:
    _check_even(n)
    eps = np.linalg.eigvalsh(hopping_matrix(n, lam, b, "open"))
    return float((eps[eps < -ZERO_MODE_TOL].sum() + n * b / 2) / n)
