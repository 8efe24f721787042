"""Hamiltonian of the spin-1/2 alternating Heisenberg chain in a longitudinal field.

    H = sum_i  J (S_{2i-1} . S_{2i})_Delta  +  lam (S_{2i} . S_{2i+1})_Delta  -  B sum_i S_i^z

with ``(S_a . S_b)_Delta = Sx Sx + Sy Sy + Delta Sz Sz`` and J fixed to 1.
Odd bonds join sites (2i-1, 2i), even bonds join (2i, 2i+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

Parity = Literal["odd", "even"]


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the alternating chain. ``lam`` is the even-bond coupling."""

    lam: float
    delta: float
    b: float
    j: float = 1.0

    def __post_init__(self):
        for name in ("lam", "delta", "b", "j"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.j != 1.0:
            raise ValueError("odd-bond coupling j is fixed to 1")

    def coupling(self, parity: Parity) -> float:
        if parity == "odd":
            return self.j
        if parity == "even":
            return self.lam
        raise ValueError(f"parity must be 'odd' or 'even', got {parity!r}")

    def replace(self, **changes) -> "ModelParams":
        kw = {"lam": self.lam, "delta": self.delta, "b": self.b}
        kw.update(changes)
        return ModelParams(**kw)


@dataclass(frozen=True)
class SpinOperatorSet:
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    identity: np.ndarray


def spin_operators() -> SpinOperatorSet:
    """Spin-1/2 matrices in the basis (|up>, |down>)."""
    sx = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
    sy = np.array([[0, -0.5j], [0.5j, 0]], dtype=complex)
    sz = np.array([[0.5, 0], [0, -0.5]], dtype=complex)
    ops = dict(
        sx=sx,
        sy=sy,
        sz=sz,
        s_plus=sx + 1j * sy,
        s_minus=sx - 1j * sy,
        identity=np.eye(2, dtype=complex),
    )
    for m in ops.values():
        m.setflags(write=False)
    return SpinOperatorSet(**ops)


_OPS = spin_operators()


@dataclass(frozen=True)
class BondHamiltonian:
    matrix: np.ndarray
    parity: Parity


@dataclass(frozen=True)
class TrotterGate:
    matrix: np.ndarray
    tau: float
    parity: Parity


def exchange(delta: float) -> np.ndarray:
    """4x4 matrix of Sx Sx + Sy Sy + delta Sz Sz on a pair of sites."""
    o = _OPS
    return np.real_if_close(
        np.kron(o.sx, o.sx) + np.kron(o.sy, o.sy) + delta * np.kron(o.sz, o.sz)
    ).astype(complex)


def bond_hamiltonian(
    params: ModelParams, parity: Parity, field_share: float = 0.5
) -> BondHamiltonian:
    """Two-site term of H on an odd or even bond.

    ``field_share`` is the fraction of each site's ``-B Sz`` carried by the odd
    bond; the even bond carries the rest, so an odd+even pair always sums to
    the full field once per site.  The default splits it evenly.
    ``field_share=1`` gives the isolated-dimer Hamiltonian on odd bonds.
    """
    if not 0.0 <= field_share <= 1.0:
        raise ValueError("field_share must lie in [0, 1]")
    share = field_share if parity == "odd" else 1.0 - field_share
    zfield = np.kron(_OPS.sz, _OPS.identity) + np.kron(_OPS.identity, _OPS.sz)
    h = params.coupling(parity) * exchange(params.delta) - share * params.b * zfield
    h = 0.5 * (h + h.conj().T)
    h.setflags(write=False)
    return BondHamiltonian(matrix=h, parity=parity)


def dimer_hamiltonian(params: ModelParams) -> BondHamiltonian:
    """Odd bond with the whole field of its two sites (the lam=0 building block)."""
    return bond_hamiltonian(params, "odd", field_share=1.0)


def trotter_gate(h: BondHamiltonian, tau: float) -> TrotterGate:
    """exp(-tau h) through the eigendecomposition of the Hermitian bond term."""
    tau = float(tau)
    if not math.isfinite(tau) or tau < 0:
        raise ValueError(f"tau must be finite and non-negative, got {tau!r}")
    w, v = np.linalg.eigh(h.matrix)
    g = (v * np.exp(-tau * w)) @ v.conj().T
    g.setflags(write=False)
    return TrotterGate(matrix=g, tau=tau, parity=h.parity)
