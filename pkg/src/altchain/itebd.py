"""Imaginary-time ground-state search with the infinite MPS."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import imps
from .errors import GroundStateNonConvergence
from .imps import IMPSState
from .model import ModelParams, bond_hamiltonian, trotter_gate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Schedule:
    """Trotter-step schedule: tau_initial, tau_initial/shrink, ... while tau >= tau_floor.

    Within a stage the energy is re-measured every ``check_every`` steps; the
    stage ends once the change over one such block drops below
    ``energy_tol`` or after ``sweeps_per_tau`` steps.
    """

    tau_initial: float = 0.1
    tau_shrink: float = 10.0
    tau_floor: float = 1e-9
    sweeps_per_tau: int = 5000
    energy_tol: float = 1e-10
    check_every: int = 100
    order: int = 2

    def __post_init__(self):
        if not (self.tau_initial > self.tau_floor > 0):
            raise ValueError("need tau_initial > tau_floor > 0")
        if not self.tau_shrink > 1:
            raise ValueError("tau_shrink must exceed 1")
        if self.sweeps_per_tau < 1 or self.check_every < 1:
            raise ValueError("sweeps_per_tau and check_every must be positive")
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")

    def taus(self):
        tau = self.tau_initial
        while tau >= self.tau_floor * (1 - 1e-12):
            yield tau
            tau /= self.tau_shrink


@dataclass
class GroundStateResult:
    state: IMPSState
    energy_per_site: float
    iterations: int
    max_truncation_error: float
    converged: bool = True
    trace: list = field(default_factory=list)

    def write_trace(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "iteration", "energy", "truncation_error"])
            w.writerows(self.trace)


def energy_per_site(state: IMPSState, params: ModelParams) -> float:
    """(<h_odd> + <h_even>) / 2 for a canonical state."""
    total = 0.0
    for bond in ("odd", "even"):
        rho = imps.rdm(state, bond).matrix
        total += np.trace(rho @ bond_hamiltonian(params, bond).matrix).real
    return float(total / 2)


def _evolve(state, gates, n, chi, order):
    """n Trotter steps; for order 2 the odd gate is split into half steps at both ends."""
    trunc = 0.0
    if order == 1:
        odd, even = gates
        for _ in range(n):
            state, e1 = imps.apply_gate(state, odd, chi, recanonicalize=False)
            state, e2 = imps.apply_gate(state, even, chi, recanonicalize=False)
            trunc = max(trunc, e1, e2)
        return state, trunc
    half, even, odd = gates
    state, e = imps.apply_gate(state, half, chi, recanonicalize=False)
    trunc = e
    for k in range(n):
        state, e1 = imps.apply_gate(state, even, chi, recanonicalize=False)
        last = half if k == n - 1 else odd
        state, e2 = imps.apply_gate(state, last, chi, recanonicalize=False)
        trunc = max(trunc, e1, e2)
    return state, trunc


def _gates(params, tau, order):
    h_odd = bond_hamiltonian(params, "odd")
    h_even = bond_hamiltonian(params, "even")
    if order == 1:
        return trotter_gate(h_odd, tau), trotter_gate(h_even, tau)
    return trotter_gate(h_odd, tau / 2), trotter_gate(h_even, tau), trotter_gate(h_odd, tau)


def ground_state(
    params: ModelParams,
    chi: int,
    schedule: Schedule | None = None,
    seed: int = 0,
    initial: IMPSState | None = None,
    strict: bool = False,
) -> GroundStateResult:
    """Imaginary-time evolution from a random (or given) state down the tau schedule.

    With ``strict=True`` a floor stage that exhausts its step cap raises
    GroundStateNonConvergence carrying the best result; otherwise the result
    comes back with ``converged=False``.
    """
    if chi < 1:
        raise ValueError("chi must be >= 1")
    schedule = schedule or Schedule()
    state = initial if initial is not None else imps.init_random(chi, seed)
    state = imps.canonicalize(state, chi)
    energy = energy_per_site(state, params)
    trace = [(float("nan"), 0, energy, 0.0)]
    iterations = 0
    max_trunc = 0.0
    stage_converged = False
    k = schedule.check_every
    for tau in schedule.taus():
        gates = _gates(params, tau, schedule.order)
        steps = 0
        stage_converged = False
        while steps < schedule.sweeps_per_tau:
            n = min(k, schedule.sweeps_per_tau - steps)
            state, trunc = _evolve(state, gates, n, chi, schedule.order)
            state = imps.canonicalize(state, chi)
            steps += n
            iterations += n
            max_trunc = max(max_trunc, trunc)
            new_energy = energy_per_site(state, params)
            trace.append((tau, iterations, new_energy, trunc))
            change = abs(new_energy - energy)
            energy = new_energy
            if change < schedule.energy_tol:
                stage_converged = True
                break
        log.debug("tau=%g steps=%d E=%.12f", tau, steps, energy)
    result = GroundStateResult(state, energy, iterations, max_trunc, stage_converged, trace)
    if not math.isfinite(energy):
        raise GroundStateNonConvergence("energy is not finite", result)
    if strict and not stage_converged:
        raise GroundStateNonConvergence("floor tau stage hit its step cap", result)
    return result
