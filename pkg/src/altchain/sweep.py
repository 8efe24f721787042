"""Phase-diagram scans: lines, loop paths and (lambda, B) grids.

Ground states are solved at every point of a line and adjacent-point
fidelities are computed between consecutive states.  Points start from the
same seeded random state by default; warm starting from the previous point is
optional (see :func:`scan_points`).  Fidelity pinch points are the interior
local minima; they are refined by re-solving on successively halved brackets.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from . import imps, itebd, observables
from .errors import AltchainError
from .imps import IMPSState
from .itebd import Schedule
from .model import ModelParams, spin_operators

log = logging.getLogger(__name__)

Axis = Literal["b", "lam"]

HYSTERESIS_TOL = 1e-6
WARM_NOISE = 1e-2
SYMMETRIC_TOL = 1e-6
PINCH_FACTOR = 5.0
PINCH_NOISE = 1e-6

# Moderate default for scans: second-order gates, floor at 1e-3.
SCAN_SCHEDULE = Schedule(
    tau_initial=0.1, tau_floor=1e-3, sweeps_per_tau=1500, energy_tol=1e-9, check_every=100, order=2
)


@dataclass(frozen=True)
class LoopPath:
    """Circle of radius R around (lambda, B) = (0, (1+delta)/2)."""

    radius_r: float
    delta: float
    alpha_samples: tuple

    def __post_init__(self):
        if not self.radius_r > 0:
            raise ValueError("radius must be positive")
        a = np.asarray(self.alpha_samples, dtype=float)
        if a.size == 0 or np.any(np.abs(a) > math.pi + 1e-12) or np.any(np.diff(a) <= 0):
            raise ValueError("alpha samples must be increasing and within [-pi, pi]")

    @classmethod
    def uniform(cls, radius_r: float, delta: float, n: int) -> "LoopPath":
        return cls(radius_r, delta, tuple(np.linspace(-math.pi, math.pi, n)))

    def point(self, alpha: float) -> ModelParams:
        return ModelParams(
            lam=self.radius_r * math.cos(alpha),
            delta=self.delta,
            b=(1 + self.delta) / 2 + self.radius_r * math.sin(alpha),
        )

    def points(self) -> list:
        return [self.point(a) for a in self.alpha_samples]


@dataclass
class ScanRecord:
    params: ModelParams
    coordinate: float
    energy: float | None = None
    entropy_odd: float | None = None
    entropy_even: float | None = None
    concurrence_odd: float | None = None
    concurrence_even: float | None = None
    coherence_odd: float | None = None
    coherence_even: float | None = None
    wysi_a: float | None = None
    wysi_b: float | None = None
    wysi_avg: float | None = None
    magnetization: float | None = None
    sop: dict = field(default_factory=dict)
    fidelity_next: float | None = None
    iterations: int = 0
    truncation_error: float = 0.0
    converged: bool = False
    cold_checked: bool = False
    reason: str | None = None
    state: IMPSState | None = field(default=None, repr=False, compare=False)

    OBSERVABLES = (
        "energy", "entropy_odd", "entropy_even", "concurrence_odd", "concurrence_even",
        "coherence_odd", "coherence_even", "wysi_a", "wysi_b", "wysi_avg", "magnetization",
    )

    def as_row(self) -> dict:
        row = {"lam": self.params.lam, "delta": self.params.delta, "b": self.params.b,
               "coordinate": self.coordinate}
        for name in self.OBSERVABLES:
            row[name] = getattr(self, name)
        for r, v in sorted(self.sop.items()):
            row[f"sop_r{r}"] = v
        row.update(fidelity_next=self.fidelity_next, iterations=self.iterations,
                   truncation_error=self.truncation_error, converged=self.converged,
                   cold_checked=self.cold_checked, reason=self.reason)
        return row


@dataclass(frozen=True)
class PinchPoint:
    location: float
    fidelity_minimum: float
    refinement_width: float
    axis: str = "b"


@dataclass
class LineScan:
    """Records of a line scan plus what is needed to re-solve probe points."""

    base: ModelParams
    axis: str
    records: list
    chi: int
    schedule: Schedule
    seed: int = 0
    warm_start: bool = False

    def coordinates(self) -> np.ndarray:
        return np.array([r.coordinate for r in self.records])

    def fidelities(self) -> np.ndarray:
        return np.array([np.nan if r.fidelity_next is None else r.fidelity_next
                         for r in self.records[:-1]])


def _at(base: ModelParams, axis: str, x: float) -> ModelParams:
    if axis == "b":
        return base.replace(b=float(x))
    if axis == "lam":
        return base.replace(lam=float(x))
    raise ValueError(f"axis must be 'b' or 'lam', got {axis!r}")


def transverse_order(state: IMPSState) -> float:
    """max |<S^x>|, |<S^y>| over the two sites; zero for a U(1)-symmetric state."""
    ops = spin_operators()
    vals = [
        abs(np.trace(imps.rdm(state, site).matrix @ op))
        for site in ("A", "B")
        for op in (ops.sx, ops.sy)
    ]
    return float(max(vals))


def measure(record: ScanRecord, state: IMPSState, sop_r: Sequence[int] = ()) -> None:
    """Fill the observable fields of ``record`` from a canonical state."""
    rho_odd = imps.rdm(state, "odd")
    rho_even = imps.rdm(state, "even")
    record.entropy_odd = observables.entropy(rho_odd)
    record.entropy_even = observables.entropy(rho_even)
    record.concurrence_odd = observables.concurrence(rho_odd)
    record.concurrence_even = observables.concurrence(rho_even)
    record.coherence_odd = observables.l1_coherence(rho_odd)
    record.coherence_even = observables.l1_coherence(rho_even)
    record.wysi_a = observables.site_wysi(state, "A")
    record.wysi_b = observables.site_wysi(state, "B")
    record.wysi_avg = 0.5 * (record.wysi_a + record.wysi_b)
    sz = spin_operators().sz
    record.magnetization = float(
        0.5 * sum(np.trace(imps.rdm(state, s).matrix @ sz).real for s in ("A", "B"))
    )
    for r in sop_r:
        record.sop[int(r)] = observables.string_order(state, int(r))


def solve_point(
    params: ModelParams,
    chi: int,
    schedule: Schedule,
    seed: int = 0,
    initial: IMPSState | None = None,
    coordinate: float = float("nan"),
) -> ScanRecord:
    rec = ScanRecord(params, coordinate)
    try:
        res = itebd.ground_state(params, chi, schedule, seed=seed, initial=initial)
    except AltchainError as exc:
        rec.reason = exc.code
        return rec
    rec.energy = res.energy_per_site
    rec.iterations = res.iterations
    rec.truncation_error = res.max_truncation_error
    rec.converged = res.converged
    rec.state = res.state
    return rec


def _fidelity(r1: ScanRecord, r2: ScanRecord) -> float | None:
    if r1.state is None or r2.state is None:
        return None
    try:
        return observables.fidelity_per_site(r1.state, r2.state)
    except AltchainError as exc:
        log.warning("fidelity failed between %s and %s: %s", r1.params, r2.params, exc)
        return None


def fidelity_surface(scan: LineScan) -> np.ndarray:
    """Full matrix d(x_i, x_j) over all pairs of scan points.

    The adjacent-pair band (first off-diagonal) is what pinch detection uses;
    the full surface is O(n^2) transfer eigensolves and is meant for plots.
    Entries for failed points are NaN.
    """
    n = len(scan.records)
    surface = np.full((n, n), np.nan)
    for i, r1 in enumerate(scan.records):
        if r1.state is not None:
            surface[i, i] = 1.0
        for j in range(i + 1, n):
            d = _fidelity(r1, scan.records[j])
            if d is not None:
                surface[i, j] = surface[j, i] = d
    return surface


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    if not (math.isfinite(start) and math.isfinite(stop)) or not step > 0:
        raise ValueError("need a finite range and a positive step")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(max(n, 1))


def scan_points(
    points: Sequence[ModelParams],
    coordinates: Sequence[float],
    chi: int,
    schedule: Schedule | None = None,
    seed: int = 0,
    cold_check_every: int = 10,
    sop_r: Sequence[int] = (),
    with_observables: bool = True,
    warm_noise: float = WARM_NOISE,
    warm_start: bool = False,
) -> list:
    """Ground states along an ordered list of parameter points.

    By default every point starts from the same seeded random state, which
    makes the result a deterministic, smooth function of the parameters.
    With ``warm_start=True`` each point starts from the previous state and
    every ``cold_check_every``-th point is re-solved cold as a hysteresis
    guard; the lower energy wins.  The gates conserve total S^z, so a warm start with sharp magnetization
    (no transverse order, as in the dimer and polarized phases) could never
    relax into a magnetized phase.  Such states are perturbed by relative
    noise ``warm_noise``; states that already carry transverse order are
    passed on untouched so the scan stays continuous.
    """
    schedule = schedule or SCAN_SCHEDULE
    records = []
    prev = None
    for k, (p, x) in enumerate(zip(points, coordinates)):
        init = prev if warm_start else None
        if init is not None and warm_noise > 0 and transverse_order(prev) < SYMMETRIC_TOL:
            init = imps.perturb(init, warm_noise, seed + 7919 * (k + 1))
        rec = solve_point(p, chi, schedule, seed, init, float(x))
        if init is not None and cold_check_every and k % cold_check_every == 0:
            cold = solve_point(p, chi, schedule, seed + k, None, float(x))
            rec.cold_checked = True
            if cold.energy is not None and (
                rec.energy is None or cold.energy < rec.energy - HYSTERESIS_TOL
            ):
                log.warning("warm start trapped at %s: %.10f vs cold %.10f", p, rec.energy, cold.energy)
                cold.cold_checked = True
                cold.reason = "warm-start-hysteresis"
                rec = cold
        if rec.state is not None:
            prev = rec.state
            if with_observables:
                measure(rec, rec.state, sop_r)
        if records:
            records[-1].fidelity_next = _fidelity(records[-1], rec)
        records.append(rec)
        log.info("point %s E=%s", x, rec.energy)
    return records


def scan_line(
    params_base: ModelParams,
    axis: Axis,
    range_: tuple,
    step: float,
    chi: int,
    schedule: Schedule | None = None,
    seed: int = 0,
    cold_check_every: int = 10,
    sop_r: Sequence[int] = (),
    with_observables: bool = True,
    warm_noise: float = WARM_NOISE,
    warm_start: bool = False,
) -> LineScan:
    xs = _grid(range_[0], range_[1], step)
    points = [_at(params_base, axis, x) for x in xs]
    schedule = schedule or SCAN_SCHEDULE
    records = scan_points(
        points, xs, chi, schedule, seed, cold_check_every, sop_r, with_observables, warm_noise,
        warm_start,
    )
    return LineScan(params_base, axis, records, chi, schedule, seed, warm_start)


def loop_scan(
    path: LoopPath,
    chi: int,
    schedule: Schedule | None = None,
    seed: int = 0,
    cold_check_every: int = 10,
    sop_r: Sequence[int] = (),
) -> list:
    return scan_points(path.points(), path.alpha_samples, chi, schedule, seed, cold_check_every, sop_r)


def pinch_candidates(fid: np.ndarray) -> list:
    """Indices k of adjacent-pair fidelities that are interior local minima and
    fall below 1 - 5 * (median local variation).

    Failed pairs (NaN) are skipped: a minimum is compared with its nearest valid
    neighbours.  The variation is floored at ``PINCH_NOISE`` so that round-off
    wiggles inside a phase where d = 1 to machine precision are not reported.
    """
    f = np.asarray(fid, dtype=float)
    idx = np.flatnonzero(np.isfinite(f))
    if idx.size < 3:
        return []
    vals = f[idx]
    variation = max(PINCH_FACTOR * float(np.median(np.abs(np.diff(vals)))), PINCH_NOISE)
    out = []
    for j in range(1, idx.size - 1):
        if vals[j] < vals[j - 1] and vals[j] <= vals[j + 1] and vals[j] < 1 - variation:
            out.append(int(idx[j]))
    return out


def refine_pinch(
    scan: LineScan,
    resolution: float,
    solver: Callable | None = None,
) -> list:
    """Refine each candidate minimum by halving the bracket around the minimal pair.

    At each level the interval [m - h, m + h] around the current minimal pair
    midpoint m is re-solved on a grid of spacing h/2 (started the same way as
    the scan) and the minimal adjacent pair is located again.
    """
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    xs = scan.coordinates()
    fid = scan.fidelities()
    cache = {round(float(r.coordinate), 12): r for r in scan.records if r.state is not None}

    def solve(x):
        key = round(float(x), 12)
        if key in cache:
            return cache[key]
        init = None
        if scan.warm_start and cache:
            near = min(cache.values(), key=lambda r: abs(r.coordinate - x))
            init = imps.perturb(near.state, WARM_NOISE, scan.seed)
        if solver is not None:
            rec = solver(_at(scan.base, scan.axis, x), init)
            rec.coordinate = float(x)
        else:
            rec = solve_point(_at(scan.base, scan.axis, x), scan.chi, scan.schedule, scan.seed, init, float(x))
        if rec.state is not None:
            cache[key] = rec
        return rec

    pinches = []
    for k in pinch_candidates(fid):
        h = float(xs[k + 1] - xs[k])
        m = 0.5 * (xs[k] + xs[k + 1])
        fmin = float(fid[k])
        lo_lim, hi_lim = float(xs[0]), float(xs[-1])
        while h > resolution * (1 + 1e-9):
            h /= 2
            grid = m + h * np.arange(-2, 3)
            grid = grid[(grid >= lo_lim - 1e-12) & (grid <= hi_lim + 1e-12)]
            recs = [solve(x) for x in grid]
            vals = [
                _fidelity(a, b) if a.state is not None and b.state is not None else None
                for a, b in zip(recs[:-1], recs[1:])
            ]
            good = [(v, j) for j, v in enumerate(vals) if v is not None]
            if not good:
                break
            fmin, j = min(good)
            m = 0.5 * (grid[j] + grid[j + 1])
        # grid spacings carry float noise (e.g. 0.04 + 1e-17); report it rounded
        pinches.append(PinchPoint(float(m), float(fmin), round(float(h), 12), scan.axis))
    return pinches


@dataclass
class GridResult:
    lambdas: np.ndarray
    bs: np.ndarray
    columns: list  # one list of ScanRecord per lambda
    boundaries: list  # (lambda, B) points

    def records(self) -> list:
        return [r for col in self.columns for r in col]


def _column(args):
    lam, delta, b_range, b_step, chi, schedule, seed, resolution = args
    scan = scan_line(ModelParams(lam, delta, b_range[0]), "b", b_range, b_step, chi, schedule, seed,
                     cold_check_every=0)
    pinches = refine_pinch(scan, resolution) if resolution else [
        PinchPoint(float(0.5 * (scan.coordinates()[k] + scan.coordinates()[k + 1])),
                   float(scan.fidelities()[k]), float(b_step))
        for k in pinch_candidates(scan.fidelities())
    ]
    for r in scan.records:
        r.state = None  # keep worker results small
    return scan.records, [(lam, p.location) for p in pinches]


def grid_scan(
    lambda_range: tuple,
    b_range: tuple,
    steps: tuple,
    chi: int,
    schedule: Schedule | None = None,
    delta: float = 1.0,
    seed: int = 0,
    resolution: float | None = None,
    workers: int = 1,
) -> GridResult:
    """Columns of fixed lambda scanned in B; warm starts run within a column and
    columns go to a bounded process pool.  Results are merged in lambda order."""
    lams = _grid(lambda_range[0], lambda_range[1], steps[0])
    bs = _grid(b_range[0], b_range[1], steps[1])
    jobs = [(float(l), delta, b_range, steps[1], chi, schedule or SCAN_SCHEDULE, seed, resolution)
            for l in lams]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_column, jobs))
    else:
        outs = [_column(j) for j in jobs]
    columns = [o[0] for o in outs]
    boundaries = [pt for o in outs for pt in o[1]]
    return GridResult(lams, bs, columns, boundaries)
