"""Command-line driver: ``altchain <subcommand> [options]``.

Every subcommand accepts ``--config`` (key = value file), ``--out`` (``.csv``
or ``.json``; JSON to stdout when omitted), ``--checkpoint``, ``--chi``,
``--seed`` and ``--resolution``.  Failures exit nonzero with a JSON object
``{"error": code, "message": ...}`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, ed, fermions, finite, imps, itebd, sweep
from .config import ConfigError, load_config, schedule_from
from .errors import AltchainError
from .model import ModelParams

log = logging.getLogger("altchain")


class CLIError(Exception):
    def __init__(self, code: str, message: str, status: int = 1):
        super().__init__(message)
        self.code = code
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError("usage", message, status=2)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="output path; .csv or .json")
    p.add_argument("--checkpoint", help="iMPS checkpoint path (binary)")
    p.add_argument("--chi", type=int, help="bond dimension")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--resolution", type=float, help="pinch refinement resolution")
    p.add_argument("--lam", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--b", type=float, help="magnetic field")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="altchain", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ground", help="iTEBD ground state at one point")
    _common(p)
    p.add_argument("--sop-r", type=int, nargs="*", default=None, help="string-order distances (odd)")
    p.add_argument("--trace", help="write the energy trace CSV here")

    p = sub.add_parser("scan", help="line scan with adjacent fidelity and pinch refinement")
    _common(p)
    p.add_argument("--axis", choices=["b", "lam"])
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--surface", action="store_true", default=None,
                   help="also write the full pairwise fidelity matrix d(x_i, x_j)")

    p = sub.add_parser("loop", help="scan along B = (1+delta)/2 + R sin a, lam = R cos a")
    _common(p)
    p.add_argument("--radius", type=float)
    p.add_argument("--samples", type=int, help="number of alpha values in [-pi, pi]")

    p = sub.add_parser("grid", help="(lam, B) grid with per-column pinch detection")
    _common(p)
    p.add_argument("--lam-range", type=float, nargs=2)
    p.add_argument("--b-range", type=float, nargs=2)
    p.add_argument("--steps", type=float, nargs=2, help="lam step and B step")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("xx-exact", help="free-fermion solution at delta = 0")
    _common(p)
    p.add_argument("--n", type=int, help="finite periodic chain length (default: infinite)")

    p = sub.add_parser("ed", help="exact diagonalization of a short chain")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--boundary", choices=["open", "periodic"])

    p = sub.add_parser("entropy-fit", help="open-chain entropy profile and central-charge fit")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--method", choices=["tebd", "dmrg", "tebd+dmrg", "fermion"])
    p.add_argument("--parity", choices=["even", "odd", "all"])
    return parser


def _settings(args) -> dict:
    cfg = load_config(args.config) if args.config else {}
    for key, val in vars(args).items():
        if val is not None and key not in ("config", "command", "verbose"):
            cfg[key] = val
    return cfg


def _params(cfg) -> ModelParams:
    try:
        return ModelParams(float(cfg.get("lam", 1.0)), float(cfg.get("delta", 1.0)), float(cfg.get("b", 0.0)))
    except (TypeError, ValueError) as exc:
        raise CLIError("invalid-parameters", str(exc)) from exc


def _schedule(cfg, base=None):
    try:
        return schedule_from(cfg, base)
    except ValueError as exc:
        raise CLIError("invalid-schedule", str(exc)) from exc


def _metadata(command, cfg, schedule=None) -> dict:
    meta = {
        "command": command,
        "version": __version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "chi": cfg.get("chi"),
        "seed": cfg.get("seed", 0),
    }
    if schedule is not None:
        meta["schedule"] = {k: getattr(schedule, k) for k in (
            "tau_initial", "tau_shrink", "tau_floor", "sweeps_per_tau", "energy_tol", "check_every", "order")}
    meta["settings"] = {k: v for k, v in cfg.items() if k not in ("out", "checkpoint")}
    return meta


def _clean(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_clean(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    return v


def write_output(path, metadata: dict, rows: list, extra: dict | None = None) -> None:
    """CSV (metadata as leading '# key: value' lines) or JSON; stdout JSON if path is None."""
    payload = {"metadata": metadata, "records": rows}
    if extra:
        payload.update(extra)
    payload = _clean(payload)
    if path is None:
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(payload, indent=2) + "\n")
    elif path.suffix == ".csv":
        keys = []
        for r in payload["records"]:
            keys.extend(k for k in r if k not in keys)
        with open(path, "w", newline="") as fh:
            for k, v in payload["metadata"].items():
                fh.write(f"# {k}: {json.dumps(v)}\n")
            for k, v in (extra or {}).items():
                fh.write(f"# {k}: {json.dumps(_clean(v))}\n")
            w = csv.DictWriter(fh, fieldnames=keys)
            w.writeheader()
            w.writerows(payload["records"])
    else:
        raise CLIError("bad-output", f"output must end in .csv or .json, got {path.name}")


def cmd_ground(cfg):
    params = _params(cfg)
    chi = int(cfg.get("chi", 50))
    schedule = _schedule(cfg)
    initial = None
    ckpt = cfg.get("checkpoint")
    if ckpt and Path(ckpt).exists():
        initial = imps.load(ckpt)
    res = itebd.ground_state(params, chi, schedule, seed=int(cfg.get("seed", 0)), initial=initial)
    rec = sweep.ScanRecord(params, float(params.b))
    rec.energy, rec.iterations = res.energy_per_site, res.iterations
    rec.truncation_error, rec.converged = res.max_truncation_error, res.converged
    sop = cfg.get("sop_r") or []
    sweep.measure(rec, res.state, sop if isinstance(sop, list) else [sop])
    if ckpt:
        imps.save(res.state, ckpt)
    if cfg.get("trace"):
        res.write_trace(cfg["trace"])
    write_output(cfg.get("out"), _metadata("ground", cfg, schedule), [rec.as_row()])


def cmd_scan(cfg):
    params = _params(cfg)
    axis = cfg.get("axis", "b")
    step = float(cfg.get("step", 0.02))
    schedule = _schedule(cfg, sweep.SCAN_SCHEDULE)
    line = sweep.scan_line(
        params, axis, (float(cfg.get("start", 0.0)), float(cfg.get("stop", 2.0))), step,
        int(cfg.get("chi", 32)), schedule, int(cfg.get("seed", 0)),
    )
    res = cfg.get("resolution")
    pinches = sweep.refine_pinch(line, float(res)) if res else []
    extra = {"pinch_points": [vars(p) for p in pinches]}
    if cfg.get("surface"):
        extra["fidelity_surface"] = {
            "coordinates": line.coordinates().tolist(),
            "d": sweep.fidelity_surface(line).tolist(),
        }
    write_output(
        cfg.get("out"), _metadata("scan", cfg, schedule), [r.as_row() for r in line.records], extra
    )


def cmd_loop(cfg):
    path = sweep.LoopPath.uniform(float(cfg.get("radius", 0.8)), float(cfg.get("delta", 1.0)),
                                  int(cfg.get("samples", 41)))
    schedule = _schedule(cfg, sweep.SCAN_SCHEDULE)
    records = sweep.loop_scan(path, int(cfg.get("chi", 32)), schedule, int(cfg.get("seed", 0)))
    write_output(cfg.get("out"), _metadata("loop", cfg, schedule), [r.as_row() for r in records])


def cmd_grid(cfg):
    schedule = _schedule(cfg, sweep.SCAN_SCHEDULE)
    res = cfg.get("resolution")
    grid = sweep.grid_scan(
        tuple(cfg.get("lam_range", (-1.5, 1.5))), tuple(cfg.get("b_range", (0.0, 2.0))),
        tuple(cfg.get("steps", (0.1, 0.05))), int(cfg.get("chi", 32)), schedule,
        float(cfg.get("delta", 1.0)), int(cfg.get("seed", 0)), float(res) if res else None,
        int(cfg.get("workers", 1)),
    )
    write_output(
        cfg.get("out"), _metadata("grid", cfg, schedule), [r.as_row() for r in grid.records()],
        {"boundaries": [list(b) for b in grid.boundaries]},
    )


def cmd_xx_exact(cfg):
    lam, b = float(cfg.get("lam", 1.0)), float(cfg.get("b", 0.0))
    n = cfg.get("n")
    row = {"lam": lam, "b": b, "n": n}
    if n is None:
        row["energy"] = fermions.gs_energy_per_site(lam, b)
    else:
        row["energy"] = fermions.periodic_chain_energy(int(n), lam, b)
    lo, hi = fermions.phase_boundaries(lam)
    row.update(boundary_low=lo, boundary_high=hi)
    write_output(cfg.get("out"), _metadata("xx-exact", cfg), [row])


def cmd_ed(cfg):
    params = _params(cfg)
    n = int(cfg.get("n", 8))
    r = ed.ed_ground_state(params, n, cfg.get("boundary", "open"))
    row = {"lam": params.lam, "delta": params.delta, "b": params.b, "n": n, "boundary": r.boundary,
           "energy": r.energy, "energy_per_site": r.energy / n, "degeneracy": r.degeneracy,
           "sz_total": r.magnetization}
    write_output(cfg.get("out"), _metadata("ed", cfg), [row])


def cmd_entropy_fit(cfg):
    params = _params(cfg)
    n = int(cfg.get("n", 96))
    method = cfg.get("method", "dmrg")
    parity = cfg.get("parity", "even")
    if method == "fermion":
        if params.delta != 0:
            raise CLIError("invalid-parameters", "the fermion profile needs delta = 0")
        c = fermions.correlation_matrix(n, params.lam, params.b, "open")
        profile = finite.EntropyProfile(n, fermions.entropy_profile(c), params, "open")
        schedule = None
    else:
        schedule = _schedule(cfg, itebd.Schedule(order=2, tau_floor=1e-4, sweeps_per_tau=2000))
        mps = finite.finite_ground_state(params, n, int(cfg.get("chi", 128)), schedule,
                                         int(cfg.get("seed", 0)), method)
        profile = finite.entropy_profile(mps)
    fit = finite.fit_central_charge(profile, parity)
    rows = [{"L": int(L), "S_L": float(s), "chord_log2": float(x)}
            for L, s, x in zip(profile.lengths(), profile.entropies,
                               finite.chord_log2(n, profile.lengths()))]
    write_output(cfg.get("out"), _metadata("entropy-fit", cfg, schedule), rows,
                 {"fit": {"c": fit.c, "a_const": fit.a_const, "residual": fit.residual,
                          "parity": fit.parity_used, "l_window": list(fit.l_window)}})


COMMANDS = {
    "ground": cmd_ground,
    "scan": cmd_scan,
    "loop": cmd_loop,
    "grid": cmd_grid,
    "xx-exact": cmd_xx_exact,
    "ed": cmd_ed,
    "entropy-fit": cmd_entropy_fit,
}


def _fail(code, message, status=1) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")
    return status


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        COMMANDS[args.command](_settings(args))
    except CLIError as exc:
        return _fail(exc.code, str(exc), exc.status)
    except AltchainError as exc:
        return _fail(exc.code, str(exc))
    except ConfigError as exc:
        return _fail("bad-config", str(exc))
    except (ValueError, TypeError) as exc:
        return _fail("invalid-argument", str(exc))
    except OSError as exc:
        return _fail("io-error", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
