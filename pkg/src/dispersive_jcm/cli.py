"""
``jcm`` command-line front end.

    jcm validate     --config run.json [--out report.json]
    jcm theta-sweep  --config run.json [--out sweep.csv]
    jcm evolve       --config run.json [--out evolve.csv] [--backends full,eff,closed]
    jcm sw-residual  --config run.json [--out residual.csv]

Data files are CSV with a JSON sidecar ``<out>.json`` for scalar metrics.
Exit codes: 0 success, 1 error, 2 validation warning.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config
from .dynamics import compare_full_vs_effective, time_grid
from .effective import branch_params, theta_sweep
from .errors import JCMError
from .model import derive, dispersive_check
from .schrieffer_wolff import RESIDUAL_SCALES, calibrate_sign, loglog_slope, residual_scaling

EXIT_OK, EXIT_ERROR, EXIT_WARN = 0, 1, 2

BACKEND_FLAGS = {"full": "full", "eff": "effective_numeric", "closed": "closed_form"}
BACKEND_COLUMNS = {"full": "full", "effective_numeric": "eff", "closed_form": "closed"}

ROUNDOFF = 1e-12


class UsageError(JCMError):
    pass


def fmt(x) -> str:
    """Shortest round-trip decimal for floats, plain digits for ints."""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def sidecar_path(out: Path) -> Path:
    return out.with_name(out.name + ".json")


def _emit(out, csv: str, sidecar: dict | None) -> None:
    if out is None:
        sys.stdout.write(csv)
        if sidecar is not None:
            sys.stderr.write(json_text(sidecar))
        return
    out = Path(out)
    _atomic_write(out, csv)
    if sidecar is not None:
        _atomic_write(sidecar_path(out), json_text(sidecar))


def _branch_dict(bp) -> dict:
    return {
        "theta": bp.theta,
        "omega_A": bp.omega_A,
        "omega_B": bp.omega_B,
        "tau_eff": bp.tau_eff,
        "omega_a_tilde_minus_omega_b_tilde": bp.detuning,
    }


def _mean_photons(cfg: RunConfig):
    st = cfg.initial_state
    if st is None:
        return 0.0, 0.0
    if st.kind == "fock":
        return float(st.n_a), float(st.n_b)
    return abs(st.alpha) ** 2, abs(st.beta) ** 2


def cmd_validate(cfg: RunConfig, out=None) -> int:
    p = cfg.model
    d = derive(p)
    report = dispersive_check(p, *_mean_photons(cfg))
    sign = calibrate_sign(p) if (p.g_a or p.g_b) else 1
    data = {
        "derived": {k: getattr(d, k) for k in d.__dataclass_fields__},
        "branch_plus": _branch_dict(branch_params(p, 1)),
        "branch_minus": _branch_dict(branch_params(p, -1)),
        "sw_sign": sign,
        "dispersive": report.as_dict(),
        "status": "pass" if report.ok else "warn",
    }
    lines = ["derived quantities:"]
    lines += [f"  {k} = {fmt(v)}" for k, v in data["derived"].items()]
    for name in ("branch_plus", "branch_minus"):
        lines.append(f"{name}:")
        lines += [f"  {k} = {fmt(v)}" for k, v in data[name].items()]
    lines.append(f"calibrated generator sign: {sign:+d}")
    for mode in ("a", "b"):
        r = data["dispersive"][f"ratio_{mode}"]
        lines.append(f"dispersive ratio {mode}: {fmt(r)} ({data['dispersive'][f'status_{mode}']})")
    print("\n".join(lines))
    if out is None:
        sys.stdout.write(json_text(data))
    else:
        _atomic_write(Path(out), json_text(data))
    return EXIT_OK if report.ok else EXIT_WARN


def cmd_theta_sweep(cfg: RunConfig, out=None) -> int:
    if cfg.sweep is None:
        raise UsageError("theta-sweep needs a 'sweep' section in the config")
    sw = cfg.sweep
    rows = theta_sweep(cfg.model, sw.parameter, sw.grid())
    header = ["param", "value", "theta_plus", "theta_minus", "omega_A_plus", "omega_B_plus",
              "omega_A_minus", "omega_B_minus", "asymptote_flag"]
    nan = float("nan")
    body = []
    for r in rows:
        if r.resonant:
            vals = [nan] * 6
        else:
            vals = [r.plus.theta, r.minus.theta, r.plus.omega_A, r.plus.omega_B,
                    r.minus.omega_A, r.minus.omega_B]
        body.append([sw.parameter, r.value, *vals, int(r.asymptote)])
    _emit(out, csv_text(header, body), None)
    return EXIT_OK


def cmd_evolve(cfg: RunConfig, out=None, backends=("full", "eff", "closed")) -> int:
    if cfg.initial_state is None or cfg.evolution is None:
        raise UsageError("evolve needs 'initial_state' and 'evolution' sections in the config")
    selected = [BACKEND_FLAGS[b] for b in BACKEND_FLAGS if b in backends]
    times = time_grid(cfg.evolution.t_max, cfg.evolution.points)
    cmp = compare_full_vs_effective(cfg.model, cfg.initial_state, times, backends=selected)
    header = ["t"]
    cols = [times]
    for name in ("full", "effective_numeric", "closed_form"):
        if name in cmp.series:
            tag = BACKEND_COLUMNS[name]
            header += [f"na_{tag}", f"nb_{tag}"]
            cols += [cmp.series[name].na, cmp.series[name].nb]
    rows = [[float(c[i]) for c in cols] for i in range(len(times))]
    sidecar = dict(cmp.metrics())
    sidecar["backends"] = [BACKEND_COLUMNS[b] for b in selected]
    sidecar["uniform_grid"] = True
    _emit(out, csv_text(header, rows), sidecar)
    return EXIT_OK


def cmd_sw_residual(cfg: RunConfig, out=None) -> int:
    points = residual_scaling(cfg.model, RESIDUAL_SCALES)
    header = ["scale", "eps_max", "residual_first_order", "residual_exact_blockdiag"]
    rows = [[pt.scale, pt.eps_max, pt.relative_first_order, pt.relative_exact] for pt in points]
    slope = loglog_slope([pt.eps_max for pt in points], [pt.relative_exact for pt in points])
    sidecar = {
        "slope": slope,
        "slope_defined": math.isfinite(slope),
        "normalization": "exchange residual of the untransformed Hamiltonian",
        "reference_residual": [pt.reference for pt in points],
        "first_order_at_roundoff": all(pt.relative_first_order <= ROUNDOFF for pt in points),
        "sign": calibrate_sign(cfg.model) if (cfg.model.g_a or cfg.model.g_b) else 1,
    }
    _emit(out, csv_text(header, rows), sidecar)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "theta-sweep": cmd_theta_sweep,
    "evolve": cmd_evolve,
    "sw-residual": cmd_sw_residual,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jcm", description="Two-mode dispersive Jaynes-Cummings laboratory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--backends", default="full,eff,closed",
                        help="comma-separated subset of full,eff,closed (evolve only)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = load_config(args.config)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        if args.command == "evolve":
            backends = [b.strip() for b in args.backends.split(",") if b.strip()]
            bad = [b for b in backends if b not in BACKEND_FLAGS]
            if bad or not backends:
                raise UsageError(f"--backends must be a subset of full,eff,closed, got {args.backends!r}")
            return cmd_evolve(cfg, args.out, backends)
        return COMMANDS[args.command](cfg, args.out)
    except JCMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
