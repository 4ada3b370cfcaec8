"""bjjmix command line: simulate, fixed-points, phase-diagram, classify, mode-params.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O error.
Sweep worker count comes from BJJMIX_THREADS (default 1).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import io
from .classify import Ambiguous, classify
from .equilibria import Mode, NoConvergence, SymmetryViolation, numeric_fixed_points, symmetric_fixed_points
from .integrate import PoleApproach, StepFailure, integrate
from .model import DomainError
from .modeparams import (DegenerateModes, GridError, NormalizationError, compute_two_mode_params,
                         quadrature_errors)
from .sweep import run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class CLIError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_overrides(d: dict, args) -> dict:
    d = json.loads(json.dumps(d))
    for item in args.set or []:
        if "=" not in item:
            raise io.ConfigError(f"--set expects section.key=value, got {item!r}")
        path, val = item.split("=", 1)
        keys = path.split(".")
        node = d
        for k in keys[:-1]:
            node = node.setdefault(k, {})
        node[keys[-1]] = _parse_value(val)
    model = d.setdefault("model", {})
    if getattr(args, "Lambda", None) is not None:
        model.update(Lambda_a=args.Lambda, Lambda_b=args.Lambda)
        if args.ratio is not None:
            model["Lambda_ab"] = args.ratio * args.Lambda
    elif getattr(args, "ratio", None) is not None:
        model["Lambda_ab"] = args.ratio * model.get("Lambda_a", 1.0)
    if getattr(args, "t_end", None) is not None:
        d.setdefault("integrator", {})["t_end"] = args.t_end
    if getattr(args, "out", None) is not None:
        d.setdefault("output", {})["dir"] = args.out
    return d


def load_run_config(args) -> io.RunConfig:
    d = {}
    if args.config:
        try:
            d = json.loads(Path(args.config).read_text())
        except OSError as e:
            raise CLIError(f"cannot read {args.config}: {e}", EXIT_IO) from e
        except json.JSONDecodeError as e:
            raise CLIError(f"{args.config}: {e}", EXIT_CONFIG) from e
    try:
        return io.config_from_dict(_apply_overrides(d, args))
    except (io.ConfigError, DomainError) as e:
        raise CLIError(f"invalid configuration: {e}", EXIT_CONFIG) from e


def _outdir(cfg: io.RunConfig) -> Path:
    out = Path(cfg.output.get("dir", "."))
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise CLIError(f"cannot create {out}: {e}", EXIT_IO) from e
    return out


def _label_summary(traj, cfg) -> dict:
    try:
        label, ambiguous, reason = classify(traj, cfg.classifier), False, None
    except Ambiguous as e:
        label, ambiguous, reason = e.label, True, e.reason
    except ValueError as e:
        return {"label": None, "phase_class": None, "trapping": None, "ambiguous": False, "reason": str(e)}
    common = label.phase
    return {
        "label": label.to_dict(),
        "phase_class": common.value if common else "Mixed",
        "trapping": label.trapping.value,
        "ambiguous": ambiguous,
        "reason": reason,
    }


def cmd_simulate(args) -> int:
    cfg = load_run_config(args)
    out = _outdir(cfg)
    prefix = cfg.output.get("prefix", "run")
    try:
        traj = integrate(cfg.model, cfg.initial, cfg.integrator)
    except PoleApproach as e:
        raise CLIError(f"numerical failure: {e}", EXIT_NUMERIC) from e
    except StepFailure as e:
        raise CLIError(f"numerical failure: {e}", EXIT_NUMERIC) from e
    summary = {
        "config": cfg.to_dict(),
        "energy_drift": traj.energy_drift(),
        "samples": len(traj.times),
        **_label_summary(traj, cfg),
    }
    try:
        io.write_trajectory(traj, out / f"{prefix}_trajectory.csv")
        io.dump_json(summary, out / f"{prefix}_summary.json")
    except OSError as e:
        raise CLIError(f"write failed: {e}", EXIT_IO) from e
    print(f"{prefix}: {summary['phase_class']} / {summary['trapping']}  drift {traj.energy_drift():.2e}")
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = load_run_config(args)
    try:
        traj = io.read_trajectory(args.trajectory, cfg.model)
    except OSError as e:
        raise CLIError(f"cannot read {args.trajectory}: {e}", EXIT_IO) from e
    except (io.ConfigError, ValueError) as e:
        raise CLIError(f"bad trajectory file: {e}", EXIT_CONFIG) from e
    summary = _label_summary(traj, cfg)
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as e:
            raise CLIError(f"write failed: {e}", EXIT_IO) from e
    else:
        sys.stdout.write(text)
    return EXIT_OK


def fixed_point_records(p, modes, method: str = "auto") -> list[dict]:
    recs = []
    for mode in modes:
        analytic = method == "analytic" or (method == "auto" and p.is_symmetric)
        try:
            fps = symmetric_fixed_points(p, mode) if analytic else numeric_fixed_points(p, mode)
        except SymmetryViolation as e:
            raise CLIError(str(e), EXIT_CONFIG) from e
        except NoConvergence as e:
            raise CLIError(f"numerical failure: {e}", EXIT_NUMERIC) from e
        recs.extend(fp.to_dict() for fp in fps)
    return recs


def cmd_fixed_points(args) -> int:
    cfg = load_run_config(args)
    modes = {"zero": [Mode.ZERO], "pi": [Mode.PI], "both": [Mode.ZERO, Mode.PI]}[args.mode]
    recs = fixed_point_records(cfg.model, modes, args.method)
    out = _outdir(cfg)
    path = out / f"{cfg.output.get('prefix', 'run')}_fixed_points.json"
    try:
        io.dump_json(recs, path)
    except OSError as e:
        raise CLIError(f"write failed: {e}", EXIT_IO) from e
    print(f"{len(recs)} fixed points -> {path}")
    return EXIT_OK


def write_phase_diagram(cfg: io.RunConfig, results, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("axis1", "axis2", "zero_stable", "pi_stable", "label"))
        for r in results:
            a2 = repr(r.values[1]) if len(r.values) > 1 else ""
            w.writerow((repr(r.values[0]), a2, int(r.zero_stable), int(r.pi_stable), r.label))


def cmd_phase_diagram(args) -> int:
    cfg = load_run_config(args)
    if cfg.sweep is None:
        raise CLIError("phase-diagram needs a 'sweep' section", EXIT_CONFIG)
    if not 1 <= len(cfg.sweep.axes) <= 2:
        raise CLIError("phase-diagram sweeps one or two axes", EXIT_CONFIG)
    try:
        results = run_sweep(cfg, args.workers)
    except (DomainError, ValueError) as e:
        raise CLIError(f"invalid grid node: {e}", EXIT_CONFIG) from e
    out = _outdir(cfg)
    path = out / f"{cfg.output.get('prefix', 'run')}_phase_diagram.csv"
    try:
        write_phase_diagram(cfg, results, path)
        io.dump_json({"axes": [a.name for a in cfg.sweep.axes], "config": cfg.to_dict()},
                     path.with_suffix(".json"))
    except OSError as e:
        raise CLIError(f"write failed: {e}", EXIT_IO) from e
    print(f"{len(results)} nodes -> {path}")
    return EXIT_OK


def cmd_mode_params(args) -> int:
    try:
        modes = io.read_modes(args.modes_file)
    except OSError as e:
        raise CLIError(f"cannot read {args.modes_file}: {e}", EXIT_IO) from e
    except io.ConfigError as e:
        raise CLIError(str(e), EXIT_CONFIG) from e
    try:
        tm = compute_two_mode_params(modes)
        mp = tm.to_model_params(tunneling=args.tunneling)
    except NormalizationError as e:
        raise CLIError(f"normalization failed: {e.name} has norm {e.norm!r}", EXIT_CONFIG) from e
    except (GridError, DegenerateModes, DomainError) as e:
        raise CLIError(str(e), EXIT_CONFIG) from e
    out = Path(args.out or ".")
    prefix = args.prefix
    try:
        out.mkdir(parents=True, exist_ok=True)
        io.dump_json({"two_mode_params": tm.to_dict(), "quadrature_error": quadrature_errors(modes),
                      "overlaps": modes.overlaps()}, out / f"{prefix}_two_mode.json")
        io.dump_json({"model": mp.to_dict()}, out / f"{prefix}_model.json")
    except OSError as e:
        raise CLIError(f"write failed: {e}", EXIT_IO) from e
    print(f"Lambda_a={tm.Lambda_a!r} Lambda_b={tm.Lambda_b!r} Lambda_ab={tm.Lambda_ab!r} "
          f"K_a={tm.K_a!r} K_b={tm.K_b!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bjjmix", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("-c", "--config", help="JSON run configuration")
        p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                       help="override a config field, e.g. model.K_a=2 (repeatable)")
        p.add_argument("--lambda", dest="Lambda", type=float, help="set Lambda_a = Lambda_b")
        p.add_argument("--ratio", type=float, help="set Lambda_ab = ratio * Lambda (2.13 in the standard setup)")
        if out:
            p.add_argument("-o", "--out", help="output directory")

    p = sub.add_parser("simulate", help="integrate one trajectory and label it")
    common(p)
    p.add_argument("--t-end", type=float)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("classify", help="label an existing trajectory CSV")
    common(p, out=False)
    p.add_argument("trajectory")
    p.add_argument("--output", help="write the summary here instead of stdout")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("fixed-points", help="list fixed points with stability")
    common(p)
    p.add_argument("--mode", choices=("zero", "pi", "both"), default="both")
    p.add_argument("--method", choices=("auto", "analytic", "numeric"), default="auto")
    p.set_defaults(func=cmd_fixed_points)

    p = sub.add_parser("phase-diagram", help="stability/regime map over a parameter grid")
    common(p)
    p.add_argument("--workers", type=int, help="override BJJMIX_THREADS")
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("mode-params", help="two-mode constants from a gridded modes file")
    p.add_argument("modes_file")
    p.add_argument("-o", "--out")
    p.add_argument("--prefix", default="modes")
    p.add_argument("--tunneling", choices=("variable", "constant"), default="variable",
                   help="variant written into the model file (default: variable, uses C and D)")
    p.set_defaults(func=cmd_mode_params)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as e:
        print(f"bjjmix {args.command}: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
