"""Command-line front end.

Every output file carries a run manifest (tool version, effective config,
duration, seed). Output goes to ``--output``, else to
``$CPCSIM_OUTPUT_DIR/<subcommand>.<ext>``, else to stdout. Files are written
to a temporary sibling and renamed into place.

Exit codes: 0 success, 1 runtime/numerical failure, 2 usage error. Failures
print a JSON error object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

from . import __version__, _kernels
from .calibration import ExperimentParams, calibration_report
from .circuit_io import load_circuit_file
from .circuits import run
from .coupling import Coupling, CouplingKind
from .detectors import (
    CascadeSpec,
    DetectorModel,
    dark_click_probability,
    effective_efficiency,
    expected_counts,
    simulate_counts,
)
from .errors import CPCError, InvalidArgument
from .evolution import evolve, population_trace
from .fock import QuantumState, make_fock
from .sources import heralded_source, improved_dc, revival_scan
from .units import parse_angle, parse_pi_units

OUTPUT_DIR_ENV = "CPCSIM_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- helpers ----------------------------------------------------------------------


def _json_dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_text(header, rows, manifest) -> str:
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_occupations(text: str, modes: tuple[str, ...]) -> dict[str, int]:
    text = text.strip()
    if text.isdigit():
        if len(text) > len(modes):
            raise InvalidArgument(f"input {text!r} has more digits than modes {modes}")
        return {m: int(d) for m, d in zip(modes, text.ljust(len(modes), "0"))}
    occ = {}
    for part in text.split(","):
        name, _, value = part.partition("=")
        if not value:
            raise InvalidArgument(f"cannot parse occupation {part!r}; use name=count")
        occ[name.strip()] = int(value)
    return occ


def _parse_complex(text) -> complex:
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise InvalidArgument(f"cannot parse complex number {text!r}") from None


def _alpha(args) -> complex:
    if args.alpha is not None and args.alpha2 is not None:
        raise UsageError("give only one of --alpha or --alpha2")
    if args.alpha is not None:
        return _parse_complex(args.alpha)
    if args.alpha2 is not None:
        if args.alpha2 < 0:
            raise InvalidArgument("--alpha2 must be nonnegative")
        return complex(math.sqrt(args.alpha2))
    return None


def _finite(x: float):
    return x if math.isfinite(x) else None


# -- subcommands ------------------------------------------------------------------


def cmd_evolve(args):
    modes = tuple(m.strip() for m in args.modes.split(","))
    kind = CouplingKind(args.coupling)
    default_roles = {"nondegenerate": ("a", "b", "c"), "degenerate": ("a", "b"), "converter": ("a", "c")}
    roles = tuple(m.strip() for m in args.coupling_modes.split(",")) if args.coupling_modes else default_roles[kind.value]
    phase = complex(math.cos(parse_angle(args.phase)), math.sin(parse_angle(args.phase)))
    coupling = Coupling(kind, roles, phase)
    state = make_fock(_parse_occupations(args.input, modes), modes)
    theta = parse_angle(args.theta)
    res = evolve(state, coupling, theta)
    probs = [
        {"occupations": res.state.occupation_dict(k), "probability": abs(res.state.amplitude(k)) ** 2}
        for k in res.state.basis()
    ]
    return "json", {
        "theta": theta,
        "theta_over_pi": theta / math.pi,
        "coupling": coupling.to_dict(),
        "subspace_dims": list(res.subspace_dims),
        "state": res.state.to_dict(),
        "probabilities": probs,
    }


def cmd_revival_scan(args):
    theta_max = parse_pi_units(args.theta_max)
    step = parse_pi_units(args.step)
    peaks = revival_scan(args.n, theta_max, step, args.floor)
    if args.trace_output:
        samples = int(round(theta_max / step)) + 1
        thetas, probs = population_trace(args.n, theta_max * math.pi, samples)
        rows = [(t / math.pi, p) for t, p in zip(thetas, probs)]
        write_atomic(Path(args.trace_output), _csv_text(["theta_over_pi", "transmission"], rows, args._manifest))
    if args.format == "csv":
        return "csv", (["theta_over_pi", "transmission"], [(p.theta_over_pi, p.transmission) for p in peaks])
    return "json", {"n": args.n, "peaks": [{"theta_over_pi": p.theta_over_pi, "transmission": p.transmission} for p in peaks]}


def cmd_heralded_source(args):
    alpha = _alpha(args)
    if alpha is None:
        alpha = complex(math.sqrt(1.5))
    report = heralded_source(alpha, args.steps, parse_angle(args.theta), not args.no_doubler)
    if args.format == "csv":
        nmax = max((max(d) for d in report.step_distributions if d), default=0)
        header = ["step"] + [f"P{n}" for n in range(nmax + 1)]
        rows = [[i + 1] + [d.get(n, 0.0) for n in range(nmax + 1)] for i, d in enumerate(report.step_distributions)]
        return "csv", (header, rows)
    return "json", report.to_dict()


def cmd_improved_dc(args):
    alpha = _alpha(args)
    mixture = None
    if args.mixture is not None:
        if alpha is not None:
            raise UsageError("give either --mixture or a coherent amplitude, not both")
        try:
            mixture = {int(k): float(v) for k, v in json.loads(args.mixture).items()}
        except (json.JSONDecodeError, AttributeError, ValueError) as exc:
            raise UsageError(f"--mixture must be a JSON object {{n: probability}} ({exc})") from None
    elif alpha is None:
        raise UsageError("improved-dc needs --alpha, --alpha2 or --mixture")
    report = improved_dc(args.m, alpha=alpha, mixture=mixture)
    return "json", report.to_dict()


def cmd_detector_cascade(args):
    spec = CascadeSpec(args.depth, args.k, args.eta_dbl, args.residual)
    model = DetectorModel(args.eta, args.dark)
    out = {
        "n": spec.n,
        "effective_efficiency": effective_efficiency(spec, model),
        "dark_click_probability": dark_click_probability(spec, model),
    }
    if args.trials > 0:
        counts = simulate_counts(spec, model, args.trials, args.photon_prob, args.seed, workers=args.workers)
        out["monte_carlo"] = counts.to_dict()
        exp = expected_counts(spec, model, args.trials, args.photon_prob)
        out["expected"] = {k: _finite(v) for k, v in exp.items()}
        args._manifest["seed"] = counts.seed
    if args.sweep_csv:
        rows = []
        for k in range(1, spec.n + 1):
            s = CascadeSpec(spec.depth, k, spec.eta_dbl, spec.detect_residual)
            exp = expected_counts(s, model, max(args.trials, 1), args.photon_prob)
            rows.append((k, effective_efficiency(s, model), dark_click_probability(s, model), exp["signal_mean"], exp["noise_mean"]))
        write_atomic(
            Path(args.sweep_csv),
            _csv_text(["k", "effective_efficiency", "dark_click_probability", "signal_mean", "noise_mean"], rows, args._manifest),
        )
    return "json", out


def cmd_calibrate(args):
    params = ExperimentParams.from_json_file(args.params)
    return "json", calibration_report(params, args.power)


def cmd_circuit_run(args):
    circuit = load_circuit_file(args.circuit)
    if args.input_state:
        state = QuantumState.from_json(Path(args.input_state).read_text())
    else:
        occ = _parse_occupations(args.input, circuit.modes) if args.input else {}
        unknown = set(occ) - set(circuit.modes)
        if unknown:
            raise InvalidArgument(f"input refers to undeclared modes {sorted(unknown)}")
        state = make_fock(occ, circuit.modes)
    result = run(circuit, state)
    return "json", {
        "success_probability": result.success_probability,
        "failed": result.failed,
        "cpc_stage_count": circuit.cpc_stage_count(),
        "event_log": list(result.event_log),
        "final_state": result.final_state.to_dict() if result.final_state is not None else None,
    }


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpcsim", description="Coherent photon conversion simulator")
    parser.add_argument("--version", action="version", version=f"cpcsim {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--output", "-o", help="output file (default: $CPCSIM_OUTPUT_DIR or stdout)")
        p.add_argument("--config", help="JSON file of flag values; explicit flags override it")
        return p

    p = add("evolve", cmd_evolve, "evolve a Fock state under one CPC coupling")
    p.add_argument("--input", required=True, help="occupations, e.g. 100 or a=1,b=0,c=0")
    p.add_argument("--theta", required=True, help="angle: radians, or e.g. 0.5pi")
    p.add_argument("--modes", default="a,b,c")
    p.add_argument("--coupling", choices=[k.value for k in CouplingKind], default="nondegenerate")
    p.add_argument("--coupling-modes", help="comma-separated role modes (default: a,b,c / a,b / a,c by coupling type)")
    p.add_argument("--phase", default="0", help="phase of the coupling strength")

    p = add("revival-scan", cmd_revival_scan, "locate revival peaks of |n00>")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta-max", required=True, help="scan range in units of pi (2 or 2pi both mean 2 pi)")
    p.add_argument("--step", default="1e-3", help="coarse grid step in units of pi")
    p.add_argument("--floor", type=float, default=0.9, help="minimum transmission")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--trace-output", help="also write the coarse trace CSV here")

    p = add("heralded-source", cmd_heralded_source, "filtered heralded single-photon source")
    p.add_argument("--alpha", help="complex coherent amplitude, e.g. 1.2+0.1j")
    p.add_argument("--alpha2", type=float, help="mean photon number |alpha|^2 (default 1.5)")
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--theta", default="pi", help="interaction per filter step")
    p.add_argument("--no-doubler", action="store_true")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = add("improved-dc", cmd_improved_dc, "full-revival down-conversion vs thermal SPDC")
    p.add_argument("--m", type=int, default=1, help="number of |200> periods")
    p.add_argument("--alpha")
    p.add_argument("--alpha2", type=float)
    p.add_argument("--mixture", help='JSON {"n": probability} Fock mixture input')

    p = add("detector-cascade", cmd_detector_cascade, "cascade detector analytics and Monte Carlo")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--dark", type=float, default=0.0)
    p.add_argument("--eta-dbl", type=float, default=1.0)
    p.add_argument("--residual", action="store_true")
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--photon-prob", type=float, default=1e-2)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--sweep-csv", help="write a per-k sweep CSV here")

    p = add("calibrate", cmd_calibrate, "interaction strength from measured pair rates")
    p.add_argument("--params", required=True, help="ExperimentParams JSON file")
    p.add_argument("--power", type=float, default=1000.0, help="pump power in mW")

    p = add("circuit-run", cmd_circuit_run, "run a circuit description file")
    p.add_argument("--circuit", required=True)
    p.add_argument("--input", help="input occupations, e.g. a=1")
    p.add_argument("--input-state", help="input state JSON file")
    return parser


def _config_path(argv) -> str | None:
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def _apply_config(parser, command: str, path: str) -> None:
    """Install config-file values as subparser defaults before parsing, so they satisfy required flags."""
    sub = parser._subparsers._group_actions[0].choices.get(command)
    if sub is None:
        return
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    dests = {a.dest for a in sub._actions} - {"help", "config", "func"}
    norm = {k.replace("-", "_"): v for k, v in doc.items()}
    unknown = set(norm) - dests
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    for action in sub._actions:
        if action.dest in norm:
            action.required = False
    sub.set_defaults(**norm)


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message, "exit_code": code}}) + "\n")
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        config_path = _config_path(argv)
        command = next((a for a in argv if not a.startswith("-")), None)
        if config_path and command:
            _apply_config(parser, command, config_path)
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
    except UsageError as exc:
        return _error("usage", str(exc), 2)

    config = {k: v for k, v in vars(args).items() if k not in ("func", "output", "config")}
    manifest = {"tool": "cpcsim", "version": __version__, "backend": _kernels.BACKEND, "config": config, "seed": getattr(args, "seed", None)}
    args._manifest = manifest
    start = time.perf_counter()
    try:
        kind, payload = args.func(args)
    except UsageError as exc:
        return _error("usage", str(exc), 2)
    except (CPCError, ValueError, ArithmeticError, OSError) as exc:
        return _error(type(exc).__name__, str(exc), 1)
    manifest["duration_s"] = time.perf_counter() - start

    if kind == "csv":
        header, rows = payload
        text, ext = _csv_text(header, rows, manifest), "csv"
    else:
        text, ext = _json_dumps({"manifest": manifest, "result": payload}), "json"

    target = args.output
    if target is None and os.environ.get(OUTPUT_DIR_ENV):
        target = Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.command}.{ext}"
    try:
        if target is None:
            sys.stdout.write(text)
        else:
            write_atomic(Path(target), text)
    except OSError as exc:
        return _error(type(exc).__name__, str(exc), 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
