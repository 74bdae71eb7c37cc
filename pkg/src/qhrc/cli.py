"""Reproducible experiment runner.

Every experiment resolves its configuration (defaults, then a flat key=value
config file, then CLI flags, flags winning), derives all randomness from the
seed, and emits one CSV per result series plus a run manifest from which the
CSVs can be regenerated byte-identically.  Exit codes: 0 success, 2 config
error, 3 numerical-invariant violation.
"""

from __future__ import annotations

import argparse
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import check_contractivity, check_stability
from .artifacts import (
    config_hash,
    read_manifest,
    write_csv,
    write_manifest,
    write_svg,
    write_table_csv,
)
from .circuit import load_layout, save_layout
from .homogenizer import CouplingSchedule, HomogenizerConfig, run_homogenization
from .reservoir import default_observables, narma_benchmark
from .search import find_partial_swap_layout, verify_layout
from .states import (
    InvalidStateError,
    KET0,
    KET1,
    MINUS,
    MIXED,
    PLUS,
    bloch_state,
    random_density,
)

EXPERIMENTS = ("homogenize", "contractivity", "stability", "figure2",
               "circuit-verify", "qrc-narma")


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to exit code 2)."""


class InvariantViolationError(RuntimeError):
    """A numerical invariant failed during an experiment (maps to exit code 3)."""


# ---------------------------------------------------------------------------
# value parsers
# ---------------------------------------------------------------------------

_ANGLE_RE = re.compile(r"^([+-]?\d*\.?\d*)\s*\*?\s*pi(?:\s*/\s*(\d+\.?\d*))?$")

_NAMED_STATES = {"zero": KET0, "one": KET1, "plus": PLUS, "minus": MINUS, "mixed": MIXED}


def parse_angle(text) -> float:
    """Angle in radians; accepts plain floats and pi-fraction literals like 'pi/4' or '3pi/8'."""
    if isinstance(text, (int, float)):
        return float(text)
    text = text.strip()
    match = _ANGLE_RE.match(text)
    if match:
        coef = match.group(1)
        coef = {"": 1.0, "+": 1.0, "-": -1.0}.get(coef, None) if coef in ("", "+", "-") \
            else float(coef)
        value = coef * np.pi
        if match.group(2):
            value /= float(match.group(2))
        return float(value)
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r} (use radians or 'pi/4'-style)") from None


def state_spec_parse(spec: str) -> np.ndarray:
    """Parse a single-qubit state spec.

    Accepted forms: a named state (zero, one, plus, minus, mixed),
    'bloch:x,y,z' with x^2+y^2+z^2 <= 1, or 'random:SEED'.
    """
    if not isinstance(spec, str) or not spec:
        raise ConfigError("empty state spec")
    if spec in _NAMED_STATES:
        return _NAMED_STATES[spec].copy()
    if spec.startswith("bloch:"):
        body = spec[len("bloch:"):]
        parts = body.split(",")
        if len(parts) != 3:
            raise ConfigError(
                f"state spec {spec!r}: expected three components after position {len('bloch:')}")
        values = []
        offset = len("bloch:")
        for part in parts:
            try:
                values.append(float(part))
            except ValueError:
                raise ConfigError(
                    f"state spec {spec!r}: bad number {part.strip()!r} at position {offset}") from None
            offset += len(part) + 1
        try:
            return bloch_state(*values)
        except ValueError as exc:
            raise ConfigError(f"state spec {spec!r}: {exc}") from None
    if spec.startswith("random:"):
        body = spec[len("random:"):]
        try:
            seed = int(body)
        except ValueError:
            raise ConfigError(
                f"state spec {spec!r}: bad seed {body!r} at position {len('random:')}") from None
        return random_density(2, seed=seed)
    raise ConfigError(
        f"state spec {spec!r}: unknown form at position 0 "
        f"(expected one of {sorted(_NAMED_STATES)}, 'bloch:x,y,z', 'random:SEED')")


def _parse_int(text):
    try:
        return int(text)
    except (TypeError, ValueError):
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _parse_float(text):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {text!r}") from None


def _parse_bool(text):
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_theta_list(value):
    if isinstance(value, (list, tuple)):
        return [parse_angle(v) for v in value]
    return [parse_angle(part) for part in str(value).split(";") if part.strip()]


def _parse_theta_range(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        lo, hi = value
    else:
        parts = str(value).split(",")
        if len(parts) != 2:
            raise ConfigError(f"theta_range needs 'lo,hi', got {value!r}")
        lo, hi = parts
    lo, hi = parse_angle(lo), parse_angle(hi)
    if not 0 <= lo <= hi:
        raise ConfigError(f"theta_range must satisfy 0 <= lo <= hi, got ({lo}, {hi})")
    return [lo, hi]


def _parse_n_values(value):
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    text = str(value).strip()
    span = re.match(r"^(\d+)-(\d+)$", text)
    if span:
        lo, hi = int(span.group(1)), int(span.group(2))
        if lo < 1 or hi < lo:
            raise ConfigError(f"bad n_values range {text!r}")
        return list(range(lo, hi + 1))
    try:
        values = [int(part) for part in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad n_values {text!r} (use '1-8' or '1,2,4')") from None
    if any(v < 1 for v in values):
        raise ConfigError("n_values must be positive")
    return values


def _parse_observables(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return list(value)
    return [part.strip() for part in str(value).split(",") if part.strip()]


def _identity(value):
    return value


def _choice(options):
    def parse(value):
        if value not in options:
            raise ConfigError(f"expected one of {options}, got {value!r}")
        return value
    return parse


def _positive_int(text):
    value = _parse_int(text)
    if value < 1:
        raise ConfigError(f"expected a positive integer, got {value}")
    return value


def _state_string(value):
    state_spec_parse(str(value))  # validate eagerly, keep the string for the manifest
    return str(value)


def _parse_order(value):
    order = _parse_int(value)
    if order not in (2, 10):
        raise ConfigError(f"order must be 2 or 10, got {value!r}")
    return order


# per-experiment parameter schemas: name -> (coercer, default)
SCHEMAS = {
    "homogenize": {
        "n": (_positive_int, 10),
        "theta": (parse_angle, float(np.pi / 4)),
        "theta_range": (_parse_theta_range, None),
        "seed": (_parse_int, 1),
        "xi": (_state_string, "plus"),
        "rho0": (_state_string, "zero"),
        "mode": (_choice(("mean-field", "exact-joint")), "mean-field"),
    },
    "contractivity": {
        "n": (_positive_int, 30),
        "theta": (parse_angle, float(np.pi / 4)),
        "theta_range": (_parse_theta_range, None),
        "seed": (_parse_int, 1),
        "xi": (_state_string, "plus"),
        "rho0": (_state_string, "zero"),
        "mode": (_choice(("mean-field", "exact-joint")), "mean-field"),
    },
    "stability": {
        "n": (_positive_int, 30),
        "theta": (parse_angle, float(np.pi / 4)),
        "theta_range": (_parse_theta_range, None),
        "seed": (_parse_int, 1),
        "xi": (_state_string, "plus"),
        "rho_a": (_state_string, "zero"),
        "rho_b": (_state_string, "one"),
        "epsilon": (_parse_float, 1e-3),
        "mode": (_choice(("mean-field", "exact-joint")), "mean-field"),
    },
    "figure2": {
        "n": (_positive_int, 5),
        "theta": (_parse_theta_list, [float(np.pi / 4), float(np.pi / 6)]),
        "seed": (_parse_int, 1),
        "xi": (_state_string, "plus"),
        "rho0": (_state_string, "zero"),
        "mode": (_choice(("mean-field", "exact-joint")), "mean-field"),
    },
    "circuit-verify": {
        "n_values": (_parse_n_values, list(range(1, 9))),
        "layout": (_identity, None),
        "search": (_parse_bool, False),
        "rz_variant": (_choice(("printed", "corrected")), "printed"),
        "seed": (_parse_int, 1),
    },
    "qrc-narma": {
        "order": (_parse_order, 2),
        "n": (_positive_int, 6),
        "steps": (_positive_int, 1200),
        "seed": (_parse_int, 3),
        "ridge_lambda": (_parse_float, 1e-6),
        "observables": (_parse_observables, None),
        "washout": (_parse_int, 50),
        "reuse_reservoir": (_parse_bool, True),
        "train_fraction": (_parse_float, 0.7),
    },
}


@dataclass
class ExperimentConfig:
    """A fully resolved experiment: name, validated parameters, output directory."""

    experiment: str
    parameters: dict
    output_dir: Path

    @classmethod
    def resolve(cls, experiment: str, raw: dict, output_dir) -> "ExperimentConfig":
        if experiment not in SCHEMAS:
            raise ConfigError(f"unknown experiment {experiment!r} (choose from {EXPERIMENTS})")
        schema = SCHEMAS[experiment]
        unknown = set(raw) - set(schema)
        if unknown:
            raise ConfigError(f"unknown parameter(s) for {experiment}: {sorted(unknown)}")
        parameters = {}
        for key, (coerce, default) in schema.items():
            if key in raw and raw[key] is not None:
                try:
                    parameters[key] = coerce(raw[key])
                except ConfigError as exc:
                    raise ConfigError(f"parameter {key!r}: {exc}") from None
            else:
                parameters[key] = default
        return cls(experiment=experiment, parameters=parameters,
                   output_dir=Path(output_dir))

    @classmethod
    def from_manifest(cls, manifest_path, output_dir) -> "ExperimentConfig":
        doc = read_manifest(manifest_path)
        return cls.resolve(doc["experiment"], doc["parameters"], output_dir)


def read_config_file(path) -> dict:
    """Flat key=value config file; '#' starts a comment; errors cite the line."""
    raw = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, _, value = stripped.partition("=")
        key = key.strip().replace("-", "_")
        if not key:
            raise ConfigError(f"{path}:{lineno}: missing key")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value.strip()
    return raw


# ---------------------------------------------------------------------------
# experiment implementations
# ---------------------------------------------------------------------------

def _schedule_from(params, seed) -> CouplingSchedule:
    if params.get("theta_range") is not None:
        lo, hi = params["theta_range"]
        return CouplingSchedule.uniform(lo, hi, seed=seed)
    return CouplingSchedule.fixed(params["theta"])


def _meta(config: ExperimentConfig, **extra) -> dict:
    meta = {
        "code_version": __version__,
        "seed": config.parameters.get("seed", 0),
        "config_sha256": config_hash(config.experiment, config.parameters),
    }
    meta.update(extra)
    return meta


def _trajectory_rows(trajectory):
    rows = []
    for k in range(len(trajectory)):
        theta = None if k == 0 else float(trajectory.thetas[k])
        rows.append((k, theta, float(trajectory.fidelities[k]),
                     float(trajectory.distances[k])))
    return rows


def _run_homogenize(config, out, plot):
    p = config.parameters
    hconfig = HomogenizerConfig(n_reservoir=p["n"], xi=state_spec_parse(p["xi"]),
                                schedule=_schedule_from(p, p["seed"]), mode=p["mode"])
    trajectory = run_homogenization(state_spec_parse(p["rho0"]), hconfig)
    files = [write_csv(out / "homogenize.csv", "fidelity_curve",
                       _trajectory_rows(trajectory), meta=_meta(config))]
    if plot:
        steps = np.arange(len(trajectory))
        files.append(write_svg(out / "homogenize.svg", "homogenization trajectory",
                               steps, {"fidelity": trajectory.fidelities,
                                       "l2_distance": trajectory.distances}))
    return files


def _run_contractivity(config, out, plot):
    p = config.parameters
    hconfig = HomogenizerConfig(n_reservoir=p["n"], xi=state_spec_parse(p["xi"]),
                                schedule=_schedule_from(p, p["seed"]), mode=p["mode"])
    report = check_contractivity(state_spec_parse(p["rho0"]), hconfig)
    rows = [(k, float(d)) for k, d in enumerate(report.d_sequence)]
    files = [write_csv(out / "contractivity.csv", "contractivity", rows,
                       meta=_meta(config, max_violation=float(report.max_violation)))]
    if plot:
        files.append(write_svg(out / "contractivity.svg", "distance to canonical state",
                               np.arange(len(report.d_sequence)),
                               {"d_k": report.d_sequence}))
    if not report.monotone:
        raise InvariantViolationError(
            f"contraction violated: max increase {report.max_violation:.3e} "
            f"(see {files[0]})")
    return files


def _run_stability(config, out, plot):
    p = config.parameters
    hconfig = HomogenizerConfig(n_reservoir=p["n"], xi=state_spec_parse(p["xi"]),
                                schedule=_schedule_from(p, p["seed"]), mode=p["mode"])
    report = check_stability(state_spec_parse(p["rho_a"]), state_spec_parse(p["rho_b"]),
                             hconfig, epsilon=p["epsilon"])
    rows = [(k, float(d)) for k, d in enumerate(report.pairwise_distance)]
    washout = report.washout_step if report.washout_step is not None else "not-reached"
    files = [write_csv(out / "stability.csv", "stability", rows,
                       meta=_meta(config, epsilon=p["epsilon"], washout_step=washout))]
    if plot:
        files.append(write_svg(out / "stability.svg", "pairwise trajectory distance",
                               np.arange(len(report.pairwise_distance)),
                               {"pairwise_distance": report.pairwise_distance}))
    if np.any(np.diff(report.pairwise_distance) > 1e-12):
        raise InvariantViolationError("pairwise distance increased along the trajectory")
    return files


def _figure2_point(p, theta, seed):
    hconfig = HomogenizerConfig(n_reservoir=p["n"], xi=state_spec_parse(p["xi"]),
                                schedule=CouplingSchedule.fixed(theta), mode=p["mode"])
    return run_homogenization(state_spec_parse(p["rho0"]), hconfig)


def _theta_tag(theta: float) -> str:
    return f"{theta:.6f}".replace(".", "p").replace("-", "m")


def _run_figure2(config, out, plot, workers=1):
    p = config.parameters
    thetas = p["theta"]
    # derived seed per sweep point keeps parallel execution order-independent
    seeds = [p["seed"] ^ index for index in range(len(thetas))]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trajectories = list(pool.map(lambda args: _figure2_point(p, *args),
                                         zip(thetas, seeds)))
    else:
        trajectories = [_figure2_point(p, theta, seed)
                        for theta, seed in zip(thetas, seeds)]
    files = []
    for index, (theta, trajectory) in enumerate(zip(thetas, trajectories)):
        name = f"figure2_theta_{_theta_tag(theta)}.csv"
        files.append(write_csv(out / name, "fidelity_curve", _trajectory_rows(trajectory),
                               meta=_meta(config, theta=float(theta),
                                          point_seed=seeds[index])))
    if plot:
        steps = np.arange(p["n"] + 1)
        series = {f"theta={theta:.4f}": traj.fidelities
                  for theta, traj in zip(thetas, trajectories)}
        files.append(write_svg(out / "figure2.svg",
                               f"convergence fidelity, N={p['n']}", steps, series))
    return files


def _run_circuit_verify(config, out, plot):
    p = config.parameters
    files = []
    if p["search"]:
        result = find_partial_swap_layout(rz_variant=p["rz_variant"])
        layout = result.layout
        meta = {"rz_variant": result.rz_variant,
                "candidates_tested": result.candidates_tested,
                "heads_scanned": result.heads_scanned}
        layout_path = out / "layout.json"
        save_layout(layout_path, layout, meta=meta)
        files.append(layout_path)
    else:
        layout, _ = load_layout(p["layout"])
    reports = verify_layout(layout, ns=p["n_values"])
    rows = [(r.n, float(r.realized_theta), float(r.phase), float(r.max_error),
             bool(r.equivalent)) for r in reports]
    files.insert(0, write_csv(out / "circuit_verify.csv", "circuit_verify", rows,
                              meta=_meta(config)))
    notes = sorted({note for r in reports for note in r.notes})
    for note in notes:
        print(f"note: {note}")
    if not all(r.equivalent for r in reports):
        bad = [r.n for r in reports if not r.equivalent]
        raise InvariantViolationError(f"layout failed phase-equivalence at n={bad}")
    return files


def _run_qrc_narma(config, out, plot):
    p = config.parameters
    result = narma_benchmark(
        order=p["order"], length=p["steps"], seed=p["seed"], n_reservoir=p["n"],
        observables=p["observables"], ridge_lambda=p["ridge_lambda"],
        washout=p["washout"], train_fraction=p["train_fraction"],
        reuse_reservoir=p["reuse_reservoir"])
    run = result.run
    meta = _meta(config, seed_used=result.seed_used)

    feature_header = ("step", "u") + run.observables
    feature_rows = [(t, float(run.inputs[t])) + tuple(float(v) for v in run.feature_matrix[t])
                    for t in range(len(run.inputs))]
    files = [write_table_csv(out / "features.csv", feature_header, feature_rows, meta=meta)]

    offset = len(run.inputs) - len(result.test_targets)
    pred_header = ("step", "target", "prediction", "baseline_prediction")
    pred_rows = [(offset + i, float(result.test_targets[i]),
                  float(result.test_predictions[i]),
                  float(result.baseline_test_predictions[i]))
                 for i in range(len(result.test_targets))]
    files.append(write_table_csv(out / "predictions.csv", pred_header, pred_rows, meta=meta))

    metric_rows = [
        ("train", float(result.train_nmse), float(p["ridge_lambda"]), p["n"]),
        ("test", float(result.test_nmse), float(p["ridge_lambda"]), p["n"]),
        ("baseline_train", float(result.baseline_train_nmse), float(p["ridge_lambda"]), p["n"]),
        ("baseline_test", float(result.baseline_test_nmse), float(p["ridge_lambda"]), p["n"]),
    ]
    files.append(write_csv(out / "metrics.csv", "qrc_metrics", metric_rows, meta=meta))
    if plot:
        steps = [row[0] for row in pred_rows]
        files.append(write_svg(out / "predictions.svg", "NARMA test split", steps,
                               {"target": result.test_targets,
                                "prediction": result.test_predictions}))
    return files


_RUNNERS = {
    "homogenize": _run_homogenize,
    "contractivity": _run_contractivity,
    "stability": _run_stability,
    "figure2": _run_figure2,
    "circuit-verify": _run_circuit_verify,
    "qrc-narma": _run_qrc_narma,
}


def run_experiment(config: ExperimentConfig, *, plot: bool = False, force: bool = False,
                   workers: int = 1):
    """Execute one experiment; returns the list of files written.

    Refuses to overwrite existing artifacts unless ``force`` is set.  The
    manifest written alongside the CSVs contains the fully resolved
    parameters, so any CSV can be regenerated from the manifest alone.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.json"
    if not force:
        existing = sorted(p.name for p in out.iterdir()
                          if p.suffix in (".csv", ".json", ".svg"))
        if existing:
            raise ConfigError(
                f"output dir {out} already holds artifacts {existing[:3]}"
                f"{'...' if len(existing) > 3 else ''} (pass --force to overwrite)")
    runner = _RUNNERS[config.experiment]
    if config.experiment == "figure2":
        files = runner(config, out, plot, workers=workers)
    else:
        files = runner(config, out, plot)
    write_manifest(manifest_path, experiment=config.experiment,
                   parameters=config.parameters,
                   files=[f.name for f in files], code_version=__version__)
    return files + [manifest_path]


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhrc",
        description="Partial-SWAP collision-model experiments with reproducible CSV output")
    parser.add_argument("--version", action="version", version=f"qhrc {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="flat key=value config file (flags override it)")
        sp.add_argument("--output-dir", default="qhrc_output", help="artifact directory")
        sp.add_argument("--plot", action="store_true", help="also write SVG line plots")
        sp.add_argument("--force", action="store_true", help="overwrite existing artifacts")
        sp.add_argument("--seed", type=int, dest="seed")

    def add_trajectory_flags(sp, rho_flags=("--rho0",)):
        sp.add_argument("--n", type=int, dest="n", help="number of reservoir qubits")
        sp.add_argument("--theta", action="append", dest="theta",
                        help="coupling angle (radians or 'pi/4'); repeatable for figure2")
        sp.add_argument("--theta-range", dest="theta_range",
                        help="uniform random coupling range 'lo,hi'")
        sp.add_argument("--xi", dest="xi", help="canonical reservoir state spec")
        for flag in rho_flags:
            sp.add_argument(flag, dest=flag.lstrip("-").replace("-", "_"),
                            help="initial state spec")
        sp.add_argument("--mode", choices=("mean-field", "exact-joint"), dest="mode")

    sp = sub.add_parser("homogenize", help="single homogenization trajectory")
    add_common(sp)
    add_trajectory_flags(sp)

    sp = sub.add_parser("contractivity", help="distance-sequence monotonicity check")
    add_common(sp)
    add_trajectory_flags(sp)

    sp = sub.add_parser("stability", help="two-trajectory washout under a shared schedule")
    add_common(sp)
    add_trajectory_flags(sp, rho_flags=("--rho-a", "--rho-b"))
    sp.add_argument("--epsilon", type=float, dest="epsilon", help="washout threshold")

    sp = sub.add_parser("figure2", help="fidelity convergence curves for several couplings")
    add_common(sp)
    add_trajectory_flags(sp)
    sp.add_argument("--workers", type=int, default=1,
                    help="parallel sweep workers (output is order-independent)")

    sp = sub.add_parser("circuit-verify", help="verify the partial-SWAP gate decomposition")
    add_common(sp)
    sp.add_argument("--n-values", dest="n_values", help="parameters to check, e.g. '1-8'")
    sp.add_argument("--layout", dest="layout", help="layout JSON path (default: bundled)")
    sp.add_argument("--search", action="store_true", default=None, dest="search",
                    help="run the layout search instead of loading a layout")
    sp.add_argument("--rz-variant", choices=("printed", "corrected"), dest="rz_variant")

    sp = sub.add_parser("qrc-narma", help="NARMA benchmark on the reservoir")
    add_common(sp)
    sp.add_argument("--order", type=int, dest="order", help="NARMA order (2 or 10)")
    sp.add_argument("--n", type=int, dest="n", help="reservoir qubits")
    sp.add_argument("--steps", type=int, dest="steps", help="input sequence length")
    sp.add_argument("--ridge-lambda", type=float, dest="ridge_lambda")
    sp.add_argument("--observables", dest="observables",
                    help="comma-separated Pauli labels (default: Z + adjacent ZZ)")
    sp.add_argument("--washout", type=int, dest="washout")
    sp.add_argument("--train-fraction", type=float, dest="train_fraction")
    sp.add_argument("--reuse-reservoir", action=argparse.BooleanOptionalAction,
                    default=None, dest="reuse_reservoir",
                    help="keep reservoir state across inputs (default) or reinitialize")
    return parser


_NON_PARAMETER_ARGS = {"experiment", "config", "output_dir", "plot", "force", "workers"}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    raw = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file {path} does not exist")
        raw.update(read_config_file(path))
    for key, value in vars(args).items():
        if key in _NON_PARAMETER_ARGS or value is None:
            continue
        raw[key] = value
    return ExperimentConfig.resolve(args.experiment, raw, args.output_dir)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        files = run_experiment(config, plot=args.plot, force=args.force,
                               workers=getattr(args, "workers", 1))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (InvariantViolationError, InvalidStateError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    for path in files:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
