"""Command-line interface: config-driven simulation, equilibrium report,
verification harness, and parameter sweeps.

Exit codes: 0 success / all checks passed, 1 invalid input, 2 invariant
violation during integration, 3 horizon reached without the requested
convergence.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import model
from .diagnostics import (
    IDENTITY_CHECK_NAMES,
    TrajectoryCollector,
    VerificationReport,
    bundled_scenario_names,
    bundled_scenarios,
    fail_fast_monitor,
    verify_identities,
    verify_theorems,
    write_states,
    write_timeseries,
)
from .graph import (
    BoundedSubgraph,
    GraphError,
    VertexField,
    WeightedGraph,
    generate,
    induce_bounded_subgraph,
    parse_graph,
)
from .model import LVParams
from .solver import (
    InvariantViolation,
    NonFiniteError,
    SolverConfig,
    simulate,
)

__all__ = ["main", "ConfigError", "load_run_setup"]

_PARAM_NAMES = ("d1", "d2", "a1", "b1", "c1", "a2", "b2", "c2")


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


@dataclass
class RunSetup:
    domain: WeightedGraph | BoundedSubgraph
    params: LVParams
    prey0: VertexField
    pred0: VertexField
    solver: SolverConfig
    states_path: Path
    diagnostics_path: Path


def _as_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(value).__name__}")
    return value


def _get(cfg: dict, key: str, path: str, required: bool = True, default=None):
    if key not in cfg:
        if required:
            raise ConfigError(f"{path}.{key}: missing required field")
        return default
    return cfg[key]


def _positive_number(value, path: str) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected a number, got {value!r}") from None
    if not x > 0.0:
        raise ConfigError(f"{path}: must be positive (got {x!r})")
    return x


def _build_graph(cfg: dict, base_dir: Path) -> WeightedGraph:
    section = _as_mapping(_get(cfg, "graph", "config"), "graph")
    has_file = "file" in section
    has_gen = "generate" in section
    if has_file == has_gen:
        raise ConfigError("graph: give exactly one of 'file' or 'generate'")
    if has_file:
        path = base_dir / str(section["file"])
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"graph.file: cannot read {path}: {exc}") from None
        return parse_graph(text)
    gen = _as_mapping(section["generate"], "graph.generate")
    kind = str(_get(gen, "kind", "graph.generate"))
    kwargs = {}
    for key in ("n", "rows", "cols"):
        if key in gen:
            kwargs[key] = gen[key]
    return generate(
        kind,
        weight=float(gen.get("weight", 1.0)),
        measure=float(gen.get("measure", 1.0)),
        **kwargs,
    )


def _build_domain(cfg: dict, base_dir: Path) -> WeightedGraph | BoundedSubgraph:
    g = _build_graph(cfg, base_dir)
    mode = str(cfg.get("mode", "full"))
    if mode not in ("full", "neumann"):
        raise ConfigError(f"mode: must be 'full' or 'neumann' (got {mode!r})")
    interior = cfg.get("interior")
    if mode == "full":
        if interior:
            raise ConfigError("interior: only allowed in neumann mode")
        return g
    if not interior:
        raise ConfigError("interior: neumann mode requires a nonempty vertex list")
    if not isinstance(interior, (list, tuple)):
        raise ConfigError("interior: expected a list of vertex ids")
    return induce_bounded_subgraph(g, [str(v) for v in interior])


def _build_params(cfg: dict) -> LVParams:
    section = _as_mapping(_get(cfg, "params", "config"), "params")
    extra = [k for k in section if k not in _PARAM_NAMES]
    if extra:
        raise ConfigError(f"params.{extra[0]}: unknown parameter")
    values = {}
    for name in _PARAM_NAMES:
        values[name] = _positive_number(_get(section, name, "params"), f"params.{name}")
    return LVParams(**values)


def _read_value_file(path: Path, domain) -> VertexField:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read value file {path}: {exc}") from None
    mapping: dict[str, float] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 2:
            raise ConfigError(f"{path}:{line_no}: expected '<vertex> <value>'")
        if tok[0] in mapping:
            raise ConfigError(f"{path}:{line_no}: duplicate vertex {tok[0]!r}")
        try:
            mapping[tok[0]] = float(tok[1])
        except ValueError:
            raise ConfigError(f"{path}:{line_no}: bad value {tok[1]!r}") from None
    try:
        return VertexField.from_dict(domain, mapping)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _build_initial(cfg: dict, domain, species: str, base_dir: Path) -> VertexField:
    section = _as_mapping(_get(cfg, "initial", "config"), "initial")
    spec = _as_mapping(_get(section, species, "initial"), f"initial.{species}")
    keys = [k for k in ("constant", "file", "random") if k in spec]
    if len(keys) != 1:
        raise ConfigError(
            f"initial.{species}: give exactly one of 'constant', 'file', 'random'"
        )
    kind = keys[0]
    if kind == "constant":
        try:
            value = float(spec["constant"])
        except (TypeError, ValueError):
            raise ConfigError(
                f"initial.{species}.constant: expected a number, got {spec['constant']!r}"
            ) from None
        return VertexField.constant(domain, value)
    if kind == "file":
        return _read_value_file(base_dir / str(spec["file"]), domain)
    rnd = _as_mapping(spec["random"], f"initial.{species}.random")
    for key in ("lo", "hi", "seed"):
        if key not in rnd:
            raise ConfigError(f"initial.{species}.random.{key}: missing required field")
    lo, hi = float(rnd["lo"]), float(rnd["hi"])
    if hi < lo:
        raise ConfigError(f"initial.{species}.random: hi must be >= lo")
    seed = rnd["seed"]
    if not isinstance(seed, int):
        raise ConfigError(f"initial.{species}.random.seed: expected an integer seed")
    rng = np.random.default_rng(seed)
    return VertexField(domain, rng.uniform(lo, hi, len(domain.vertices)))


def _build_solver(cfg: dict, record_every: int | None) -> SolverConfig:
    section = _as_mapping(cfg.get("solver", {}), "solver")
    known = {"method", "dt", "t_end", "convergence_tol", "record_every", "safety"}
    extra = [k for k in section if k not in known]
    if extra:
        raise ConfigError(f"solver.{extra[0]}: unknown field")
    kwargs = dict(section)
    if record_every is not None:
        kwargs["record_every"] = record_every
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from None


def load_run_setup(cfg: dict, *, base_dir: Path | None = None,
                   output_dir: Path | None = None,
                   record_every: int | None = None) -> RunSetup:
    """Build every run ingredient from a parsed config mapping."""
    base = base_dir if base_dir is not None else Path.cwd()
    cfg = _as_mapping(cfg, "config")
    domain = _build_domain(cfg, base)
    params = _build_params(cfg)
    prey0 = _build_initial(cfg, domain, "prey", base)
    pred0 = _build_initial(cfg, domain, "predator", base)
    solver_cfg = _build_solver(cfg, record_every)
    out = _as_mapping(cfg.get("output", {}), "output")
    states = Path(str(out.get("states", "states.csv")))
    diagnostics = Path(str(out.get("diagnostics", "diagnostics.csv")))
    if output_dir is not None:
        states = output_dir / states
        diagnostics = output_dir / diagnostics
    if states == diagnostics:
        raise ConfigError("output: states and diagnostics paths must differ")
    return RunSetup(domain, params, prey0, pred0, solver_cfg, states, diagnostics)


def _load_yaml(path: str) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return _as_mapping(data, str(path))


# -- subcommands -------------------------------------------------------------


def _cmd_simulate(args) -> int:
    cfg = _load_yaml(args.config)
    setup = load_run_setup(
        cfg,
        base_dir=Path(args.config).resolve().parent,
        output_dir=Path(args.output_dir) if args.output_dir else None,
        record_every=args.record_every,
    )
    collector = TrajectoryCollector()
    sinks = [collector]
    if args.fail_fast:
        b = model.bounds(setup.params, setup.prey0, setup.pred0)
        nontrivial = bool(setup.prey0.values.any() and setup.pred0.values.any())
        sinks.append(fail_fast_monitor(b, positivity=nontrivial))
    result = simulate(setup.domain, setup.params, setup.prey0, setup.pred0,
                      setup.solver, sinks=sinks)
    for path in (setup.states_path, setup.diagnostics_path):
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
    write_states(collector.states, setup.states_path)
    write_timeseries(collector.records, setup.diagnostics_path)

    g = setup.domain
    mode = "neumann" if isinstance(g, BoundedSubgraph) else "full"
    print(f"mode={mode} vertices={len(g.vertices)} dt={result.dt!r}")
    print(f"stop={result.stop} t={result.final.t!r} steps={result.steps}")
    print(f"prey range [{result.final.prey.min()!r}, {result.final.prey.max()!r}]")
    print(f"predator range [{result.final.predator.min()!r}, {result.final.predator.max()!r}]")
    if model.coexistence_holds(setup.params):
        eq = model.equilibrium(setup.params)
        dist = (np.abs(result.final.prey.values - eq.e).max()
                + np.abs(result.final.predator.values - eq.g).max())
        print(f"sup distance to equilibrium (e={eq.e!r}, g={eq.g!r}): {float(dist)!r}")
    print(f"wrote {setup.states_path} and {setup.diagnostics_path}")
    if setup.solver.convergence_tol > 0.0 and result.stop != "converged":
        print("horizon reached before convergence", file=sys.stderr)
        return 3
    return 0


def _cmd_equilibrium(args) -> int:
    values = dict(zip(_PARAM_NAMES, args.constants))
    p = LVParams(**values)  # ValueError on nonpositive values -> exit 1
    lhs = p.a1 * p.c2
    rhs = p.a2 * p.c1
    coexists = model.coexistence_holds(p)
    print(f"coexistence a1*c2 > a2*c1: {lhs!r} > {rhs!r} is {'true' if coexists else 'false'}")
    prey_cap = p.a1 / p.b1
    pred_cap = (p.a2 + p.b2 * prey_cap) / p.c2
    print(f"prey bound component a1/b1 = {prey_cap!r}")
    print(f"predator bound component (a2 + b2*(a1/b1))/c2 = {pred_cap!r}")
    if not coexists:
        print("no positive constant steady state: coexistence condition violated")
        return 1
    eq = model.equilibrium(p)
    print(f"e = {eq.e!r}")
    print(f"g = {eq.g!r}")
    return 0


def _cmd_verify(args) -> int:
    scenario_names = bundled_scenario_names()
    known = IDENTITY_CHECK_NAMES + scenario_names
    if args.only is not None and args.only not in known:
        print(f"error: unknown check or scenario {args.only!r}", file=sys.stderr)
        print("known names:", file=sys.stderr)
        for name in known:
            print(f"  {name}", file=sys.stderr)
        return 1
    if args.only is None:
        report = verify_identities(args.seed, args.trials)
        theorem_report = verify_theorems()
        report = VerificationReport(report.checks + theorem_report.checks)
    elif args.only in IDENTITY_CHECK_NAMES:
        report = verify_identities(args.seed, args.trials, only=args.only)
    else:
        chosen = [s for s in bundled_scenarios() if s.name == args.only]
        report = verify_theorems(chosen)
    print(report.format())
    return 0 if report.passed else 1


def _sweep_point(payload: tuple[int, dict, dict, str | None]):
    index, cfg, overrides, base_dir = payload
    row = {"index": index, **{k: repr(float(v)) for k, v in overrides.items()},
           "stop": "", "time_to_tolerance": "", "final_sup_error": "", "note": ""}
    try:
        setup = load_run_setup(
            cfg, base_dir=Path(base_dir) if base_dir else None)
        if setup.solver.convergence_tol > 0.0 and not model.coexistence_holds(setup.params):
            row["stop"] = "skipped"
            row["note"] = "coexistence condition a1/c1 > a2/c2 fails"
            return row
        result = simulate(setup.domain, setup.params, setup.prey0, setup.pred0,
                          setup.solver)
        row["stop"] = result.stop
        if result.stop == "converged":
            row["time_to_tolerance"] = repr(float(result.final.t))
        if model.coexistence_holds(setup.params):
            eq = model.equilibrium(setup.params)
            dist = (np.abs(result.final.prey.values - eq.e).max()
                    + np.abs(result.final.predator.values - eq.g).max())
            row["final_sup_error"] = repr(float(dist))
    except Exception as exc:  # a failing grid point is recorded, not fatal
        row["stop"] = "failure"
        row["note"] = str(exc)
    return row


def _cmd_sweep(args) -> int:
    cfg = _load_yaml(args.config)
    sweep = cfg.pop("sweep", None)
    if not sweep:
        raise ConfigError("sweep: missing or empty parameter grid")
    sweep = _as_mapping(sweep, "sweep")
    names = list(sweep)
    for name in names:
        if name not in _PARAM_NAMES:
            raise ConfigError(f"sweep.{name}: not a model parameter")
        if not isinstance(sweep[name], (list, tuple)) or not sweep[name]:
            raise ConfigError(f"sweep.{name}: expected a nonempty list of values")
    base_params = _as_mapping(_get(cfg, "params", "config"), "params")
    base_dir = str(Path(args.config).resolve().parent)

    payloads = []
    for index, combo in enumerate(itertools.product(*(sweep[n] for n in names))):
        overrides = dict(zip(names, combo))
        point_cfg = dict(cfg)
        point_cfg["params"] = {**base_params, **overrides}
        payloads.append((index, point_cfg, overrides, base_dir))

    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    if jobs == 1 or len(payloads) == 1:
        rows = [_sweep_point(p) for p in payloads]
    else:
        try:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_sweep_point, payloads))
        except (OSError, PermissionError):
            rows = [_sweep_point(p) for p in payloads]

    header = ["index", *names, "stop", "time_to_tolerance", "final_sup_error", "note"]
    out = _as_mapping(cfg.get("output", {}), "output")
    summary = Path(str(out.get("summary", "sweep.csv")))
    if args.output_dir:
        summary = Path(args.output_dir) / summary
    if summary.parent != Path(""):
        summary.parent.mkdir(parents=True, exist_ok=True)
    import csv as _csv

    with open(summary, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([row.get(k, "") for k in header])
    print(",".join(header))
    for row in rows:
        print(",".join(str(row.get(k, "")) for k in header))
    print(f"wrote {summary}")
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphlv",
        description="Prey-predator reaction-diffusion dynamics on weighted graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="integrate a configured system")
    p_sim.add_argument("config", help="YAML run configuration")
    p_sim.add_argument("--output-dir", default=None, help="directory for output files")
    p_sim.add_argument("--record-every", type=int, default=None,
                       help="override the recording stride")
    p_sim.add_argument("--fail-fast", action="store_true",
                       help="stop with exit 2 when a recorded state breaks an invariant")
    p_sim.set_defaults(func=_cmd_simulate)

    p_eq = sub.add_parser("equilibrium", help="report the coexistence steady state")
    p_eq.add_argument("constants", type=float, nargs=8,
                      metavar=("d1 d2 a1 b1 c1 a2 b2 c2".split()[0]),
                      help="the eight positive constants: d1 d2 a1 b1 c1 a2 b2 c2")
    p_eq.set_defaults(func=_cmd_equilibrium)

    p_ver = sub.add_parser("verify", help="run the verification harness")
    p_ver.add_argument("--seed", type=int, default=1)
    p_ver.add_argument("--trials", type=int, default=100)
    p_ver.add_argument("--only", default=None,
                       help="run a single identity family or scenario")
    p_ver.set_defaults(func=_cmd_verify)

    p_sweep = sub.add_parser("sweep", help="run a parameter grid")
    p_sweep.add_argument("config", help="YAML run configuration with a 'sweep' section")
    p_sweep.add_argument("--output-dir", default=None)
    p_sweep.add_argument("--jobs", type=int, default=None,
                         help="parallel workers (default: all cores)")
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvariantViolation, NonFiniteError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
