"""Trajectory diagnostics, invariant monitors, and the verification harness.

``record`` reduces a state to the scalar time series used by the monitors:
the entropy functional L (omitted when any density is nonpositive), the
squared distances F to the equilibrium components, per-species extrema,
and the worst boundary flux residual in Neumann mode.

``verify_identities`` stress-tests the exact discrete identities on seeded
random graphs; ``verify_theorems`` integrates bundled scenarios and checks
the qualitative guarantees (invariant region, positivity, entropy descent,
decay of F, boundary flux, convergence to the coexistence equilibrium).
"""

from __future__ import annotations

import csv
import math
from contextlib import nullcontext
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import calculus, model
from .graph import (
    BoundedSubgraph,
    VertexField,
    WeightedGraph,
    generate,
    induce_bounded_subgraph,
    serialize_graph,
)
from .model import Bounds, Equilibrium, LVParams
from .solver import (
    InvariantViolation,
    NonFiniteError,
    SimulationResult,
    SolverConfig,
    State,
    simulate,
)

__all__ = [
    "DiagnosticsRecord",
    "CheckResult",
    "VerificationReport",
    "TrajectoryCollector",
    "Scenario",
    "record",
    "write_timeseries",
    "write_states",
    "fail_fast_monitor",
    "random_connected_graph",
    "random_bounded_subgraph",
    "verify_identities",
    "verify_theorems",
    "bundled_scenarios",
    "bundled_scenario_names",
    "IDENTITY_CHECK_NAMES",
]

TIMESERIES_HEADER = (
    "t", "L", "F_prey", "F_pred",
    "prey_min", "prey_max", "pred_min", "pred_max", "neumann_residual",
)
STATES_HEADER = ("t", "vertex", "prey", "pred")

IDENTITY_CHECK_NAMES = (
    "green-identity",
    "green-identity-subgraph",
    "gamma-symmetry",
    "gamma-bilinearity",
    "dissipation-identity",
    "equilibrium-residual",
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Scalar summary of one recorded state."""

    t: float
    L: float | None
    F_prey: float | None
    F_pred: float | None
    prey_min: float
    prey_max: float
    pred_min: float
    pred_max: float
    neumann_residual: float | None


def record(domain, p: LVParams, eq: Equilibrium | None, state: State) -> DiagnosticsRecord:
    """Pure function of the state; identical states yield identical records.

    L is omitted (None, not zero) when any density is nonpositive; the F
    fields are omitted when no coexistence equilibrium exists.
    """
    u = state.prey.values
    v = state.predator.values
    positive = bool(u.min() > 0.0 and v.min() > 0.0)
    L = None
    f_prey = f_pred = None
    if eq is not None:
        if positive:
            L = model.lyapunov_functional(domain, p, eq, state.prey, state.predator)
        f_prey = model.f_functional(domain, state.prey, eq.e)
        f_pred = model.f_functional(domain, state.predator, eq.g)
    res = None
    if isinstance(domain, BoundedSubgraph):
        w, sums = domain.boundary_coupling
        ni = domain.interior_count
        mu_b = domain.mu[ni:]
        res_u = np.abs(u[ni:] * sums - w @ u[:ni]) / mu_b
        res_v = np.abs(v[ni:] * sums - w @ v[:ni]) / mu_b
        res = float(max(res_u.max(), res_v.max()))
    return DiagnosticsRecord(
        t=state.t, L=L, F_prey=f_prey, F_pred=f_pred,
        prey_min=float(u.min()), prey_max=float(u.max()),
        pred_min=float(v.min()), pred_max=float(v.max()),
        neumann_residual=res,
    )


@dataclass
class TrajectoryCollector:
    """Sink that keeps every emitted state and record, in time order."""

    states: list[State]
    records: list[DiagnosticsRecord]

    def __init__(self):
        self.states = []
        self.records = []

    def __call__(self, state: State, rec: DiagnosticsRecord) -> None:
        self.states.append(state)
        self.records.append(rec)


def fail_fast_monitor(b: Bounds, *, positivity: bool, slack: float = 1e-9) -> Callable:
    """Sink raising :class:`InvariantViolation` the moment a recorded state
    leaves the invariant box (or, when armed, loses strict positivity)."""

    def sink(state: State, rec: DiagnosticsRecord) -> None:
        if rec.prey_min < -slack or rec.prey_max > b.prey + slack:
            raise InvariantViolation(
                f"prey left the invariant region [0, {b.prey!r}] at t={rec.t!r}: "
                f"min={rec.prey_min!r}, max={rec.prey_max!r}"
            )
        if rec.pred_min < -slack or rec.pred_max > b.pred + slack:
            raise InvariantViolation(
                f"predator left the invariant region [0, {b.pred!r}] at t={rec.t!r}: "
                f"min={rec.pred_min!r}, max={rec.pred_max!r}"
            )
        if positivity and rec.t > 0.0 and (rec.prey_min <= 0.0 or rec.pred_min <= 0.0):
            raise InvariantViolation(
                f"strict positivity lost at t={rec.t!r}: "
                f"prey_min={rec.prey_min!r}, pred_min={rec.pred_min!r}"
            )

    return sink


# -- CSV output -----------------------------------------------------------


def _cell(x) -> str:
    return "" if x is None else repr(float(x))


def _open_dest(destination):
    if hasattr(destination, "write"):
        return nullcontext(destination)
    return open(destination, "w", newline="")


def write_timeseries(records: Sequence[DiagnosticsRecord], destination) -> None:
    """Diagnostics CSV; absent values are empty cells, numbers shortest
    round-trip decimal.  Bit-reproducible for identical inputs."""
    if not records:
        raise ValueError("no records to write")
    with _open_dest(destination) as fh:
        w = csv.writer(fh)
        w.writerow(TIMESERIES_HEADER)
        for r in records:
            w.writerow([
                _cell(r.t), _cell(r.L), _cell(r.F_prey), _cell(r.F_pred),
                _cell(r.prey_min), _cell(r.prey_max),
                _cell(r.pred_min), _cell(r.pred_max),
                _cell(r.neumann_residual),
            ])


def write_states(states: Sequence[State], destination) -> None:
    """Long-format state CSV: one row per vertex per recorded time."""
    if not states:
        raise ValueError("no states to write")
    with _open_dest(destination) as fh:
        w = csv.writer(fh)
        w.writerow(STATES_HEADER)
        for state in states:
            verts = state.domain.vertices
            for i, vid in enumerate(verts):
                w.writerow([
                    _cell(state.t), vid,
                    _cell(state.prey.values[i]), _cell(state.predator.values[i]),
                ])


# -- verification reports ---------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass" | "fail"
    residual: float
    tolerance: float
    witness: str | None = None
    details: str | None = None


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def format(self) -> str:
        lines = []
        width = max((len(c.name) for c in self.checks), default=8)
        for c in self.checks:
            lines.append(
                f"{c.status.upper():4}  {c.name:<{width}}  "
                f"residual={c.residual:.6e}  tolerance={c.tolerance:.6e}"
            )
            if c.details:
                lines.append(f"      {c.details}")
            if c.witness:
                lines.append(f"      witness: {c.witness}")
        n_pass = sum(c.status == "pass" for c in self.checks)
        lines.append(f"{n_pass}/{len(self.checks)} checks passed")
        return "\n".join(lines)


# -- random inputs ----------------------------------------------------------


def random_connected_graph(rng: np.random.Generator, max_n: int = 50) -> WeightedGraph:
    """Random connected graph: a uniformly random labeled tree backbone plus
    independent extra edges with probability 0.3; weights and measures are
    uniform in [0.5, 2]."""
    n = int(rng.integers(2, max_n + 1))
    tree: list[tuple[int, int]] = []
    if n == 2:
        tree = [(0, 1)]
    else:
        seq = [int(x) for x in rng.integers(0, n, size=n - 2)]
        degree = [1] * n
        for x in seq:
            degree[x] += 1
        import heapq

        leaves = [i for i in range(n) if degree[i] == 1]
        heapq.heapify(leaves)
        for x in seq:
            leaf = heapq.heappop(leaves)
            tree.append((min(leaf, x), max(leaf, x)))
            degree[x] -= 1
            if degree[x] == 1:
                heapq.heappush(leaves, x)
        a = heapq.heappop(leaves)
        b = heapq.heappop(leaves)
        tree.append((min(a, b), max(a, b)))

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    extra_mask = rng.random(len(pairs)) < 0.3
    tree_set = set(tree)
    pair_list = list(tree)
    for pair, keep in zip(pairs, extra_mask):
        if keep and pair not in tree_set:
            pair_list.append(pair)

    measures = rng.uniform(0.5, 2.0, size=n)
    weights = rng.uniform(0.5, 2.0, size=len(pair_list))
    verts = [str(k) for k in range(1, n + 1)]
    return WeightedGraph(
        verts,
        {v: float(m) for v, m in zip(verts, measures)},
        [(verts[i], verts[j], float(w)) for (i, j), w in zip(pair_list, weights)],
    )


def random_bounded_subgraph(rng: np.random.Generator, g: WeightedGraph) -> BoundedSubgraph:
    """Random interior set whose derived domain is connected; falls back to
    a single-vertex interior, which is always valid on a connected graph."""
    for _ in range(20):
        k = int(rng.integers(1, g.n))
        chosen = sorted(int(i) for i in rng.choice(g.n, size=k, replace=False))
        try:
            return induce_bounded_subgraph(g, [g.vertices[i] for i in chosen])
        except ValueError:
            continue
    return induce_bounded_subgraph(g, [g.vertices[0]])


def _random_params(rng: np.random.Generator, require_coexistence: bool) -> LVParams:
    while True:
        d1, d2, a1, b1, c1, a2, b2, c2 = rng.uniform(0.5, 2.0, size=8)
        p = LVParams(d1=d1, d2=d2, a1=a1, b1=b1, c1=c1, a2=a2, b2=b2, c2=c2)
        if not require_coexistence or model.coexistence_holds(p):
            return p


# -- identity checks ---------------------------------------------------------


def _field_text(f: VertexField) -> str:
    return "{" + ", ".join(f"{v}: {float(x)!r}" for v, x in zip(f.domain.vertices, f.values)) + "}"


def _green_family(rng, trials, lap_fn, subgraph: bool) -> CheckResult:
    name = "green-identity-subgraph" if subgraph else "green-identity"
    tol = 1e-12
    worst = 0.0
    witness = None
    for k in range(trials):
        g = random_connected_graph(rng)
        dom: WeightedGraph | BoundedSubgraph = g
        if subgraph:
            dom = random_bounded_subgraph(rng, g)
        nv = len(dom.vertices)
        u = VertexField(dom, rng.uniform(-1.0, 1.0, nv))
        v = VertexField(dom, rng.uniform(-1.0, 1.0, nv))
        lap = lap_fn(dom, u)
        mu = dom.mu
        t1 = float(np.dot(mu, v.values * lap.values))
        t2 = float(np.dot(mu, calculus.gradient_form(dom, u, v).values))
        rel = abs(t1 + t2) / (1.0 + abs(t1))
        if rel > worst:
            worst = rel
            if rel > tol and witness is None:
                where = (
                    f"interior={list(dom.interior)} of graph" if subgraph else "graph"
                )
                witness = (
                    f"trial {k}: residual {t1 + t2!r} on {where}:\n"
                    f"{serialize_graph(g)}u={_field_text(u)}\nv={_field_text(v)}"
                )
    status = "pass" if worst <= tol else "fail"
    return CheckResult(name, status, worst, tol, witness)


def _gamma_symmetry(rng, trials) -> CheckResult:
    # term-by-term identical sums: the two orders must agree exactly
    worst = 0.0
    witness = None
    for k in range(trials):
        g = random_connected_graph(rng)
        u = VertexField(g, rng.uniform(-1.0, 1.0, g.n))
        v = VertexField(g, rng.uniform(-1.0, 1.0, g.n))
        diff = np.abs(
            calculus.gradient_form(g, u, v).values
            - calculus.gradient_form(g, v, u).values
        ).max()
        if diff > worst:
            worst = float(diff)
            if witness is None and diff > 0.0:
                witness = f"trial {k}: max pointwise asymmetry {float(diff)!r}\n{serialize_graph(g)}"
    status = "pass" if worst <= 0.0 else "fail"
    return CheckResult("gamma-symmetry", status, worst, 0.0, witness)


def _gamma_bilinearity(rng, trials) -> CheckResult:
    tol = 1e-12
    worst = 0.0
    witness = None
    for k in range(trials):
        g = random_connected_graph(rng)
        u = VertexField(g, rng.uniform(-1.0, 1.0, g.n))
        w = VertexField(g, rng.uniform(-1.0, 1.0, g.n))
        v = VertexField(g, rng.uniform(-1.0, 1.0, g.n))
        alpha, beta = rng.uniform(-2.0, 2.0, size=2)
        lhs = calculus.gradient_form(
            g, VertexField(g, alpha * u.values + beta * w.values), v
        ).values
        rhs = (alpha * calculus.gradient_form(g, u, v).values
               + beta * calculus.gradient_form(g, w, v).values)
        rel = float((np.abs(lhs - rhs) / (1.0 + np.abs(rhs))).max())
        if rel > worst:
            worst = rel
            if rel > tol and witness is None:
                witness = f"trial {k}: alpha={alpha!r}, beta={beta!r}\n{serialize_graph(g)}"
    status = "pass" if worst <= tol else "fail"
    return CheckResult("gamma-bilinearity", status, worst, tol, witness)


def _dissipation_identity(rng, trials) -> CheckResult:
    tol = 1e-12
    worst = 0.0
    witness = None
    for k in range(trials):
        p = _random_params(rng, require_coexistence=True)
        eq = model.equilibrium(p)
        u, v = rng.uniform(0.01, 10.0, size=2)
        res = model.dissipation_identity_residual(p, eq, float(u), float(v))
        rel = abs(res) / (u * u + v * v + 1.0)
        if rel > worst:
            worst = float(rel)
            if rel > tol and witness is None:
                witness = f"trial {k}: params={p!r}, u={float(u)!r}, v={float(v)!r}, residual={res!r}"
    status = "pass" if worst <= tol else "fail"
    return CheckResult("dissipation-identity", status, worst, tol, witness)


def _equilibrium_residual(rng, trials) -> CheckResult:
    tol = 1e-14
    worst = 0.0
    witness = None
    for k in range(trials):
        p = _random_params(rng, require_coexistence=True)
        eq = model.equilibrium(p)
        r1 = math.fsum((p.a1, -p.b1 * eq.e, -p.c1 * eq.g))
        r2 = math.fsum((p.a2, p.b2 * eq.e, -p.c2 * eq.g))
        rel = max(abs(r1), abs(r2)) / max(p.a1, p.a2)
        if rel > worst:
            worst = rel
            if rel > tol and witness is None:
                witness = f"trial {k}: params={p!r}, residuals=({r1!r}, {r2!r})"
    status = "pass" if worst <= tol else "fail"
    return CheckResult("equilibrium-residual", status, worst, tol, witness)


def verify_identities(seed: int, trials: int, *, laplacian_fn=None,
                      only: str | None = None) -> VerificationReport:
    """Seeded randomized checks of the exact identities; deterministic for a
    given seed.  ``laplacian_fn`` overrides the Laplacian used by the Green
    identity families (fault-injection hook for tests)."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1 (got {trials!r})")
    if only is not None and only not in IDENTITY_CHECK_NAMES:
        raise ValueError(
            f"unknown identity check {only!r}; known: {', '.join(IDENTITY_CHECK_NAMES)}"
        )
    lap_fn = calculus.laplacian if laplacian_fn is None else laplacian_fn
    rng = np.random.default_rng(seed)
    runners = {
        "green-identity": lambda: _green_family(rng, trials, lap_fn, subgraph=False),
        "green-identity-subgraph": lambda: _green_family(rng, trials, lap_fn, subgraph=True),
        "gamma-symmetry": lambda: _gamma_symmetry(rng, trials),
        "gamma-bilinearity": lambda: _gamma_bilinearity(rng, trials),
        "dissipation-identity": lambda: _dissipation_identity(rng, trials),
        "equilibrium-residual": lambda: _equilibrium_residual(rng, trials),
    }
    checks = [
        runners[name]() for name in IDENTITY_CHECK_NAMES
        if only is None or name == only
    ]
    return VerificationReport(tuple(checks))


# -- theorem scenarios --------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """A reproducible simulation setup for the theorem checks."""

    name: str
    domain: WeightedGraph | BoundedSubgraph
    params: LVParams
    prey0: VertexField
    pred0: VertexField
    config: SolverConfig


def _uniform_open_low(domain, seed: int, hi: float = 3.0) -> VertexField:
    # values in (0, hi]: hi minus a draw from [0, hi)
    rng = np.random.default_rng(seed)
    return VertexField(domain, hi - rng.uniform(0.0, hi, len(domain.vertices)))


def _with_zero_at(field: VertexField, vertex: str) -> VertexField:
    values = field.values.copy()
    values[field.domain.index(vertex)] = 0.0
    return VertexField(field.domain, values)


def bundled_scenarios() -> list[Scenario]:
    p = LVParams(d1=1.0, d2=1.0, a1=2.0, b1=1.0, c1=1.0, a2=1.0, b2=1.0, c2=1.0)
    cfg = SolverConfig(method="rk4", dt="auto", t_end=500.0,
                       convergence_tol=1e-6, record_every=1)
    scenarios = []

    cycle10 = generate("cycle", 10)
    scenarios.append(Scenario(
        "cycle10-baseline", cycle10, p,
        VertexField.constant(cycle10, 1.0), VertexField.constant(cycle10, 1.0), cfg,
    ))

    p3 = induce_bounded_subgraph(generate("path", 3), ["1", "2"])
    scenarios.append(Scenario(
        "p3-neumann", p3, p,
        VertexField.constant(p3, 1.0), VertexField.constant(p3, 1.0), cfg,
    ))

    for name, dom, seed in (
        ("path5-random", generate("path", 5), 101),
        ("cycle10-random", cycle10, 102),
        ("complete5-random", generate("complete", 5), 103),
        ("grid3x3-random", generate("grid", rows=3, cols=3), 104),
    ):
        scenarios.append(Scenario(
            name, dom, p,
            _uniform_open_low(dom, seed), _uniform_open_low(dom, seed + 100), cfg,
        ))

    zeros_prey = _with_zero_at(_uniform_open_low(cycle10, 105), "1")
    zeros_pred = _with_zero_at(_uniform_open_low(cycle10, 205), "2")
    scenarios.append(Scenario("cycle10-zeros", cycle10, p, zeros_prey, zeros_pred, cfg))

    grid4 = induce_bounded_subgraph(
        generate("grid", rows=4, cols=4), ["r2c2", "r2c3", "r3c2", "r3c3"]
    )
    scenarios.append(Scenario(
        "grid4x4-neumann", grid4, p,
        _uniform_open_low(grid4, 106), _uniform_open_low(grid4, 206), cfg,
    ))
    return scenarios


def bundled_scenario_names() -> tuple[str, ...]:
    return tuple(s.name for s in bundled_scenarios())


def _scenario_checks(s: Scenario, result: SimulationResult,
                     records: list[DiagnosticsRecord]) -> list[CheckResult]:
    checks: list[CheckResult] = []
    p = s.params
    b = model.bounds(p, s.prey0, s.pred0)
    nontrivial = bool(s.prey0.values.any() and s.pred0.values.any())
    coexists = model.coexistence_holds(p)

    def fail_witness(text):
        return f"scenario {s.name!r}: {text}"

    # invariant region
    slack = 1e-9
    excess = max(
        max(-r.prey_min for r in records),
        max(r.prey_max - b.prey for r in records),
        max(-r.pred_min for r in records),
        max(r.pred_max - b.pred for r in records),
    )
    checks.append(CheckResult(
        f"{s.name}/invariant-region",
        "pass" if excess <= slack else "fail", excess, slack,
        None if excess <= slack else fail_witness(
            f"worst excursion {excess!r} beyond [0, {b.prey!r}] x [0, {b.pred!r}]"),
    ))

    # strict positivity after t=0 (hypotheses: nonneg, nontrivial initial data)
    if nontrivial:
        after = [r for r in records if r.t > 0.0]
        low = min(min(r.prey_min, r.pred_min) for r in after) if after else 1.0
        ok = low > 0.0
        checks.append(CheckResult(
            f"{s.name}/positivity", "pass" if ok else "fail", -low, 0.0,
            None if ok else fail_witness(f"minimum recorded density {low!r} at t>0"),
        ))

    # entropy functional never increases between consecutive records; when
    # the initial boundary data violates the flux constraint, the first step
    # projects it onto the constraint and the descent claim starts there
    ltol = 1e-10
    usable = records
    if records and records[0].neumann_residual is not None:
        sup0 = max(abs(records[0].prey_min), abs(records[0].prey_max),
                   abs(records[0].pred_min), abs(records[0].pred_max))
        if records[0].neumann_residual > 1e-12 * (1.0 + sup0):
            usable = [r for r in records if r.t > 0.0]
    lvals = [(r.t, r.L) for r in usable if r.L is not None]
    worst_l = 0.0
    where = None
    for (t0, l0), (t1, l1) in zip(lvals, lvals[1:]):
        rel = (l1 - l0) / (1.0 + abs(l0))
        if rel > worst_l:
            worst_l = rel
            where = (t0, t1)
    ok = worst_l <= ltol
    checks.append(CheckResult(
        f"{s.name}/lyapunov-monotonicity", "pass" if ok else "fail", worst_l, ltol,
        None if ok else fail_witness(f"L increased between t={where[0]!r} and t={where[1]!r}"),
    ))

    # F decays to zero: the peak over the tail's second half sits below the
    # peak over its first half (the descent is oscillatory, so pointwise
    # record-to-record monotonicity is not the right certificate), and the
    # terminal values are at the convergence floor.
    if result.stop == "converged":
        tail = records[len(records) // 10:]
        half = len(tail) // 2
        total_mu = s.domain.total_measure
        floor = total_mu * s.config.convergence_tol ** 2 * (1.0 + 1e-9)
        worst_ratio = 0.0
        terminal_ok = True
        for pick in (lambda r: r.F_prey, lambda r: r.F_pred):
            m1 = max(pick(r) for r in tail[:half])
            m2 = max(pick(r) for r in tail[half:])
            ratio = m2 / m1 if m1 > 0.0 else 0.0
            worst_ratio = max(worst_ratio, ratio)
            if pick(records[-1]) > floor:
                terminal_ok = False
        ok = worst_ratio <= 0.5 and terminal_ok
        checks.append(CheckResult(
            f"{s.name}/f-decay", "pass" if ok else "fail", worst_ratio, 0.5,
            None if ok else fail_witness(
                f"tail peak ratio {worst_ratio!r}, terminal F=({records[-1].F_prey!r}, "
                f"{records[-1].F_pred!r}) vs floor {floor!r}"),
            details=f"terminal F_prey={records[-1].F_prey!r}, F_pred={records[-1].F_pred!r}",
        ))

    # boundary flux stays at the enforcement floor after t=0
    if isinstance(s.domain, BoundedSubgraph):
        ntol = 1e-12
        worst_res = 0.0
        for r in records:
            if r.t <= 0.0:
                continue
            sup = max(abs(r.prey_min), abs(r.prey_max), abs(r.pred_min), abs(r.pred_max))
            worst_res = max(worst_res, r.neumann_residual / (1.0 + sup))
        ok = worst_res <= ntol
        checks.append(CheckResult(
            f"{s.name}/neumann-residual", "pass" if ok else "fail", worst_res, ntol,
            None if ok else fail_witness(f"worst normalized boundary flux {worst_res!r}"),
        ))

    # uniform convergence to the equilibrium within the horizon
    if s.config.convergence_tol > 0.0 and coexists and nontrivial:
        eq = model.equilibrium(p)
        dist = (np.abs(result.final.prey.values - eq.e).max()
                + np.abs(result.final.predator.values - eq.g).max())
        ok = result.stop == "converged" and dist <= s.config.convergence_tol
        checks.append(CheckResult(
            f"{s.name}/convergence", "pass" if ok else "fail",
            float(dist), s.config.convergence_tol,
            None if ok else fail_witness(
                f"stop={result.stop!r}, final sup distance {float(dist)!r}"),
            details=(f"converged at t={result.final.t!r} after {result.steps} steps"
                     if result.stop == "converged" else None),
        ))
    return checks


def verify_theorems(scenarios: Sequence[Scenario] | None = None,
                    config: SolverConfig | None = None) -> VerificationReport:
    """Run each scenario and check the qualitative solution guarantees.
    ``config`` overrides every scenario's solver configuration."""
    if scenarios is None:
        scenarios = bundled_scenarios()
    checks: list[CheckResult] = []
    for s in scenarios:
        cfg = config if config is not None else s.config
        collector = TrajectoryCollector()
        try:
            result = simulate(s.domain, s.params, s.prey0, s.pred0, cfg,
                              sinks=[collector])
        except (NonFiniteError, InvariantViolation, ValueError) as exc:
            checks.append(CheckResult(
                f"{s.name}/integration", "fail", math.inf, 0.0,
                witness=f"scenario {s.name!r} raised: {exc}",
            ))
            continue
        checks.extend(_scenario_checks(s, result, collector.records))
    return VerificationReport(tuple(checks))
