import numpy as np
import pytest

from graphlv.calculus import laplacian, normal_derivative
from graphlv.diagnostics import TrajectoryCollector
from graphlv.graph import (
    VertexField,
    WeightedGraph,
    generate,
    induce_bounded_subgraph,
)
from graphlv.model import LVParams, bounds, equilibrium, reaction
from graphlv.solver import (
    NonFiniteError,
    SolverConfig,
    State,
    enforce_neumann,
    simulate,
    stable_dt,
    step,
)

BASE = LVParams(d1=1, d2=1, a1=2, b1=1, c1=1, a2=1, b2=1, c2=1)


def reaction_rate_bound(p, b):
    return (p.a1 + 2 * p.b1 * b.prey + p.c1 * b.pred
            + p.a2 + p.b2 * b.prey + 2 * p.c2 * b.pred)


# -- stable_dt ----------------------------------------------------------------


def test_stable_dt_p2():
    g = generate("path", 2)
    u0 = VertexField.constant(g, 1.0)
    b = bounds(BASE, u0, u0)
    r = reaction_rate_bound(BASE, b)
    assert stable_dt(g, BASE, b, 0.5) == pytest.approx(0.5 / (2.0 + r), rel=1e-15)


def test_stable_dt_complete_graph_degree():
    for n in (3, 5, 8):
        g = generate("complete", n)
        u0 = VertexField.constant(g, 1.0)
        b = bounds(BASE, u0, u0)
        r = reaction_rate_bound(BASE, b)
        expected = 0.5 / (2.0 * (n - 1) + r)
        assert stable_dt(g, BASE, b, 0.5) == pytest.approx(expected, rel=1e-15)


def test_stable_dt_measure_scaling_halves_lambda():
    g1 = generate("path", 2, measure=1.0)
    g2 = generate("path", 2, measure=2.0)
    u0 = VertexField.constant(g1, 1.0)
    b = bounds(BASE, u0, u0)
    r = reaction_rate_bound(BASE, b)
    assert stable_dt(g2, BASE, b, 0.5) == pytest.approx(0.5 / (1.0 + r), rel=1e-15)
    assert stable_dt(g1, BASE, b, 0.5) == pytest.approx(0.5 / (2.0 + r), rel=1e-15)


def test_stable_dt_rejects_bad_safety():
    g = generate("path", 2)
    u0 = VertexField.constant(g, 1.0)
    b = bounds(BASE, u0, u0)
    with pytest.raises(ValueError, match="safety"):
        stable_dt(g, BASE, b, 0.0)
    with pytest.raises(ValueError, match="safety"):
        stable_dt(g, BASE, b, 1.5)


# -- Neumann enforcement --------------------------------------------------------


def test_enforce_neumann_p3():
    s = induce_bounded_subgraph(generate("path", 3), ["1", "2"])
    f = VertexField.from_dict(s, {"1": 0.0, "2": 1.0, "3": 7.0})
    out = enforce_neumann(s, f)
    assert out.as_dict() == {"1": 0.0, "2": 1.0, "3": 1.0}
    assert normal_derivative(s, out, "3") == 0.0


def test_enforce_neumann_idempotent():
    s = induce_bounded_subgraph(generate("grid", rows=3, cols=3), ["r2c2", "r1c2"])
    rng = np.random.default_rng(31)
    f = VertexField(s, rng.uniform(0, 3, len(s.vertices)))
    once = enforce_neumann(s, f)
    twice = enforce_neumann(s, once)
    assert np.array_equal(once.values, twice.values)


def test_enforce_neumann_weighted_average():
    # boundary z with interior neighbors 1 (w=1, u=4) and 2 (w=3, u=0)
    g = WeightedGraph(
        ["1", "2", "z"], {"1": 1.0, "2": 1.0, "z": 1.0},
        [("1", "2", 1.0), ("1", "z", 1.0), ("2", "z", 3.0)],
    )
    s = induce_bounded_subgraph(g, ["1", "2"])
    f = VertexField.from_dict(s, {"1": 4.0, "2": 0.0, "z": -5.0})
    out = enforce_neumann(s, f)
    assert out["z"] == pytest.approx(1.0)
    assert abs(normal_derivative(s, out, "z")) <= 1e-14


# -- single steps ----------------------------------------------------------------


def test_euler_diffusion_step_by_hand():
    g = generate("path", 2)
    state = State(0.0, VertexField(g, [0.0, 2.0]), VertexField.constant(g, 0.0))
    out = step(g, BASE, state, dt=0.1, method="euler", reaction_enabled=False)
    assert out.prey.as_dict() == {"1": pytest.approx(0.2), "2": pytest.approx(1.8)}
    assert out.t == pytest.approx(0.1)


def test_rk4_mass_conservation_single_step():
    rng = np.random.default_rng(32)
    g = WeightedGraph(
        ["a", "b", "c", "d"],
        {"a": 1.0, "b": 2.0, "c": 0.5, "d": 1.5},
        [("a", "b", 1.0), ("b", "c", 2.0), ("c", "d", 0.7), ("a", "c", 1.3)],
    )
    u = VertexField(g, rng.uniform(0, 3, 4))
    state = State(0.0, u, VertexField(g, rng.uniform(0, 3, 4)))
    mass0 = float(np.dot(g.mu, state.prey.values))
    out = step(g, BASE, state, dt=0.05, method="rk4", reaction_enabled=False)
    mass1 = float(np.dot(g.mu, out.prey.values))
    assert abs(mass1 - mass0) <= 1e-13 * abs(mass0)


def test_equilibrium_is_fixed_point_of_step():
    g = generate("cycle", 6)
    eq = equilibrium(BASE)
    state = State(0.0, VertexField.constant(g, eq.e), VertexField.constant(g, eq.g))
    for method in ("euler", "rk4"):
        out = step(g, BASE, state, dt=0.01, method=method)
        assert np.abs(out.prey.values - eq.e).max() <= 1e-15
        assert np.abs(out.predator.values - eq.g).max() <= 1e-15


def test_step_neumann_enforces_boundary_each_step():
    s = induce_bounded_subgraph(generate("path", 3), ["1", "2"])
    # initial data violating the boundary condition is accepted and projected
    state = State(0.0,
                  VertexField.from_dict(s, {"1": 1.0, "2": 2.0, "3": 9.0}),
                  VertexField.from_dict(s, {"1": 1.0, "2": 1.0, "3": -3.0}))
    for method in ("euler", "rk4"):
        out = step(s, BASE, state, dt=0.01, method=method)
        sup = max(abs(out.prey.values).max(), abs(out.predator.values).max())
        for z in s.boundary:
            assert abs(normal_derivative(s, out.prey, z)) <= 1e-12 * (1 + sup)
            assert abs(normal_derivative(s, out.predator, z)) <= 1e-12 * (1 + sup)


def test_step_nonfinite_detection():
    g = generate("path", 2)
    state = State(0.0, VertexField(g, [1e300, 0.0]), VertexField.constant(g, 1.0))
    with pytest.raises(NonFiniteError, match="prey"):
        step(g, BASE, state, dt=1e300, method="euler")


def test_state_rejects_nan():
    g = generate("path", 2)
    with pytest.raises(NonFiniteError, match="vertex '1'"):
        State(0.0, VertexField(g, [float("nan"), 0.0]), VertexField.constant(g, 1.0))


def test_state_rejects_mismatched_domains():
    g = generate("path", 2)
    h = generate("path", 3)
    with pytest.raises(ValueError, match="different domains"):
        State(0.0, VertexField.constant(g, 1.0), VertexField.constant(h, 1.0))


# -- simulate -------------------------------------------------------------------


def test_simulate_converges_on_cycle10():
    g = generate("cycle", 10)
    cfg = SolverConfig(method="rk4", dt="auto", t_end=500.0,
                       convergence_tol=1e-6, record_every=10)
    ic = VertexField.constant(g, 1.0)
    result = simulate(g, BASE, ic, ic, cfg)
    eq = equilibrium(BASE)
    assert result.stop == "converged"
    assert np.abs(result.final.prey.values - eq.e).max() <= 1e-6
    assert np.abs(result.final.predator.values - eq.g).max() <= 1e-6
    assert result.final.t < 500.0


def test_simulate_zero_initial_data_stays_at_origin():
    g = generate("path", 4)
    cfg = SolverConfig(method="euler", dt=0.01, t_end=1.0, convergence_tol=0.0)
    zero = VertexField.constant(g, 0.0)
    result = simulate(g, BASE, zero, zero, cfg)
    assert result.stop == "t_end"
    assert np.array_equal(result.final.prey.values, np.zeros(4))
    assert np.array_equal(result.final.predator.values, np.zeros(4))


def test_simulate_rejects_negative_initial_data():
    g = generate("path", 3)
    cfg = SolverConfig(t_end=1.0)
    bad = VertexField(g, [0.0, -1.0, 0.0])
    ok = VertexField.constant(g, 1.0)
    with pytest.raises(ValueError, match="nonnegative"):
        simulate(g, BASE, bad, ok, cfg)


def test_simulate_convergence_stop_requires_coexistence():
    g = generate("path", 3)
    p = LVParams(d1=1, d2=1, a1=1, b1=1, c1=2, a2=1, b2=1, c2=1)
    cfg = SolverConfig(convergence_tol=1e-6, t_end=10.0)
    ic = VertexField.constant(g, 1.0)
    with pytest.raises(ValueError, match="a1/c1 > a2/c2"):
        simulate(g, p, ic, ic, cfg)


def test_simulate_convergence_stop_requires_nontrivial_data():
    g = generate("path", 3)
    cfg = SolverConfig(convergence_tol=1e-6, t_end=10.0)
    zero = VertexField.constant(g, 0.0)
    one = VertexField.constant(g, 1.0)
    with pytest.raises(ValueError, match="nontrivial initial prey"):
        simulate(g, BASE, zero, one, cfg)
    with pytest.raises(ValueError, match="nontrivial initial predator"):
        simulate(g, BASE, one, zero, cfg)


def test_simulate_records_at_requested_stride():
    g = generate("path", 3)
    cfg = SolverConfig(method="euler", dt=0.1, t_end=1.0, record_every=3)
    ic = VertexField.constant(g, 1.0)
    col = TrajectoryCollector()
    result = simulate(g, BASE, ic, ic, cfg, sinks=[col])
    assert result.steps == 10
    # t=0, steps 3, 6, 9, and the final step 10
    times = [rec.t for rec in col.records]
    assert times == pytest.approx([0.0, 0.3, 0.6, 0.9, 1.0])


def test_simulate_sink_sees_states_and_records():
    g = generate("path", 3)
    cfg = SolverConfig(method="rk4", dt=0.05, t_end=0.2, record_every=1)
    ic = VertexField.constant(g, 1.0)
    col = TrajectoryCollector()
    simulate(g, BASE, ic, ic, cfg, sinks=[col])
    assert len(col.states) == len(col.records) == 5
    assert col.states[0].t == 0.0
    assert col.records[-1].t == pytest.approx(0.2)


def test_simulate_neumann_converges_and_keeps_flux_zero():
    s = induce_bounded_subgraph(generate("path", 3), ["1", "2"])
    cfg = SolverConfig(method="rk4", dt="auto", t_end=500.0,
                       convergence_tol=1e-6, record_every=5)
    ic = VertexField.constant(s, 1.0)
    col = TrajectoryCollector()
    result = simulate(s, BASE, ic, ic, cfg, sinks=[col])
    eq = equilibrium(BASE)
    assert result.stop == "converged"
    assert np.abs(result.final.prey.values - eq.e).max() <= 1e-6
    for rec in col.records:
        if rec.t > 0:
            sup = max(abs(rec.prey_min), abs(rec.prey_max),
                      abs(rec.pred_min), abs(rec.pred_max))
            assert rec.neumann_residual <= 1e-12 * (1 + sup)


def test_simulate_reaction_disabled_preserves_mass():
    g = generate("cycle", 8)
    rng = np.random.default_rng(33)
    u0 = VertexField(g, rng.uniform(0, 3, 8))
    v0 = VertexField(g, rng.uniform(0, 3, 8))
    cfg = SolverConfig(method="rk4", dt=0.01, t_end=5.0, record_every=100)
    result = simulate(g, BASE, u0, v0, cfg, reaction_enabled=False)
    mass0 = float(np.dot(g.mu, u0.values))
    mass1 = float(np.dot(g.mu, result.final.prey.values))
    assert abs(mass1 - mass0) <= 1e-12 * mass0


def test_steady_state_residual_at_convergence():
    # at a converged state the elliptic residual is within 10x the stop tolerance
    tol = 1e-6
    for domain in (generate("cycle", 10),
                   induce_bounded_subgraph(generate("path", 3), ["1", "2"])):
        cfg = SolverConfig(method="rk4", dt="auto", t_end=500.0,
                           convergence_tol=tol, record_every=50)
        ic = VertexField.constant(domain, 1.0)
        result = simulate(domain, BASE, ic, ic, cfg)
        assert result.stop == "converged"
        u, v = result.final.prey, result.final.predator
        ru, rv = reaction(BASE, u.values, v.values)
        res_u = BASE.d1 * laplacian(domain, u).values + ru
        res_v = BASE.d2 * laplacian(domain, v).values + rv
        if hasattr(domain, "interior_count"):
            res_u = res_u[: domain.interior_count]
            res_v = res_v[: domain.interior_count]
        assert np.abs(res_u).max() <= 10 * tol
        assert np.abs(res_v).max() <= 10 * tol


def test_simulate_overshoots_to_t_end():
    g = generate("path", 2)
    cfg = SolverConfig(method="euler", dt=0.4, t_end=1.0, record_every=1000)
    ic = VertexField.constant(g, 1.0)
    result = simulate(g, BASE, ic, ic, cfg)
    assert result.steps == 3
    assert result.final.t == pytest.approx(1.2)


def test_config_validation():
    with pytest.raises(ValueError, match="method"):
        SolverConfig(method="rk9")
    with pytest.raises(ValueError, match="dt"):
        SolverConfig(dt=0.0)
    with pytest.raises(ValueError, match="t_end"):
        SolverConfig(t_end=-1.0)
    with pytest.raises(ValueError, match="record_every"):
        SolverConfig(record_every=0)
    with pytest.raises(ValueError, match="safety"):
        SolverConfig(safety=2.0)
    with pytest.raises(ValueError, match="convergence_tol"):
        SolverConfig(convergence_tol=-1e-6)
