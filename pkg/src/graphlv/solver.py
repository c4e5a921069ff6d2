"""Explicit time integration of the prey-predator systems.

Two modes share one engine: on a full graph the right-hand side

    du/dt = d1*Lap(u) + u*(a1 - b1*u - c1*v)
    dv/dt = d2*Lap(v) + v*(a2 + b2*u - c2*v)

is evaluated at every vertex; on a bounded subgraph it is evaluated at
interior vertices only, and before every right-hand-side evaluation (every
Runge-Kutta stage) each boundary value is replaced by the weighted average
of its interior neighbors, the unique value that zeroes the outward normal
derivative there.  The supported schemes are explicit Euler and classical
four-stage Runge-Kutta with a fixed step size; ``stable_dt`` provides a
conservative step bound from the Laplacian norm and a reaction Lipschitz
constant on the invariant box.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import model
from .graph import BoundedSubgraph, VertexField, WeightedGraph
from .model import Bounds, LVParams

__all__ = [
    "State",
    "SolverConfig",
    "SimulationResult",
    "NonFiniteError",
    "InvariantViolation",
    "stable_dt",
    "enforce_neumann",
    "step",
    "simulate",
]

METHODS = ("euler", "rk4")

STOP_T_END = "t_end"
STOP_CONVERGED = "converged"
STOP_FAILURE = "failure"  # used by callers recording a run that raised


class NonFiniteError(RuntimeError):
    """A NaN or infinity appeared in a state; integration cannot continue."""


class InvariantViolation(RuntimeError):
    """Raised by fail-fast monitors when a recorded state breaks a bound."""


@dataclass(frozen=True)
class State:
    """Both species' densities at one instant, on a shared domain."""

    t: float
    prey: VertexField
    predator: VertexField

    def __post_init__(self):
        if self.prey.domain is not self.predator.domain and (
            self.prey.domain.vertices != self.predator.domain.vertices
        ):
            raise ValueError("prey and predator fields live on different domains")
        for name, f in (("prey", self.prey), ("predator", self.predator)):
            if not np.isfinite(f.values).all():
                i = int(np.flatnonzero(~np.isfinite(f.values))[0])
                raise NonFiniteError(
                    f"non-finite {name} value at vertex "
                    f"{f.domain.vertices[i]!r} at t={self.t!r}"
                )

    @property
    def domain(self):
        return self.prey.domain


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping parameters.

    ``dt`` is a positive step or ``"auto"`` (the stability bound scaled by
    ``safety``).  ``convergence_tol`` > 0 stops the run once the sup-norm
    distance to the coexistence equilibrium drops below it; 0 disables the
    early stop.  A diagnostics record is emitted at t=0, every
    ``record_every`` steps, and at the final step.
    """

    method: str = "rk4"
    dt: float | str = "auto"
    t_end: float = 100.0
    convergence_tol: float = 0.0
    record_every: int = 1
    safety: float = 0.5

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS} (got {self.method!r})")
        if self.dt != "auto":
            if not (float(self.dt) > 0.0):
                raise ValueError(f"dt must be positive or 'auto' (got {self.dt!r})")
            object.__setattr__(self, "dt", float(self.dt))
        if not (self.t_end > 0.0):
            raise ValueError(f"t_end must be positive (got {self.t_end!r})")
        if self.convergence_tol < 0.0:
            raise ValueError(f"convergence_tol must be nonnegative (got {self.convergence_tol!r})")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError(f"record_every must be a positive integer (got {self.record_every!r})")
        if not (0.0 < self.safety <= 1.0):
            raise ValueError(f"safety must lie in (0, 1] (got {self.safety!r})")


@dataclass(frozen=True)
class SimulationResult:
    final: State
    steps: int
    stop: str
    dt: float


def _graph_of(domain) -> WeightedGraph:
    return domain.closure if isinstance(domain, BoundedSubgraph) else domain


def stable_dt(domain, p: LVParams, b: Bounds, safety: float) -> float:
    """Step-size bound safety / (2*max(d1,d2)*Lam + R) where Lam bounds the
    Laplacian norm (max over x of weighted degree / mu) and R is a Lipschitz
    bound for the reaction on the invariant box."""
    if not (0.0 < safety <= 1.0):
        raise ValueError(f"safety must lie in (0, 1] (got {safety!r})")
    g = _graph_of(domain)
    lam = float((g.weighted_degree / g.mu).max())
    r = (p.a1 + 2.0 * p.b1 * b.prey + p.c1 * b.pred
         + p.a2 + p.b2 * b.prey + 2.0 * p.c2 * b.pred)
    return safety / (2.0 * max(p.d1, p.d2) * lam + r)


def enforce_neumann(s: BoundedSubgraph, field: VertexField) -> VertexField:
    """Replace each boundary value by the weighted average of its interior
    neighbors, making the outward normal derivative exactly zero there;
    interior values are unchanged."""
    values = field.values.copy()
    values[s.interior_count:] = s.boundary_average @ values[: s.interior_count]
    return VertexField(s, values)


class _Engine:
    """Precomputed arrays for fast repeated stepping on one domain."""

    def __init__(self, domain, p: LVParams, method: str, reaction_enabled: bool = True):
        g = _graph_of(domain)
        self.domain = domain
        self.p = p
        self.method = method
        self.reaction_enabled = reaction_enabled
        self.n = g.n
        self.mu = g.mu
        self.tail = g.edge_tail
        self.head = g.edge_head
        self.w = g.edge_weight
        self.neumann = isinstance(domain, BoundedSubgraph)
        if self.neumann:
            self.ni = domain.interior_count
            self.avg = domain.boundary_average
        else:
            self.ni = g.n
            self.avg = None

    def _lap(self, x: np.ndarray) -> np.ndarray:
        flux = self.w * (x[self.head] - x[self.tail])
        out = np.bincount(self.tail, weights=flux, minlength=self.n)
        out -= np.bincount(self.head, weights=flux, minlength=self.n)
        out /= self.mu
        return out

    def _rhs(self, u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        du = self.p.d1 * self._lap(u)
        dv = self.p.d2 * self._lap(v)
        if self.reaction_enabled:
            ru, rv = model.reaction(self.p, u, v)
            du += ru
            dv += rv
        return du, dv

    def _project(self, u: np.ndarray, v: np.ndarray) -> None:
        if self.neumann:
            u[self.ni:] = self.avg @ u[: self.ni]
            v[self.ni:] = self.avg @ v[: self.ni]

    def _advanced(self, u0, v0, du, dv, h):
        # interior update only in Neumann mode; boundary is set by projection
        u = u0.copy()
        v = v0.copy()
        u[: self.ni] += h * du[: self.ni]
        v[: self.ni] += h * dv[: self.ni]
        self._project(u, v)
        return u, v

    def step(self, u: np.ndarray, v: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
        # divergence is reported through NonFiniteError by the caller, so
        # let overflow produce inf/nan silently here
        with np.errstate(over="ignore", invalid="ignore"):
            u0 = u.copy()
            v0 = v.copy()
            self._project(u0, v0)
            k1u, k1v = self._rhs(u0, v0)
            if self.method == "euler":
                return self._advanced(u0, v0, k1u, k1v, dt)
            ua, va = self._advanced(u0, v0, k1u, k1v, 0.5 * dt)
            k2u, k2v = self._rhs(ua, va)
            ub, vb = self._advanced(u0, v0, k2u, k2v, 0.5 * dt)
            k3u, k3v = self._rhs(ub, vb)
            uc, vc = self._advanced(u0, v0, k3u, k3v, dt)
            k4u, k4v = self._rhs(uc, vc)
            return self._advanced(
                u0, v0,
                k1u + 2.0 * k2u + 2.0 * k3u + k4u,
                k1v + 2.0 * k2v + 2.0 * k3v + k4v,
                dt / 6.0,
            )


def _check_finite(domain, u: np.ndarray, v: np.ndarray, t: float) -> None:
    for name, arr in (("prey", u), ("predator", v)):
        if not np.isfinite(arr).all():
            i = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise NonFiniteError(
                f"non-finite {name} value at vertex {domain.vertices[i]!r} at t={t!r}"
            )


def step(domain, p: LVParams, state: State, dt: float, method: str = "rk4",
         *, reaction_enabled: bool = True) -> State:
    """Advance a state by one explicit step of the chosen scheme."""
    if not (dt > 0.0):
        raise ValueError(f"dt must be positive (got {dt!r})")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS} (got {method!r})")
    eng = _Engine(domain, p, method, reaction_enabled)
    u, v = eng.step(state.prey.values, state.predator.values, dt)
    t = state.t + dt
    _check_finite(domain, u, v, t)
    return State(t=t, prey=VertexField(domain, u), predator=VertexField(domain, v))


def simulate(domain, p: LVParams, u0: VertexField, v0: VertexField,
             cfg: SolverConfig, sinks: Sequence[Callable] = (),
             *, reaction_enabled: bool = True) -> SimulationResult:
    """Integrate from (u0, v0) until t_end or until the state is within
    ``convergence_tol`` of the coexistence equilibrium in sup norm.

    Each sink is called as ``sink(state, record)`` at t=0, every
    ``record_every`` steps, and at the final step.  Exceptions raised by
    sinks (fail-fast monitors) propagate, as do non-finite state errors.
    """
    from .diagnostics import record as make_record  # deferred: diagnostics drives this module

    if u0.values.min() < 0.0 or v0.values.min() < 0.0:
        raise ValueError("initial data must be nonnegative")
    tol = cfg.convergence_tol
    if tol > 0.0:
        if not model.coexistence_holds(p):
            raise ValueError(
                "convergence stopping requires the coexistence condition "
                f"a1/c1 > a2/c2, but a1*c2 = {p.a1 * p.c2!r} <= a2*c1 = {p.a2 * p.c1!r}"
            )
        if not u0.values.any():
            raise ValueError("convergence stopping requires nontrivial initial prey data")
        if not v0.values.any():
            raise ValueError("convergence stopping requires nontrivial initial predator data")

    eq = model.equilibrium(p) if model.coexistence_holds(p) else None
    b = model.bounds(p, u0, v0)
    dt = stable_dt(domain, p, b, cfg.safety) if cfg.dt == "auto" else float(cfg.dt)
    eng = _Engine(domain, p, cfg.method, reaction_enabled)

    u = u0.values.copy()
    v = v0.values.copy()

    def emit(t, u, v):
        state = State(t=t, prey=VertexField(domain, u), predator=VertexField(domain, v))
        rec = make_record(domain, p, eq, state)
        for sink in sinks:
            sink(state, rec)
        return state

    state = emit(0.0, u, v)
    steps = 0
    stop = STOP_T_END
    while True:
        u, v = eng.step(u, v, dt)
        steps += 1
        t = steps * dt
        _check_finite(domain, u, v, t)
        converged = False
        if tol > 0.0 and eq is not None:
            dist = (np.abs(u - eq.e).max() + np.abs(v - eq.g).max())
            converged = bool(dist <= tol)
        final = converged or t >= cfg.t_end
        if final or steps % cfg.record_every == 0:
            state = emit(t, u, v)
        if final:
            stop = STOP_CONVERGED if converged else STOP_T_END
            break
    return SimulationResult(final=state, steps=steps, stop=stop, dt=dt)
