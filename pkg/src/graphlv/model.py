"""Lotka-Volterra reaction terms, coexistence equilibrium, a-priori bounds,
and the entropy-like functionals used to certify stability.

The reaction is u*(a1 - b1*u - c1*v) for the prey and v*(a2 + b2*u - c2*v)
for the predator.  When a1/c1 > a2/c2 the unique positive constant steady
state is

    e = (a1*c2 - c1*a2) / (b1*c2 + c1*b2),
    g = (b1*a2 + a1*b2) / (b1*c2 + c1*b2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import VertexField

__all__ = [
    "LVParams",
    "Equilibrium",
    "Bounds",
    "coexistence_holds",
    "equilibrium",
    "bounds",
    "reaction",
    "lyapunov_density",
    "lyapunov_functional",
    "dissipation_identity_residual",
    "f_functional",
]

_PARAM_NAMES = ("d1", "d2", "a1", "b1", "c1", "a2", "b2", "c2")


@dataclass(frozen=True)
class LVParams:
    """The eight positive model constants: diffusion rates d1, d2; growth
    rates a1, a2; self-limitation b1 (prey), c2 (predator); predation c1;
    conversion b2."""

    d1: float
    d2: float
    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    c2: float

    def __post_init__(self):
        for name in _PARAM_NAMES:
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be a positive finite number (got {value!r})")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class Equilibrium:
    """The positive constant steady state (e, g)."""

    e: float
    g: float


@dataclass(frozen=True)
class Bounds:
    """Componentwise upper bounds of the invariant box [0, prey] x [0, pred]."""

    prey: float
    pred: float


def coexistence_holds(p: LVParams) -> bool:
    """True iff a1/c1 > a2/c2, evaluated as a1*c2 > a2*c1 so the equality
    boundary is exact."""
    return p.a1 * p.c2 > p.a2 * p.c1


def equilibrium(p: LVParams) -> Equilibrium:
    """The unique positive constant steady state; requires coexistence."""
    if not coexistence_holds(p):
        raise ValueError(
            "coexistence condition a1/c1 > a2/c2 is violated: "
            f"a1*c2 = {p.a1 * p.c2!r} <= a2*c1 = {p.a2 * p.c1!r}"
        )
    den = p.b1 * p.c2 + p.c1 * p.b2
    return Equilibrium(e=(p.a1 * p.c2 - p.c1 * p.a2) / den,
                       g=(p.b1 * p.a2 + p.a1 * p.b2) / den)


def bounds(p: LVParams, u0: VertexField, v0: VertexField) -> Bounds:
    """Upper bounds of the invariant region for the given initial data:
    prey <= max(max u0, a1/b1), pred <= max((a2 + b2*prey)/c2, max v0)."""
    for name, f in (("prey", u0), ("predator", v0)):
        if f.values.min() < 0.0:
            i = int(np.argmin(f.values))
            raise ValueError(
                f"negative initial {name} value {float(f.values[i])!r} "
                f"at vertex {f.domain.vertices[i]!r}"
            )
    m_prey = max(u0.max(), p.a1 / p.b1)
    m_pred = max((p.a2 + p.b2 * m_prey) / p.c2, v0.max())
    return Bounds(prey=m_prey, pred=m_pred)


def reaction(p: LVParams, u, v):
    """Reaction terms (u*(a1 - b1*u - c1*v), v*(a2 + b2*u - c2*v)).

    Accepts scalars or numpy arrays.
    """
    return u * (p.a1 - p.b1 * u - p.c1 * v), v * (p.a2 + p.b2 * u - p.c2 * v)


def _require_positive_pair(u, v):
    if np.any(np.asarray(u) <= 0.0) or np.any(np.asarray(v) <= 0.0):
        raise ValueError("the entropy density is defined only for positive densities")


def lyapunov_density(p: LVParams, eq: Equilibrium, u, v):
    """Convex entropy-like density

        E(u, v) = b2*u - b2*e*ln(u/(b2*e)) + c1*v - c1*g*ln(v/(c1*g)),

    minimized exactly at (e, g).  Accepts scalars or arrays; all densities
    must be strictly positive.
    """
    _require_positive_pair(u, v)
    b2e = p.b2 * eq.e
    c1g = p.c1 * eq.g
    return (p.b2 * u - b2e * np.log(u / b2e)
            + p.c1 * v - c1g * np.log(v / c1g))


def lyapunov_functional(domain, p: LVParams, eq: Equilibrium,
                        u: VertexField, v: VertexField) -> float:
    """Integral of the entropy density over the domain; nonincreasing along
    solutions of either parabolic system."""
    for name, f in (("prey", u), ("predator", v)):
        if f.values.min() <= 0.0:
            i = int(np.argmin(f.values))
            raise ValueError(
                f"{name} value {float(f.values[i])!r} at vertex "
                f"{f.domain.vertices[i]!r} is not positive"
            )
    density = lyapunov_density(p, eq, u.values, v.values)
    mu = domain.mu
    return float(np.dot(mu, density))


def dissipation_identity_residual(p: LVParams, eq: Equilibrium, u, v):
    """Residual of the algebraic identity behind the entropy dissipation:

        b2*(1 - e/u)*u*(a1 - b1*u - c1*v)
          + c1*(1 - g/v)*v*(a2 + b2*u - c2*v)
          + b1*b2*(u - e)^2 + c1*c2*(v - g)^2  ==  0.

    Accepts scalars or arrays of positive densities.
    """
    _require_positive_pair(u, v)
    ru, rv = reaction(p, u, v)
    transport = p.b2 * (1.0 - eq.e / u) * ru + p.c1 * (1.0 - eq.g / v) * rv
    quadratic = p.b1 * p.b2 * (u - eq.e) ** 2 + p.c1 * p.c2 * (v - eq.g) ** 2
    return transport + quadratic


def f_functional(domain, field: VertexField, target: float) -> float:
    """Measure-weighted squared distance of a field from a constant:
    integral of (field - target)^2 dmu."""
    diff = field.values - float(target)
    return float(np.dot(domain.mu, diff * diff))
