"""Model problem  -eps1 u'' + eps2 b u' + c u = f  on (0, 1),  u(0) = u(1) = 0.

Holds problem instances, checks the positivity assumptions on the data,
computes the layer parameters mu0 <= mu1 that drive the mesh, and provides
the closed-form solution for constant coefficients.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "AssumptionViolation",
    "Coefficient",
    "ProblemSpec",
    "DataConstants",
    "Regime",
    "LayerParameters",
    "ClosedFormSolution",
    "validate_assumptions",
    "compute_layer_parameters",
    "classify_regime",
    "constant_coefficient_exact",
    "get_problem",
    "PROBLEMS",
]


class AssumptionViolation(ValueError):
    """The data violate b >= beta > 0, c >= gamma > 0 or c - eps2 b'/2 >= rho > 0."""


@dataclass(frozen=True)
class Coefficient:
    """A coefficient function on [0, 1] together with its first derivative.

    Both callables must accept numpy arrays.  ``constant`` is set for
    constant coefficients, which enables the closed-form solution.
    """

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    constant: float | None = None

    @classmethod
    def const(cls, v: float) -> "Coefficient":
        v = float(v)
        return cls(lambda x: np.full(np.shape(x), v),
                   lambda x: np.zeros(np.shape(x)), constant=v)

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))

    def d(self, x):
        return self.derivative(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ProblemSpec:
    eps1: float
    eps2: float
    b: Coefficient
    c: Coefficient
    f: Coefficient
    name: str = "custom"
    # registry problems only warn on violated data assumptions
    advisory: bool = field(default=False, compare=False)

    def __post_init__(self):
        e1, e2 = self.eps1, self.eps2
        if not (0.0 < e1 <= 1.0 and 0.0 < e2 <= 1.0):
            raise ValueError(f"need 0 < eps1, eps2 <= 1, got eps1={e1!r}, eps2={e2!r}")
        if e1 > e2:
            raise ValueError(f"need eps1 <= eps2, got eps1={e1!r} > eps2={e2!r}")

    def with_eps(self, eps1: float, eps2: float) -> "ProblemSpec":
        return ProblemSpec(eps1, eps2, self.b, self.c, self.f, self.name, self.advisory)

    @property
    def is_constant(self) -> bool:
        return all(k.constant is not None for k in (self.b, self.c, self.f))


@dataclass(frozen=True)
class DataConstants:
    beta: float
    gamma: float
    rho: float
    sample_count: int


def _sample(problem: ProblemSpec, sample_count: int):
    x = np.linspace(0.0, 1.0, sample_count)
    b = problem.b(x)
    c = problem.c(x)
    db = problem.b.d(x)
    for name, v in (("b", b), ("c", c), ("b'", db)):
        bad = ~np.isfinite(v)
        if bad.any():
            raise ValueError(f"coefficient {name} is not finite at x={x[bad][0]!r}")
    return x, b, c, db


def validate_assumptions(problem: ProblemSpec, sample_count: int = 1024,
                         strict: bool | None = None) -> DataConstants:
    """Estimate beta, gamma, rho by sampling and check they are positive.

    With ``strict`` (default: ``not problem.advisory``) a violation raises
    :class:`AssumptionViolation`; otherwise a warning is issued and the
    estimated constants are still returned.
    """
    if sample_count < 2:
        raise ValueError("sample_count must be >= 2")
    if strict is None:
        strict = not problem.advisory
    x, b, c, db = _sample(problem, sample_count)
    r = c - 0.5 * problem.eps2 * db
    consts = DataConstants(float(b.min()), float(c.min()), float(r.min()), sample_count)
    for label, v in (("b(x) >= beta > 0", b), ("c(x) >= gamma > 0", c),
                     ("c(x) - eps2/2 b'(x) >= rho > 0", r)):
        i = int(np.argmin(v))
        if v[i] <= 0.0:
            msg = (f"{problem.name}: assumption {label} violated at x={x[i]:.6g} "
                   f"(value {v[i]:.6g})")
            if strict:
                raise AssumptionViolation(msg)
            warnings.warn(msg, stacklevel=2)
    return consts


class Regime(enum.Enum):
    CONVECTION_DIFFUSION = "convection-diffusion"
    CONVECTION_REACTION_DIFFUSION = "convection-reaction-diffusion"
    BALANCED = "eps1~eps2^2"
    REACTION_DIFFUSION = "reaction-diffusion"


def classify_regime(eps1: float, eps2: float) -> tuple[Regime, float]:
    """Classify by r = eps1/eps2**2 (reporting only, thresholds 0.1 and 10).

    eps2 == 1 with r < 0.1 is reported as convection-diffusion.
    """
    if not (0.0 < eps1 <= eps2 <= 1.0):
        raise ValueError(f"need 0 < eps1 <= eps2 <= 1, got ({eps1!r}, {eps2!r})")
    r = eps1 / eps2**2
    if r < 0.1:
        regime = Regime.CONVECTION_DIFFUSION if eps2 == 1.0 else Regime.CONVECTION_REACTION_DIFFUSION
    elif r > 10.0:
        regime = Regime.REACTION_DIFFUSION
    else:
        regime = Regime.BALANCED
    return regime, r


@dataclass(frozen=True)
class LayerParameters:
    mu0: float
    mu1: float
    x_mu0: float
    x_mu1: float
    regime: Regime
    ratio: float
    degenerate: bool = False


def _mu0_form(e1, e2, b, c):
    # rationalised -lambda0; no cancellation when eps1 << eps2^2
    return 2.0 * c / (e2 * b + np.sqrt((e2 * b) ** 2 + 4.0 * e1 * c))


def _mu1_form(e1, e2, b, c):
    return (e2 * b + np.sqrt((e2 * b) ** 2 + 4.0 * e1 * c)) / (2.0 * e1)


def _golden_min(g, a, b, rtol=1e-10, maxiter=200):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    g1, g2 = g(x1), g(x2)
    for _ in range(maxiter):
        if b - a <= rtol * max(abs(a), abs(b), 1e-300):
            break
        if g1 <= g2:
            b, x2, g2 = x2, x1, g1
            x1 = b - invphi * (b - a)
            g1 = g(x1)
        else:
            a, x1, g1 = x1, x2, g2
            x2 = a + invphi * (b - a)
            g2 = g(x2)
    return (x1, g1) if g1 <= g2 else (x2, g2)


def _minimise(g, x, vals):
    i = int(np.argmin(vals))
    best_x, best = float(x[i]), float(vals[i])
    lo, hi = x[max(i - 1, 0)], x[min(i + 1, len(x) - 1)]
    if hi > lo:
        xs, gs = _golden_min(lambda t: float(g(np.array(t))), float(lo), float(hi))
        if gs < best:
            best_x, best = xs, gs
    return best, best_x


def _local_scale(g, half=0.5):
    """Root of g(d) = d * rate(d) - 1 on (0, half]; 1/half if there is none."""
    if g(half) <= 0.0:
        return 1.0 / half
    return 1.0 / brentq(g, 1e-300, half, xtol=1e-300, rtol=1e-12)


def compute_layer_parameters(problem: ProblemSpec, sample_count: int = 1024) -> LayerParameters:
    """mu0 = min of -lambda0(x), mu1 = min of lambda1(x) over [0, 1].

    Dense sampling followed by golden-section refinement around the best
    sample.  If c vanishes somewhere the minima degenerate (mu0 = 0); the
    layer widths d0, d1 are then taken self-consistently from the roots at
    the layer itself, d0 * (-lambda0(d0)) = 1 and d1 * lambda1(1 - d1) = 1,
    and ``degenerate`` is set.
    """
    if sample_count < 2:
        raise ValueError("sample_count must be >= 2")
    e1, e2 = problem.eps1, problem.eps2
    x, b, c, _ = _sample(problem, sample_count)
    disc = (e2 * b) ** 2 + 4.0 * e1 * c
    if (disc < 0).any():
        i = int(np.argmax(disc < 0))
        raise ValueError(f"negative discriminant at x={x[i]:.6g}: data violate c >= 0")

    def g0(t):
        return _mu0_form(e1, e2, problem.b(t), problem.c(t))

    def g1(t):
        return _mu1_form(e1, e2, problem.b(t), problem.c(t))

    regime, ratio = classify_regime(e1, e2)
    if c.min() <= 0.0:
        warnings.warn(f"{problem.name}: c vanishes on [0, 1]; using local layer scales",
                      stacklevel=2)
        mu0 = _local_scale(lambda d: d * float(g0(np.array(d))) - 1.0)
        mu1 = _local_scale(lambda d: d * float(g1(np.array(1.0 - d))) - 1.0)
        return LayerParameters(mu0, max(mu0, mu1), 1.0 / mu0, 1.0 - 1.0 / mu1,
                               regime, ratio, degenerate=True)
    mu0, x0 = _minimise(g0, x, _mu0_form(e1, e2, b, c))
    mu1, x1 = _minimise(g1, x, _mu1_form(e1, e2, b, c))
    if not (math.isfinite(mu0) and math.isfinite(mu1)) or mu0 <= 0 or mu1 <= 0:
        raise ValueError(f"layer parameters not finite/positive: mu0={mu0}, mu1={mu1}")
    return LayerParameters(mu0, mu1, x0, x1, regime, ratio)


@dataclass(frozen=True)
class ClosedFormSolution:
    """u(x) = f/c + A exp(lambda0 x) + B' exp(lambda1 (x - 1)).

    Every exponent is <= 0 on [0, 1], so nothing overflows.
    """

    lambda0: float
    lambda1: float
    A: float
    B_shift: float
    particular: float

    def __call__(self, x):
        """Return (u, u') at ``x``."""
        x = np.asarray(x, dtype=float)
        e0 = np.exp(self.lambda0 * x)
        e1 = np.exp(self.lambda1 * (x - 1.0))
        u = self.particular + self.A * e0 + self.B_shift * e1
        du = self.A * self.lambda0 * e0 + self.B_shift * self.lambda1 * e1
        return u, du

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        return (self.A * self.lambda0**2 * np.exp(self.lambda0 * x)
                + self.B_shift * self.lambda1**2 * np.exp(self.lambda1 * (x - 1.0)))


def constant_coefficient_exact(problem: ProblemSpec) -> ClosedFormSolution:
    if not problem.is_constant:
        raise ValueError("closed-form solution needs constant b, c, f")
    e1, e2 = problem.eps1, problem.eps2
    b, c, f = problem.b.constant, problem.c.constant, problem.f.constant
    if c == 0.0:
        raise ValueError("closed-form solution needs c != 0")
    s = math.sqrt((e2 * b) ** 2 + 4.0 * e1 * c)
    # lambda0 = (e2 b - s)/(2 e1) written without cancellation
    lam0 = -2.0 * c / (e2 * b + s) if e2 * b >= 0 else (e2 * b - s) / (2.0 * e1)
    lam1 = (e2 * b + s) / (2.0 * e1) if e2 * b >= 0 else -2.0 * c / (e2 * b - s)
    P = f / c
    q0 = math.exp(lam0)   # e^{lambda0}, lambda0 < 0
    q1 = math.exp(-lam1)  # e^{-lambda1}, lambda1 > 0
    # [1  q1] [A ]   [-P]
    # [q0  1] [B'] = [-P]
    det = 1.0 - q0 * q1
    if det == 0.0:
        raise ValueError("singular boundary system")
    A = -P * (1.0 - q1) / det
    B = -P * (1.0 - q0) / det
    return ClosedFormSolution(lam0, lam1, A, B, P)


def _example1(eps1=1.0, eps2=1.0):
    one = Coefficient.const(1.0)
    return ProblemSpec(eps1, eps2, one, one, one, name="example1", advisory=True)


def _example2(eps1=1.0, eps2=1.0):
    return ProblemSpec(eps1, eps2,
                       Coefficient(np.exp, np.exp),
                       Coefficient(lambda x: np.asarray(x, dtype=float) * 1.0,
                                   lambda x: np.ones(np.shape(x))),
                       Coefficient.const(1.0),
                       name="example2", advisory=True)


PROBLEMS = {"example1": _example1, "example2": _example2}


def get_problem(name: str, eps1: float, eps2: float) -> ProblemSpec:
    key = str(name).lower()
    if key in ("1", "2"):
        key = "example" + key
    try:
        return PROBLEMS[key](eps1, eps2)
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {sorted(PROBLEMS)}") from None
