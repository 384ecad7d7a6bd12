"""Piecewise interpolant, energy-norm errors and reference solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import DiscreteSolution, solve
from .basis import gauss_rule, legendre_eval
from .mesh import Mesh, build_sbl_mesh, element_map
from .piecewise import PiecewisePolynomial
from .problem import ProblemSpec, compute_layer_parameters

__all__ = ["PiecewiseInterpolant", "EnergyQuadrature", "build_interpolant",
           "energy_norm", "energy_norm_error", "reference_degree", "reference_solution"]


class PiecewiseInterpolant(PiecewisePolynomial):
    """Elementwise interpolant matching the target at every breakpoint."""


def build_interpolant(u, mesh: Mesh, p: int, n_quad: int | None = None) -> PiecewiseInterpolant:
    """Interpolant whose derivative is the Legendre truncation of u' on each element.

    ``u(x)`` must return ``(values, derivatives)``.  The mean of u' is taken
    from the endpoint values, so both endpoints are matched exactly; the
    higher Legendre coefficients use an ``n_quad``-point Gauss rule
    (default 2p).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    rule = gauss_rule(n_quad or 2 * p)
    P, _ = legendre_eval(p - 1, rule.nodes)
    local = np.zeros((mesh.n_elements, p + 1))
    ends, _ = u(mesh.array)
    if not np.isfinite(ends).all():
        raise ValueError("target is not finite at the breakpoints")
    for e in range(mesh.n_elements):
        emap = element_map(mesh, e + 1)
        _, du = u(emap(rule.nodes))
        if not np.isfinite(du).all():
            raise ValueError(f"target derivative is not finite on element {e + 1}")
        local[e, 0], local[e, 1] = ends[e], ends[e + 1]
        h = emap.width
        for k in range(1, p):
            a_k = (2 * k + 1) / 2.0 * np.dot(rule.weights, du * P[k])
            # (h/2) int_{-1}^{xi} P_k = (h/2) sqrt(2/(2k+1)) psi_{k+1}
            local[e, k + 1] = 0.5 * h * a_k * math.sqrt(2.0 / (2 * k + 1))
    return PiecewiseInterpolant(mesh, p, local)


@dataclass(frozen=True)
class EnergyQuadrature:
    """Composite Gauss rule per element, geometrically graded toward both ends.

    Each half of the reference element is split at 2^-1, ..., 2^-levels
    (measured from the nearer endpoint) and every piece gets an ``n_points``
    Gauss rule; ``None`` means max(p + 2, 10).
    """

    levels: int = 40
    n_points: int | None = None

    def reference_rule(self, p: int = 1):
        n = self.n_points or max(p + 2, 10)
        g = gauss_rule(n)
        # distances from the left end in units of the half-width: 0, 2^-L, ..., 1/2, 1
        d = np.concatenate(([0.0], 2.0 ** -np.arange(self.levels, 0, -1), [1.0]))
        cuts = np.concatenate((d[:-1], 2.0 - d[::-1]))  # on [0, 2]
        a, b = cuts[:-1], cuts[1:]
        half = 0.5 * (b - a)
        t = (a[:, None] + half[:, None] * (g.nodes[None, :] + 1.0))
        w = half[:, None] * g.weights[None, :]
        return t.ravel() - 1.0, w.ravel()

    def element_rule(self, mesh: Mesh, e: int, p: int = 1):
        """Nodes in x, reference nodes and weights for 0-based element e."""
        xi, w = self.reference_rule(p)
        emap = element_map(mesh, e + 1)
        return emap(xi), xi, w * emap.jacobian


def _pieces(target, mesh: Mesh, e: int, x, xi):
    if isinstance(target, PiecewisePolynomial) and target.mesh == mesh:
        return target.on_element(e, xi)
    return target(x)


def energy_norm(v, mesh: Mesh, eps1: float, quad: EnergyQuadrature | None = None,
                p: int = 1) -> float:
    """sqrt(eps1 |v|_1^2 + |v|_0^2) over [0, 1], element by element of ``mesh``."""
    quad = quad or EnergyQuadrature()
    total = []
    for e in range(mesh.n_elements):
        x, xi, w = quad.element_rule(mesh, e, p)
        u, du = _pieces(v, mesh, e, x, xi)
        total.append(math.fsum(w * (eps1 * du * du + u * u)))
    return math.sqrt(math.fsum(total))


def energy_norm_error(truth, approx: PiecewisePolynomial, eps1: float,
                      quad: EnergyQuadrature | None = None) -> tuple[float, float]:
    """Absolute energy-norm error and relative error in percent.

    Both integrals use the composite rule on the elements of ``approx.mesh``.
    """
    quad = quad or EnergyQuadrature()
    mesh, p = approx.mesh, approx.p
    err, ref = [], []
    for e in range(mesh.n_elements):
        x, xi, w = quad.element_rule(mesh, e, p)
        u, du = _pieces(truth, mesh, e, x, xi)
        v, dv = approx.on_element(e, xi)
        de, ee = du - dv, u - v
        err.append(math.fsum(w * (eps1 * de * de + ee * ee)))
        ref.append(math.fsum(w * (eps1 * du * du + u * u)))
    abs_err = math.sqrt(math.fsum(err))
    norm = math.sqrt(math.fsum(ref))
    if norm == 0.0:
        raise ZeroDivisionError("truth has zero energy norm")
    return abs_err, 100.0 * abs_err / norm


def reference_degree(n_elements: int, p: int) -> int:
    """Smallest degree above p with at least twice the degrees of freedom."""
    dof = n_elements * p - 1
    need = 2 * dof
    q = max(p + 1, -(-(need + 1) // n_elements))
    return q


def reference_solution(problem: ProblemSpec, kappa: float, p: int,
                       mesh: Mesh | None = None) -> DiscreteSolution:
    """Higher-degree solution with at least twice the DOF of the degree-p layer mesh.

    The reference degree q gets its own layer mesh (widths kappa*q/mu), so
    the layers are resolved as well as the degree allows.  Reusing the
    degree-p mesh would cap the reference near the accuracy of the
    solution it is meant to judge.  ``mesh`` is the degree-p mesh whose DOF
    count must be doubled; it is rebuilt when omitted.
    """
    layer = compute_layer_parameters(problem)
    if mesh is None:
        mesh = build_sbl_mesh(layer, kappa, p)
    need = 2 * (mesh.n_elements * p - 1)
    q = reference_degree(mesh.n_elements, p)
    while True:
        ref_mesh = build_sbl_mesh(layer, kappa, q)
        if ref_mesh.n_elements * q - 1 >= need:
            return solve(problem, ref_mesh, q)
        q += 1
