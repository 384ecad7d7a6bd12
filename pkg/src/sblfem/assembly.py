"""Galerkin assembly and solution of  B(u, v) = F(v)  on S_0^p(mesh).

B(u, v) = eps1 <u', v'> + eps2 <b u', v> + <c u, v>,  F(v) = <f, v>.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import QuadratureRule, gauss_rule, shape_functions
from .mesh import ElementMap, Mesh, element_map
from .piecewise import PiecewisePolynomial
from .problem import ProblemSpec

__all__ = ["DofMap", "GlobalSystem", "DiscreteSolution", "SolverError",
           "element_matrices", "assemble_global", "solve_linear", "evaluate_fem",
           "solve", "assembly_rule", "dump_matrix_csv"]


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class DofMap:
    """Global numbering: interior breakpoints first, then internal modes element by element.

    ``table[e, k]`` is the global index of local mode k on element e, or -1
    for the eliminated boundary modes at x=0 and x=1.
    """

    n_elements: int
    p: int
    table: np.ndarray

    @classmethod
    def build(cls, n_elements: int, p: int) -> "DofMap":
        t = np.empty((n_elements, p + 1), dtype=int)
        n_nodes = n_elements - 1
        for e in range(n_elements):
            t[e, 0] = e - 1          # breakpoint e (1-based interior) -> e - 1
            t[e, 1] = e if e < n_nodes else -1
            t[e, 2:] = n_nodes + e * (p - 1) + np.arange(p - 1)
        t[0, 0] = -1
        t.setflags(write=False)
        return cls(n_elements, p, t)

    @property
    def size(self) -> int:
        return self.n_elements * self.p - 1

    def gather(self, coeffs: np.ndarray) -> np.ndarray:
        padded = np.append(np.asarray(coeffs, dtype=float), 0.0)
        return padded[self.table]  # -1 picks the trailing zero


@dataclass(frozen=True)
class GlobalSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    dofmap: DofMap
    mesh: Mesh

    @property
    def dof(self) -> int:
        return len(self.rhs)


class DiscreteSolution(PiecewisePolynomial):
    def __init__(self, mesh: Mesh, p: int, coeffs: np.ndarray, dofmap: DofMap):
        coeffs = np.array(coeffs, dtype=float)
        coeffs.setflags(write=False)
        self.coeffs = coeffs
        self.dofmap = dofmap
        super().__init__(mesh, p, dofmap.gather(coeffs))

    @property
    def dof(self) -> int:
        return len(self.coeffs)


def assembly_rule(p: int) -> QuadratureRule:
    return gauss_rule(p + 4)


def element_matrices(problem: ProblemSpec, emap: ElementMap, p: int,
                     quad: QuadratureRule | None = None):
    """Local matrix A[k, l] = B(N_l, N_k) (row = test mode) and load F[k] = F(N_k)."""
    quad = quad or assembly_rule(p)
    if 2 * quad.n - 1 < 2 * p + 3:
        raise ValueError(f"{quad.n}-point rule too coarse for degree {p}")
    xi, w = quad.nodes, quad.weights
    h = emap.width
    x = emap(xi)
    b, c, f = problem.b(x), problem.c(x), problem.f(x)
    if not (np.isfinite(b).all() and np.isfinite(c).all() and np.isfinite(f).all()):
        raise ValueError(f"non-finite coefficient values on element {emap.j}")
    N, dN = shape_functions(p, xi)
    K = problem.eps1 * (2.0 / h) * (dN * w) @ dN.T
    # the single derivative cancels the jacobian
    C = problem.eps2 * (N * (w * b)) @ dN.T
    M = 0.5 * h * (N * (w * c)) @ N.T
    F = 0.5 * h * N @ (w * f)
    return K + C + M, F


def assemble_global(problem: ProblemSpec, mesh: Mesh, p: int,
                    quad: QuadratureRule | None = None) -> GlobalSystem:
    dm = DofMap.build(mesh.n_elements, p)
    n = dm.size
    A = np.zeros((n, n))
    rhs = np.zeros(n)
    for e in range(mesh.n_elements):
        Ae, Fe = element_matrices(problem, element_map(mesh, e + 1), p, quad)
        g = dm.table[e]
        keep = g >= 0
        gk = g[keep]
        A[np.ix_(gk, gk)] += Ae[np.ix_(keep, keep)]
        rhs[gk] += Fe[keep]
    return GlobalSystem(A, rhs, dm, mesh)


def solve_linear(system: GlobalSystem, rtol: float = 1e-10) -> np.ndarray:
    """Dense LU with partial pivoting plus a backward-error check."""
    A, rhs = system.matrix, system.rhs
    if system.dof == 0:
        return np.zeros(0)
    with warnings.catch_warnings():
        # an exact zero pivot is reported below as SolverError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    if np.any(np.diag(lu) == 0.0):
        raise SolverError("singular stiffness matrix")
    x = scipy.linalg.lu_solve((lu, piv), rhs)
    res = np.max(np.abs(A @ x - rhs))
    scale = np.max(np.abs(A).sum(axis=1)) * np.max(np.abs(x)) + np.max(np.abs(rhs))
    if scale > 0 and res / scale > rtol:
        raise SolverError(f"residual check failed: {res / scale:.3e} > {rtol:.1e}")
    return x


def solve(problem: ProblemSpec, mesh: Mesh, p: int,
          quad: QuadratureRule | None = None) -> DiscreteSolution:
    system = assemble_global(problem, mesh, p, quad)
    return DiscreteSolution(mesh, p, solve_linear(system), system.dofmap)


def evaluate_fem(sol: PiecewisePolynomial, x: float) -> tuple[float, float]:
    u, du = sol(np.array([x], dtype=float))
    return float(u[0]), float(du[0])


def dump_matrix_csv(system: GlobalSystem, path) -> None:
    with open(path, "w", newline="\n") as fh:
        for row in system.matrix:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
