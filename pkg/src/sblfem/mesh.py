"""Spectral Boundary Layer mesh, a uniform baseline mesh, and element maps."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .problem import LayerParameters

__all__ = ["MeshKind", "Mesh", "ElementMap", "MeshCollisionError",
           "build_sbl_mesh", "build_uniform_mesh", "element_map"]


class MeshCollisionError(ValueError):
    pass


class MeshKind(enum.Enum):
    SPECTRAL_BOUNDARY_LAYER = "sbl"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class Mesh:
    """Breakpoints 0 = x_0 < ... < x_N = 1.

    ``widths`` are stored separately: for layer meshes the last width is
    kappa*p/mu1 computed directly, not as a difference of breakpoints.
    """

    breakpoints: tuple[float, ...]
    widths: tuple[float, ...]
    kind: MeshKind
    kappa: float = 1.0
    p: int = 1

    def __post_init__(self):
        x = self.breakpoints
        if len(x) < 2 or x[0] != 0.0 or x[-1] != 1.0:
            raise ValueError(f"breakpoints must run from 0 to 1, got {x}")
        if len(self.widths) != len(x) - 1:
            raise ValueError("need one width per element")
        if any(b <= a for a, b in zip(x, x[1:])) or any(w <= 0 for w in self.widths):
            raise MeshCollisionError(f"breakpoints not strictly increasing: {x}")

    @classmethod
    def from_breakpoints(cls, breakpoints, kind=MeshKind.UNIFORM, kappa=1.0, p=1):
        x = tuple(float(v) for v in breakpoints)
        return cls(x, tuple(b - a for a, b in zip(x, x[1:])), kind, kappa, p)

    @property
    def n_elements(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def array(self) -> np.ndarray:
        return np.array(self.breakpoints)

    def __str__(self):
        return " | ".join(f"{v:.6g}" for v in self.breakpoints)


@dataclass(frozen=True)
class ElementMap:
    """Affine map Q_j from [-1, 1] onto element j (1-based)."""

    j: int
    left: float
    right: float
    width: float

    @property
    def jacobian(self) -> float:
        return 0.5 * self.width

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        J = self.jacobian
        # anchor on the nearer endpoint so both ends map exactly
        return np.where(xi <= 0.0, self.left + (xi + 1.0) * J, self.right - (1.0 - xi) * J)

    def inverse(self, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * (x - self.left) / self.width - 1.0


def build_sbl_mesh(layer: LayerParameters, kappa: float, p: int) -> Mesh:
    """Spectral Boundary Layer mesh for degree ``p``.

    {0, 1}                                if kappa p / mu1 >= 1/2
    {0, kappa p/mu0, 1 - kappa p/mu1, 1}  if kappa p / mu0 < 1/2
    {0, 1 - kappa p/mu1, 1}               otherwise (left layer left to the polynomial)
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if p < 1:
        raise ValueError("p must be >= 1")
    right = kappa * p / layer.mu1
    if right >= 0.5:
        return Mesh((0.0, 1.0), (1.0,), MeshKind.SPECTRAL_BOUNDARY_LAYER, kappa, p)
    left = kappa * p / layer.mu0 if layer.mu0 > 0 else np.inf
    if left < 0.5:
        if left >= 1.0 - right:
            raise MeshCollisionError(f"layer elements overlap: {left} >= 1 - {right}")
        return Mesh((0.0, left, 1.0 - right, 1.0), (left, 1.0 - left - right, right),
                    MeshKind.SPECTRAL_BOUNDARY_LAYER, kappa, p)
    return Mesh((0.0, 1.0 - right, 1.0), (1.0 - right, right),
                MeshKind.SPECTRAL_BOUNDARY_LAYER, kappa, p)


def build_uniform_mesh(n_elements: int) -> Mesh:
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    x = np.linspace(0.0, 1.0, n_elements + 1)
    return Mesh(tuple(float(v) for v in x), (1.0 / n_elements,) * n_elements,
                MeshKind.UNIFORM, 1.0, 1)


def element_map(mesh: Mesh, j: int) -> ElementMap:
    if not 1 <= j <= mesh.n_elements:
        raise IndexError(f"element {j} out of range 1..{mesh.n_elements}")
    return ElementMap(j, mesh.breakpoints[j - 1], mesh.breakpoints[j], mesh.widths[j - 1])
