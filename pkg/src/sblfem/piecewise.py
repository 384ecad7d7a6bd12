"""Piecewise polynomials stored as per-element coefficients in the shape basis."""

from __future__ import annotations

import numpy as np

from .basis import shape_functions
from .mesh import Mesh

__all__ = ["PiecewisePolynomial", "locate"]


def locate(mesh: Mesh, x):
    """0-based element index of each x; breakpoints go to the left element, x=0 to the first."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)) or np.any(np.isnan(x)):
        raise ValueError("evaluation points must lie in [0, 1]")
    idx = np.searchsorted(mesh.array, x, side="left") - 1
    return np.clip(idx, 0, mesh.n_elements - 1)


class PiecewisePolynomial:
    """Degree-p polynomial on each element of ``mesh``.

    ``local`` has shape (n_elements, p + 1); column 0/1 are the values at the
    left/right element endpoint, the rest multiply the internal modes.
    Calling the object returns ``(values, derivatives)`` at ``x``.
    """

    def __init__(self, mesh: Mesh, p: int, local: np.ndarray):
        local = np.array(local, dtype=float)
        if local.shape != (mesh.n_elements, p + 1):
            raise ValueError(f"expected local coefficients of shape {(mesh.n_elements, p + 1)}")
        local.setflags(write=False)
        self.mesh = mesh
        self.p = p
        self.local = local

    def on_element(self, e: int, xi):
        """(values, derivatives in x) on 0-based element ``e`` at reference points ``xi``."""
        N, dN = shape_functions(self.p, xi)
        c = self.local[e]
        u = np.tensordot(c, N, axes=1)
        du = np.tensordot(c, dN, axes=1) * (2.0 / self.mesh.widths[e])
        return u, du

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        idx = locate(self.mesh, flat)
        u = np.empty_like(flat)
        du = np.empty_like(flat)
        pts = self.mesh.breakpoints
        for e in np.unique(idx):
            sel = idx == e
            xs = flat[sel]
            w = self.mesh.widths[e]
            dl, dr = xs - pts[e], pts[e + 1] - xs
            xi = np.where(dl <= dr, 2.0 * dl / w - 1.0, 1.0 - 2.0 * dr / w)
            u[sel], du[sel] = self.on_element(int(e), np.clip(xi, -1.0, 1.0))
        return u.reshape(x.shape), du.reshape(x.shape)
