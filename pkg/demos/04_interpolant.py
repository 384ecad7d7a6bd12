# %% [markdown]
# The elementwise interpolant on the layer mesh
#
# It matches u at every breakpoint and its derivative is the Legendre
# truncation of u' on each element.  At the inner breakpoints the layer
# has decayed only to about exp(-kappa p), and matching it there costs the
# interpolant an error of that size: the first column is almost exactly
# 100 exp(-p).  Galerkin is not tied to those values and does far better.

# %%
import numpy as np

from sblfem import build_interpolant, build_sbl_mesh, compute_layer_parameters, get_problem, solve
from sblfem.approximation import energy_norm_error
from sblfem.problem import constant_coefficient_exact

e1, e2 = 1e-10, 1e-5
prob = get_problem("example1", e1, e2)
u = constant_coefficient_exact(prob)
L = compute_layer_parameters(prob)

# %%
print(" p   interpolant %   Galerkin %   breakpoint mismatch")
for p in range(2, 12):
    mesh = build_sbl_mesh(L, 1.0, p)
    I = build_interpolant(u, mesh, p)
    gap = np.max(np.abs(I(mesh.array)[0] - u(mesh.array)[0]))
    ei = energy_norm_error(u, I, e1)[1]
    eg = energy_norm_error(u, solve(prob, mesh, p), e1)[1]
    print(f"{p:2d}   {ei:.3e}       {eg:.3e}    {gap:.1e}")
