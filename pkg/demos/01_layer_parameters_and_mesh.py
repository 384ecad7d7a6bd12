# %% [markdown]
# Layer parameters and the layer-adapted mesh
#
# The roots of the characteristic equation set the two layer scales.  The
# mesh puts one element of width kappa*p/mu at each end and leaves the rest
# to a single outer element.

# %%
from sblfem import build_sbl_mesh, compute_layer_parameters, get_problem

pairs = [(1.0, 1.0), (1e-9, 1e-4), (1e-10, 1e-5), (1e-12, 1e-12)]
for e1, e2 in pairs:
    L = compute_layer_parameters(get_problem("example1", e1, e2))
    print(f"eps1={e1:g} eps2={e2:g}  mu0={L.mu0:.6g} mu1={L.mu1:.6g}  {L.regime.value}")

# %%
# mesh for growing p; the layer elements widen linearly in p
L = compute_layer_parameters(get_problem("example1", 1e-9, 1e-4))
for p in (1, 3, 6, 11):
    mesh = build_sbl_mesh(L, 1.0, p)
    print(f"p={p:2d}  {mesh}")

# %%
# no layers to speak of: one element covers [0, 1]
print(build_sbl_mesh(compute_layer_parameters(get_problem("example1", 1, 1)), 1.0, 2))
