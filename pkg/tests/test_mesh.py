import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sblfem.mesh import (Mesh, MeshCollisionError, MeshKind, build_sbl_mesh,
                         build_uniform_mesh, element_map)
from sblfem.problem import LayerParameters, Regime


def layer(mu0, mu1):
    return LayerParameters(mu0, mu1, 0.0, 0.0, Regime.BALANCED, 1.0)


def test_four_point_mesh():
    m = build_sbl_mesh(layer(9160.8, 1.091608e5), 1.0, 3)
    assert m.n_elements == 3
    x = m.breakpoints
    assert x[0] == 0.0 and x[-1] == 1.0
    assert x[1] == pytest.approx(3.2748e-4, rel=1e-4)
    assert 1.0 - x[2] == pytest.approx(2.7483e-5, rel=1e-4)
    assert x[1] == 3.0 / 9160.8
    assert x[2] == 1.0 - 3.0 / 1.091608e5
    assert m.widths[0] == 3.0 / 9160.8 and m.widths[2] == 3.0 / 1.091608e5


def test_boundary_case_goes_to_single_element():
    m = build_sbl_mesh(layer(1.0, 2.0), 1.0, 1)
    assert m.breakpoints == (0.0, 1.0)
    assert m.kind is MeshKind.SPECTRAL_BOUNDARY_LAYER


def test_gap_case_three_points():
    # kappa p / mu1 < 1/2 <= kappa p / mu0
    m = build_sbl_mesh(layer(4.0, 100.0), 1.0, 2)
    assert m.breakpoints == (0.0, 1.0 - 0.02, 1.0)
    assert m.widths[1] == 0.02


def test_transition_exactly_at_half():
    mu1 = 20.0
    for p in range(1, 20):
        m = build_sbl_mesh(layer(5.0, mu1), 1.0, p)
        assert (m.n_elements == 1) == (p >= mu1 / 2)


@given(st.floats(1.0, 1e15), st.floats(0.0, 1.0), st.integers(1, 50), st.floats(0.1, 10.0))
def test_layer_widths_and_no_underflow(mu1, f, p, kappa):
    mu0 = max(mu1 * f, 1e-3)
    m = build_sbl_mesh(layer(min(mu0, mu1), mu1), kappa, p)
    if m.n_elements > 1:
        assert m.widths[-1] == kappa * p / mu1
        assert m.breakpoints[-2] < 1.0
    if m.n_elements == 3:
        assert m.widths[0] == kappa * p / min(mu0, mu1)
    assert all(w > 0 for w in m.widths)
    assert all(a < b for a, b in zip(m.breakpoints, m.breakpoints[1:]))


def test_bad_arguments():
    with pytest.raises(ValueError):
        build_sbl_mesh(layer(1, 2), 0.0, 1)
    with pytest.raises(ValueError):
        build_sbl_mesh(layer(1, 2), 1.0, 0)
    with pytest.raises(MeshCollisionError):
        Mesh.from_breakpoints([0.0, 0.5, 0.5, 1.0])


@pytest.mark.parametrize("n, expect", [(1, [0, 1]), (2, [0, 0.5, 1]),
                                       (4, [0, 0.25, 0.5, 0.75, 1])])
def test_uniform(n, expect):
    m = build_uniform_mesh(n)
    assert list(m.breakpoints) == expect
    assert m.kind is MeshKind.UNIFORM


def test_element_map():
    m = build_uniform_mesh(1)
    assert float(element_map(m, 1)(0.0)) == 0.5
    m = Mesh.from_breakpoints([0, 0.25, 1])
    q = element_map(m, 2)
    assert float(q(-1.0)) == 0.25
    assert float(q(1.0)) == 1.0
    assert q.jacobian == 0.375
    with pytest.raises(IndexError):
        element_map(m, 3)
    with pytest.raises(IndexError):
        element_map(m, 0)


def test_element_map_endpoints_exact_on_tiny_element():
    m = build_sbl_mesh(layer(1e4, 1e12), 1.0, 3)
    q = element_map(m, 3)
    assert float(q(1.0)) == 1.0
    assert float(q(-1.0)) == m.breakpoints[2]
    xi = np.linspace(-1, 1, 11)
    assert np.all(np.diff(q(xi)) >= 0)


def test_str_format():
    m = build_sbl_mesh(layer(9160.8, 1.091608e5), 1.0, 3)
    assert str(m) == "0 | 0.000327482 | 0.999973 | 1"
