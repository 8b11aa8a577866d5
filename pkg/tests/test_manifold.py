import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filmsim import constants as K
from filmsim.errors import DomainError
from filmsim.manifold import MacroPoint, edge_lift, lift_rates, lift_velocities, one_layer_rhs
from filmsim.model import ModelParams, PointState, rhs_u1, rhs_u2

small = st.floats(-3, 3, allow_nan=False)


class TestLiftVelocities:
    def test_ratio(self):
        u1, u2 = lift_velocities(MacroPoint(u=2.0), ModelParams(re=7))
        assert (u1, u2) == (pytest.approx(1.174), pytest.approx(2.826))

    def test_slope_term(self):
        u1, _ = lift_velocities(MacroPoint(), ModelParams(re=10, tan_theta=0.1))
        assert u1 == pytest.approx(0.0129)

    @settings(max_examples=10_000, deadline=None)
    @given(h=st.floats(0.1, 3), u=small, dh=small, d2h=small, du=small, d2u=small,
           re=st.floats(0.5, 50), tan=st.floats(-1, 1))
    def test_restriction_identity(self, h, u, dh, d2h, du, d2u, re, tan):
        q = MacroPoint(h=h, u=u, dh=dh, d2h=d2h, du=du, d2u=d2u)
        u1, u2 = lift_velocities(q, ModelParams(re=re, tan_theta=tan))
        assert (u1 + u2) / 2 == pytest.approx(u, abs=1e-12 * (1 + abs(u1) + abs(u2)))

    def test_domain(self):
        with pytest.raises(DomainError):
            lift_velocities(MacroPoint(h=0.0), ModelParams())


class TestLiftRates:
    @pytest.mark.parametrize("re,tan,u", [(1, 0.2, 0.5), (15, 0.0, 1.0), (3, -0.1, -2.0)])
    def test_uniform(self, re, tan, u):
        r1, r2 = lift_rates(MacroPoint(u=u), ModelParams(re=re, tan_theta=tan))
        assert r1 == pytest.approx(0.489 * tan - 1.482 * u / re)
        assert r2 == pytest.approx(1.168 * tan - 3.526 * u / re)

    def test_rest(self):
        assert lift_rates(MacroPoint(), ModelParams()) == (0.0, 0.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            lift_rates(MacroPoint(h=-1.0), ModelParams())


class TestEdgeLift:
    def test_rest(self):
        assert edge_lift(0.0, 1.0, ModelParams()) == (0.0, 0.0, 0.0, 0.0)

    def test_reference_values(self):
        out = edge_lift(1.0, 1.0, ModelParams(re=15))
        assert np.allclose(out, (0.587, 1.413, -0.0988, -0.23507), atol=5e-5)

    @settings(max_examples=500, deadline=None)
    @given(u=small, h=st.floats(0.1, 3), re=st.floats(0.5, 50), tan=st.floats(-1, 1),
           h2=st.booleans())
    def test_mean_is_edge_velocity(self, u, h, re, tan, h2):
        u1, u2, _, _ = edge_lift(u, h, ModelParams(re=re, tan_theta=tan), h2)
        assert (u1 + u2) / 2 == pytest.approx(u, abs=1e-12 * (1 + abs(u1) + abs(u2)))

    def test_h2_factor(self):
        m = ModelParams(re=10, tan_theta=0.1)
        plain = edge_lift(0.0, 2.0, m)[0]
        scaled = edge_lift(0.0, 2.0, m, h2_factor=True)[0]
        assert scaled == pytest.approx(4 * plain)

    def test_matches_full_lift_without_derivatives(self):
        m = ModelParams(re=5, tan_theta=0.2)
        full = lift_velocities(MacroPoint(h=1.0, u=0.7), m)
        edge = edge_lift(0.7, 1.0, m)[:2]
        assert np.allclose(full, edge)

    def test_domain(self):
        with pytest.raises(DomainError):
            edge_lift(1.0, 0.0, ModelParams())


class TestOneLayer:
    def test_shear_decay(self):
        _, du = one_layer_rhs(MacroPoint(u=1.0), ModelParams(re=15))
        assert du == pytest.approx(-0.16693, abs=1e-5)

    def test_gravity(self):
        _, du = one_layer_rhs(MacroPoint(), ModelParams(tan_theta=0.5))
        assert du == pytest.approx(0.4145)

    def test_rest(self):
        assert one_layer_rhs(MacroPoint(), ModelParams()) == (0.0, 0.0)

    def test_mass(self):
        dh, _ = one_layer_rhs(MacroPoint(h=2.0, u=0.5, dh=0.1, du=0.3), ModelParams())
        assert dh == pytest.approx(-(0.1 * 0.5 + 2.0 * 0.3))

    def test_reduced_drag_matches_slowest_two_layer_mode(self):
        slowest = -np.max(np.linalg.eigvals(K.DRAG_MATRIX).real)
        assert slowest == pytest.approx(2.466, abs=1e-3)
        assert abs(-K.ONE_LAYER_DRAG - slowest) / slowest < 0.025

    @pytest.mark.parametrize("re", [1.0, 15.0])
    @pytest.mark.parametrize("h", [0.8, 1.0, 1.3])
    def test_two_layer_closure(self, re, h):
        m = ModelParams(re=re)
        u = 0.9
        p = PointState(h=h, u1=K.LIFT_RATIO[0] * u, u2=K.LIFT_RATIO[1] * u)
        two_layer = 0.5 * (rhs_u1(p, m) + rhs_u2(p, m))
        _, one_layer = one_layer_rhs(MacroPoint(h=h, u=u), m)
        assert abs(two_layer - one_layer) <= 0.02 * abs(one_layer)
