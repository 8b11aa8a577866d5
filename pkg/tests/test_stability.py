import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filmsim.model import ModelParams, PointState, rhs_u1, rhs_u2
from filmsim.stability import (GROWTH_TOL, characteristic_roots, critical_regularisation,
                               equilibrium_velocities, growth_rate_sweep, instability_onset,
                               max_growth, model_linearisation, reference_cubic_coefficients,
                               companion_roots, shear_mode_wavenumbers, stability_matrix)

K_STABLE = np.arange(0.0, 10.0 + 0.005, 0.01)


def _paired_error(a, b):
    a, b = list(np.asarray(a)), list(np.asarray(b))
    worst = 0.0
    for x in a:
        j = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b[j]) / max(1.0, abs(x)))
        b.pop(j)
    return worst


class TestEquilibrium:
    def test_flat(self):
        assert equilibrium_velocities(1, 0) == (0.0, 0.0)

    def test_inclined(self):
        u1, u2 = equilibrium_velocities(15, 0.1)
        assert u1 == pytest.approx(0.3135) and u2 == pytest.approx(0.6885)

    def test_is_fixed_point(self):
        m = ModelParams(re=15, tan_theta=0.1)
        u1, u2 = equilibrium_velocities(15, 0.1)
        p = PointState(u1=u1, u2=u2)
        assert abs(rhs_u1(p, m)) <= 5e-3 * 1.5
        assert abs(rhs_u2(p, m)) <= 5e-3 * 1.5


class TestStabilityMatrix:
    def test_k_zero(self):
        m = stability_matrix(1, 0, 0.0)
        expected = [[0, 0, 0], [0, -19.3, 6.98], [0, 6.98, -5.36]]
        assert np.allclose(m, expected, atol=0)

    @pytest.mark.parametrize("k", [0.3, 1.0, 7.5])
    def test_mass_flux_entry(self, k):
        m = stability_matrix(4, 0.2, k, 0.3)
        assert m[0, 1] == pytest.approx(-0.5j * k)
        assert m[0, 2] == pytest.approx(-0.5j * k)

    def test_dispersion_entry(self):
        assert stability_matrix(1, 0, 1.0)[1, 1] == pytest.approx(-15.46)

    def test_vectorised(self):
        ks = np.array([0.5, 2.0])
        batch = stability_matrix(3, 0.1, ks, 0.2)
        assert batch.shape == (2, 3, 3)
        assert np.allclose(batch[1], stability_matrix(3, 0.1, 2.0, 0.2))

    def test_left_operator_scales_velocity_rows(self):
        k, c = 2.0, 0.5
        plain = stability_matrix(15, 0, k, c)
        left = stability_matrix(15, 0, k, c, left_operator=True)
        assert np.allclose(left[0], plain[0])
        assert np.allclose(left[1:], plain[1:] / (1 + c * k * k))

    @pytest.mark.parametrize("c", [0.0, 0.5])
    @pytest.mark.parametrize("k", [0.2, 1.0, 3.0])
    def test_matches_model_linearisation_on_flat_plate(self, k, c):
        a = stability_matrix(15, 0, k, c)
        b = model_linearisation(15, 0, k, c)
        assert np.allclose(a, b, atol=1e-7)


class TestCharacteristicRoots:
    @pytest.mark.parametrize("c", [0.0, 0.17, 0.5, 3.0])
    def test_k_zero_independent_of_c(self, c):
        lam = characteristic_roots(1, 0, 0.0, c).lambdas
        assert np.allclose(lam, [0.0, -2.466, -22.194], atol=2e-3)
        assert abs(lam[0].real) <= 1e-9

    def test_unstable_without_regularisation(self):
        assert characteristic_roots(1, 0, 3.0).max_real > 0

    def test_stable_with_regularisation(self):
        assert characteristic_roots(1, 0, 3.0, 0.5).max_real <= 0

    def test_sorted_descending(self):
        lam = characteristic_roots(2, 0.3, 1.7, 0.1).lambdas
        assert np.all(np.diff(lam.real) <= 0)

    def test_tie_broken_by_imaginary_part(self):
        lam = characteristic_roots(15, 0, 1.0).lambdas
        pairs = [(a, b) for a, b in zip(lam, lam[1:]) if abs(a.real - b.real) < 1e-12]
        assert all(a.imag >= b.imag for a, b in pairs)

    @settings(max_examples=60, deadline=None)
    @given(re=st.floats(0.5, 40), k=st.floats(0, 20), c=st.floats(0, 2),
           left=st.booleans())
    def test_roots_match_matrix_eigenvalues(self, re, k, c, left):
        roots = characteristic_roots(re, 0, k, c, left).lambdas
        eig = np.linalg.eigvals(stability_matrix(re, 0, k, c, left))
        assert _paired_error(roots, eig) <= 1e-6

    @pytest.mark.parametrize("k", [0.5, 2.0, 3.0, 6.0])
    @pytest.mark.parametrize("c", [0.0, 0.5])
    def test_reference_cubic_roots_close(self, k, c):
        ref = companion_roots(reference_cubic_coefficients(1, 0, k, c))
        ours = characteristic_roots(1, 0, k, c).lambdas
        scale = max(1.0, np.max(np.abs(ours)))
        assert _paired_error(ref, ours) * max(1.0, abs(ours[0])) <= 0.02 * scale

    def test_sweep_delegates(self):
        (g,) = growth_rate_sweep(1, 0, 0.0, [0.0])
        assert np.array_equal(g.lambdas, characteristic_roots(1, 0, 0.0).lambdas)

    def test_sweep_requires_sorted_grid(self):
        with pytest.raises(ValueError):
            growth_rate_sweep(1, 0, 0.0, [1.0, 0.5])


class TestThresholds:
    def test_onset(self):
        k0 = instability_onset(1, 0)
        assert k0 == pytest.approx(2.5, abs=0.3)

    def test_regularised_sweep_is_stable(self):
        assert max_growth(1, 0, 0.5, K_STABLE) <= GROWTH_TOL

    def test_regularised_sweep_stable_to_high_wavenumber(self):
        assert max_growth(1, 0, 0.5, np.arange(0, 50.005, 0.01)) <= GROWTH_TOL

    def test_critical_regularisation(self):
        c_star = critical_regularisation(1, 0)
        assert c_star == pytest.approx(0.17, abs=0.02)
        ks = np.arange(0, 50.005, 0.01)
        assert max_growth(1, 0, c_star + 0.05, ks) <= GROWTH_TOL
        assert max_growth(1, 0, max(c_star - 0.05, 0.0), ks) > GROWTH_TOL

    def test_left_operator_threshold_similar(self):
        assert critical_regularisation(1, 0, left_operator=True) == pytest.approx(0.17, abs=0.02)


class TestShearModes:
    def test_first(self):
        assert shear_mode_wavenumbers(1) == [0.0]

    def test_three(self):
        assert np.allclose(shear_mode_wavenumbers(3), [0.0, 8.986, 15.451], atol=1e-3)

    def test_roots_satisfy_constraint(self):
        for kh in shear_mode_wavenumbers(6)[1:]:
            assert kh / 2 == pytest.approx(np.tan(kh / 2), abs=1e-6)

    def test_count_validated(self):
        with pytest.raises(ValueError):
            shear_mode_wavenumbers(0)
