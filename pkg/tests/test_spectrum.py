import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lambda_fluor import oracles
from lambda_fluor.dynamics import steady_state
from lambda_fluor.errors import NoFluorescenceError, NumericalError, PreconditionError
from lambda_fluor.model import AB, AC, Liouvillian, SystemParams, build_liouvillian
from lambda_fluor.spectrum import (
    coherent_intensity,
    compute_spectrum,
    covariance_init,
    default_span,
    incoherent_spectrum,
    make_grid,
    sum_rule_check,
    total_intensity,
)

from .strategies import system_params

GRID = np.linspace(-12, 12, 241)


def _solve(params):
    L = build_liouvillian(params)
    return L, steady_state(L)


class TestCovariances:
    def test_entries_from_operator_algebra(self, narrow):
        _, steady = _solve(narrow.replace(p=0.6, detuning=0.7))
        cov = covariance_init(steady)
        assert cov.r_ab[AB] == pytest.approx(steady.rho_aa - steady.rho_ab * steady.rho_ba, abs=1e-15)
        assert cov.r_ab[AC] == pytest.approx(-steady.rho_ac * steady.rho_ba, abs=1e-15)
        assert cov.r_ac[AC] == pytest.approx(steady.rho_aa - steady.rho_ac * steady.rho_ca, abs=1e-15)

    def test_undriven_has_no_fluctuations(self):
        _, steady = _solve(SystemParams(omega1=0, omega2=0, splitting=0.2))
        cov = covariance_init(steady)
        assert not np.any(np.abs(cov.r_ab) > 1e-14) and not np.any(np.abs(cov.r_ac) > 1e-14)


class TestIntensities:
    def test_undriven(self):
        _, steady = _solve(SystemParams(omega1=0, omega2=0, splitting=0.2))
        params = SystemParams(omega1=0, omega2=0, splitting=0.2)
        assert coherent_intensity(steady, params) == 0
        assert total_intensity(steady, params) == 0

    def test_dark_state_has_no_coherent_light(self):
        params = SystemParams(omega1=0.2, omega2=0.2, splitting=1e-6, p=0)
        _, steady = _solve(params)
        assert coherent_intensity(steady, params) == pytest.approx(0.0, abs=1e-10)

    def test_narrow_values(self, narrow):
        _, steady = _solve(narrow)
        assert total_intensity(steady, narrow) == pytest.approx(2 * math.pi * 9 / 19.01, rel=1e-12)
        assert total_intensity(steady, narrow) == pytest.approx(2.9747, abs=1e-4)
        assert coherent_intensity(steady, narrow) == pytest.approx(0.078239875, rel=1e-7)

    @settings(max_examples=40, deadline=None)
    @given(system_params(min_rabi=0.1))
    def test_coherent_within_total(self, params):
        _, steady = _solve(params)
        assert -1e-12 <= coherent_intensity(steady, params) <= total_intensity(steady, params) + 1e-12


class TestIncoherentSpectrum:
    def test_narrow_center_amplitude(self, narrow):
        spec = compute_spectrum(narrow, grid=np.array([-1e-4, 0.0, 1e-4]))
        assert spec.s_inc[1] == pytest.approx(0.365, rel=0.01)

    @settings(max_examples=25, deadline=None)
    @given(system_params(p=st.floats(0.0, 1.0), min_rabi=0.2))
    def test_matches_full_superoperator(self, params):
        L, steady = _solve(params)
        if steady.rho_aa < 1e-6:
            return
        spec = incoherent_spectrum(L, steady, covariance_init(steady), params, GRID, "absolute")
        expected = oracles.qrt_spectrum(params, GRID)
        np.testing.assert_allclose(spec.s_inc, expected, atol=1e-9 * max(1.0, np.max(np.abs(expected))))

    @settings(max_examples=25, deadline=None)
    @given(system_params(min_rabi=0.2))
    def test_non_negative(self, params):
        L, steady = _solve(params)
        if steady.rho_aa < 1e-6:
            return
        spec = incoherent_spectrum(L, steady, covariance_init(steady), params, GRID, "absolute")
        assert spec.s_inc.min() >= -1e-9 * spec.s_inc.max()

    @settings(max_examples=25, deadline=None)
    @given(system_params(min_rabi=0.2))
    def test_relabeling_invariance(self, params):
        assume(steady_state(build_liouvillian(params)).rho_aa > 1e-6)
        a = compute_spectrum(params, grid=GRID)
        b = compute_spectrum(params.relabeled(), grid=GRID)
        np.testing.assert_allclose(a.s_inc, b.s_inc, atol=1e-10 * max(1.0, a.s_inc.max()))

    def test_reflection_for_symmetric_resonant_drive(self, sidebands):
        # at zero detuning with equal rates the spectrum is even in the offset
        spec = compute_spectrum(sidebands, grid=GRID)
        np.testing.assert_allclose(spec.s_inc, spec.s_inc[::-1], atol=1e-12)

    def test_linear_in_covariances(self, sidebands):
        L, steady = _solve(sidebands)
        cov = covariance_init(steady)
        one = incoherent_spectrum(L, steady, cov, sidebands, GRID, "absolute").s_inc
        two = incoherent_spectrum(L, steady, cov.scaled(2.5), sidebands, GRID, "absolute").s_inc
        np.testing.assert_allclose(two, 2.5 * one, rtol=1e-12, atol=1e-15)

    def test_normalizations(self, sidebands):
        by = {n: compute_spectrum(sidebands, grid=GRID, normalization=n) for n in ("total", "rho_aa", "absolute")}
        absolute = by["absolute"].s_inc
        np.testing.assert_allclose(by["total"].s_inc * by["total"].i_tot, absolute, rtol=1e-12)
        np.testing.assert_allclose(by["rho_aa"].s_inc * math.pi * by["rho_aa"].rho_aa_ss, absolute, rtol=1e-12)
        np.testing.assert_allclose(by["total"].absolute, absolute, rtol=1e-12)

    def test_unknown_normalization(self, sidebands):
        with pytest.raises(PreconditionError):
            compute_spectrum(sidebands, grid=GRID, normalization="peak")

    @pytest.mark.parametrize("grid", [np.array([1.0, 0.0]), np.array([[0.0]]), np.array([0.0, np.nan]), np.array([])])
    def test_bad_grids(self, sidebands, grid):
        with pytest.raises(PreconditionError):
            compute_spectrum(sidebands, grid=grid)

    def test_dark_state_has_no_spectrum(self):
        with pytest.raises(NoFluorescenceError):
            compute_spectrum(SystemParams(omega1=0.2, omega2=0.2, splitting=0.0, p=0), grid=GRID)

    def test_undriven_has_no_spectrum(self):
        with pytest.raises(NoFluorescenceError):
            compute_spectrum(SystemParams(omega1=0, omega2=0), grid=GRID)

    def test_singular_resolvent_names_offset(self, sidebands):
        L, steady = _solve(sidebands)
        B = np.array(L.b_matrix)
        # add an undamped oscillation at offset 0.5 to an otherwise stable generator
        B[0, 0] = 0.5j
        B[0, 1:] = 0
        fake = Liouvillian(B, L.i_vector, sidebands)
        with pytest.raises(NumericalError) as info:
            incoherent_spectrum(fake, steady, covariance_init(steady), sidebands, np.array([0.0, 0.5, 1.0]))
        assert info.value.diagnostics["omega"] == 0.5


class TestGrid:
    def test_uniform(self):
        grid = make_grid(5.0, 11)
        np.testing.assert_allclose(grid, np.linspace(-5, 5, 11))

    def test_refined_is_sorted_dense_and_symmetric(self):
        grid = make_grid(30.0, 4001, refine_width=1e-3)
        assert np.all(np.diff(grid) > 0)
        np.testing.assert_allclose(grid, -grid[::-1], atol=1e-15)
        inner = grid[np.abs(grid) < 1e-3]
        assert len(inner) > 200 and 0.0 in grid

    @pytest.mark.parametrize("span, points", [(0.0, 11), (-1.0, 11), (1.0, 2)])
    def test_invalid(self, span, points):
        with pytest.raises(PreconditionError):
            make_grid(span, points)

    def test_default_span(self, sidebands):
        assert default_span(sidebands) == 40.0
        assert default_span(sidebands.replace(detuning=-6.0)) == 60.0


class TestSumRule:
    def test_constant_across_parameters(self, sidebands, narrow):
        cs = [sum_rule_check(compute_spectrum(p, refine_center=True)).c for p in (sidebands, narrow)]
        assert cs[0] == pytest.approx(cs[1], rel=5e-3)
        assert cs[0] == pytest.approx(1.0, abs=1e-4)

    def test_residual_small(self, sidebands):
        result = sum_rule_check(compute_spectrum(sidebands))
        assert result.residual < 1e-3

    def test_insufficient_coverage(self, sidebands):
        with pytest.raises(PreconditionError):
            sum_rule_check(compute_spectrum(sidebands, span=20.0))

    def test_grid_halving_stable(self, narrow):
        coarse = sum_rule_check(compute_spectrum(narrow, refine_center=True)).c
        fine = sum_rule_check(compute_spectrum(narrow, points=8001, refine_center=True)).c
        assert fine == pytest.approx(coarse, rel=1e-3)
