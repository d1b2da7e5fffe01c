"""
Unit Tests for Bounds Module

Tests each bound evaluator against hand-evaluated values, the regime
selection rule and hypothesis validation.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import math

import pytest

from src.bounds import (
    ManifoldClass,
    Regime,
    RicciSignConvention,
    cheng_function_bound,
    connection_laplacian_bound,
    hodge_bound,
    local_dirichlet_bound,
    neg_ricci_bound,
    nonneg_ricci_bound,
    savo_hyperbolic_sigma,
    sigma_p_bounds,
    volume_bound,
    volume_bound_chain,
)
from src.errors import DomainError, HypothesisError

J01 = 2.404825557695773
NEG = RicciSignConvention.NEGATIVE_LOWER_BOUND


@pytest.fixture
def torus_class():
    """Flat torus class: n=2, xi=0, D=sqrt(2) pi, rH=pi"""
    return ManifoldClass(n=2, xi=0.0, rH=math.pi, D=math.sqrt(2) * math.pi)


class TestManifoldClass:
    """Test class validation"""

    def test_dimension_below_two_rejected(self):
        with pytest.raises(DomainError):
            ManifoldClass(n=1, xi=0.0)

    def test_non_positive_radius_rejected(self):
        with pytest.raises(DomainError):
            ManifoldClass(n=2, xi=0.0, rH=0.0)

    def test_harmonic_radius_above_injectivity_rejected(self):
        with pytest.raises(HypothesisError) as excinfo:
            ManifoldClass(n=2, xi=0.0, rH=2.0, r0=1.0)
        assert excinfo.value.hypothesis == "rH <= r0"

    def test_myers_bound_enforced(self):
        with pytest.raises(HypothesisError):
            ManifoldClass(n=2, xi=1.0, D=4.0)

    def test_negative_convention_requires_non_negative_xi(self):
        with pytest.raises(HypothesisError):
            ManifoldClass(n=2, xi=-1.0, convention=NEG)

    def test_model_space_flips_sign_under_negative_convention(self):
        mc = ManifoldClass(n=3, xi=1.0, convention=NEG)
        assert mc.model_space().xi == -1.0

    def test_to_dict_echoes_convention(self):
        assert ManifoldClass(n=2, xi=0.0).to_dict()["convention"] == "LowerBound"


class TestChengFunctionBound:
    """Test the function-case bound"""

    def test_flat_three_dimensional(self):
        result = cheng_function_bound(ManifoldClass(n=3, xi=0.0, D=2.0), 1)
        assert result.value == pytest.approx(math.pi ** 2, rel=1e-12)
        assert result.source == "Thm 1.1"

    def test_flat_two_dimensional(self):
        result = cheng_function_bound(ManifoldClass(n=2, xi=0.0, D=2.0), 1)
        assert result.value == pytest.approx(J01 ** 2, rel=1e-12)

    def test_second_eigenvalue_uses_half_radius(self):
        result = cheng_function_bound(ManifoldClass(n=2, xi=0.0, D=2.0), 2)
        assert result.value == pytest.approx(4 * J01 ** 2, rel=1e-12)

    def test_missing_diameter(self):
        with pytest.raises(HypothesisError) as excinfo:
            cheng_function_bound(ManifoldClass(n=2, xi=0.0), 1)
        assert "diameter" in excinfo.value.hypothesis


class TestHodgeBound:
    """Test the main Hodge Laplacian bound"""

    def test_torus_first_eigenvalue(self, torus_class):
        result = hodge_bound(torus_class, 1, 0)
        expected = 2 * J01 ** 2 * (2 / (math.sqrt(2) * math.pi)) ** 2
        assert result.value == pytest.approx(expected, rel=1e-6)
        assert result.value == pytest.approx(2.343837, abs=1e-5)
        assert result.regime == Regime.LARGE_K
        assert result.source == "Thm 1.2"

    def test_small_k_regime(self):
        mc = ManifoldClass(n=3, xi=0.0, D=2.0, rH=0.5)
        result = hodge_bound(mc, 1, 0)
        assert result.regime == Regime.SMALL_K
        assert result.value == pytest.approx(8 * math.pi ** 2, rel=1e-12)

    def test_regime_tie_takes_minimum(self):
        mc = ManifoldClass(n=3, xi=0.0, D=2.0, rH=0.5)
        result = hodge_bound(mc, 2, 0)
        assert result.regime == Regime.LARGE_K
        assert result.value == pytest.approx(8 * math.pi ** 2, rel=1e-12)

    def test_p_factor_is_four(self, torus_class):
        assert hodge_bound(torus_class, 3, 1).value == pytest.approx(
            4 * hodge_bound(torus_class, 3, 0).value, rel=1e-14
        )

    def test_missing_harmonic_radius(self):
        with pytest.raises(HypothesisError):
            hodge_bound(ManifoldClass(n=2, xi=0.0, D=1.0), 1, 0)

    def test_wrong_convention(self):
        mc = ManifoldClass(n=2, xi=1.0, D=1.0, rH=1.0, convention=NEG)
        with pytest.raises(HypothesisError):
            hodge_bound(mc, 1, 0)

    def test_invalid_k(self, torus_class):
        with pytest.raises(DomainError):
            hodge_bound(torus_class, 0, 0)

    def test_invalid_p(self, torus_class):
        with pytest.raises(DomainError):
            hodge_bound(torus_class, 1, 3)


class TestNonnegRicciBound:
    """Test the closed-form non-negative Ricci bound"""

    def test_torus_k2(self, torus_class):
        result = nonneg_ricci_bound(torus_class, 2, 0)
        assert result.value == pytest.approx(16.0, rel=1e-12)
        assert result.regime == Regime.LARGE_K
        assert result.source == "Cor 3.3"

    def test_small_k_three_dimensional(self):
        mc = ManifoldClass(n=3, xi=0.0, D=10.0, rH=1.0)
        result = nonneg_ricci_bound(mc, 1, 1)
        assert result.regime == Regime.SMALL_K
        assert result.value == pytest.approx(18 * math.pi ** 2, rel=1e-12)

    def test_negative_curvature_rejected(self):
        with pytest.raises(HypothesisError):
            nonneg_ricci_bound(ManifoldClass(n=2, xi=-1.0, D=1.0, rH=1.0), 1, 0)

    @pytest.mark.parametrize("k", range(1, 21))
    def test_dominates_hodge_bound_on_torus(self, torus_class, k):
        closed_form = nonneg_ricci_bound(torus_class, k, 0).value
        assert closed_form >= hodge_bound(torus_class, k, 0).value * (1 - 1e-12)


class TestNegRicciBound:
    """Test the parity-split negative Ricci bound"""

    def test_even_large_k(self):
        mc = ManifoldClass(n=2, xi=1.0, D=2 * math.pi, rH=math.pi, convention=NEG)
        result = neg_ricci_bound(mc, 4, 0)
        assert result.value == pytest.approx(128.5, rel=1e-12)
        assert result.source == "Cor 3.4(even)"

    def test_odd_small_k(self):
        mc = ManifoldClass(n=3, xi=0.0, D=10.0, rH=1.0, convention=NEG)
        result = neg_ricci_bound(mc, 1, 0)
        assert result.regime == Regime.SMALL_K
        assert result.value == pytest.approx(8 * (1 + math.pi ** 2), rel=1e-12)
        assert result.source == "Cor 3.4(odd)"

    @pytest.mark.parametrize("k", [1, 2, 5, 10])
    @pytest.mark.parametrize("p", [0, 1, 2])
    def test_dominates_nonneg_bound_at_zero_curvature(self, k, p):
        lower = ManifoldClass(n=2, xi=0.0, D=3.0, rH=1.0)
        negative = ManifoldClass(n=2, xi=0.0, D=3.0, rH=1.0, convention=NEG)
        assert neg_ricci_bound(negative, k, p).value >= nonneg_ricci_bound(lower, k, p).value


class TestVolumeBound:
    """Test the volume bound and its intermediate chain"""

    @pytest.fixture
    def hyperbolic_class(self):
        return ManifoldClass(n=2, xi=-1.0, rH=1.0, V=4 * math.pi)

    def test_value(self, hyperbolic_class):
        result = volume_bound(hyperbolic_class, 10, 0)
        assert result.value == pytest.approx(1408.0, rel=1e-12)
        assert result.source == "Thm 3.5"

    def test_below_threshold_not_applicable(self, hyperbolic_class):
        result = volume_bound(hyperbolic_class, 8, 0)
        assert result.regime == Regime.NOT_APPLICABLE
        assert result.value is None
        assert result.notes

    def test_doubling_volume_halves_value(self):
        base = volume_bound(ManifoldClass(n=2, xi=-1.0, rH=1.0, V=4 * math.pi), 20, 0).value
        doubled = volume_bound(ManifoldClass(n=2, xi=-1.0, rH=1.0, V=8 * math.pi), 20, 0).value
        assert doubled == pytest.approx(base / 2, rel=1e-12)

    def test_requires_negative_curvature(self):
        with pytest.raises(HypothesisError):
            volume_bound(ManifoldClass(n=2, xi=0.0, rH=1.0, V=1.0), 10, 0)

    def test_chain_orders_its_estimates(self, hyperbolic_class):
        chain = volume_bound_chain(hyperbolic_class, 10, 0)
        assert chain.x == pytest.approx(math.sqrt(1 / 11), rel=1e-12)
        assert chain.x < 1
        assert chain.eps < 1.0
        assert chain.ratio_bound <= chain.sinh_bound <= chain.final
        assert chain.final == pytest.approx(1408.0, rel=1e-12)


class TestConnectionLaplacianBound:
    """Test the connection Laplacian bound"""

    def test_torus(self):
        result = connection_laplacian_bound(ManifoldClass(n=2, xi=0.0, rH=math.pi), p=1)
        assert result.value == pytest.approx(32.0, rel=1e-12)
        assert result.regime == Regime.GLOBAL

    def test_three_dimensional(self):
        result = connection_laplacian_bound(ManifoldClass(n=3, xi=0.0, rH=1.0), p=1)
        assert result.value == pytest.approx(72 * math.pi ** 2, rel=1e-12)

    def test_doubling_radius_quarters_value(self):
        a = connection_laplacian_bound(ManifoldClass(n=2, xi=0.0, rH=1.0)).value
        b = connection_laplacian_bound(ManifoldClass(n=2, xi=0.0, rH=2.0)).value
        assert b == pytest.approx(a / 4, rel=1e-14)


class TestLocalDirichletBound:
    """Test the ball bound"""

    def test_flat_ball(self):
        mc = ManifoldClass(n=3, xi=0.0, rH=2.0)
        result = local_dirichlet_bound(mc, 1.0, 1)
        assert result.value == pytest.approx(8 * math.pi ** 2, rel=1e-12)
        assert result.source == "Lem 3.1"

    def test_radius_above_harmonic_radius(self):
        with pytest.raises(HypothesisError):
            local_dirichlet_bound(ManifoldClass(n=3, xi=0.0, rH=1.0), 1.5, 0)


class TestSigmaBounds:
    """Test bounds on the bottom of the L^2 spectrum"""

    def test_infinite_harmonic_radius(self):
        mc = ManifoldClass(n=3, xi=1.0, rH=math.inf, convention=NEG)
        (result,) = sigma_p_bounds(mc, 3)
        assert result.value == pytest.approx(128.0, rel=1e-12)
        assert result.source == "Cor 4.2"

    def test_finite_harmonic_radius(self):
        (result,) = sigma_p_bounds(ManifoldClass(n=3, xi=0.0, rH=1.0), 0)
        assert result.value == pytest.approx(2 * math.pi ** 2, rel=1e-12)
        assert result.source == "Thm 4.5"

    def test_p_increment_scales_by_four(self):
        mc = ManifoldClass(n=3, xi=1.0, rH=math.inf, convention=NEG)
        assert sigma_p_bounds(mc, 2)[0].value == pytest.approx(4 * sigma_p_bounds(mc, 1)[0].value)

    def test_flat_infinite_radius_bound_is_zero(self):
        mc = ManifoldClass(n=4, xi=0.0, rH=math.inf, convention=NEG)
        (result,) = sigma_p_bounds(mc, 2)
        assert result.value == 0.0
        assert result.regime == Regime.GLOBAL

    def test_infinite_radius_needs_negative_convention(self):
        with pytest.raises(HypothesisError):
            sigma_p_bounds(ManifoldClass(n=3, xi=1.0, rH=math.inf), 0)


class TestSavoHyperbolicSigma:
    """Test the hyperbolic space values"""

    def test_low_degree_is_zero(self):
        assert savo_hyperbolic_sigma(3, 1) == 0.0

    def test_top_degree(self):
        assert savo_hyperbolic_sigma(3, 3) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_below_infinite_radius_bound(self, n):
        mc = ManifoldClass(n=n, xi=1.0, rH=math.inf, convention=NEG)
        for p in range(n + 1):
            assert savo_hyperbolic_sigma(n, p) <= sigma_p_bounds(mc, p)[0].value
