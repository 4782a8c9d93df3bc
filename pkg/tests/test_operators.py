import math

import numpy as np
import pytest

from majorfix import (
    CompositionSpec,
    ConstantModulus,
    Grid,
    HammersteinSpec,
    HammersteinTerm,
    LipschitzPairSet,
    MajorantProfile,
    MultilinearSpec,
    PowerGrowthModulusSpec,
    PowerSumModulus,
    StoppingRule,
    UrysohnSpec,
    analyze,
    build_composition,
    build_hammerstein_lp,
    build_hammerstein_sup,
    build_multilinear,
    build_power_modulus,
    build_superposition_modulus,
    build_urysohn,
    iterate,
    multilinear_critical_shift,
)
from helpers import lipschitz_increment_holds, quadratic_radii


def bisect_root(fn, lo, hi, iters=200):
    """Brute-force sign bisection, independent of the library solvers."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestMultilinear:
    def test_scalar_quadratic_matches_core_oracle(self):
        op = build_multilinear(MultilinearSpec(1, 2, 1.0, 0.1875), 1.0)
        assert op.profile.center_shift == 0.1875
        assert isinstance(op.profile.modulus, PowerSumModulus)
        assert op.profile.modulus.terms == ((2.0, 1.0),)
        report = analyze(op.profile)
        assert report.convergence_radius == pytest.approx(0.25, abs=1e-10)

    def test_zero_constant_term(self):
        op = build_multilinear(MultilinearSpec(1, 2, 1.0, 0.0), 1.0)
        assert op.profile.center_shift == 0.0
        x, trace = iterate(op, np.zeros(1), StoppingRule(bound_tol=1e-12))
        assert trace.steps == [] and x[0] == 0.0

    def test_cubic_against_brute_force_root(self):
        op = build_multilinear(MultilinearSpec(1, 3, 1.0, 0.2), 1.0)
        report = analyze(op.profile)
        oracle = bisect_root(lambda r: 0.2 + r**3 - r, 0.0, 0.5)
        assert report.convergence_radius == pytest.approx(oracle, abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            build_multilinear(MultilinearSpec(2, 2, np.zeros((2, 2, 2)), 0.5), 1.0)
        with pytest.raises(ValueError):
            build_multilinear(
                MultilinearSpec(2, 2, np.zeros((2, 2)), [0.1, 0.1]), 1.0)

    def test_norm_estimation_conservative(self):
        tensor = np.zeros((2, 2, 2))
        tensor[0, 0, 1] = tensor[0, 1, 0] = 0.5   # true bilinear norm 0.5
        op = build_multilinear(
            MultilinearSpec(2, 2, tensor, [0.05, 0.08], seed=7), 1.0)
        estimated = op.profile.modulus.terms[0][0]  # C * m
        assert 1.0 <= estimated <= 1.12

    def test_estimated_norm_passes_increment_check(self, rng):
        tensor = np.zeros((2, 2, 2))
        tensor[0, 0, 1] = tensor[0, 1, 0] = 0.5
        op = build_multilinear(
            MultilinearSpec(2, 2, tensor, [0.05, 0.08], seed=7), 1.0)
        lipschitz_increment_holds(op, rng, count=200)

    @pytest.mark.parametrize("c,m,expected", [
        (1.0, 2, 0.25),
        (1.0, 3, (1.0 / 3.0) ** 0.5 * (2.0 / 3.0)),
        (2.0, 2, 0.125),
    ])
    def test_critical_shift_closed_form(self, c, m, expected):
        assert multilinear_critical_shift(c, m) == pytest.approx(expected, abs=1e-12)

    def test_critical_shift_is_peak_clearance(self):
        rs = np.linspace(0.0, 2.0, 200_001)
        for c, m in [(0.5, 2), (1.0, 3), (2.0, 4)]:
            brute = float(np.max(rs - c * rs**m))
            assert multilinear_critical_shift(c, m) == pytest.approx(brute, abs=1e-6)


SEPARABLE = HammersteinSpec(
    (0.0, 1.0),
    (HammersteinTerm(lambda t, s: t * s, lambda u: u**2,
                     PowerSumModulus(((2.0, 1.0),))),),
    0.1,
    lambda t: np.asarray(t, dtype=float),
)
BETA = (1.0 - math.sqrt(0.9)) / 0.05


class TestHammersteinSup:
    def test_separable_instance(self):
        grid = Grid.simpson(0.0, 1.0, 201)
        op = build_hammerstein_sup(SEPARABLE, grid, 3.0)
        assert op.profile.center_shift == pytest.approx(1.0, abs=1e-12)
        assert op.profile.slope(1.0) == pytest.approx(0.1, abs=1e-12)
        report = analyze(op.profile)
        oracle = quadratic_radii(1.0, 0.05, 3.0)
        assert report.convergence_radius == pytest.approx(oracle["convergence"], abs=1e-9)
        assert report.inner_radius == pytest.approx(oracle["inner"], abs=1e-9)
        assert report.inner_radius <= BETA <= report.convergence_radius

    def test_lambda_zero_decouples(self):
        spec = HammersteinSpec(
            (0.0, 1.0), SEPARABLE.terms, 0.0, lambda t: np.asarray(t, dtype=float))
        grid = Grid.simpson(0.0, 1.0, 51)
        op = build_hammerstein_sup(spec, grid, 2.0)
        assert op.profile.center_shift == pytest.approx(1.0, abs=1e-14)
        assert op.profile.slope(1.5) == 0.0
        x, _ = iterate(op, op.center, StoppingRule(bound_tol=1e-11, max_steps=10))
        assert np.allclose(x, grid.nodes, atol=1e-12)

    def test_two_summand_modulus_merges(self):
        spec = HammersteinSpec(
            (0.0, 1.0),
            (
                HammersteinTerm(lambda t, s: np.ones_like(t * s),
                                lambda u: np.sin(u), ConstantModulus(1.0)),
                HammersteinTerm(lambda t, s: t * s, lambda u: u**2,
                                PowerSumModulus(((2.0, 1.0),))),
            ),
            0.5,
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        )
        grid = Grid.simpson(0.0, 1.0, 101)
        op = build_hammerstein_sup(spec, grid, 1.0)
        assert isinstance(op.profile.modulus, PowerSumModulus)
        flat = [value for term in op.profile.modulus.terms for value in term]
        assert flat == pytest.approx([0.5, 0.0, 0.5, 1.0], abs=1e-12)

    def test_kernel_norm_richardson_ratio(self):
        # exp kernel has genuine trapezoid error; halving h divides it by ~4
        exact = math.e - 1.0
        errors = []
        for n in (17, 33, 65):
            grid = Grid.trapezoid(0.0, 1.0, n)
            mat = np.exp(np.outer(grid.nodes, grid.nodes))
            errors.append(abs(float(np.max(np.abs(mat) @ grid.weights)) - exact))
        assert 3.5 <= errors[0] / errors[1] <= 4.5
        assert 3.5 <= errors[1] / errors[2] <= 4.5

    def test_nystrom_fixed_point_converges_at_quadrature_order(self):
        errors = []
        for n in (17, 33, 65):
            grid = Grid.trapezoid(0.0, 1.0, n)
            op = build_hammerstein_sup(SEPARABLE, grid, 3.0)
            x, _ = iterate(op, op.center,
                           StoppingRule(bound_tol=1e-12, max_steps=2000))
            errors.append(abs(float(np.max(np.abs(x))) - BETA))
        assert 3.0 <= errors[0] / errors[1] <= 5.0
        assert 3.0 <= errors[1] / errors[2] <= 5.0

    def test_missing_term_modulus_rejected(self):
        spec = HammersteinSpec(
            (0.0, 1.0),
            (HammersteinTerm(lambda t, s: t * s, lambda u: u),),
            1.0, lambda t: np.zeros_like(np.asarray(t, dtype=float)))
        grid = Grid.simpson(0.0, 1.0, 11)
        with pytest.raises(ValueError):
            build_hammerstein_sup(spec, grid, 1.0)


class TestSuperpositionModulus:
    def test_two_curve_envelope(self):
        pairs = LipschitzPairSet(((1.0, 0.0), (0.0, 1.0)))
        h = build_superposition_modulus(pairs, 2.0, 1.0, 1.0, radius=2.0)
        for r in (0.0, 0.25, 0.5, 1.0, 1.7, 2.0):
            assert h(r) == pytest.approx(min(1.0, r), abs=1e-12)

    def test_single_constant_pair(self):
        h = build_superposition_modulus(
            LipschitzPairSet(((2.0, 0.0),)), 2.0, 1.0, 4.0)
        assert isinstance(h, ConstantModulus)
        assert h(0.3) == pytest.approx(2.0 * 4.0 ** 0.5, abs=1e-12)

    def test_equal_exponents_degenerate(self):
        h = build_superposition_modulus(
            LipschitzPairSet(((1.0, 1.0),)), 2.0, 2.0, 1.0)
        assert h(0.0) == h(5.0) == 2.0

    def test_pair_validation(self):
        with pytest.raises(ValueError):
            LipschitzPairSet(())
        with pytest.raises(ValueError):
            LipschitzPairSet(((-1.0, 0.0),))


class TestHammersteinLp:
    def test_modulus_composition(self):
        pairs = LipschitzPairSet(((1.0, 0.0), (0.0, 1.0)))
        envelope = build_superposition_modulus(pairs, 2.0, 1.0, 1.0, radius=2.0)
        grid = Grid.simpson(0.0, 1.0, 101)
        spec = HammersteinSpec(
            (0.0, 1.0),
            (HammersteinTerm(lambda t, s: t * s, lambda u: u**2),),
            1.0,
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        )
        op = build_hammerstein_lp(spec, [envelope], [1.0 / 3.0], 2.0, grid, 2.0)
        for r in (0.5, 1.0, 2.0):
            assert op.profile.slope(r) == pytest.approx(min(1.0, r) / 3.0, abs=1e-9)

    def test_zero_norms_zero_modulus(self):
        grid = Grid.simpson(0.0, 1.0, 51)
        spec = HammersteinSpec(
            (0.0, 1.0),
            (HammersteinTerm(lambda t, s: t * s, lambda u: u),),
            1.0, lambda t: np.asarray(t, dtype=float))
        op = build_hammerstein_lp(spec, [ConstantModulus(1.0)], [0.0], 2.0, grid, 2.0)
        assert op.profile.slope(1.3) == 0.0

    def test_linear_instance_converges(self):
        grid = Grid.simpson(0.0, 1.0, 101)
        spec = HammersteinSpec(
            (0.0, 1.0),
            (HammersteinTerm(lambda t, s: t * s, lambda u: u),),
            0.3, lambda t: np.asarray(t, dtype=float))
        op = build_hammerstein_lp(spec, [ConstantModulus(1.0)], [1.0 / 3.0],
                                  2.0, grid, 2.0)
        assert op.profile.center_shift == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-10)
        x, trace = iterate(op, op.center, StoppingRule(bound_tol=1e-10, max_steps=200))
        assert trace.status == "converged"
        # x(t) = t + 0.3 t int s x(s) ds resolves to x(t) = c t with
        # c = 1 / (1 - 0.3 / 3)
        assert np.allclose(x, grid.nodes / 0.9, atol=1e-9)


class TestUrysohn:
    def test_constant_moduli_integral(self):
        spec = UrysohnSpec(
            (0.0, 2.0),
            lambda t, s, u, v: 0.05 * (u + v),
            lambda t, s, r: 0.05 + 0.0 * (t + s),
            lambda t, s, r: 0.05 + 0.0 * (t + s),
        )
        grid = Grid.simpson(0.0, 2.0, 51)
        op = build_urysohn(spec, grid, 1.0)
        assert op.profile.slope(0.7) == pytest.approx(2.0 * 0.05 * 2.0, abs=1e-12)

    def test_kernel_independent_of_state(self):
        spec = UrysohnSpec(
            (0.0, 1.0),
            lambda t, s, u, v: t + s + 0.0 * u + 0.0 * v,
            lambda t, s, r: 0.0 * (t + s),
            lambda t, s, r: 0.0 * (t + s),
        )
        grid = Grid.simpson(0.0, 1.0, 101)
        op = build_urysohn(spec, grid, 2.0)
        assert op.profile.slope(1.0) == 0.0
        x, _ = iterate(op, op.center, StoppingRule(bound_tol=1e-11, max_steps=10))
        assert np.allclose(x, grid.nodes + 0.5, atol=1e-12)

    def test_mixed_quadratic_demo_matches_hand_modulus(self):
        spec = UrysohnSpec(
            (0.0, 1.0),
            lambda t, s, u, v: 0.2 * t + 0.1 * s * u**2 + 0.05 * v,
            lambda t, s, r: 0.2 * s * r + 0.0 * t,
            lambda t, s, r: 0.05 + 0.0 * (t + s),
        )
        grid = Grid.simpson(0.0, 1.0, 101)
        op = build_urysohn(spec, grid, 1.0)
        for r in (0.0, 0.3, 1.0):
            assert op.profile.slope(r) == pytest.approx(0.1 * r + 0.05, abs=1e-10)
        report = analyze(op.profile)
        # K(r) = 0.05 r^2 + 0.05 r, displacement 0.2: quadratic oracle
        root = bisect_root(lambda r: 0.2 + 0.05 * r**2 + 0.05 * r - r, 0.0, 0.5)
        assert report.convergence_radius == pytest.approx(root, abs=1e-9)

    def test_non_monotone_modulus_rejected(self):
        spec = UrysohnSpec(
            (0.0, 1.0),
            lambda t, s, u, v: 0.0 * (t + s + u + v),
            lambda t, s, r: max(0.0, 0.5 - r) + 0.0 * (t + s),
            lambda t, s, r: 0.0 * (t + s),
        )
        grid = Grid.simpson(0.0, 1.0, 11)
        with pytest.raises(ValueError):
            build_urysohn(spec, grid, 1.0)


class TestComposition:
    def test_constant_moduli_formula(self):
        c1, c2, c3 = 0.3, 0.2, 0.4
        spec = CompositionSpec(
            (0.0, 1.0),
            lambda t, u, v: 0.1 * t + 0.0 * u + 0.0 * v,
            lambda t, r, rho: c1 + 0.0 * np.asarray(t, dtype=float),
            lambda t, r, rho: c2 + 0.0 * np.asarray(t, dtype=float),
            lambda t, s, u: 0.0 * (t + s + u),
            lambda t, s, r: 0.1 + 0.0 * (t + s),
            lambda t, s, r: c3 + 0.0 * (t + s),
        )
        grid = Grid.simpson(0.0, 1.0, 51)
        op = build_composition(spec, grid, 1.0)
        assert op.profile.slope(0.6) == pytest.approx(c1 + c2 * c3 * 1.0, abs=1e-12)

    def test_outer_projection_reduces_to_urysohn(self):
        comp = CompositionSpec(
            (0.0, 1.0),
            lambda t, u, v: v + 0.0 * u + 0.0 * np.asarray(t, dtype=float),
            lambda t, r, rho: 0.0 * np.asarray(t, dtype=float),
            lambda t, r, rho: 1.0 + 0.0 * np.asarray(t, dtype=float),
            lambda t, s, u: s * u**2 + 0.0 * t,
            lambda t, s, r: s * r**2 + 0.0 * t,
            lambda t, s, r: 2.0 * s * r + 0.0 * t,
        )
        ury = UrysohnSpec(
            (0.0, 1.0),
            lambda t, s, u, v: s * u**2 + 0.0 * t + 0.0 * v,
            lambda t, s, r: 2.0 * s * r + 0.0 * t,
            lambda t, s, r: 0.0 * (t + s),
        )
        grid = Grid.simpson(0.0, 1.0, 51)
        op_c = build_composition(comp, grid, 0.9)
        op_u = build_urysohn(ury, grid, 0.9)
        x = 0.3 * np.sin(grid.nodes) + 0.1
        assert np.allclose(op_c.apply(x), op_u.apply(x), atol=1e-13)
        for r in (0.2, 0.9):
            assert op_c.profile.slope(r) == pytest.approx(
                op_u.profile.slope(r), abs=1e-10)

    def test_affine_demo_hand_modulus(self):
        spec = CompositionSpec(
            (0.0, 1.0),
            lambda t, u, v: 0.5 * u + 0.25 * v + 0.0 * np.asarray(t, dtype=float),
            lambda t, r, rho: 0.5 + 0.0 * np.asarray(t, dtype=float),
            lambda t, r, rho: 0.25 + 0.0 * np.asarray(t, dtype=float),
            lambda t, s, u: s * u**2 + 0.0 * t,
            lambda t, s, r: s * r**2 + 0.0 * t,
            lambda t, s, r: 2.0 * s * r + 0.0 * t,
        )
        grid = Grid.simpson(0.0, 1.0, 101)
        op = build_composition(spec, grid, 1.0)
        for r in (0.0, 0.4, 1.0):
            assert op.profile.slope(r) == pytest.approx(0.5 + 0.25 * r, abs=1e-10)


class TestPowerModulus:
    def test_plain_terms(self):
        modulus = build_power_modulus(PowerGrowthModulusSpec(terms=((1.0, 1.0),)))
        assert modulus(0.7) == pytest.approx(0.7, abs=1e-15)
        assert modulus.primitive(1.0) == pytest.approx(0.5, abs=1e-15)

    def test_single_constant_term(self):
        modulus = build_power_modulus(PowerGrowthModulusSpec(terms=((0.3, 0.0),)))
        assert isinstance(modulus, PowerSumModulus)
        assert modulus(2.0) == 0.3

    def test_composition_factor_collapses_at_zero_exponents(self):
        spec = PowerGrowthModulusSpec(
            terms=((0.3, 0.0),), offset=0.1,
            pair_set=LipschitzPairSet(((0.2, 0.0),)),
            growth_exponent=0.5)
        modulus = build_power_modulus(spec)
        assert modulus(1.7) == pytest.approx(0.16, abs=1e-15)

    def test_envelope_factor_tabulated(self):
        spec = PowerGrowthModulusSpec(
            terms=((0.3, 1.0),), offset=0.05,
            pair_set=LipschitzPairSet(((0.2, 0.1), (0.6, 0.0))),
            growth_terms=((1.0, 1.0),), growth_exponent=0.5,
            radius=2.0, samples=2001)
        modulus = build_power_modulus(spec)
        for r in (0.5, 1.0, 2.0):
            factor = min(0.2 + 0.1 * r**0.5, 0.6)
            assert modulus(r) == pytest.approx(0.05 + factor * 0.3 * r, rel=1e-4)

    def test_exponent_order_enforced(self):
        with pytest.raises(ValueError):
            PowerGrowthModulusSpec(terms=((1.0, 2.0), (1.0, 1.0)))

    def test_exponent_range_enforced(self):
        with pytest.raises(ValueError):
            PowerGrowthModulusSpec(terms=((1.0, 3.0),), max_exponent=2.0)
