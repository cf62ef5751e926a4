import pytest
from fractions import Fraction
from pathlib import Path
import logging
import sys

# Adjust import path
repo_root = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(repo_root))

from tools.errors import (
    NotHomogeneousError,
    NotInIdealError,
    NotInvariantError,
    PreconditionError,
    TruncationOrderError,
)
from tools.function_ring import FuncExpr, LambdaFuncSeries
from tools.reduction import (
    ReducedElement,
    ReductionContext,
    ideal_divide,
    ideal_generator,
    ideal_member,
    is_strongly_invariant,
    momentum_map,
    quantum_momentum,
    reduce_at_mu,
    reduced_star,
)
from tools.star_products import DSeries, star_hom_coefficients, star_invariant

N1 = 1


def _x(m):
    return FuncExpr.x_power(m, N1)


def _const(value):
    return FuncExpr.constant(value, N1)


def _series(*coeffs, order):
    return LambdaFuncSeries.from_coeffs(coeffs, order, n=N1)


class TestReductionContext:

    def test_level(self, ctx):
        assert ctx.level == 1
        assert ReductionContext(n=1, mu=Fraction(-3, 4)).level == Fraction(3, 2)

    def test_from_text(self):
        assert ReductionContext.from_text(2, " -1/3 ").mu == Fraction(-1, 3)

    def test_rejects_non_negative_mu(self):
        with pytest.raises(PreconditionError):
            ReductionContext(n=1, mu=Fraction(0))
        with pytest.raises(PreconditionError):
            ReductionContext.from_text(1, "1/2")

    def test_rejects_malformed_mu(self):
        with pytest.raises(PreconditionError):
            ReductionContext.from_text(1, "minus one")

    def test_rejects_negative_n(self):
        with pytest.raises(PreconditionError):
            ReductionContext(n=-1, mu=Fraction(-1))


class TestMomentumMaps:

    def test_classical(self):
        assert momentum_map(N1) == _x(1).scale(Fraction(-1, 2))

    def test_quantum_for_shifted_d(self, d_shift):
        """Test S_D J = -x/2 - lambda/2 for D = 1 + lambda."""
        qmm = quantum_momentum(d_shift, 2, N1)
        expected = _series(_x(1).scale(Fraction(-1, 2)), _const(Fraction(-1, 2)), order=2)
        assert qmm.equals(expected)

    def test_quantum_for_quadratic_d(self):
        """Test S_D J = -x/2 - lambda^2 / (2x) for D = 1 + lambda^2."""
        qmm = quantum_momentum(DSeries.from_d([0, 1], 3), 3, N1)
        expected = _series(_x(1).scale(Fraction(-1, 2)), FuncExpr.zero(N1), _x(-1).scale(Fraction(-1, 2)), order=3)
        assert qmm.equals(expected)

    def test_strong_invariance(self, d_one, d_shift):
        assert is_strongly_invariant(d_one)
        assert not is_strongly_invariant(d_shift)


class TestIdealGenerator:

    def test_order_zero(self, d_one, ctx):
        """Test g_0 = -(x - 1)/2 at mu = -1/2."""
        gen = ideal_generator(d_one, ctx, 2)
        assert gen[0].equals((_x(1) - _const(1)).scale(Fraction(-1, 2)))
        assert gen[1].is_zero() and gen[2].is_zero()

    def test_higher_orders_vanish_on_surface(self, d_cubic):
        ctx = ReductionContext(n=1, mu=Fraction(-1))
        gen = ideal_generator(d_cubic, ctx, 4)
        assert ideal_member(gen, ctx)
        assert not gen[3].is_zero()

    def test_quadratic_coefficient(self, ctx):
        """Test g_2 = -(x^-1 - 1)/2 for D = 1 + lambda^2 at mu = -1/2."""
        gen = ideal_generator(DSeries.from_d([0, 1], 3), ctx, 2)
        assert gen[2].equals((_x(-1) - _const(1)).scale(Fraction(-1, 2)))


class TestReduceAtMu:

    def test_replaces_x_by_level(self, phi):
        ctx = ReductionContext(n=1, mu=Fraction(-1))
        reduced = reduce_at_mu(phi.times_x(2) + _x(1), ctx)
        assert reduced[0].equals(phi.scale(4) + _const(2))

    def test_series(self, phi, psi, ctx):
        F = _series(phi.times_x(3), psi.times_x(-1), order=1)
        reduced = reduce_at_mu(F, ctx)
        assert reduced.series.equals(_series(phi, psi, order=1))

    def test_rejects_non_invariant(self, ctx):
        with pytest.raises(NotInvariantError):
            reduce_at_mu(FuncExpr.z(0, N1), ctx)

    def test_membership(self, phi, ctx):
        assert ideal_member(_x(1) - _const(1), ctx)
        assert ideal_member(phi.times_x(1) - phi, ctx)
        assert not ideal_member(phi.times_x(1) - _const(1), ctx)


class TestIdealDivide:

    def test_linear(self, d_one, ctx):
        """Test (x - 1) = G *^D g with G = -2."""
        G = ideal_divide(_x(1) - _const(1), d_one, ctx, 0)
        assert G[0].equals(_const(-2))

    def test_quadratic(self, d_one, ctx):
        """Test (x - 1)^2 = G *^D g with G = -2(x - 1)."""
        F = _x(2) - _x(1).scale(2) + _const(1)
        G = ideal_divide(F, d_one, ctx, 0)
        assert G[0].equals((_x(1) - _const(1)).scale(-2))

    def test_refutation_carries_witness(self, d_one, ctx):
        with pytest.raises(NotInIdealError) as exc_info:
            ideal_divide(_x(1), d_one, ctx, 0)
        assert exc_info.value.witness.equals(_const(1))

    def test_refutation_at_higher_order(self, phi, d_one, ctx):
        F = _series(FuncExpr.zero(N1), phi, order=1)
        with pytest.raises(NotInIdealError):
            ideal_divide(F, d_one, ctx, 1)

    def test_refutation_is_not_logged_as_error(self, d_one, ctx, caplog):
        with caplog.at_level(logging.DEBUG, logger="tools.reduction"):
            with pytest.raises(NotInIdealError):
                ideal_divide(_x(1), d_one, ctx, 0)
        assert caplog.records
        assert all(record.levelno < logging.WARNING for record in caplog.records)

    def test_round_trip(self, phi, psi, d_cubic):
        """Test ideal_divide(G *^D g) = G with non-trivial higher generator orders."""
        ctx = ReductionContext(n=1, mu=Fraction(-1))
        G = _series(phi.times_x(1) + _const(1), psi, phi.times_x(-1), FuncExpr.zero(N1), order=3)
        gen = ideal_generator(d_cubic, ctx, 3)
        F = star_invariant(G, gen, d_cubic, 3)
        assert ideal_divide(F, d_cubic, ctx, 3).equals(G)

    def test_round_trip_shifted(self, psi, chi, d_shift, ctx):
        G = _series(psi.times_x(2), chi, order=2)
        F = star_invariant(G, ideal_generator(d_shift, ctx, 2), d_shift, 2)
        assert ideal_divide(F, d_shift, ctx, 2).equals(G)


class TestReducedStar:

    def test_worked_example(self, phi, d_one, ctx):
        """Test phi *_mu phi = phi^2 + lambda phi (1 - phi) at mu = -1/2."""
        result = reduced_star(phi, phi, d_one, ctx, 1)
        expected = _series(phi * phi, phi * (_const(1) - phi), order=1)
        assert result.series.equals(expected)

    def test_unit(self, psi, d_shift, ctx):
        one = _const(1)
        assert reduced_star(one, psi, d_shift, ctx, 3).series.equals(_series(psi, order=3))
        assert reduced_star(psi, one, d_shift, ctx, 3).series.equals(_series(psi, order=3))

    def test_mu_scaling(self, psi, chi, d_shift, ctx):
        """Test the lambda^k coefficient scales as (-2 mu)^-k."""
        other = ReductionContext(n=1, mu=Fraction(-1))
        base = reduced_star(psi, chi, d_shift, ctx, 3)
        scaled = reduced_star(psi, chi, d_shift, other, 3)
        for k in range(4):
            assert scaled[k].equals(base[k].scale(Fraction(1, 2 ** k)))

    def test_matches_homogeneous_coefficients(self, psi, chi, d_cubic, ctx):
        result = reduced_star(psi, chi, d_cubic, ctx, 4)
        coeffs = star_hom_coefficients(psi, chi, d_cubic, 4)
        for k in range(5):
            assert result[k].equals(coeffs[k])

    def test_compatible_with_reduction(self, phi, psi, d_shift):
        """Test (F *^D G)_mu = F_mu *^D_mu G_mu."""
        ctx = ReductionContext(n=1, mu=Fraction(-3, 2))
        F = phi.times_x(1) + _x(-1)
        G = psi.times_x(2)
        lhs = reduce_at_mu(star_invariant(F, G, d_shift, 3), ctx)
        rhs = reduced_star(reduce_at_mu(F, ctx), reduce_at_mu(G, ctx), d_shift, ctx, 3)
        assert lhs.equals(rhs)

    def test_rejects_operands_below_requested_order(self, phi, d_one, ctx):
        short = ReducedElement(_series(phi, phi, order=1))
        with pytest.raises(TruncationOrderError):
            reduced_star(short, phi, d_one, ctx, 4)
        with pytest.raises(TruncationOrderError):
            reduced_star(phi, short, d_one, ctx, 4)

    def test_reduced_element_requires_homogeneous(self):
        with pytest.raises(NotHomogeneousError):
            ReducedElement(_series(_x(1), order=0))

    def test_reduced_element_passes_through(self, phi):
        element = ReducedElement.of(phi, 2)
        assert ReducedElement.of(element, 5) is element
        assert element.order == 2
