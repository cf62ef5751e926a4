"""Shared pytest fixtures for cpn_star_reduction tests."""

import pytest
from fractions import Fraction
from pathlib import Path

# Add parent directory to path for imports
import sys
repo_root = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(repo_root))

from tools.function_ring import FuncExpr
from tools.reduction import ReductionContext
from tools.star_products import DSeries


@pytest.fixture
def phi():
    """z0 zb0 x^-1 on CP^1."""
    return FuncExpr.monomial((1, 0), (1, 0), -1)


@pytest.fixture
def psi():
    """z0 zb1 x^-1 on CP^1."""
    return FuncExpr.monomial((1, 0), (0, 1), -1)


@pytest.fixture
def chi():
    """z1 zb0 x^-1 on CP^1."""
    return FuncExpr.monomial((0, 1), (1, 0), -1)


@pytest.fixture
def ctx():
    """n = 1, mu = -1/2, so the constraint surface is x = 1."""
    return ReductionContext(n=1, mu=Fraction(-1, 2))


@pytest.fixture
def d_one():
    return DSeries.one(5)


@pytest.fixture
def d_shift():
    """D = 1 + lambda."""
    return DSeries.from_d([1], 5)


@pytest.fixture
def d_cubic():
    """D = 1 + lambda + 5 lambda^3."""
    return DSeries.from_d([1, 0, 5], 5)


@pytest.fixture
def cp1_basis():
    return [
        FuncExpr.monomial(alpha, beta, -1)
        for alpha in ((1, 0), (0, 1))
        for beta in ((1, 0), (0, 1))
    ]
