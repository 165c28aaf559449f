# tests/test_clifford_newton.py
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from backend.engines import clifford_newton as cn
from backend.engines import zipcox
from backend.models.models import NewtonKind, Parity, PrimeBehavior, SlopeMultiset

HALF = Fraction(1, 2)


def slopes(counts):
    return SlopeMultiset.from_counts({Fraction(s): k for s, k in counts.items()})


def random_element(algebra, rng, even=False):
    indices = range(1, algebra.size + 1)
    if even:
        basis = algebra.even_basis()
    else:
        basis = [mono for k in range(algebra.size + 1) for mono in combinations(indices, k)]
    picks = rng.choice(len(basis), size=4, replace=False)
    return algebra.element({basis[i]: int(rng.integers(-3, 4)) for i in picks})


def test_hyperbolic_pair_relations():
    algebra = cn.CliffordAlgebra([[0, HALF], [HALF, 0]])
    e, f = algebra.gen(1), algebra.gen(2)
    assert e * f + f * e == 1
    u = e * f
    assert u * u == u
    assert f * e == algebra.one() - u


def test_square_of_orthogonal_product():
    algebra = cn.CliffordAlgebra([[2, 0], [0, 3]])
    d = algebra.gen(1) * algebra.gen(2)
    assert d * d == -6
    assert algebra.gen(1) * algebra.gen(1) == 2


def test_multiplication_is_associative(seed):
    algebra = cn.newton_algebra(3, Parity.ODD)
    rng = np.random.default_rng(seed)
    for _ in range(10):
        a, b, c = (random_element(algebra, rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_even_part_is_closed(seed):
    algebra = cn.newton_algebra(2, Parity.EVEN_SPLIT)
    rng = np.random.default_rng(seed)
    for _ in range(10):
        a, b = random_element(algebra, rng, even=True), random_element(algebra, rng, even=True)
        assert (a * b).is_even()


def test_gram_validation():
    with pytest.raises(ValueError):
        cn.CliffordAlgebra([[1, 2], [0, 1]])
    with pytest.raises(ValueError):
        cn.CliffordAlgebra([])
    algebra = cn.CliffordAlgebra([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        algebra.element({(2, 1): 1})
    other = cn.CliffordAlgebra([[1, 0], [0, 2]])
    with pytest.raises(ValueError):
        cn.clifford_mul(algebra.gen(1), other.gen(1))


@pytest.mark.parametrize("n,parity", [(3, Parity.ODD), (4, Parity.EVEN_SPLIT), (4, Parity.EVEN_NONSPLIT)])
def test_theta_idempotents(n, parity):
    algebra = cn.newton_algebra(n, parity)
    pairs = cn.hyperbolic_pairs(n, parity)
    for i in range(1, pairs + 1):
        plus, minus = cn.theta(algebra, i, 1), cn.theta(algebra, i, -1)
        assert plus * plus == plus
        assert minus * minus == minus
        assert plus * minus == 0
        assert minus * plus == 0
        assert plus + minus == 1
    if pairs >= 2:
        a, b = cn.theta(algebra, 1, 1), cn.theta(algebra, 2, -1)
        assert a * b == b * a


def test_theta_rejects_bad_sign():
    with pytest.raises(ValueError):
        cn.theta(cn.newton_algebra(1, Parity.ODD), 1, 0)


@pytest.mark.parametrize("n,j,expected", [(1, 1, 2), (2, 2, 2), (3, 1, 8), (3, 2, 4), (4, 3, 4)])
def test_sigma_blocks_have_equal_dimension(n, j, expected):
    dims = cn.sigma_decomposition(n, j)
    assert len(dims) == 2**j
    assert set(dims.values()) == {expected}
    assert sum(dims.values()) == 2 ** (n + 1)


def test_sigma_decomposition_range():
    with pytest.raises(ValueError):
        cn.sigma_decomposition(3, 3)


def test_slopes_n1():
    assert cn.slopes_of_nu(1, 1) == slopes({0: 2, 1: 2})


def test_slopes_n2():
    assert cn.slopes_of_nu(2, 2) == slopes({0: 2, HALF: 4, 1: 2})


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_slopes_match_closed_form(n):
    parities = [Parity.ODD] if n % 2 else [Parity.EVEN_SPLIT, Parity.EVEN_NONSPLIT]
    for parity in parities:
        for j in range(1, cn.hyperbolic_pairs(n, parity) + 1):
            derived = cn.slopes_of_nu(n, j, parity=parity)
            assert derived == cn.closed_form_slopes(n, j)
            assert derived.total == 2 ** (n + 1)
            counts = derived.as_dict()
            assert all(counts[1 - s] == k for s, k in counts.items())


@pytest.mark.parametrize("n", [2, 4, 6])
def test_primed_cocharacter_has_the_same_slopes(n):
    m = n // 2 + 1
    primed = cn.slopes_of_nu(n, m, primed=True, parity=Parity.EVEN_SPLIT)
    assert primed == cn.slopes_of_nu(n, m, parity=Parity.EVEN_SPLIT)


def test_primed_only_for_even_split():
    with pytest.raises(ValueError):
        cn.slopes_of_nu(3, 2, primed=True)
    with pytest.raises(ValueError):
        cn.slopes_of_nu(2, 1, primed=True, parity=Parity.EVEN_SPLIT)


@pytest.mark.parametrize("n", range(1, 7))
def test_closed_form_multiplicities_close_up(n):
    for j in range(1, n // 2 + 2):
        assert cn.closed_form_slopes(n, j).total == 2 ** (n + 1)


def test_basic_slopes():
    assert cn.basic_slopes(1) == slopes({HALF: 4})
    assert cn.basic_slopes(3) == slopes({HALF: 16})


def test_newton_set_n3():
    found = cn.newton_set(3, Parity.ODD)
    assert [b.name for b in found] == ["b_1", "b_2", "basic"]
    assert [b.dim for b in found] == [3, 2, None]
    assert [b.p_rank for b in found] == [8, 4, None]
    assert found[1].coefficients == (HALF, HALF)


def test_newton_set_n2_split_has_primed():
    found = {b.name: b for b in cn.newton_set(2, Parity.EVEN_SPLIT)}
    assert set(found) == {"b_1", "b_2", "b'_2", "basic"}
    assert found["b_2"].dim == found["b'_2"].dim == 1
    assert found["b'_2"].kind == NewtonKind.PRIMED
    assert found["b'_2"].coefficients == (HALF, -HALF)


def test_newton_set_n2_nonsplit():
    assert [b.name for b in cn.newton_set(2, Parity.EVEN_NONSPLIT)] == ["b_1", "basic"]
    with pytest.raises(ValueError):
        cn.newton_set(3, Parity.EVEN_SPLIT)


def test_dominance_chain_type_b():
    b1, b2, b3, basic = cn.newton_set(5, Parity.ODD)
    assert cn.newton_dominates(5, b1, b2)
    assert cn.newton_dominates(5, b2, b3)
    assert cn.newton_dominates(5, b3, basic)
    assert not cn.newton_dominates(5, b2, b1)


def test_dominance_type_d_has_incomparable_pair():
    found = {b.name: b for b in cn.newton_set(4, Parity.EVEN_SPLIT)}
    assert not cn.newton_dominates(4, found["b_3"], found["b'_3"])
    assert not cn.newton_dominates(4, found["b'_3"], found["b_3"])
    assert cn.newton_dominates(4, found["b_2"], found["b_3"])
    assert cn.newton_dominates(4, found["b_2"], found["b'_3"])
    assert cn.newton_dominates(4, found["b_1"], found["b_2"])


def test_gl2_datum_has_two_strata():
    D = cn.gl2_datum()
    assert D.levi_gens == ()
    assert [(label.name, label.dim) for label in zipcox.labels(D)] == [("1", 0), ("s1", 1)]


def test_zero_dimensional_case():
    split = cn.zero_dim_case(PrimeBehavior.SPLIT)
    inert = cn.zero_dim_case(PrimeBehavior.INERT)
    assert (split["locus"], split["gl2_orbit"], split["label"], split["dim"]) == ("ordinary", "s1", "w_1", 1)
    assert (inert["locus"], inert["gl2_orbit"], inert["label"], inert["dim"]) == ("superspecial", "1", "w_0", 0)
    assert split["frame"] == "(B,T,w~_0)"
    assert inert["frame"] == "(B,T,1)"


def test_zero_dimensional_case_follows_the_orbit_label(monkeypatch):
    D = cn.gl2_datum()
    superspecial = zipcox.label_by_name(D, "1")
    monkeypatch.setattr(zipcox, "canonical_label", lambda datum, w: superspecial)
    assert cn.zero_dim_case(PrimeBehavior.SPLIT)["locus"] == "superspecial"


@pytest.mark.parametrize("u", [2, 3, 5])
def test_zero_dimensional_clifford_check(u):
    computed, expected = cn.zero_dim_clifford_check(u)
    assert computed == expected
    R, x, y = ring("x,y", QQ)
    det = computed[0][0] * computed[1][1] - computed[0][1] * computed[1][0]
    assert det == x**2 - u * y**2

