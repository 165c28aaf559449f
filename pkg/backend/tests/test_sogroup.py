# tests/test_sogroup.py
import numpy as np
import pytest
from pydantic import ValidationError

from backend.engines import sogroup, weyl
from backend.models.models import Parity, Splitness, Subgroup


def test_gram_matrix_is_symmetric_and_invertible(gram):
    for n in (1, 2, 3, 4):
        J = sogroup.gram_matrix(gram(n))
        assert np.array_equal(J, J.T)
        assert np.linalg.det(J) != 0


def test_gram_spec_validation():
    with pytest.raises(ValidationError):
        sogroup.gram_spec(4, 5, c=4, nonsplit=True)  # 4 is a square mod 5
    with pytest.raises(ValidationError):
        sogroup.gram_spec(3, 5, c=5)
    assert sogroup.gram_spec(4, 5, c=2, nonsplit=True).parity == Parity.EVEN_NONSPLIT


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_signed_permutations_are_a_homomorphism_into_SO(gram, n):
    g = gram(n)
    for w in weyl.elements(weyl.group_for_n(n)):
        P = sogroup.signed_permutation_matrix(g, w.perm)
        assert sogroup.is_in_SO(P, g)
        assert np.array_equal(sogroup.word_rep(g, w).matrix, P)
        assert sogroup.weyl_element_of(g, P) == w


def test_weyl_element_of_rejects_non_monomial(gram):
    g = gram(3)
    X = sogroup.root_element(g, ("long", 1, 2), 1)
    with pytest.raises(ValueError):
        sogroup.weyl_element_of(g, X)


@pytest.mark.parametrize("n,p", [(2, 5), (3, 5), (4, 7), (5, 3)])
def test_root_elements_lie_in_the_borel_of_SO(gram, n, p):
    g = gram(n, p)
    GF = sogroup.working_field(p)
    a = int(GF.primitive_element)
    for root in sogroup.positive_roots(g):
        X = sogroup.root_element(g, root, a)
        assert sogroup.is_in_SO(X, g)
        assert sogroup.membership(X, Subgroup.B)
        assert sogroup.membership(X, Subgroup.P)


def test_levi_root_elements_lie_in_L(gram):
    g = gram(4)
    levi = set(sogroup.positive_roots(g, levi_only=True))
    for root in sogroup.positive_roots(g):
        X = sogroup.root_element(g, root, 1)
        assert sogroup.membership(X, Subgroup.L) == (root in levi)


def test_torus_elements(gram):
    g = gram(3)
    t = sogroup.torus_element(g, [2, 3])
    assert sogroup.is_in_SO(t, g)
    assert sogroup.membership(t, Subgroup.BL)
    with pytest.raises(ValueError):
        sogroup.torus_element(g, [2])


def test_orth_matrix_rejects_non_orthogonal(gram):
    g = gram(3)
    GF = sogroup.working_field(5)
    X = GF.Identity(5)
    X[0, 0] = 2
    with pytest.raises(ValueError):
        sogroup.orth_matrix(g, X)


def test_frobenius_round_trip(gram, seed):
    for g, twisted in ((gram(3), True), (gram(4, c=2, nonsplit=True), True), (gram(4), False)):
        rng = np.random.default_rng(seed)
        X = sogroup._trusted(g, sogroup.sample_borel(g, rng))
        back = sogroup.inverse_frobenius(sogroup.twisted_frobenius(X, twisted), twisted)
        assert np.array_equal(back.matrix, X.matrix)


@pytest.mark.parametrize(
    "n,c,nonsplit,twisted",
    [
        (1, 1, False, False),
        (3, 1, False, False),
        (3, 1, False, True),
        (4, 1, False, False),
        (4, 2, True, True),
        (5, 1, False, True),
    ],
)
def test_standard_frame_passes(gram, seed, n, c, nonsplit, twisted):
    g = gram(n, 5, c=c, nonsplit=nonsplit)
    frame = sogroup.standard_frame(g, twisted)
    report = sogroup.frame_verify(g, frame, twisted, samples=5, seed=seed)
    assert report.passed
    assert all(report.conditions.values())
    assert report.generator_checks > 0
    assert report.samples == 5


def test_identity_is_not_a_frame(gram, seed):
    g = gram(3)
    identity = sogroup.FrameCandidate(g=sogroup._trusted(g, sogroup.working_field(5).Identity(5)))
    report = sogroup.frame_verify(g, identity, False, samples=2, seed=seed)
    assert not report.passed
    assert report.conditions["ii"] is False
    assert report.violations[0].witness


def test_frame_verify_is_deterministic(gram):
    g = gram(3)
    frame = sogroup.standard_frame(g)
    first = sogroup.frame_verify(g, frame, False, samples=3, seed=9)
    second = sogroup.frame_verify(g, frame, False, samples=3, seed=9)
    assert first == second


def test_frame_verify_needs_samples(gram):
    g = gram(3)
    with pytest.raises(ValueError):
        sogroup.frame_verify(g, sogroup.standard_frame(g), False, samples=0, seed=1)


def test_embed_into_odd_target(gram):
    source, target = gram(2), gram(3)
    for i in (1, 2):
        image = sogroup.embed_iota(source, target, sogroup.reflection_rep(source, i))
        assert sogroup.is_in_SO(image.matrix, target)


@pytest.mark.parametrize("d", [1, 2, -1])
def test_embed_into_even_target(gram, d):
    source, target = gram(3), gram(4)
    for i in (1, 2):
        image = sogroup.embed_iota(source, target, sogroup.reflection_rep(source, i), d=d)
        assert sogroup.is_in_SO(image.matrix, target)


def test_embed_rejects_mismatched_groups(gram):
    source = gram(3)
    with pytest.raises(ValueError):
        sogroup.embed_iota(source, gram(5), sogroup.reflection_rep(source, 1))
    with pytest.raises(ValueError):
        sogroup.embed_iota(gram(2), gram(3), sogroup.reflection_rep(source, 1))


def test_splitness():
    # (-1/5) = 1, so SO(2,2) at 5 is split iff the discriminant is a square
    assert sogroup.splitness(2, 5, 1) == Splitness.SPLIT
    assert sogroup.splitness(2, 5, 2) == Splitness.NONSPLIT
    # (-1/7) = -1 and m = 2
    assert sogroup.splitness(2, 7, 1) == Splitness.SPLIT
    assert sogroup.splitness(4, 7, 1) == Splitness.NONSPLIT
    with pytest.raises(ValueError):
        sogroup.splitness(3, 5, 1)
