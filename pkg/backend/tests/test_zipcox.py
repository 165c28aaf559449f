# tests/test_zipcox.py
import pytest

from backend.engines import weyl, zipcox
from backend.engines.errors import InternalConsistencyError
from backend.models.models import PsiKind, WeylFamily


def oracle_Ew(D, w):
    """Shrink w W_mu w^-1 by intersecting with its theta-image until stable."""
    w_inv = weyl.invert_perm(w)
    H = {weyl.compose(weyl.compose(w, v), w_inv) for v in weyl.parabolic_perms(D.group, D.levi_gens)}
    while True:
        image = {
            zipcox.psi_apply_perm(D, weyl.compose(weyl.compose(w, x), w_inv)) for x in H
        }
        smaller = H & image
        if smaller == H:
            return frozenset(H)
        H = smaller


def psi_kinds(n):
    return [PsiKind.IDENTITY, PsiKind.DIAGRAM_SWAP if n % 2 == 0 else PsiKind.INNER_SM]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_labels_are_named_by_the_closed_form(datum, n):
    D = datum(n)
    names = [label.name for label in zipcox.labels(D)]
    expected = [f"w_{i}" for i in range(n + 1)]
    if n % 2 == 0:
        expected.append(weyl.dagger_name(n))
    assert sorted(names) == sorted(expected)
    for label in zipcox.labels(D):
        assert label.dim == weyl.length(label.rep)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_Ew_matches_fixed_point_oracle(datum, n):
    for psi_kind in psi_kinds(n):
        D = datum(n, psi_kind)
        for w in weyl.elements(D.group):
            assert zipcox.compute_Ew_perms(D, w.perm) == oracle_Ew(D, w.perm)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_orbits_partition_W_with_one_label_each(datum, n):
    for psi_kind in psi_kinds(n):
        D = datum(n, psi_kind)
        classes = zipcox.orbit_classes(D)
        assert sum(len(orbit) for orbit in classes) == len(weyl.elements(D.group))
        assert len(classes) == len(zipcox.labels(D))
        for w in weyl.elements(D.group):
            label = zipcox.canonical_label(D, w)
            assert zipcox.orbit_equal(D, w, label.rep)


def test_canonical_label_of_a_label_is_itself(datum):
    D = datum(4)
    for label in zipcox.labels(D):
        assert zipcox.canonical_label(D, label.rep) == label


def test_orbit_contains_psi_conjugates(datum):
    D = datum(3, PsiKind.INNER_SM)
    for label in zipcox.labels(D):
        for v in weyl.parabolic_subgroup(D.group, D.levi_gens):
            conj = weyl.mul(weyl.mul(weyl.inverse(v), label.rep), zipcox.psi_apply(D, v))
            assert zipcox.orbit_equal(D, label.rep, conj)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_order_is_a_chain_for_odd_n(datum, n):
    covers = zipcox.hasse_diagram(datum(n))
    assert covers == sorted((f"w_{i}", f"w_{i + 1}") for i in range(n))


def test_order_is_a_diamond_for_n_2(datum):
    covers = zipcox.hasse_diagram(datum(2))
    assert covers == sorted(
        [
            ("w_0", "w_1"),
            ("w_0", "w_1^dagger"),
            ("w_1", "w_2"),
            ("w_1^dagger", "w_2"),
        ]
    )


@pytest.mark.parametrize("n", [2, 4, 6])
def test_even_order_has_one_incomparable_pair(datum, n):
    D = datum(n)
    m = weyl.rank_for_n(n)
    assert len(zipcox.hasse_diagram(D)) == n + 2
    lower = zipcox.label_by_name(D, f"w_{m - 1}")
    dagger = zipcox.label_by_name(D, weyl.dagger_name(n))
    assert not zipcox.preceq(D, lower, dagger)
    assert not zipcox.preceq(D, dagger, lower)
    assert zipcox.preceq(D, zipcox.label_by_name(D, "w_0"), dagger)
    assert zipcox.preceq(D, dagger, zipcox.label_by_name(D, f"w_{m}"))


@pytest.mark.parametrize("n", [2, 4])
def test_diagram_swap_exchanges_the_middle_labels(datum, n):
    mapping = zipcox.psi_permutes_labels(datum(n, PsiKind.DIAGRAM_SWAP))
    m = weyl.rank_for_n(n)
    assert mapping[f"w_{m - 1}"] == weyl.dagger_name(n)
    assert mapping[weyl.dagger_name(n)] == f"w_{m - 1}"
    assert all(mapping[f"w_{i}"] == f"w_{i}" for i in range(n + 1) if i != m - 1)


def test_order_graph_is_acyclic_for_every_psi(datum):
    for n in (3, 4):
        for psi_kind in psi_kinds(n):
            graph = zipcox.order_graph(datum(n, psi_kind))
            assert graph.number_of_nodes() == len(zipcox.labels(datum(n, psi_kind)))


def test_commuting_fixed_reflections_lie_in_Ew(datum):
    D = datum(5)
    for w in weyl.elements(D.group):
        E = zipcox.compute_Ew_perms(D, w.perm)
        for i in zipcox.commuting_fixed_reflections(D, w):
            assert weyl.simple_reflection_perm(D.group, i) in E


def test_identity_Ew_is_W_mu_for_identity_psi(datum):
    D = datum(3)
    w = weyl.identity(D.group)
    assert zipcox.compute_Ew_perms(D, w.perm) == weyl.parabolic_perms(D.group, D.levi_gens)


def test_diagram_swap_needs_type_d():
    group = weyl.weyl_group(WeylFamily.B, 2)
    with pytest.raises(ValueError):
        zipcox.psi_spec(group, PsiKind.DIAGRAM_SWAP)


def test_unknown_label_name(datum):
    with pytest.raises(ValueError):
        zipcox.label_by_name(datum(3), "w_9")


def test_non_datum_element_is_rejected(datum):
    D = datum(3)
    other = weyl.identity(weyl.group_for_n(4))
    with pytest.raises(ValueError):
        zipcox.orbit_equal(D, other, other)


def test_canonical_label_failure_is_internal_error(datum, monkeypatch):
    D = datum(3)
    w = weyl.identity(D.group)
    monkeypatch.setattr(zipcox, "orbit_perms", lambda D, perm: frozenset())
    with pytest.raises(InternalConsistencyError):
        zipcox.canonical_label(D, w)
