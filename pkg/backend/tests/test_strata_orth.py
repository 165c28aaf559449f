# tests/test_strata_orth.py
import pytest
from pydantic import ValidationError

from backend.engines import strata_orth, weyl
from backend.models.models import EOStratumInfo, OrthCase, Parity, Splitness


def euler_legendre(a, p):
    """Legendre symbol by Euler's criterion."""
    value = pow(a % p, (p - 1) // 2, p)
    return -1 if value == p - 1 else value


def find_case(n, p=5, **fields):
    for case in strata_orth.orth_cases(n, p):
        if all(getattr(case, key) == value for key, value in fields.items()):
            return case
    raise AssertionError(f"No case {fields} for n={n}")


def dims(rows):
    return [(row.source_dim, row.target_dim) for row in rows]


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17])
def test_least_nonsquare_matches_euler_criterion(p):
    u = strata_orth.least_nonsquare(p)
    assert euler_legendre(u, p) == -1
    assert all(euler_legendre(x, p) == 1 for x in range(1, u))


@pytest.mark.parametrize("n", [2, 4, 6])
@pytest.mark.parametrize("p", [5, 7])
def test_even_cases_cover_the_four_classes(n, p):
    cases = strata_orth.orth_cases(n, p)
    assert len(cases) == 4
    m = weyl.rank_for_n(n)
    for case in cases:
        disc = (-1) ** (m - 1) * case.c * case.d
        split = euler_legendre(-1, p) ** m == euler_legendre(disc, p)
        assert (case.ambient_splitness == Splitness.SPLIT) == split
    assert sum(case.ambient_splitness == Splitness.SPLIT for case in cases) == 2


def test_odd_cases():
    cases = strata_orth.orth_cases(3, 5)
    assert [case.source_splitness for case in cases] == [Splitness.SPLIT, Splitness.NONSPLIT, Splitness.NONSPLIT]
    assert [case.subcase for case in cases] == [None, "I", "II"]
    with pytest.raises(ValueError):
        strata_orth.orth_cases(0, 5)


def test_catalog_n3():
    rows = strata_orth.catalog(find_case(3, source_splitness=Splitness.SPLIT))
    assert len(rows) == 4
    by_dim = {row.dim: row for row in rows}
    assert [by_dim[d].a_number for d in range(4)] == [8, 4, 4, 0]
    assert [by_dim[d].p_rank for d in range(4)] == [0, 0, 4, 8]
    assert [by_dim[d].basic for d in range(4)] == [True, True, False, False]


def test_catalog_even_split_has_two_middle_strata():
    case = find_case(4, c=1, d=1)
    rows = strata_orth.catalog(case)
    assert len(rows) == 6
    assert sorted(row.dim for row in rows) == [0, 1, 2, 2, 3, 4]


@pytest.mark.parametrize(
    "n,parity,expected",
    [(3, Parity.ODD, 2), (4, Parity.EVEN_SPLIT, 2), (4, Parity.EVEN_NONSPLIT, 3)],
)
def test_d_min(n, parity, expected):
    assert strata_orth.d_min(n, parity) == expected


def test_closed_form_images():
    split = find_case(3, source_splitness=Splitness.SPLIT)
    nonsplit = find_case(3, subcase="I")
    assert [strata_orth.embed_image_closed_form(split, i) for i in range(3)] == [0, 2, 3]
    assert [strata_orth.embed_image_closed_form(nonsplit, i) for i in range(3)] == [0, 1, 3]
    even = find_case(4, c=1, d=1)
    assert [strata_orth.embed_image_closed_form(even, i) for i in range(4)] == [0, 1, 3, 4]
    with pytest.raises(ValueError):
        strata_orth.embed_image_closed_form(even, 4)


def test_embedding_rows_n3_split():
    rows = strata_orth.embedding_rows(find_case(3, source_splitness=Splitness.SPLIT))
    assert sorted(dims(rows)) == [(0, 0), (1, 2), (1, 2), (2, 3)]
    assert all(row.agree for row in rows)
    assert all("pushed" in row.trace for row in rows)


def test_embedding_rows_n1_go_through_the_zero_dimensional_case():
    split = strata_orth.embedding_rows(find_case(1, source_splitness=Splitness.SPLIT))
    nonsplit = strata_orth.embedding_rows(find_case(1, subcase="II"))
    assert [(row.target, row.route) for row in split] == [("w_1", "zero-dimensional")]
    assert [(row.target, row.trace["locus"]) for row in nonsplit] == [("w_0", "superspecial")]


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8])
def test_every_case_agrees(n):
    for case in strata_orth.orth_cases(n, 5):
        for row in strata_orth.embedding_rows(case):
            assert row.agree, (strata_orth.case_name(case), row)


def test_even_rows_record_both_psi():
    rows = strata_orth.embedding_rows(find_case(2, c=1, d=2))
    for row in rows:
        assert set(row.trace["dims_by_psi"]) == {"identity", "diagram-swap"}


def test_generator_image_for_n2():
    # s'_1 = (1 3) with the middle sign becomes (1 4)(2 3) = s_1 s_2 for every (c, d)
    group = weyl.group_for_n(2)
    for case in strata_orth.orth_cases(2, 5):
        assert strata_orth.generator_images(case) == {1: weyl.evaluate_word_perm(group, (1, 2))}


def test_consistency_sweep():
    results = strata_orth.consistency_sweep(4, 7)
    assert len(results) == 3 + 4 + 3 + 4
    assert all(row.agree for rows in results.values() for row in rows)
    with pytest.raises(ValueError):
        strata_orth.consistency_sweep(strata_orth.SWEEP_LIMIT + 1)


def test_consistency_sweep_up_to_the_limit():
    results = strata_orth.consistency_sweep(strata_orth.SWEEP_LIMIT, 5)
    assert len(results) == 4 * 3 + 4 * 4
    bad = [(key, row.source) for key, rows in results.items() for row in rows if not row.agree]
    assert bad == []


def test_catalog_carries_rank():
    rows = strata_orth.catalog(find_case(3, source_splitness=Splitness.SPLIT))
    assert all(row.n == 3 for row in rows)


@pytest.mark.parametrize(
    "dim, a_number",
    [(3, 4), (0, 4), (1, 8), (2, 0), (4, 0)],
)
def test_stratum_info_rejects_wrong_a_number(dim, a_number):
    with pytest.raises(ValidationError):
        EOStratumInfo(name="w", perm=(1,), n=3, dim=dim, a_number=a_number, p_rank=0, basic=True)


def test_stratum_info_accepts_catalog_values():
    for dim, a_number in [(0, 8), (1, 4), (2, 4), (3, 0)]:
        EOStratumInfo(name="w", perm=(1,), n=3, dim=dim, a_number=a_number, p_rank=0, basic=True)



def test_small_rank_fixtures_match_catalog():
    hilbert_split = {row.dim: row for row in strata_orth.catalog(find_case(2, c=1, d=1))}
    hilbert_nonsplit = {row.dim: row for row in strata_orth.catalog(find_case(2, c=1, d=2))}
    siegel = {row.dim: row for row in strata_orth.catalog(find_case(3, source_splitness=Splitness.SPLIT))}
    for fixture in strata_orth.small_rank_fixtures():
        if fixture["family"] == "hilbert":
            table = hilbert_nonsplit if fixture["ambient"] == "nonsplit" else hilbert_split
        elif fixture["family"] == "siegel":
            table = siegel
        else:
            case = find_case(3, source_splitness=Splitness(fixture["source"]), subcase=None if fixture["source"] == "split" else "I")
            rows = strata_orth.embedding_rows(case)
            targets = {row.target_dim for row in rows if row.source_dim == fixture["source_dim"]}
            assert targets == {fixture["image_dim"]}
            continue
        row = table[fixture["dim"]]
        assert row.p_rank == fixture["scale"] * fixture["f"]
        assert row.a_number == fixture["scale"] * fixture["a"]


def test_case_grams_are_valid():
    for n in range(2, 7):
        for case in strata_orth.orth_cases(n, 5):
            source, target = strata_orth.case_grams(case)
            assert source.n == n - 1
            assert target.n == n
            assert target.parity == strata_orth.ambient_parity(case)


def test_source_datum_of_rank_zero():
    with pytest.raises(ValueError):
        strata_orth.source_datum(find_case(1, source_splitness=Splitness.SPLIT))


def test_case_model_rejects_bad_n():
    with pytest.raises(ValueError):
        OrthCase(n=0, source_splitness=Splitness.SPLIT, ambient_splitness=Splitness.SPLIT)
