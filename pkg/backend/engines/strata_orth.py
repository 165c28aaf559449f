"""
Orthogonal EO Strata Module.

This module provides the EO stratum catalog of SO(n,2) (dimension, a-number,
p-rank, basic flag per stratum) and the image of every stratum of SO(n-1,2)
under the natural embedding, computed twice: by the closed form and by
pushing words through the embedding matrices and reducing the result to its
canonical label.
"""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import legendre_symbol

from backend.engines import clifford_newton, sogroup, weyl, zipcox
from backend.engines.errors import InternalConsistencyError
from backend.models.models import (
    CoxeterZipDatum,
    EmbeddingRow,
    EOStratumInfo,
    GramSpec,
    OrthCase,
    Parity,
    PrimeBehavior,
    PsiKind,
    Splitness,
    StratumLabel,
)


# Configure logger
logger = logging.getLogger(__name__)

SWEEP_LIMIT = 8


def least_nonsquare(p: int) -> int:
    for u in range(2, p):
        if legendre_symbol(u, p) == -1:
            return u
    raise ValueError(f"No nonsquare mod {p}")


def orth_cases(n: int, p: int = 5) -> List[OrthCase]:
    """
    Every case of the embedding SO(n-1,2) -> SO(n,2) at the prime p.

    n even: the four classes (c, d) in {(1,1), (u,u), (1,u), (u,1)}, u the
    least nonsquare, with ambient splitness read off the discriminant.
    n odd: split source, and the nonsplit source in its two subcases
    (I) with d = -1 and (II) with d = u.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    u = least_nonsquare(p)
    if n % 2 == 0:
        m = weyl.rank_for_n(n)
        cases = []
        for c, d in ((1, 1), (u, u), (1, u), (u, 1)):
            disc = (-1) ** (m - 1) * c * d
            cases.append(
                OrthCase(
                    n=n,
                    p=p,
                    source_splitness=Splitness.NOT_APPLICABLE,
                    ambient_splitness=sogroup.splitness(n, p, disc),
                    c=c,
                    d=d,
                )
            )
        return cases
    return [
        OrthCase(n=n, p=p, source_splitness=Splitness.SPLIT, ambient_splitness=Splitness.SPLIT),
        OrthCase(
            n=n, p=p, source_splitness=Splitness.NONSPLIT, ambient_splitness=Splitness.SPLIT,
            c=u, d=-1, subcase="I",
        ),
        OrthCase(
            n=n, p=p, source_splitness=Splitness.NONSPLIT, ambient_splitness=Splitness.SPLIT,
            c=u, d=u, subcase="II",
        ),
    ]


def case_name(case: OrthCase) -> str:
    if case.n % 2 == 0:
        return f"(c,d)=({case.c},{case.d}) ambient {case.ambient_splitness.value}"
    name = f"source {case.source_splitness.value}"
    return f"{name} ({case.subcase})" if case.subcase else name


def ambient_parity(case: OrthCase) -> Parity:
    if case.n % 2:
        return Parity.ODD
    if case.ambient_splitness == Splitness.SPLIT:
        return Parity.EVEN_SPLIT
    return Parity.EVEN_NONSPLIT


def ambient_psi(case: OrthCase) -> PsiKind:
    if case.n % 2 == 0:
        if case.ambient_splitness == Splitness.SPLIT:
            return PsiKind.IDENTITY
        return PsiKind.DIAGRAM_SWAP
    if case.source_splitness == Splitness.SPLIT:
        return PsiKind.IDENTITY
    return PsiKind.INNER_SM


def source_psi(case: OrthCase) -> PsiKind:
    if case.n % 2 == 1 and case.source_splitness == Splitness.NONSPLIT:
        return PsiKind.DIAGRAM_SWAP
    return PsiKind.IDENTITY


def ambient_datum(case: OrthCase, psi_kind: Optional[PsiKind] = None) -> CoxeterZipDatum:
    return zipcox.orthogonal_datum(case.n, psi_kind or ambient_psi(case))


def source_datum(case: OrthCase) -> CoxeterZipDatum:
    if case.n < 2:
        raise ValueError("The source of n=1 has rank 0 and no zip datum")
    return zipcox.orthogonal_datum(case.n - 1, source_psi(case))


def case_grams(case: OrthCase) -> Tuple[GramSpec, GramSpec]:
    """(source, target) Gram specifications of the embedding."""
    p = case.p
    if case.n % 2:
        source = sogroup.gram_spec(
            case.n - 1, p, c=case.c, nonsplit=case.source_splitness == Splitness.NONSPLIT
        )
        target = sogroup.gram_spec(case.n, p, c=case.d % p)
    else:
        source = sogroup.gram_spec(case.n - 1, p, c=case.c)
        c = 1 if case.ambient_splitness == Splitness.SPLIT else least_nonsquare(p)
        target = GramSpec(n=case.n, parity=ambient_parity(case), p=p, c=c)
    return source, target


def d_min(n: int, parity: Parity) -> int:
    """Smallest dimension of a nonbasic stratum."""
    m = weyl.rank_for_n(n)
    if parity == Parity.EVEN_SPLIT:
        return m - 1
    return m


def a_number(n: int, dim: int) -> int:
    if dim == n:
        return 0
    if dim == 0:
        return 2**n
    return 2 ** (n - 1)


def catalog(case: OrthCase) -> List[EOStratumInfo]:
    """
    EO strata of SO(n,2) with their discrete invariants.

    The ordinary stratum has a-number 0, the superspecial one 2^n and every
    other one 2^{n-1}. Strata of dimension below d_min are basic with p-rank
    0; the others have p-rank 2^dim.
    """
    parity = ambient_parity(case)
    cutoff = d_min(case.n, parity)
    rows = []
    for label in zipcox.labels(ambient_datum(case)):
        basic = label.dim < cutoff
        rows.append(
            EOStratumInfo(
                name=label.name,
                n=case.n,
                perm=label.rep.perm,
                dim=label.dim,
                a_number=a_number(case.n, label.dim),
                p_rank=0 if basic else 2**label.dim,
                basic=basic,
            )
        )
    return rows


def embed_image_closed_form(case: OrthCase, i: int) -> int:
    """
    Dimension j of the image of a dimension-i source stratum.

    n even: j = i for i < n/2, else i+1. n odd: j = i below (n-1)/2, i+1
    above it, and at i = (n-1)/2 it is i+1 for a split source, i otherwise.
    """
    n = case.n
    if not 0 <= i <= n - 1:
        raise ValueError(f"Source dimension {i} out of range 0..{n - 1}")
    if n % 2 == 0:
        return i if 2 * i < n else i + 1
    middle = (n - 1) // 2
    if i < middle:
        return i
    if i > middle:
        return i + 1
    return i + 1 if case.source_splitness == Splitness.SPLIT else i


def generator_images(case: OrthCase) -> Dict[int, Tuple[int, ...]]:
    """
    Source simple reflection index -> target element, read off iota(P_{s'_i}).
    """
    source, target = case_grams(case)
    images = {}
    for i in range(1, source.m + 1):
        X = sogroup.embed_iota(source, target, sogroup.reflection_rep(source, i), d=case.d % case.p)
        images[i] = sogroup.weyl_element_of(target, X.matrix).perm
    return images


def frame_correction(case: OrthCase) -> Tuple[int, ...]:
    """g^-1 iota(g') as a Weyl element of the target group."""
    source, target = case_grams(case)
    g_src = sogroup.standard_frame(source, twisted=source_psi(case) != PsiKind.IDENTITY).g
    g_tgt = sogroup.standard_frame(target, twisted=ambient_psi(case) != PsiKind.IDENTITY).g
    image = sogroup.embed_iota(source, target, g_src, d=case.d % case.p)
    correction = np.linalg.inv(g_tgt.matrix) @ image.matrix
    return sogroup.weyl_element_of(target, correction).perm


def pushed_element(case: OrthCase, source_label: StratumLabel) -> Tuple[int, ...]:
    """correction * iota(w') for the source label w'."""
    images = generator_images(case)
    perm = frame_correction(case)
    for i in source_label.word:
        perm = weyl.compose(perm, images[i])
    return perm


def embed_image_derived(
    case: OrthCase, source_label: StratumLabel, psi_kind: Optional[PsiKind] = None
) -> StratumLabel:
    """
    Image label of a source stratum, obtained from the embedding matrices.

    Raises:
        InternalConsistencyError: if the pushed element has no unique label
    """
    D = ambient_datum(case, psi_kind)
    perm = pushed_element(case, source_label)
    element = weyl.WeylElement.model_construct(perm=perm, group=D.group)
    return zipcox.canonical_label(D, element)


def _zero_dim_rows(case: OrthCase) -> List[EmbeddingRow]:
    behavior = (
        PrimeBehavior.SPLIT if case.source_splitness == Splitness.SPLIT else PrimeBehavior.INERT
    )
    result = clifford_newton.zero_dim_case(behavior)
    label = zipcox.label_by_name(ambient_datum(case), result["label"])
    closed = embed_image_closed_form(case, 0)
    return [
        EmbeddingRow(
            source="pt",
            source_dim=0,
            target=label.name,
            target_dim=label.dim,
            closed_form_dim=closed,
            route="zero-dimensional",
            agree=label.dim == closed,
            trace={"locus": result["locus"], "frame": result["frame"], "gl2_orbit": result["gl2_orbit"]},
        )
    ]


def embedding_rows(case: OrthCase) -> List[EmbeddingRow]:
    """One row per source stratum, with both routes and their agreement."""
    if case.n == 1:
        return _zero_dim_rows(case)
    rows = []
    alternatives = []
    if case.n % 2 == 0:
        alternatives = [PsiKind.IDENTITY, PsiKind.DIAGRAM_SWAP]
    for label in zipcox.labels(source_datum(case)):
        try:
            target = embed_image_derived(case, label)
        except InternalConsistencyError as e:
            e.trace = {"case": case_name(case), "source": label.name, "detail": e.trace}
            raise
        closed = embed_image_closed_form(case, label.dim)
        other_dims = {
            kind.value: embed_image_derived(case, label, kind).dim for kind in alternatives
        }
        agree = target.dim == closed and all(dim == closed for dim in other_dims.values())
        trace = {
            "word": list(label.word),
            "generator_images": {str(i): list(v) for i, v in generator_images(case).items()},
            "correction": list(frame_correction(case)),
            "pushed": list(pushed_element(case, label)),
            "source_a_number": a_number(case.n - 1, label.dim),
            "target_a_number": a_number(case.n, target.dim),
        }
        if other_dims:
            trace["dims_by_psi"] = other_dims
        if not agree:
            logger.warning(f"Embedding mismatch in {case_name(case)} at {label.name}: {trace}")
        rows.append(
            EmbeddingRow(
                source=label.name,
                source_dim=label.dim,
                target=target.name,
                target_dim=target.dim,
                closed_form_dim=closed,
                route="derived+closed-form",
                agree=agree,
                trace=trace,
            )
        )
    return rows


def consistency_sweep(n_max: int, p: int = 5) -> Dict[str, List[EmbeddingRow]]:
    """
    Every case for 1 <= n <= n_max, keyed by "n=<n> <case name>".

    Rows carry their agreement flag; callers decide how to report mismatches.
    """
    if not 1 <= n_max <= SWEEP_LIMIT:
        raise ValueError(f"n_max must lie in 1..{SWEEP_LIMIT}, got {n_max}")
    results = {}
    for n in range(1, n_max + 1):
        for case in orth_cases(n, p):
            results[f"n={n} {case_name(case)}"] = embedding_rows(case)
    mismatches = sum(1 for rows in results.values() for row in rows if not row.agree)
    logger.info(f"Orthogonal sweep up to n={n_max}: {len(results)} cases, {mismatches} mismatches")
    return results


def small_rank_fixtures() -> List[Dict]:
    """
    (f, a) invariants of the small-rank families.

    Hilbert modular surfaces (n=2) and the Siegel threefold (n=3), with the
    factor 2^{n-1} relating them to the catalog's p-ranks and a-numbers, and
    the image of the middle stratum for n=3.
    """
    rows = []
    hilbert = [
        ("ordinary", 2, None, 2, 0),
        ("middle", 1, "split", 1, 1),
        ("middle", 1, "nonsplit", 0, 1),
        ("superspecial", 0, None, 0, 2),
    ]
    for stratum, dim, ambient, f, a in hilbert:
        rows.append(
            {"family": "hilbert", "n": 2, "stratum": stratum, "dim": dim,
             "ambient": ambient, "f": f, "a": a, "scale": 2}
        )
    for dim, (f, a) in zip((3, 2, 1, 0), ((2, 0), (1, 1), (0, 1), (0, 2))):
        rows.append(
            {"family": "siegel", "n": 3, "stratum": f"dim {dim}", "dim": dim,
             "ambient": None, "f": f, "a": a, "scale": 4}
        )
    rows.append({"family": "hilbert-into-siegel", "n": 3, "source_dim": 1, "source": "split", "image_dim": 2})
    rows.append({"family": "hilbert-into-siegel", "n": 3, "source_dim": 1, "source": "nonsplit", "image_dim": 1})
    return rows
