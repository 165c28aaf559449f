"""
Unitary Dieudonne Module for EO stratum combinatorics.

This module provides basis-combinatorial Dieudonne modules of unitary BT-1
group schemes of signature (n,1): the standard modules, the elliptic modules,
direct sums, the canonical filtration and the EO invariant read off it, the
T-operator, p-rank and a-number, and the image of every stratum under the
embedding GU(n,1) -> GU(n+1,1), computed by three routes.

Subspaces are frozensets of basis labels; F and V send a label to a label or
to None.
"""

import logging
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

from backend.engines.errors import InternalConsistencyError
from backend.models.models import (
    EllipticKind,
    FiltrationChain,
    KappaTilde,
    PrimeBehavior,
    SlopeMultiset,
    UnitaryDieudonneModule,
    UnitaryEmbeddingRow,
    UnitaryStratumInfo,
)


# Configure logger
logger = logging.getLogger(__name__)

Span = FrozenSet[str]

MAX_UNITARY_N = 10


def kappa(behavior: PrimeBehavior) -> KappaTilde:
    return KappaTilde(behavior=PrimeBehavior(behavior))


def _v(side: int, j: int) -> str:
    return f"v{side},{j}"


def _check_range(n: int, a: int):
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not 0 <= a <= n:
        raise ValueError(f"a must lie in 0..{n}, got {a}")


def _inert_tables(g: int, a: int):
    frob, ver = {}, {}
    for j in range(1, g + 1):
        if j <= a:
            frob[_v(1, j)] = _v(2, j)
        elif j == a + 1:
            frob[_v(1, j)] = None
        else:
            frob[_v(1, j)] = _v(2, j - 1)
        if j == 1:
            ver[_v(1, j)] = None
        elif j <= g - a:
            ver[_v(1, j)] = _v(2, j - 1)
        else:
            ver[_v(1, j)] = _v(2, j)
        frob[_v(2, j)] = None
        ver[_v(2, j)] = None
    frob[_v(2, g - a)] = _v(1, 1)
    ver[_v(2, g)] = _v(1, a + 1)
    return frob, ver


def _split_tables(g: int, a: int):
    # Side 1: etale part v_{1,1..a} and a local part; side 2 is its dual
    frob, ver = {}, {}
    for j in range(1, g + 1):
        if j <= a:
            frob[_v(1, j)] = _v(1, j)
        elif j == a + 1:
            frob[_v(1, j)] = None
        else:
            frob[_v(1, j)] = _v(1, j - 1)
        ver[_v(1, j)] = None
        frob[_v(2, j)] = None
        if j <= a:
            ver[_v(2, j)] = _v(2, j)
        elif j <= g - 1:
            ver[_v(2, j)] = _v(2, j + 1)
        else:
            ver[_v(2, j)] = None
    ver[_v(1, g)] = _v(1, a + 1)
    frob[_v(2, a + 1)] = _v(2, g)
    return frob, ver


def standard_module(n: int, a: int, kappa_tilde: KappaTilde) -> UnitaryDieudonneModule:
    """
    The standard module of the stratum a, on the basis v_{i,j}, i = 1, 2,
    j = 1..g with g = n+1.

    Raises:
        ValueError: a out of range
    """
    _check_range(n, a)
    g = n + 1
    if kappa_tilde.behavior == PrimeBehavior.INERT:
        frob, ver = _inert_tables(g, a)
    else:
        frob, ver = _split_tables(g, a)
    basis = tuple(_v(i, j) for i in (1, 2) for j in range(1, g + 1))
    side = {label: int(label[1]) for label in basis}
    module = UnitaryDieudonneModule(basis=basis, side=side, frob=frob, ver=ver, kappa=kappa_tilde)
    check_bt1(module)
    return module


def elliptic_module(kind: EllipticKind) -> UnitaryDieudonneModule:
    """Dieudonne module of the elliptic curve A_0 with its O_K-action."""
    kind = EllipticKind(kind)
    basis = ("n1", "n2")
    side = {"n1": 1, "n2": 2}
    if kind == EllipticKind.SUPERSINGULAR_INERT:
        frob = {"n1": "n2", "n2": None}
        ver = {"n1": "n2", "n2": None}
        behavior = PrimeBehavior.INERT
    else:
        frob = {"n1": "n1", "n2": None}
        ver = {"n1": None, "n2": "n2"}
        behavior = PrimeBehavior.SPLIT
    return UnitaryDieudonneModule(basis=basis, side=side, frob=frob, ver=ver, kappa=kappa(behavior))


def elliptic_for(behavior: PrimeBehavior) -> UnitaryDieudonneModule:
    if PrimeBehavior(behavior) == PrimeBehavior.INERT:
        return elliptic_module(EllipticKind.SUPERSINGULAR_INERT)
    return elliptic_module(EllipticKind.ORDINARY_SPLIT)


def direct_sum(M: UnitaryDieudonneModule, N: UnitaryDieudonneModule) -> UnitaryDieudonneModule:
    """
    M ⊕ N on the disjoint union of the bases; clashing labels are prefixed.

    Raises:
        ValueError: if the two modules carry different gradings
    """
    if M.kappa != N.kappa:
        raise ValueError("Direct sum needs the same kappa on both summands")
    clash = set(M.basis) & set(N.basis)
    left = (lambda x: f"L.{x}") if clash else (lambda x: x)
    right = (lambda x: f"R.{x}") if clash else (lambda x: x)

    def rename(module, f):
        move = lambda y: None if y is None else f(y)
        return (
            tuple(f(x) for x in module.basis),
            {f(x): s for x, s in module.side.items()},
            {f(x): move(y) for x, y in module.frob.items()},
            {f(x): move(y) for x, y in module.ver.items()},
        )

    b1, s1, f1, v1 = rename(M, left)
    b2, s2, f2, v2 = rename(N, right)
    return UnitaryDieudonneModule(
        basis=b1 + b2,
        side={**s1, **s2},
        frob={**f1, **f2},
        ver={**v1, **v2},
        kappa=M.kappa,
    )


def image(mapping: Dict[str, Optional[str]], U: Span) -> Span:
    return frozenset(mapping[x] for x in U if mapping[x] is not None)


def kernel(mapping: Dict[str, Optional[str]]) -> Span:
    return frozenset(x for x, y in mapping.items() if y is None)


def preimage(mapping: Dict[str, Optional[str]], U: Span) -> Span:
    """V^-1(U) = ker V together with every x with V(x) in U."""
    return frozenset(x for x, y in mapping.items() if y is None or y in U)


def check_bt1(M: UnitaryDieudonneModule):
    """
    Raises:
        ValueError: unless ker F = im V and ker V = im F
    """
    everything = frozenset(M.basis)
    if kernel(M.frob) != image(M.ver, everything):
        raise ValueError("ker F differs from im V")
    if kernel(M.ver) != image(M.frob, everything):
        raise ValueError("ker V differs from im F")


def canonical_filtration(M: UnitaryDieudonneModule) -> FiltrationChain:
    """
    Coarsest F, V^-1 stable collection of subspaces containing 0 and M,
    intersected with M_1.

    Raises:
        InternalConsistencyError: if the traces on M_1 are not totally ordered
    """
    check_bt1(M)
    found = {frozenset(), frozenset(M.basis)}
    pending = list(found)
    while pending:
        U = pending.pop()
        for W in (image(M.frob, U), preimage(M.ver, U)):
            if W not in found:
                found.add(W)
                pending.append(W)
    side_one = M.side_labels(1)
    steps = sorted({U & side_one for U in found}, key=len)
    for lower, upper in zip(steps, steps[1:]):
        if not lower < upper:
            raise InternalConsistencyError(
                "Canonical filtration is not a chain on M_1",
                trace={"steps": [sorted(step) for step in steps]},
            )
    return FiltrationChain(steps=tuple(steps))


def eo_invariant(M: UnitaryDieudonneModule) -> int:
    """
    a = dim M_{1,b-1}, where M_{1,b} is the first step of the canonical
    filtration meeting M_1[F]; the jump must have length one.

    Raises:
        ValueError: if dim M_1[F] != 1
        InternalConsistencyError: if there is no jump of length one
    """
    kernel_one = kernel(M.frob) & M.side_labels(1)
    if len(kernel_one) != 1:
        raise ValueError(f"Expected dim M_1[F] = 1, got {len(kernel_one)}")
    steps = canonical_filtration(M).steps
    for lower, upper in zip(steps, steps[1:]):
        if not (lower & kernel_one) and (upper & kernel_one):
            if len(upper) - len(lower) != 1:
                raise InternalConsistencyError(
                    f"eta_1 jumps across a step of length {len(upper) - len(lower)}",
                    trace={"lower": sorted(lower), "upper": sorted(upper)},
                )
            return len(lower)
    raise InternalConsistencyError("eta_1 never jumps along the canonical filtration")


def t_operator(M: UnitaryDieudonneModule, U: Span) -> Span:
    """T = V^-1 F on M_1: the x in M_1 with V(x) in F(U) or V(x) = 0."""
    side_one = M.side_labels(1)
    if not U <= side_one:
        raise ValueError("T acts on subspaces of M_1")
    return preimage({x: M.ver[x] for x in side_one}, image(M.frob, U))


def t_iterate(M: UnitaryDieudonneModule, U: Span, times: int) -> Span:
    for _ in range(times):
        U = t_operator(M, U)
    return U


def t_fixed_interval(M: UnitaryDieudonneModule) -> Tuple[int, int]:
    """(r, s): the dimensions where T^c(0) and T^c(M_1) stabilize."""
    side_one = M.side_labels(1)
    limits = []
    for start in (frozenset(), side_one):
        U = start
        while True:
            nxt = t_operator(M, U)
            if nxt == U:
                break
            U = nxt
        limits.append(len(U))
    return limits[0], limits[1]


def r_s(n: int, a: int) -> Tuple[int, int]:
    return min(a + 1, n + 1 - a), max(a, n + 1 - a)


def p_rank(M: UnitaryDieudonneModule) -> int:
    """Dimension of the F-stable part: the limit of the images F^k(M)."""
    U = frozenset(M.basis)
    while True:
        nxt = image(M.frob, U)
        if nxt == U:
            return len(U)
        U = nxt


def a_number(M: UnitaryDieudonneModule) -> int:
    """dim M / (FM + VM)."""
    everything = frozenset(M.basis)
    return len(everything - (image(M.frob, everything) | image(M.ver, everything)))


def bw_codim(rho: int, n: int) -> int:
    """Codimension of the stratum with invariant rho: rho/2 - 1 or n+1 - (rho+1)/2."""
    if not 1 <= rho <= n + 1:
        raise ValueError(f"rho must lie in 1..{n + 1}, got {rho}")
    if rho % 2 == 0:
        return rho // 2 - 1
    return n + 1 - (rho + 1) // 2


def bw_slopes(rho: int, n: int) -> SlopeMultiset:
    """
    Slopes of the isocrystal of the stratum rho.

    rho = 2k: {1/2 - 1/(2k): 2k, 1/2: 2n+2-4k, 1/2 + 1/(2k): 2k};
    rho odd: supersingular, {1/2: 2n+2}.
    """
    if not 1 <= rho <= n + 1:
        raise ValueError(f"rho must lie in 1..{n + 1}, got {rho}")
    half = Fraction(1, 2)
    if rho % 2:
        return SlopeMultiset.from_counts({half: 2 * n + 2})
    k = rho // 2
    counts = {
        half - Fraction(1, 2 * k): 2 * k,
        half: 2 * n + 2 - 4 * k,
        half + Fraction(1, 2 * k): 2 * k,
    }
    return SlopeMultiset.from_counts(counts)


def rho_for(n: int, a: int) -> int:
    """The unique rho whose stratum has dimension a."""
    _check_range(n, a)
    matches = [rho for rho in range(1, n + 2) if n - bw_codim(rho, n) == a]
    if len(matches) != 1:
        raise InternalConsistencyError(f"{len(matches)} values of rho give dimension {a} for n={n}")
    return matches[0]


def closed_form_unitary(n: int, a: int, behavior: PrimeBehavior) -> int:
    _check_range(n, a)
    if PrimeBehavior(behavior) == PrimeBehavior.SPLIT:
        return a + 1
    return a if 2 * a <= n else a + 1


def filtration_route(n: int, a: int, behavior: PrimeBehavior) -> int:
    """a' = eo_invariant(standard(n,a) ⊕ E), E the elliptic module."""
    M = standard_module(n, a, kappa(behavior))
    return eo_invariant(direct_sum(M, elliptic_for(behavior)))


def t_operator_route(n: int, a: int) -> int:
    """
    a' for an inert prime from the T-operator: the interval (r, s) of the sum
    with the supersingular module is compared with that of standard(n+1, a').
    """
    L = direct_sum(standard_module(n, a, kappa(PrimeBehavior.INERT)), elliptic_for(PrimeBehavior.INERT))
    interval = t_fixed_interval(L)
    matches = [b for b in range(n + 2) if r_s(n + 1, b) == interval]
    if len(matches) != 1:
        raise InternalConsistencyError(
            f"T-operator interval {interval} matches {matches} for n={n}, a={a}"
        )
    return matches[0]


def p_rank_route(n: int, a: int) -> int:
    """a' for a split prime from f(A_0 x A) = f(A) + 1."""
    k = kappa(PrimeBehavior.SPLIT)
    target = p_rank(standard_module(n, a, k)) + p_rank(elliptic_for(PrimeBehavior.SPLIT))
    matches = [b for b in range(n + 2) if p_rank(standard_module(n + 1, b, k)) == target]
    if len(matches) != 1:
        raise InternalConsistencyError(f"p-rank {target} matches {matches} for n={n}, a={a}")
    return matches[0]


def codim_route(n: int, a: int) -> int:
    """a' from the codimension formula: rho is kept and the codimension recomputed."""
    rho = rho_for(n, a)
    return n + 1 - bw_codim(rho, n + 1)


def embed_image_unitary(n: int, a: int, behavior: PrimeBehavior) -> UnitaryEmbeddingRow:
    """
    Image of the stratum a under GU(n,1) -> GU(n+1,1), by every route.

    Raises:
        InternalConsistencyError: if the routes disagree
    """
    behavior = PrimeBehavior(behavior)
    closed = closed_form_unitary(n, a, behavior)
    filtration = filtration_route(n, a, behavior)
    if behavior == PrimeBehavior.INERT:
        second, second_name = t_operator_route(n, a), "t-operator"
        codim = codim_route(n, a)
    else:
        second, second_name = p_rank_route(n, a), "p-rank"
        codim = None
    values = [closed, filtration, second] + ([codim] if codim is not None else [])
    row = UnitaryEmbeddingRow(
        a=a,
        closed_form=closed,
        filtration=filtration,
        second_route=second,
        second_route_name=second_name,
        codim_route=codim,
        agree=len(set(values)) == 1,
    )
    if not row.agree:
        M = direct_sum(standard_module(n, a, kappa(behavior)), elliptic_for(behavior))
        raise InternalConsistencyError(
            f"Routes disagree for n={n}, a={a}, {behavior.value}: {values}",
            trace={"row": row.model_dump(), "frob": M.frob, "ver": M.ver},
        )
    return row


def codim_consistency(n: int) -> List[Dict]:
    """
    Per stratum: rho, the codimension before and after, and whether the
    codimension route reproduces the closed form. Even rho keeps the
    codimension, odd rho raises it by one, and even rho occurs exactly above
    dimension n/2.
    """
    rows = []
    for a in range(n + 1):
        rho = rho_for(n, a)
        before, after = bw_codim(rho, n), bw_codim(rho, n + 1)
        closed = closed_form_unitary(n, a, PrimeBehavior.INERT)
        expected_shift = 0 if rho % 2 == 0 else 1
        rows.append(
            {
                "a": a,
                "rho": rho,
                "codim": before,
                "codim_image": after,
                "image": codim_route(n, a),
                "closed_form": closed,
                "ok": after - before == expected_shift
                and codim_route(n, a) == closed
                and (rho % 2 == 0) == (2 * a > n),
            }
        )
    return rows


def unitary_catalog(n: int, behavior: PrimeBehavior) -> List[UnitaryStratumInfo]:
    """
    Strata of GU(n,1) with dimension, p-rank and a-number.

    shifted_n is the parameter of the same family in the (n+1,1) indexing; the
    Newton data (rho, supersingular flag, slopes) are filled in for inert p.
    """
    behavior = PrimeBehavior(behavior)
    rows = []
    for a in range(n + 1):
        M = standard_module(n, a, kappa(behavior))
        info = UnitaryStratumInfo(
            a=a,
            dim=a,
            p_rank=p_rank(M),
            a_number=a_number(M),
            shifted_n=n - 1,
        )
        if behavior == PrimeBehavior.INERT:
            rho = rho_for(n, a)
            info.rho = rho
            info.supersingular = rho % 2 == 1
            info.slopes = bw_slopes(rho, n)
        rows.append(info)
    return rows
