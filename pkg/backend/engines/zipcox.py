"""
Coxeter Zip Datum Module for EO stratum combinatorics.

This module provides the abstract zip datum (W, W_mu, ^muW, psi): the
automorphism psi, the partial order on ^muW, the subgroup E_w, framed-orbit
equality and the reduction of an arbitrary Weyl element to its canonical
^muW label. Everything is brute force over W_mu and E_w, which is small at
the ranks in use.
"""

import logging
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

import networkx as nx

from backend.engines import weyl
from backend.engines.errors import InternalConsistencyError
from backend.models.models import (
    CoxeterZipDatum,
    PsiKind,
    PsiSpec,
    StratumLabel,
    WeylElement,
    WeylFamily,
    WeylGroupSpec,
)


# Configure logger
logger = logging.getLogger(__name__)

Perm = weyl.Perm


def psi_spec(group: WeylGroupSpec, kind: PsiKind) -> PsiSpec:
    """
    Build the psi of one of the three orthogonal configurations.

    identity: both split cases; diagram-swap: s_{m-1} <-> s_m (D family,
    nonsplit ambient); inner-sm: conjugation by s_m (B family, nonsplit source).
    """
    kind = PsiKind(kind)
    count = group.generator_count
    diagram = list(range(1, count + 1))
    twist = weyl.identity_perm(group.degree)
    if kind == PsiKind.DIAGRAM_SWAP:
        if group.family != WeylFamily.D:
            raise ValueError("The diagram swap needs a type D group")
        m = group.rank
        diagram[m - 2], diagram[m - 1] = m, m - 1
    elif kind == PsiKind.INNER_SM:
        if group.family == WeylFamily.A:
            raise ValueError("Int(s_m) is only used for orthogonal groups")
        twist = weyl.simple_reflection_perm(group, group.rank)
    return PsiSpec(diagram_perm=tuple(diagram), twist=twist, kind=kind)


def make_datum(
    group: WeylGroupSpec,
    levi_gens,
    psi: PsiSpec,
    n: Optional[int] = None,
) -> CoxeterZipDatum:
    """Validated zip datum; psi must map W_mu onto itself."""
    datum = CoxeterZipDatum(group=group, levi_gens=tuple(sorted(set(levi_gens))), psi=psi, n=n)
    w_mu = weyl.parabolic_perms(group, datum.levi_gens)
    for i in datum.levi_gens:
        image = psi_apply_perm(datum, weyl.simple_reflection_perm(group, i))
        if image not in w_mu:
            raise ValueError(f"psi(s_{i}) = {image} leaves W_mu")
    return datum


def orthogonal_datum(n: int, psi_kind: PsiKind = PsiKind.IDENTITY) -> CoxeterZipDatum:
    """Zip datum of SO(n,2): W of type B/D, W_mu = <s_2, ..., s_m>."""
    group = weyl.group_for_n(n)
    return make_datum(group, weyl.levi_generators(group), psi_spec(group, psi_kind), n=n)


@lru_cache(maxsize=None)
def _psi_table(group: WeylGroupSpec, psi: PsiSpec) -> Dict[Perm, Perm]:
    twist = psi.twist
    twist_inv = weyl.invert_perm(twist)
    table = {}
    for perm in weyl.elements_perm(group):
        word = weyl.reduced_word_perm(group, perm)
        image = weyl.evaluate_word_perm(group, [psi.diagram_perm[i - 1] for i in word])
        table[perm] = weyl.compose(weyl.compose(twist, image), twist_inv)
    logger.debug(f"psi table built for {psi.kind.value} on {len(table)} elements")
    return table


def psi_apply_perm(D: CoxeterZipDatum, perm: Perm) -> Perm:
    return _psi_table(D.group, D.psi)[perm]


def psi_apply(D: CoxeterZipDatum, w: WeylElement) -> WeylElement:
    return weyl.WeylElement.model_construct(perm=psi_apply_perm(D, w.perm), group=D.group)


def _w_mu(D: CoxeterZipDatum) -> FrozenSet[Perm]:
    return weyl.parabolic_perms(D.group, D.levi_gens)


def _theta(D: CoxeterZipDatum, w: Perm):
    w_inv = weyl.invert_perm(w)

    def theta(x: Perm) -> Perm:
        return psi_apply_perm(D, weyl.compose(weyl.compose(w, x), w_inv))

    return theta


@lru_cache(maxsize=None)
def compute_Ew_perms(D: CoxeterZipDatum, w: Perm) -> FrozenSet[Perm]:
    """
    E_w as the intersection of theta^k(K) over one full period of theta.

    K = w W_mu w^-1 and theta(x) = psi(w x w^-1). theta is a bijection of W of
    finite order, so the images of K cycle back to K.
    """
    w_inv = weyl.invert_perm(w)
    K = frozenset(weyl.compose(weyl.compose(w, v), w_inv) for v in _w_mu(D))
    theta = _theta(D, w)
    result = set(K)
    image = K
    while True:
        image = frozenset(theta(x) for x in image)
        if image == K:
            break
        result &= image
    return frozenset(result)


def compute_Ew(D: CoxeterZipDatum, w: WeylElement) -> List[WeylElement]:
    """
    The largest theta-stable subgroup of w W_mu w^-1.

    Parameters:
        D (CoxeterZipDatum): Zip datum
        w (WeylElement): Element of W

    Returns:
        list of WeylElement, sorted by one-line notation
    """
    return [
        weyl.WeylElement.model_construct(perm=x, group=D.group)
        for x in sorted(compute_Ew_perms(D, w.perm))
    ]


def fixed_point_Ew(D: CoxeterZipDatum, w: WeylElement) -> FrozenSet[Perm]:
    """E_w by the iteration H_{k+1} = H_k ∩ theta(H_k) starting at K."""
    w_inv = weyl.invert_perm(w.perm)
    H = frozenset(weyl.compose(weyl.compose(w.perm, v), w_inv) for v in _w_mu(D))
    theta = _theta(D, w.perm)
    while True:
        nxt = H & frozenset(theta(x) for x in H)
        if nxt == H:
            return H
        H = nxt


@lru_cache(maxsize=None)
def orbit_perms(D: CoxeterZipDatum, w: Perm) -> FrozenSet[Perm]:
    """{v^-1 w e psi(v) : v in W_mu, e in E_w}."""
    E = compute_Ew_perms(D, w)
    w_e = {weyl.compose(w, e) for e in E}
    found = set()
    for v in _w_mu(D):
        left = weyl.invert_perm(v)
        right = psi_apply_perm(D, v)
        for x in w_e:
            found.add(weyl.compose(weyl.compose(left, x), right))
    return frozenset(found)


def orbit_equal(D: CoxeterZipDatum, w: WeylElement, w_prime: WeylElement) -> bool:
    if w.group != D.group or w_prime.group != D.group:
        raise ValueError("Elements must belong to the datum's Weyl group")
    return w_prime.perm in orbit_perms(D, w.perm)


@lru_cache(maxsize=None)
def labels(D: CoxeterZipDatum) -> Tuple[StratumLabel, ...]:
    """
    ^muW as StratumLabels, sorted by (dim, one-line notation).

    Orthogonal data carry the names w_0, ..., w_n (and w_{m-1}^dagger); other
    data are named by a reduced word.
    """
    names: Dict[Perm, str] = {}
    if D.n is not None:
        for name, word in weyl.closed_form_muW(D.n):
            names[weyl.evaluate_word_perm(D.group, word)] = name
    found = []
    for perm in weyl.min_coset_perms(D.group, D.levi_gens):
        word = weyl.reduced_word_perm(D.group, perm)
        name = names.get(perm) or ("s" + ".".join(str(i) for i in word) if word else "1")
        found.append(
            StratumLabel(
                name=name,
                rep=weyl.WeylElement.model_construct(perm=perm, group=D.group),
                word=word,
                dim=len(word),
            )
        )
    return tuple(found)


def label_by_name(D: CoxeterZipDatum, name: str) -> StratumLabel:
    for label in labels(D):
        if label.name == name:
            return label
    raise ValueError(f"No stratum label named {name!r}")


def canonical_label(D: CoxeterZipDatum, w: WeylElement) -> StratumLabel:
    """
    The unique ^muW element in the framed orbit of w.

    Raises:
        InternalConsistencyError: if no label or several labels share the orbit
    """
    orbit = orbit_perms(D, w.perm)
    matches = [label for label in labels(D) if label.rep.perm in orbit]
    if len(matches) != 1:
        raise InternalConsistencyError(
            f"{w} meets {len(matches)} labels in its framed orbit",
            trace={"element": list(w.perm), "matches": [m.name for m in matches]},
        )
    return matches[0]


def psi_permutes_labels(D: CoxeterZipDatum) -> Dict[str, str]:
    """psi restricted to ^muW, as a map on label names."""
    by_perm = {label.rep.perm: label.name for label in labels(D)}
    mapping = {}
    for label in labels(D):
        image = psi_apply_perm(D, label.rep.perm)
        if image not in by_perm:
            raise InternalConsistencyError(f"psi({label.name}) = {image} is not in ^muW")
        mapping[label.name] = by_perm[image]
    return mapping


@lru_cache(maxsize=None)
def _preceq_perm(D: CoxeterZipDatum, w: Perm, w_prime: Perm) -> bool:
    for v in _w_mu(D):
        x = weyl.compose(weyl.compose(weyl.invert_perm(v), w), psi_apply_perm(D, v))
        if weyl.bruhat_leq_perm(D.group, x, w_prime):
            return True
    return False


def preceq(D: CoxeterZipDatum, w: StratumLabel, w_prime: StratumLabel) -> bool:
    """w ⪯ w' iff v^-1 w psi(v) <= w' in the Bruhat order for some v in W_mu."""
    return _preceq_perm(D, w.rep.perm, w_prime.rep.perm)


def order_graph(D: CoxeterZipDatum) -> nx.DiGraph:
    """Strict order relation of ⪯ on ^muW, nodes named by label."""
    graph = nx.DiGraph()
    found = labels(D)
    for label in found:
        graph.add_node(label.name, dim=label.dim, perm=list(label.rep.perm))
    for a in found:
        for b in found:
            if a.name != b.name and preceq(D, a, b):
                graph.add_edge(a.name, b.name)
    if not nx.is_directed_acyclic_graph(graph):
        raise InternalConsistencyError("The relation on ^muW is not antisymmetric")
    return graph


def hasse_diagram(D: CoxeterZipDatum) -> List[Tuple[str, str]]:
    """Covering relations (lower, upper) of ⪯, sorted."""
    reduced = nx.transitive_reduction(order_graph(D))
    edges = sorted(reduced.edges())
    logger.info(f"Hasse diagram with {len(edges)} covers on {reduced.number_of_nodes()} labels")
    return edges


def orbit_classes(D: CoxeterZipDatum) -> List[FrozenSet[Perm]]:
    """
    Partition W into framed orbits.

    Raises:
        InternalConsistencyError: if two orbits overlap without coinciding
    """
    assigned: Dict[Perm, int] = {}
    classes: List[FrozenSet[Perm]] = []
    for perm in weyl.elements_perm(D.group):
        if perm in assigned:
            continue
        orbit = orbit_perms(D, perm)
        for x in orbit:
            if x in assigned or orbit_perms(D, x) != orbit:
                raise InternalConsistencyError(
                    f"Framed orbits of {perm} and {x} overlap without coinciding"
                )
            assigned[x] = len(classes)
        classes.append(orbit)
    logger.info(f"{len(classes)} framed orbits on {len(assigned)} elements")
    return classes


def commuting_fixed_reflections(D: CoxeterZipDatum, w: WeylElement) -> Set[int]:
    """Indices i in the Levi with s_i w = w s_i and psi(s_i) = s_i; each lies in E_w."""
    found = set()
    for i in D.levi_gens:
        s = weyl.simple_reflection_perm(D.group, i)
        if weyl.compose(s, w.perm) == weyl.compose(w.perm, s) and psi_apply_perm(D, s) == s:
            found.add(i)
    return found
