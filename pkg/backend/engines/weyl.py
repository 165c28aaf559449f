"""
Weyl Group Module for EO stratum combinatorics.

This module provides the Weyl groups of types B_m and D_m, realized as
permutations of {1..N} commuting with i -> N+1-i, and the symmetric group S_g
(type A_{g-1}). It computes lengths, reduced words, Bruhat order, longest
elements, minimal coset representatives ^muW and the closed-form lists of
labelled words w_0, ..., w_n (plus w_{m-1}^dagger for n even).

Permutations are 1-based tuples in one-line notation; (ab)(i) = a(b(i)).
"""

import logging
from collections import deque
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Sequence, Tuple

from backend.models.models import WeylElement, WeylFamily, WeylGroupSpec, Word


# Configure logger
logger = logging.getLogger(__name__)

Perm = Tuple[int, ...]


def weyl_group(family: WeylFamily, rank: int) -> WeylGroupSpec:
    return WeylGroupSpec(family=WeylFamily(family), rank=rank)


def group_for_n(n: int) -> WeylGroupSpec:
    """Weyl group of SO(n,2): B_{(n+1)/2} for n odd, D_{n/2+1} for n even."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if n % 2:
        return weyl_group(WeylFamily.B, (n + 1) // 2)
    return weyl_group(WeylFamily.D, n // 2 + 1)


def identity_perm(N: int) -> Perm:
    return tuple(range(1, N + 1))


def compose(a: Perm, b: Perm) -> Perm:
    """(ab)(i) = a(b(i))."""
    return tuple(a[x - 1] for x in b)


def invert_perm(a: Perm) -> Perm:
    inv = [0] * len(a)
    for i, x in enumerate(a, start=1):
        inv[x - 1] = i
    return tuple(inv)


def transposition_product(N: int, pairs: Iterable[Tuple[int, int]]) -> Perm:
    """Product of disjoint transpositions, as a permutation of 1..N."""
    perm = list(range(1, N + 1))
    for i, j in pairs:
        perm[i - 1], perm[j - 1] = j, i
    return tuple(perm)


def element(group: WeylGroupSpec, perm: Sequence[int]) -> WeylElement:
    """Validated WeylElement."""
    return WeylElement(perm=tuple(perm), group=group)


def _trusted(group: WeylGroupSpec, perm: Perm) -> WeylElement:
    return WeylElement.model_construct(perm=perm, group=group)


def _check_same_group(a: WeylElement, b: WeylElement):
    if a.group != b.group:
        raise ValueError(f"Group mismatch: {a.group} vs {b.group}")


@lru_cache(maxsize=None)
def simple_reflection_perm(group: WeylGroupSpec, i: int) -> Perm:
    """One-line notation of s_i."""
    count = group.generator_count
    if not 1 <= i <= count:
        raise ValueError(f"Simple reflection index {i} out of range 1..{count}")
    N, m = group.degree, group.rank
    if group.family == WeylFamily.A:
        return transposition_product(N, [(i, i + 1)])
    if i < m:
        return transposition_product(N, [(i, i + 1), (N - i, N + 1 - i)])
    if group.family == WeylFamily.B:
        return transposition_product(N, [(m, m + 2)])
    return transposition_product(N, [(m - 1, m + 1), (m, m + 2)])


def simple_reflection(group: WeylGroupSpec, i: int) -> WeylElement:
    return _trusted(group, simple_reflection_perm(group, i))


def mul(a: WeylElement, b: WeylElement) -> WeylElement:
    _check_same_group(a, b)
    return _trusted(a.group, compose(a.perm, b.perm))


def inverse(a: WeylElement) -> WeylElement:
    return _trusted(a.group, invert_perm(a.perm))


def identity(group: WeylGroupSpec) -> WeylElement:
    return _trusted(group, identity_perm(group.degree))


def evaluate_word_perm(group: WeylGroupSpec, word: Sequence[int]) -> Perm:
    perm = identity_perm(group.degree)
    for i in word:
        perm = compose(perm, simple_reflection_perm(group, i))
    return perm


def evaluate_word(group: WeylGroupSpec, word: Sequence[int]) -> WeylElement:
    return _trusted(group, evaluate_word_perm(group, word))


def right_descents_perm(group: WeylGroupSpec, perm: Perm) -> FrozenSet[int]:
    """
    Indices i with l(w s_i) < l(w), read off the one-line notation.

    For i < m (and in type A) the test is w(i) > w(i+1); for s_m it is
    w(m) > w(m+1) in type B and w(m-1) > w(m+1) in type D.
    """
    m = group.rank
    found = set()
    for i in range(1, group.generator_count + 1):
        if group.family == WeylFamily.A or i < m:
            if perm[i - 1] > perm[i]:
                found.add(i)
        elif group.family == WeylFamily.B:
            if perm[m - 1] > perm[m]:
                found.add(i)
        elif perm[m - 2] > perm[m]:
            found.add(i)
    return frozenset(found)


def left_descents_perm(group: WeylGroupSpec, perm: Perm) -> FrozenSet[int]:
    return right_descents_perm(group, invert_perm(perm))


def descents(w: WeylElement, side: str = "right") -> FrozenSet[int]:
    if side == "right":
        return right_descents_perm(w.group, w.perm)
    if side == "left":
        return left_descents_perm(w.group, w.perm)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


@lru_cache(maxsize=None)
def reduced_word_perm(group: WeylGroupSpec, perm: Perm) -> Word:
    """Reduced word by peeling the smallest right descent."""
    letters = []
    current = perm
    while True:
        found = right_descents_perm(group, current)
        if not found:
            break
        i = min(found)
        letters.append(i)
        current = compose(current, simple_reflection_perm(group, i))
    return tuple(reversed(letters))


def reduced_word(w: WeylElement) -> Word:
    return reduced_word_perm(w.group, w.perm)


def length_perm(group: WeylGroupSpec, perm: Perm) -> int:
    return len(reduced_word_perm(group, perm))


def length(w: WeylElement) -> int:
    return length_perm(w.group, w.perm)


@lru_cache(maxsize=None)
def bruhat_leq_perm(group: WeylGroupSpec, a: Perm, b: Perm) -> bool:
    """
    Bruhat order by the subword recursion along a reduced word of b.

    With s the last letter of the reduced word of b (so bs < b):
    a <= b  iff  min(a, as) <= bs.
    """
    if a == b:
        return True
    word = reduced_word_perm(group, b)
    if not word:
        return False
    if len(reduced_word_perm(group, a)) >= len(word):
        return False
    s = word[-1]
    s_perm = simple_reflection_perm(group, s)
    bs = compose(b, s_perm)
    if s in right_descents_perm(group, a):
        a = compose(a, s_perm)
    return bruhat_leq_perm(group, a, bs)


def bruhat_leq(a: WeylElement, b: WeylElement) -> bool:
    _check_same_group(a, b)
    return bruhat_leq_perm(a.group, a.perm, b.perm)


def _generate(group: WeylGroupSpec, gens: Sequence[int]) -> List[Perm]:
    start = identity_perm(group.degree)
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for i in gens:
            nxt = compose(current, simple_reflection_perm(group, i))
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    return order


@lru_cache(maxsize=None)
def elements_perm(group: WeylGroupSpec) -> Tuple[Perm, ...]:
    """All elements, in breadth-first order from the identity."""
    found = _generate(group, range(1, group.generator_count + 1))
    logger.debug(f"Enumerated {len(found)} elements of {group.family.value}_{group.rank}")
    return tuple(found)


def elements(group: WeylGroupSpec) -> List[WeylElement]:
    return [_trusted(group, perm) for perm in elements_perm(group)]


@lru_cache(maxsize=None)
def parabolic_perms(group: WeylGroupSpec, levi_gens: Tuple[int, ...]) -> FrozenSet[Perm]:
    """Elements of the parabolic subgroup W_mu generated by levi_gens."""
    return frozenset(_generate(group, levi_gens))


def parabolic_subgroup(group: WeylGroupSpec, levi_gens: Iterable[int]) -> List[WeylElement]:
    gens = tuple(sorted(set(levi_gens)))
    return [_trusted(group, perm) for perm in sorted(parabolic_perms(group, gens))]


def levi_generators(group: WeylGroupSpec) -> Tuple[int, ...]:
    """
    Simple reflections fixing position 1: the W_mu of the SO(n,2) zip datum.

    This is {2..m} except in D_2, where s_2 = (1,3)(2,4) moves position 1
    and W_mu is trivial.
    """
    return tuple(
        i
        for i in range(1, group.generator_count + 1)
        if simple_reflection_perm(group, i)[0] == 1
    )


def _longest_in(group: WeylGroupSpec, gens: Sequence[int]) -> Perm:
    # Multiply by ascents until none is left
    perm = identity_perm(group.degree)
    while True:
        found = right_descents_perm(group, perm)
        ascents = [i for i in gens if i not in found]
        if not ascents:
            return perm
        perm = compose(perm, simple_reflection_perm(group, ascents[0]))


def longest_element_formula(group: WeylGroupSpec) -> Perm:
    """
    Closed form of w_0: the reversal i -> N+1-i, except that in D_m with m
    odd the two middle positions m, m+1 are fixed.
    """
    N, m = group.degree, group.rank
    perm = [N + 1 - i for i in range(1, N + 1)]
    if group.family == WeylFamily.D and m % 2:
        perm[m - 1], perm[m] = m, m + 1
    return tuple(perm)


def longest_elements(
    group: WeylGroupSpec, levi_gens: Iterable[int]
) -> Tuple[WeylElement, WeylElement]:
    """
    Longest element w_0 of W and w_{0,mu} of the parabolic subgroup.

    Both are derived by climbing ascents; w_0 is checked against the closed
    form and both are checked to have no ascent left.
    """
    gens = tuple(sorted(set(levi_gens)))
    w0 = _longest_in(group, range(1, group.generator_count + 1))
    w0_mu = _longest_in(group, gens)
    if w0 != longest_element_formula(group):
        raise ValueError(
            f"Derived w_0 {w0} disagrees with the closed form {longest_element_formula(group)}"
        )
    return _trusted(group, w0), _trusted(group, w0_mu)


@lru_cache(maxsize=None)
def min_coset_perms(group: WeylGroupSpec, levi_gens: Tuple[int, ...]) -> Tuple[Perm, ...]:
    gens = frozenset(levi_gens)
    reps = [
        perm
        for perm in elements_perm(group)
        if not (left_descents_perm(group, perm) & gens)
    ]
    reps.sort(key=lambda perm: (length_perm(group, perm), perm))
    return tuple(reps)


def min_coset_reps(group: WeylGroupSpec, levi_gens: Iterable[int]) -> List[WeylElement]:
    """
    Minimal-length representatives of W_mu \\ W, sorted by (length, one-line).

    Parameters:
        group (WeylGroupSpec): Ambient Weyl group
        levi_gens: Generators of W_mu

    Returns:
        list of WeylElement: one element per right coset W_mu w
    """
    gens = tuple(sorted(set(levi_gens)))
    return [_trusted(group, perm) for perm in min_coset_perms(group, gens)]


def rank_for_n(n: int) -> int:
    return (n + 1) // 2 if n % 2 else n // 2 + 1


def dagger_name(n: int) -> str:
    return f"w_{rank_for_n(n) - 1}^dagger"


def closed_form_muW(n: int) -> List[Tuple[str, Word]]:
    """
    Labelled words of ^muW for SO(n,2).

    w_i = s_1...s_i for i <= m; beyond m the word turns back down:
    s_1...s_m s_{m-1}...s_{n-i+1} (n odd) or s_1...s_m s_{m-2}...s_{n-i+1}
    (n even). For n even the extra label w_{m-1}^dagger = s_1...s_{m-2}s_m.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    m = rank_for_n(n)
    top = m - 1 if n % 2 else m - 2
    labels = []
    for i in range(n + 1):
        if i <= m:
            word = tuple(range(1, i + 1))
        else:
            word = tuple(range(1, m + 1)) + tuple(range(top, n - i, -1))
        labels.append((f"w_{i}", word))
    if n % 2 == 0:
        labels.append((dagger_name(n), tuple(range(1, m - 1)) + (m,)))
    return labels


def typeA_eo_index(w: WeylElement) -> int:
    """
    EO invariant a of a type-A coset representative: a = w^{-1}(1) - 1.

    w must satisfy w^{-1}(2) < ... < w^{-1}(g), i.e. have no left descent
    among s_2, ..., s_{g-1}; this is the set of cycles (1 2 ... a+1).
    """
    if w.group.family != WeylFamily.A:
        raise ValueError("typeA_eo_index needs a type A element")
    inv = invert_perm(w.perm)
    if any(inv[i] > inv[i + 1] for i in range(1, len(inv) - 1)):
        raise ValueError(f"{w} is not a minimal coset representative")
    return inv[0] - 1


def typeA_cycle(g: int, a: int) -> WeylElement:
    """delta_a = (1 2 ... a+1) in S_g."""
    if not 0 <= a < g:
        raise ValueError(f"a must lie in 0..{g - 1}, got {a}")
    perm = list(range(1, g + 1))
    for i in range(1, a + 1):
        perm[i - 1] = i + 1
    perm[a] = 1
    return element(weyl_group(WeylFamily.A, g), perm)
