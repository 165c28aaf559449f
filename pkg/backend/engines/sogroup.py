"""
Orthogonal Group Module for EO stratum combinatorics.

This module provides SO(J_{n+2}) as matrices over GF(p^2): the Gram matrices,
the signed permutation representatives P_w, the parabolic, Levi and Borel
subgroups as shape predicates, the (twisted) Frobenius, the randomized frame
verification and the embedding matrices iota between SO(n-1,2) and SO(n,2).

Indices follow the 1-based conventions of the Weyl group module; matrices are
0-based galois FieldArrays.
"""

import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import galois
import numpy as np
from sympy import legendre_symbol

from backend.engines import gf, weyl
from backend.models.models import (
    FrameCandidate,
    FrameReport,
    FrameViolation,
    GramSpec,
    OrthMatrix,
    Parity,
    Splitness,
    Subgroup,
    WeylElement,
)


# Configure logger
logger = logging.getLogger(__name__)

FRAME_CONDITIONS = ("i", "ii", "iii", "iv")


@lru_cache(maxsize=None)
def working_field(p: int):
    """GF(p^2), where every frame and embedding computation takes place."""
    return gf.gf(gf.field_spec(p, 2))


def gram_spec(n: int, p: int, c: int = 1, nonsplit: bool = False) -> GramSpec:
    if n % 2:
        parity = Parity.ODD
    else:
        parity = Parity.EVEN_NONSPLIT if nonsplit else Parity.EVEN_SPLIT
    return GramSpec(n=n, parity=parity, p=p, c=c)


def _middle(gram: GramSpec) -> Optional[int]:
    """0-based index of the anisotropic middle vector, if any."""
    return gram.m if gram.parity == Parity.ODD else None


def gram_matrix(gram: GramSpec) -> galois.FieldArray:
    """J = antidiag(1/2, ..., 1/2) with c in the middle when n is odd."""
    GF = working_field(gram.p)
    N = gram.size
    J = GF.Zeros((N, N))
    h = gf.half(GF)
    for i in range(N):
        J[i, N - 1 - i] = h
    middle = _middle(gram)
    if middle is not None:
        J[middle, middle] = gf.signed(GF, gram.c)
    return J


def is_in_SO(X: galois.FieldArray, gram: GramSpec) -> bool:
    """True iff X^t J X = J and det X = 1."""
    N = gram.size
    if X.shape != (N, N):
        return False
    J = gram_matrix(gram)
    if not np.array_equal(X.T @ J @ X, J):
        return False
    return np.linalg.det(X) == 1


def orth_matrix(gram: GramSpec, X: galois.FieldArray) -> OrthMatrix:
    if not is_in_SO(X, gram):
        raise ValueError(f"Matrix is not in SO(J_{gram.size}) over GF({gram.p}^2)")
    return OrthMatrix(matrix=X, gram=gram)


def _trusted(gram: GramSpec, X: galois.FieldArray) -> OrthMatrix:
    return OrthMatrix.model_construct(matrix=X, gram=gram)


def weyl_group_of(gram: GramSpec):
    return weyl.group_for_n(gram.n)


def signed_permutation_matrix(gram: GramSpec, perm: Sequence[int]) -> galois.FieldArray:
    """
    P_w with P e_j = e_{w(j)}.

    For n odd the middle entry is -1 when w moves an odd number of the first m
    positions past the middle, which makes w -> P_w a homomorphism into SO.
    """
    GF = working_field(gram.p)
    N = gram.size
    if len(perm) != N:
        raise ValueError(f"Permutation of length {len(perm)} does not fit J_{N}")
    P = GF.Zeros((N, N))
    for j, image in enumerate(perm):
        P[image - 1, j] = 1
    middle = _middle(gram)
    if middle is not None:
        m = gram.m
        flips = sum(1 for i in range(m) if perm[i] >= m + 2)
        if flips % 2:
            P[middle, middle] = gf.signed(GF, -1)
    return P


def reflection_rep(gram: GramSpec, i: int) -> OrthMatrix:
    group = weyl_group_of(gram)
    return _trusted(gram, signed_permutation_matrix(gram, weyl.simple_reflection_perm(group, i)))


def word_rep(gram: GramSpec, w: Union[WeylElement, Sequence[int]]) -> OrthMatrix:
    """
    P_w as the product of P_{s_i} along a word.

    A WeylElement is evaluated on its reduced word; a plain sequence is taken
    as the word itself.
    """
    group = weyl_group_of(gram)
    word = weyl.reduced_word(w) if isinstance(w, WeylElement) else tuple(w)
    X = gf.identity(working_field(gram.p), gram.size)
    for i in word:
        X = X @ reflection_rep(gram, i).matrix
    return _trusted(gram, X)


def weyl_element_of(gram: GramSpec, X: galois.FieldArray) -> WeylElement:
    """
    Recover w from a signed permutation matrix X = P_w.

    Raises:
        ValueError: if X is not of the form P_w
    """
    N = gram.size
    arr = np.asarray(X.view(np.ndarray))
    perm = []
    for j in range(N):
        rows = np.nonzero(arr[:, j])[0]
        if len(rows) != 1:
            raise ValueError(f"Column {j + 1} is not monomial")
        perm.append(int(rows[0]) + 1)
    w = weyl.element(weyl_group_of(gram), perm)
    if not np.array_equal(X, signed_permutation_matrix(gram, w.perm)):
        raise ValueError(f"Matrix is monomial with pattern {w} but is not P_w")
    return w


def twist_matrix(gram: GramSpec, twisted: bool) -> galois.FieldArray:
    """
    h of the twisted Frobenius X -> h X^(p) h^-1.

    n even: the permutation matrix swapping the two middle basis vectors;
    n odd: P_{s_m}. Untwisted: the identity.
    """
    GF = working_field(gram.p)
    N = gram.size
    if not twisted:
        return gf.identity(GF, N)
    if gram.parity == Parity.ODD:
        return reflection_rep(gram, gram.m).matrix
    m = gram.m
    perm = weyl.transposition_product(N, [(m, m + 1)])
    h = GF.Zeros((N, N))
    for j, image in enumerate(perm):
        h[image - 1, j] = 1
    return h


def _phi(gram: GramSpec, X: galois.FieldArray, twisted: bool) -> galois.FieldArray:
    h = twist_matrix(gram, twisted)
    return h @ gf.entrywise_frobenius(X) @ np.linalg.inv(h)


def _phi_inverse(gram: GramSpec, Y: galois.FieldArray, twisted: bool) -> galois.FieldArray:
    # Frobenius is an involution on GF(p^2)
    h = twist_matrix(gram, twisted)
    return gf.entrywise_frobenius(np.linalg.inv(h) @ Y @ h)


def twisted_frobenius(X: OrthMatrix, twisted: bool) -> OrthMatrix:
    return _trusted(X.gram, _phi(X.gram, X.matrix, twisted))


def inverse_frobenius(X: OrthMatrix, twisted: bool) -> OrthMatrix:
    return _trusted(X.gram, _phi_inverse(X.gram, X.matrix, twisted))


def _as_ints(X: galois.FieldArray) -> np.ndarray:
    return np.asarray(X.view(np.ndarray))


def _in_P(arr: np.ndarray) -> bool:
    return not arr[1:, 0].any() and not arr[-1, :-1].any()


def _in_Q(arr: np.ndarray) -> bool:
    return not arr[0, 1:].any() and not arr[:-1, -1].any()


def _in_B(arr: np.ndarray) -> bool:
    return not np.tril(arr, -1).any()


def _is_diagonal(arr: np.ndarray) -> bool:
    return not (arr - np.diag(np.diag(arr))).any()


def membership(X: galois.FieldArray, which: Subgroup) -> bool:
    arr = _as_ints(X)
    which = Subgroup(which)
    if which == Subgroup.P:
        return _in_P(arr)
    if which == Subgroup.Q:
        return _in_Q(arr)
    if which == Subgroup.L:
        return _in_P(arr) and _in_Q(arr)
    if which == Subgroup.B:
        return _in_B(arr)
    return _in_B(arr) and _in_P(arr) and _in_Q(arr)


def parabolic_membership(X: OrthMatrix, which: Subgroup) -> bool:
    """
    Block-shape membership in P, Q, L, B or B∩L.

    Parameters:
        X (OrthMatrix): Element of SO(J)
        which (Subgroup): P (first column and last row trivial off the
            diagonal), Q (its transpose shape), L = P ∩ Q, B (upper triangular)
            or B∩L

    Returns:
        bool: Whether X has the required shape
    """
    return membership(X.matrix, which)


def torus_element(gram: GramSpec, ts: Sequence) -> galois.FieldArray:
    """diag(t_1, ..., t_m, [1,] t_m^-1, ..., t_1^-1)."""
    GF = working_field(gram.p)
    m = gram.m
    if len(ts) != m:
        raise ValueError(f"Expected {m} torus parameters, got {len(ts)}")
    ts = GF(np.asarray([int(t) for t in ts]))
    inverse = ts**-1
    middle = [GF(1)] if gram.parity == Parity.ODD else []
    diagonal = list(ts) + middle + list(inverse[::-1])
    D = GF.Zeros((gram.size, gram.size))
    for i, value in enumerate(diagonal):
        D[i, i] = value
    return D


def positive_roots(gram: GramSpec, levi_only: bool = False) -> List[Tuple]:
    """
    Positive root groups of the upper-triangular Borel, as ("long", i, k) or
    ("short", i), 1-based. levi_only drops the roots involving index 1 or N.
    """
    N = gram.size
    middle = gram.m + 1 if gram.parity == Parity.ODD else None
    roots = []
    for i in range(1, N + 1):
        for k in range(i + 1, N + 1):
            if i + k >= N + 1 or middle in (i, k):
                continue
            if levi_only and (i == 1 or k == N):
                continue
            roots.append(("long", i, k))
    if middle is not None:
        for i in range(1, gram.m + 1):
            if levi_only and i == 1:
                continue
            roots.append(("short", i))
    return roots


def root_element(gram: GramSpec, root: Tuple, a) -> galois.FieldArray:
    """
    Root group element x_root(a).

    long (i, k): I + a(E_ik - E_{k'i'}), with j' = N+1-j.
    short (i): I + a E_{i,mid} - (a/2c) E_{mid,i'} - (a^2/4c) E_{i,i'}.
    """
    GF = working_field(gram.p)
    N = gram.size
    a = GF(int(a))
    X = gf.identity(GF, N)
    if root[0] == "long":
        _, i, k = root
        X[i - 1, k - 1] += a
        X[N - k, N - i] -= a
        return X
    _, i = root
    mid = gram.m
    c = gf.signed(GF, gram.c)
    X[i - 1, mid] += a
    X[mid, N - i] -= a / (GF(2) * c)
    X[i - 1, N - i] -= a * a / (GF(4) * c)
    return X


def sample_torus(gram: GramSpec, rng: np.random.Generator) -> galois.FieldArray:
    GF = working_field(gram.p)
    return torus_element(gram, [int(gf.random_unit(GF, rng)) for _ in range(gram.m)])


def _sample_unipotent(gram: GramSpec, rng: np.random.Generator, levi_only: bool):
    GF = working_field(gram.p)
    X = gf.identity(GF, gram.size)
    for root in positive_roots(gram, levi_only=levi_only):
        X = X @ root_element(gram, root, int(GF.Random(seed=rng)))
    return X


def sample_borel(gram: GramSpec, rng: np.random.Generator) -> galois.FieldArray:
    """A random GF(p^2)-point of the upper-triangular Borel."""
    return sample_torus(gram, rng) @ _sample_unipotent(gram, rng, levi_only=False)


def sample_borel_levi(gram: GramSpec, rng: np.random.Generator) -> galois.FieldArray:
    """A random point of B∩L: torus times the Levi root groups."""
    return sample_torus(gram, rng) @ _sample_unipotent(gram, rng, levi_only=True)


def standard_frame(gram: GramSpec, twisted: bool = False) -> FrameCandidate:
    """
    The frame element g.

    g = P_{w_{0,mu} w_0}, that is P_{(1,N)} for n odd and P_{(1,N)(m,m+1)} for
    n even; for n odd with the twisted Frobenius g = P_{(1,N)} P_{s_m}.
    """
    N, m = gram.size, gram.m
    if gram.parity == Parity.ODD:
        perm = weyl.transposition_product(N, [(1, N)])
    else:
        perm = weyl.transposition_product(N, [(1, N), (m, m + 1)])
    g = signed_permutation_matrix(gram, perm)
    if twisted and gram.parity == Parity.ODD:
        g = g @ reflection_rep(gram, m).matrix
    return FrameCandidate(g=_trusted(gram, g))


class _FrameChecker:
    """Evaluates the four frame conditions on individual points."""

    def __init__(self, gram: GramSpec, g: galois.FieldArray, twisted: bool):
        self.gram = gram
        self.twisted = twisted
        self.g = g
        self.g_inv = np.linalg.inv(g)
        self.violations: List[FrameViolation] = []
        self.failed = set()

    def _record(self, condition: str, direction: str, sample: int, witness):
        self.failed.add(condition)
        self.violations.append(
            FrameViolation(
                condition=condition,
                direction=direction,
                sample=sample,
                witness=gf.to_int_rows(witness),
            )
        )
        logger.warning(f"Frame condition ({condition}) {direction} fails at sample {sample}")

    def borel(self, X, sample: int):
        if not membership(X, Subgroup.P):
            self._record("i", "B ⊆ P", sample, X)
        if not membership(self.g_inv @ X @ self.g, Subgroup.Q):
            self._record("ii", "g^-1 B g ⊆ Q", sample, X)

    def borel_levi(self, X, sample: int):
        image = _phi(self.gram, X, self.twisted)
        if not (membership(image, Subgroup.L) and membership(self.g @ image @ self.g_inv, Subgroup.B)):
            self._record("iii", "phi(B∩L) ⊆ g^-1 B g ∩ L", sample, X)
        preimage = _phi_inverse(self.gram, self.g_inv @ X @ self.g, self.twisted)
        if not membership(preimage, Subgroup.BL):
            self._record("iii", "g^-1 B g ∩ L ⊆ phi(B∩L)", sample, X)

    def torus(self, t, sample: int):
        image = self.g @ _phi(self.gram, t, self.twisted) @ self.g_inv
        if not _is_diagonal(_as_ints(image)):
            self._record("iv", "phi(T) ⊆ g^-1 T g", sample, t)
        preimage = _phi_inverse(self.gram, self.g_inv @ t @ self.g, self.twisted)
        if not _is_diagonal(_as_ints(preimage)):
            self._record("iv", "g^-1 T g ⊆ phi(T)", sample, t)


def frame_verify(
    gram: GramSpec,
    cand: FrameCandidate,
    twisted: bool,
    samples: int,
    seed: int,
) -> FrameReport:
    """
    Check that (B, T, g) is a frame for the zip datum with Frobenius phi.

    Conditions: (i) B ⊆ P; (ii) g^-1 B g ⊆ Q; (iii) phi(B∩L) = g^-1 B g ∩ L;
    (iv) phi(T) = g^-1 T g. Every root group and torus generator is checked
    exactly with parameters 1 and a primitive element; then `samples` seeded
    random points of B, B∩L and T are checked in both directions.

    Returns:
        FrameReport with the per-condition outcome and every violation found
    """
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}")
    GF = working_field(gram.p)
    checker = _FrameChecker(gram, cand.g.matrix, twisted)
    generator_checks = 0

    params = [1, int(GF.primitive_element)]
    levi_roots = set(positive_roots(gram, levi_only=True))
    for root in positive_roots(gram):
        for a in params:
            X = root_element(gram, root, a)
            checker.borel(X, -1)
            generator_checks += 1
            if root in levi_roots:
                checker.borel_levi(X, -1)
                generator_checks += 1
    for position in range(gram.m):
        for a in params[1:]:
            ts = [1] * gram.m
            ts[position] = a
            t = torus_element(gram, ts)
            checker.borel(t, -1)
            checker.borel_levi(t, -1)
            checker.torus(t, -1)
            generator_checks += 3

    rng = np.random.default_rng(seed)
    for sample in range(samples):
        checker.borel(sample_borel(gram, rng), sample)
        checker.borel_levi(sample_borel_levi(gram, rng), sample)
        checker.torus(sample_torus(gram, rng), sample)

    report = FrameReport(
        n=gram.n,
        p=gram.p,
        parity=gram.parity,
        twisted=twisted,
        samples=samples,
        seed=seed,
        generator_checks=generator_checks,
        conditions={name: name not in checker.failed for name in FRAME_CONDITIONS},
        violations=checker.violations,
    )
    logger.info(
        f"Frame check n={gram.n} p={gram.p} twisted={twisted}: "
        f"{len(report.violations)} violations over {samples} samples"
    )
    return report


def _embedding_basis(source: GramSpec, target: GramSpec, d: int) -> galois.FieldArray:
    """
    S sending the basis of V' ⊕ <f> (q(f) = d) to the target basis.

    e'_j -> e_j (j <= m'), the source middle vector -> r(e_m - e_{m+1}) with
    r^2 = -c', e'_j -> e_{j+1} (j > m'+1), f -> s(e_m + e_{m+1}) with s^2 = d.
    """
    GF = working_field(target.p)
    N = target.size
    m_src = source.m
    r = gf.sqrt_of(GF, -source.c)
    s = gf.sqrt_of(GF, d)
    S = GF.Zeros((N, N))
    for j in range(1, m_src + 1):
        S[j - 1, j - 1] = 1
    S[m_src, m_src] = r
    S[m_src + 1, m_src] = -r
    for j in range(m_src + 2, source.size + 1):
        S[j, j - 1] = 1
    S[m_src, N - 1] = s
    S[m_src + 1, N - 1] = s
    return S


def embed_iota(
    source: GramSpec, target: GramSpec, X: OrthMatrix, d: int = 1
) -> OrthMatrix:
    """
    The embedding SO(J_{n+1}) -> SO(J_{n+2}).

    Even-rank source into odd target: insert a middle row and column carrying 1.
    Odd-rank source into even target: X -> S diag(X, 1) S^-1, where the added
    vector f has q(f) = d.

    Raises:
        ValueError: if the two Gram specifications are not an admissible pair
    """
    if target.size != source.size + 1 or target.p != source.p:
        raise ValueError(f"Cannot embed J_{source.size} (p={source.p}) into J_{target.size} (p={target.p})")
    if X.gram != source:
        raise ValueError("Matrix does not belong to the source group")
    GF = working_field(target.p)
    N = target.size
    if target.parity == Parity.ODD:
        m = source.m
        keep = [j for j in range(N) if j != m]
        Y = GF.Zeros((N, N))
        Y[np.ix_(keep, keep)] = X.matrix
        Y[m, m] = 1
        return orth_matrix(target, Y)
    if d % target.p == 0:
        raise ValueError(f"d={d} must be a unit mod {target.p}")
    S = _embedding_basis(source, target, d)
    block = GF.Zeros((N, N))
    block[: N - 1, : N - 1] = X.matrix
    block[N - 1, N - 1] = 1
    return orth_matrix(target, S @ block @ np.linalg.inv(S))


def splitness(n: int, p: int, disc: int) -> Splitness:
    """
    Splitness of the even-rank group SO(n,2) over GF(p).

    Split iff (-1/p)^m = (disc/p) with m = n/2 + 1.
    """
    if n % 2:
        raise ValueError(f"Splitness is decided here for n even, got n={n}")
    if disc % p == 0:
        raise ValueError(f"Discriminant {disc} is not a unit mod {p}")
    m = n // 2 + 1
    split = legendre_symbol(-1 % p, p) ** m == legendre_symbol(disc % p, p)
    return Splitness.SPLIT if split else Splitness.NONSPLIT
