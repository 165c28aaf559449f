"""
Clifford Algebra and Newton Module for EO stratum combinatorics.

This module provides an exact Clifford algebra over the rationals (with
coefficients in a sympy polynomial ring), the idempotents theta_i^± built
from hyperbolic pairs, the decomposition of the even part C+ into the blocks
C_sigma, the Kuga-Satake Newton slopes obtained from the action of nu_j on
those blocks, the Newton cocharacter sets and the zero-dimensional case.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Dict, List, Sequence, Tuple

from sympy import Rational, sqrt
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring

from backend.engines import weyl, zipcox
from backend.engines.errors import InternalConsistencyError
from backend.models.models import (
    CoxeterZipDatum,
    NewtonCocharacter,
    NewtonKind,
    Parity,
    PrimeBehavior,
    PsiKind,
    SlopeMultiset,
    WeylFamily,
)


# Configure logger
logger = logging.getLogger(__name__)

MAX_CLIFFORD_N = 10
DEFAULT_NONSPLIT_U = 2

Monomial = Tuple[int, ...]


def _qq(value) -> "QQ.dtype":
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


class CliffordAlgebra:
    """
    C(V) for a symmetric rational Gram matrix Psi, with q(v) = Psi(v, v).

    Elements are finite combinations of ordered monomials
    delta_S = delta_{s_1} ... delta_{s_k}, s_1 < ... < s_k, with coefficients
    in a sympy polynomial ring over QQ (by default QQ[X]).
    """

    def __init__(self, gram: Sequence[Sequence], coefficient_ring=None):
        size = len(gram)
        if size == 0 or size > MAX_CLIFFORD_N + 2:
            raise ValueError(f"Gram size must lie in 1..{MAX_CLIFFORD_N + 2}, got {size}")
        self.gram = tuple(tuple(Fraction(x) for x in row) for row in gram)
        for i in range(size):
            if len(self.gram[i]) != size:
                raise ValueError("Gram matrix must be square")
            for j in range(size):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError(f"Gram matrix is not symmetric at ({i + 1},{j + 1})")
        self.size = size
        if coefficient_ring is None:
            coefficient_ring, _ = ring("X", QQ)
        self.ring = coefficient_ring
        self._products: Dict[Tuple[Monomial, Monomial], Dict[Monomial, "QQ.dtype"]] = {}

    def psi(self, i: int, j: int) -> Fraction:
        return self.gram[i - 1][j - 1]

    def q(self, i: int) -> Fraction:
        return self.psi(i, i)

    def _mono_times_gen(self, mono: Monomial, t: int) -> Dict[Monomial, "QQ.dtype"]:
        key = (mono, (t,))
        if key in self._products:
            return self._products[key]
        if not mono:
            result = {(t,): QQ.one}
        else:
            last, prefix = mono[-1], mono[:-1]
            if last < t:
                result = {mono + (t,): QQ.one}
            elif last == t:
                result = {prefix: _qq(self.q(t))}
            else:
                # delta_last delta_t = 2 Psi(t, last) - delta_t delta_last
                result: Dict[Monomial, "QQ.dtype"] = {}
                factor = _qq(2 * self.psi(t, last))
                if factor:
                    result[prefix] = factor
                for inner, coeff in self._mono_times_gen(prefix, t).items():
                    for outer, coeff2 in self._mono_times_gen(inner, last).items():
                        value = result.get(outer, QQ.zero) - coeff * coeff2
                        result[outer] = value
                result = {k: v for k, v in result.items() if v}
        self._products[key] = result
        return result

    def mono_product(self, a: Monomial, b: Monomial) -> Dict[Monomial, "QQ.dtype"]:
        key = (a, b)
        if key in self._products:
            return self._products[key]
        current = {a: QQ.one}
        for t in b:
            nxt: Dict[Monomial, "QQ.dtype"] = {}
            for mono, coeff in current.items():
                for out, coeff2 in self._mono_times_gen(mono, t).items():
                    nxt[out] = nxt.get(out, QQ.zero) + coeff * coeff2
            current = {k: v for k, v in nxt.items() if v}
        self._products[key] = current
        return current

    def element(self, terms: Dict[Monomial, object]) -> "CliffordElement":
        converted = {}
        for mono, coeff in terms.items():
            mono = tuple(mono)
            if list(mono) != sorted(set(mono)) or any(not 1 <= i <= self.size for i in mono):
                raise ValueError(f"Monomial {mono} is not an increasing index sequence")
            value = self.coerce(coeff)
            if value:
                converted[mono] = value
        return CliffordElement(self, converted)

    def coerce(self, value):
        if isinstance(value, (int, Fraction)):
            return self.ring.ground_new(_qq(value))
        if isinstance(value, Rational):
            return self.ring.ground_new(QQ.from_sympy(value))
        return self.ring(value)

    def scalar(self, value) -> "CliffordElement":
        return self.element({(): value})

    def one(self) -> "CliffordElement":
        return self.scalar(1)

    def gen(self, i: int) -> "CliffordElement":
        return self.element({(i,): 1})

    def even_basis(self) -> List[Monomial]:
        """Monomial basis of C+, ordered by degree then lexicographically."""
        indices = range(1, self.size + 1)
        return [
            mono
            for k in range(0, self.size + 1, 2)
            for mono in combinations(indices, k)
        ]


class CliffordElement:
    """A finite linear combination of ordered monomials."""

    def __init__(self, algebra: CliffordAlgebra, terms: Dict[Monomial, object]):
        self.algebra = algebra
        self.terms = terms

    def _check(self, other: "CliffordElement"):
        if other.algebra is not self.algebra and other.algebra.gram != self.algebra.gram:
            raise ValueError("Clifford elements over different Gram matrices")

    def _wrap(self, other) -> "CliffordElement":
        if isinstance(other, CliffordElement):
            self._check(other)
            return other
        return self.algebra.scalar(other)

    def __add__(self, other):
        other = self._wrap(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms.get(mono, self.algebra.ring.zero) + coeff
        return CliffordElement(self.algebra, {k: v for k, v in terms.items() if v})

    __radd__ = __add__

    def __neg__(self):
        return CliffordElement(self.algebra, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        if not isinstance(other, CliffordElement):
            factor = self.algebra.coerce(other)
            return CliffordElement(
                self.algebra, {k: v * factor for k, v in self.terms.items() if v * factor}
            )
        self._check(other)
        ring_ = self.algebra.ring
        terms: Dict[Monomial, object] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                coeff = ca * cb
                for mono, value in self.algebra.mono_product(a, b).items():
                    terms[mono] = terms.get(mono, ring_.zero) + coeff * ring_.ground_new(value)
        return CliffordElement(self.algebra, {k: v for k, v in terms.items() if v})

    def __rmul__(self, other):
        return self * other

    def __eq__(self, other):
        if not isinstance(other, CliffordElement):
            other = self.algebra.scalar(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms))

    def is_even(self) -> bool:
        return all(len(mono) % 2 == 0 for mono in self.terms)

    def scalar_value(self):
        """The coefficient ring value if self is a scalar, else None."""
        if set(self.terms) - {()}:
            return None
        return self.terms.get((), self.algebra.ring.zero)

    def coordinates(self, basis: Sequence[Monomial]) -> List["QQ.dtype"]:
        """Rational coordinates on a monomial basis; coefficients must be constants."""
        zero_monom = self.algebra.ring.zero_monom
        index = {mono: k for k, mono in enumerate(basis)}
        coords = [QQ.zero] * len(basis)
        for mono, coeff in self.terms.items():
            if mono not in index:
                raise ValueError(f"Monomial {mono} is outside the basis")
            if any(m != zero_monom for m in coeff.keys()):
                raise ValueError("Coordinates need constant coefficients")
            coords[index[mono]] = coeff.get(zero_monom, QQ.zero)
        return coords

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in sorted(self.terms.items()):
            name = "".join(f"d{i}" for i in mono) or "1"
            parts.append(f"({coeff})*{name}")
        return " + ".join(parts)


def clifford_mul(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    return a * b


def newton_gram(n: int, parity: Parity, c: Fraction = Fraction(1), u: int = DEFAULT_NONSPLIT_U) -> List[List[Fraction]]:
    """
    The standard Gram matrix of size n+2 used for Newton computations.

    Hyperbolic pairs (i, N+1-i) with Psi = 1/2; n odd adds a middle vector with
    q = c; the nonsplit even case replaces the innermost pair by diag(1, -u).
    """
    parity = Parity(parity)
    if (n % 2 == 1) != (parity == Parity.ODD):
        raise ValueError(f"Parity {parity.value} does not match n={n}")
    N = n + 2
    gram = [[Fraction(0)] * N for _ in range(N)]
    for i in range(N):
        if i != N - 1 - i:
            gram[i][N - 1 - i] = Fraction(1, 2)
    if parity == Parity.ODD:
        gram[N // 2][N // 2] = Fraction(c)
    elif parity == Parity.EVEN_NONSPLIT:
        m = N // 2
        gram[m - 1][m] = gram[m][m - 1] = Fraction(0)
        gram[m - 1][m - 1] = Fraction(1)
        gram[m][m] = Fraction(-u)
    return gram


def hyperbolic_pairs(n: int, parity: Parity) -> int:
    m = weyl.rank_for_n(n)
    return m - 1 if Parity(parity) == Parity.EVEN_NONSPLIT else m


@lru_cache(maxsize=None)
def newton_algebra(n: int, parity: Parity) -> CliffordAlgebra:
    if not 1 <= n <= MAX_CLIFFORD_N:
        raise ValueError(f"n must lie in 1..{MAX_CLIFFORD_N}, got {n}")
    return CliffordAlgebra(newton_gram(n, parity))


def theta(algebra: CliffordAlgebra, i: int, sign: int) -> CliffordElement:
    """
    theta_i^± = 1/2 (1 ± w / sqrt(w^2)), w = 1/2 (delta_i delta_k - delta_k delta_i),
    k = N+1-i. For a hyperbolic pair this is delta_i delta_k and 1 - delta_i delta_k.

    Raises:
        ValueError: if w^2 is not the square of a nonzero rational
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    k = algebra.size + 1 - i
    if not 1 <= i < k:
        raise ValueError(f"Index {i} has no partner in a Gram matrix of size {algebra.size}")
    di, dk = algebra.gen(i), algebra.gen(k)
    w = (di * dk - dk * di) * Fraction(1, 2)
    square = (w * w).scalar_value()
    if square is None or not square:
        raise ValueError(f"w^2 is not a nonzero scalar for the pair ({i},{k})")
    root = sqrt(QQ.to_sympy(square.get(algebra.ring.zero_monom, QQ.zero)))
    if not root.is_Rational:
        raise ValueError(f"w^2 = {square} is not a rational square")
    scaled = w * Fraction(int(root.q), int(root.p))
    return (algebra.one() + scaled * sign) * Fraction(1, 2)


def theta_sigma(algebra: CliffordAlgebra, sigma: Sequence[int]) -> CliffordElement:
    result = algebra.one()
    for i, sign in enumerate(sigma, start=1):
        result = result * theta(algebra, i, sign)
    return result


def _block_columns(algebra: CliffordAlgebra, element: CliffordElement, basis) -> List[List]:
    return [(element * algebra.element({mono: 1})).coordinates(basis) for mono in basis]


def _rank(columns: List[List]) -> int:
    if not columns:
        return 0
    return DomainMatrix(columns, (len(columns), len(columns[0])), QQ).rank()


def _signs(j: int) -> List[Tuple[int, ...]]:
    return list(product((1, -1), repeat=j))


def sigma_decomposition(n: int, j: int, parity: Parity = None) -> Dict[Tuple[int, ...], int]:
    """
    dim C_sigma for every sign vector sigma in {±1}^j, C_sigma = theta^sigma C+.

    Raises:
        InternalConsistencyError: if the blocks do not form a direct sum of C+
    """
    parity = Parity(parity or (Parity.ODD if n % 2 else Parity.EVEN_SPLIT))
    if not 1 <= j <= hyperbolic_pairs(n, parity):
        raise ValueError(f"j={j} out of range for n={n} ({parity.value})")
    algebra = newton_algebra(n, parity)
    basis = algebra.even_basis()
    dims = {}
    all_columns = []
    for sigma in _signs(j):
        columns = _block_columns(algebra, theta_sigma(algebra, sigma), basis)
        dims[sigma] = _rank(columns)
        all_columns.extend(columns)
    total = 2 ** (n + 1)
    if sum(dims.values()) != total or _rank(all_columns) != total:
        raise InternalConsistencyError(
            f"C_sigma blocks for n={n}, j={j} do not decompose C+", trace={"dims": {str(k): v for k, v in dims.items()}}
        )
    return dims


def nu_element(algebra: CliffordAlgebra, j: int, primed: bool = False) -> CliffordElement:
    """
    nu_j = prod_i (X theta_i^+ + theta_i^-), with X standing for t^(1/j);
    the primed variant swaps the roles in the factor for i = j.
    """
    X = algebra.ring.gens[0]
    result = algebra.one()
    for i in range(1, j + 1):
        plus, minus = theta(algebra, i, 1), theta(algebra, i, -1)
        if primed and i == j:
            factor = plus + minus * X
        else:
            factor = plus * X + minus
        result = result * factor
    return result


def slopes_of_nu(n: int, j: int, primed: bool = False, parity: Parity = None) -> SlopeMultiset:
    """
    Newton slopes of the Kuga-Satake isocrystal attached to b_j (or b'_m).

    For each sigma the identity nu * theta^sigma = X^r theta^sigma is checked,
    so nu acts on C_sigma by X^r; the slope r/j is counted with multiplicity
    dim C_sigma.

    Raises:
        InternalConsistencyError: if nu does not act by a monomial on some C_sigma
    """
    parity = Parity(parity or (Parity.ODD if n % 2 else Parity.EVEN_SPLIT))
    m = weyl.rank_for_n(n)
    if primed and (parity != Parity.EVEN_SPLIT or j != m):
        raise ValueError("The primed cocharacter exists only for j = m in the even split case")
    algebra = newton_algebra(n, parity)
    nu = nu_element(algebra, j, primed)
    dims = sigma_decomposition(n, j, parity)
    X = algebra.ring.gens[0]
    counts: Dict[Fraction, int] = {}
    for sigma, dim in dims.items():
        r = sum(1 for i, s in enumerate(sigma, start=1) if (s == 1) != (primed and i == j))
        block = theta_sigma(algebra, sigma)
        if nu * block != block * X**r:
            raise InternalConsistencyError(
                f"nu_{j} does not act as X^{r} on C_{sigma} (n={n})",
                trace={"sigma": list(sigma)},
            )
        slope = Fraction(r, j)
        counts[slope] = counts.get(slope, 0) + dim
    logger.debug(f"Slopes for n={n} j={j} primed={primed}: {counts}")
    return SlopeMultiset.from_counts(counts)


def closed_form_slopes(n: int, j: int) -> SlopeMultiset:
    """{i/j: 2^{n+1-j} C(j, i)}."""
    counts: Dict[Fraction, int] = {}
    for i in range(j + 1):
        slope = Fraction(i, j)
        counts[slope] = counts.get(slope, 0) + 2 ** (n + 1 - j) * comb(j, i)
    return SlopeMultiset.from_counts(counts)


def basic_slopes(n: int) -> SlopeMultiset:
    return SlopeMultiset.from_counts({Fraction(1, 2): 2 ** (n + 1)})


def _cocharacter(n: int, kind: NewtonKind, j: int) -> NewtonCocharacter:
    m = weyl.rank_for_n(n)
    if kind == NewtonKind.BASIC:
        return NewtonCocharacter(kind=kind, j=0, coefficients=tuple(Fraction(0) for _ in range(m)))
    if kind == NewtonKind.PRIMED:
        coefficients = tuple(Fraction(1, m) for _ in range(m - 1)) + (Fraction(-1, m),)
    else:
        coefficients = tuple(Fraction(1, j) if k < j else Fraction(0) for k in range(m))
    return NewtonCocharacter(
        kind=kind,
        j=j,
        coefficients=coefficients,
        dim=n + 1 - j,
        p_rank=2 ** (n + 1 - j),
    )


def newton_set(n: int, qp_case: Parity) -> List[NewtonCocharacter]:
    """
    Newton cocharacters of SO(n,2), nonbasic first by decreasing dimension,
    then the basic one.

    odd: b_1, ..., b_m; even split: b_1, ..., b_m and b'_m; even nonsplit:
    b_1, ..., b_{m-1}. The stratum of b_j has dimension n+1-j and p-rank
    2^{n+1-j}.
    """
    qp_case = Parity(qp_case)
    if (n % 2 == 1) != (qp_case == Parity.ODD):
        raise ValueError(f"Case {qp_case.value} does not match n={n}")
    m = weyl.rank_for_n(n)
    top = m - 1 if qp_case == Parity.EVEN_NONSPLIT else m
    found = [_cocharacter(n, NewtonKind.STANDARD, j) for j in range(1, top + 1)]
    if qp_case == Parity.EVEN_SPLIT:
        found.append(_cocharacter(n, NewtonKind.PRIMED, m))
    found.append(_cocharacter(n, NewtonKind.BASIC, 0))
    return found


def simple_root_coordinates(n: int, coefficients: Sequence[Fraction]) -> List[Fraction]:
    """
    Coordinates of a cocharacter in simple roots: partial sums for type B;
    in type D the last two are (S_{m-1} - x_m)/2 and S_m/2.
    """
    family = weyl.group_for_n(n).family
    sums = []
    total = Fraction(0)
    for x in coefficients:
        total += x
        sums.append(total)
    if family == WeylFamily.B:
        return sums
    m = len(coefficients)
    return sums[: m - 2] + [(sums[m - 2] - coefficients[m - 1]) / 2, sums[m - 1] / 2]


def newton_dominates(n: int, b: NewtonCocharacter, b_prime: NewtonCocharacter) -> bool:
    """b >= b' iff b - b' is a nonnegative combination of simple roots."""
    diff = [x - y for x, y in zip(b.coefficients, b_prime.coefficients)]
    return all(c >= 0 for c in simple_root_coordinates(n, diff))


def gl2_datum() -> CoxeterZipDatum:
    """Zip datum of GL_2 with cocharacter (1,0): W = S_2, W_mu trivial, psi the identity."""
    group = weyl.weyl_group(WeylFamily.A, 2)
    return zipcox.make_datum(group, (), zipcox.psi_spec(group, PsiKind.IDENTITY))


def zero_dim_case(p_behavior: PrimeBehavior) -> Dict[str, object]:
    """
    The zero-dimensional Kuga-Satake case.

    A split prime gives the frame (B, T, w~_0), an inert prime the frame
    (B, T, 1). The point lies in the GL_2 stratum whose label is the framed
    orbit of z^{-1}, z the frame element; its length is the dimension of the
    SO(1,2) stratum it maps to (w_1 ordinary, w_0 superspecial).
    """
    behavior = PrimeBehavior(p_behavior)
    D = gl2_datum()
    w0, _ = weyl.longest_elements(D.group, D.levi_gens)
    if behavior == PrimeBehavior.SPLIT:
        z, frame = w0, "(B,T,w~_0)"
    else:
        z, frame = weyl.identity(D.group), "(B,T,1)"
    label = zipcox.canonical_label(D, weyl.inverse(z))
    if label.dim == weyl.length(w0):
        locus = "ordinary"
    elif label.dim == 0:
        locus = "superspecial"
    else:
        raise InternalConsistencyError(f"GL_2 label {label.name} has length {label.dim}")
    logger.debug(f"Zero-dimensional case {behavior.value}: frame {frame}, orbit {label.name}")
    return {
        "locus": locus,
        "frame": frame,
        "gl2_orbit": label.name,
        "label": f"w_{label.dim}",
        "dim": label.dim,
    }


def zero_dim_clifford_check(u: int = DEFAULT_NONSPLIT_U) -> Tuple[List[List], List[List]]:
    """
    Left multiplication by x + y delta_1 delta_2 on C+ of the form x^2 - u y^2.

    Returns:
        (computed, expected): both equal [[x, u y], [y, x]] on the basis
        (1, delta_1 delta_2)
    """
    R, x, y = ring("x,y", QQ)
    algebra = CliffordAlgebra([[1, 0], [0, -u]], coefficient_ring=R)
    z = algebra.element({(): x, (1, 2): y})
    basis = [(), (1, 2)]
    computed = [[R.zero, R.zero], [R.zero, R.zero]]
    for col, mono in enumerate(basis):
        image = z * algebra.element({mono: 1})
        for row, target in enumerate(basis):
            computed[row][col] = image.terms.get(target, R.zero)
    expected = [[x, y * u], [y, x]]
    return computed, expected
