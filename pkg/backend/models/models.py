"""
Core data models for the EO strata toolkit.

This module defines the Pydantic models shared by the engines and the CLI:
field and Weyl group specifications, zip data, Gram specifications, orthogonal
and unitary stratum records, Newton data and the versioned report envelope.
"""

from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sympy import isprime, legendre_symbol


# Simple-reflection indices, 1-based
Word = Tuple[int, ...]

REPORT_SCHEMA = "eo-report/v1"


class WeylFamily(str, Enum):
    """Weyl group families in use."""

    B = "B"  # SO(2m+1), n odd
    D = "D"  # SO(2m), n even
    A = "A"  # GL_g, unitary side


class Parity(str, Enum):
    """Shape of the Gram matrix J_{n+2}."""

    ODD = "odd"
    EVEN_SPLIT = "even-split"
    EVEN_NONSPLIT = "even-nonsplit"


class Splitness(str, Enum):
    SPLIT = "split"
    NONSPLIT = "nonsplit"
    NOT_APPLICABLE = "n/a"


class PrimeBehavior(str, Enum):
    """Behavior of p in the imaginary quadratic field."""

    SPLIT = "split"
    INERT = "inert"


class PsiKind(str, Enum):
    """Automorphisms psi of W induced by the Frobenius on the Levi."""

    IDENTITY = "identity"
    DIAGRAM_SWAP = "diagram-swap"  # s_{m-1} <-> s_m, D family
    INNER_SM = "inner-sm"  # Int(s_m), B family


class Subgroup(str, Enum):
    P = "P"
    Q = "Q"
    L = "L"
    B = "B"
    BL = "B∩L"


class NewtonKind(str, Enum):
    STANDARD = "standard"
    PRIMED = "primed"
    BASIC = "basic"


class EllipticKind(str, Enum):
    ORDINARY_SPLIT = "ordinary-split"
    SUPERSINGULAR_INERT = "supersingular-inert"


class OutputFormat(str, Enum):
    TABLE = "table"
    JSON = "json"
    DOT = "dot"


class Suite(str, Enum):
    FRAMES = "frames"
    ZIP = "zip"
    CLIFFORD = "clifford"
    UNITARY = "unitary"
    ALL = "all"


class FieldSpec(BaseModel):
    """Finite field GF(p^k) with a fixed monic irreducible modulus."""

    model_config = ConfigDict(frozen=True)

    p: int
    k: int = Field(default=1, ge=1, le=4)
    modulus: Tuple[int, ...]  # highest degree first, as galois.Poly coefficients

    @field_validator("p")
    def validate_prime(cls, v):
        """Validate p is an odd prime."""
        if v == 2 or not isprime(v):
            raise ValueError(f"p must be an odd prime, got {v}")
        return v

    @model_validator(mode="after")
    def validate_modulus(self):
        if len(self.modulus) != self.k + 1 or self.modulus[0] != 1:
            raise ValueError(f"Modulus must be monic of degree {self.k}: {self.modulus}")
        if any(not 0 <= coeff < self.p for coeff in self.modulus):
            raise ValueError("Modulus coefficients must be reduced mod p")
        return self

    @property
    def order(self) -> int:
        return self.p**self.k


class WeylGroupSpec(BaseModel):
    """Weyl group of type B_m, D_m or A_{g-1} acting on {1..N}."""

    model_config = ConfigDict(frozen=True)

    family: WeylFamily
    rank: int = Field(ge=1)  # m for B/D, the degree g for A

    @model_validator(mode="after")
    def validate_rank(self):
        if self.family == WeylFamily.D and self.rank < 2:
            raise ValueError("Type D needs rank at least 2")
        if self.family == WeylFamily.A and self.rank < 2:
            raise ValueError("Type A needs degree at least 2")
        return self

    @property
    def degree(self) -> int:
        """Ambient degree N of the permutation representation."""
        if self.family == WeylFamily.B:
            return 2 * self.rank + 1
        if self.family == WeylFamily.D:
            return 2 * self.rank
        return self.rank

    @property
    def generator_count(self) -> int:
        if self.family == WeylFamily.A:
            return self.rank - 1
        return self.rank


class WeylElement(BaseModel):
    """Element of a Weyl group in one-line notation (1-based)."""

    model_config = ConfigDict(frozen=True)

    perm: Tuple[int, ...]
    group: WeylGroupSpec

    @model_validator(mode="after")
    def validate_constraints(self):
        N = self.group.degree
        if sorted(self.perm) != list(range(1, N + 1)):
            raise ValueError(f"{self.perm} is not a permutation of 1..{N}")
        if self.group.family == WeylFamily.A:
            return self
        for i in range(1, N + 1):
            if self.perm[i - 1] + self.perm[N - i] != N + 1:
                raise ValueError(f"{self.perm} does not commute with i -> {N + 1}-i")
        if self.group.family == WeylFamily.D:
            m = self.group.rank
            moved = sum(1 for i in range(m) if self.perm[i] > m)
            if moved % 2:
                raise ValueError(f"{self.perm} is not in D_{m}: odd number of sign changes")
        return self

    def __str__(self) -> str:
        return "[" + " ".join(str(x) for x in self.perm) + "]"


class PsiSpec(BaseModel):
    """psi(x) = twist * pi(x) * twist^-1, pi a diagram permutation."""

    model_config = ConfigDict(frozen=True)

    diagram_perm: Tuple[int, ...]  # diagram_perm[i-1] = pi(i)
    twist: Tuple[int, ...]
    kind: PsiKind = PsiKind.IDENTITY


class CoxeterZipDatum(BaseModel):
    """Abstract zip datum of Coxeter type (W, W_mu, ^muW, psi)."""

    model_config = ConfigDict(frozen=True)

    group: WeylGroupSpec
    levi_gens: Tuple[int, ...]
    psi: PsiSpec
    n: Optional[int] = None  # orthogonal rank parameter, when the datum comes from SO(n,2)

    @model_validator(mode="after")
    def validate_generators(self):
        count = self.group.generator_count
        if any(not 1 <= i <= count for i in self.levi_gens):
            raise ValueError(f"Levi generators {self.levi_gens} out of range 1..{count}")
        if sorted(self.psi.diagram_perm) != list(range(1, count + 1)):
            raise ValueError(f"Diagram permutation {self.psi.diagram_perm} is not a permutation")
        return self


class StratumLabel(BaseModel):
    """An element of ^muW labelling one EO stratum."""

    model_config = ConfigDict(frozen=True)

    name: str
    rep: WeylElement
    word: Word
    dim: int = Field(ge=0)


class GramSpec(BaseModel):
    """Gram matrix J_{n+2} of SO(n,2) over GF(p), worked with over GF(p^2)."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    parity: Parity
    p: int
    c: int = 1

    @field_validator("p")
    def validate_prime(cls, v):
        if v == 2 or not isprime(v):
            raise ValueError(f"p must be an odd prime, got {v}")
        return v

    @model_validator(mode="after")
    def validate_case(self):
        if (self.n % 2 == 1) != (self.parity == Parity.ODD):
            raise ValueError(f"Parity {self.parity.value} does not match n={self.n}")
        if self.c % self.p == 0:
            raise ValueError(f"c={self.c} must be a unit mod {self.p}")
        if self.parity == Parity.EVEN_NONSPLIT and legendre_symbol(self.c % self.p, self.p) == 1:
            raise ValueError(f"Nonsplit form needs a nonsquare c, but {self.c} is a square mod {self.p}")
        return self

    @property
    def size(self) -> int:
        return self.n + 2

    @property
    def m(self) -> int:
        return (self.n + 1) // 2 if self.n % 2 else self.n // 2 + 1


class OrthMatrix(BaseModel):
    """Element of SO(J) over GF(p^2); matrix is a galois FieldArray."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: Any
    gram: GramSpec


class FrameCandidate(BaseModel):
    """Frame (B, T, g) with the standard Borel and diagonal torus."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    g: OrthMatrix
    borel: str = "upper-triangular"
    torus: str = "diagonal"


class FrameViolation(BaseModel):
    condition: str
    direction: str
    sample: int  # -1 for exact generator checks
    witness: List[List[int]]


class FrameReport(BaseModel):
    """Outcome of checking the four frame conditions."""

    n: int
    p: int
    parity: Parity
    twisted: bool
    samples: int
    seed: int
    generator_checks: int = 0
    conditions: Dict[str, bool] = Field(default_factory=dict)
    violations: List[FrameViolation] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


class OrthCase(BaseModel):
    """Case data of the embedding SO(n-1,2) -> SO(n,2)."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    p: int = 5
    source_splitness: Splitness
    ambient_splitness: Splitness
    c: int = 1  # middle constant of the source form
    d: int = 1  # value of q on the added vector
    subcase: Optional[str] = None  # "I" / "II" for a nonsplit even source

    @model_validator(mode="after")
    def validate_case(self):
        if self.n % 2 == 0 and self.source_splitness != Splitness.NOT_APPLICABLE:
            raise ValueError("For n even the source group has odd rank; splitness is n/a")
        if self.n % 2 == 1 and self.source_splitness == Splitness.NOT_APPLICABLE:
            raise ValueError("For n odd the source splitness must be given")
        if self.ambient_splitness == Splitness.NOT_APPLICABLE:
            raise ValueError("Ambient splitness must be split or nonsplit")
        return self


class EOStratumInfo(BaseModel):
    """One orthogonal EO stratum with its discrete invariants."""

    name: str
    perm: Tuple[int, ...]
    n: int = Field(ge=1)
    dim: int = Field(ge=0)
    a_number: int
    p_rank: int
    basic: bool

    @model_validator(mode="after")
    def validate_p_rank(self):
        expected = 0 if self.basic else 2**self.dim
        if self.p_rank != expected:
            raise ValueError(f"p-rank {self.p_rank} inconsistent with dim {self.dim}")
        return self

    @model_validator(mode="after")
    def validate_a_number(self):
        if self.dim > self.n:
            raise ValueError(f"dim {self.dim} exceeds n={self.n}")
        if self.dim == self.n:
            expected = 0
        elif self.dim == 0:
            expected = 2**self.n
        else:
            expected = 2 ** (self.n - 1)
        if self.a_number != expected:
            raise ValueError(f"a-number {self.a_number} inconsistent with dim {self.dim} for n={self.n}")
        return self


class EmbeddingRow(BaseModel):
    """One source stratum and its image, with the route that produced it."""

    source: str
    source_dim: int
    target: str
    target_dim: int
    closed_form_dim: int
    route: str
    agree: bool
    trace: Dict[str, Any] = Field(default_factory=dict)


class SlopeMultiset(BaseModel):
    """Newton slopes with multiplicities, sorted by slope."""

    model_config = ConfigDict(frozen=True)

    entries: Tuple[Tuple[Fraction, int], ...]

    @field_validator("entries")
    def validate_entries(cls, v):
        if any(mult <= 0 for _, mult in v):
            raise ValueError("Multiplicities must be positive")
        return tuple(sorted(v))

    @classmethod
    def from_counts(cls, counts: Dict[Fraction, int]) -> "SlopeMultiset":
        return cls(entries=tuple((Fraction(s), k) for s, k in counts.items() if k))

    def as_dict(self) -> Dict[Fraction, int]:
        return dict(self.entries)

    @property
    def total(self) -> int:
        return sum(mult for _, mult in self.entries)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{slope}: {mult}" for slope, mult in self.entries) + "}"


class NewtonCocharacter(BaseModel):
    """Newton cocharacter in coordinates of the standard cocharacters."""

    model_config = ConfigDict(frozen=True)

    kind: NewtonKind
    j: int = Field(ge=0)
    coefficients: Tuple[Fraction, ...]
    dim: Optional[int] = None
    p_rank: Optional[int] = None

    @property
    def name(self) -> str:
        if self.kind == NewtonKind.BASIC:
            return "basic"
        return f"b'_{self.j}" if self.kind == NewtonKind.PRIMED else f"b_{self.j}"


class KappaTilde(BaseModel):
    model_config = ConfigDict(frozen=True)

    behavior: PrimeBehavior

    def gamma(self, side: int) -> int:
        if self.behavior == PrimeBehavior.SPLIT:
            return side
        return 3 - side


class UnitaryDieudonneModule(BaseModel):
    """Basis-combinatorial Dieudonne module with a two-sided grading.

    frob and ver send each basis label to a basis label or to None (zero).
    """

    model_config = ConfigDict(frozen=True)

    basis: Tuple[str, ...]
    side: Dict[str, int]
    frob: Dict[str, Optional[str]]
    ver: Dict[str, Optional[str]]
    kappa: KappaTilde

    @model_validator(mode="after")
    def validate_grading(self):
        labels = set(self.basis)
        if len(labels) != len(self.basis):
            raise ValueError("Basis labels must be distinct")
        for mapping in (self.side, self.frob, self.ver):
            if set(mapping) != labels:
                raise ValueError("Every basis label needs a side, an F-image and a V-image")
        for name, mapping in (("F", self.frob), ("V", self.ver)):
            for x, y in mapping.items():
                if y is None:
                    continue
                if y not in labels:
                    raise ValueError(f"{name}({x}) = {y} is not a basis label")
                if self.side[y] != self.kappa.gamma(self.side[x]):
                    raise ValueError(f"{name}({x}) = {y} breaks the grading")
        sides = list(self.side.values())
        if sides.count(1) != sides.count(2):
            raise ValueError("Both graded pieces must have the same dimension")
        return self

    def side_labels(self, side: int) -> frozenset:
        return frozenset(x for x in self.basis if self.side[x] == side)


class FiltrationChain(BaseModel):
    model_config = ConfigDict(frozen=True)

    steps: Tuple[frozenset, ...]

    @model_validator(mode="after")
    def validate_chain(self):
        for lower, upper in zip(self.steps, self.steps[1:]):
            if not lower < upper:
                raise ValueError("Filtration steps must be strictly increasing")
        return self

    @property
    def dims(self) -> List[int]:
        return [len(step) for step in self.steps]


class UnitaryEmbeddingRow(BaseModel):
    a: int
    closed_form: int
    filtration: int
    second_route: int
    second_route_name: str
    codim_route: Optional[int] = None
    agree: bool


class UnitaryStratumInfo(BaseModel):
    a: int
    dim: int
    p_rank: int
    a_number: int
    shifted_n: int  # parameter of the (n+1,1)-indexed statements describing this family
    rho: Optional[int] = None
    supersingular: Optional[bool] = None
    slopes: Optional[SlopeMultiset] = None


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class SuiteResult(BaseModel):
    suite: Suite
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class Report(BaseModel):
    """Versioned envelope for every CLI result."""

    schema_tag: str = Field(default=REPORT_SCHEMA, alias="schema")
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    tables: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict)
    diagrams: Dict[str, str] = Field(default_factory=dict)
    ok: bool = True

    model_config = ConfigDict(populate_by_name=True)
