"""
Finite Field Module for EO stratum combinatorics.

This module provides exact arithmetic in GF(p), GF(p^2), ..., GF(p^4) and
dense matrices over them, including the entrywise Frobenius. Field elements
are exchanged as integers in galois' polynomial-basis encoding; matrices are
galois FieldArrays.
"""

import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Union

import galois
import numpy as np

from backend.models.models import FieldSpec


# Configure logger
logger = logging.getLogger(__name__)

ARITH_OPS = ("add", "sub", "mul", "div")
MATRIX_OPS = ("mul", "inverse", "transpose", "det")


def field_spec(p: int, k: int = 1, modulus: Optional[Sequence[int]] = None) -> FieldSpec:
    """
    Build a FieldSpec, defaulting to the Conway polynomial for (p, k).

    Args:
        p: Odd prime
        k: Extension degree, 1 <= k <= 4
        modulus: Optional monic irreducible, highest degree first

    Returns:
        Validated FieldSpec
    """
    if modulus is None:
        # Prime fields are represented by residues; x is the trivial degree-1 modulus
        modulus = [1, 0] if k == 1 else [int(c) for c in galois.conway_poly(p, k).coeffs]
    spec = FieldSpec(p=p, k=k, modulus=tuple(int(c) for c in modulus))
    if k > 1 and not galois.Poly(list(spec.modulus), field=galois.GF(p)).is_irreducible():
        raise ValueError(f"Modulus {spec.modulus} is reducible over GF({p})")
    return spec


@lru_cache(maxsize=None)
def _field_class(p: int, k: int, modulus: tuple):
    if k == 1:
        return galois.GF(p)
    poly = galois.Poly(list(modulus), field=galois.GF(p))
    logger.debug(f"Building GF({p}^{k}) with modulus {poly}")
    return galois.GF(p**k, irreducible_poly=poly)


def gf(spec: FieldSpec):
    """Return the galois FieldArray class for a FieldSpec (cached)."""
    return _field_class(spec.p, spec.k, spec.modulus)


def field_arith(spec: FieldSpec, a: int, b: int, op: str) -> int:
    """
    Add, subtract, multiply or divide two field elements.

    Raises:
        ValueError: on division by zero or an unknown operation
    """
    GF = gf(spec)
    x, y = GF(a % spec.order), GF(b % spec.order)
    if op == "add":
        result = x + y
    elif op == "sub":
        result = x - y
    elif op == "mul":
        result = x * y
    elif op == "div":
        if y == 0:
            raise ValueError(f"Division by zero in GF({spec.p}^{spec.k})")
        result = x / y
    else:
        raise ValueError(f"Unknown field operation: {op}")
    return int(result)


def half(GF) -> galois.FieldArray:
    """1/2 in a field of odd characteristic."""
    return GF(1) / GF(2)


def entrywise_frobenius(A: galois.FieldArray, power: int = 1) -> galois.FieldArray:
    """Raise every entry of A to the p^power-th power."""
    p = type(A).characteristic
    return A ** (p**power)


def mat_ops(
    A: galois.FieldArray, B: Optional[galois.FieldArray] = None, op: str = "mul"
) -> Union[galois.FieldArray, int]:
    """
    Exact matrix product, inverse, transpose or determinant.

    Parameters:
        A (FieldArray): Left operand
        B (FieldArray): Right operand for "mul"
        op (str): One of "mul", "inverse", "transpose", "det"

    Returns:
        FieldArray, or the determinant as an integer
    """
    if A.ndim != 2:
        raise ValueError(f"Expected a matrix, got shape {A.shape}")
    if op == "mul":
        if B is None or B.ndim != 2 or A.shape[1] != B.shape[0]:
            raise ValueError(f"Shape mismatch: {A.shape} x {None if B is None else B.shape}")
        if type(A) is not type(B):
            raise ValueError("Operands live over different fields")
        return A @ B
    if op == "transpose":
        return A.T
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{op} needs a square matrix, got {A.shape}")
    if op == "det":
        return int(np.linalg.det(A))
    if op == "inverse":
        if np.linalg.det(A) == 0:
            raise ValueError("Matrix is singular")
        return np.linalg.inv(A)
    raise ValueError(f"Unknown matrix operation: {op}")


def random_element(spec: FieldSpec, seed: Union[int, np.random.Generator]) -> int:
    """Deterministic uniform sample from the field for a fixed seed."""
    return int(gf(spec).Random(seed=seed))


def random_unit(GF, rng: np.random.Generator) -> galois.FieldArray:
    return GF.Random(low=1, seed=rng)


def sqrt_of(GF, value: int) -> galois.FieldArray:
    """A square root of value in GF, which must be a square there."""
    x = GF(value % GF.characteristic)
    if not x.is_square():
        raise ValueError(f"{value} has no square root in GF({GF.order})")
    return np.sqrt(x)


def identity(GF, size: int) -> galois.FieldArray:
    return GF.Identity(size)


def to_int_rows(A: galois.FieldArray) -> List[List[int]]:
    """Plain nested integer lists, for reports and witnesses."""
    return np.asarray(A.view(np.ndarray), dtype=int).tolist()


def signed(GF, value: int) -> galois.FieldArray:
    """Embed a possibly negative integer into GF."""
    return GF(value % GF.characteristic)
