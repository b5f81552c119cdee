"""Exact symbolic exterior calculus on R^{4n} with polynomial coefficients.

Coefficients are rationals throughout (``fractions.Fraction``); floats are
rejected at construction so symbolic identities are checked exactly, never up
to rounding.  Form degree is capped at 3, which is all the differential of a
two-form requires.

Index conventions:
  * a k-form is stored as a map from a strictly increasing index tuple to its
    polynomial coefficient, so dx_0 ^ dx_1 has key (0, 1);
  * the structure-operator contraction on basis covectors reads
    i_A(dx_b) = sum_a A[b, a] dx_a, i.e. dx_b evaluated on A-images;
  * the contraction of a two-form with a vector slots the vector into the
    first argument: (i_X w)(Y) = w(X, Y).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

import numpy as np

from .structures import StructureOperator

__all__ = [
    "PolyScalar",
    "KForm",
    "SymVectorField",
    "MAX_DEGREE",
    "wedge",
    "ext_d",
    "interior",
    "vertical_derivation",
    "vertical_differential",
    "vertical_differential_via_commutator",
    "lagrangian_two_form",
    "form_to_matrix",
    "form_from_constant_matrix",
    "poly_gradient",
    "poly_hessian",
]

MAX_DEGREE = 3


def _as_fraction(value) -> Fraction:
    if isinstance(value, Rational):
        return Fraction(value)
    raise TypeError(
        f"exact calculus requires rational coefficients, got {type(value).__name__}"
    )


class PolyScalar:
    """Sparse multivariate polynomial: exponent tuple -> rational coefficient."""

    __slots__ = ("dim", "terms", "_sorted")

    def __init__(self, dim: int, terms: Mapping[tuple[int, ...], object] | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        clean: dict[tuple[int, ...], Fraction] = {}
        for exponents, coeff in (terms or {}).items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != dim or any(e < 0 for e in exponents):
                raise ValueError(f"bad exponent tuple {exponents} for dimension {dim}")
            value = _as_fraction(coeff)
            if value != 0:
                clean[exponents] = clean.get(exponents, Fraction(0)) + value
        self.dim = dim
        self.terms = {e: c for e, c in clean.items() if c != 0}
        self._sorted = None

    @classmethod
    def zero(cls, dim: int) -> "PolyScalar":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, value) -> "PolyScalar":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def variable(cls, dim: int, index: int) -> "PolyScalar":
        exponents = [0] * dim
        exponents[index] = 1
        return cls(dim, {tuple(exponents): 1})

    @classmethod
    def monomial(cls, dim: int, coeff, exponents: Iterable[int]) -> "PolyScalar":
        return cls(dim, {tuple(exponents): coeff})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        if self._sorted is None:
            self._sorted = sorted(self.terms.items())
        return self._sorted

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyScalar)
            and self.dim == other.dim
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.dim, tuple(self.sorted_terms())))

    def __add__(self, other: "PolyScalar") -> "PolyScalar":
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return PolyScalar(self.dim, terms)

    def __sub__(self, other: "PolyScalar") -> "PolyScalar":
        return self + (-other)

    def __neg__(self) -> "PolyScalar":
        return PolyScalar(self.dim, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PolyScalar):
            self._check(other)
            terms: dict[tuple[int, ...], Fraction] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    key = tuple(a + b for a, b in zip(e1, e2))
                    terms[key] = terms.get(key, Fraction(0)) + c1 * c2
            return PolyScalar(self.dim, terms)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "PolyScalar":
        c = _as_fraction(c)
        return PolyScalar(self.dim, {e: c * v for e, v in self.terms.items()})

    def partial(self, index: int) -> "PolyScalar":
        terms: dict[tuple[int, ...], Fraction] = {}
        for exponents, coeff in self.terms.items():
            power = exponents[index]
            if power == 0:
                continue
            lowered = list(exponents)
            lowered[index] = power - 1
            key = tuple(lowered)
            terms[key] = terms.get(key, Fraction(0)) + coeff * power
        return PolyScalar(self.dim, terms)

    def evaluate(self, point):
        """Evaluate at a point; exact when the point is rational."""
        if len(point) != self.dim:
            raise ValueError("point dimension mismatch")
        total = None
        for exponents, coeff in self.sorted_terms():
            term = coeff
            for value, power in zip(point, exponents):
                for _ in range(power):
                    term = term * value
            total = term if total is None else total + term
        if total is None:
            return Fraction(0)
        return total

    def __repr__(self) -> str:
        if self.is_zero:
            return "PolyScalar(0)"
        parts = []
        for exponents, coeff in self.sorted_terms()[:6]:
            mono = "*".join(
                f"x{k}^{e}" if e > 1 else f"x{k}"
                for k, e in enumerate(exponents)
                if e > 0
            )
            parts.append(f"{coeff}" + (f"*{mono}" if mono else ""))
        suffix = " + ..." if len(self.terms) > 6 else ""
        return "PolyScalar(" + " + ".join(parts) + suffix + ")"

    def _check(self, other: "PolyScalar") -> None:
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")


def poly_gradient(poly: PolyScalar) -> list[PolyScalar]:
    return [poly.partial(a) for a in range(poly.dim)]


def poly_hessian(poly: PolyScalar) -> list[list[PolyScalar]]:
    grad = poly_gradient(poly)
    return [[grad[a].partial(b) for b in range(poly.dim)] for a in range(poly.dim)]


def _merge_sign(indices: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sort a tuple of covector indices, tracking the permutation sign.

    Returns None when an index repeats (the wedge vanishes).
    """
    items = list(indices)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(items)):
        if items[i - 1] == items[i]:
            return None
    return sign, tuple(items)


class KForm:
    """Differential form of degree 0..3 with PolyScalar coefficients."""

    __slots__ = ("dim", "degree", "terms")

    def __init__(
        self,
        dim: int,
        degree: int,
        terms: Mapping[tuple[int, ...], PolyScalar] | None = None,
    ):
        if not 0 <= degree <= MAX_DEGREE:
            raise ValueError(f"degree must be within 0..{MAX_DEGREE}, got {degree}")
        clean: dict[tuple[int, ...], PolyScalar] = {}
        for indices, coeff in (terms or {}).items():
            indices = tuple(indices)
            if len(indices) != degree:
                raise ValueError(f"index tuple {indices} does not match degree {degree}")
            if any(not 0 <= k < dim for k in indices):
                raise ValueError(f"index tuple {indices} out of range for dim {dim}")
            if list(indices) != sorted(set(indices)):
                raise ValueError(f"index tuple {indices} must be strictly increasing")
            if coeff.dim != dim:
                raise ValueError("coefficient dimension mismatch")
            if not coeff.is_zero:
                clean[indices] = clean.get(indices, PolyScalar.zero(dim)) + coeff
        self.dim = dim
        self.degree = degree
        self.terms = {k: v for k, v in clean.items() if not v.is_zero}

    @classmethod
    def zero(cls, dim: int, degree: int = 0) -> "KForm":
        return cls(dim, degree)

    @classmethod
    def from_scalar(cls, poly: PolyScalar) -> "KForm":
        return cls(poly.dim, 0, {(): poly})

    @classmethod
    def dx(cls, dim: int, index: int) -> "KForm":
        return cls(dim, 1, {(index,): PolyScalar.constant(dim, 1)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, indices: tuple[int, ...]) -> PolyScalar:
        return self.terms.get(tuple(indices), PolyScalar.zero(self.dim))

    def sorted_terms(self) -> list[tuple[tuple[int, ...], PolyScalar]]:
        return sorted(self.terms.items())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, KForm)
            and self.dim == other.dim
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.dim, self.degree, tuple(self.sorted_terms())))

    def __add__(self, other: "KForm") -> "KForm":
        self._check(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, PolyScalar.zero(self.dim)) + v
        return KForm(self.dim, self.degree, terms)

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __neg__(self) -> "KForm":
        return KForm(self.dim, self.degree, {k: -v for k, v in self.terms.items()})

    def __mul__(self, scalar):
        return KForm(
            self.dim, self.degree, {k: v.scale(scalar) for k, v in self.terms.items()}
        )

    __rmul__ = __mul__

    def wedge(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def d(self) -> "KForm":
        return ext_d(self)

    def __repr__(self) -> str:
        if self.is_zero:
            return f"KForm(degree={self.degree}, 0)"
        keys = ", ".join(
            "dx" + "^dx".join(str(k) for k in idx) if idx else "1"
            for idx, _ in self.sorted_terms()[:4]
        )
        return f"KForm(degree={self.degree}, terms on {keys}{'...' if len(self.terms) > 4 else ''})"

    def _check(self, other: "KForm") -> None:
        if self.dim != other.dim or self.degree != other.degree:
            raise ValueError("form dimension/degree mismatch")


@dataclass(frozen=True)
class SymVectorField:
    """Vector field with polynomial components, one PolyScalar per coordinate."""

    components: tuple[PolyScalar, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("vector field needs at least one component")
        dim = self.components[0].dim
        if len(self.components) != dim or any(c.dim != dim for c in self.components):
            raise ValueError("vector field must have one component per coordinate")

    @property
    def dim(self) -> int:
        return len(self.components)

    @classmethod
    def constant(cls, values) -> "SymVectorField":
        dim = len(values)
        return cls(tuple(PolyScalar.constant(dim, v) for v in values))

    @classmethod
    def basis(cls, dim: int, index: int) -> "SymVectorField":
        return cls(
            tuple(
                PolyScalar.constant(dim, 1 if a == index else 0) for a in range(dim)
            )
        )


def wedge(a: KForm, b: KForm) -> KForm:
    """Graded-antisymmetric product; degrees must sum to at most 3."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    degree = a.degree + b.degree
    if degree > MAX_DEGREE:
        raise ValueError(f"wedge degree {degree} exceeds the supported cap {MAX_DEGREE}")
    terms: dict[tuple[int, ...], PolyScalar] = {}
    for ia, ca in a.terms.items():
        for ib, cb in b.terms.items():
            merged = _merge_sign(ia + ib)
            if merged is None:
                continue
            sign, key = merged
            contribution = (ca * cb).scale(sign)
            terms[key] = terms.get(key, PolyScalar.zero(a.dim)) + contribution
    return KForm(a.dim, degree, terms)


def ext_d(a: KForm) -> KForm:
    """Exterior derivative; defined for degrees 0..2."""
    if a.degree >= MAX_DEGREE:
        raise ValueError("exterior derivative of a degree-3 form is not supported")
    terms: dict[tuple[int, ...], PolyScalar] = {}
    for indices, coeff in a.terms.items():
        for direction in range(a.dim):
            partial = coeff.partial(direction)
            if partial.is_zero:
                continue
            merged = _merge_sign((direction,) + indices)
            if merged is None:
                continue
            sign, key = merged
            contribution = partial.scale(sign)
            terms[key] = terms.get(key, PolyScalar.zero(a.dim)) + contribution
    return KForm(a.dim, a.degree + 1, terms)


def interior(X: SymVectorField, a: KForm) -> KForm:
    """Contraction (i_X a)(Y_1, ...) = a(X, Y_1, ...); drops the degree by one."""
    if a.degree == 0:
        raise ValueError("cannot contract a 0-form")
    if X.dim != a.dim:
        raise ValueError("dimension mismatch")
    terms: dict[tuple[int, ...], PolyScalar] = {}
    for indices, coeff in a.terms.items():
        for slot, index in enumerate(indices):
            component = X.components[index]
            if component.is_zero:
                continue
            key = indices[:slot] + indices[slot + 1 :]
            contribution = (coeff * component).scale((-1) ** slot)
            terms[key] = terms.get(key, PolyScalar.zero(a.dim)) + contribution
    return KForm(a.dim, a.degree - 1, terms)


def _contract_basis_covector(op: StructureOperator, index: int) -> list[tuple[int, int]]:
    # i_A(dx_b) = sum_a A[b, a] dx_a; signed permutation: at most one entry.
    row = op.matrix[index]
    return [(a, int(row[a])) for a in np.nonzero(row)[0]]


def vertical_derivation(op: StructureOperator, a: KForm) -> KForm:
    """Degree-preserving derivation replacing one argument at a time by its image.

    (i_A a)(X_1, ..., X_r) = sum_k a(X_1, ..., A X_k, ..., X_r); zero on 0-forms.
    """
    if op.kind.dual:
        raise ValueError("vertical derivation uses a tangent-side operator")
    if op.dim != a.dim:
        raise ValueError("dimension mismatch")
    if a.degree == 0:
        return KForm.zero(a.dim, 0)
    terms: dict[tuple[int, ...], PolyScalar] = {}
    for indices, coeff in a.terms.items():
        for slot, index in enumerate(indices):
            for replacement, entry in _contract_basis_covector(op, index):
                candidate = indices[:slot] + (replacement,) + indices[slot + 1 :]
                merged = _merge_sign(candidate)
                if merged is None:
                    continue
                sign, key = merged
                contribution = coeff.scale(entry * sign)
                terms[key] = terms.get(key, PolyScalar.zero(a.dim)) + contribution
    return KForm(a.dim, a.degree, terms)


def vertical_differential(op: StructureOperator, f: PolyScalar) -> KForm:
    """Coordinate formula for the vertical differential: (d_A f)(v) = df(A v).

    The coefficient on dx_b is sum_a (d f / d x_a) A[a, b].
    """
    if op.kind.dual:
        raise ValueError("vertical differential uses a tangent-side operator")
    if op.dim != f.dim:
        raise ValueError("dimension mismatch")
    terms: dict[tuple[int, ...], PolyScalar] = {}
    for a in range(f.dim):
        partial = f.partial(a)
        if partial.is_zero:
            continue
        for b in np.nonzero(op.matrix[a])[0]:
            key = (int(b),)
            contribution = partial.scale(int(op.matrix[a, b]))
            terms[key] = terms.get(key, PolyScalar.zero(f.dim)) + contribution
    return KForm(f.dim, 1, terms)


def vertical_differential_via_commutator(op: StructureOperator, f: PolyScalar) -> KForm:
    """Same map through the graded commutator i_A d - d i_A; cross-check route."""
    zero_form = KForm.from_scalar(f)
    first = vertical_derivation(op, ext_d(zero_form))
    second = ext_d(vertical_derivation(op, zero_form))
    return first - second


def lagrangian_two_form(op: StructureOperator, L: PolyScalar) -> KForm:
    """Closed two-form -d(d_A L) driving the structure's dynamics."""
    return -ext_d(vertical_differential(op, L))


def form_to_matrix(a: KForm, point) -> np.ndarray:
    """Antisymmetric matrix M[b, c] = a(e_b, e_c) evaluated at a point.

    Returns an object-dtype array of exact rationals when the point is
    rational, so downstream comparisons can stay exact.
    """
    if a.degree != 2:
        raise ValueError("form_to_matrix expects a two-form")
    if len(point) != a.dim:
        raise ValueError("point dimension mismatch")
    matrix = np.zeros((a.dim, a.dim), dtype=object)
    matrix[:] = Fraction(0)
    for (b, c), coeff in a.terms.items():
        value = coeff.evaluate(point)
        matrix[b, c] = value
        matrix[c, b] = -value
    return matrix


def form_from_constant_matrix(matrix, dim: int) -> KForm:
    """Two-form sum_{b<c} M[b, c] dx_b ^ dx_c from an antisymmetric matrix."""
    matrix = np.asarray(matrix)
    if matrix.shape != (dim, dim):
        raise ValueError("matrix shape mismatch")
    terms: dict[tuple[int, ...], PolyScalar] = {}
    for b in range(dim):
        for c in range(b + 1, dim):
            entry = matrix[b, c]
            if entry != 0:
                terms[(b, c)] = PolyScalar.constant(dim, entry)
    return KForm(dim, 2, terms)
