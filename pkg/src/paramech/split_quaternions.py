"""Exact arithmetic of the split-quaternion algebra B.

B is the four-dimensional real algebra with basis {1, i, s, t} subject to the
generator relations i*i = -1, s*s = t*t = +1, is = t = -si.  The remaining
basis products (st, ts, it, ti, ...) are not free choices: they follow from the
three relations by associativity.  The full 16-entry table is derived once at
import time by normalising words in the generators, so there is a single source
of truth that can be tested against the relations.

Coefficients may be any ordered-field scalar (``fractions.Fraction`` for exact
verification, ``float`` for numerics); every operation is generic in the
scalar type.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = [
    "SplitQuaternion",
    "BVector",
    "BMatrix",
    "SquareClass",
    "ONE",
    "I",
    "S",
    "T",
    "sq_mul",
    "sq_conj",
    "sq_norm_sq",
    "sq_square_class",
    "bn_inner",
    "sp_nB_member",
    "group_action",
]


def _reduce_word(word: str) -> tuple[int, str]:
    """Normalise a word in the generators {i, s} to +-(i^a s^b), a,b in {0,1}.

    Rewrite rules: "si" -> -"is" (anticommutation), "ii" -> -1, "ss" -> +1.
    Returns (sign, canonical word).
    """
    sign = 1
    letters = list(word)
    changed = True
    while changed:
        changed = False
        for k in range(len(letters) - 1):
            a, b = letters[k], letters[k + 1]
            if a == "s" and b == "i":
                letters[k], letters[k + 1] = "i", "s"
                sign = -sign
                changed = True
                break
            if a == b:
                if a == "i":
                    sign = -sign
                del letters[k : k + 2]
                changed = True
                break
    return sign, "".join(letters)


# Basis order 1, i, s, t; t is the word "is".
_BASIS_WORDS = ("", "i", "s", "is")
_WORD_TO_BASIS = {w: k for k, w in enumerate(_BASIS_WORDS)}


def _build_table() -> tuple[tuple[tuple[int, int], ...], ...]:
    table = []
    for a in range(4):
        row = []
        for b in range(4):
            sign, word = _reduce_word(_BASIS_WORDS[a] + _BASIS_WORDS[b])
            row.append((sign, _WORD_TO_BASIS[word]))
        table.append(tuple(row))
    return tuple(table)


#: _MUL_TABLE[a][b] = (sign, basis index) of the product of basis elements a, b.
_MUL_TABLE = _build_table()


class SquareClass(enum.Enum):
    """Classification of p*p against the two unit values."""

    SQUARES_TO_MINUS_ONE = "squares_to_minus_one"
    SQUARES_TO_PLUS_ONE = "squares_to_plus_one"
    OTHER = "other"


@dataclass(frozen=True)
class SplitQuaternion:
    """p = x + i*y + s*u + t*v with componentwise equality."""

    x: object = 0
    y: object = 0
    u: object = 0
    v: object = 0

    @property
    def coefficients(self) -> tuple:
        return (self.x, self.y, self.u, self.v)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence) -> "SplitQuaternion":
        x, y, u, v = coeffs
        return cls(x, y, u, v)

    @classmethod
    def basis(cls, index: int) -> "SplitQuaternion":
        coeffs = [0, 0, 0, 0]
        coeffs[index] = 1
        return cls(*coeffs)

    def __add__(self, other: "SplitQuaternion") -> "SplitQuaternion":
        return SplitQuaternion(
            self.x + other.x, self.y + other.y, self.u + other.u, self.v + other.v
        )

    def __sub__(self, other: "SplitQuaternion") -> "SplitQuaternion":
        return SplitQuaternion(
            self.x - other.x, self.y - other.y, self.u - other.u, self.v - other.v
        )

    def __neg__(self) -> "SplitQuaternion":
        return SplitQuaternion(-self.x, -self.y, -self.u, -self.v)

    def __mul__(self, other):
        if isinstance(other, SplitQuaternion):
            return sq_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        # Scalars commute with everything; quaternion*quaternion goes via __mul__.
        return self.scale(other)

    def scale(self, c) -> "SplitQuaternion":
        return SplitQuaternion(c * self.x, c * self.y, c * self.u, c * self.v)

    def conjugate(self) -> "SplitQuaternion":
        return sq_conj(self)

    def norm_squared(self):
        return sq_norm_sq(self)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0 and self.u == 0 and self.v == 0

    def __repr__(self) -> str:
        return f"SplitQuaternion({self.x}, {self.y}, {self.u}, {self.v})"


ONE = SplitQuaternion.basis(0)
I = SplitQuaternion.basis(1)
S = SplitQuaternion.basis(2)
T = SplitQuaternion.basis(3)


def sq_mul(p: SplitQuaternion, q: SplitQuaternion) -> SplitQuaternion:
    """Bilinear product under the derived 16-entry basis table."""
    out = [0, 0, 0, 0]
    pc = p.coefficients
    qc = q.coefficients
    for a in range(4):
        ca = pc[a]
        if ca == 0:
            continue
        for b in range(4):
            cb = qc[b]
            if cb == 0:
                continue
            sign, basis = _MUL_TABLE[a][b]
            out[basis] = out[basis] + sign * ca * cb
    return SplitQuaternion(*out)


def sq_conj(p: SplitQuaternion) -> SplitQuaternion:
    """Conjugation x + iy + su + tv -> x - iy - su - tv."""
    return SplitQuaternion(p.x, -p.y, -p.u, -p.v)


def sq_norm_sq(p: SplitQuaternion):
    """Indefinite squared norm Re(conj(p)*p) = x^2 + y^2 - u^2 - v^2.

    Signature (2,2); multiplicative over products but takes both signs and
    vanishes on zero divisors such as 1 + s.
    """
    return p.x * p.x + p.y * p.y - p.u * p.u - p.v * p.v


def sq_square_class(p: SplitQuaternion) -> SquareClass:
    """Classify whether p*p equals -1, +1, or neither.

    p^2 = -1 exactly when x = 0 and y^2 - u^2 - v^2 = 1; p^2 = +1 exactly when
    x = 0 and y^2 - u^2 - v^2 = -1, or p = +-1.  Agrees with direct squaring.
    """
    if p.y == 0 and p.u == 0 and p.v == 0:
        if p.x * p.x == 1:
            return SquareClass.SQUARES_TO_PLUS_ONE
        return SquareClass.OTHER
    if p.x != 0:
        return SquareClass.OTHER
    q = p.y * p.y - p.u * p.u - p.v * p.v
    if q == 1:
        return SquareClass.SQUARES_TO_MINUS_ONE
    if q == -1:
        return SquareClass.SQUARES_TO_PLUS_ONE
    return SquareClass.OTHER


@dataclass(frozen=True)
class BVector:
    """Element of the right B-module B^n (column of split quaternions)."""

    entries: tuple[SplitQuaternion, ...]

    def __post_init__(self):
        if len(self.entries) < 1:
            raise ValueError("BVector needs at least one entry")

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def of(cls, *entries: SplitQuaternion) -> "BVector":
        return cls(tuple(entries))

    def right_scale(self, p: SplitQuaternion) -> "BVector":
        """Entrywise right multiplication xi * p (module action is on the right)."""
        return BVector(tuple(sq_mul(e, p) for e in self.entries))


@dataclass(frozen=True)
class BMatrix:
    """Square matrix over B acting on BVector by the usual row-times-column rule."""

    rows: tuple[tuple[SplitQuaternion, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        if n < 1 or any(len(r) != n for r in self.rows):
            raise ValueError("BMatrix must be square and nonempty")

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> "BMatrix":
        zero = SplitQuaternion()
        return cls(
            tuple(
                tuple(ONE if r == c else zero for c in range(n)) for r in range(n)
            )
        )

    @classmethod
    def diagonal(cls, entries: Sequence[SplitQuaternion]) -> "BMatrix":
        zero = SplitQuaternion()
        n = len(entries)
        return cls(
            tuple(
                tuple(entries[r] if r == c else zero for c in range(n))
                for r in range(n)
            )
        )

    def apply(self, xi: BVector) -> BVector:
        if len(xi) != self.n:
            raise ValueError(f"dimension mismatch: matrix is {self.n}, vector is {len(xi)}")
        out = []
        for row in self.rows:
            acc = SplitQuaternion()
            for a, e in zip(row, xi.entries):
                acc = acc + sq_mul(a, e)
            out.append(acc)
        return BVector(tuple(out))

    def conjugate_transpose(self) -> "BMatrix":
        n = self.n
        return BMatrix(
            tuple(tuple(sq_conj(self.rows[c][r]) for c in range(n)) for r in range(n))
        )

    def matmul(self, other: "BMatrix") -> "BMatrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        n = self.n
        rows = []
        for r in range(n):
            row = []
            for c in range(n):
                acc = SplitQuaternion()
                for k in range(n):
                    acc = acc + sq_mul(self.rows[r][k], other.rows[k][c])
                row.append(acc)
            rows.append(tuple(row))
        return BMatrix(tuple(rows))


def bn_inner(xi: BVector, eta: BVector):
    """Inner product Re(sum_k conj(xi_k) * eta_k); real signature (2n, 2n)."""
    if len(xi) != len(eta):
        raise ValueError(f"length mismatch: {len(xi)} vs {len(eta)}")
    acc = None
    for a, b in zip(xi.entries, eta.entries):
        term = sq_mul(sq_conj(a), b).x
        acc = term if acc is None else acc + term
    return acc


def sp_nB_member(A: BMatrix, tol: float = 0.0) -> bool:
    """Test conj(A)^T A = I entrywise with coefficient magnitudes within tol."""
    product = A.conjugate_transpose().matmul(A)
    identity = BMatrix.identity(A.n)
    for r in range(A.n):
        for c in range(A.n):
            diff = product.rows[r][c] - identity.rows[r][c]
            if any(abs(coeff) > tol for coeff in diff.coefficients):
                return False
    return True


def group_action(A: BMatrix, p: SplitQuaternion, xi: BVector) -> BVector:
    """Two-sided action (A, p) . xi = A xi conj(p), products in the written order."""
    return A.apply(xi).right_scale(sq_conj(p))


def random_rational_quaternion(rng, den: int = 8, span: int = 8) -> SplitQuaternion:
    """Uniform random quaternion with small exact rational coefficients."""
    def coeff():
        return Fraction(rng.randint(-span, span), rng.randint(1, den))

    return SplitQuaternion(coeff(), coeff(), coeff(), coeff())
