"""Constant structure operators F, G, H and their duals on R^{4n}.

Coordinates are ordered in four blocks of length n: indices 0..n-1 play the
role of x_i, then x_{n+i}, x_{2n+i}, x_{3n+i}.  Each operator is an exact
signed-permutation matrix acting on coordinate columns; the tangent and
cotangent tables have identical entries in this representation, so dual
operators carry the same matrix and differ only in their kind tag.

Composition convention throughout: (A o B)(x) = A(B(x)), i.e. plain matrix
products.  Under this convention FG = H and GF = -H hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "StructureKind",
    "StructureOperator",
    "NeutralMetric",
    "RelationCheck",
    "F",
    "G",
    "H",
    "F_STAR",
    "G_STAR",
    "H_STAR",
    "PRIMAL_KINDS",
    "DUAL_KINDS",
    "build_structure",
    "neutral_metric",
    "verify_relations",
    "relation_checks",
    "metric_compatibility",
    "fundamental_form",
]


@dataclass(frozen=True)
class StructureKind:
    tag: str
    dual: bool = False

    def __post_init__(self):
        if self.tag not in ("F", "G", "H"):
            raise ValueError(f"unknown structure tag {self.tag!r}")

    @property
    def name(self) -> str:
        return self.tag + ("*" if self.dual else "")

    def __str__(self) -> str:
        return self.name


F = StructureKind("F")
G = StructureKind("G")
H = StructureKind("H")
F_STAR = StructureKind("F", dual=True)
G_STAR = StructureKind("G", dual=True)
H_STAR = StructureKind("H", dual=True)

PRIMAL_KINDS = (F, G, H)
DUAL_KINDS = (F_STAR, G_STAR, H_STAR)

# Block action (source block, destination block, sign): basis column in block
# `src` maps to +-(basis row in block `dst`).  The cotangent tables produce the
# same entries, so primal and dual share this data.
_BLOCK_ACTION = {
    "F": ((0, 1, 1), (1, 0, -1), (2, 3, 1), (3, 2, -1)),
    "G": ((0, 2, 1), (1, 3, -1), (2, 0, 1), (3, 1, -1)),
    "H": ((0, 3, 1), (1, 2, 1), (2, 1, 1), (3, 0, 1)),
}


@dataclass(frozen=True, eq=False)
class StructureOperator:
    """Signed-permutation matrix realising one canonical basis element."""

    kind: StructureKind
    n: int
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 4 * self.n

    def apply(self, vector) -> np.ndarray:
        return self.matrix @ np.asarray(vector)

    def __repr__(self) -> str:
        return f"StructureOperator({self.kind.name}, n={self.n})"


@dataclass(frozen=True, eq=False)
class NeutralMetric:
    """Diagonal metric of signature (2n, 2n): +1 on the first two blocks."""

    n: int
    diagonal: np.ndarray = field(repr=False)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal)

    def pairing(self, x, y):
        return float(np.dot(np.asarray(x) * self.diagonal, np.asarray(y)))


@dataclass(frozen=True)
class RelationCheck:
    name: str
    passed: bool


def build_structure(kind: StructureKind, n: int) -> StructureOperator:
    """Exact 4n x 4n matrix for the requested canonical basis element."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    matrix = np.zeros((4 * n, 4 * n), dtype=np.int64)
    for src, dst, sign in _BLOCK_ACTION[kind.tag]:
        for k in range(n):
            matrix[dst * n + k, src * n + k] = sign
    matrix.setflags(write=False)
    return StructureOperator(kind, n, matrix)


def neutral_metric(n: int) -> NeutralMetric:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    diagonal = np.array([1] * (2 * n) + [-1] * (2 * n), dtype=np.int64)
    diagonal.setflags(write=False)
    return NeutralMetric(n, diagonal)


def relation_checks(
    operators: dict[str, np.ndarray], dual: bool = False
) -> tuple[RelationCheck, ...]:
    """Exact integer checks of the defining relations for a {F, G, H} triple."""
    fm, gm, hm = operators["F"], operators["G"], operators["H"]
    identity = np.eye(fm.shape[0], dtype=np.int64)
    star = "*" if dual else ""
    checks = (
        (f"F{star}^2 = -I", np.array_equal(fm @ fm, -identity)),
        (f"G{star}^2 = I", np.array_equal(gm @ gm, identity)),
        (f"H{star}^2 = I", np.array_equal(hm @ hm, identity)),
        (f"F{star}G{star} = H{star}", np.array_equal(fm @ gm, hm)),
        (f"G{star}F{star} = -H{star}", np.array_equal(gm @ fm, -hm)),
    )
    return tuple(RelationCheck(name, bool(ok)) for name, ok in checks)


def verify_relations(n: int) -> tuple[RelationCheck, ...]:
    """Check the square and anticommutation relations, primal and dual."""
    primal = {k.tag: build_structure(k, n).matrix for k in PRIMAL_KINDS}
    dual = {k.tag: build_structure(k, n).matrix for k in DUAL_KINDS}
    return relation_checks(primal) + relation_checks(dual, dual=True)


def metric_compatibility(kind: StructureKind, n: int) -> RelationCheck:
    """A^T g A = g for F and A^T g A = -g for G, H (exact integers)."""
    if kind.dual:
        raise ValueError("metric compatibility is a tangent-side statement")
    op = build_structure(kind, n)
    g = neutral_metric(n).matrix
    transformed = op.matrix.T @ g @ op.matrix
    expected = g if kind.tag == "F" else -g
    sign = "" if kind.tag == "F" else "-"
    return RelationCheck(
        f"{kind.tag}^T g {kind.tag} = {sign}g", bool(np.array_equal(transformed, expected))
    )


def fundamental_form(kind: StructureKind, n: int) -> np.ndarray:
    """Matrix of the two-form pairing (a, b) -> g(A e_a, e_b); antisymmetric.

    Entry [a, b] equals (A^T g)[a, b].  Constant coefficients, hence closed as
    a two-form; the closedness check itself lives in the exterior calculus.
    """
    if kind.dual:
        raise ValueError("fundamental forms pair tangent vectors; use a non-dual kind")
    op = build_structure(kind, n)
    g = neutral_metric(n).matrix
    omega = op.matrix.T @ g
    if not np.array_equal(omega, -omega.T):
        raise AssertionError("fundamental form must be antisymmetric")
    omega.setflags(write=False)
    return omega
