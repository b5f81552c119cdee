"""Independent oracles used across the test suite.

These deliberately avoid the library's own differentiation and linear-algebra
paths: finite differences for derivatives, fraction-pivot elimination for
exact determinants, and direct evaluation for multilinear identities.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def fd_gradient(f, x, step=1e-5):
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for k in range(len(x)):
        forward = x.copy()
        backward = x.copy()
        forward[k] += step
        backward[k] -= step
        grad[k] = (f(forward) - f(backward)) / (2 * step)
    return grad


def fd_hessian(f, x, step=1e-4):
    x = np.asarray(x, dtype=float)
    d = len(x)
    hess = np.zeros((d, d))
    base = f(x)
    for a in range(d):
        for b in range(a, d):
            pp = x.copy(); pp[a] += step; pp[b] += step
            pm = x.copy(); pm[a] += step; pm[b] -= step
            mp = x.copy(); mp[a] -= step; mp[b] += step
            mm = x.copy(); mm[a] -= step; mm[b] -= step
            if a == b:
                value = (f(pp) - 2 * base + f(mm)) / (4 * step * step)
            else:
                value = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * step * step)
            hess[a, b] = value
            hess[b, a] = value
    return hess


def exact_determinant(matrix) -> Fraction:
    """Fraction Gaussian elimination with partial pivoting by nonzero search."""
    rows = [[Fraction(v) for v in row] for row in matrix]
    size = len(rows)
    det = Fraction(1)
    for col in range(size):
        pivot_row = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
            det = -det
        pivot = rows[col][col]
        det *= pivot
        for r in range(col + 1, size):
            factor = rows[r][col] / pivot
            if factor:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return det


def relative_error(measured, expected) -> float:
    measured = np.asarray(measured, dtype=float)
    expected = np.asarray(expected, dtype=float)
    scale = max(1.0, float(np.max(np.abs(expected))))
    return float(np.max(np.abs(measured - expected))) / scale
