import random
from fractions import Fraction

import numpy as np
import pytest

from paramech.split_quaternions import (
    BMatrix,
    BVector,
    ONE,
    I,
    S,
    T,
    SplitQuaternion,
    SquareClass,
    bn_inner,
    group_action,
    random_rational_quaternion,
    sp_nB_member,
    sq_conj,
    sq_mul,
    sq_norm_sq,
    sq_square_class,
)

# Hand-derived basis table (row * column), written out independently of the
# word-reduction used by the implementation.  Entries are (sign, basis index).
EXPECTED_TABLE = {
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (1, 0), (2, 3): (-1, 1),
    (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (1, 1), (3, 3): (1, 0),
}

BASIS = [ONE, I, S, T]


def test_product_table_matches_hand_derivation():
    for (a, b), (sign, idx) in EXPECTED_TABLE.items():
        assert sq_mul(BASIS[a], BASIS[b]) == SplitQuaternion.basis(idx).scale(sign)


def test_generator_relations():
    assert sq_mul(I, I) == -ONE
    assert sq_mul(S, S) == ONE
    assert sq_mul(T, T) == ONE
    assert sq_mul(I, S) == T
    assert sq_mul(S, I) == -T
    # products the generators do not state directly
    assert sq_mul(S, T) == -I
    assert sq_mul(T, S) == I


def test_unit_element():
    rng = random.Random(1)
    for _ in range(10):
        p = random_rational_quaternion(rng)
        assert sq_mul(ONE, p) == p
        assert sq_mul(p, ONE) == p


def test_zero_divisors():
    lhs = ONE + S
    rhs = ONE - S
    assert sq_mul(lhs, rhs).is_zero()


def test_associativity_basis_and_random():
    for a in BASIS:
        for b in BASIS:
            for c in BASIS:
                assert sq_mul(sq_mul(a, b), c) == sq_mul(a, sq_mul(b, c))
    rng = random.Random(2)
    for _ in range(50):
        p, q, r = (random_rational_quaternion(rng) for _ in range(3))
        assert sq_mul(sq_mul(p, q), r) == sq_mul(p, sq_mul(q, r))


def test_conjugation_values():
    assert sq_conj(ONE) == ONE
    assert sq_conj(I + S) == -(I + S)
    assert sq_conj(SplitQuaternion(1, 2, 3, 4)) == SplitQuaternion(1, -2, -3, -4)


def test_conjugation_reverses_products():
    rng = random.Random(3)
    for _ in range(50):
        p = random_rational_quaternion(rng)
        q = random_rational_quaternion(rng)
        assert sq_conj(sq_mul(p, q)) == sq_mul(sq_conj(q), sq_conj(p))


def test_norm_values():
    assert sq_norm_sq(ONE + I) == 2
    assert sq_norm_sq(ONE + I + S + T) == 0
    assert sq_norm_sq(S) == -1


def test_norm_is_real_part_of_conj_product():
    rng = random.Random(4)
    for _ in range(20):
        p = random_rational_quaternion(rng)
        assert sq_norm_sq(p) == sq_mul(sq_conj(p), p).x


def test_norm_multiplicative_exact():
    rng = random.Random(5)
    for _ in range(50):
        p = random_rational_quaternion(rng)
        q = random_rational_quaternion(rng)
        assert sq_norm_sq(sq_mul(p, q)) == sq_norm_sq(p) * sq_norm_sq(q)


def test_square_class_examples():
    assert sq_square_class(I) is SquareClass.SQUARES_TO_MINUS_ONE
    assert sq_square_class(S) is SquareClass.SQUARES_TO_PLUS_ONE
    assert sq_square_class(ONE + I) is SquareClass.OTHER
    # (1+i)^2 = 2i, confirmed by direct multiplication
    assert sq_mul(ONE + I, ONE + I) == I.scale(2)
    assert sq_square_class(ONE) is SquareClass.SQUARES_TO_PLUS_ONE
    assert sq_square_class(-ONE) is SquareClass.SQUARES_TO_PLUS_ONE
    assert sq_square_class(SplitQuaternion()) is SquareClass.OTHER


def test_square_class_agrees_with_brute_force_squaring():
    values = [Fraction(k, 2) for k in range(-4, 5)]
    checked = 0
    for x in values[::2]:
        for y in values:
            for u in values:
                for v in values[::2]:
                    p = SplitQuaternion(x, y, u, v)
                    square = sq_mul(p, p)
                    cls = sq_square_class(p)
                    if square == ONE:
                        assert cls is SquareClass.SQUARES_TO_PLUS_ONE
                    elif square == -ONE:
                        assert cls is SquareClass.SQUARES_TO_MINUS_ONE
                    else:
                        assert cls is SquareClass.OTHER
                    checked += 1
    assert checked == 5 * 9 * 9 * 5


def test_bn_inner_values():
    assert bn_inner(BVector.of(ONE), BVector.of(ONE)) == 1
    # conj(s) s = -s^2 = -1
    assert bn_inner(BVector.of(S), BVector.of(S)) == -1


def test_bn_inner_symmetry():
    rng = random.Random(6)
    for _ in range(20):
        xi = BVector.of(*(random_rational_quaternion(rng) for _ in range(2)))
        eta = BVector.of(*(random_rational_quaternion(rng) for _ in range(2)))
        assert bn_inner(xi, eta) == bn_inner(eta, xi)


def test_bn_inner_length_mismatch():
    with pytest.raises(ValueError):
        bn_inner(BVector.of(ONE), BVector.of(ONE, ONE))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bn_inner_signature(n):
    vectors = []
    for slot in range(n):
        for b in range(4):
            entries = [SplitQuaternion() for _ in range(n)]
            entries[slot] = SplitQuaternion.basis(b)
            vectors.append(BVector(tuple(entries)))
    gram = np.array(
        [[float(bn_inner(u, v)) for v in vectors] for u in vectors]
    )
    eigenvalues = np.linalg.eigvalsh(gram)
    assert int(np.sum(eigenvalues > 0)) == 2 * n
    assert int(np.sum(eigenvalues < 0)) == 2 * n


def test_sp_membership():
    assert sp_nB_member(BMatrix.identity(2))
    assert sp_nB_member(BMatrix.diagonal([I]))
    assert not sp_nB_member(BMatrix.diagonal([ONE + S]))


def test_group_action_identity_pair():
    rng = random.Random(7)
    xi = BVector.of(*(random_rational_quaternion(rng) for _ in range(2)))
    assert group_action(BMatrix.identity(2), ONE, xi) == xi


def test_group_action_unit_example():
    # (I, i, (1)) -> (1 * conj(i)) = (-i)
    out = group_action(BMatrix.identity(1), I, BVector.of(ONE))
    assert out == BVector.of(-I)


def test_group_action_preserves_inner_product():
    # Unit-norm entries: 3/5 + 4/5 i (elliptic) and 5/3 + 4/3 s (hyperbolic).
    p1 = SplitQuaternion(Fraction(3, 5), Fraction(4, 5), 0, 0)
    p2 = SplitQuaternion(Fraction(5, 3), 0, Fraction(4, 3), 0)
    assert sq_norm_sq(p1) == 1 and sq_norm_sq(p2) == 1
    zero = SplitQuaternion()
    off_diagonal = BMatrix(((zero, p1), (p2, zero)))
    assert sp_nB_member(off_diagonal)
    rng = random.Random(8)
    for matrix in (BMatrix.diagonal([p1, p2]), off_diagonal):
        for p in (p1, p2, sq_mul(p1, p2)):
            assert sq_norm_sq(p) == 1
            for _ in range(5):
                xi = BVector.of(*(random_rational_quaternion(rng) for _ in range(2)))
                eta = BVector.of(*(random_rational_quaternion(rng) for _ in range(2)))
                assert bn_inner(
                    group_action(matrix, p, xi), group_action(matrix, p, eta)
                ) == bn_inner(xi, eta)


def test_group_action_dimension_mismatch():
    with pytest.raises(ValueError):
        group_action(BMatrix.identity(2), ONE, BVector.of(ONE))


def test_bvector_requires_entries():
    with pytest.raises(ValueError):
        BVector(())
