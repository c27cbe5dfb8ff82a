import pytest

from exact.linalg import (CS_MATRIX, K_MATRIX, S_MATRIX, X_MATRIX, DimensionMismatch, ExactMatrix,
                          LevelIndexError, level_matrices, tensor)
from exact.ring import HALF, I, ONE, ZERO


def test_building_blocks_are_unitary():
    for m in (K_MATRIX, S_MATRIX, X_MATRIX, CS_MATRIX):
        assert m.is_unitary()


def test_building_block_determinants():
    assert K_MATRIX.det() == I
    assert S_MATRIX.det() == I
    assert X_MATRIX.det() == -ONE
    assert CS_MATRIX.det() == I


def test_k_squared_is_a_scalar():
    assert K_MATRIX @ K_MATRIX == ExactMatrix.identity(2).scale(-I)


def test_tensor_shapes_and_determinant():
    m = tensor(K_MATRIX, ExactMatrix.identity(4))
    assert (m.rows, m.cols) == (8, 8)
    # det(A (x) I_4) = det(A)^4
    assert m.det() == I ** 4


def test_det_of_singular_and_scaled_matrices():
    assert ExactMatrix.from_ints([[1, 2], [2, 4]]).det() == ZERO
    assert ExactMatrix.identity(8).scale(I).det() == ONE
    # off-diagonal entries 1/(1+i)^2 = -i/2
    assert ExactMatrix.from_ints([[0, 1], [1, 0]], denom_exp=2).det() == HALF * HALF


def test_det_needs_row_swap():
    m = ExactMatrix.from_ints([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    assert m.det() == -ONE


def test_matmul_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        ExactMatrix.identity(2) @ ExactMatrix.identity(3)


def test_ragged_rows_rejected():
    with pytest.raises(DimensionMismatch):
        ExactMatrix([[ONE, ZERO], [ONE]])


def test_structure_predicates():
    assert X_MATRIX.is_permutation()
    assert S_MATRIX.is_diagonal() and S_MATRIX.is_monomial() and not S_MATRIX.is_permutation()
    assert not K_MATRIX.is_monomial()
    assert K_MATRIX.entries_canonical()


def test_first_difference_reports_row_major_position():
    assert S_MATRIX.first_difference(S_MATRIX) is None
    r, c, a, b = S_MATRIX.first_difference(ExactMatrix.identity(2))
    assert (r, c) == (1, 1)
    assert a == I and b == ONE


def test_keys_follow_equality():
    a = ExactMatrix.from_ints([[2, 0], [0, 2]], denom_exp=2)
    b = ExactMatrix.identity(2).scale(-I)
    assert a == b
    assert a.key() == b.key()
    assert hash(a) == hash(b)


def test_json_roundtrip():
    assert ExactMatrix.from_json(K_MATRIX.to_json()) == K_MATRIX


@pytest.mark.parametrize("kind,j,k", [("i", 3, None), ("X", 0, 5), ("K", 2, 7)])
def test_level_matrices_are_unitary(kind, j, k):
    m = level_matrices(kind, j, k, n=8)
    assert m.is_unitary()


def test_level_matrix_determinants():
    assert level_matrices("i", 0, n=8).det() == I
    assert level_matrices("X", 1, 4, n=8).det() == -ONE
    assert level_matrices("K", 1, 4, n=8).det() == I


def test_level_matrix_embeds_block():
    m = level_matrices("K", 1, 3, n=4)
    assert m[1, 1] == K_MATRIX[0, 0]
    assert m[3, 3] == K_MATRIX[1, 1]
    assert m[1, 3] == K_MATRIX[0, 1]
    assert m[0, 0] == ONE and m[2, 2] == ONE


@pytest.mark.parametrize("args", [("i", 0, 1), ("X", 2, 1), ("K", 0, 8), ("Y", 0, 1), ("i", 9, None)])
def test_level_matrix_index_errors(args):
    kind, j, k = args
    with pytest.raises(LevelIndexError):
        level_matrices(kind, j, k, n=8)
