import pytest

from pfida.errors import DimensionError
from pfida.expr import Domain, eval_expr, is_zero, parse, simplify
from pfida.linalg import (
    adjugate,
    as_matrix,
    as_vector,
    det,
    identity,
    inverse,
    mat_add,
    mat_mul,
    mat_scale,
    mat_sub,
    mat_vec,
    transpose,
    vec_dot,
    zeros,
)

DOM = Domain({"a": (0.5, 1.5), "b": (0.5, 1.5), "x": (0.5, 1.5)})


def entries_zero(M, dom=DOM):
    return all(is_zero(e, dom) for row in M for e in row)


def test_identity_and_zeros():
    I2 = identity(2)
    assert eval_expr(I2[0][0], {}) == 1.0
    assert eval_expr(I2[0][1], {}) == 0.0
    Z = zeros(2, 3)
    assert len(Z) == 2 and len(Z[0]) == 3


def test_as_matrix_coerces_strings_and_numbers():
    M = as_matrix([["a", 2], [0, "x^2"]])
    assert M[0][1] == parse("2")
    assert M[1][1] == parse("x^2")


def test_transpose():
    A = as_matrix([["a", "b"], ["0", "x"]])
    T = transpose(A)
    assert simplify(T[0][1]) == parse("0")
    assert T[1][0] == parse("b")


def test_mat_mul_shapes():
    A = as_matrix([["1", "2"], ["3", "4"]])
    B = as_matrix([["1"], ["1"]])
    C = mat_mul(A, B)
    assert eval_expr(C[0][0], {}) == 3.0
    assert eval_expr(C[1][0], {}) == 7.0
    with pytest.raises(DimensionError):
        mat_mul(B, A)


def test_add_sub_scale():
    A = as_matrix([["a"]])
    S = mat_add(A, mat_scale(parse("2"), A))
    assert eval_expr(S[0][0], {"a": 1.5}) == pytest.approx(4.5)
    assert entries_zero(mat_sub(A, A))


def test_mat_vec_and_dot():
    A = as_matrix([["1", "x"], ["0", "2"]])
    v = as_vector(["a", "b"])
    out = mat_vec(A, v)
    point = {"a": 2.0, "b": 3.0, "x": 1.0}
    assert eval_expr(out[0], point) == 5.0
    assert eval_expr(vec_dot(v, v), point) == 13.0
    with pytest.raises(DimensionError):
        mat_vec(A, as_vector(["a"]))


@pytest.mark.parametrize(
    "M",
    [
        [["a"]],
        [["a", "1"], ["0", "b"]],
        [["a", "1", "0"], ["0", "b", "x"], ["1", "0", "2"]],
    ],
)
def test_inverse_round_trip(M):
    M = as_matrix(M)
    n = len(M)
    prod = mat_mul(inverse(M), M)
    diff = mat_sub(prod, identity(n))
    assert entries_zero(diff)


def test_det_and_adjugate_consistency():
    M = as_matrix([["a", "1"], ["x", "b"]])
    # A * adj(A) = det(A) * I
    prod = mat_mul(M, adjugate(M))
    target = mat_scale(det(M), identity(2))
    assert entries_zero(mat_sub(prod, target))


def test_det_singular():
    assert is_zero(det(as_matrix([["a", "a"], ["a", "a"]])), DOM)


def test_identically_singular_inverse_raises():
    with pytest.raises(DimensionError):
        inverse(as_matrix([["a", "a"], ["a", "a"]]))


def test_inverse_requires_square():
    with pytest.raises(DimensionError):
        det(as_matrix([["1", "2"]]))
