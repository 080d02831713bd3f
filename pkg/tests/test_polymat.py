import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varode.exact import PAULI, pauli_family, solve_linear_class
from varode.linalg import expm
from varode.oracle import integrate
from varode.polymat import (
    DegreeOverflowError,
    PolyMatrix,
    SeriesDivergenceError,
    apply_O,
    power_O,
    taylor_solve,
)

S1, S2, S3 = PAULI


def airy(orientation="row"):
    # companion of y'' = z y, stored for the requested orientation
    col = PolyMatrix.from_terms([[[0, 1], [0, 0]], [[0, 0], [1, 0]]], "column")
    return col if orientation == "column" else col.transpose()


def test_derivative_is_coefficient_shift():
    P = PolyMatrix.from_terms([np.eye(2), 2 * np.eye(2), 3 * np.eye(2)])
    dP = P.derivative()
    assert np.array_equal(dP.coeffs, [2 * np.eye(2), 6 * np.eye(2)])
    assert P.derivative(3).is_zero()


def test_product_degree_is_sum():
    A = PolyMatrix.from_terms([np.eye(2), [[1, 2], [3, 4]]])
    B = PolyMatrix.from_terms([np.eye(2), np.zeros((2, 2)), [[0, 1], [1, 0]]])
    assert (A @ B).degree == 3
    z = 0.7
    assert np.allclose((A @ B)(z), A(z) @ B(z))


def test_apply_O_constant():
    M0 = np.array([[1, 2], [3, 4]], dtype=complex)
    M = PolyMatrix.constant(M0)
    assert np.array_equal(apply_O(M, M).coeffs[0], M0 @ M0)


def test_apply_O_companion_example():
    M = PolyMatrix.from_terms([[[0, 1], [0, 0]], [[0, 0], [1, 0]]], "row")
    OM = apply_O(M, M)
    z = 1.7
    assert np.allclose(OM(z), [[z, 0], [1, z]])


def test_apply_O_second_power_by_hand():
    # (d/dz + M)(OM) with O M = M' + M M, worked at a sample point
    M = PolyMatrix.from_terms([[[0, 1], [0, 0]], [[0, 0], [1, 0]]], "row")
    O2 = power_O(M, 2)
    for z in (0.0, 0.4, -1.3):
        m = np.array([[0, 1], [z, 0]])
        dm = np.array([[0, 0], [1, 0]])
        om = dm + m @ m
        dom = np.array([[1, 0], [0, 1]])
        assert np.allclose(O2(z), dom + m @ om)


def test_apply_O_column_orientation_acts_from_the_right():
    A = PolyMatrix.from_terms([[[0, 1], [0, 0]], [[1, 0], [2, 0]]], "column")
    X = PolyMatrix.from_terms([[[1, 2], [3, 4]]], "column")
    z = 0.3
    assert np.allclose(apply_O(A, X)(z), X(z) @ A(z))


def test_power_O_constant():
    M0 = np.array([[0.5, 1], [-1, 0.2]], dtype=complex)
    M = PolyMatrix.constant(M0)
    assert power_O(M, 0) is M
    for n in range(5):
        assert np.allclose(power_O(M, n).coeffs[0], np.linalg.matrix_power(M0, n + 1))


def test_power_O_pauli_linear_identities():
    M = pauli_family(1, 1j, 0, 1)
    assert np.allclose(M(0.0), S3) and np.allclose(M(1.0), S1 + 1j * S2 + S3)
    OM = apply_O(M, M)
    for n in (1, 2):
        OMn = PolyMatrix.constant(np.eye(2))
        for _ in range(n):
            OMn = OMn @ OM
        assert power_O(M, 2 * n).equals(M @ OMn, 0.0)
        assert power_O(M, 2 * n + 1).equals(OMn @ OM, 0.0)


def test_degree_cap():
    M = PolyMatrix.from_terms([np.zeros((2, 2)), np.zeros((2, 2)), [[0, 1], [1, 0]]])
    with pytest.raises(DegreeOverflowError):
        power_O(M, 10)


_coef = st.integers(-3, 3)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(_coef, min_size=4, max_size=4), min_size=2, max_size=3),
    st.lists(st.lists(_coef, min_size=4, max_size=4), min_size=1, max_size=3),
    st.lists(st.lists(_coef, min_size=4, max_size=4), min_size=1, max_size=3),
    _coef,
    _coef,
    st.sampled_from(["row", "column"]),
)
def test_apply_O_is_linear(m, x, zc, a, b, orientation):
    def poly(rows):
        return PolyMatrix(np.array(rows, dtype=complex).reshape(-1, 2, 2), orientation)

    M, X, Z = poly(m), poly(x), poly(zc)
    lhs = apply_O(M, X.scale(a) + Z.scale(b))
    rhs = apply_O(M, X).scale(a) + apply_O(M, Z).scale(b)
    assert lhs.equals(rhs, 0.0)


def test_taylor_constant_rotation():
    M = PolyMatrix.constant([[0, 1], [-1, 0]])
    y = taylor_solve(M, [1, 0], np.pi / 2).y
    assert np.allclose(y, [0, 1], atol=1e-13)
    # matches Y0 expm(z M0) for the row system
    assert np.allclose(y, np.array([1, 0]) @ expm(np.pi / 2 * M(0.0)), atol=1e-13)
    # column system Y' = M Y rotates the other way
    y = taylor_solve(M.with_orientation("column"), [1, 0], np.pi / 2).y
    assert np.allclose(y, [0, -1], atol=1e-13)


def test_taylor_airy_matches_oracle():
    M = airy("column")
    y = taylor_solve(M, [1, 0], 0.5).y
    ref = integrate(lambda z: M(z), np.array([1, 0]), 0.5, rel_tol=1e-13).y_end
    assert np.abs(y - ref).max() < 1e-10


def test_taylor_pauli_matches_exact_solver():
    M = pauli_family(1, 1j, 0, 1)
    y = taylor_solve(M, [1, 0], 0.3).y
    assert np.abs(y - solve_linear_class(M, [1, 0], 0.3)).max() < 1e-10


def test_orientation_duality():
    rng = np.random.default_rng(11)
    c = rng.normal(size=(3, 3, 3)) * 0.5
    M = PolyMatrix(c, "row")
    Y0 = rng.normal(size=3)
    for z in (0.2, 0.8):
        row = taylor_solve(M, Y0, z).y
        col = taylor_solve(M.transpose(), Y0, z).y
        assert np.abs(row - col).max() < 1e-10


def test_derivatives_of_solution_at_origin():
    # y'' = z y with y(0)=1, y'(0)=0: y''' = y + z y', y'''' = 2 y' + z y'', ...
    # The exact derivatives at 0 follow y^(k+2)(0) = k y^(k-1)(0).
    d = [1.0, 0.0]
    for k in range(0, 8):
        d.append(k * d[k - 1] if k >= 1 else 0.0)
    M = airy("row")
    Y0 = np.array([1.0, 0.0])
    for n in range(1, 6):
        Yn = Y0 @ power_O(M, n)(0.0)
        assert Yn[0] == pytest.approx(d[n + 1], abs=1e-14)
        assert Yn[1] == pytest.approx(d[n + 2], abs=1e-14)


def test_derivatives_against_oracle_richardson():
    # second and third derivatives of y from oracle samples via Richardson-extrapolated differences
    M = airy("column")
    MR = airy("row")
    Y0 = np.array([1.0, 0.5])
    traj_p = integrate(lambda z: M(z), Y0, 0.2, rel_tol=1e-13)
    traj_m = integrate(lambda z: M(z), Y0, -0.2, rel_tol=1e-13)

    def y(z):
        return (traj_p(z) if z >= 0 else traj_m(z))[0].real

    def d2(h):
        return (y(h) - 2 * y(0.0) + y(-h)) / h**2

    est = (4 * d2(0.05) - d2(0.1)) / 3
    exact = (Y0 @ power_O(MR, 1)(0.0))[0]
    assert abs(est - exact) < 1e-4 * max(1.0, abs(exact))


def test_taylor_reports_tail_and_terms():
    M = PolyMatrix.constant([[0, 1], [1, 0]])
    res = taylor_solve(M, [1, 0], 1.0)
    assert res.tail < 1e-15 * 2
    assert res.terms < 40
    assert res.y[0] == pytest.approx(math.cosh(1.0))


def test_taylor_divergence_detected():
    M = PolyMatrix.constant([[0, 1], [1, 0]])
    with pytest.raises(SeriesDivergenceError):
        taylor_solve(M, [1, 0], 60.0, terms=20)


def test_json_round_trip():
    M = pauli_family(1, 1j, 0.5, 1, orientation="column")
    again = PolyMatrix.from_json(M.to_json())
    assert again.orientation == "column"
    assert again.equals(M, 0.0)
