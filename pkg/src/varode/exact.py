"""Exactly solvable classes of polynomial system matrices.

Three cases are recognised:

* constant:      M(z) = M0, solved by the matrix exponential;
* linear class:  M(z)^2 = c I and M''(z) = 0;
* cubic class:   M(z)^2 = 0, M'(z)^2 = 0 and M''(z) constant.

For the two polynomial classes the powers of the operator O collapse
(O^{2n} M = M (OM)^n, O^{2n+1} M = (OM)^{n+1}, and
O^{3n} M = 2^n M M''^n etc.), so the operator series reduces to entire
functions of a single constant matrix. Those are summed here in integer
powers of that matrix; no matrix square or cube root is ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_cmatrix, as_cvector, entire_series, expm
from .polymat import PolyMatrix

__all__ = [
    "CLASS_TAGS",
    "ClassReport",
    "ClassificationError",
    "ConstraintError",
    "classify",
    "solve_constant",
    "solve_linear_class",
    "solve_cubic_class",
    "solve_exact",
    "pauli_family",
    "dirac_family",
    "PAULI",
    "DIRAC",
]

CLASS_TAGS = ("constant", "linear-class", "cubic-class", "none")
DEFAULT_TOL = 1e-12

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
# Dirac representation, gamma^0 .. gamma^3
DIRAC = (
    np.block([[_I2, _Z2], [_Z2, -_I2]]),
    *(np.block([[_Z2, s], [-s, _Z2]]) for s in PAULI),
)


class ClassificationError(ValueError):
    pass


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class ClassReport:
    tag: str
    linear: bool
    cubic: bool
    residuals: dict = field(default_factory=dict)
    square_constant: complex | None = None

    def to_json(self) -> dict:
        c = self.square_constant
        return {
            "class": self.tag,
            "linear_class": self.linear,
            "cubic_class": self.cubic,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "square_constant": None if c is None else [float(c.real), float(c.imag)],
        }


def _coeff_max(P: PolyMatrix, from_degree: int = 0) -> float:
    c = P.coeffs[from_degree:]
    return float(np.abs(c).max()) if c.size else 0.0


def classify(M: PolyMatrix, tol: float = DEFAULT_TOL) -> ClassReport:
    """Test the defining conditions of each class in polynomial arithmetic."""
    n = M.n
    sq = M @ M
    c = complex(np.trace(sq.coeffs[0]) / n)
    ident = PolyMatrix.constant(np.eye(n) * c, M.orientation)
    dM = M.derivative()
    ddM = M.derivative(2)
    res = {
        "square_minus_cI": _coeff_max(sq - ident),
        "second_derivative": _coeff_max(ddM),
        "square": _coeff_max(sq),
        "derivative_square": _coeff_max(dM @ dM),
        "third_derivative": _coeff_max(M.derivative(3)),
    }
    linear = res["square_minus_cI"] < tol and res["second_derivative"] < tol
    cubic = res["square"] < tol and res["derivative_square"] < tol and res["third_derivative"] < tol
    if M.degree == 0:
        tag = "constant"
    elif linear:
        tag = "linear-class"
    elif cubic:
        tag = "cubic-class"
    else:
        tag = "none"
    return ClassReport(tag, linear, cubic, res, c if linear else None)


def solve_constant(M0, Y0, z: float, orientation: str = "row") -> np.ndarray:
    M0 = as_cmatrix(M0)
    Y0 = as_cvector(Y0, M0.shape[0])
    E = expm(z * M0)
    return Y0 @ E if orientation == "row" else E @ Y0


def _row_problem(M: PolyMatrix) -> PolyMatrix:
    # a column system Y' = M Y is the row system Y^T' = Y^T M^T
    return M if M.orientation == "row" else M.transpose()


def _apply(propagator: np.ndarray, Y0: np.ndarray, orientation: str) -> np.ndarray:
    # propagator is always built for the row problem
    return Y0 @ propagator if orientation == "row" else propagator.T @ Y0


def linear_class_propagator(M: PolyMatrix, z: float, tol: float = 1e-15) -> np.ndarray:
    """I + M0 int_0^z cosh(uA0) du + A0 int_0^z sinh(uA0) du for a row system."""
    M0 = M(0.0)
    A2 = M.derivative()(0.0) + M0 @ M0
    B = A2 * (z * z)
    odd = entire_series(B, lambda k: 1.0 / math.factorial(2 * k + 1), tol=tol) * z
    even = entire_series(B, lambda k: 1.0 / math.factorial(2 * k + 2), tol=tol) * (z * z)
    return np.eye(M.n, dtype=complex) + M0 @ odd + A2 @ even


def solve_linear_class(M: PolyMatrix, Y0, z: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    report = classify(M, tol)
    if not report.linear:
        raise ClassificationError(f"matrix is not in the linear class (tag {report.tag!r})")
    Y0 = as_cvector(Y0, M.n)
    return _apply(linear_class_propagator(_row_problem(M), z), Y0, M.orientation)


def cubic_class_propagator(M: PolyMatrix, z: float, tol: float = 1e-15) -> np.ndarray:
    """I + int_0^z (f1 + f2 + f3) du for a row system, term-integrated.

    With D = M'' (constant):
        int f1 = sum 2^n M0 D^n z^(3n+1)/(3n+1)!
        int f2 = sum 2^n M0' D^n z^(3n+2)/(3n+2)!
        int f3 = sum 2^n (D + M0 M0') D^n z^(3n+3)/(3n+3)!
    """
    M0 = M(0.0)
    dM0 = M.derivative()(0.0)
    D = M.derivative(2)(0.0)
    B = 2.0 * D * z**3
    s1 = entire_series(B, lambda k: 1.0 / math.factorial(3 * k + 1), tol=tol) * z
    s2 = entire_series(B, lambda k: 1.0 / math.factorial(3 * k + 2), tol=tol) * z**2
    s3 = entire_series(B, lambda k: 1.0 / math.factorial(3 * k + 3), tol=tol) * z**3
    return np.eye(M.n, dtype=complex) + M0 @ s1 + dM0 @ s2 + (D + M0 @ dM0) @ s3


def solve_cubic_class(M: PolyMatrix, Y0, z: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    report = classify(M, tol)
    if not report.cubic:
        raise ClassificationError(f"matrix is not in the cubic class (tag {report.tag!r})")
    Y0 = as_cvector(Y0, M.n)
    return _apply(cubic_class_propagator(_row_problem(M), z), Y0, M.orientation)


def solve_exact(M: PolyMatrix, Y0, z: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Dispatch to whichever closed form applies."""
    report = classify(M, tol)
    if report.tag == "constant":
        return solve_constant(M(0.0), Y0, z, M.orientation)
    if report.linear:
        return solve_linear_class(M, Y0, z, tol)
    if report.cubic:
        return solve_cubic_class(M, Y0, z, tol)
    raise ClassificationError("matrix belongs to no exactly solvable class")


def _csqrt(x: complex) -> complex:
    return complex(np.sqrt(complex(x) + 0j))


def pauli_family(q1, q2, p1, p3, orientation: str = "row") -> PolyMatrix:
    """M(z) = sum_i (p_i + q_i z) sigma_i with M(z)^2 constant.

    The free parameters are the slopes ``q1, q2`` and intercepts ``p1, p3``;
    ``q3`` and ``p2`` are solved from sum q_i^2 = 0 and sum p_i q_i = 0.
    """
    q1, q2, p1, p3 = (complex(v) for v in (q1, q2, p1, p3))
    q3 = _csqrt(-(q1 * q1 + q2 * q2))
    if q2 != 0:
        p2 = -(p1 * q1 + p3 * q3) / q2
    elif p1 * q1 + p3 * q3 == 0:
        p2 = 0j
    else:
        raise ConstraintError("q2 = 0 leaves the cross-term constraint unsolvable for these parameters")
    p, q = (p1, p2, p3), (q1, q2, q3)
    c0 = sum(pi * s for pi, s in zip(p, PAULI))
    c1 = sum(qi * s for qi, s in zip(q, PAULI))
    return PolyMatrix.from_terms([c0, c1], orientation)


def dirac_family(q0, q1, q2, p0, p1, p3, orientation: str = "row") -> PolyMatrix:
    """4x4 analogue over the Dirac matrices with Minkowski signature (+,-,-,-).

    ``q3`` and ``p2`` are eliminated from q.q = 0 and p.q = 0.
    """
    q0, q1, q2, p0, p1, p3 = (complex(v) for v in (q0, q1, q2, p0, p1, p3))
    q3 = _csqrt(q0 * q0 - q1 * q1 - q2 * q2)
    cross = p0 * q0 - p1 * q1 - p3 * q3
    if q2 != 0:
        p2 = cross / q2
    elif cross == 0:
        p2 = 0j
    else:
        raise ConstraintError("q2 = 0 leaves the cross-term constraint unsolvable for these parameters")
    p, q = (p0, p1, p2, p3), (q0, q1, q2, q3)
    c0 = sum(pi * g for pi, g in zip(p, DIRAC))
    c1 = sum(qi * g for qi, g in zip(q, DIRAC))
    return PolyMatrix.from_terms([c0, c1], orientation)
