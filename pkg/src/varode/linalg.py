"""Small dense complex matrix helpers shared by the solvers.

Matrices are plain ``numpy`` complex arrays of shape ``(n, n)`` with
``1 <= n <= MAX_DIM``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "MAX_DIM",
    "EigenTriple",
    "NonHermitianError",
    "DefectiveMatrixError",
    "SeriesConvergenceError",
    "as_cmatrix",
    "as_cvector",
    "expm",
    "entire_series",
    "cosh_coeff",
    "sinhc_coeff",
    "eig_hermitian",
    "eig_general",
    "eig_general_batch",
]

MAX_DIM = 8


class NonHermitianError(ValueError):
    pass


class DefectiveMatrixError(np.linalg.LinAlgError):
    pass


class SeriesConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class EigenTriple:
    """Eigenvalue with right eigenvector and the dual (left) covector."""

    value: complex
    right: np.ndarray
    left: np.ndarray


def as_cmatrix(A) -> np.ndarray:
    A = np.array(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not 1 <= A.shape[0] <= MAX_DIM:
        raise ValueError(f"dimension {A.shape[0]} outside supported range 1..{MAX_DIM}")
    return A


def as_cvector(v, n: int | None = None) -> np.ndarray:
    v = np.array(v, dtype=complex).reshape(-1)
    if n is not None and v.shape[0] != n:
        raise ValueError(f"expected a vector of length {n}, got {v.shape[0]}")
    return v


# Pade(13) coefficients and the scaling threshold of Higham (2005)
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0, 670442572800.0,
    33522128640.0, 1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


def expm(A) -> np.ndarray:
    """Matrix exponential by scaling and squaring around a [13/13] Pade core."""
    A = as_cmatrix(A)
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    if norm == 0:
        return np.eye(n, dtype=complex)
    s = max(0, int(math.ceil(math.log2(norm / _THETA13)))) if norm > _THETA13 else 0
    A = A / 2.0**s
    b = _PADE13
    ident = np.eye(n, dtype=complex)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R


def cosh_coeff(n: int) -> float:
    return 1.0 / math.factorial(n) if n % 2 == 0 else 0.0


def sinhc_coeff(n: int) -> float:
    """Coefficients of sinh(x)/x as a series in x."""
    return 1.0 / math.factorial(n + 1) if n % 2 == 0 else 0.0


def entire_series(
    A,
    coeff: Callable[[int], complex],
    terms: int = 200,
    tol: float = 1e-14,
    window: int = 4,
) -> np.ndarray:
    """Sum ``coeff(k) A^k`` for ``k = 0, 1, ...`` until the tail is negligible.

    Stops once ``window`` consecutive terms are all below ``tol`` times the
    running sum (a window rather than a single term, because even/odd
    coefficient sequences have structural zeros).
    """
    A = as_cmatrix(A)
    n = A.shape[0]
    power = np.eye(n, dtype=complex)
    total = np.zeros((n, n), dtype=complex)
    small = 0
    for k in range(terms):
        c = coeff(k)
        term = c * power
        total = total + term
        scale = np.abs(total).max()
        if np.abs(term).max() <= tol * scale or (scale == 0 and not np.any(term)):
            small += 1
            if small >= window:
                return total
        else:
            small = 0
        power = power @ A
        if not np.any(power):
            # nilpotent: every further term vanishes
            return total
    raise SeriesConvergenceError(f"series tail above {tol} after {terms} terms")


def eig_hermitian(H, tol: float = 1e-12) -> list[tuple[float, np.ndarray]]:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    H = as_cmatrix(H)
    scale = max(1.0, np.abs(H).max())
    if np.abs(H - H.conj().T).max() > tol * scale:
        raise NonHermitianError("matrix is not Hermitian")
    w, v = np.linalg.eigh(H)
    return [(float(w[i]), v[:, i].copy()) for i in range(len(w))]


def eig_general_batch(M, min_separation: float = 1e-10):
    """Eigen-decomposition of a stack of matrices ``(..., n, n)``.

    Returns ``(values, right, left)`` where ``right[..., :, k]`` is the k-th
    right eigenvector and ``left[..., k, :]`` the matching covector, with
    ``left @ right = I`` by construction.
    """
    M = np.asarray(M, dtype=complex)
    values, right = np.linalg.eig(M)
    n = M.shape[-1]
    if n > 1:
        diffs = np.abs(values[..., :, None] - values[..., None, :])
        diffs = np.where(np.eye(n, dtype=bool), np.inf, diffs)
        scale = np.maximum(1.0, np.abs(values).max(axis=-1))
        if np.any(diffs.min(axis=(-2, -1)) <= min_separation * scale):
            raise DefectiveMatrixError("eigenvalues not separated; matrix may be defective")
    try:
        left = np.linalg.inv(right)
    except np.linalg.LinAlgError as exc:
        raise DefectiveMatrixError("eigenvector matrix is singular") from exc
    return values, right, left


def eig_general(M, min_separation: float = 1e-10) -> list[EigenTriple]:
    M = as_cmatrix(M)
    values, right, left = eig_general_batch(M, min_separation)
    return [EigenTriple(complex(values[k]), right[:, k].copy(), left[k, :].copy()) for k in range(len(values))]
