"""Matrices with polynomial entries and the derivative-plus-matrix operator.

A :class:`PolyMatrix` stores its coefficients as an array of shape
``(degree + 1, n, n)``: ``coeffs[k]`` multiplies ``z**k``.

Orientation decides which side the system matrix acts on:

* ``"row"``:    Y' = Y M  (Y a row vector); the operator is O X = X' + M X
* ``"column"``: Y' = M Y  (Y a column vector); the operator is O X = X' + X M

With either convention the derivatives of the solution are
Y^(k+1) = Y [O^k M] (row) or [O^k M] Y (column).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_cvector

__all__ = [
    "MAX_DEGREE",
    "ORIENTATIONS",
    "DegreeOverflowError",
    "SeriesDivergenceError",
    "PolyMatrix",
    "apply_O",
    "power_O",
    "taylor_solve",
    "TaylorResult",
]

MAX_DEGREE = 16
ORIENTATIONS = ("row", "column")


class DegreeOverflowError(OverflowError):
    pass


class SeriesDivergenceError(ArithmeticError):
    pass


def _trim(coeffs: np.ndarray) -> np.ndarray:
    k = coeffs.shape[0]
    while k > 1 and not np.any(coeffs[k - 1]):
        k -= 1
    return coeffs[:k]


@dataclass(frozen=True, eq=False)
class PolyMatrix:
    coeffs: np.ndarray
    orientation: str = "row"

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[None]
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError(f"coefficients must have shape (deg+1, n, n), got {c.shape}")
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")
        c = _trim(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- construction -------------------------------------------------------
    @classmethod
    def constant(cls, M0, orientation="row") -> "PolyMatrix":
        return cls(np.asarray(M0, dtype=complex)[None], orientation)

    @classmethod
    def from_terms(cls, terms, orientation="row") -> "PolyMatrix":
        """Build ``sum_k terms[k] z**k`` from a sequence of matrices."""
        return cls(np.array([np.asarray(t, dtype=complex) for t in terms]), orientation)

    @classmethod
    def zeros(cls, n, orientation="row") -> "PolyMatrix":
        return cls(np.zeros((1, n, n), dtype=complex), orientation)

    # -- basic properties ---------------------------------------------------
    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def with_orientation(self, orientation) -> "PolyMatrix":
        return PolyMatrix(self.coeffs, orientation)

    def transpose(self) -> "PolyMatrix":
        other = "column" if self.orientation == "row" else "row"
        return PolyMatrix(np.transpose(self.coeffs, (0, 2, 1)), other)

    def __call__(self, z):
        """Evaluate at a scalar ``z`` (Horner)."""
        out = np.zeros((self.n, self.n), dtype=complex)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out

    def at(self, z) -> np.ndarray:
        return self(z)

    def derivative(self, order: int = 1) -> "PolyMatrix":
        c = self.coeffs
        for _ in range(order):
            if c.shape[0] == 1:
                c = np.zeros_like(c)
                break
            k = np.arange(1, c.shape[0], dtype=float)
            c = c[1:] * k[:, None, None]
        return PolyMatrix(c, self.orientation)

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "PolyMatrix"):
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        if other.orientation != self.orientation:
            raise ValueError("orientation mismatch")

    def __add__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        self._check(other)
        d = max(self.degree, other.degree) + 1
        c = np.zeros((d, self.n, self.n), dtype=complex)
        c[: self.degree + 1] += self.coeffs
        c[: other.degree + 1] += other.coeffs
        return PolyMatrix(c, self.orientation)

    def __neg__(self):
        return PolyMatrix(-self.coeffs, self.orientation)

    def __sub__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self + (-other)

    def scale(self, a: complex) -> "PolyMatrix":
        return PolyMatrix(self.coeffs * a, self.orientation)

    def __rmul__(self, a):
        if np.isscalar(a):
            return self.scale(a)
        return NotImplemented

    def __matmul__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        self._check(other)
        return PolyMatrix(_polymatmul(self.coeffs, other.coeffs), self.orientation)

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scale(other)
        return self.__matmul__(other)

    def equals(self, other: "PolyMatrix", tol: float = 0.0) -> bool:
        d = max(self.degree, other.degree) + 1
        a = np.zeros((d, self.n, self.n), dtype=complex)
        b = np.zeros_like(a)
        a[: self.degree + 1] = self.coeffs
        b[: other.degree + 1] = other.coeffs
        return bool(np.abs(a - b).max() <= tol)

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max())

    # -- serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        entries = [
            [[[float(c.real), float(c.imag)] for c in self.coeffs[:, i, j]] for j in range(self.n)]
            for i in range(self.n)
        ]
        return {"n": self.n, "orientation": self.orientation, "entries": entries}

    @classmethod
    def from_json(cls, data: dict) -> "PolyMatrix":
        n = int(data["n"])
        entries = data["entries"]
        if len(entries) != n or any(len(row) != n for row in entries):
            raise ValueError(f"entries must be an {n}x{n} array of coefficient lists")
        deg = max(len(e) for row in entries for e in row) - 1
        c = np.zeros((max(deg, 0) + 1, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                for k, coef in enumerate(entries[i][j]):
                    if isinstance(coef, (list, tuple)):
                        re_, im_ = coef
                        c[k, i, j] = complex(re_, im_)
                    else:
                        c[k, i, j] = complex(coef)
        return cls(c, data.get("orientation", "row"))


def _polymatmul(a: np.ndarray, b: np.ndarray, truncate: int | None = None) -> np.ndarray:
    da, db = a.shape[0], b.shape[0]
    d = da + db - 1
    if truncate is not None:
        d = min(d, truncate + 1)
    out = np.zeros((d, a.shape[1], b.shape[2]), dtype=complex)
    for i in range(min(da, d)):
        for j in range(min(db, d - i)):
            out[i + j] += a[i] @ b[j]
    return out


def apply_O(M: PolyMatrix, X: PolyMatrix, max_degree: int | None = MAX_DEGREE, truncate: int | None = None) -> PolyMatrix:
    """One application of O = d/dz + M to ``X``.

    ``truncate`` drops coefficients above that degree (used when only values
    at z = 0 of a few further derivatives are needed); ``max_degree`` raises
    :class:`DegreeOverflowError` when the untruncated result grows past it.
    """
    M._check(X)
    if M.orientation == "row":
        prod = _polymatmul(M.coeffs, X.coeffs, truncate)
    else:
        prod = _polymatmul(X.coeffs, M.coeffs, truncate)
    dX = X.derivative().coeffs
    k = min(dX.shape[0], prod.shape[0])
    prod[:k] += dX[:k]
    result = PolyMatrix(prod, M.orientation)
    if max_degree is not None and result.degree > max_degree:
        raise DegreeOverflowError(f"degree {result.degree} exceeds cap {max_degree}")
    return result


def power_O(M: PolyMatrix, n: int, max_degree: int | None = MAX_DEGREE) -> PolyMatrix:
    """O^n M by iterated application; O^0 M = M."""
    if n < 0:
        raise ValueError("n must be non-negative")
    X = M
    for _ in range(n):
        X = apply_O(M, X, max_degree=max_degree)
    return X


@dataclass(frozen=True)
class TaylorResult:
    y: np.ndarray
    tail: float
    terms: int


def taylor_solve(M: PolyMatrix, Y0, z: float, terms: int = 80, tol: float = 1e-15) -> TaylorResult:
    """Truncated operator-series solution Y(z) = Y0 + Y0 sum O^k M(0) z^(k+1)/(k+1)!.

    Terms are added until three consecutive ones fall below ``tol`` relative
    to the running sum. If the budget runs out first and the last five term
    magnitudes are not decreasing, :class:`SeriesDivergenceError` is raised.
    """
    Y0 = as_cvector(Y0, M.n)
    y = Y0.copy()
    X = M
    mags: list[float] = []
    small = 0
    fact = 1.0
    zp = 1.0
    for k in range(terms):
        fact *= k + 1
        zp *= z
        Xk0 = X.coeffs[0]
        incr = (Y0 @ Xk0 if M.orientation == "row" else Xk0 @ Y0) * (zp / fact)
        y = y + incr
        mag = float(np.abs(incr).max())
        mags.append(mag)
        if mag <= tol * max(float(np.abs(y).max()), 1e-300):
            small += 1
            if small >= 3:
                return TaylorResult(y, mag, k + 1)
        else:
            small = 0
        # coefficients above degree (terms - k) can never reach z = 0 again
        X = apply_O(M, X, max_degree=None, truncate=terms - k)
    last = mags[-5:]
    if not all(b < a for a, b in zip(last, last[1:])):
        raise SeriesDivergenceError(f"series tail not decreasing at z={z}: last terms {last}")
    return TaylorResult(y, mags[-1], terms)
