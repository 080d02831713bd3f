"""Eigenvalues of y'' + lam (1 - t^2) y = 0 on [0, 1].

Three boundary families are supported:

* ``dirichlet``: y(0) = 0, y(1) = 0
* ``symmetric``: y even (y'(0) = 0) and y(1) = y(0)
* ``mixed``:     y(0) = 0, y'(1) = 0

Approximate eigenvalues come from the roots of characteristic functions
built on the spectral first-order solution. The phase there is the closed
form int_0^u sqrt(1 - z^2) dz = (u sqrt(1 - u^2) + arcsin u) / 2. Reference
values come from shooting with the adaptive oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .matform import ScalarODE, to_companion
from .oracle import integrate

__all__ = [
    "FAMILIES",
    "TABLES",
    "BoundarySpec",
    "EigenResult",
    "characteristic_dirichlet",
    "characteristic_symmetric",
    "characteristic_mixed",
    "wkb_eigen",
    "find_roots",
    "shoot_exact",
    "build_table",
]

FAMILIES = ("dirichlet", "symmetric", "mixed")
DEFAULT_STEP = 0.5
DEFAULT_TOL = 1e-6
SHOOT_REL_TOL = 1e-11


def _phase(u, lam):
    return 0.5 * np.sqrt(lam) * (u * np.sqrt(1.0 - u * u) + np.arcsin(u))


def _quad(g) -> float:
    return quad(g, 0.0, 1.0, limit=400, epsabs=1e-12, epsrel=1e-12)[0]


def _positive(lam):
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return float(lam)


def characteristic_dirichlet(lam: float) -> float:
    """int_0^1 (1-u^2)^(1/4) cos(phase) du; its roots approximate y(1) = 0."""
    lam = _positive(lam)
    return _quad(lambda u: (1.0 - u * u) ** 0.25 * np.cos(_phase(u, lam)))


def characteristic_symmetric(lam: float) -> float:
    """sqrt(lam) int_0^1 (1-u^2)^(1/4) sin(phase) du; roots approximate y(1) = y(0)."""
    lam = _positive(lam)
    return np.sqrt(lam) * _quad(lambda u: (1.0 - u * u) ** 0.25 * np.sin(_phase(u, lam)))


def characteristic_mixed(lam: float) -> float:
    """1 - sqrt(lam) int_0^1 (1-u^2)^(3/4) sin(phase) du, the approximate y'(1)/y'(0)."""
    lam = _positive(lam)
    return 1.0 - np.sqrt(lam) * _quad(lambda u: (1.0 - u * u) ** 0.75 * np.sin(_phase(u, lam)))


def wkb_eigen(n: int) -> float:
    """WKB eigenvalues of the Dirichlet problem: 16 n^2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(16 * n * n)


@dataclass(frozen=True)
class BoundarySpec:
    family: str

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")

    @property
    def initial(self) -> tuple[float, float]:
        return (1.0, 0.0) if self.family == "symmetric" else (0.0, 1.0)

    def residual(self, y_end: np.ndarray) -> np.ndarray:
        """Boundary residual at t = 1 from the state(s) ``(..., 2)``."""
        if self.family == "dirichlet":
            r = y_end[..., 0]
        elif self.family == "symmetric":
            r = y_end[..., 0] - self.initial[0]
        else:
            r = y_end[..., 1]
        return np.real(r)

    @property
    def characteristic(self) -> Callable[[float], float]:
        return {
            "dirichlet": characteristic_dirichlet,
            "symmetric": characteristic_symmetric,
            "mixed": characteristic_mixed,
        }[self.family]


@dataclass(frozen=True)
class EigenResult:
    n: int
    lambda_exact: float
    lambda_approx: float
    lambda_wkb: float | None = None

    @property
    def rel_error(self) -> float:
        return abs(self.lambda_exact - self.lambda_approx) / self.lambda_exact

    @property
    def wkb_rel_error(self) -> float | None:
        if self.lambda_wkb is None:
            return None
        return abs(self.lambda_exact - self.lambda_wkb) / self.lambda_exact


def find_roots(
    F: Callable,
    scan_range: tuple[float, float],
    scan_step: float = DEFAULT_STEP,
    tol: float = DEFAULT_TOL,
    vectorized: bool = False,
) -> list[float]:
    """Roots bracketed by sign changes on a uniform scan, refined by bisection.

    With ``vectorized=True``, ``F`` maps an array of points to an array of
    values and all brackets are bisected together.
    """
    lo, hi = map(float, scan_range)
    xs = lo + scan_step * np.arange(int(np.floor((hi - lo) / scan_step + 1e-9)) + 1)

    def Fv(x):
        x = np.asarray(x, dtype=float)
        if vectorized:
            return np.asarray(F(x), dtype=float)
        return np.array([F(float(v)) for v in x])

    vals = Fv(xs)
    exact = list(xs[vals == 0])
    idx = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
    a, b = xs[idx].copy(), xs[idx + 1].copy()
    fa = vals[idx].copy()
    while a.size and np.max(b - a) >= tol:
        mid = 0.5 * (a + b)
        fm = Fv(mid)
        left = fa * fm <= 0
        b = np.where(left, mid, b)
        a = np.where(left, a, mid)
        fa = np.where(left, fa, fm)
    roots = list(0.5 * (a + b)) + exact
    return sorted(float(r) for r in roots)


def _shoot_residuals(spec: BoundarySpec, lams: np.ndarray, rel_tol: float) -> np.ndarray:
    lams = np.asarray(lams, dtype=float)
    ode = ScalarODE(("lambda*(1-t^2)", 0), spec.initial, {"lambda": lams})
    system = to_companion(ode)
    traj = integrate(system, np.array(spec.initial, dtype=complex), 1.0, rel_tol=rel_tol)
    return spec.residual(traj.y_end)


def shoot_exact(
    spec: BoundarySpec | str,
    lam_range: tuple[float, float],
    tol: float = DEFAULT_TOL,
    scan_step: float = DEFAULT_STEP,
    rel_tol: float = SHOOT_REL_TOL,
) -> list[float]:
    """Eigenvalues in ``lam_range`` by shooting from t = 0 to t = 1."""
    if isinstance(spec, str):
        spec = BoundarySpec(spec)
    return find_roots(lambda x: _shoot_residuals(spec, x, rel_tol), lam_range, scan_step, tol, vectorized=True)


# table id -> (family, lambda scan range)
TABLES = {
    1: ("dirichlet", (1.0, 450.0)),
    2: ("symmetric", (1.0, 520.0)),
    3: ("mixed", (1.0, 450.0)),
}


def build_table(table_id: int, count: int = 5) -> list[EigenResult]:
    """First ``count`` eigenvalues: shooting, characteristic roots and (Dirichlet) WKB."""
    if table_id not in TABLES:
        raise ValueError(f"unknown table id {table_id}; choose from {sorted(TABLES)}")
    family, rng = TABLES[table_id]
    spec = BoundarySpec(family)
    exact = shoot_exact(spec, rng)
    approx = find_roots(spec.characteristic, rng)
    if len(exact) < count or len(approx) < count:
        raise RuntimeError(f"found {len(exact)} exact and {len(approx)} approximate roots, need {count}")
    rows = []
    for n in range(1, count + 1):
        w = wkb_eigen(n) if family == "dirichlet" else None
        rows.append(EigenResult(n, exact[n - 1], approx[n - 1], w))
    return rows
