"""Spectral (eigenvector-expansion) approximations for Y' = M(t) Y.

For the scalar equation y'' = f(t) y the companion matrix [[0, 1], [f, 0]]
has eigenvalues +-sqrt(f) and the biorthonormal pair

    |1> = N (1,  sqrt f),   <1~| = N (sqrt f,  1),
    |2> = N (1, -sqrt f),   <2~| = N (sqrt f, -1),   N = 1 / (sqrt 2 f^(1/4)).

Expanding Y in that basis and dropping the inter-mode coupling gives the
first-order approximation; keeping the coupling to first order gives the
correction. Every root is a principal branch, and the products lambda N are
written as powers of f^(1/4) so the integrands stay finite where f -> 0.

All integrals run from the anchor ``t0`` on the fine grid of
:mod:`varode.quadrature`, and each result is recomputed on the half-density
grid to estimate the quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .expr import differentiate, evaluate, parse
from .linalg import DefectiveMatrixError, as_cvector, eig_general_batch
from .quadrature import Branch, build_branches, cumulative_simpson

__all__ = [
    "TURNING_TOL",
    "DEFLATE_TOL",
    "DEFAULT_QUAD_TOL",
    "TurningPointError",
    "QuadratureError",
    "TrackingError",
    "GaugeError",
    "ApproxSolution",
    "companion_eigensystem",
    "expansion_coefficients",
    "approx_first_order",
    "correction",
    "corrected_first_order",
    "approx_wkb_form",
    "wkb",
    "general_first_order",
]

TURNING_TOL = 1e-14
DEFLATE_TOL = 1e-12
DEFAULT_QUAD_TOL = 1e-6
_SQRT2 = np.sqrt(2.0)


class TurningPointError(ValueError):
    def __init__(self, t, msg: str | None = None):
        self.t = t
        super().__init__(msg or f"f vanishes (turning point) at t={t!r}")


class QuadratureError(ArithmeticError):
    pass


class TrackingError(ArithmeticError):
    pass


class GaugeError(ArithmeticError):
    pass


@dataclass
class ApproxSolution:
    """Approximate state on the output grid.

    ``values[:, 0]`` is y and ``values[:, 1]`` its derivative (for the
    scalar methods); ``quad_error`` is the fine/coarse discrepancy.
    """

    t: np.ndarray
    values: np.ndarray
    panels: int
    quad_error: float
    divergent: np.ndarray | None = None
    validity_ratio: np.ndarray | None = None
    biorthogonality_error: float | None = None

    @property
    def y(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def ydot(self) -> np.ndarray:
        return self.values[:, 1]

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag_residual(self) -> float:
        v = self.values.imag
        return float(np.nanmax(np.abs(v))) if np.any(np.isfinite(v)) else 0.0


# ---------------------------------------------------------------------------
# helpers


def _root4(F: np.ndarray) -> np.ndarray:
    F = np.asarray(F, dtype=complex) + 0j
    with np.errstate(all="ignore"):
        return np.where(F == 0, 0j, np.power(F, 0.25))


def _prepare(f, params):
    f = parse(f)
    fdot = differentiate(f)
    params = dict(params or {})

    def fv(t):
        return np.asarray(evaluate(f, t, params), dtype=complex) + 0j

    def dfv(t):
        return np.asarray(evaluate(fdot, t, params), dtype=complex) + 0j

    return fv, dfv


def _run(t_grid, t0, ppu, quad_tol, core: Callable[[Branch], np.ndarray], check: bool = True):
    branches, t = build_branches(t_grid, t0, ppu)
    out = None
    err = 0.0
    panels = 0
    for br in branches:
        fine = core(br)
        if out is None:
            out = np.full((len(t),) + fine.shape[1:], np.nan + 0j)
        out[br.target_position] = fine
        panels += br.panels
        if check:
            coarse = core(br.coarse())
            diff = np.abs(fine - coarse)
            if np.any(np.isfinite(diff)):
                err = max(err, float(np.nanmax(diff)))
    finite = np.abs(out[np.isfinite(out)])
    scale = max(1.0, float(finite.max())) if finite.size else 1.0
    if check and quad_tol is not None and err > quad_tol * scale:
        raise QuadratureError(
            f"quadrature not converged: fine/coarse difference {err:.3e} exceeds {quad_tol:.1e} x {scale:.3g}"
        )
    return t, out, panels, err


def _turning_node(F: np.ndarray, dF: np.ndarray, nodes: np.ndarray):
    """First node where f vanishes or its tangent line reaches zero within one spacing."""
    h = np.abs(np.gradient(nodes)) if len(nodes) > 1 else np.ones(1)
    bad = (np.abs(F) < TURNING_TOL) | (np.abs(F) <= h * np.abs(dF))
    return float(nodes[np.argmax(bad)]) if np.any(bad) else None


def _anchor_value(fv, t0):
    F0 = complex(fv(np.array([t0]))[0])
    if abs(F0) < TURNING_TOL:
        raise TurningPointError(t0, f"f vanishes at the anchor t0={t0!r}; move the anchor")
    return F0


# ---------------------------------------------------------------------------
# companion basis


def companion_eigensystem(f, t, params=None):
    """Eigenvalues and biorthonormal vectors of [[0, 1], [f, 0]] at ``t``.

    Returns ``(lam, right, left)`` with ``lam[..., k]``, ``right[..., :, k]``
    and ``left[..., k, :]`` for k = 0 (+sqrt f) and 1 (-sqrt f).
    """
    fv, _ = _prepare(f, params)
    F = fv(np.asarray(t, dtype=float))
    if np.any(np.abs(F) < TURNING_TOL):
        bad = np.asarray(t, dtype=float).reshape(-1)[np.argmax(np.abs(F).reshape(-1) < TURNING_TOL)]
        raise TurningPointError(float(bad))
    q = _root4(F)
    s = q * q
    N = 1.0 / (_SQRT2 * q)
    lam = np.stack([s, -s], axis=-1)
    right = np.stack([np.stack([N, N * s], -1), np.stack([N, -N * s], -1)], axis=-1)
    left = np.stack([np.stack([N * s, N], -1), np.stack([N * s, -N], -1)], axis=-2)
    return lam, right, left


def expansion_coefficients(f, a, b, t0: float = 0.0, params=None) -> tuple[complex, complex]:
    """c_k = <k~(t0)| (a, b) in the companion basis."""
    fv, _ = _prepare(f, params)
    F0 = _anchor_value(fv, t0)
    q0 = complex(_root4(F0))
    N0 = 1.0 / (_SQRT2 * q0)
    s0 = q0 * q0
    return N0 * (s0 * a + b), N0 * (s0 * a - b)


# ---------------------------------------------------------------------------
# scalar second-order equation


def _first_order_parts(fv, dfv, a, b, t0, with_correction):
    F0 = _anchor_value(fv, t0)
    q0 = complex(_root4(F0))
    s0 = q0 * q0
    N0 = 1.0 / (_SQRT2 * q0)
    c1 = N0 * (s0 * a + b)
    c2 = N0 * (s0 * a - b)

    def core(br: Branch) -> np.ndarray:
        F = fv(br.nodes)
        q = _root4(F)
        Phi = cumulative_simpson(q * q, br.h_pairs)
        ch, sh = np.cosh(Phi), np.sinh(Phi)
        gy = q / q0 * (a * s0 * sh + b * ch)
        gd = q**3 / q0 * (a * s0 * ch + b * sh)
        Y = cumulative_simpson(np.stack([gy, gd], -1), br.h_pairs) + np.array([a, b], dtype=complex)
        if not with_correction:
            return Y[br.target_index]
        dF = dfv(br.nodes)
        small = np.abs(F) < DEFLATE_TOL
        with np.errstate(all="ignore"):
            w = np.where(small, 0j, dF / (4.0 * np.where(small, 1.0, F)))
        ep, em = np.exp(Phi), np.exp(-Phi)
        I2 = cumulative_simpson(w * em * em, br.h_pairs)
        I1 = cumulative_simpson(w * ep * ep, br.h_pairs)
        up = ep * I2 * c2
        dn = em * I1 * c1
        dy = q / _SQRT2 * (up - dn)
        dd = q**3 / _SQRT2 * (up + dn)
        dY = cumulative_simpson(np.stack([dy, dd], -1), br.h_pairs)
        return np.concatenate([Y, dY], axis=-1)[br.target_index]

    return core


def approx_first_order(
    f, a, b, t_grid, params=None, t0: float = 0.0, panels_per_unit: int | None = None, quad_tol=DEFAULT_QUAD_TOL
) -> ApproxSolution:
    """First-order spectral approximation to y'' = f y, y(t0) = a, y'(t0) = b.

        y(t)  = a + int (f/f0)^(1/4) (a sqrt(f0) sinh Phi + b cosh Phi)
        y'(t) = b + int f^(3/4) f0^(-1/4) (a sqrt(f0) cosh Phi + b sinh Phi)

    with Phi(u) = int_{t0}^u sqrt(f).
    """
    fv, dfv = _prepare(f, params)
    core = _first_order_parts(fv, dfv, complex(a), complex(b), t0, False)
    t, out, panels, err = _run(t_grid, t0, panels_per_unit, quad_tol, core)
    return ApproxSolution(t, out, panels, err)


def corrected_first_order(
    f, a, b, t_grid, params=None, t0: float = 0.0, panels_per_unit: int | None = None, quad_tol=DEFAULT_QUAD_TOL
) -> tuple[ApproxSolution, ApproxSolution]:
    """First-order approximation and the same plus its first correction.

    The second result carries ``validity_ratio`` = |dY| / |Y1| per output
    time; the correction is only meaningful while that stays small.
    """
    fv, dfv = _prepare(f, params)
    core = _first_order_parts(fv, dfv, complex(a), complex(b), t0, True)
    t, out, panels, err = _run(t_grid, t0, panels_per_unit, quad_tol, core)
    Y1, dY = out[:, :2], out[:, 2:]
    with np.errstate(all="ignore"):
        ratio = np.linalg.norm(dY, axis=1) / np.linalg.norm(Y1, axis=1)
    return ApproxSolution(t, Y1, panels, err), ApproxSolution(t, Y1 + dY, panels, err, validity_ratio=ratio)


def correction(
    f, c1, c2, t_grid, params=None, t0: float = 0.0, panels_per_unit: int | None = None, quad_tol=DEFAULT_QUAD_TOL
) -> ApproxSolution:
    """The first-order correction dY alone, from expansion coefficients ``c1, c2``.

    dY(t) = int du sqrt(f(u)) [ e^{Phi(u)} c2 I2(u) |1(u)> - e^{-Phi(u)} c1 I1(u) |2(u)> ]
    with I2 = int f'/(4f) e^{-2 Phi}, I1 = int f'/(4f) e^{2 Phi}. Nodes where
    |f| < DEFLATE_TOL contribute nothing to the inner integrals.
    """
    fv, _ = _prepare(f, params)
    q0 = complex(_root4(_anchor_value(fv, t0)))
    N0 = 1.0 / (_SQRT2 * q0)
    # invert c1 = N0 (s0 a + b), c2 = N0 (s0 a - b)
    a = (c1 + c2) / (2.0 * N0 * q0 * q0)
    b = (c1 - c2) / (2.0 * N0)
    first, corrected = corrected_first_order(f, a, b, t_grid, params, t0, panels_per_unit, quad_tol)
    return ApproxSolution(
        first.t, corrected.values - first.values, first.panels, first.quad_error,
        validity_ratio=corrected.validity_ratio,
    )


def approx_wkb_form(
    f, a, b, t_grid, params=None, t0: float = 0.0, panels_per_unit: int | None = None, quad_tol=DEFAULT_QUAD_TOL
) -> ApproxSolution:
    """The first-order approximation rewritten by parts as WKB plus a remainder.

    With A = f0^(1/4) a and B = b / f0^(1/4):

        y  = f^(-1/4) (A cosh Phi + B sinh Phi) + 1/4 int f' f^(-5/4) (A cosh Phi + B sinh Phi)
        y' = f^(1/4)  (A sinh Phi + B cosh Phi) - 1/4 int f' f^(-3/4) (A sinh Phi + B cosh Phi)

    Requires f to stay away from zero on the whole integration path.
    """
    fv, dfv = _prepare(f, params)
    a, b = complex(a), complex(b)
    q0 = complex(_root4(_anchor_value(fv, t0)))
    A, B = q0 * a, b / q0

    def core(br: Branch) -> np.ndarray:
        F = fv(br.nodes)
        dF = dfv(br.nodes)
        tp = _turning_node(F, dF, br.nodes)
        if tp is not None:
            raise TurningPointError(tp)
        q = _root4(F)
        Phi = cumulative_simpson(q * q, br.h_pairs)
        ch, sh = np.cosh(Phi), np.sinh(Phi)
        u = A * ch + B * sh
        v = A * sh + B * ch
        rem = cumulative_simpson(np.stack([dF * u / q**5, dF * v / q**3], -1), br.h_pairs)
        y = u / q + 0.25 * rem[:, 0]
        yd = q * v - 0.25 * rem[:, 1]
        return np.stack([y, yd], -1)[br.target_index]

    t, out, panels, err = _run(t_grid, t0, panels_per_unit, quad_tol, core)
    return ApproxSolution(t, out, panels, err)


def wkb(
    f,
    t_grid,
    a=1.0,
    b=0.0,
    params=None,
    t0: float = 0.0,
    panels_per_unit: int | None = None,
    quad_tol=DEFAULT_QUAD_TOL,
    on_turning_point: str = "flag",
) -> ApproxSolution:
    """Leading WKB form y = (f0/f)^(1/4) [a cosh Phi + b / sqrt(f0) sinh Phi].

    Output times with |f| < TURNING_TOL are NaN and marked in ``divergent``
    (or raise with ``on_turning_point="raise"``). ``values`` has one column.
    """
    if on_turning_point not in ("flag", "raise"):
        raise ValueError("on_turning_point must be 'flag' or 'raise'")
    fv, _ = _prepare(f, params)
    a, b = complex(a), complex(b)
    q0 = complex(_root4(_anchor_value(fv, t0)))
    s0 = q0 * q0

    def core(br: Branch) -> np.ndarray:
        F = fv(br.nodes)
        q = _root4(F)
        Phi = cumulative_simpson(q * q, br.h_pairs)
        idx = br.target_index
        qi = q[idx]
        bad = np.abs(F[idx]) < TURNING_TOL
        with np.errstate(all="ignore"):
            y = q0 / np.where(bad, 1.0, qi) * (a * np.cosh(Phi[idx]) + b / s0 * np.sinh(Phi[idx]))
        return np.where(bad, np.nan, y)[:, None]

    t, out, panels, err = _run(t_grid, t0, panels_per_unit, quad_tol, core)
    divergent = ~np.isfinite(out[:, 0])
    if on_turning_point == "raise" and np.any(divergent):
        raise TurningPointError(float(t[np.argmax(divergent)]))
    return ApproxSolution(t, out, panels, err, divergent=divergent)


# ---------------------------------------------------------------------------
# general n x n systems


def _track(values: np.ndarray) -> np.ndarray:
    """Permutation per node that follows each eigenvalue to its nearest successor."""
    m, n = values.shape
    order = np.empty((m, n), dtype=int)
    order[0] = np.arange(n)
    prev = values[0]
    for j in range(1, m):
        d = np.abs(values[j][None, :] - prev[:, None])
        perm = np.argmin(d, axis=1)
        if len(set(perm.tolist())) < n:
            raise TrackingError("eigenvalue tracking is ambiguous; branches come too close")
        order[j] = perm
        prev = values[j][perm]
    return order


def _fd_derivative(system, h_rel=1e-5):
    def dsys(t):
        t = np.asarray(t, dtype=float)
        h = h_rel * np.maximum(1.0, np.abs(t))
        hh = h.reshape(h.shape + (1, 1))
        return (np.asarray(system(t + h)) - np.asarray(system(t - h))) / (2.0 * hh)

    return dsys


def _spectral_path(Ms: np.ndarray, dMs: np.ndarray, h_pairs: np.ndarray):
    """Tracked eigenvalues and eigenvectors in the transported gauge <n~|dn> = 0.

    Each eigenvector is first fixed by setting its largest component at the
    anchor to one; the gauge connection in that normalisation follows from
    first-order perturbation theory and is integrated to give the factor G.
    """
    try:
        vals, R, L = eig_general_batch(Ms)
    except DefectiveMatrixError as exc:
        raise TrackingError(f"eigenvalues collide on the path: {exc}") from None
    order = _track(vals)
    vals = np.take_along_axis(vals, order, axis=1)
    R = np.take_along_axis(R, order[:, None, :], axis=2)
    L = np.take_along_axis(L, order[:, :, None], axis=1)
    n = vals.shape[1]
    cols = np.arange(n)
    idx = np.argmax(np.abs(R[0]), axis=0)
    piv = R[:, idx, cols]
    if np.any(np.abs(piv) < 1e-8 * np.linalg.norm(R, axis=1)):
        raise GaugeError("normalising eigenvector component passes through zero")
    C = L @ dMs @ R
    denom = vals[:, None, :] - vals[:, :, None]  # lambda_k - lambda_k'
    np.einsum("mii->mi", denom)[:] = 1.0
    K = C / denom
    np.einsum("mii->mi", K)[:] = 0.0
    P = R @ K
    conn = -P[:, idx, cols] / piv
    G = np.exp(-cumulative_simpson(conn, h_pairs))
    right = R / piv[:, None, :] * G[:, None, :]
    left = L * piv[:, :, None] / G[:, :, None]
    return vals, right, left


def general_first_order(
    system,
    Y0,
    t_grid,
    t0: float = 0.0,
    dsystem=None,
    orientation: str = "column",
    correction: bool = False,
    panels_per_unit: int | None = None,
    quad_tol=DEFAULT_QUAD_TOL,
) -> ApproxSolution:
    """First-order spectral approximation for an n x n system.

    ``system(t)`` maps an array of times to ``(m, n, n)`` matrices. The
    derivative comes from ``dsystem``, a ``derivative_batch`` method, or
    central differences. With ``correction=True`` the first inter-mode
    correction is added and ``validity_ratio`` is filled in.
    """
    if dsystem is None:
        dsystem = getattr(system, "derivative_batch", None) or _fd_derivative(system)
    Y0 = as_cvector(Y0)
    row = orientation == "row"
    bio = [0.0]

    def mats(fn, t):
        A = np.asarray(fn(t), dtype=complex)
        return np.swapaxes(A, -1, -2) if row else A

    def core(br: Branch) -> np.ndarray:
        vals, right, left = _spectral_path(mats(system, br.nodes), mats(dsystem, br.nodes), br.h_pairs)
        n = vals.shape[1]
        bio[0] = max(bio[0], float(np.abs(left @ right - np.eye(n)).max()))
        c = left[0] @ Y0
        Phi = cumulative_simpson(vals, br.h_pairs)
        e = np.exp(Phi)
        integrand = np.einsum("mik,mk->mi", right, c * vals * e)
        Y = Y0 + cumulative_simpson(integrand, br.h_pairs)
        if not correction:
            return Y[br.target_index]
        Cn = left @ mats(dsystem, br.nodes) @ right
        gap = vals[:, :, None] - vals[:, None, :]  # lambda_n - lambda_k
        np.einsum("mii->mi", gap)[:] = 1.0
        W = Cn / gap
        np.einsum("mii->mi", W)[:] = 0.0
        with np.errstate(all="ignore"):
            ratio = e[:, None, :] / e[:, :, None]  # e^{Phi_k - Phi_n}
        inner = cumulative_simpson(W * c[None, None, :] * ratio, br.h_pairs).sum(axis=2)
        outer = np.einsum("mik,mk->mi", right, vals * e * inner)
        dY = cumulative_simpson(outer, br.h_pairs)
        return np.concatenate([Y, dY], axis=-1)[br.target_index]

    t, out, panels, err = _run(t_grid, t0, panels_per_unit, quad_tol, core)
    if not correction:
        return ApproxSolution(t, out, panels, err, biorthogonality_error=bio[0])
    n = len(Y0)
    Y1, dY = out[:, :n], out[:, n:]
    with np.errstate(all="ignore"):
        vr = np.linalg.norm(dY, axis=1) / np.linalg.norm(Y1, axis=1)
    return ApproxSolution(t, Y1 + dY, panels, err, validity_ratio=vr, biorthogonality_error=bio[0])
