"""Reference integrator for linear systems Y' = M(t) Y (or Y' = Y M(t)).

Adaptive Dormand-Prince 5(4) with local extrapolation and cubic Hermite
dense output. ``system(t)`` may return one matrix ``(n, n)`` or a batch
``(B, n, n)`` to integrate many independent systems with a shared step
sequence; the error norm is then the worst member's.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "DEFAULT_REL_TOL",
    "StepSizeUnderflowError",
    "SingularCoefficientError",
    "Trajectory",
    "integrate",
    "solve_at",
]

DEFAULT_REL_TOL = 1e-10

# Dormand & Prince (1980) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class StepSizeUnderflowError(ArithmeticError):
    def __init__(self, t: float, h: float):
        self.t = t
        self.h = h
        super().__init__(f"step size underflow at t={t!r} (h={h:.3e})")


class SingularCoefficientError(ArithmeticError):
    def __init__(self, t: float):
        self.t = t
        super().__init__(f"non-finite system matrix at t={t!r}")


@dataclass
class Trajectory:
    """Accepted step points, states, derivatives and per-step error estimates."""

    t: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    errors: np.ndarray
    accepted: int
    rejected: int

    @property
    def y_end(self) -> np.ndarray:
        return self.y[-1]

    def __call__(self, tq) -> np.ndarray:
        """Dense output by cubic Hermite interpolation between step points."""
        tq = np.asarray(tq, dtype=float)
        scalar = tq.ndim == 0
        tq = np.atleast_1d(tq)
        t = self.t
        forward = t[-1] >= t[0]
        ts = t if forward else t[::-1]
        lo, hi = min(ts[0], ts[-1]), max(ts[0], ts[-1])
        if np.any(tq < lo - 1e-12 * max(1.0, abs(lo))) or np.any(tq > hi + 1e-12 * max(1.0, abs(hi))):
            raise ValueError("query time outside the integrated interval")
        idx = np.clip(np.searchsorted(ts, tq, side="right") - 1, 0, len(ts) - 2)
        if not forward:
            idx = len(t) - 2 - idx
        t0, t1 = t[idx], t[idx + 1]
        h = t1 - t0
        s = (tq - t0) / h
        shp = (-1,) + (1,) * (self.y.ndim - 1)
        s = s.reshape(shp)
        hh = h.reshape(shp)
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        out = (
            h00 * self.y[idx]
            + h10 * hh * self.dy[idx]
            + h01 * self.y[idx + 1]
            + h11 * hh * self.dy[idx + 1]
        )
        return out[0] if scalar else out

    def to_csv(self, path, times=None):
        times = self.t if times is None else np.asarray(times, dtype=float)
        values = self(times)
        values = values.reshape(len(times), -1)
        header = ["t"]
        for i in range(values.shape[1]):
            header += [f"re_y{i}", f"im_y{i}"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for ti, row in zip(times, values):
                cells = [repr(float(ti))]
                for v in row:
                    cells += [repr(float(v.real)), repr(float(v.imag))]
                w.writerow(cells)


def _rhs(system, t, y, row):
    M = np.asarray(system(t), dtype=complex)
    if not np.all(np.isfinite(M)):
        raise SingularCoefficientError(float(t))
    if row:
        return np.einsum("...i,...ij->...j", y, M)
    return np.einsum("...ij,...j->...i", M, y)


def _norm(v, scale):
    return np.abs(v).reshape(v.shape[0] if v.ndim > 1 else 1, -1).max(axis=1) / scale


def integrate(
    system: Callable[[float], np.ndarray],
    y0,
    t_end: float,
    rel_tol: float = DEFAULT_REL_TOL,
    orientation: str = "column",
    t0: float = 0.0,
    abs_tol: float = 0.0,
    first_step: float | None = None,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Integrate from ``t0`` to ``t_end`` (either direction).

    The error of each step is measured per system against
    ``rel_tol * max(|Y_old|_inf, |Y_new|_inf) + abs_tol``.
    """
    if rel_tol < 1e-13:
        raise ValueError("rel_tol below 1e-13 is not supported")
    if orientation not in ("row", "column"):
        raise ValueError("orientation must be 'row' or 'column'")
    row = orientation == "row"
    y = np.array(y0, dtype=complex)
    batched = y.ndim > 1
    span = float(t_end) - float(t0)
    direction = 1.0 if span >= 0 else -1.0
    t = float(t0)
    f = _rhs(system, t, y, row)
    if f.shape != y.shape:
        # batched parameters with an unbatched initial state
        y = np.broadcast_to(y, f.shape).copy()
        batched = True
    ts, ys, dys, errs = [t], [y.copy()], [f.copy()], [0.0]
    if span == 0:
        return Trajectory(np.array(ts), np.array(ys), np.array(dys), np.array(errs), 0, 0)

    def scale_of(a, b):
        na = np.abs(a).reshape(a.shape[0] if batched else 1, -1).max(axis=1)
        nb = np.abs(b).reshape(b.shape[0] if batched else 1, -1).max(axis=1)
        sc = rel_tol * np.maximum(na, nb) + abs_tol
        return np.where(sc > 0, sc, rel_tol)

    if first_step is None:
        # Hairer, Norsett & Wanner starting-step heuristic
        sc = scale_of(y, y)
        d0 = _norm(y, sc).max()
        d1 = _norm(f, sc).max()
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        y1 = y + direction * h0 * f
        f1 = _rhs(system, t + direction * h0, y1, row)
        d2 = _norm(f1 - f, sc).max() / h0
        h1 = max(1e-6, h0 * 1e-3) if max(d1, d2) <= 1e-15 else (0.01 / max(d1, d2)) ** 0.2
        h = min(100 * h0, h1, abs(span))
    else:
        h = min(abs(first_step), abs(span))

    accepted = rejected = 0
    K = [None] * 7
    while direction * (t_end - t) > 0:
        if accepted + rejected >= max_steps:
            raise RuntimeError(f"step budget exhausted at t={t}")
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepSizeUnderflowError(t, h)
        last = h >= abs(t_end - t)
        if last:
            h = abs(t_end - t)
        hs = direction * h
        K[0] = f
        for i in range(1, 7):
            yi = y + hs * sum(a * K[j] for j, a in enumerate(_A[i]) if a != 0.0)
            K[i] = _rhs(system, t + _C[i] * hs, yi, row)
        y_new = y + hs * sum(b * K[j] for j, b in enumerate(_B5) if b != 0.0)
        err_vec = hs * sum(e * K[j] for j, e in enumerate(_E))
        err = float(_norm(err_vec, scale_of(y, y_new)).max())
        if err <= 1.0:
            t = float(t_end) if last else t + hs
            y = y_new
            f = K[6]
            accepted += 1
            ts.append(t)
            ys.append(y.copy())
            dys.append(f.copy())
            errs.append(err * rel_tol)
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            rejected += 1
            fac = max(0.2, 0.9 * err ** -0.2)
        h = h * fac
    return Trajectory(np.array(ts), np.array(ys), np.array(dys), np.array(errs), accepted, rejected)


def solve_at(system, y0, times, t0: float = 0.0, rel_tol: float = DEFAULT_REL_TOL, orientation: str = "column") -> np.ndarray:
    """States at each of ``times`` (sorted), integrating outward from ``t0``.

    Each requested time is hit exactly by the step sequence, so no dense
    output interpolation error enters.
    """
    times = np.asarray(times, dtype=float)
    y0 = np.array(y0, dtype=complex)
    out = np.empty((len(times),) + y0.shape, dtype=complex)
    forward = np.nonzero(times >= t0)[0]
    backward = np.nonzero(times < t0)[0][::-1]
    for idx in (forward, backward):
        t, y = float(t0), y0
        for i in idx:
            y = integrate(system, y, times[i], rel_tol, orientation, t0=t).y_end
            t = float(times[i])
            out[i] = y
    return out
