"""Time-dependent Hermitian generators: i psi' = H(t) psi (hbar = 1).

Propagation by a Trotter product of exact short-time unitaries, and three
eigenbasis approximations built on the instantaneous eigenstates |n(t)>:

* ``first_order``: psi0 + sum_n int c_n (-i E_n) e^{-i int E_n} |n(u)> du
* ``adiabatic_approx``: sum_n c_n e^{-i int E_n} |n(t)>
* ``adiabatic_correction``: the inter-level transition increment dpsi that
  corrects ``first_order``, driven by <dn|k> = <n|H'|k> / (E_n - E_k).

Eigenvectors are gauge-fixed per time so that a chosen component is real and
positive; jumps of that gauge between neighbouring nodes raise
:class:`GaugeDiscontinuityError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .expr import differentiate, evaluate, parse
from .linalg import MAX_DIM, NonHermitianError, as_cvector
from .oracle import DEFAULT_REL_TOL, integrate
from .quadrature import Branch, build_branches, cumulative_simpson
from .spectral import DEFAULT_QUAD_TOL, QuadratureError

__all__ = [
    "HERMITIAN_TOL",
    "GAP_TOL",
    "GAUGES",
    "GapCollapseError",
    "GaugeDiscontinuityError",
    "HamiltonianFamily",
    "QuantumState",
    "AdiabaticResult",
    "CATALOG",
    "from_catalog",
    "from_entries",
    "trotter_propagate",
    "instantaneous_basis",
    "oracle_propagate",
    "adiabatic_analysis",
    "first_order",
    "adiabatic_approx",
    "adiabatic_correction",
]

HERMITIAN_TOL = 1e-12
GAP_TOL = 1e-8
GAUGES = ("first-nonzero", "largest")


class GapCollapseError(ArithmeticError):
    pass


class GaugeDiscontinuityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class HamiltonianFamily:
    """``matrix(t)`` maps an array of times ``(m,)`` to ``(m, n, n)``."""

    n: int
    matrix: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "custom"

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIM:
            raise ValueError(f"dimension must be between 1 and {MAX_DIM}")

    def batch(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        H = np.asarray(self.matrix(t), dtype=complex)
        scale = max(1.0, float(np.abs(H).max()))
        if np.abs(H - np.swapaxes(H.conj(), -1, -2)).max() > HERMITIAN_TOL * scale:
            raise NonHermitianError(f"{self.name}: H(t) is not Hermitian")
        return H

    def derivative_batch(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.derivative is not None:
            return np.asarray(self.derivative(t), dtype=complex)
        h = 1e-5 * np.maximum(1.0, np.abs(t))
        return (self.batch(t + h) - self.batch(t - h)) / (2.0 * h)[:, None, None]

    def __call__(self, t) -> np.ndarray:
        return self.batch(np.asarray([t], dtype=float))[0]


@dataclass(frozen=True)
class QuantumState:
    amplitudes: np.ndarray
    t: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


# ---------------------------------------------------------------------------
# catalog

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def _landau_zener(tau=1.0, delta=0.5, bias=1.0):
    def H(t):
        return (t / tau - bias)[:, None, None] * _SZ + delta * _SX

    def dH(t):
        return np.broadcast_to(_SZ / tau, (len(t), 2, 2)).copy()

    return HamiltonianFamily(2, H, dH, "landau_zener")


def _diag_linear(rate=1.0):
    def H(t):
        return (rate * t)[:, None, None] * _SZ

    def dH(t):
        return np.broadcast_to(rate * _SZ, (len(t), 2, 2)).copy()

    return HamiltonianFamily(2, H, dH, "diag_linear")


def _pauli_x(omega=1.0):
    def H(t):
        return np.broadcast_to(omega * _SX, (len(t), 2, 2)).copy()

    def dH(t):
        return np.zeros((len(t), 2, 2), dtype=complex)

    return HamiltonianFamily(2, H, dH, "pauli_x")


def _rotating_field(field=1.0, omega=0.2, detuning=1.0):
    # complex Hermitian: transverse field rotating in the x-y plane
    def H(t):
        c, s = np.cos(omega * t), np.sin(omega * t)
        return field * (c[:, None, None] * _SX + s[:, None, None] * _SY) + detuning * _SZ

    def dH(t):
        c, s = np.cos(omega * t), np.sin(omega * t)
        return field * omega * (-s[:, None, None] * _SX + c[:, None, None] * _SY)

    return HamiltonianFamily(2, H, dH, "rotating_field")


CATALOG = {
    "landau_zener": _landau_zener,
    "diag_linear": _diag_linear,
    "pauli_x": _pauli_x,
    "rotating_field": _rotating_field,
}


def from_catalog(name: str, **params) -> HamiltonianFamily:
    if name not in CATALOG:
        raise KeyError(f"unknown Hamiltonian {name!r}; choose from {sorted(CATALOG)}")
    return CATALOG[name](**params)


def from_entries(entries, params=None, name: str = "entries") -> HamiltonianFamily:
    """Family from an n x n array of expression strings in ``t``."""
    exprs = [[parse(e) for e in row] for row in entries]
    n = len(exprs)
    if any(len(row) != n for row in exprs):
        raise ValueError("entries must form a square array")
    dexprs = [[differentiate(e) for e in row] for row in exprs]
    params = dict(params or {})

    def build(table):
        def fn(t):
            out = np.zeros((len(t), n, n), dtype=complex)
            for i in range(n):
                for j in range(n):
                    out[:, i, j] = evaluate(table[i][j], t, params)
            return out

        return fn

    return HamiltonianFamily(n, build(exprs), build(dexprs), name)


# ---------------------------------------------------------------------------
# propagation


def trotter_propagate(H: HamiltonianFamily, psi0, t: float, N: int) -> QuantumState:
    """prod_{j=1..N} exp(-i (t/N) H(j t/N)) psi0, with j = 1 applied first."""
    if N < 1:
        raise ValueError("N must be >= 1")
    psi = as_cvector(psi0, H.n).copy()
    dt = t / N
    E, V = np.linalg.eigh(H.batch(dt * np.arange(1, N + 1)))
    phase = np.exp(-1j * dt * E)
    for j in range(N):
        v = V[j]
        psi = v @ (phase[j] * (v.conj().T @ psi))
    return QuantumState(psi, float(t))


def oracle_propagate(H: HamiltonianFamily, psi0, t: float, rel_tol: float = DEFAULT_REL_TOL) -> QuantumState:
    """Adaptive integration of psi' = -i H(t) psi."""
    traj = integrate(lambda s: -1j * H(s), as_cvector(psi0, H.n), t, rel_tol=rel_tol)
    return QuantumState(traj.y_end, float(t))


# ---------------------------------------------------------------------------
# eigenbasis approximations


@dataclass
class AdiabaticResult:
    """Eigenbasis approximations on the output times.

    ``diagonal_max`` is the largest |<dn|n>| along the grid, the coupling a
    diagonal (k = n) transition term would carry under the fixed gauge.
    """

    t: np.ndarray
    adiabatic: np.ndarray
    first_order: np.ndarray
    correction: np.ndarray
    validity_ratio: np.ndarray
    diagonal_max: float
    min_gap: float
    quad_error: float
    panels: int


def _fix_gauge(V: np.ndarray, gauge: str) -> np.ndarray:
    m, n, _ = V.shape
    mag = np.abs(V)
    if gauge == "largest":
        idx = np.argmax(mag[0], axis=0)
        idx = np.broadcast_to(idx, (m, n))
    else:
        idx = np.argmax(mag > 1e-8, axis=1)
    piv = np.take_along_axis(V, idx[:, None, :], axis=1)[:, 0, :]
    V = V * (np.abs(piv) / piv)[:, None, :]
    return V, idx


def _check_continuity(V: np.ndarray):
    ov = np.einsum("mik,mik->mk", V[:-1].conj(), V[1:])
    if np.any(np.abs(ov) < 0.5) or np.any(np.abs(np.angle(ov)) > 0.5):
        j = int(np.argmax((np.abs(ov) < 0.5) | (np.abs(np.angle(ov)) > 0.5)) // V.shape[2])
        raise GaugeDiscontinuityError(f"eigenvector gauge jumps between grid nodes {j} and {j + 1}")


def _eigen_path(H: HamiltonianFamily, nodes: np.ndarray, gauge: str):
    E, V = np.linalg.eigh(H.batch(nodes))
    n = E.shape[1]
    gap = float(np.diff(E, axis=1).min()) if n > 1 else np.inf
    if gap < GAP_TOL:
        raise GapCollapseError(f"spectral gap {gap:.3e} below {GAP_TOL:g}")
    V, idx = _fix_gauge(V, gauge)
    _check_continuity(V)
    return E, V, idx, gap


def instantaneous_basis(H: HamiltonianFamily, t, gauge: str = "first-nonzero"):
    """Ascending energies ``(m, n)`` and gauge-fixed eigenvectors ``(m, n, n)`` (columns) at times ``t``."""
    if gauge not in GAUGES:
        raise ValueError(f"gauge must be one of {GAUGES}")
    E, V, _, _ = _eigen_path(H, np.atleast_1d(np.asarray(t, dtype=float)), gauge)
    return E, V


def adiabatic_analysis(
    H: HamiltonianFamily,
    psi0,
    t_grid,
    gauge: str = "first-nonzero",
    panels_per_unit: int | None = None,
    quad_tol=DEFAULT_QUAD_TOL,
) -> AdiabaticResult:
    """All eigenbasis approximations on ``t_grid`` (times from 0)."""
    if gauge not in GAUGES:
        raise ValueError(f"gauge must be one of {GAUGES}")
    psi0 = as_cvector(psi0, H.n)
    diag = [0.0]
    gaps = [np.inf]

    def core(br: Branch) -> np.ndarray:
        E, V, idx, gap = _eigen_path(H, br.nodes, gauge)
        gaps[0] = min(gaps[0], gap)
        n = E.shape[1]
        c = V[0].conj().T @ psi0
        Phi = cumulative_simpson(E, br.h_pairs)
        ph = np.exp(-1j * Phi)
        ad = np.einsum("mik,mk->mi", V, c * ph)
        lam = -1j * E
        fo = psi0 + cumulative_simpson(np.einsum("mik,mk->mi", V, c * lam * ph), br.h_pairs)
        C = np.swapaxes(V.conj(), 1, 2) @ H.derivative_batch(br.nodes) @ V  # <n|H'|k>
        gap_nk = E[:, :, None] - E[:, None, :]
        off = ~np.eye(n, dtype=bool)
        W = np.where(off, C / np.where(off, gap_nk, 1.0), 0.0)  # <dn|k>
        # diagonal <dn|n> implied by the gauge: the pivot component stays real
        P = V @ np.swapaxes(W, 1, 2).conj()  # sum_k |k><k|dn>
        Pj = np.take_along_axis(P, idx[:, None, :], axis=1)[:, 0, :]
        vj = np.take_along_axis(V, idx[:, None, :], axis=1)[:, 0, :].real
        diag[0] = max(diag[0], float(np.abs(Pj.imag / vj).max()))
        ratio = ph[:, None, :] / ph[:, :, None]  # e^{-i(Phi_k - Phi_n)}
        inner = cumulative_simpson(W * c[None, None, :] * ratio, br.h_pairs).sum(axis=2)
        outer = np.einsum("mik,mk->mi", V, lam * ph * inner)
        dpsi = cumulative_simpson(outer, br.h_pairs)
        return np.concatenate([ad, fo, dpsi], axis=1)[br.target_index]

    branches, t = build_branches(t_grid, 0.0, panels_per_unit)
    if t[0] < 0:
        raise ValueError("times must be non-negative")
    br = branches[0]
    out = core(br)
    coarse = core(br.coarse())
    err = float(np.abs(out - coarse).max())
    if quad_tol is not None and err > quad_tol * max(1.0, float(np.abs(out).max())):
        raise QuadratureError(f"quadrature not converged: fine/coarse difference {err:.3e}")
    n = H.n
    ad, fo, dpsi = out[:, :n], out[:, n : 2 * n], out[:, 2 * n :]
    vr = np.linalg.norm(dpsi, axis=1) / np.linalg.norm(fo, axis=1)
    return AdiabaticResult(t, ad, fo, dpsi, vr, diag[0], gaps[0], err, br.panels)


def _at(H, psi0, t, attr, **kw) -> QuantumState:
    res = adiabatic_analysis(H, psi0, [float(t)], **kw)
    return QuantumState(getattr(res, attr)[0], float(t))


def first_order(H: HamiltonianFamily, psi0, t: float, **kw) -> QuantumState:
    return _at(H, psi0, t, "first_order", **kw)


def adiabatic_approx(H: HamiltonianFamily, psi0, t: float, **kw) -> QuantumState:
    return _at(H, psi0, t, "adiabatic", **kw)


def adiabatic_correction(H: HamiltonianFamily, psi0, t: float, **kw) -> QuantumState:
    """The increment dpsi at ``t``; see :func:`adiabatic_analysis` for diagnostics."""
    return _at(H, psi0, t, "correction", **kw)
