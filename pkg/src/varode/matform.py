"""Reduction of an n-th order scalar linear ODE to a first-order system.

    y^(n) + a_{n-1}(t) y^(n-1) + ... + a_0(t) y = 0

becomes Y' = M(t) Y (column) or Y' = Y M(t)^T (row) with
Y = (y, y', ..., y^(n-1)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .expr import Const, Expr, Func, differentiate, evaluate, parse
from .linalg import MAX_DIM
from .polymat import ORIENTATIONS

__all__ = ["ScalarODE", "CompanionSystem", "to_companion"]


def _as_expr(c) -> Expr:
    if isinstance(c, Expr):
        return c
    if isinstance(c, (int, float, complex)):
        return Const(c)
    return parse(c)


@dataclass(frozen=True)
class ScalarODE:
    """Coefficients ``a_0 .. a_{n-1}`` (as expressions) and initial values."""

    coefficients: tuple
    initial: tuple
    params: Mapping[str, complex] = field(default_factory=dict)

    def __post_init__(self):
        coeffs = tuple(_as_expr(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("order must be at least 1")
        if len(coeffs) > MAX_DIM:
            raise ValueError(f"order {len(coeffs)} exceeds {MAX_DIM}")
        init = tuple(complex(v) for v in self.initial)
        if len(init) != len(coeffs):
            raise ValueError(f"need {len(coeffs)} initial values, got {len(init)}")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "params", dict(self.params))

    @property
    def order(self) -> int:
        return len(self.coefficients)

    @classmethod
    def second_order(cls, f, a: complex = 1.0, b: complex = 0.0, params=None) -> "ScalarODE":
        """The equation y'' = f(t) y with y(0) = a, y'(0) = b."""
        f = parse(f)
        return cls((Func("neg", f), 0), (a, b), params or {})


@dataclass(frozen=True)
class CompanionSystem:
    coefficients: tuple
    orientation: str
    initial: np.ndarray
    params: Mapping[str, complex] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.coefficients)

    def batch(self, t) -> np.ndarray:
        """Matrices at each time in ``t``.

        The leading shape is ``t.shape`` broadcast against any array-valued
        parameters, so one call can describe a whole batch of systems.
        """
        t = np.asarray(t, dtype=float)
        n = self.n
        vals = [np.asarray(evaluate(a, t, self.params)) for a in self.coefficients]
        shape = np.broadcast_shapes(t.shape, *(v.shape for v in vals))
        out = np.zeros(shape + (n, n), dtype=complex)
        for i in range(n - 1):
            out[..., i, i + 1] = 1.0
        for j, v in enumerate(vals):
            out[..., n - 1, j] = -v
        if self.orientation == "row":
            out = np.swapaxes(out, -1, -2)
        return out

    def derivative_batch(self, t) -> np.ndarray:
        """d/dt of :meth:`batch`, from the differentiated coefficients."""
        t = np.asarray(t, dtype=float)
        n = self.n
        vals = [np.asarray(evaluate(differentiate(a), t, self.params)) for a in self.coefficients]
        shape = np.broadcast_shapes(t.shape, *(v.shape for v in vals))
        out = np.zeros(shape + (n, n), dtype=complex)
        for j, v in enumerate(vals):
            out[..., n - 1, j] = -v
        if self.orientation == "row":
            out = np.swapaxes(out, -1, -2)
        return out

    def __call__(self, t) -> np.ndarray:
        return self.batch(np.asarray(t, dtype=float))

    def with_params(self, params) -> "CompanionSystem":
        return CompanionSystem(self.coefficients, self.orientation, self.initial, params)


def to_companion(ode: ScalarODE, orientation: str = "column") -> CompanionSystem:
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    return CompanionSystem(
        ode.coefficients, orientation, np.array(ode.initial, dtype=complex), dict(ode.params)
    )
