"""Fuzzy logic connectives: t-norms, residual implicators and induced negators.

A residual triplet bundles a t-norm ``T`` with its residual implicator
``I(x, y) = sup{l : T(x, l) <= y}`` and the induced negator ``N(x) = I(x, 0)``.
The nilpotent and strict Archimedean families are parameterised by an order
isomorphism ``phi`` of the unit interval: their operations are the Lukasiewicz
and product operations conjugated by ``phi``.

All operations accept scalars or numpy arrays (broadcasting applies) and are
pure, so they are safe for unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import DEFAULT_TOL
from .errors import ValidationError

LUKASIEWICZ = "lukasiewicz"
PRODUCT = "product"
MINIMUM = "minimum"
DRASTIC = "drastic"
NILPOTENT_MINIMUM = "nilpotent_minimum"

_FAMILIES = (LUKASIEWICZ, PRODUCT, MINIMUM, DRASTIC, NILPOTENT_MINIMUM)
_ISO_FAMILIES = (LUKASIEWICZ, PRODUCT)


def _as_result(value, *inputs):
    if all(np.ndim(x) == 0 for x in inputs):
        return float(value)
    return value


@dataclass(frozen=True)
class Bijection:
    """Strictly increasing bijection of [0, 1] with phi(0) = 0 and phi(1) = 1.

    Three kinds are supported: ``identity``, ``power`` (x ** gamma with
    gamma > 0) and ``piecewise_linear`` over a strictly increasing breakpoint
    table.
    """

    kind: str = "identity"
    gamma: float = 1.0
    xs: tuple = ()
    ys: tuple = ()

    @classmethod
    def identity(cls) -> "Bijection":
        return cls("identity")

    @classmethod
    def power(cls, gamma: float) -> "Bijection":
        gamma = float(gamma)
        if not np.isfinite(gamma) or gamma <= 0:
            raise ValidationError(f"power bijection needs gamma > 0, got {gamma!r}")
        return cls("power", gamma=gamma)

    @classmethod
    def piecewise_linear(cls, xs, ys) -> "Bijection":
        xs = tuple(float(x) for x in xs)
        ys = tuple(float(y) for y in ys)
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValidationError("piecewise bijection needs matching breakpoint tables")
        if abs(xs[0]) > DEFAULT_TOL or abs(xs[-1] - 1.0) > DEFAULT_TOL:
            raise ValidationError("breakpoints must span [0, 1] on the x axis")
        if abs(ys[0]) > DEFAULT_TOL or abs(ys[-1] - 1.0) > DEFAULT_TOL:
            raise ValidationError("breakpoints must span [0, 1] on the y axis")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ValidationError("breakpoints must be strictly increasing")
        return cls("piecewise_linear", xs=xs, ys=ys)

    @property
    def is_identity(self) -> bool:
        return self.kind == "identity" or (self.kind == "power" and self.gamma == 1.0)

    def forward(self, x):
        if self.kind == "identity":
            return np.asarray(x, dtype=float) if np.ndim(x) else float(x)
        if self.kind == "power":
            return _as_result(np.power(x, self.gamma), x)
        return _as_result(np.interp(x, self.xs, self.ys), x)

    def inverse(self, y):
        if self.kind == "identity":
            return np.asarray(y, dtype=float) if np.ndim(y) else float(y)
        if self.kind == "power":
            return _as_result(np.power(y, 1.0 / self.gamma), y)
        return _as_result(np.interp(y, self.ys, self.xs), y)

    __call__ = forward


@dataclass(frozen=True)
class ResidualTriplet:
    """A t-norm together with its residual implicator and induced negator."""

    family: str
    bijection: Bijection = field(default_factory=Bijection.identity)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValidationError(f"unknown t-norm family {self.family!r}")
        if self.family not in _ISO_FAMILIES and not self.bijection.is_identity:
            raise ValidationError(f"{self.family} does not take a bijection")

    @classmethod
    def lukasiewicz(cls, bijection: Bijection | None = None) -> "ResidualTriplet":
        return cls(LUKASIEWICZ, bijection or Bijection.identity())

    @classmethod
    def product(cls, bijection: Bijection | None = None) -> "ResidualTriplet":
        return cls(PRODUCT, bijection or Bijection.identity())

    @classmethod
    def minimum(cls) -> "ResidualTriplet":
        return cls(MINIMUM)

    @classmethod
    def drastic(cls) -> "ResidualTriplet":
        return cls(DRASTIC)

    @classmethod
    def nilpotent_minimum(cls) -> "ResidualTriplet":
        return cls(NILPOTENT_MINIMUM)

    @property
    def is_left_continuous(self) -> bool:
        return self.family != DRASTIC

    @property
    def is_imtl(self) -> bool:
        """Whether the induced negator is involutive."""
        return self.family in (LUKASIEWICZ, NILPOTENT_MINIMUM)

    def tnorm(self, x, y):
        x_arr, y_arr = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if self.family == LUKASIEWICZ:
            a, b = self.bijection.forward(x_arr), self.bijection.forward(y_arr)
            out = self.bijection.inverse(np.maximum(a + b - 1.0, 0.0))
        elif self.family == PRODUCT:
            a, b = self.bijection.forward(x_arr), self.bijection.forward(y_arr)
            out = self.bijection.inverse(a * b)
        elif self.family == MINIMUM:
            out = np.minimum(x_arr, y_arr)
        elif self.family == DRASTIC:
            out = np.where(np.maximum(x_arr, y_arr) >= 1.0, np.minimum(x_arr, y_arr), 0.0)
        else:  # nilpotent minimum
            out = np.where(x_arr + y_arr > 1.0, np.minimum(x_arr, y_arr), 0.0)
        return _as_result(out, x, y)

    def implicator(self, x, y):
        x_arr, y_arr = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if self.family == LUKASIEWICZ:
            a, b = self.bijection.forward(x_arr), self.bijection.forward(y_arr)
            out = self.bijection.inverse(np.minimum(1.0, 1.0 - a + b))
        elif self.family == PRODUCT:
            a, b = self.bijection.forward(x_arr), self.bijection.forward(y_arr)
            a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
            ratio = np.divide(b, a, out=np.ones_like(b), where=a > b)
            out = self.bijection.inverse(np.where(a <= b, 1.0, ratio))
        elif self.family == MINIMUM:
            out = np.where(x_arr <= y_arr, 1.0, y_arr)
        elif self.family == DRASTIC:
            out = np.where(x_arr >= 1.0, y_arr, 1.0)
        else:
            out = np.where(x_arr <= y_arr, 1.0, np.maximum(1.0 - x_arr, y_arr))
        return _as_result(out, x, y)

    def negator(self, x):
        """N(x) = I(x, 0)."""
        x_arr = np.asarray(x, dtype=float)
        if self.family == LUKASIEWICZ:
            out = self.bijection.inverse(1.0 - self.bijection.forward(x_arr))
        elif self.family == PRODUCT:
            out = np.where(self.bijection.forward(x_arr) <= 0.0, 1.0, 0.0)
        elif self.family == MINIMUM:
            out = np.where(x_arr <= 0.0, 1.0, 0.0)
        elif self.family == DRASTIC:
            out = np.where(x_arr >= 1.0, 0.0, 1.0)
        else:
            out = np.where(x_arr <= 0.0, 1.0, 1.0 - x_arr)
        return _as_result(out, x)
