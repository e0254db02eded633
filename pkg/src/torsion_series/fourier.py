"""Finite trigonometric series with radial-expression coefficients.

``F(r, t) = sum_{n>=0} a_n(r) cos(n t) + sum_{n>=1} b_n(r) sin(n t)``; the
mode-0 cosine coefficient is the average.  All arithmetic is exact and mode
support grows without truncation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

import numpy as np

from . import radial
from .radial import RadialExpr, Scalar, as_rational


class NotThetaField(ValueError):
    pass


def _clean(modes: Mapping[int, RadialExpr]) -> dict[int, RadialExpr]:
    return {n: e for n, e in sorted(modes.items()) if not e.is_zero()}


class FourierField:
    __slots__ = ("_cos", "_sin")

    def __init__(
        self,
        avg: RadialExpr | Scalar | None = None,
        cos: Mapping[int, RadialExpr] | None = None,
        sin: Mapping[int, RadialExpr] | None = None,
    ):
        c: dict[int, RadialExpr] = {}
        if avg is not None:
            c[0] = radial._lift(avg)
        for n, e in (cos or {}).items():
            if n < 1:
                raise ValueError("cosine modes start at n = 1; pass avg for n = 0")
            c[n] = c.get(n, radial.ZERO) + radial._lift(e)
        s: dict[int, RadialExpr] = {}
        for n, e in (sin or {}).items():
            if n < 1:
                raise ValueError("sine modes start at n = 1")
            s[n] = s.get(n, radial.ZERO) + radial._lift(e)
        self._cos = _clean(c)
        self._sin = _clean(s)
        self._validate()

    def _validate(self):
        pass

    @classmethod
    def _from_modes(cls, cos: dict, sin: dict):
        obj = cls.__new__(cls)
        obj._cos = _clean(cos)
        obj._sin = _clean(sin)
        obj._validate()
        return obj

    # -- constructors
    @classmethod
    def zero(cls):
        return cls._from_modes({}, {})

    @classmethod
    def radial(cls, expr: RadialExpr | Scalar):
        return cls._from_modes({0: radial._lift(expr)}, {})

    @classmethod
    def cos_mode(cls, n: int, expr: RadialExpr | Scalar):
        if n == 0:
            return cls.radial(expr)
        return cls._from_modes({n: radial._lift(expr)}, {})

    @classmethod
    def sin_mode(cls, n: int, expr: RadialExpr | Scalar):
        if n < 1:
            raise ValueError("sine modes start at n = 1")
        return cls._from_modes({}, {n: radial._lift(expr)})

    # -- access
    @property
    def avg(self) -> RadialExpr:
        return self._cos.get(0, radial.ZERO)

    @property
    def cos_modes(self) -> dict[int, RadialExpr]:
        return {n: e for n, e in self._cos.items() if n > 0}

    @property
    def sin_modes(self) -> dict[int, RadialExpr]:
        return dict(self._sin)

    def cos_coeff(self, n: int) -> RadialExpr:
        return self._cos.get(n, radial.ZERO)

    def sin_coeff(self, n: int) -> RadialExpr:
        return self._sin.get(n, radial.ZERO)

    def support(self) -> set[int]:
        return set(self._cos) | set(self._sin)

    def is_zero(self) -> bool:
        return not self._cos and not self._sin

    def map_radial(self, fn):
        """Apply ``fn`` to every radial coefficient (result is a FourierField)."""
        return FourierField._from_modes(
            {n: fn(e) for n, e in self._cos.items()},
            {n: fn(e) for n, e in self._sin.items()},
        )

    # -- arithmetic
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FourierField.radial(other)
        if not isinstance(other, FourierField):
            return NotImplemented
        return self._cos == other._cos and self._sin == other._sin

    def __hash__(self):
        return hash((frozenset(self._cos.items()), frozenset(self._sin.items())))

    def __add__(self, other):
        other = _lift_field(other, type(self))
        cos = dict(self._cos)
        for n, e in other._cos.items():
            cos[n] = cos.get(n, radial.ZERO) + e
        sin = dict(self._sin)
        for n, e in other._sin.items():
            sin[n] = sin.get(n, radial.ZERO) + e
        return _result_type(self, other)._from_modes(cos, sin)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._from_modes(
            {n: -e for n, e in self._cos.items()}, {n: -e for n, e in self._sin.items()}
        )

    def __sub__(self, other):
        return self + (-_lift_field(other, type(self)))

    def __rsub__(self, other):
        return _lift_field(other, type(self)) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = as_rational(other)
            return type(self)._from_modes(
                {n: e * c for n, e in self._cos.items()},
                {n: e * c for n, e in self._sin.items()},
            )
        if isinstance(other, RadialExpr):
            return FourierField._from_modes(
                {n: e * other for n, e in self._cos.items()},
                {n: e * other for n, e in self._sin.items()},
            )
        if isinstance(other, FourierField):
            return field_product(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, h: int):
        return theta_power(self, h)

    def __repr__(self):
        parts = []
        for n, e in self._cos.items():
            parts.append(f"{e!r}" if n == 0 else f"{e!r}*cos({n}t)")
        for n, e in self._sin.items():
            parts.append(f"{e!r}*sin({n}t)")
        return f"{type(self).__name__}(" + (" + ".join(parts) or "0") + ")"


class ThetaField(FourierField):
    """A Fourier field whose coefficients are all constants (function of theta only)."""

    __slots__ = ()

    def _validate(self):
        for e in list(self._cos.values()) + list(self._sin.values()):
            if not e.is_constant():
                raise NotThetaField(f"non-constant radial coefficient {e!r}")

    @classmethod
    def from_coeffs(
        cls,
        avg: Scalar = 0,
        cos: Mapping[int, Scalar] | None = None,
        sin: Mapping[int, Scalar] | None = None,
    ) -> "ThetaField":
        c = {0: RadialExpr.const(as_rational(avg))}
        c.update({n: RadialExpr.const(as_rational(v)) for n, v in (cos or {}).items()})
        s = {n: RadialExpr.const(as_rational(v)) for n, v in (sin or {}).items()}
        if any(n < 1 for n in list((cos or {})) + list(s)):
            raise ValueError("modes start at n = 1")
        return cls._from_modes(c, s)

    @classmethod
    def from_field(cls, F: FourierField) -> "ThetaField":
        return cls._from_modes(dict(F._cos), dict(F._sin))

    def __call__(self, theta):
        return eval_theta(self, theta)


def _result_type(*fields):
    return ThetaField if all(isinstance(f, ThetaField) for f in fields) else FourierField


def _lift_field(x, cls=FourierField) -> FourierField:
    if isinstance(x, FourierField):
        return x
    if isinstance(x, RadialExpr):
        return FourierField.radial(x)
    return cls.radial(as_rational(x))


def _acc(modes: dict, n: int, e: RadialExpr):
    if e.is_zero():
        return
    modes[n] = modes.get(n, radial.ZERO) + e


def field_product(F: FourierField, G: FourierField) -> FourierField:
    """Exact product via product-to-sum identities."""
    half = Fraction(1, 2)
    cos: dict[int, RadialExpr] = {}
    sin: dict[int, RadialExpr] = {}
    for m, a in F._cos.items():
        for n, b in G._cos.items():
            p = (a * b) * half
            _acc(cos, abs(m - n), p)
            _acc(cos, m + n, p)
        for n, b in G._sin.items():
            # cos m sin n = (sin(m+n) - sin(m-n)) / 2
            p = (a * b) * half
            _acc(sin, m + n, p)
            d = m - n
            if d > 0:
                _acc(sin, d, -p)
            elif d < 0:
                _acc(sin, -d, p)
    for m, a in F._sin.items():
        for n, b in G._cos.items():
            # sin m cos n = (sin(m+n) + sin(m-n)) / 2
            p = (a * b) * half
            _acc(sin, m + n, p)
            d = m - n
            if d > 0:
                _acc(sin, d, p)
            elif d < 0:
                _acc(sin, -d, -p)
        for n, b in G._sin.items():
            # sin m sin n = (cos(m-n) - cos(m+n)) / 2
            p = (a * b) * half
            _acc(cos, abs(m - n), p)
            _acc(cos, m + n, -p)
    return _result_type(F, G)._from_modes(cos, sin)


def dtheta(F: FourierField) -> FourierField:
    cos = {n: e * n for n, e in F._sin.items()}
    sin = {n: e * (-n) for n, e in F._cos.items() if n > 0}
    return type(F)._from_modes(cos, sin)


def ddr_field(F: FourierField) -> FourierField:
    return F.map_radial(radial.ddr)


def laplacian(F: FourierField) -> FourierField:
    """Polar Laplacian ``d_rr + r^-1 d_r + r^-2 d_tt``, exact."""
    cos, sin = {}, {}
    for modes, out in ((F._cos, cos), (F._sin, sin)):
        for n, e in modes.items():
            d1 = radial.ddr(e)
            out[n] = radial.ddr(d1) + radial.shift(d1, -1) - radial.shift(e, -2) * (n * n)
    return FourierField._from_modes(cos, sin)


def trace(F: FourierField, h: int = 0) -> ThetaField:
    """``d_r^h F`` evaluated at ``r = 1`` as a function of theta."""
    cos = {n: RadialExpr.const(radial.deriv_at_one(e, h)) for n, e in F._cos.items()}
    sin = {n: RadialExpr.const(radial.deriv_at_one(e, h)) for n, e in F._sin.items()}
    return ThetaField._from_modes(cos, sin)


def theta_power(T: FourierField, h: int) -> FourierField:
    if h < 0:
        raise ValueError("power must be >= 0")
    out = _result_type(T).radial(1)
    for _ in range(h):
        out = field_product(out, T)
    return out


def extract_coeffs(T: FourierField) -> tuple[Fraction, dict[int, Fraction], dict[int, Fraction]]:
    """``(A0, {n: A_n}, {n: B_n})`` of a theta-only field."""
    if not isinstance(T, ThetaField):
        try:
            T = ThetaField.from_field(T)
        except NotThetaField:
            raise
    A = {n: e.constant_value() for n, e in T._cos.items() if n > 0}
    B = {n: e.constant_value() for n, e in T._sin.items()}
    return T.avg.constant_value(), A, B


def eval_field(F: FourierField, r, theta):
    """Floating evaluation with numpy broadcasting over ``r`` and ``theta``."""
    r = np.asarray(r)
    theta = np.asarray(theta)
    out = np.zeros(np.broadcast(r, theta).shape, dtype=np.result_type(r, theta, float))
    for n, e in F._cos.items():
        out = out + radial.eval_radial(e, r) * np.cos(n * theta)
    for n, e in F._sin.items():
        out = out + radial.eval_radial(e, r) * np.sin(n * theta)
    return out if out.ndim else float(out)


def eval_theta(T: FourierField, theta):
    """Evaluate a theta-only field (real or complex theta)."""
    theta = np.asarray(theta)
    out = np.zeros(theta.shape, dtype=np.result_type(theta, float))
    for n, e in T._cos.items():
        out = out + float(e.constant_value()) * np.cos(n * theta)
    for n, e in T._sin.items():
        out = out + float(e.constant_value()) * np.sin(n * theta)
    return out if out.ndim else out[()]
