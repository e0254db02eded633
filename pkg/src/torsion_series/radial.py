"""Exact calculus on log-polynomial radial expressions.

A :class:`RadialExpr` is a finite sum ``sum c * r**m * log(r)**p`` with
rational ``c``, integer ``m`` and ``p >= 0``.  The ring is closed under the
derivatives and the Cauchy-Euler integral operators used by the hierarchy.
"""

from __future__ import annotations

import math
from collections import defaultdict
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Union

import numpy as np

Rational = Fraction
Scalar = Union[int, Fraction]


class NonIntegrable(ValueError):
    """An integrand has an effective exponent <= -1 at the origin."""


class DomainError(ValueError):
    """Evaluation outside the domain of a radial expression."""


class OriginClass(Enum):
    BoundedAtOrigin = "bounded"
    UnboundedAtOrigin = "unbounded"


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def rational_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class RadialExpr:
    """Immutable sparse map ``(m, p) -> coefficient``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], Scalar] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        for (m, p), c in items:
            if p < 0:
                raise ValueError("log power must be nonnegative")
            acc[(int(m), int(p))] += as_rational(c)
        self._terms = {k: v for k, v in sorted(acc.items()) if v != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "RadialExpr":
        obj = cls.__new__(cls)
        obj._terms = {k: v for k, v in sorted(terms.items()) if v != 0}
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Scalar) -> "RadialExpr":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, m: int, p: int = 0, c: Scalar = 1) -> "RadialExpr":
        return cls({(m, p): c})

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((0, 0), Fraction(0))

    def origin_class(self) -> OriginClass:
        return origin_class(self)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RadialExpr.const(other)
        if not isinstance(other, RadialExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        return add(self, _lift(other))

    __radd__ = __add__

    def __neg__(self):
        return RadialExpr._raw({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return add(self, -_lift(other))

    def __rsub__(self, other):
        return add(_lift(other), -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return scale(self, other)
        if isinstance(other, RadialExpr):
            return mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __call__(self, r):
        return eval_radial(self, r)

    def __repr__(self):
        if not self._terms:
            return "RadialExpr(0)"
        parts = []
        for (m, p), c in self._terms.items():
            s = str(c)
            if m:
                s += f"*r^{m}"
            if p:
                s += f"*log(r)^{p}" if p > 1 else "*log(r)"
            parts.append(s)
        return "RadialExpr(" + " + ".join(parts) + ")"


ZERO = RadialExpr()
ONE = RadialExpr.const(1)
# u0 = (1 - r^2)/4, the unperturbed torsion solution
U0 = RadialExpr({(0, 0): Fraction(1, 4), (2, 0): Fraction(-1, 4)})


def _lift(x) -> RadialExpr:
    if isinstance(x, RadialExpr):
        return x
    return RadialExpr.const(as_rational(x))


def add(f: RadialExpr, g: RadialExpr) -> RadialExpr:
    acc = dict(f._terms)
    for k, v in g._terms.items():
        acc[k] = acc.get(k, 0) + v
    return RadialExpr._raw(acc)


def scale(f: RadialExpr, c: Scalar) -> RadialExpr:
    c = as_rational(c)
    return RadialExpr._raw({k: c * v for k, v in f._terms.items()})


def mul(f: RadialExpr, g: RadialExpr) -> RadialExpr:
    acc: dict[tuple[int, int], Fraction] = {}
    for (m1, p1), c1 in f._terms.items():
        for (m2, p2), c2 in g._terms.items():
            key = (m1 + m2, p1 + p2)
            acc[key] = acc.get(key, 0) + c1 * c2
    return RadialExpr._raw(acc)


def shift(f: RadialExpr, k: int) -> RadialExpr:
    """Multiply by ``r**k``."""
    return RadialExpr._raw({(m + k, p): c for (m, p), c in f._terms.items()})


def ddr(f: RadialExpr) -> RadialExpr:
    acc: dict[tuple[int, int], Fraction] = {}
    for (m, p), c in f._terms.items():
        if m:
            acc[(m - 1, p)] = acc.get((m - 1, p), 0) + m * c
        if p:
            acc[(m - 1, p - 1)] = acc.get((m - 1, p - 1), 0) + p * c
    return RadialExpr._raw(acc)


def origin_class(f: RadialExpr) -> OriginClass:
    ok = all(m > 0 or (m == 0 and p == 0) for (m, p) in f._terms)
    return OriginClass.BoundedAtOrigin if ok else OriginClass.UnboundedAtOrigin


def value_at_one(f: RadialExpr) -> Fraction:
    return sum((c for (_, p), c in f._terms.items() if p == 0), Fraction(0))


def deriv_at_one(f: RadialExpr, m: int = 0) -> Fraction:
    """Exact ``m``-th radial derivative at ``r = 1`` (where ``log 1 = 0``)."""
    if m < 0:
        raise ValueError("derivative order must be >= 0")
    for _ in range(m):
        f = ddr(f)
    return value_at_one(f)


# --- integration --------------------------------------------------------------


def _antiderivative_term(a: int, p: int) -> dict[tuple[int, int], Fraction]:
    # integral of s^a log^p s; a = -1 is the log^{p+1}/(p+1) case
    if a == -1:
        return {(0, p + 1): Fraction(1, p + 1)}
    out = {}
    coef = Fraction(1, a + 1)
    out[(a + 1, p)] = coef
    for i in range(p - 1, -1, -1):
        coef = -coef * (i + 1) / (a + 1)
        out[(a + 1, i)] = coef
    return out


def antiderivative(f: RadialExpr) -> RadialExpr:
    """A primitive of ``f`` with no additive constant."""
    acc: dict[tuple[int, int], Fraction] = {}
    for (m, p), c in f._terms.items():
        for key, v in _antiderivative_term(m, p).items():
            acc[key] = acc.get(key, 0) + c * v
    return RadialExpr._raw(acc)


def _check_integrable_at_zero(f: RadialExpr) -> None:
    bad = [m for (m, _p) in f._terms if m <= -1]
    if bad:
        raise NonIntegrable(f"exponent {min(bad)} not integrable at 0")


def integral_from_zero(f: RadialExpr) -> RadialExpr:
    """``r -> int_0^r f(s) ds`` as a radial expression."""
    _check_integrable_at_zero(f)
    return antiderivative(f)


def integral_to_one(f: RadialExpr) -> RadialExpr:
    """``r -> int_r^1 f(s) ds`` as a radial expression."""
    F = antiderivative(f)
    return RadialExpr.const(value_at_one(F)) - F


def int01_weighted(f: RadialExpr, n: int) -> Fraction:
    """``int_0^1 s**(1+n) f(s) ds`` in closed form.

    Uses ``int_0^1 s^a log^p s ds = (-1)^p p! / (a+1)^(p+1)`` term by term.
    """
    total = Fraction(0)
    for (m, p), c in f._terms.items():
        a = m + 1 + n
        if a <= -1:
            raise NonIntegrable(f"s^{a} log^{p} s is not integrable on (0,1)")
        total += c * (-1) ** p * math.factorial(p) / Fraction(a + 1) ** (p + 1)
    return total


def op_I_avg(f: RadialExpr) -> RadialExpr:
    """``-int_r^1 s^-1 (int_0^s s' f(s') ds') ds``.

    Bounded solution of ``A'' + A'/r = f`` vanishing at ``r = 1``.
    """
    inner = integral_from_zero(shift(f, 1))
    return -integral_to_one(shift(inner, -1))


def op_I_plus(f: RadialExpr, n: int, C: Scalar) -> RadialExpr:
    """``r^n (C - (1/2n) int_r^1 f(s) s^(1-n) ds)``."""
    if n < 1:
        raise ValueError("mode index must be >= 1")
    inner = integral_to_one(shift(f, 1 - n))
    return shift(RadialExpr.const(as_rational(C)) - inner * Fraction(1, 2 * n), n)


def op_I_minus(f: RadialExpr, n: int) -> RadialExpr:
    """``-r^-n/(2n) int_0^r f(s) s^(1+n) ds``."""
    if n < 1:
        raise ValueError("mode index must be >= 1")
    inner = integral_from_zero(shift(f, 1 + n))
    return shift(inner, -n) * Fraction(-1, 2 * n)


def cauchy_euler_residual(A: RadialExpr, n: int, f: RadialExpr) -> RadialExpr:
    """``A'' + A'/r - n^2 A / r^2 - f``."""
    dA = ddr(A)
    return ddr(dA) + shift(dA, -1) - shift(A, -2) * (n * n) - f


# --- evaluation -------------------------------------------------------------


def eval_radial(f: RadialExpr, r):
    """Floating evaluation; accepts scalars or numpy arrays (real or complex).

    At ``r = 0`` the limit is returned for bounded expressions.
    """
    arr = np.asarray(r)
    if arr.ndim == 0 and not np.iscomplexobj(arr):
        x = float(arr)
        if x < 0:
            raise DomainError("radial argument must be >= 0")
        if x == 0:
            if origin_class(f) is OriginClass.UnboundedAtOrigin:
                raise DomainError("expression is unbounded at r = 0")
            return float(f.constant_value())
        lg = math.log(x)
        return sum(float(c) * x**m * lg**p for (m, p), c in f._terms.items())

    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
    zero = arr == 0
    if np.any(zero) and origin_class(f) is OriginClass.UnboundedAtOrigin:
        raise DomainError("expression is unbounded at r = 0")
    if not np.iscomplexobj(arr) and np.any(arr < 0):
        raise DomainError("radial argument must be >= 0")
    safe = np.where(zero, 1, arr)
    lg = np.log(safe)
    out = np.zeros(arr.shape, dtype=np.result_type(arr.dtype, float))
    for (m, p), c in f._terms.items():
        term = float(c) * safe**m * lg**p
        if m > 0 or p > 0:
            term = np.where(zero, 0, term)
        out = out + term
    return out
