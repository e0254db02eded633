"""Resolvability, Dirichlet and Neumann defects of a truncated pair.

Two independent routes are provided for each defect:

* a *direct* expansion of the defect functional as a power series in ``mu``
  (the boundary composition ``r = 1 + mu g`` is done by binomial/log series
  of each ``r^m log^p r`` term, the square root by a power-series recurrence);
* the *closed-form* remainder sums written in terms of boundary derivatives
  ``d_r^m u_h(1, t)`` and the coefficients ``C_j``.

``numeric_defects`` evaluates the defects in floating point on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import radial
from .fourier import (
    FourierField,
    ThetaField,
    ddr_field,
    dtheta,
    eval_field,
    eval_theta,
    field_product,
    laplacian,
    theta_power,
    trace,
)
from .hierarchy import HierarchyState, c_coefficient
from .radial import RadialExpr, U0


@dataclass(frozen=True)
class MuSeries:
    """``sum_i mu^i coeffs[i]`` with exact field coefficients."""

    coeffs: tuple[FourierField, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> FourierField:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return FourierField.zero()

    def lowest_power(self) -> int | None:
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return i
        return None

    def highest_power(self) -> int | None:
        for i in range(len(self.coeffs) - 1, -1, -1):
            if not self.coeffs[i].is_zero():
                return i
        return None

    def vanishes_through(self, k: int) -> bool:
        return all(self.coeff(i).is_zero() for i in range(k + 1))

    def truncate(self, order: int) -> "MuSeries":
        return MuSeries(tuple(self.coeff(i) for i in range(order + 1)))

    def __eq__(self, other):
        if not isinstance(other, MuSeries):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return all(self.coeff(i) == other.coeff(i) for i in range(n))

    def __call__(self, mu: float, r, theta):
        return sum(mu**i * eval_field(c, r, theta) for i, c in enumerate(self.coeffs))


# --- series helpers -------------------------------------------------------------


def _series_mul(a: Sequence[FourierField], b: Sequence[FourierField], order: int) -> list[FourierField]:
    out = [ThetaField.zero() for _ in range(order + 1)]
    for i, x in enumerate(a[: order + 1]):
        if x.is_zero():
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            if not y.is_zero():
                out[i + j] = out[i + j] + field_product(x, y)
    return out


def _series_sqrt_one_plus(x: Sequence[FourierField], order: int) -> list[FourierField]:
    """``sqrt(1 + x(mu))`` for a series ``x`` with ``x[0] = 0``, via ``s^2 = 1 + x``."""
    s = [ThetaField.radial(1)]
    for n in range(1, order + 1):
        acc = x[n] if n < len(x) else ThetaField.zero()
        for i in range(1, n):
            acc = acc - field_product(s[i], s[n - i])
        s.append(acc * Fraction(1, 2))
    return s


def _binomial_series(m: int, order: int) -> list[Fraction]:
    # (1+x)^m for integer m (possibly negative)
    out, c = [], Fraction(1)
    for i in range(order + 1):
        out.append(c)
        c = c * (m - i) / (i + 1)
    return out


def _log_series(order: int) -> list[Fraction]:
    return [Fraction(0)] + [Fraction((-1) ** (i + 1), i) for i in range(1, order + 1)]


def _scalar_mul(a: list[Fraction], b: list[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x:
            for j, y in enumerate(b[: order + 1 - i]):
                out[i + j] += x * y
    return out


def shifted_taylor(e: RadialExpr, order: int) -> list[Fraction]:
    """Coefficients ``c_d`` with ``e(1 + x) = sum_d c_d x^d + O(x^(order+1))``."""
    L = _log_series(order)
    out = [Fraction(0)] * (order + 1)
    log_pows = {0: [Fraction(1)] + [Fraction(0)] * order}
    for (m, p), c in e.items():
        if p not in log_pows:
            acc = log_pows[0]
            for _ in range(p):
                acc = _scalar_mul(acc, L, order)
            log_pows[p] = acc
        term = _scalar_mul(_binomial_series(m, order), log_pows[p], order)
        for d in range(order + 1):
            out[d] += c * term[d]
    return out


def compose_boundary(F: FourierField, g: ThetaField, order: int) -> list[FourierField]:
    """``mu``-coefficients of ``F(1 + mu g(t), t)`` up to ``order``."""
    per_d_cos = [dict() for _ in range(order + 1)]
    per_d_sin = [dict() for _ in range(order + 1)]
    for n, e in list(F.cos_modes.items()) + [(0, F.avg)]:
        if e.is_zero():
            continue
        for d, c in enumerate(shifted_taylor(e, order)):
            per_d_cos[d][n] = RadialExpr.const(c)
    for n, e in F.sin_modes.items():
        for d, c in enumerate(shifted_taylor(e, order)):
            per_d_sin[d][n] = RadialExpr.const(c)
    out = []
    for d in range(order + 1):
        T = ThetaField._from_modes(per_d_cos[d], per_d_sin[d])
        out.append(field_product(theta_power(g, d), T))
    return out


# --- direct expansions ----------------------------------------------------------------


def resolvability_series(state: HierarchyState, k: int) -> MuSeries:
    """``-Delta u^[k] + mu w^[k] u^[k] - 1`` as an exact series of degree ``2k``."""
    state.require(k)
    coeffs = []
    for n in range(2 * k + 1):
        c = -laplacian(state.u[n]) if n <= k else FourierField.zero()
        for j in range(1, min(n, k) + 1):
            if n - j <= k:
                c = c + field_product(state.w[j], state.u[n - j])
        if n == 0:
            c = c - 1
        coeffs.append(c)
    return MuSeries(tuple(coeffs))


def dirichlet_series(state: HierarchyState, k: int, order: int) -> MuSeries:
    """``u^[k](1 + mu g, t)`` expanded in ``mu`` through ``order``."""
    state.require(k)
    out = [ThetaField.zero() for _ in range(order + 1)]
    for i in range(min(k, order) + 1):
        comp = compose_boundary(state.u[i], state.g, order - i)
        for d, c in enumerate(comp):
            out[i + d] = out[i + d] + c
    return MuSeries(tuple(out))


def neumann_series(state: HierarchyState, k: int, order: int) -> MuSeries:
    """Polynomialized Neumann defect expanded in ``mu`` through ``order``.

    ``mu g' u_t - (1 + mu g)^2 u_r - C (1 + mu g) sqrt(1 + 2 mu g + mu^2 (g^2 + g'^2))``
    with ``u = u^[k]`` and its derivatives taken at ``r = 1 + mu g``.
    """
    state.require(k)
    g = state.g
    gp = dtheta(g)
    ut = [ThetaField.zero() for _ in range(order + 1)]
    ur = [ThetaField.zero() for _ in range(order + 1)]
    for i in range(min(k, order) + 1):
        for target, F in ((ut, dtheta(state.u[i])), (ur, ddr_field(state.u[i]))):
            for d, c in enumerate(compose_boundary(F, g, order - i)):
                target[i + d] = target[i + d] + c

    one_plus = [ThetaField.radial(1), g]
    one_plus_sq = [ThetaField.radial(1), g * 2, field_product(g, g)]
    x = [ThetaField.zero(), g * 2, field_product(g, g) + field_product(gp, gp)]
    S = _series_mul(one_plus, _series_sqrt_one_plus(x, order), order)

    a = _series_mul([ThetaField.zero(), gp], ut, order)
    b = _series_mul(one_plus_sq, ur, order)
    return MuSeries(tuple(a[j] - b[j] - S[j] * state.C_const for j in range(order + 1)))


# --- closed forms ---------------------------------------------------------------


def closed_form_remainders(state: HierarchyState, k: int, order: int) -> tuple[MuSeries, MuSeries, MuSeries]:
    """Remainder tails from the explicit sums; coefficients ``0..k`` are zero by construction."""
    state.require(k)
    u, w, g = state.u, state.w, state.g
    gp = dtheta(g)
    gpow = [theta_power(g, h) for h in range(order + 2)]
    tr = {}

    def T(h, m):
        if (h, m) not in tr:
            tr[(h, m)] = trace(u[h], m)
        return tr[(h, m)]

    R = [FourierField.zero() for _ in range(2 * k + 1)]
    for n in range(k + 1, 2 * k + 1):
        for j in range(n - k, k + 1):
            R[n] = R[n] + field_product(w[n - j], u[j])

    ED = [ThetaField.zero() for _ in range(order + 1)]
    for j in range(k + 1, order + 1):
        for m in range(j - k, j + 1):
            ED[j] = ED[j] + field_product(gpow[m], T(j - m, m)) * Fraction(1, math.factorial(m))

    EN = [ThetaField.zero() for _ in range(order + 1)]
    for j in range(k + 1, order + 1):
        acc = ThetaField.zero()
        for h in range(0, k + 1):
            e = j - 1 - h
            acc = acc + field_product(gp, field_product(gpow[e], dtheta(T(h, e)))) * Fraction(1, math.factorial(e))
            acc = acc - field_product(gpow[j - h], T(h, j - h + 1)) * Fraction(1, math.factorial(j - h))
            acc = acc - field_product(g * 2, field_product(gpow[e], T(h, j - h))) * Fraction(1, math.factorial(e))
        for h in range(0, min(j - 2, k) + 1):
            acc = acc - field_product(
                field_product(g, g), field_product(gpow[j - 2 - h], T(h, j - h - 1))
            ) * Fraction(1, math.factorial(j - 2 - h))
        EN[j] = acc - c_coefficient(g, j) * state.C_const
    return MuSeries(tuple(R)), MuSeries(tuple(ED)), MuSeries(tuple(EN))


# --- numeric ----------------------------------------------------------------------


@dataclass(frozen=True)
class DefectReport:
    mu: float
    grid: tuple[int, int]
    sup_R: float
    sup_ED: float
    sup_EN: float
    slope_fit: float | None = None


def _check_mu(mu: float) -> None:
    if not 0 <= mu <= 1:
        raise radial.DomainError("mu must lie in [0, 1]")


def boundary_profiles(state: HierarchyState, k: int, mu: float, n_theta: int):
    """``(theta, E_D(theta), dnu u - C)`` on a uniform theta grid at ``r = 1 + mu g``."""
    _check_mu(mu)
    state.require(k)
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    g = eval_theta(state.g, theta)
    gp = eval_theta(dtheta(state.g), theta)
    R = 1 + mu * g
    u = np.zeros_like(theta)
    ur = np.zeros_like(theta)
    ut = np.zeros_like(theta)
    for i in range(k + 1):
        c = mu**i
        u += c * eval_field(state.u[i], R, theta)
        ur += c * eval_field(ddr_field(state.u[i]), R, theta)
        ut += c * eval_field(dtheta(state.u[i]), R, theta)
    dnu = (-R * ur + mu * gp * ut / R) / np.sqrt(R**2 + (mu * gp) ** 2)
    return theta, u, dnu - float(state.C_const)


def numeric_defects(state: HierarchyState, k: int, mu: float, n_r: int, n_theta: int) -> DefectReport:
    """Grid sup-norms of the three defects (no rigorous enclosure)."""
    if n_r < 8 or n_theta < 8:
        raise ValueError("grid must be at least 8 x 8")
    theta, ed, en = boundary_profiles(state, k, mu, n_theta)
    R = 1 + mu * eval_theta(state.g, theta)
    rr = np.linspace(0.0, 1.0, n_r)[:, None] * R[None, :]
    tt = np.broadcast_to(theta[None, :], rr.shape)
    lap = np.zeros(rr.shape)
    uu = np.zeros(rr.shape)
    ww = np.zeros(rr.shape)
    for i in range(k + 1):
        lap += mu**i * eval_field(laplacian(state.u[i]), rr, tt)
        uu += mu**i * eval_field(state.u[i], rr, tt)
        if i >= 1:
            ww += mu ** (i - 1) * eval_field(state.w[i], rr, tt)
    res = -lap + mu * ww * uu - 1
    return DefectReport(
        mu=mu,
        grid=(n_r, n_theta),
        sup_R=float(np.max(np.abs(res))),
        sup_ED=float(np.max(np.abs(ed))),
        sup_EN=float(np.max(np.abs(en))),
    )


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    slope, _ = np.polyfit(np.log(np.asarray(x)), np.log(np.asarray(y)), 1)
    return float(slope)


def sweep(state: HierarchyState, k: int, mus: Sequence[float], n_r: int, n_theta: int) -> list[DefectReport]:
    return [numeric_defects(state, k, float(m), n_r, n_theta) for m in mus]
