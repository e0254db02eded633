"""Order-by-order construction of the approximant pair ``(u^[K], w^[K])``.

At each order ``k`` the forcing ``F^(k) = sum_j w_j u_{k-j}`` is formed, the
Dirichlet and Neumann traces ``u_k(1, t)`` and ``d_r u_k(1, t)`` are computed
from lower orders, the constant parts ``a_{n,0}`` of ``w_k`` are fixed so both
traces can be met, and ``u_k`` is assembled mode by mode from the bounded
Cauchy-Euler solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import radial
from .fourier import (
    FourierField,
    ThetaField,
    dtheta,
    extract_coeffs,
    field_product,
    laplacian,
    theta_power,
    trace,
)
from .radial import RadialExpr, U0, as_rational


class MissingOrder(LookupError):
    pass


class OriginUnbounded(AssertionError):
    pass


@dataclass(frozen=True)
class FreeCoefficients:
    """Higher radial coefficients ``a_{n,m}``, ``b_{n,m}`` (``1 <= m <= M``) of ``w_k``.

    The same choice is used at every order.  ``M = 0`` gives radially
    constant ``w_k``.
    """

    M: int = 0
    a_free: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    b_free: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    Gamma: Fraction = Fraction(0)

    def __post_init__(self):
        if self.M < 0:
            raise ValueError("M must be >= 0")
        for name, table, nmin in (("a_free", self.a_free, 0), ("b_free", self.b_free, 1)):
            for (n, m) in table:
                if n < nmin or not 1 <= m <= self.M:
                    raise ValueError(f"{name} key {(n, m)} out of range for M = {self.M}")
        object.__setattr__(self, "a_free", {k: as_rational(v) for k, v in self.a_free.items()})
        object.__setattr__(self, "b_free", {k: as_rational(v) for k, v in self.b_free.items()})
        object.__setattr__(self, "Gamma", as_rational(self.Gamma))

    def modes(self) -> tuple[set[int], set[int]]:
        return {n for n, _ in self.a_free}, {n for n, _ in self.b_free}

    def check_decay(self, sigma: float) -> bool:
        """``sum_m |a_{n,m}| <= Gamma exp(-n sigma)`` for every mode (and likewise b)."""
        for table in (self.a_free, self.b_free):
            sums: dict[int, Fraction] = {}
            for (n, _m), v in table.items():
                sums[n] = sums.get(n, Fraction(0)) + abs(v)
            for n, s in sums.items():
                if float(s) > float(self.Gamma) * math.exp(-n * sigma) * (1 + 1e-12):
                    return False
        return True


@dataclass(frozen=True)
class OrderRecord:
    """Boundary data and closure constants produced at one order."""

    k: int
    dirichlet: tuple  # (A0~, {n: A_n~}, {n: B_n~})
    neumann: tuple  # (A0~', {n: A_n~'}, {n: B_n~'})
    a0: dict[int, Fraction]  # a_{n,0}
    b0: dict[int, Fraction]  # b_{n,0}
    C: dict[int, Fraction]
    D: dict[int, Fraction]


@dataclass(frozen=True)
class HierarchyState:
    """``u[0..K]`` and ``w[0..K]`` (``w[0]`` is the zero field) plus boundary targets."""

    g: ThetaField
    u: tuple[FourierField, ...] = (FourierField.radial(U0),)
    w: tuple[FourierField, ...] = (FourierField.zero(),)
    forcings: tuple[FourierField, ...] = (FourierField.zero(),)
    dirichlet_targets: tuple[ThetaField, ...] = (ThetaField.zero(),)
    neumann_targets: tuple[ThetaField, ...] = (ThetaField.radial(Fraction(-1, 2)),)
    records: tuple[OrderRecord, ...] = ()
    free: FreeCoefficients = FreeCoefficients()
    C_const: Fraction = Fraction(1, 2)

    @property
    def K(self) -> int:
        return len(self.u) - 1

    def require(self, k: int) -> None:
        if k > self.K:
            raise MissingOrder(f"order {k} requested but state only reaches {self.K}")


@lru_cache(maxsize=None)
def _g_power(g: ThetaField, h: int) -> FourierField:
    return theta_power(g, h)


@lru_cache(maxsize=4096)
def _trace(u: FourierField, h: int) -> ThetaField:
    return trace(u, h)


def forcing(state: HierarchyState, k: int) -> FourierField:
    """``F^(k) = sum_{j=1}^{k-1} w_j u_{k-j}``."""
    if k < 1:
        raise ValueError("k >= 1")
    state.require(k - 1)
    out = FourierField.zero()
    for j in range(1, k):
        out = out + field_product(state.w[j], state.u[k - j])
    return out


def dirichlet_target(state: HierarchyState, j: int) -> ThetaField:
    """``Phi^(j) = -sum_{h=1}^j g^h/h! d_r^h u_{j-h}(1, t)``."""
    state.require(j - 1)
    g = state.g
    out = ThetaField.zero()
    for h in range(1, j + 1):
        term = field_product(_g_power(g, h), _trace(state.u[j - h], h))
        out = out - term * Fraction(1, math.factorial(h))
    return out


def _binom_half(m: int) -> Fraction:
    out = Fraction(1)
    for i in range(m):
        out *= (Fraction(1, 2) - i) / (i + 1)
    return out


def c_coefficient(g: ThetaField, j: int) -> ThetaField:
    """``mu^j`` coefficient of ``(1 + mu g) sqrt(1 + 2 mu g + mu^2 (g^2 + g'^2))``."""
    if j < 0:
        raise ValueError("j >= 0")
    if j == 0:
        return ThetaField.radial(1)
    gp = dtheta(g)
    q = field_product(g, g) + field_product(gp, gp)
    two_g = g * 2

    def block(jj: int) -> FourierField:
        out = ThetaField.zero()
        for m in range(math.ceil(jj / 2), jj + 1):
            coef = _binom_half(m) * math.comb(m, jj - m)
            out = out + field_product(theta_power(two_g, 2 * m - jj), theta_power(q, jj - m)) * coef
        return out

    return block(j) + field_product(g, block(j - 1))


def neumann_target(state: HierarchyState, j: int) -> ThetaField:
    """``Psi^(j)``: the Neumann condition at order ``j`` solved for ``d_r u_j(1, t)``."""
    state.require(j - 1)
    g = state.g
    gp = dtheta(g)
    out = ThetaField.zero()
    for h in range(0, j):
        e = j - 1 - h
        t1 = field_product(gp, field_product(_g_power(g, e), dtheta(_trace(state.u[h], e))))
        out = out + t1 * Fraction(1, math.factorial(e))
        t2 = field_product(_g_power(g, j - h), _trace(state.u[h], j - h + 1))
        out = out - t2 * Fraction(1, math.factorial(j - h))
        t3 = field_product(_g_power(g, j - h), _trace(state.u[h], j - h))
        out = out - t3 * Fraction(2, math.factorial(j - 1 - h))
    for h in range(0, j - 1):
        t4 = field_product(_g_power(g, j - h), _trace(state.u[h], j - h - 1))
        out = out - t4 * Fraction(1, math.factorial(j - 2 - h))
    return out - c_coefficient(g, j) * state.C_const


def _chi(n: int) -> int:
    return 2 * (2 + n) * (4 + n)


def close_w(
    state: HierarchyState,
    k: int,
    phi: ThetaField,
    psi: ThetaField,
    F: FourierField,
) -> tuple[FourierField, dict[int, Fraction], dict[int, Fraction]]:
    """Fix ``a_{n,0}``, ``b_{n,0}`` so the Dirichlet and Neumann traces are compatible.

    Returns ``(w_k, {n: a_{n,0}}, {n: b_{n,0}})``.
    """
    A0, A, B = extract_coeffs(phi)
    A0p, Ap, Bp = extract_coeffs(psi)
    A = {0: A0, **A}
    Ap = {0: A0p, **Ap}
    free = state.free
    fa, fb = free.modes()

    def closure(n, At, Atp, xi, table):
        extra = sum(
            (v / ((2 + n + m) * (4 + n + m)) for (nn, m), v in table.items() if nn == n),
            Fraction(0),
        )
        return _chi(n) * (Atp - n * At - radial.int01_weighted(xi, n) - extra / 2)

    def profile(n, a_n0, table):
        terms = {(0, 0): a_n0}
        for (nn, m), v in table.items():
            if nn == n:
                terms[(m, 0)] = terms.get((m, 0), 0) + v
        return RadialExpr(terms)

    cos, sin, a0, b0 = {}, {}, {}, {}
    cos_support = set(A) | set(Ap) | {n for n in F.support() if not F.cos_coeff(n).is_zero()} | fa
    for n in sorted(cos_support):
        At, Atp, xi = A.get(n, Fraction(0)), Ap.get(n, Fraction(0)), F.cos_coeff(n)
        if At == 0 and Atp == 0 and xi.is_zero() and n not in fa:
            continue
        a0[n] = closure(n, At, Atp, xi, free.a_free)
        cos[n] = profile(n, a0[n], free.a_free)
    sin_support = set(B) | set(Bp) | set(F.sin_modes) | fb
    for n in sorted(sin_support):
        Bt, Btp, eta = B.get(n, Fraction(0)), Bp.get(n, Fraction(0)), F.sin_coeff(n)
        if Bt == 0 and Btp == 0 and eta.is_zero() and n not in fb:
            continue
        b0[n] = closure(n, Bt, Btp, eta, free.b_free)
        sin[n] = profile(n, b0[n], free.b_free)
    return FourierField._from_modes(cos, sin), a0, b0


def assemble_u(
    state: HierarchyState,
    k: int,
    phi: ThetaField,
    psi: ThetaField,
    w_k: FourierField,
    F: FourierField,
) -> tuple[FourierField, dict[int, Fraction], dict[int, Fraction]]:
    """Bounded Cauchy-Euler solution matching both traces; returns ``(u_k, C, D)``."""
    A0, A, B = extract_coeffs(phi)
    A0p, Ap, Bp = extract_coeffs(psi)
    rhs = w_k * U0 + F  # Cauchy-Euler right-hand sides, mode by mode
    cos, sin, C, D = {}, {}, {}, {}

    f0 = rhs.avg
    if A0 != 0 or not f0.is_zero():
        cos[0] = RadialExpr.const(A0) + radial.op_I_avg(f0)
    for n in sorted(set(A) | set(Ap) | set(rhs.cos_modes)):
        f = rhs.cos_coeff(n)
        C[n] = (A.get(n, Fraction(0)) + Ap.get(n, Fraction(0)) / n) / 2
        cos[n] = radial.op_I_plus(f, n, C[n]) + radial.op_I_minus(f, n)
    for n in sorted(set(B) | set(Bp) | set(rhs.sin_modes)):
        f = rhs.sin_coeff(n)
        D[n] = (B.get(n, Fraction(0)) + Bp.get(n, Fraction(0)) / n) / 2
        sin[n] = radial.op_I_plus(f, n, D[n]) + radial.op_I_minus(f, n)

    u_k = FourierField._from_modes(cos, sin)
    for e in list(u_k.cos_modes.values()) + [u_k.avg] + list(u_k.sin_modes.values()):
        if radial.origin_class(e) is radial.OriginClass.UnboundedAtOrigin:
            raise OriginUnbounded(f"u_{k} has a coefficient unbounded at r = 0: {e!r}")
    return u_k, C, D


def step(state: HierarchyState) -> HierarchyState:
    """Extend a state by one order."""
    k = state.K + 1
    F = forcing(state, k)
    phi = dirichlet_target(state, k)
    psi = neumann_target(state, k)
    w_k, a0, b0 = close_w(state, k, phi, psi, F)
    u_k, C, D = assemble_u(state, k, phi, psi, w_k, F)
    rec = OrderRecord(k, extract_coeffs(phi), extract_coeffs(psi), a0, b0, C, D)
    return replace(
        state,
        u=state.u + (u_k,),
        w=state.w + (w_k,),
        forcings=state.forcings + (F,),
        dirichlet_targets=state.dirichlet_targets + (phi,),
        neumann_targets=state.neumann_targets + (psi,),
        records=state.records + (rec,),
    )


def initial_state(g: ThetaField, free: FreeCoefficients | None = None, C_const=Fraction(1, 2)) -> HierarchyState:
    if not isinstance(g, ThetaField):
        g = ThetaField.from_field(g)
    return HierarchyState(g=g, free=free or FreeCoefficients(), C_const=as_rational(C_const))


def run(g: ThetaField, K: int, free: FreeCoefficients | None = None) -> HierarchyState:
    """Build ``u_0..u_K`` and ``w_1..w_K`` for the boundary perturbation ``g``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    return extend(initial_state(g, free), K)


def extend(state: HierarchyState, K: int) -> HierarchyState:
    while state.K < K:
        state = step(state)
    return state


# --- identities and evaluation ---------------------------------------------------


def hierarchy_residual(state: HierarchyState, k: int) -> FourierField:
    """``Delta u_k - w_k u_0 - F^(k)``; zero for a consistent state."""
    return laplacian(state.u[k]) - state.w[k] * U0 - forcing(state, k)


def boundary_residuals(state: HierarchyState, k: int) -> tuple[ThetaField, ThetaField]:
    return (
        trace(state.u[k], 0) - dirichlet_target(state, k),
        trace(state.u[k], 1) - neumann_target(state, k),
    )


def eval_u(state: HierarchyState, mu: float, r, theta, K: int | None = None):
    from .fourier import eval_field

    K = state.K if K is None else K
    return sum(mu**j * eval_field(state.u[j], r, theta) for j in range(K + 1))


def eval_w(state: HierarchyState, mu: float, r, theta, K: int | None = None):
    from .fourier import eval_field

    K = state.K if K is None else K
    out = np.zeros(np.broadcast(np.asarray(r), np.asarray(theta)).shape)
    for j in range(1, K + 1):
        out = out + mu ** (j - 1) * eval_field(state.w[j], r, theta)
    return out
