"""Size estimates for the scheme and the optimal truncation order.

Sequences (``U``, ``W``, ``Z``, ``Z~``) are exact; everything feeding only
inequalities is 64-bit floating point.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import radial
from .fourier import FourierField, ThetaField, dtheta, eval_theta

E = math.e


class InvalidParams(ValueError):
    pass


class MuTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SchemeParams:
    rho: float = 1.0
    sigma: float = 1.0
    Gamma: float = 0.0
    K: int = 1

    def __post_init__(self):
        if not 0 < self.rho <= 1 or not 0 < self.sigma <= 1:
            raise InvalidParams("rho and sigma must lie in (0, 1]")
        if self.Gamma < 0:
            raise InvalidParams("Gamma must be >= 0")
        if self.K < 1:
            raise InvalidParams("K must be >= 1")

    def d(self, k: float) -> float:
        """Shrinking scheme ``d_k = k / (2K)``."""
        return k / (2 * self.K)


# --- section constants -------------------------------------------------------------


@dataclass
class SchemeConstants:
    M_cal: float
    W: tuple[float, float, float]
    U: tuple[float, float, float]
    Z: tuple[float, float, float]
    a: float
    b: float


def scheme_constants(p: SchemeParams) -> SchemeConstants:
    rho, sigma, G, K = p.rho, p.sigma, p.Gamma, p.K
    M = math.exp(4 * K / (E * rho))
    poly2 = 128 * K**2 / (E * sigma) ** 2 + 48 * K / (E * sigma) + 16
    poly3 = 3456 * K**3 / (E * sigma) ** 3 + 768 * K**2 / (E * sigma) ** 2 + 64 * K / (E * sigma)
    W1 = 3 * (poly2 + 4 * G)
    W2 = 3 * (M * (rho / sigma + M * (K + 1)) * poly2 + M * poly3)
    W3 = 3 * (4 * K / (E * sigma) + 8)
    U1 = W1 + 6
    U2 = W2 + 6 * M * (1 + sigma / rho + M * (K + 1))
    U3 = W3 + 6
    Z = (max(W1, U1), max(W2, U2), max(W3, U3))
    Z0 = 1.0
    return SchemeConstants(M, (W1, W2, W3), (U1, U2, U3), Z, Z[0] + Z[1] * Z0, Z[1] + Z[2])


@dataclass
class SequenceTable:
    U: list
    W: list
    Z: list
    Z_tilde: list

    def rows(self):
        return list(zip(range(len(self.U)), self.U, self.W, self.Z_tilde))

    def majorizes(self) -> bool:
        return all(u <= z and w <= z for u, w, z in zip(self.U, self.W, self.Z_tilde))


def recurrence_sequences(Wc: Sequence, Uc: Sequence, k_max: int) -> SequenceTable:
    """Coupled ``(W_k, U_k)`` recurrences and the majorants ``Z_k``, ``Z~_k``.

    Integer or Fraction constants give exact sequences.
    """
    W1, W2, W3 = Wc
    U1, U2, U3 = Uc
    U, W = [1], [0]
    for k in range(1, k_max + 1):
        sU = sum(U[:k])
        conv = sum(W[j] * U[k - j] for j in range(1, k))
        W.append(W1 + W2 * sU + W3 * conv)
        U.append(U1 + U2 * sU + U3 * conv)
    Z1, Z2, Z3 = (max(x, y) for x, y in zip(Wc, Uc))
    Z = [max(W[0], U[0])]
    for k in range(1, k_max + 1):
        Z.append(Z1 + Z2 * sum(Z[:k]) + Z3 * sum(Z[j] * Z[k - j] for j in range(1, k)))
    return SequenceTable(U, W, Z, ztilde_sequence(Z1 + Z2 * Z[0], Z2 + Z3, k_max, Z[0]))


def ztilde_sequence(a, b, k_max: int, z0=1) -> list:
    """``Z~_0 = z0``, ``Z~_k = a + b sum_{j=1}^{k-1} Z~_j Z~_{k-j}``."""
    Zt = [z0]
    for k in range(1, k_max + 1):
        Zt.append(a + b * sum(Zt[j] * Zt[k - j] for j in range(1, k)))
    return Zt


def catalan_closed_form(a, b, k: int):
    """``Z~_k = (a/k) binom(2(k-1), k-1) (ab)^(k-1)``, exact for int/Fraction input."""
    if k < 1:
        raise ValueError("k >= 1")
    return Fraction(a) * math.comb(2 * (k - 1), k - 1) * (Fraction(a) * b) ** (k - 1) / k


def ztilde_closed_form(a, b, k: int):
    """Exact solution of ``Z~_k = a + b sum Z~_j Z~_{k-j}`` for ``k >= 1``.

    Expanding ``G = a z/(1-z) + b G^2`` gives
    ``sum_n binom(k-1, n-1) Cat(n-1) a^n b^(n-1)``; the single-term Catalan
    form above is its ``n = k`` term.
    """
    if k < 1:
        raise ValueError("k >= 1")
    a, b = Fraction(a), Fraction(b)
    total = Fraction(0)
    for n in range(1, k + 1):
        cat = math.comb(2 * (n - 1), n - 1) // n
        total += math.comb(k - 1, n - 1) * cat * a**n * b ** (n - 1)
    return total


TABLE1_W = (1, 2, 1)
TABLE1_U = (1, 1, 2)


def table1_text(k_max: int = 9) -> str:
    t = recurrence_sequences(TABLE1_W, TABLE1_U, k_max)
    lines = ["k | U_k | W_k | Z~_k"]
    lines += [f"{k} | {u} | {w} | {z}" for k, u, w, z in t.rows()]
    return "\n".join(lines) + "\n"


# --- exponential envelope ---------------------------------------------------------


@dataclass
class Envelope:
    A: tuple[float, float, float, float]
    B: tuple[float, float, float, float]
    Theta: float
    Theta_max: float
    B_script: float
    alpha: float

    def P_a(self, K):
        return sum(c * K**i for i, c in enumerate(self.A))

    def P_b(self, K):
        return sum(c * K**i for i, c in enumerate(self.B))


def exponential_envelope(p: SchemeParams) -> Envelope:
    """Polynomial coefficients of ``a, b <= e^(2 alpha K) P(K)`` and the derived constants."""
    rho, s, G = p.rho, p.sigma, p.Gamma
    A0 = (24 * G * rho * s + 24 * rho**2 + 30 * rho * s + 3 * s**2 + 108 * rho * s) / (2 * rho * s)
    A1 = (27 * E * s**2 + 72 * rho + 168 * s + 288 * s) / (2 * E * s**2)
    A2 = (36 * E * s**2 + 96 * rho + 672 * s + 384 * s) / (E**2 * s**3)
    A3 = (96 * E * s + 2592) / (E**3 * s**3)
    B0 = (48 * rho**2 + 60 * rho * s + 6 * s**2 + 30 * rho * s) / (rho * s)
    B1 = (54 * E * s**2 + 144 * rho + 336 * s + 12 * s) / (E * s**2)
    B2 = (144 * E * s**2 + 384 * rho + 2688 * s) / (E**2 * s**3)
    B3 = (384 * E * s + 10368) / (E**3 * s**3)
    Theta = (
        144 + 12 * G + 48 * rho / s + 6 * s / rho
        + 144 * rho / (E * s**2) + 492 / (E * s)
        + 384 * rho / (E**2 * s**3) + 3072 / (E**2 * s**2)
        + 10368 / (E**3 * s**3)
    )
    Theta_max = max(A0 + A1 + A2 + A3, B0 + B1 + B2 + B3)
    if Theta < Theta_max * (1 - 1e-12):
        raise AssertionError(f"collected Theta {Theta} below max of coefficient sums {Theta_max}")
    return Envelope(
        (A0, A1, A2, A3), (B0, B1, B2, B3), Theta, Theta_max,
        B_script=27 / 8 * Theta * rho**3,
        alpha=4 / (E * rho),
    )


def cubic_exp_constant(coeffs: Sequence[float], alpha: float) -> float:
    """``[3/(e alpha)]^3 sum c_j``: bounds ``e^(alpha x) P(x) <= . e^(2 alpha x)`` for ``x >= 1``."""
    return (3 / (E * alpha)) ** 3 * sum(coeffs)


# --- optimal order and final constants ------------------------------------------------


def G_envelope(K: float, B_script: float, alpha: float, mu: float) -> float:
    """``(2 e B^2 mu)^K e^(4 alpha K^2)``."""
    return math.exp(log_G(K, B_script, alpha, mu))


def log_G(K: float, B_script: float, alpha: float, mu: float) -> float:
    return K * math.log(2 * E * B_script**2 * mu) + 4 * alpha * K**2


def optimal_order(B_script: float, alpha: float, mu: float, mu0: float | None = None):
    """Return ``(K_star, K_opt, G(K_opt))``."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    if mu0 is not None and mu > mu0:
        raise MuTooLarge(f"mu = {mu} exceeds mu0 = {mu0}")
    K_star = -math.log(2 * E * B_script**2 * mu) / (8 * alpha)
    K_opt = math.ceil(K_star)
    return K_star, K_opt, G_envelope(K_opt, B_script, alpha, mu)


@dataclass
class ErrorConstants:
    C0: float
    C1: float
    C2: float
    C3: float
    C4: float
    C5: float
    mu0: float
    log_C1: float


def error_constants(p: SchemeParams, B_script: float | None = None) -> ErrorConstants:
    rho, sigma = p.rho, p.sigma
    if B_script is None:
        B_script = exponential_envelope(p).B_script
    C0 = math.exp(16 / (E * rho))
    C2 = E * rho / 64
    C3 = 2 * E * B_script**2
    log_C1 = math.log(C0) - C2 * math.log(C3) ** 2
    C1 = math.exp(log_C1)
    C4 = 4 * math.exp(4 / (rho * sigma)) * C3 ** (-7 / 16) * C1
    C5 = math.exp(8 / (rho * sigma)) * (rho / sigma + 8 + E * rho / 2) / C3 * C1
    mu0 = min(1 / C3, 0.5 * math.exp(-32 / (E * rho))) / C3
    return ErrorConstants(C0, C1, C2, C3, C4, C5, mu0, log_C1)


def log_final_bound(
    mu: float | None, C1: float | None, C2: float, C3: float,
    log_C1: float | None = None, log_mu: float | None = None,
) -> float:
    """``log(C1 mu^(C2 (log(1/mu) - 2 log C3)))``.

    Pass ``log_mu`` instead of ``mu`` for values below the float range.
    """
    lc1 = math.log(C1) if log_C1 is None else log_C1
    lm = math.log(mu) if log_mu is None else log_mu
    return lc1 + C2 * (-lm - 2 * math.log(C3)) * lm


def final_bound(mu: float, C1: float, C2: float, C3: float) -> float:
    return math.exp(log_final_bound(mu, C1, C2, C3))


def smallness_table(mus: Sequence[float]) -> list[tuple[float, float]]:
    """Rows ``(mu, exp(-(log(1/mu))^2))``."""
    out = []
    for mu in mus:
        if not 0 < mu < 1:
            raise ValueError("mu must lie in (0, 1)")
        out.append((mu, math.exp(-math.log(1 / mu) ** 2)))
    return out


# --- mode-sum inequalities -------------------------------------------------------


def mode_weight_bounds(K: int, sigma: float) -> tuple[float, float, float]:
    """Right-hand sides bounding the three mode weights used in the scheme."""
    x = K / (E * sigma)
    return 2 * x + 4, 64 * x**2 + 24 * x + 8, 1728 * x**3 + 384 * x**2 + 32 * x


def mode_weight_values(K: int, sigma: float, n_max: int = 20000, reduce=max) -> tuple[float, float, float]:
    """``reduce`` over ``n >= 1`` of the weights with shrink ``sigma/(2K)`` (first) and ``sigma/(4K)``.

    ``reduce=max`` gives the termwise suprema that the bounds control;
    ``reduce=sum`` gives the full series.
    """
    n = np.arange(1, n_max + 1, dtype=float)
    e1 = np.exp(-n * sigma / (2 * K))
    e2 = np.exp(-n * sigma / (4 * K))
    return (
        float(reduce((4 + n) * e1)),
        float(reduce((2 + n) * (4 + n) * e2)),
        float(reduce(n * (2 + n) * (4 + n) * e2)),
    )


# --- norms --------------------------------------------------------------------


def stadium_boundary(rho: float, r_max: float, n: int = 256) -> np.ndarray:
    """Boundary samples of ``union_{r in [0, r_max]} {|z - r| <= rho}``."""
    m = max(n, 256) // 4 | 1  # odd, so each arc contains its real-axis point
    phi = np.linspace(-np.pi / 2, np.pi / 2, m)
    right = r_max + rho * np.exp(1j * phi)
    left = rho * np.exp(1j * (phi + np.pi))
    xs = np.linspace(0.0, r_max, m)
    return np.concatenate([right, left, xs + 1j * rho, xs - 1j * rho])


def radial_sup_estimate(e: radial.RadialExpr, rho: float, r_max: float, n: int = 256) -> float:
    if e.is_constant():
        return abs(float(e.constant_value()))
    z = stadium_boundary(rho, r_max, n)
    return float(np.max(np.abs(radial.eval_radial(e, z))))


def norm_estimate(F: FourierField, rho: float, sigma: float, mu: float, g: ThetaField | None = None, n: int = 256) -> float:
    """Sampling estimate (not a certified bound) of the weighted Fourier norm.

    Radial sups are taken over the boundary of the complexified radial region
    around ``[0, 1 + mu max|g|]``.
    """
    gmax = 0.0
    if g is not None and not g.is_zero():
        t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        gmax = float(np.max(np.abs(eval_theta(g, t))))
    r_max = 1 + mu * gmax
    total = radial_sup_estimate(F.avg, rho, r_max, n)
    for modes in (F.cos_modes, F.sin_modes):
        for k, e in modes.items():
            total += radial_sup_estimate(e, rho, r_max, n) * math.exp(k * sigma)
    return total


def strip_sup_estimate(T: ThetaField, sigma: float, n: int = 2048) -> float:
    """``sup |T|`` on the strip ``|Im t| <= sigma``, sampled on its edges."""
    x = np.linspace(0, 2 * np.pi, n, endpoint=False)
    vals = [np.abs(eval_theta(T, x + 1j * s)) for s in (sigma, -sigma)]
    return float(max(v.max() for v in vals))


def admissible_sigma(g: ThetaField, G: float = 0.25, kind: str = "fourier", sigma_max: float = 1.0) -> float:
    """Largest ``sigma <= sigma_max`` with ``||g||, ||g'|| <= G``.

    ``kind="fourier"`` uses the weighted coefficient norm, ``kind="strip"`` the
    sup over the complex strip.
    """
    gp = dtheta(g)
    if kind == "fourier":
        fn = lambda s: max(norm_estimate(g, 1.0, s, 0.0), norm_estimate(gp, 1.0, s, 0.0))
    elif kind == "strip":
        fn = lambda s: max(strip_sup_estimate(g, s), strip_sup_estimate(gp, s))
    else:
        raise ValueError(kind)
    if fn(0.0) > G:
        return 0.0
    if fn(sigma_max) <= G:
        return sigma_max
    return brentq(lambda s: fn(s) - G, 0.0, sigma_max, xtol=1e-14)


# --- full report -------------------------------------------------------------------


@dataclass
class BoundReport:
    params: dict
    mu: float
    M_cal: float
    W: tuple
    U: tuple
    Z: tuple
    a: float
    b: float
    alpha: float
    A: tuple
    B: tuple
    Theta: float
    Theta_max: float
    B_script: float
    K_star: float
    K_opt: int | None
    K_used: int
    mu0: float
    C0: float
    C1: float
    C2: float
    C3: float
    C4: float
    C5: float
    log_final_bound: float
    notes: list = field(default_factory=list)

    def as_dict(self):
        return asdict(self)


def bound_report(rho: float, sigma: float, Gamma: float, mu: float, K_fallback: int = 1) -> BoundReport:
    """Envelope first (independent of K), then ``K_opt``, then constants at ``K_opt``."""
    base = SchemeParams(rho, sigma, Gamma, 1)
    env = exponential_envelope(base)
    ec = error_constants(base, env.B_script)
    notes = []
    K_star = -math.log(2 * E * env.B_script**2 * mu) / (8 * env.alpha)
    if mu <= ec.mu0:
        _, K_opt, _ = optimal_order(env.B_script, env.alpha, mu, ec.mu0)
        K_used = max(K_opt, 1)
    else:
        K_opt = None
        K_used = K_fallback
        notes.append(f"mu = {mu:g} exceeds mu0 = {ec.mu0:.6g}; constants shown at K = {K_fallback}")
    sc = scheme_constants(SchemeParams(rho, sigma, Gamma, K_used))
    return BoundReport(
        params={"rho": rho, "sigma": sigma, "Gamma": Gamma},
        mu=mu, M_cal=sc.M_cal, W=sc.W, U=sc.U, Z=sc.Z, a=sc.a, b=sc.b,
        alpha=env.alpha, A=env.A, B=env.B, Theta=env.Theta, Theta_max=env.Theta_max,
        B_script=env.B_script, K_star=K_star, K_opt=K_opt, K_used=K_used, mu0=ec.mu0,
        C0=ec.C0, C1=ec.C1, C2=ec.C2, C3=ec.C3, C4=ec.C4, C5=ec.C5,
        log_final_bound=log_final_bound(mu, None, ec.C2, ec.C3, ec.log_C1),
        notes=notes,
    )
