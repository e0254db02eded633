"""Acceptance checks; each returns ``(passed, detail)``."""

import math
import random
import time
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from torsion_series import bounds, defects, hierarchy
from torsion_series.fourier import FourierField, ThetaField
from torsion_series.radial import U0, RadialExpr, cauchy_euler_residual, eval_radial, int01_weighted

F = Fraction
G = ThetaField.from_coeffs(0, {4: F(1, 20)})


def _timed(fn, limit):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if dt > limit:
        return False, f"{detail}; took {dt:.2f} s > {limit} s"
    return ok, f"{detail}; {dt:.2f} s"


def worked_example():
    def body():
        st = hierarchy.run(G, 2)
        u1 = RadialExpr({(2, 0): F(6, 40), (4, 0): F(-5, 40), (4, 1): F(9, 40)})
        avg = RadialExpr({(0, 0): F(-73, 6400), (2, 0): F(53, 1600), (4, 0): F(-269, 6400),
                          (6, 0): F(1, 50), (6, 1): F(-9, 400)})
        c8 = RadialExpr({(2, 0): F(247, 78400), (4, 0): F(2293, 313600), (6, 0): F(-9, 2450),
                         (6, 1): F(81, 2800), (8, 0): F(-2227, 313600)})
        checks = {
            "w1": st.w[1] == FourierField(cos={4: RadialExpr.const(F(-36, 5))}),
            "u1": st.u[1] == FourierField(cos={4: u1}),
            "w2": st.w[2] == FourierField(F(53, 100), {8: RadialExpr.const(F(-741, 980))}),
            "u2": st.u[2] == FourierField(avg, {8: c8}),
            "C8": st.records[1].C.get(8) == F(-27, 25600),
        }
        bad = [k for k, v in checks.items() if not v]
        return not bad, "all exact" if not bad else f"mismatch in {bad}"
    return _timed(body, 5.0)


def intermediate_values():
    st = hierarchy.run(G, 2)
    r1, r2 = st.records
    checks = {
        "A4~(1)": r1.dirichlet[1].get(4) == F(1, 40),
        "A4~'(1)": r1.neumann[1].get(4) == F(1, 40),
        "A0~(2)": r2.dirichlet[0] == F(-1, 3200),
        "A8~(2)": r2.dirichlet[1].get(8) == F(-1, 3200),
        "A0~'(2)": r2.neumann[0] == F(-7, 1600),
        "A8~'(2)": r2.neumann[1].get(8) == F(-23, 1600),
        "C4(1)": r1.C.get(4) == F(1, 64),
    }
    bad = [k for k, v in checks.items() if not v]
    return not bad, "all exact" if not bad else f"mismatch in {bad}"


def defect_vanishing():
    def body():
        st4 = hierarchy.run(G, 4)
        for K in (1, 2, 3, 4):
            st = hierarchy.extend(hierarchy.initial_state(G), K)
            R = defects.resolvability_series(st, K)
            ED = defects.dirichlet_series(st, K, K + 2)
            EN = defects.neumann_series(st, K, K + 2)
            if not (R.vanishes_through(K) and ED.vanishes_through(K) and EN.vanishes_through(K)):
                return False, f"nonzero coefficient through order {K}"
            cR, cED, cEN = defects.closed_form_remainders(st, K, K + 2)
            if not (R == cR and ED == cED and EN == cEN):
                return False, f"direct and closed-form tails differ at K = {K}"
        del st4
        ec = bounds.error_constants(bounds.SchemeParams(1, 1, 0, 1))
        L = np.linspace(-math.log(ec.mu0), 5e4, 200)
        logs = [bounds.log_final_bound(None, None, ec.C2, ec.C3, ec.log_C1, log_mu=-l) for l in L]
        decreasing = all(a > b for a, b in zip(logs, logs[1:]))
        superpoly = all(logs[-1] + q * L[-1] < logs[len(L) // 2] + q * L[len(L) // 2] for q in (1, 10, 100))
        if not (decreasing and superpoly):
            return False, "final bound not super-polynomially decreasing"
        return True, "K = 1..4 exact zeros, tails equal through K+2, final bound super-polynomial"
    return _timed(body, 30.0)


def resolvability_structure():
    st = hierarchy.run(G, 3)
    w, u = st.w, st.u
    expected = {
        1: {2: w[1] * u[1]},
        2: {3: w[1] * u[2] + w[2] * u[1], 4: w[2] * u[2]},
        3: {4: w[1] * u[3] + w[2] * u[2] + w[3] * u[1], 5: w[2] * u[3] + w[3] * u[2], 6: w[3] * u[3]},
    }
    for k, terms in expected.items():
        R = defects.resolvability_series(st, k)
        for n in range(2 * k + 1):
            if R.coeff(n) != terms.get(n, FourierField.zero()):
                return False, f"k = {k}, mu^{n} coefficient differs"
    return True, "k = 1, 2, 3 term-by-term exact"


PRINTED_TABLE = [
    (1, 0, 1), (2, 3, 3), (16, 13, 39), (168, 113, 939), (2064, 1313, 28623),
    (27840, 17953, 1043649), (408864, 266753, 44272779), (6423936, 4191809, 2077497615),
    (107487168, 70226401, 107996103879), (1909610496, 1241897857, 6198003389695),
]


def table_reproduction():
    def body():
        t = bounds.recurrence_sequences(bounds.TABLE1_W, bounds.TABLE1_U, 12)
        entries = [(k, i) for k in range(10) for i in range(3)
                   if (t.U[k], t.W[k], t.Z_tilde[k])[i] != PRINTED_TABLE[k][i]]
        catalan_bad = [k for k in range(1, 13) if bounds.catalan_closed_form(3, 4, k) != t.Z_tilde[k]]
        ok = not entries and not catalan_bad
        detail = (f"{30 - len(entries)}/30 entries match (rows k >= 5 differ: "
                  f"U9 = {t.U[9]}, W9 = {t.W[9]}, Z~9 = {t.Z_tilde[9]}); "
                  f"single-term Catalan form equals recurrence only for k = "
                  f"{[k for k in range(1, 13) if k not in catalan_bad]}")
        return ok, detail
    return _timed(body, 1.0)


def smallness_rows():
    printed = [1.8e-2, 1.1e-7, 1.6e-28, 3.8e-112]
    rows = bounds.smallness_table([math.exp(-2), math.exp(-4), math.exp(-8), math.exp(-16)])
    errs = [abs(v - p) / p for (_, v), p in zip(rows, printed)]
    ok = all(e <= 0.02 for e in errs)
    detail = ", ".join(f"{v:.3e} ({100 * e:.1f}%)" for (_, v), e in zip(rows, errs))
    return ok, detail


def numeric_scaling():
    def body():
        st = hierarchy.run(G, 2)
        mus = np.geomspace(1e-3, 1e-1, 20)
        reps = defects.sweep(st, 2, mus, 256, 512)
        sd = defects.fit_loglog_slope(mus, [r.sup_ED for r in reps])
        sn = defects.fit_loglog_slope(mus, [r.sup_EN for r in reps])
        ok = abs(sd - 3) <= 0.2 and abs(sn - 3) <= 0.2
        return ok, f"slopes E_D {sd:.4f}, E_N {sn:.4f}"
    return _timed(body, 60.0)


def _random_integrand(rng):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        terms[(rng.randint(0, 6), rng.randint(0, 3))] = F(rng.randint(-30, 30) or 1, rng.randint(1, 9))
    return RadialExpr(terms), rng.randint(0, 6)


def oracle_suites():
    rng = random.Random(1234)
    worst = 0.0
    for _ in range(100):
        f, n = _random_integrand(rng)
        exact = float(int01_weighted(f, n))
        val, _ = quad(lambda s: eval_radial(f, s) * s ** (1 + n), 0, 1, epsabs=0, epsrel=1e-13, limit=200)
        worst = max(worst, abs(val - exact) / abs(exact))
    if worst > 1e-12:
        return False, f"quadrature disagreement {worst:.2e}"
    modes = 0
    for _ in range(5):
        n_g = rng.randint(1, 6)
        amp = F(rng.randint(1, 10), rng.randint(200, 1000))
        g = ThetaField.from_coeffs(0, {n_g: amp}) if rng.random() < 0.5 else ThetaField.from_coeffs(0, sin={n_g: amp})
        st = hierarchy.run(g, rng.randint(1, 4))
        for k in range(1, st.K + 1):
            rhs = st.w[k] * U0 + hierarchy.forcing(st, k)
            u = st.u[k]
            pairs = [(0, u.avg, rhs.avg)]
            pairs += [(n, u.cos_coeff(n), rhs.cos_coeff(n)) for n in u.support() | rhs.support() if n > 0]
            pairs += [(n, u.sin_coeff(n), rhs.sin_coeff(n)) for n in u.support() | rhs.support() if n > 0]
            for n, A, f in pairs:
                modes += 1
                if not cauchy_euler_residual(A, n, f).is_zero():
                    return False, f"nonzero Cauchy-Euler residual at k = {k}, n = {n}"
    return True, f"quadrature worst rel {worst:.1e}; {modes} assembled modes with zero residual"


CRITERIA = [
    ("worked cos 4θ example reproduced exactly", worked_example),
    ("intermediate boundary coefficients exact", intermediate_values),
    ("defect series vanish through K and tails agree", defect_vanishing),
    ("resolvability tail structure for k = 1, 2, 3", resolvability_structure),
    ("recurrence table and Catalan closed form", table_reproduction),
    ("smallness rows within 2%", smallness_rows),
    ("numeric defect scaling slope 3 ± 0.2", numeric_scaling),
    ("quadrature and Cauchy-Euler oracle suites", oracle_suites),
]
