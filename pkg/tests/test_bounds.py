import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_series import bounds
from torsion_series.bounds import (
    TABLE1_U,
    TABLE1_W,
    InvalidParams,
    MuTooLarge,
    SchemeParams,
    catalan_closed_form,
    cubic_exp_constant,
    error_constants,
    exponential_envelope,
    final_bound,
    log_final_bound,
    log_G,
    optimal_order,
    recurrence_sequences,
    scheme_constants,
    smallness_table,
    ztilde_closed_form,
    ztilde_sequence,
)
from torsion_series.fourier import FourierField, ThetaField
from torsion_series.radial import U0

from helpers import G_COS4

E = math.e

PRINTED_TABLE = [
    (1, 0, 1), (2, 3, 3), (16, 13, 39), (168, 113, 939), (2064, 1313, 28623),
    (27840, 17953, 1043649), (408864, 266753, 44272779), (6423936, 4191809, 2077497615),
    (107487168, 70226401, 107996103879), (1909610496, 1241897857, 6198003389695),
]


@pytest.fixture(scope="module")
def table():
    return recurrence_sequences(TABLE1_W, TABLE1_U, 12)


def test_params_validation():
    with pytest.raises(InvalidParams):
        SchemeParams(rho=1.5)
    with pytest.raises(InvalidParams):
        SchemeParams(K=0)
    with pytest.raises(InvalidParams):
        SchemeParams(Gamma=-1)
    assert SchemeParams(K=4).d(2) == 0.25


def test_scheme_constants():
    sc = scheme_constants(SchemeParams(1, 1, 0, 1))
    assert sc.W[2] / 3 == pytest.approx(4 / E + 8, rel=1e-15)
    assert sc.M_cal == pytest.approx(math.exp(4 / E))
    for K in (1, 3):
        sc = scheme_constants(SchemeParams(0.7, 0.4, 0.2, K))
        assert sc.U[2] == sc.W[2] + 6
        assert sc.Z == sc.U
        assert sc.a == sc.Z[0] + sc.Z[1]
        assert sc.b == sc.Z[1] + sc.Z[2]


def test_u_constants_match_collected_forms():
    rho, sigma, G, K = 0.8, 0.6, 0.3, 2
    sc = scheme_constants(SchemeParams(rho, sigma, G, K))
    M = math.exp(4 * K / (E * rho))
    x = K / (E * sigma)
    assert sc.U[0] == pytest.approx(384 * x**2 + 144 * x + 54 + 12 * G)
    assert sc.U[2] == pytest.approx(12 * x + 30)
    poly2 = 128 * x**2 + 48 * x + 16
    poly3 = 3456 * x**3 + 768 * x**2 + 64 * x
    U2 = 3 * M * (rho / sigma + M * (K + 1)) * poly2 + 3 * M * poly3 + 6 * M * (1 + sigma / rho + M * (K + 1))
    assert sc.U[1] == pytest.approx(U2)


def test_first_table_rows_match(table):
    for k in range(5):
        assert (table.U[k], table.W[k], table.Z_tilde[k]) == PRINTED_TABLE[k]


def test_sequences_follow_their_recurrences(table):
    W1, W2, W3 = TABLE1_W
    U1, U2, U3 = TABLE1_U
    for k in range(1, 13):
        conv = sum(table.W[j] * table.U[k - j] for j in range(1, k))
        assert table.W[k] == W1 + W2 * sum(table.U[:k]) + W3 * conv
        assert table.U[k] == U1 + U2 * sum(table.U[:k]) + U3 * conv


@pytest.mark.xfail(strict=True, reason="printed rows k >= 5 are not generated by the printed recurrences")
def test_printed_rows_from_five_on(table):
    for k in range(5, 10):
        assert (table.U[k], table.W[k], table.Z_tilde[k]) == PRINTED_TABLE[k]


def test_printed_rows_are_not_self_consistent():
    # feed the printed rows back into the recurrence one step at a time
    U = [r[0] for r in PRINTED_TABLE]
    W = [r[1] for r in PRINTED_TABLE]
    conv = sum(W[j] * U[5 - j] for j in range(1, 5))
    assert 1 + sum(U[:5]) + 2 * conv == 27872 != U[5]


def test_majorization(table):
    for k in range(13):
        assert table.U[k] <= table.Z[k] <= table.Z_tilde[k]
        assert table.W[k] <= table.Z[k] <= table.Z_tilde[k]
    assert table.majorizes()


def test_sequences_are_exact_with_rational_constants():
    t = recurrence_sequences((Fraction(1, 3), 1, 1), (Fraction(1, 2), 1, 1), 4)
    assert all(isinstance(x, (int, Fraction)) for x in t.U + t.W + t.Z_tilde)


def test_catalan_closed_form_basics():
    assert catalan_closed_form(3, 4, 1) == 3
    assert catalan_closed_form(7, 2, 1) == 7
    # printed form is the top term of the exact expansion
    assert catalan_closed_form(3, 4, 2) == 36
    assert catalan_closed_form(3, 4, 5) == 870912


@pytest.mark.xfail(strict=True, reason="single-term Catalan form omits lower binomial terms")
def test_catalan_closed_form_reproduces_table():
    assert catalan_closed_form(3, 4, 2) == 39
    assert catalan_closed_form(3, 4, 5) == 1043649


@pytest.mark.parametrize("a", [1, 2, 3, 4])
@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_exact_closed_form_solves_recurrence(a, b):
    seq = ztilde_sequence(a, b, 12)
    assert [ztilde_closed_form(a, b, k) for k in range(1, 13)] == seq[1:]


def test_catalan_form_is_lower_bound_of_recurrence():
    for a in range(1, 5):
        for b in range(1, 5):
            seq = ztilde_sequence(a, b, 12)
            assert all(catalan_closed_form(a, b, k) <= seq[k] for k in range(1, 13))


def test_envelope_constants():
    env = exponential_envelope(SchemeParams(1, 1, 0, 1))
    assert env.alpha == pytest.approx(4 / E)
    d = exponential_envelope(SchemeParams(1, 1, 1, 1)).Theta - env.Theta
    assert d == pytest.approx(12)
    assert env.Theta >= env.Theta_max * (1 - 1e-12)
    for rho in (0.3, 0.7, 1.0):
        e = exponential_envelope(SchemeParams(rho, 0.5, 0, 1))
        assert e.B_script / (e.Theta * rho**3) == pytest.approx(27 / 8)


@pytest.mark.parametrize("rho,sigma,G", [(1, 1, 0), (0.5, 0.2, 3), (0.9, 0.05, 0.1)])
def test_collected_theta_is_b_sum_plus_gamma(rho, sigma, G):
    env = exponential_envelope(SchemeParams(rho, sigma, G, 1))
    assert env.Theta == pytest.approx(sum(env.B) + 12 * G, rel=1e-13)
    assert env.Theta >= sum(env.A)


@pytest.mark.parametrize("K", range(2, 21))
def test_envelope_dominates_a_and_b(K):
    p = SchemeParams(1, 1, 0, K)
    sc, env = scheme_constants(p), exponential_envelope(p)
    grow = math.exp(2 * env.alpha * K)
    assert sc.a <= env.P_a(K) * grow
    assert sc.b <= env.P_b(K) * grow


@pytest.mark.xfail(strict=True, reason="printed A coefficients fall short of a at K = 1")
def test_envelope_dominates_a_at_first_order():
    p = SchemeParams(1, 1, 0, 1)
    sc, env = scheme_constants(p), exponential_envelope(p)
    assert sc.a <= env.P_a(1) * math.exp(2 * env.alpha)


@settings(max_examples=50)
@given(
    st.lists(st.floats(0, 100, allow_nan=False), min_size=4, max_size=4),
    st.floats(0.1, 1.0),
)
def test_cubic_exponential_bound(c, rho):
    alpha = 4 / (E * rho)
    C = cubic_exp_constant(c, alpha)
    for x in range(1, 51):
        # f(x) / e^(2 alpha x)
        scaled = math.exp(-alpha * x) * sum(cj * x**j for j, cj in enumerate(c))
        assert scaled <= C * (1 + 1e-12)


def test_optimal_order_example():
    mu = math.exp(-17) / (2 * E)
    K_star, K_opt, G = optimal_order(1.0, 1.0, mu)
    assert K_star == pytest.approx(17 / 8)
    assert K_opt == 3
    grid = np.linspace(0, 6, 60001)
    vals = [log_G(x, 1.0, 1.0, mu) for x in grid]
    assert grid[int(np.argmin(vals))] == pytest.approx(K_star, abs=1e-4)
    assert G <= math.exp(4 * 1.0) * math.exp(log_G(K_star, 1.0, 1.0, mu)) * (1 + 1e-12)


def test_optimal_order_bound_at_real_constants():
    p = SchemeParams(1, 1, 0, 1)
    env = exponential_envelope(p)
    ec = error_constants(p, env.B_script)
    for mu in (ec.mu0, ec.mu0 * 1e-3, ec.mu0 * 1e-30):
        K_star, K_opt, _ = optimal_order(env.B_script, env.alpha, mu, ec.mu0)
        lg = log_G(K_opt, env.B_script, env.alpha, mu)
        L = math.log(2 * E * env.B_script**2 * mu)
        assert lg <= 16 / E - (E / 64) * L**2 + 1e-9 * abs(lg)
        assert lg <= 4 * env.alpha + log_G(K_star, env.B_script, env.alpha, mu) + 1e-9 * abs(lg)
        assert K_opt >= 1


def test_optimal_order_monotone_and_guarded():
    p = SchemeParams(1, 1, 0, 1)
    env = exponential_envelope(p)
    ec = error_constants(p, env.B_script)
    mus = ec.mu0 * np.geomspace(1e-40, 1, 200)
    orders = [optimal_order(env.B_script, env.alpha, m, ec.mu0)[1] for m in mus]
    assert all(a >= b for a, b in zip(orders, orders[1:]))
    with pytest.raises(MuTooLarge):
        optimal_order(env.B_script, env.alpha, ec.mu0 * 2, ec.mu0)


def test_error_constants():
    p = SchemeParams(1, 1, 0, 1)
    ec = error_constants(p)
    assert ec.C2 == pytest.approx(E / 64)
    assert ec.C0 == pytest.approx(math.exp(16 / E))
    assert ec.mu0 == pytest.approx(min(1 / ec.C3, 0.5 * math.exp(-32 / E)) / ec.C3)
    assert math.log(ec.C1) == pytest.approx(math.log(ec.C0) - ec.C2 * math.log(ec.C3) ** 2)
    assert all(v > 0 for v in (ec.C0, ec.C1, ec.C2, ec.C3, ec.C4, ec.C5, ec.mu0))


def test_final_bound_simplified():
    assert final_bound(math.exp(-4), 1, 1, 1) == pytest.approx(math.exp(-16))
    assert float(f"{final_bound(math.exp(-4), 1, 1, 1):.1e}") == 1.1e-7


def test_final_bound_is_superpolynomial():
    ec = error_constants(SchemeParams(1, 1, 0, 1))
    L = np.linspace(-math.log(ec.mu0), 1e5, 400)
    logs = [log_final_bound(None, None, ec.C2, ec.C3, ec.log_C1, log_mu=-l) for l in L]
    assert all(a > b for a, b in zip(logs, logs[1:]))
    for q in (1, 5, 20, 100):
        ratio = [lf + q * l for lf, l in zip(logs, L)]  # log(bound / mu^q)
        tail = ratio[3 * len(ratio) // 4:]
        assert all(a > b for a, b in zip(tail, tail[1:]))
        assert ratio[-1] < -1e3


def test_smallness_rows():
    rows = smallness_table([math.exp(-2), math.exp(-4), math.exp(-8), math.exp(-16)])
    expected = [1.8e-2, 1.1e-7, 1.6e-28]
    for (_, v), e in zip(rows, expected):
        assert float(f"{v:.1e}") == e
    assert rows[0][1] == pytest.approx(1.8e-2, rel=0.02, abs=0)
    assert rows[2][1] == pytest.approx(1.6e-28, rel=0.02, abs=0)
    assert rows[3][1] == pytest.approx(math.exp(-256), rel=1e-12, abs=0)
    with pytest.raises(ValueError):
        smallness_table([1.5])


@pytest.mark.xfail(strict=True, reason="exp(-256) is 6.6e-112, not the printed 3.8e-112")
def test_smallness_printed_last_row():
    assert float(f"{smallness_table([math.exp(-16)])[0][1]:.1e}") == 3.8e-112


@pytest.mark.parametrize("K", range(2, 11))
@pytest.mark.parametrize("sigma", [0.1, 0.5, 1.0])
def test_mode_weight_bounds_hold_termwise(K, sigma):
    rhs = bounds.mode_weight_bounds(K, sigma)
    sup = bounds.mode_weight_values(K, sigma)
    assert all(s <= r for s, r in zip(sup, rhs))


def test_mode_weight_bounds_fail_as_series():
    rhs = bounds.mode_weight_bounds(2, 1.0)
    total = bounds.mode_weight_values(2, 1.0, reduce=sum)
    assert total[0] > rhs[0]


def test_norm_estimate_examples():
    for sigma in (0.0, 0.1, 0.5):
        assert bounds.norm_estimate(G_COS4, 1.0, sigma, 0.0) == pytest.approx(math.exp(4 * sigma) / 20)
    u0 = FourierField.radial(U0)
    assert bounds.norm_estimate(u0, 1.0, 1.0, 0.0) <= 1
    assert bounds.norm_estimate(u0, 1.0, 1.0, 0.0) == pytest.approx(0.75)


def test_u0_norm_threshold_is_below_sqrt3():
    u0 = FourierField.radial(U0)
    threshold = math.sqrt(5) - 1  # (rho^2 + 2 rho)/4 = 1
    assert bounds.norm_estimate(u0, threshold * 0.999, 1.0, 0.0) <= 1
    assert bounds.norm_estimate(u0, math.sqrt(3), 1.0, 0.0) > 1


def test_admissible_sigma_both_readings():
    s_fourier = bounds.admissible_sigma(G_COS4, 0.25, "fourier")
    s_strip = bounds.admissible_sigma(G_COS4, 0.25, "strip")
    assert s_fourier == pytest.approx(math.log(5 / 4) / 4, abs=1e-9)
    assert s_strip == pytest.approx(math.acosh(1.25) / 4, abs=1e-9)
    assert s_strip == pytest.approx(math.log(2) / 4, abs=1e-9)
    assert bounds.admissible_sigma(ThetaField.zero(), 0.25) == 1.0


def test_bound_report_orders_steps():
    rep = bounds.bound_report(1.0, 1.0, 0.0, 1e-30)
    assert rep.K_opt == math.ceil(rep.K_star)
    assert rep.K_used == max(rep.K_opt, 1)
    big = bounds.bound_report(1.0, 0.1733, 0.0, 0.25)
    assert big.K_opt is None and big.notes
