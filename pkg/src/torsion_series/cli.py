"""Command-line front end.

Exit codes: 0 success, 2 bad configuration or arguments, 3 a checked identity
or internal assertion failed.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds, defects, hierarchy
from .fourier import eval_theta
from .serialization import (
    EXAMPLE_CONFIG,
    ConfigError,
    ProblemConfig,
    config_from_doc,
    dumps,
    field_str,
    load_config,
    load_state,
    save_state,
)

EXIT_OK, EXIT_CONFIG, EXIT_ASSERT = 0, 2, 3


# --- argument helpers -------------------------------------------------------------


def parse_grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        n_r, n_t = int(a), int(b)
    except ValueError as exc:
        raise ConfigError(f"grid must look like RxT, got {text!r}") from exc
    if n_r < 8 or n_t < 8:
        raise ConfigError("grid must be at least 8x8")
    return n_r, n_t


def parse_sweep(text: str) -> np.ndarray:
    """``LO:HI:N`` gives ``N`` log-spaced values."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ConfigError(f"sweep must look like LO:HI:N, got {text!r}") from exc
    if not 0 < lo < hi <= 1 or n < 2:
        raise ConfigError("sweep needs 0 < LO < HI <= 1 and N >= 2")
    return np.geomspace(lo, hi, n)


def parse_mu_list(text: str) -> list[float]:
    """Comma separated values; ``e-4`` means ``exp(-4)``."""
    out = []
    for item in text.split(","):
        item = item.strip()
        try:
            if item.startswith("e"):
                out.append(math.exp(float(item[1:])))
            else:
                out.append(float(item))
        except ValueError as exc:
            raise ConfigError(f"bad mu value {item!r}") from exc
    return out


def _config(args) -> ProblemConfig:
    cfg = load_config(args.config) if args.config else config_from_doc(dict(EXAMPLE_CONFIG))
    if getattr(args, "k", None) is not None:
        cfg.K = args.k
    if getattr(args, "mu", None) is not None:
        cfg.mu = args.mu
    if getattr(args, "grid", None):
        cfg.n_r, cfg.n_theta = parse_grid(args.grid)
    return ProblemConfig(**vars(cfg))


def _out_dir(args, cfg: ProblemConfig | None = None) -> Path:
    out = Path(args.out or (cfg.outputs if cfg else "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])


# --- solve ------------------------------------------------------------------------


def summary_text(state: hierarchy.HierarchyState) -> str:
    lines = [f"g = {field_str(state.g)}", f"K = {state.K}", ""]
    for k in range(1, state.K + 1):
        lines.append(f"w_{k} = {field_str(state.w[k])}")
    lines.append("")
    for k in range(state.K + 1):
        lines.append(f"u_{k} = {field_str(state.u[k])}")
    lines.append("")
    for rec in state.records:
        A0, A, B = rec.dirichlet
        A0p, Ap, Bp = rec.neumann
        lines.append(f"order {rec.k}:")
        lines.append(f"  dirichlet avg {A0} cos {_tbl(A)} sin {_tbl(B)}")
        lines.append(f"  neumann   avg {A0p} cos {_tbl(Ap)} sin {_tbl(Bp)}")
        lines.append(f"  C {_tbl(rec.C)} D {_tbl(rec.D)}")
    return "\n".join(lines) + "\n"


def _tbl(d: dict) -> str:
    return "{" + ", ".join(f"{n}: {v}" for n, v in sorted(d.items())) + "}"


def cmd_solve(args) -> int:
    cfg = _config(args)
    state = hierarchy.run(cfg.g_theta(), cfg.K, cfg.free())
    out = _out_dir(args, cfg)
    save_state(state, out / "state.json")
    text = summary_text(state)
    (out / "summary.txt").write_text(text)
    print(text, end="")
    return EXIT_OK


# --- validate ---------------------------------------------------------------------


def validation_checks(state: hierarchy.HierarchyState) -> list[tuple[str, bool]]:
    """Named exact identities; every entry must be True for a consistent state."""
    K = state.K
    checks = []
    for k in range(1, K + 1):
        checks.append((f"hierarchy equation at order {k}", hierarchy.hierarchy_residual(state, k).is_zero()))
        rd, rn = hierarchy.boundary_residuals(state, k)
        checks.append((f"Dirichlet trace at order {k}", rd.is_zero()))
        checks.append((f"Neumann trace at order {k}", rn.is_zero()))
        checks.append((f"origin boundedness of u_{k}", all(
            e.origin_class() is not hierarchy.radial.OriginClass.UnboundedAtOrigin
            for e in list(state.u[k].cos_modes.values()) + list(state.u[k].sin_modes.values()) + [state.u[k].avg]
        )))
    order = K + 2
    R = defects.resolvability_series(state, K)
    ED = defects.dirichlet_series(state, K, order)
    EN = defects.neumann_series(state, K, order)
    cR, cED, cEN = defects.closed_form_remainders(state, K, order)
    checks.append((f"resolvability defect vanishes through mu^{K}", R.vanishes_through(K)))
    checks.append((f"Dirichlet defect vanishes through mu^{K}", ED.vanishes_through(K)))
    checks.append((f"Neumann defect vanishes through mu^{K}", EN.vanishes_through(K)))
    checks.append(("resolvability tail matches closed form", R == cR))
    checks.append((f"Dirichlet tail matches closed form through mu^{order}", ED == cED))
    checks.append((f"Neumann tail matches closed form through mu^{order}", EN == cEN))
    return checks


def cmd_validate(args) -> int:
    if args.state:
        state = load_state(args.state)
    else:
        cfg = _config(args)
        state = hierarchy.run(cfg.g_theta(), cfg.K, cfg.free())
    checks = validation_checks(state)
    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
        ok &= passed
    R = defects.resolvability_series(state, state.K)
    for n in range(state.K + 1, 2 * state.K + 1):
        print(f"R tail mu^{n}: {field_str(R.coeff(n))}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_ASSERT


# --- defects ----------------------------------------------------------------------


def cmd_defects(args) -> int:
    cfg = _config(args)
    state = hierarchy.run(cfg.g_theta(), cfg.K, cfg.free())
    out = _out_dir(args, cfg)
    K, mu = cfg.K, cfg.mu

    theta, ed, en = defects.boundary_profiles(state, K, mu, cfg.n_theta)
    _write_csv(out / "defects_theta.csv", ["theta", "E_D", "E_N"], zip(theta.tolist(), ed.tolist(), en.tolist()))

    mus = parse_sweep(args.sweep) if args.sweep else np.geomspace(1e-3, 0.5, 30)
    reports = defects.sweep(state, K, mus, cfg.n_r, cfg.n_theta)
    _write_csv(
        out / "defects_sweep.csv",
        ["mu", "sup_R", "sup_ED", "sup_EN"],
        [(r.mu, r.sup_R, r.sup_ED, r.sup_EN) for r in reports],
    )

    R = 1 + mu * eval_theta(state.g, np.linspace(0, 2 * np.pi, cfg.n_theta, endpoint=False))
    t = np.linspace(0, 2 * np.pi, cfg.n_theta, endpoint=False)
    s = np.linspace(0, 1, cfg.n_r)
    rr = s[:, None] * R[None, :]
    tt = np.broadcast_to(t[None, :], rr.shape)
    uu = hierarchy.eval_u(state, mu, rr, tt)
    rows = zip(rr.ravel().tolist(), tt.ravel().tolist(), (rr * np.cos(tt)).ravel().tolist(),
               (rr * np.sin(tt)).ravel().tolist(), np.asarray(uu).ravel().tolist())
    _write_csv(out / "surface.csv", ["r", "theta", "x", "y", "u"], rows)

    print(f"mu = {mu:g}: sup|E_D| = {np.max(np.abs(ed)):.6e}, sup|E_N| = {np.max(np.abs(en)):.6e}")
    small = [r for r in reports if r.sup_ED > 0 and r.sup_EN > 0 and r.mu <= 0.1]
    if len(small) >= 2:
        x = [r.mu for r in small]
        print(f"log-log slope (mu <= 0.1): E_D {defects.fit_loglog_slope(x, [r.sup_ED for r in small]):.4f}, "
              f"E_N {defects.fit_loglog_slope(x, [r.sup_EN for r in small]):.4f}")
    return EXIT_OK


# --- bounds -----------------------------------------------------------------------


def bounds_text(cfg: ProblemConfig, smallness=None, table1=False) -> str:
    rep = bounds.bound_report(cfg.rho, cfg.sigma, cfg.Gamma, cfg.mu)
    lines = ["bound report (sampling estimates where noted)", ""]
    for key, val in rep.as_dict().items():
        if key == "notes":
            continue
        lines.append(f"{key} = {_fmt(val)}")
    for note in rep.notes:
        lines.append(f"note: {note}")
    env = bounds.exponential_envelope(bounds.SchemeParams(cfg.rho, cfg.sigma, cfg.Gamma, rep.K_used))
    sc = bounds.scheme_constants(bounds.SchemeParams(cfg.rho, cfg.sigma, cfg.Gamma, rep.K_used))
    grow = math.exp(2 * env.alpha * rep.K_used)
    lines.append(f"envelope check at K = {rep.K_used}: a <= P_a e^(2 alpha K) is "
                 f"{sc.a <= env.P_a(rep.K_used) * grow}, b <= P_b e^(2 alpha K) is {sc.b <= env.P_b(rep.K_used) * grow}")

    g = cfg.g_theta()
    if not g.is_zero():
        lines += ["", "sigma admissibility of g (||g||, ||g'|| <= 1/4):"]
        lines.append(f"  weighted coefficient norm: sigma = {bounds.admissible_sigma(g, 0.25, 'fourier'):.6f}")
        lines.append(f"  sup over complex strip:    sigma = {bounds.admissible_sigma(g, 0.25, 'strip'):.6f}")
        lines.append(f"  norm estimate of g at sigma = {cfg.sigma:g}: {bounds.norm_estimate(g, cfg.rho, cfg.sigma, 0.0):.6g} (estimate)")
    if smallness:
        lines += ["", "mu | exp(-(log(1/mu))^2)"]
        lines += [f"{m:.6g} | {v:.4e}" for m, v in bounds.smallness_table(smallness)]
    if table1:
        lines += ["", bounds.table1_text().rstrip()]
    return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, (tuple, list)):
        return "(" + ", ".join(str(_fmt(x)) for x in v) + ")"
    return str(v)


def cmd_bounds(args) -> int:
    cfg = _config(args)
    small = parse_mu_list(args.smallness) if args.smallness else None
    text = bounds_text(cfg, small, args.table1)
    out = _out_dir(args, cfg)
    (out / "bounds.txt").write_text(text)
    print(text, end="")
    return EXIT_OK


def cmd_table1(args) -> int:
    print(bounds.table1_text(args.k_max), end="")
    return EXIT_OK


def cmd_smallness(args) -> int:
    mus = parse_mu_list(args.mus)
    print("mu | exp(-(log(1/mu))^2)")
    for m, v in bounds.smallness_table(mus):
        print(f"{m:.6g} | {v:.4e}")
    return EXIT_OK


def cmd_example_config(args) -> int:
    sys.stdout.write(dumps(EXAMPLE_CONFIG))
    return EXIT_OK


# --- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torsion-series", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=False):
        sp.add_argument("--config", help="JSON problem config (default: the built-in cos 4θ example)")
        sp.add_argument("--out", help="output directory (default: config 'outputs')")
        sp.add_argument("--k", type=int, help="override the truncation order K")
        sp.add_argument("--mu", type=float, help="override mu")
        if grid:
            sp.add_argument("--grid", help="evaluation grid RxT, e.g. 256x512")

    sp = sub.add_parser("solve", help="build u_0..u_K, w_1..w_K and write state.json")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("validate", help="check every exact identity of a computed or saved state")
    common(sp)
    sp.add_argument("--state", help="validate a saved state.json instead of recomputing")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("defects", help="numeric boundary profiles, mu sweep and surface CSVs")
    common(sp, grid=True)
    sp.add_argument("--sweep", help="LO:HI:N log-spaced mu sweep (default 1e-3:0.5:30)")
    sp.set_defaults(func=cmd_defects)

    sp = sub.add_parser("bounds", help="bound constants, optimal order and sigma admissibility")
    common(sp)
    sp.add_argument("--table1", action="store_true", help="append the demo recurrence table")
    sp.add_argument("--smallness", help="comma separated mu values, e.g. e-2,e-4,e-8,e-16")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("table1", help="print the demo recurrence table")
    sp.add_argument("--k-max", type=int, default=9)
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("smallness", help="print exp(-(log(1/mu))^2) rows")
    sp.add_argument("mus", nargs="?", default="e-2,e-4,e-8,e-16")
    sp.set_defaults(func=cmd_smallness)

    sp = sub.add_parser("example-config", help="print the built-in example config")
    sp.set_defaults(func=cmd_example_config)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, bounds.InvalidParams, bounds.MuTooLarge) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
