"""JSON documents for states, configs and reports.

Exact rationals are always written as ``"p/q"`` strings so that reloading
never goes through floating point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .fourier import FourierField, ThetaField
from .hierarchy import FreeCoefficients, HierarchyState, OrderRecord
from .radial import RadialExpr, as_rational, rational_str


class ConfigError(ValueError):
    pass


# --- exact objects -----------------------------------------------------------------


def expr_to_doc(e: RadialExpr) -> list:
    return [{"m": m, "p": p, "coeff": rational_str(c)} for (m, p), c in e.items()]


def expr_from_doc(doc: list) -> RadialExpr:
    return RadialExpr([((int(t["m"]), int(t["p"])), as_rational(t["coeff"])) for t in doc])


def field_to_doc(F: FourierField) -> dict:
    return {
        "avg": expr_to_doc(F.avg),
        "cos": [{"n": n, "expr": expr_to_doc(e)} for n, e in F.cos_modes.items()],
        "sin": [{"n": n, "expr": expr_to_doc(e)} for n, e in F.sin_modes.items()],
    }


def field_from_doc(doc: dict, cls=FourierField) -> FourierField:
    cos = {0: expr_from_doc(doc.get("avg", []))}
    cos.update({int(c["n"]): expr_from_doc(c["expr"]) for c in doc.get("cos", [])})
    sin = {int(s["n"]): expr_from_doc(s["expr"]) for s in doc.get("sin", [])}
    return cls._from_modes(cos, sin)


def _coeff_table(d: dict) -> dict:
    return {str(n): rational_str(v) for n, v in d.items()}


def _coeff_table_back(d: dict) -> dict:
    return {int(n): as_rational(v) for n, v in d.items()}


def _triple_to_doc(t) -> dict:
    A0, A, B = t
    return {"avg": rational_str(A0), "cos": _coeff_table(A), "sin": _coeff_table(B)}


def _triple_from_doc(d) -> tuple:
    return as_rational(d["avg"]), _coeff_table_back(d["cos"]), _coeff_table_back(d["sin"])


def record_to_doc(r: OrderRecord) -> dict:
    return {
        "k": r.k,
        "dirichlet": _triple_to_doc(r.dirichlet),
        "neumann": _triple_to_doc(r.neumann),
        "a0": _coeff_table(r.a0),
        "b0": _coeff_table(r.b0),
        "C": _coeff_table(r.C),
        "D": _coeff_table(r.D),
    }


def record_from_doc(d: dict) -> OrderRecord:
    return OrderRecord(
        int(d["k"]),
        _triple_from_doc(d["dirichlet"]),
        _triple_from_doc(d["neumann"]),
        _coeff_table_back(d["a0"]),
        _coeff_table_back(d["b0"]),
        _coeff_table_back(d["C"]),
        _coeff_table_back(d["D"]),
    )


def _free_to_doc(f: FreeCoefficients) -> dict:
    return {
        "M": f.M,
        "Gamma": rational_str(f.Gamma),
        "a": [{"n": n, "m": m, "value": rational_str(v)} for (n, m), v in sorted(f.a_free.items())],
        "b": [{"n": n, "m": m, "value": rational_str(v)} for (n, m), v in sorted(f.b_free.items())],
    }


def _free_from_doc(d: dict) -> FreeCoefficients:
    return FreeCoefficients(
        M=int(d.get("M", 0)),
        a_free={(int(t["n"]), int(t["m"])): as_rational(t["value"]) for t in d.get("a", [])},
        b_free={(int(t["n"]), int(t["m"])): as_rational(t["value"]) for t in d.get("b", [])},
        Gamma=as_rational(d.get("Gamma", "0")),
    )


def state_to_doc(state: HierarchyState) -> dict:
    return {
        "format": "torsion-series-state/1",
        "K": state.K,
        "C_const": rational_str(state.C_const),
        "g": field_to_doc(state.g),
        "free": _free_to_doc(state.free),
        "u": [field_to_doc(F) for F in state.u],
        "w": [field_to_doc(F) for F in state.w],
        "forcings": [field_to_doc(F) for F in state.forcings],
        "dirichlet_targets": [field_to_doc(F) for F in state.dirichlet_targets],
        "neumann_targets": [field_to_doc(F) for F in state.neumann_targets],
        "records": [record_to_doc(r) for r in state.records],
    }


def state_from_doc(doc: dict) -> HierarchyState:
    try:
        return HierarchyState(
            g=field_from_doc(doc["g"], ThetaField),
            u=tuple(field_from_doc(F) for F in doc["u"]),
            w=tuple(field_from_doc(F) for F in doc["w"]),
            forcings=tuple(field_from_doc(F) for F in doc.get("forcings", [])),
            dirichlet_targets=tuple(field_from_doc(F, ThetaField) for F in doc.get("dirichlet_targets", [])),
            neumann_targets=tuple(field_from_doc(F, ThetaField) for F in doc.get("neumann_targets", [])),
            records=tuple(record_from_doc(r) for r in doc.get("records", [])),
            free=_free_from_doc(doc.get("free", {})),
            C_const=as_rational(doc.get("C_const", "1/2")),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed state document: {exc}") from exc


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def save_state(state: HierarchyState, path) -> None:
    Path(path).write_text(dumps(state_to_doc(state)))


def load_state(path) -> HierarchyState:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read state {path}: {exc}") from exc
    return state_from_doc(doc)


# --- problem config ----------------------------------------------------------------


@dataclass
class ProblemConfig:
    g_modes: list = field(default_factory=list)
    K: int = 2
    M: int = 0
    free_coeffs: list = field(default_factory=list)
    mu: float = 0.25
    rho: float = 1.0
    sigma: float = 0.1733
    Gamma: float = 0.0
    n_r: int = 64
    n_theta: int = 256
    outputs: str = "out"

    def __post_init__(self):
        if not isinstance(self.K, int) or self.K < 1:
            raise ConfigError("K must be an integer >= 1")
        if not isinstance(self.M, int) or self.M < 0:
            raise ConfigError("M must be an integer >= 0")
        if self.n_r < 8 or self.n_theta < 8:
            raise ConfigError("grid must be at least 8x8")
        if not math.isfinite(self.mu) or self.mu < 0:
            raise ConfigError("mu must be a finite non-negative number")
        try:
            self.g_theta()
            self.free()
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc

    def g_theta(self) -> ThetaField:
        cos, sin = {}, {}
        for m in self.g_modes:
            n = int(m["n"])
            if n < 1:
                raise ConfigError("g mode numbers must be >= 1")
            if "cos" in m:
                cos[n] = cos.get(n, Fraction(0)) + _exact(m["cos"])
            if "sin" in m:
                sin[n] = sin.get(n, Fraction(0)) + _exact(m["sin"])
        return ThetaField.from_coeffs(0, cos, sin)

    def free(self) -> FreeCoefficients:
        a, b = {}, {}
        for t in self.free_coeffs:
            table = a if t.get("kind", "a") == "a" else b
            table[(int(t["n"]), int(t["m"]))] = _exact(t["value"])
        return FreeCoefficients(M=self.M, a_free=a, b_free=b, Gamma=Fraction(str(self.Gamma)))


def _exact(v) -> Fraction:
    if isinstance(v, float):
        raise ConfigError(f"exact rational expected, got float {v!r}; write it as a string")
    try:
        return as_rational(v)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"not an exact rational: {v!r}") from exc


_KNOWN = {"g_modes", "K", "M", "free_coeffs", "mu", "rho", "sigma", "Gamma", "grid", "outputs"}


def config_from_doc(doc: dict) -> ProblemConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    grid = doc.get("grid", {})
    kw = {k: doc[k] for k in ("g_modes", "K", "M", "free_coeffs", "outputs") if k in doc}
    try:
        for k in ("mu", "rho", "sigma", "Gamma"):
            if k in doc:
                kw[k] = float(doc[k])
        if "n_r" in grid:
            kw["n_r"] = int(grid["n_r"])
        if "n_theta" in grid:
            kw["n_theta"] = int(grid["n_theta"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return ProblemConfig(**kw)


def load_config(path) -> ProblemConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_doc(doc)


EXAMPLE_CONFIG = {
    "g_modes": [{"n": 4, "cos": "1/20"}],
    "K": 2,
    "M": 0,
    "mu": 0.25,
    "rho": 1.0,
    "sigma": 0.1733,
    "Gamma": 0.0,
    "grid": {"n_r": 64, "n_theta": 256},
    "outputs": "out",
}


# --- human readable ----------------------------------------------------------------


def expr_str(e: RadialExpr) -> str:
    if e.is_zero():
        return "0"
    parts = []
    for (m, p), c in e.items():
        s = rational_str(c) if c.denominator != 1 else str(c.numerator)
        if m:
            s += f" r^{m}" if m != 1 else " r"
        if p:
            s += " log(r)" if p == 1 else f" log(r)^{p}"
        parts.append(s)
    return " + ".join(parts).replace("+ -", "- ")


def field_str(F: FourierField) -> str:
    """Compact text such as ``-36/5 cos(4θ)``."""
    parts = []

    def coeff(e: RadialExpr) -> str:
        return expr_str(e) if e.is_constant() else f"({expr_str(e)})"

    if not F.avg.is_zero():
        parts.append(coeff(F.avg))
    for n, e in F.cos_modes.items():
        parts.append(f"{coeff(e)} cos({n}θ)")
    for n, e in F.sin_modes.items():
        parts.append(f"{coeff(e)} sin({n}θ)")
    return " + ".join(parts).replace("+ -", "- ") if parts else "0"
