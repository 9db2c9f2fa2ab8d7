"""Experiment runners behind the command line: config parsing, sweeps, CSV output."""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import minimize_scalar

from . import calibration
from .analytic import (
    TransferSetting,
    offdiag_collective,
    offdiag_ghz,
    offdiag_separable,
)
from .channel import (
    channel_family,
    conveyor,
    process_fidelity,
    process_fidelity_local_frame,
    qfi_fidelity_gap,
)
from .entanglement import negativity, negativity_closed_form, pinned_couplings, pinned_qfi_antenna, reduce_pair
from .errors import CapacityError, ValidationError
from .ising import ChainLayout, StarCouplings, evolve, expand_star
from .metrology import ThetaFamily, cfi_sigma_y, qfi_eigendecomp, qfi_pure, qfi_qubit
from .simulate import run_symmetric
from .sources import (
    coherent_x,
    embed_source,
    ghz_state,
    oat_state,
    symmetric_derivative,
    symmetric_populations,
)
from .statevec import check_capacity, eigenstate, rotation

EXPERIMENTS = ("transfer", "sweep", "theta-sweep", "oat-curve", "negativity", "calibration", "fidelity", "oracle-check")
ORACLE_TOL = 1e-8
ORACLE_MAX_N = 12

DEFAULTS: dict[str, Any] = {
    "source": "ghz",
    "n": 11,
    "m": 10,
    "j1": 0.5,
    "j2": 1.0,
    "u": 0.0,
    "j_bg": 0.0,
    "t_min": math.pi / 2,
    "t_max": math.pi / 2,
    "t_steps": 1,
    "theta": 0.0,
    "thetas": (0.0, math.pi / 2, math.pi),
    "theta_shift": 0.0,
    "epsilon": math.radians(1.0),
    "oat_steps": 21,
    "phi1": math.pi / 2,
    "phi2": math.pi,
    "optimize_per_point": False,
    "corrupt": 0.0,
    "output_path": "",
}

EXPERIMENT_DEFAULTS: dict[str, dict[str, Any]] = {
    "oracle-check": {"n": 5, "m": 1, "t_min": 0.0, "t_max": math.pi, "t_steps": 50, "thetas": (0.0, 0.3)},
    "negativity": {"n": 4, "t_min": 0.0, "t_max": math.pi, "t_steps": 200},
    "fidelity": {"n": 4, "m": 1},
}

# ---------------------------------------------------------------- config


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e, "true": True, "false": False}


def _eval_node(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id.lower() in _NAMES:
        return _NAMES[node.id.lower()]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, (ast.Tuple, ast.List)):
        return tuple(_eval_node(e) for e in node.elts)
    raise ValueError("unsupported expression")


def parse_value(raw: str) -> Any:
    """Numbers, ``pi`` arithmetic, booleans, comma lists, or a bare string."""
    raw = raw.strip()
    try:
        return _eval_node(ast.parse(raw, mode="eval").body)
    except (SyntaxError, ValueError, ZeroDivisionError):
        return raw


def parse_config(text: str) -> dict[str, Any]:
    cfg: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValidationError(f"config line {lineno}: empty key")
        cfg[key] = parse_value(value)
    return cfg


def serialize_config(cfg: dict[str, Any]) -> str:
    lines: list[str] = []
    for key in sorted(cfg):
        v = cfg[key]
        if isinstance(v, bool):
            s = "true" if v else "false"
        elif isinstance(v, tuple):
            s = ", ".join(fmt(x) for x in v)
        elif isinstance(v, (int, float)):
            s = fmt(v)
        else:
            s = str(v)
        lines.append(f"{key} = {s}")
    return "".join(line + "\n" for line in lines)


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(f"unknown experiment {self.experiment!r}")

    def get(self, key: str):
        if key in self.params:
            return self.params[key]
        return EXPERIMENT_DEFAULTS.get(self.experiment, {}).get(key, DEFAULTS.get(key))

    def integer(self, key: str, lo: int = 0) -> int:
        v = self.get(key)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v) or v < lo:
            raise ValidationError(f"{key} must be an integer >= {lo}, got {v!r}")
        return int(v)

    def real(self, key: str) -> float:
        v = self.get(key)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ValidationError(f"{key} must be a finite number, got {v!r}")
        return float(v)

    def flag(self, key: str) -> bool:
        v = self.get(key)
        if not isinstance(v, bool):
            raise ValidationError(f"{key} must be true or false")
        return v

    def reals(self, key: str) -> tuple[float, ...]:
        v = self.get(key)
        v = v if isinstance(v, tuple) else (v,)
        return tuple(self.real_value(key, x) for x in v)

    @staticmethod
    def real_value(key, x) -> float:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ValidationError(f"{key} entries must be finite numbers")
        return float(x)


# ---------------------------------------------------------------- CSV


def fmt(x) -> str:
    """12 significant digits; scientific below 1e-4 in magnitude."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0:
        return "0"
    if abs(x) < 1e-4:
        return format(x, ".11e")
    return format(x, ".12g")


def ratio(num: float, den: float):
    if abs(den) < 1e-300:
        return None if abs(num) < 1e-300 else math.inf
    return num / den


def to_csv(cfg: ExperimentConfig, header: list[str], rows: list[list]) -> str:
    lines = [f"# experiment = {cfg.experiment}"]
    lines += ["# " + line for line in serialize_config(cfg.params).splitlines()]
    lines.append(",".join(header))
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- runners


def _times(cfg: ExperimentConfig) -> np.ndarray:
    steps = cfg.integer("t_steps", 1)
    t0, t1 = cfg.real("t_min"), cfg.real("t_max")
    if t1 < t0:
        raise ValidationError("t_max must be >= t_min")
    return np.linspace(t0, t1, steps) if steps > 1 else np.array([t0])


def _source_coeffs(kind: str, m: int) -> np.ndarray:
    if kind == "ghz":
        return ghz_state(m, 0.0)
    if kind == "separable":
        return coherent_x(m)
    raise ValidationError("source must be 'ghz' or 'separable'")


def run_transfer(cfg: ExperimentConfig) -> str:
    """Full-chain time sweep; ``negativity`` is filled for one-qubit sources."""
    n, m = cfg.integer("n", 2), cfg.integer("m", 1)
    try:
        check_capacity(n, "n")
    except CapacityError as exc:
        raise CapacityError(f"parameter n: {exc}") from None
    layout = ChainLayout.standard(n, m)
    J = expand_star(layout, StarCouplings(cfg.real("j1"), cfg.real("j2"), cfg.real("u"), cfg.real("j_bg")))
    coeffs = _source_coeffs(cfg.get("source"), m)
    theta = cfg.real("theta")
    rows = []
    for t in _times(cfg):
        res = run_symmetric(layout, J, float(t), coeffs, theta)
        qs, qa = res.qfi_chain, res.qfi_antenna
        neg = negativity(reduce_pair(res.psi, layout)) if m == 1 else None
        a = res.offdiag.a
        rows.append([float(t), qs, qa, ratio(qa, qs), a.real, a.imag, neg])
    header = ["t", "qfi_source", "qfi_antenna", "ratio", "a_re", "a_im", "negativity"]
    return to_csv(cfg, header, rows)


def _oat_family(m: int, ut: float, shift: float = 0.0):
    def probs(th):
        return symmetric_populations(oat_state(m, ut, th - shift))[0]

    def dprobs(th):
        return symmetric_populations(oat_state(m, ut, th - shift))[1]

    return probs, dprobs


def _antenna_qfi(m: int, ut: float, phi1: float, phi2: float, theta: float, shift: float = 0.0) -> float:
    probs, dprobs = _oat_family(m, ut, shift)
    return qfi_qubit(offdiag_collective(probs, phi1, 0, phi2, theta, dprobs=dprobs))


def optimize_phi1(m: int, ut: float, phi2: float, theta: float = 0.0, shift: float = 0.0) -> tuple[float, float]:
    """Coarse grid over ``phi1`` in ``[0, pi]`` then a bounded scalar refinement."""
    probs, dprobs = _oat_family(m, ut, shift)
    p, dp = probs(theta), dprobs(theta)

    def qfi(phi1):
        return qfi_qubit(offdiag_collective(lambda _: p, phi1, 0, phi2, theta, dprobs=lambda _: dp))

    grid = np.linspace(0, math.pi, 721)
    vals = [qfi(x) for x in grid]
    k = int(np.argmax(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(lambda x: -qfi(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    if -res.fun >= vals[k]:
        return float(res.x), float(-res.fun)
    return float(grid[k]), float(vals[k])


def _oat_rows(cfg: ExperimentConfig, theta: float, shift: float = 0.0) -> list[list]:
    m = cfg.integer("m", 1)
    steps = cfg.integer("oat_steps", 2)
    per_point = cfg.flag("optimize_per_point")
    phi1, phi2 = cfg.real("phi1"), cfg.real("phi2")
    rows = []
    for ut in np.linspace(0, math.pi / 2, steps):
        c = oat_state(m, float(ut), theta - shift)
        qs = qfi_pure(c, symmetric_derivative(c))
        if per_point:
            _, qa = optimize_phi1(m, float(ut), phi2, theta, shift)
        else:
            qa = _antenna_qfi(m, float(ut), phi1, phi2, theta, shift)
        rows.append([float(ut), qs, qa])
    return rows


def run_oat_curve(cfg: ExperimentConfig) -> str:
    m = cfg.integer("m", 1)
    rows = [[ut, qs / m**2, qa / m**2, ratio(qa, qs)] for ut, qs, qa in _oat_rows(cfg, 0.0)]
    return to_csv(cfg, ["ut", "qfi_source_norm", "qfi_antenna_norm", "ratio"], rows)


def run_theta_sweep(cfg: ExperimentConfig) -> str:
    """OAT curves at several ``theta``; ``theta_shift`` moves the working point inside the family."""
    m = cfg.integer("m", 1)
    shift = cfg.real("theta_shift")
    rows = []
    for theta in cfg.reals("thetas"):
        for ut, qs, qa in _oat_rows(cfg, theta, shift):
            rows.append([theta, ut, qs / m**2, qa / m**2, ratio(qa, qs)])
    return to_csv(cfg, ["theta", "ut", "qfi_source_norm", "qfi_antenna_norm", "ratio"], rows)


def run_negativity(cfg: ExperimentConfig) -> str:
    n = cfg.integer("n", 3)
    check_capacity(n, "n")
    layout = ChainLayout.standard(n, 1)
    J = pinned_couplings(layout)
    psi0 = embed_source(eigenstate("x"), layout)
    rows = []
    for t in _times(cfg):
        neg = negativity(reduce_pair(evolve(psi0, J, float(t)), layout))
        q = pinned_qfi_antenna(float(t), n)
        rows.append([float(t), q, neg, negativity_closed_form(float(t), n, q)])
    return to_csv(cfg, ["t", "qfi_antenna", "negativity", "negativity_closed"], rows)


def run_calibration(cfg: ExperimentConfig) -> str:
    eps = cfg.real("epsilon")
    rows = []
    single = calibration.cfi_single_miscal(eps)
    for m in (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000):
        exact, gauss = calibration.cfi_ghz_miscal(m, eps)
        rows.append([m, single, exact, gauss, m * m, 3])
    return to_csv(cfg, ["m", "ratio_antenna", "ratio_ghz_exact", "ratio_ghz_gauss", "settings_ghz", "settings_antenna"], rows)


def run_fidelity(cfg: ExperimentConfig) -> str:
    n = cfg.integer("n", 2)
    check_capacity(n, "n")
    layout = ChainLayout.standard(n, 1)
    J = expand_star(layout, StarCouplings(cfg.real("j1"), cfg.real("j2"), cfg.real("u"), cfg.real("j_bg")))
    fam = ThetaFamily(lambda th: rotation("y", th) @ eigenstate("x"))
    rows = []
    for t in _times(cfg):
        ch = conveyor(layout, J, float(t))
        out = channel_family(ch, fam)
        fit = qfi_fidelity_gap(fam, out)
        rows.append([float(t), qfi_eigendecomp(out), process_fidelity(ch),
                     process_fidelity_local_frame(ch)[0], fit.intercept, fit.coefficient])
    return to_csv(cfg, ["t", "qfi_out", "process_fidelity", "process_fidelity_local", "gap_intercept", "gap_coefficient"], rows)


@dataclass
class OracleReport:
    gaps: dict[str, float]

    @property
    def passed(self) -> bool:
        return all(v <= ORACLE_TOL for v in self.gaps.values())

    def text(self) -> str:
        lines = [f"{k},{fmt(v)}" for k, v in sorted(self.gaps.items())]
        lines.append("status," + ("pass" if self.passed else "fail"))
        return "quantity,max_gap\n" + "\n".join(lines) + "\n"


def run_oracle_check(cfg: ExperimentConfig) -> OracleReport:
    """Compare closed forms with the full-register simulation.

    ``corrupt`` adds an offset to one source-antenna coupling of the
    simulated chain only; any nonzero value must make the check fail.
    """
    n, m = cfg.integer("n", 2), cfg.integer("m", 1)
    if n > ORACLE_MAX_N:
        raise CapacityError(f"parameter n={n} exceeds the oracle limit {ORACLE_MAX_N}")
    check_capacity(n, "n")
    if m >= n:
        raise ValidationError("need m < n")
    layout = ChainLayout.standard(n, m)
    j1, j2 = cfg.real("j1"), cfg.real("j2")
    J = expand_star(layout, StarCouplings(j1, j2, cfg.real("u"), cfg.real("j_bg")))
    bad = cfg.real("corrupt")
    if bad:
        J[layout.source[0], layout.antenna] += bad
        J[layout.antenna, layout.source[0]] += bad
    gaps = {"a": 0.0, "a_dot": 0.0, "qfi": 0.0, "cfi": 0.0}
    if m == 1:
        gaps["negativity"] = 0.0
    for theta in cfg.reals("thetas"):
        for t in _times(cfg):
            s = TransferSetting.from_couplings(m, layout.mu, j1, j2, float(t), theta)
            for kind, closed in (("separable", offdiag_separable), ("ghz", offdiag_ghz)):
                off = closed(s)
                sim = run_symmetric(layout, J, float(t), _source_coeffs(kind, m), theta).offdiag
                gaps["a"] = max(gaps["a"], abs(off.a - sim.a))
                gaps["a_dot"] = max(gaps["a_dot"], abs(off.a_dot - sim.a_dot))
                gaps["qfi"] = max(gaps["qfi"], _safe_gap(lambda: qfi_qubit(off), lambda: qfi_qubit(sim)))
                if theta == 0:
                    gaps["cfi"] = max(gaps["cfi"], _safe_gap(
                        lambda: cfi_sigma_y(lambda x: closed(TransferSetting(m, layout.mu, s.phi1, s.phi2, x)).a,
                                            0.0, lambda x: closed(TransferSetting(m, layout.mu, s.phi1, s.phi2, x)).a_dot),
                        lambda: cfi_sigma_y(lambda x: sim.a, 0.0, lambda x: sim.a_dot)))
            if m == 1 and theta == 0:
                Jp = pinned_couplings(layout)
                if bad:
                    Jp[layout.source[0], layout.antenna] += bad
                    Jp[layout.antenna, layout.source[0]] += bad
                psi = evolve(embed_source(eigenstate("x"), layout), Jp, float(t))
                neg = negativity(reduce_pair(psi, layout))
                closed_neg = negativity_closed_form(float(t), n, pinned_qfi_antenna(float(t), n))
                gaps["negativity"] = max(gaps["negativity"], abs(neg - closed_neg))
    return OracleReport(gaps)


def _safe_gap(f, g) -> float:
    try:
        return abs(f() - g())
    except ArithmeticError:
        return math.inf
