"""Sweep configuration: ``[section]`` headers and ``key = value`` lines.

Numeric parameters may be expressions in ``n`` (and ``tau`` once measured),
e.g. ``k = ceil(n ** (1/3))``. Errors carry the offending line number.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

from ..qprims import QConstants

PROTOCOLS = ("complete", "random-walk", "diameter2", "tree-merge", "agreement")
DEFAULT_GRAPH = {
    "complete": "complete",
    "random-walk": "hypercube",
    "diameter2": "diameter2_random",
    "tree-merge": "gnm",
    "agreement": "complete",
}
INPUT_PATTERNS = ("half", "zeros", "ones", "random")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


_FUNCS = {
    "ceil": math.ceil,
    "floor": math.floor,
    "sqrt": math.sqrt,
    "ln": math.log,
    "log": math.log,
    "log2": math.log2,
    "min": min,
    "max": max,
}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.FloorDiv: operator.floordiv,
    ast.Pow: operator.pow,
}


def parse_expression(text: str) -> ast.Expression:
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}") from exc
    for node in ast.walk(tree):
        ok = isinstance(
            node,
            (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Call, ast.Load,
             ast.USub, ast.UAdd, *_BINOPS),
        )
        if not ok or (isinstance(node, ast.Call) and not (isinstance(node.func, ast.Name) and node.func.id in _FUNCS)):
            raise ConfigError(f"unsupported syntax in {text!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ConfigError(f"only numbers allowed in {text!r}")
    return tree


def evaluate(expr: str | ast.Expression, **names: float) -> float:
    tree = parse_expression(expr) if isinstance(expr, str) else expr

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            if node.id in names:
                return names[node.id]
            raise ConfigError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.Call):
            return _FUNCS[node.func.id](*[ev(a) for a in node.args])
        raise ConfigError("unsupported expression")

    return ev(tree)


@dataclass
class SweepConfig:
    name: str
    protocol: str
    ns: list[int]
    trials: int = 10
    seed: int = 0
    out: str | None = None
    graph: str | None = None
    k: str | None = None
    tau: str = "auto"
    eps: str | None = None
    gamma: str = "0"
    inputs: str = "half"
    workers: int = 1
    timing: bool = False
    plot: str | None = None
    tv_tolerance: str | None = None
    constants: QConstants = field(default_factory=QConstants)

    @property
    def graph_family(self) -> str:
        return self.graph or DEFAULT_GRAPH[self.protocol]


def parse_sizes(text: str) -> list[int]:
    """``256, 512`` or ``2^8..2^12`` (powers of two, inclusive)."""
    text = text.strip()
    if ".." in text:
        lo, hi = (t.strip() for t in text.split("..", 1))
        lo_v, hi_v = int(evaluate(lo.replace("^", "**"))), int(evaluate(hi.replace("^", "**")))
        if lo_v < 2 or hi_v < lo_v or lo_v & (lo_v - 1) or hi_v & (hi_v - 1):
            raise ConfigError("range endpoints must be powers of two with lo <= hi")
        out, v = [], lo_v
        while v <= hi_v:
            out.append(v)
            v *= 2
        return out
    return [int(evaluate(t.replace("^", "**"))) for t in text.split(",") if t.strip()]


def read_sections(text: str) -> list[tuple[str, int, dict[str, tuple[str, int]]]]:
    sections: list[tuple[str, int, dict[str, tuple[str, int]]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("malformed section header", lineno)
            sections.append((line[1:-1].strip(), lineno, {}))
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno)
        if not sections:
            raise ConfigError("key outside of any section", lineno)
        key, value = (t.strip() for t in line.split("=", 1))
        entries = sections[-1][2]
        if key in entries:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        entries[key] = (value, lineno)
    return sections


_SWEEP_KEYS = {
    "protocol", "n", "trials", "seed", "out", "graph", "k", "tau", "eps", "gamma",
    "inputs", "workers", "timing", "plot", "tv_tolerance",
}


def _constants(entries: dict[str, tuple[str, int]]) -> QConstants:
    vals = {}
    for key, (value, line) in entries.items():
        if key not in ("a", "b", "c_pe"):
            raise ConfigError(f"unknown constant {key!r}", line)
        try:
            vals[key] = float(evaluate(value))
        except (ConfigError, ZeroDivisionError) as exc:
            raise ConfigError(str(exc), line) from None
        if vals[key] <= 0:
            raise ConfigError(f"{key} must be positive", line)
    return QConstants(**vals)


def build_sweep(name: str, entries: dict[str, tuple[str, int]], constants: QConstants, header_line: int) -> SweepConfig:
    for key, (_, line) in entries.items():
        if key not in _SWEEP_KEYS:
            raise ConfigError(f"unknown key {key!r}", line)
    if "protocol" not in entries:
        raise ConfigError("missing 'protocol'", header_line)
    if "n" not in entries:
        raise ConfigError("missing 'n'", header_line)
    protocol, pline = entries["protocol"]
    if protocol not in PROTOCOLS:
        raise ConfigError(f"unknown protocol {protocol!r}; expected one of {', '.join(PROTOCOLS)}", pline)

    def get(key: str, conv, default=None):
        if key not in entries:
            return default
        value, line = entries[key]
        try:
            return conv(value)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", line) from None

    def expr_or_none(key: str):
        def conv(v: str) -> str:
            parse_expression(v)
            return v
        return get(key, conv)

    def boolean(v: str) -> bool:
        if v.lower() in ("1", "true", "yes", "on"):
            return True
        if v.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError("expected a boolean")

    cfg = SweepConfig(
        name=name,
        protocol=protocol,
        ns=get("n", parse_sizes),
        trials=get("trials", int, 10),
        seed=get("seed", int, 0),
        out=get("out", str),
        graph=get("graph", str),
        k=expr_or_none("k"),
        tau=get("tau", lambda v: v if v == "auto" else str(int(v)), "auto"),
        eps=expr_or_none("eps"),
        gamma=expr_or_none("gamma") or "0",
        inputs=get("inputs", str, "half"),
        workers=get("workers", int, 1),
        timing=get("timing", boolean, False),
        plot=get("plot", str),
        tv_tolerance=expr_or_none("tv_tolerance"),
        constants=constants,
    )
    check_sweep(cfg, entries)
    return cfg


def check_sweep(cfg: SweepConfig, entries: dict[str, tuple[str, int]] | None = None) -> None:
    entries = entries or {}
    line = lambda key: entries.get(key, ("", None))[1]  # noqa: E731
    if not cfg.ns or min(cfg.ns) < 2:
        raise ConfigError("n values must be >= 2", line("n"))
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1", line("trials"))
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1", line("workers"))
    if cfg.inputs not in INPUT_PATTERNS:
        raise ConfigError(f"inputs must be one of {', '.join(INPUT_PATTERNS)}", line("inputs"))
    if cfg.protocol == "agreement" and cfg.eps is None:
        raise ConfigError("agreement needs 'eps'", line("protocol"))
    if cfg.protocol in ("complete", "agreement") and cfg.graph_family != "complete":
        raise ConfigError(f"{cfg.protocol} runs on complete graphs only", line("graph"))
    if cfg.protocol == "diameter2" and cfg.graph_family not in ("diameter2_random", "complete"):
        raise ConfigError("diameter2 needs a diameter-2 family", line("graph"))


def load_config(path: str | Path) -> list[SweepConfig]:
    text = Path(path).read_text()
    sections = read_sections(text)
    constants = QConstants()
    sweeps = []
    for name, header, entries in sections:
        if name == "constants":
            constants = _constants(entries)
    for name, header, entries in sections:
        if name == "constants":
            continue
        if name != "sweep" and not name.startswith("sweep."):
            raise ConfigError(f"unknown section [{name}]", header)
        sweeps.append(build_sweep(name, entries, constants, header))
    if not sweeps:
        raise ConfigError("no [sweep] section found")
    return sweeps
