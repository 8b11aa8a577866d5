"""Run configuration: a flat ``key = value`` file with dotted section keys.

Example::

    # comparison run
    model.re = 15
    model.c_reg = 0.5
    patches.D = pi
    patches.r = 1/6
    run.output_times = 0, 2, 10, 20, 30

Numeric values may be simple arithmetic over numbers and ``pi``.  Blank
lines and ``#`` comments are ignored.  Unknown keys are rejected.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def eval_number(text: str) -> float:
    """Evaluate a numeric literal or arithmetic expression over numbers and ``pi``."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ConfigError(f"unsupported expression {text!r}")

    return ev(tree)


@dataclass(frozen=True)
class ModelSection:
    re: float = 15.0
    tan_theta: float = 0.0
    c_reg: float = 0.5
    gamma: float = 1.0


@dataclass(frozen=True)
class PatchSection:
    m: int = 10
    D: float = math.pi
    r: float = 1 / 6
    n: int = 9
    degree: int = 3
    interpolation: str = "lagrange"
    edge_lift_h2: bool = False
    edge_rates: str = "gradient"


@dataclass(frozen=True)
class GridSection:
    L: float | None = None          # defaults to patches.m * patches.D
    n_cells: int = 240


@dataclass(frozen=True)
class IntegratorSection:
    rtol: float = 1e-6
    atol: float = 1e-9
    first_step: float | None = None
    max_step: float = 0.5
    max_newton: int = 8


@dataclass(frozen=True)
class InitSection:
    amplitude: float = 0.2
    mode: int = 1
    noise: float = 1e-3
    seed: int = 0
    u1: float = 0.0
    u2: float = 0.2


@dataclass(frozen=True)
class RunSection:
    t_end: float = 30.0
    output_times: tuple = (0.0, 2.0, 10.0, 20.0, 30.0)


@dataclass(frozen=True)
class SweepSection:
    k_min: float = 0.0
    k_max: float = 10.0
    dk: float = 0.01
    left_operator: bool = False


@dataclass(frozen=True)
class EigsSection:
    jacobian_step: float = 1e-6
    macro_re: float = 0.2
    fast_re: float = -1.0
    wave_im: float = 2.0


@dataclass(frozen=True)
class RunConfig:
    model: ModelSection = field(default_factory=ModelSection)
    patches: PatchSection = field(default_factory=PatchSection)
    grid: GridSection = field(default_factory=GridSection)
    integrator: IntegratorSection = field(default_factory=IntegratorSection)
    init: InitSection = field(default_factory=InitSection)
    run: RunSection = field(default_factory=RunSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    eigs: EigsSection = field(default_factory=EigsSection)

    @property
    def length(self) -> float:
        return self.grid.L if self.grid.L is not None else self.patches.m * self.patches.D

    def validate(self) -> "RunConfig":
        if self.grid.L is not None:
            macro = self.patches.m * self.patches.D
            if abs(self.grid.L - macro) > 1e-9 * macro:
                raise ConfigError(
                    f"grid.L = {self.grid.L} differs from patches.m * patches.D = {macro}")
        if abs(self.init.amplitude) + abs(self.init.noise) >= 1:
            raise ConfigError("init.amplitude + init.noise must stay below 1 (depth must stay positive)")
        if self.init.noise < 0:
            raise ConfigError("init.noise must be non-negative")
        if self.run.t_end <= 0:
            raise ConfigError("run.t_end must be positive")
        times = self.run.output_times
        if any(b < a for a, b in zip(times, times[1:])) or (times and (times[0] < 0 or times[-1] > self.run.t_end)):
            raise ConfigError("run.output_times must be sorted and inside [0, run.t_end]")
        if self.sweep.dk <= 0 or self.sweep.k_max < self.sweep.k_min:
            raise ConfigError("sweep range is empty")
        return self

    def items(self):
        """Resolved configuration as ordered ``(dotted_key, value)`` pairs."""
        for sec in fields(self):
            section = getattr(self, sec.name)
            for f in fields(section):
                yield f"{sec.name}.{f.name}", getattr(section, f.name)


def _coerce(value: str, default, name: str, annotation: str):
    text = value.strip()
    try:
        if annotation.startswith("bool"):
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ConfigError(f"{name}: expected a boolean, got {value!r}")
        if annotation.startswith("int"):
            num = eval_number(text)
            if float(num) != int(num):
                raise ConfigError(f"{name}: expected an integer, got {value!r}")
            return int(num)
        if annotation.startswith("float"):
            if text.lower() in ("", "none") and "None" in annotation:
                return None
            if text.lower() in ("inf", "infinity"):
                return math.inf
            return float(eval_number(text))
        if annotation.startswith("tuple"):
            return tuple(float(eval_number(p)) for p in text.split(",") if p.strip())
        return text
    except ConfigError:
        raise
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{name}: cannot interpret {value!r}") from exc


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse configuration text on top of ``base`` (defaults if omitted)."""
    cfg = base or RunConfig()
    updates: dict[str, dict] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.count(".") != 1:
            raise ConfigError(f"line {lineno}: key {key!r} must have the form section.name")
        sec, name = key.split(".")
        if sec not in {f.name for f in fields(cfg)}:
            raise ConfigError(f"line {lineno}: unknown section {sec!r}")
        section = getattr(cfg, sec)
        types = {f.name: str(f.type) for f in fields(section)}
        if name not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        updates.setdefault(sec, {})[name] = _coerce(value, getattr(section, name), key, types[name])
    for sec, vals in updates.items():
        cfg = replace(cfg, **{sec: replace(getattr(cfg, sec), **vals)})
    return cfg.validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ", ".join(format_value(v) for v in value)
    if value is None:
        return "none"
    return str(value)
