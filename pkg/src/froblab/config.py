"""Experiment configuration: validation and canonical JSON.

A config is built from an optional JSON file overlaid with command-line
flags (flags win). Polynomials are stored in their canonical symbolic
form and angles as the text the user gave (``"pi/3"``, ``"1.0472"``), so
serialising a parsed config and parsing it again is the identity.
"""

from __future__ import annotations

import ast
import json
import operator
from dataclasses import asdict, dataclass, field, fields
from math import pi

from . import constants
from .polynomials import (ONE_PARAMETER, TWO_PARAMETER, PolynomialParseError,
                          family_is_admissible, format_polynomial, parse_polynomial)

COMMANDS = ("lt-avg", "st-avg", "onepar-st", "vertical-lt", "vertical-st",
            "charsum-audit", "michel", "verify")
FORMATS = ("csv", "json")
LEVELS = ("quick", "full")


class ConfigError(ValueError):
    """A configuration rule was violated; the message names the rule."""


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv}


def parse_angle(text) -> float:
    """Evaluate ``"pi/3"``, ``"2*pi/3"``, ``"pi"`` or a plain number."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise ValueError

    try:
        return ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ConfigError(f"angle: cannot parse {text!r} (use a number or an expression in pi)")


def _angle_text(value) -> str | None:
    if value is None:
        return None
    if isinstance(value, float):
        return repr(value)
    return str(value).strip()


@dataclass
class ExperimentConfig:
    command: str
    f: str | None = None
    g: str | None = None
    mode: str | None = None
    A: int | None = None
    B: int | None = None
    x: int | None = None
    t: int = 0
    alpha: str | None = None
    beta: str | None = None
    primes: list[int] | None = None
    n: int = 10
    constants: dict = field(default_factory=dict)
    workers: int | None = None
    output: str | None = None
    format: str = "csv"
    level: str = "full"
    timing: bool = True

    # -- derived values ---------------------------------------------------

    @property
    def interval(self) -> tuple[float, float]:
        return parse_angle(self.alpha), parse_angle(self.beta)

    @property
    def polynomials(self):
        return parse_polynomial(self.f), parse_polynomial(self.g)

    def constant(self, key: str) -> float:
        return self.constants[key]

    # -- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"),
                          ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"config: unknown field(s) {', '.join(unknown)}")
        if "command" not in data:
            raise ConfigError("config: 'command' is required")
        return cls(**data).normalised()

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc.msg})")
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be a JSON object")
        return cls.from_dict(data)

    # -- validation -------------------------------------------------------

    def normalised(self) -> "ExperimentConfig":
        """Validate every field and return the canonical form (in place)."""
        if self.command not in COMMANDS:
            raise ConfigError(f"command: must be one of {', '.join(COMMANDS)}")
        for name in ("f", "g"):
            text = getattr(self, name)
            if text is not None:
                try:
                    setattr(self, name, format_polynomial(parse_polynomial(str(text))))
                except PolynomialParseError as exc:
                    raise ConfigError(f"polynomial {name}: {exc}")
        if self.mode is None and self.command in ("lt-avg", "st-avg"):
            self.mode = TWO_PARAMETER
        if self.mode is None and self.command in ("onepar-st", "michel"):
            self.mode = ONE_PARAMETER
        if self.mode not in (None, TWO_PARAMETER, ONE_PARAMETER):
            raise ConfigError(f"mode: must be {TWO_PARAMETER!r} or {ONE_PARAMETER!r}")
        for name in ("A", "B", "x", "t", "n", "workers"):
            value = getattr(self, name)
            if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
                raise ConfigError(f"{name}: must be an integer")
        for name in ("A", "B", "x"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError(f"{name}: must be nonnegative")
        if self.n < 1:
            raise ConfigError("n: must be a positive integer")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers: must be a positive integer")
        self.alpha = _angle_text(self.alpha)
        self.beta = _angle_text(self.beta)
        if self.primes is not None:
            if not isinstance(self.primes, list) or not all(
                    isinstance(p, int) and not isinstance(p, bool) for p in self.primes):
                raise ConfigError("primes: must be a list of integers")
            self.primes = sorted(set(self.primes))
        if not isinstance(self.constants, dict):
            raise ConfigError("constants: must be an object")
        unknown = sorted(set(self.constants) - set(constants.DEFAULTS))
        if unknown:
            raise ConfigError(f"constants: unknown key(s) {', '.join(unknown)}")
        merged = dict(constants.DEFAULTS)
        for key, value in self.constants.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
                raise ConfigError(f"constants: {key} must be a positive number")
            merged[key] = value
        self.constants = merged
        if self.format not in FORMATS:
            raise ConfigError(f"format: must be one of {', '.join(FORMATS)}")
        if self.level not in LEVELS:
            raise ConfigError(f"level: must be one of {', '.join(LEVELS)}")
        if not isinstance(self.timing, bool):
            raise ConfigError("timing: must be true or false")
        self._check_command()
        return self

    def _require(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"{self.command}: missing required field {name!r}")

    def _check_interval(self):
        self._require("alpha", "beta")
        alpha, beta = self.interval
        if not (0.0 <= alpha <= pi and 0.0 <= beta <= pi):
            raise ConfigError("interval: require 0 <= alpha < beta <= pi")
        if not alpha < beta:
            raise ConfigError("interval: require alpha < beta")

    def _check_family(self):
        f, g = self.polynomials
        verdict = family_is_admissible(f, g, self.mode)
        if not verdict:
            raise ConfigError(f"inadmissible family: {verdict.reason}")

    def _check_primes(self):
        from .arith import PrimeError, check_prime
        for p in self.primes or ():
            try:
                check_prime(p)
            except PrimeError as exc:
                raise ConfigError(f"primes: {exc}")

    def _check_command(self):
        cmd = self.command
        if cmd in ("lt-avg", "st-avg"):
            self._require("f", "g", "A", "B", "x")
            if self.mode != TWO_PARAMETER:
                raise ConfigError(f"{cmd}: needs mode {TWO_PARAMETER!r}")
            self._check_family()
            if cmd == "st-avg":
                self._check_interval()
        elif cmd == "onepar-st":
            self._require("f", "g", "A", "x")
            if self.mode != ONE_PARAMETER:
                raise ConfigError(f"{cmd}: needs mode {ONE_PARAMETER!r}")
            self._check_family()
            self._check_interval()
        elif cmd == "vertical-lt":
            self._require("x")
        elif cmd == "vertical-st":
            if self.x is None and self.primes is None:
                raise ConfigError("vertical-st: give x or an explicit prime list")
            self._check_interval()
        elif cmd == "charsum-audit":
            if self.x is None and self.primes is None:
                raise ConfigError("charsum-audit: give x or an explicit prime list")
            if self.f is None and self.g is None:
                raise ConfigError("charsum-audit: give at least one polynomial (f or g)")
        elif cmd == "michel":
            self._require("f", "g")
            if self.x is None and self.primes is None:
                raise ConfigError("michel: give x or an explicit prime list")
            if self.mode != ONE_PARAMETER:
                raise ConfigError(f"michel: needs mode {ONE_PARAMETER!r}")
            self._check_family()
            if self.A is not None and self.alpha is not None:
                self._check_interval()
        if cmd in ("vertical-st", "charsum-audit", "michel"):
            self._check_primes()
        if cmd == "michel" and self.A is not None:
            for p in self.prime_list():
                if not self.A < p / 2:
                    raise ConfigError(f"michel: require A < p/2 (A = {self.A}, p = {p})")

    def prime_list(self) -> list[int]:
        """The explicit prime override, else all primes ``5 <= p <= x``."""
        if self.primes is not None:
            return list(self.primes)
        from .arith import sieve_primes
        return sieve_primes(self.x).tolist() if self.x and self.x >= 5 else []


def load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path} ({exc.strerror})")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path} ({exc.msg})")
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    return data


def merge(file_data: dict | None, flags: dict) -> ExperimentConfig:
    """Overlay non-``None`` flag values on the file contents; flags win."""
    data = dict(file_data or {})
    file_constants = dict(data.get("constants") or {})
    for key, value in flags.items():
        if value is None:
            continue
        if key == "constants":
            file_constants.update(value)
        else:
            data[key] = value
    if file_constants:
        data["constants"] = file_constants
    return ExperimentConfig.from_dict(data)
