"""Parameter containers and JSON configuration loading."""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

MOTOR_FIELDS = ("k_on", "k_off0", "F_d", "F_s", "V_F", "V_B")


class ConfigError(ValueError):
    """Malformed or inconsistent configuration document."""


@dataclass(frozen=True)
class MotorParams:
    """Constants of one motor species.

    Forces are in pN and speeds in nm/s; rates are per second.
    """

    k_on: float
    k_off0: float
    F_d: float
    F_s: float
    V_F: float
    V_B: float

    def __post_init__(self):
        for name in MOTOR_FIELDS:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")


class Regime:
    PLUS = "PlusWinning"
    MINUS = "MinusWinning"


@dataclass(frozen=True)
class TugOfWarConfig:
    plus: MotorParams
    minus: MotorParams
    nu: float = 1.0
    n_plus_total: Optional[int] = None
    n_minus_total: Optional[int] = None
    f_ext: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.nu) and self.nu > 0):
            raise ValueError(f"nu must be positive, got {self.nu!r}")
        for name in ("n_plus_total", "n_minus_total"):
            n = getattr(self, name)
            if n is not None and (not isinstance(n, int) or isinstance(n, bool) or n < 1):
                raise ValueError(f"{name} must be a positive integer, got {n!r}")
        if self.n_plus_total is not None and self.n_minus_total is not None:
            ratio = self.n_plus_total / self.n_minus_total
            if not math.isclose(self.nu, ratio, rel_tol=1e-12):
                raise ValueError(f"nu={self.nu} disagrees with N_plus/N_minus={ratio}")
        if self.f_ext != 0.0:
            raise ValueError("only vanishing external load is supported")

    @property
    def threshold(self) -> float:
        """Ratio y/z at which the two teams' stall forces balance."""
        return self.minus.F_s / (self.nu * self.plus.F_s)

    def with_param(self, name: str, value: float) -> "TugOfWarConfig":
        """Copy with one parameter replaced.

        ``name`` is ``nu``, ``<field>_plus``, ``<field>_minus`` or a bare
        motor field (e.g. ``V_F``), which sets both species together.
        Changing ``nu`` drops ``n_minus_total`` so the counts stay consistent.
        """
        if name == "nu":
            return dataclasses.replace(self, nu=float(value), n_minus_total=None)
        field, _, side = name.rpartition("_")
        if side in ("plus", "minus") and field in MOTOR_FIELDS:
            motor = dataclasses.replace(getattr(self, side), **{field: float(value)})
            return dataclasses.replace(self, **{side: motor})
        if name in MOTOR_FIELDS:
            return dataclasses.replace(
                self,
                plus=dataclasses.replace(self.plus, **{name: float(value)}),
                minus=dataclasses.replace(self.minus, **{name: float(value)}),
            )
        raise KeyError(f"unknown parameter {name!r}")

    def get_param(self, name: str) -> float:
        if name == "nu":
            return self.nu
        field, _, side = name.rpartition("_")
        if side in ("plus", "minus") and field in MOTOR_FIELDS:
            return getattr(getattr(self, side), field)
        if name in MOTOR_FIELDS:
            return getattr(self.plus, name)
        raise KeyError(f"unknown parameter {name!r}")


def is_param_name(name: str) -> bool:
    try:
        _probe.get_param(name)
    except KeyError:
        return False
    return True


def config_from_dict(doc: dict[str, Any]) -> TugOfWarConfig:
    """Build a config from the flat JSON key layout (``k_on_plus``, ..., ``N_minus``)."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    known = {f"{f}_{s}" for f in MOTOR_FIELDS for s in ("plus", "minus")} | {"nu", "N_plus", "N_minus"}
    for key in doc:
        if key not in known:
            raise ConfigError(f"unknown key {key!r}")

    def number(key: str) -> float:
        if key not in doc:
            raise ConfigError(f"missing key {key!r}")
        value = doc[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"key {key!r}: expected a number, got {value!r}")
        return float(value)

    def count(key: str) -> Optional[int]:
        value = doc.get(key)
        if value is None:
            return None
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ConfigError(f"key {key!r}: expected a positive integer, got {value!r}")
        return value

    motors = {}
    for side in ("plus", "minus"):
        values = {f: number(f"{f}_{side}") for f in MOTOR_FIELDS}
        for f, v in values.items():
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"key '{f}_{side}': must be positive and finite, got {v!r}")
        motors[side] = MotorParams(**values)
    n_plus, n_minus = count("N_plus"), count("N_minus")
    if "nu" in doc:
        nu = number("nu")
    elif n_plus is not None and n_minus is not None:
        nu = n_plus / n_minus
    else:
        raise ConfigError("missing key 'nu' (required unless both N_plus and N_minus are given)")
    try:
        return TugOfWarConfig(motors["plus"], motors["minus"], nu, n_plus, n_minus)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def config_to_dict(cfg: TugOfWarConfig) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    for side in ("plus", "minus"):
        motor = getattr(cfg, side)
        for f in MOTOR_FIELDS:
            doc[f"{f}_{side}"] = getattr(motor, f)
    doc["nu"] = cfg.nu
    if cfg.n_plus_total is not None:
        doc["N_plus"] = cfg.n_plus_total
    if cfg.n_minus_total is not None:
        doc["N_minus"] = cfg.n_minus_total
    return doc


def load_config(path: str | Path) -> TugOfWarConfig:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(doc)


def symmetric_config(V_F: float = 10.0, V_B: float = 10.0, nu: float = 1.0, n_total: Optional[int] = None) -> TugOfWarConfig:
    """Identical plus and minus motors with unit rates and forces."""
    motor = MotorParams(k_on=1.0, k_off0=1.0, F_d=1.0, F_s=1.0, V_F=V_F, V_B=V_B)
    n_minus = None if n_total is None else n_total
    n_plus = None if n_total is None else int(round(n_total * nu))
    return TugOfWarConfig(motor, motor, nu, n_plus, n_minus)


def asymmetric_config(V_F: float = 20.0, V_B: float = 10.0, nu: float = 1.0, n_total: Optional[int] = None) -> TugOfWarConfig:
    """Symmetric family with the plus motor's F_d and F_s raised to 1.2 pN."""
    base = symmetric_config(V_F, V_B, nu, n_total)
    plus = dataclasses.replace(base.plus, F_d=1.2, F_s=1.2)
    return dataclasses.replace(base, plus=plus)


_probe = symmetric_config()
