"""Run configuration: defaults < JSON config file < DNH_* environment < flags."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields

from .field import prime_power

ENV_PREFIX = "DNH_"
FORMATS = ("json", "table")


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    q: int = 3
    prec: int = 60
    vdigits: int = 30
    seed: int = 0
    format: str = "json"
    suite: str = "all"

    def validate(self) -> "Config":
        try:
            prime_power(self.q)
        except ValueError:
            raise ConfigError(f"q = {self.q} is not a prime power") from None
        if self.q > 256:
            raise ConfigError(f"q = {self.q} exceeds the supported range q ≤ 256")
        if self.prec < self.q * self.q:
            raise ConfigError(f"precision {self.prec} is below q² = {self.q * self.q}")
        if self.vdigits < 1:
            raise ConfigError("vdigits must be positive")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        return self

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def load(cls, path: str | None = None, env: dict | None = None, overrides: dict | None = None) -> "Config":
        values: dict = {}
        types = {f.name: f.type for f in fields(cls)}
        if path:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            unknown = set(data) - set(types)
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
            values.update(data)
        env = os.environ if env is None else env
        for name, typ in types.items():
            raw = env.get(ENV_PREFIX + name.upper())
            if raw is not None:
                values[name] = int(raw) if typ in ("int", int) else raw
        for name, val in (overrides or {}).items():
            if val is not None:
                values[name] = val
        try:
            cfg = cls(**values)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        for name, typ in types.items():
            if typ in ("int", int) and not isinstance(getattr(cfg, name), int):
                raise ConfigError(f"{name} must be an integer")
        return cfg.validate()
