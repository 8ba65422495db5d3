"""Run configuration: ``key = value`` lines, ``#`` comments."""
from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Config:
    bandwidth: int = 1
    mode: str = "charged"
    seed: int = 0
    c: float = 2.0
    c_g: float = 4.0
    # envelope constants checked by verify/bench and the acceptance suite
    fastquery_c: float = 32.0
    fastpre_c: float = 64.0
    failure_allowance: float = 0.01
    max_weight: int = 100
    simulate_broadcasts: bool = False

    def with_overrides(self, **kw) -> "Config":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


class ConfigError(ValueError):
    pass


def _coerce(name: str, raw: str, kind):
    raw = raw.strip().strip('"').strip("'")
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        return kind(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def parse_config(text: str) -> Config:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#",))
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    known = {f.name: f.type for f in fields(Config)}
    kinds = {"int": int, "float": float, "str": str, "bool": bool}
    values = {}
    for key, raw in parser["run"].items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = _coerce(key, raw, kinds[known[key]])
    cfg = Config(**values)
    if cfg.mode not in ("charged", "faithful"):
        raise ConfigError(f"mode must be charged or faithful, not {cfg.mode!r}")
    if cfg.bandwidth < 1:
        raise ConfigError("bandwidth must be >= 1")
    return cfg


def load_config(path: str | None) -> Config:
    if path is None:
        return Config()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
