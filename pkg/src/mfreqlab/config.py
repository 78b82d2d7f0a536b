"""Run configuration: defaults, a flat key=value file, environment overrides.

Precedence, lowest first: built-in defaults, config file, ``MFREQLAB_<KEY>``
environment variables, explicit command-line flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

from .errors import ParameterError

ENV_PREFIX = "MFREQLAB_"


def _opt_int(text):
    return None if text in (None, "", "none", "None") else int(text)


def _opt_float(text):
    return None if text in (None, "", "none", "None") else float(text)


def _opt_str(text):
    return None if text in (None, "", "none", "None") else str(text)


@dataclass
class RunConfig:
    N: int = field(default=256, metadata={"doc": "grid side length (even)", "parse": int})
    n: int = field(default=1, metadata={"doc": "lattice dimension, 1..3", "parse": int})
    s: int = field(default=2, metadata={"doc": "denominator level s", "parse": int})
    kappa: int = field(default=2, metadata={"doc": "bump scale exponent: chi_s = chi0(2^(kappa s) .)",
                                            "parse": int})
    eps1: float | None = field(default=None, metadata={"doc": "major-arc exponent; none means 1/(10 d)",
                                                       "parse": _opt_float})
    d: int = field(default=1, metadata={"doc": "phase degree, phase lambda |y|^(2d)", "parse": int})
    q: float = field(default=3.0, metadata={"doc": "outer variation exponent, q > 2", "parse": float})
    r: float = field(default=2.5, metadata={"doc": "inner variation exponent, 2 < r < q", "parse": float})
    size_xi: int = field(default=4, metadata={"doc": "number of frequencies |Xi|", "parse": int})
    seed: int | None = field(default=None, metadata={"doc": "random seed; randomized commands need one",
                                                      "parse": _opt_int})
    eta: float = field(default=1.0, metadata={"doc": "growth exponent of the family's V^r bound",
                                              "parse": float})
    trials: int = field(default=4, metadata={"doc": "random trials per point", "parse": int})
    period: int = field(default=16, metadata={"doc": "period in x of random coefficient fields",
                                              "parse": int})
    j_max: int = field(default=12, metadata={"doc": "largest dyadic kernel scale", "parse": int})
    budget: int = field(default=10**7, metadata={"doc": "work budget for enumerations and sums",
                                                 "parse": int})
    records: str = field(default="records.jsonl", metadata={"doc": "experiment record store (JSON lines)",
                                                            "parse": str})
    out: str = field(default="report", metadata={"doc": "report output directory", "parse": str})
    cache: str | None = field(default=None, metadata={"doc": "Gauss-sum cache file; none keeps it in memory",
                                                      "parse": _opt_str})
    backend: str | None = field(default=None, metadata={"doc": "kernel backend: cython, python or none (auto)",
                                                        "parse": _opt_str})

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def update(self, pairs: dict, source: str) -> None:
        meta = {f.name: f.metadata for f in fields(self)}
        for key, raw in pairs.items():
            if key not in meta:
                raise ParameterError(f"unknown configuration key {key!r} in {source}")
            try:
                val = meta[key]["parse"](raw) if isinstance(raw, str) else raw
            except ValueError as exc:
                raise ParameterError(f"bad value for {key} in {source}: {raw!r}") from exc
            setattr(self, key, val)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.keys()}

    @classmethod
    def documented_defaults(cls) -> dict:
        return {f.name: {"default": f.default, "doc": f.metadata["doc"]} for f in fields(cls)}


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; blank lines and ``#`` comments ignored."""
    pairs = {}
    with open(path) as fh:
        for num, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{num}: expected key=value")
            key, val = (part.strip() for part in line.split("=", 1))
            pairs[key] = val
    return pairs


def env_overrides(environ=None) -> dict:
    """``MFREQLAB_<KEY>`` variables; the key matches exactly, else lower-cased
    (so ``MFREQLAB_N`` is N and ``MFREQLAB_KAPPA`` is kappa)."""
    environ = os.environ if environ is None else environ
    known = set(RunConfig.keys())
    out = {}
    for key, val in environ.items():
        if key.startswith(ENV_PREFIX):
            name = key[len(ENV_PREFIX):]
            out[name if name in known else name.lower()] = val
    return out


def load_config(path=None, environ=None, flags: dict | None = None) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        cfg.update(read_config_file(path), str(path))
    cfg.update(env_overrides(environ), "environment")
    if flags:
        cfg.update({k: v for k, v in flags.items() if v is not None}, "flags")
    return cfg
