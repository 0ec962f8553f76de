"""INI-style experiment configuration.

Example::

    [experiment]
    kind = source          ; source | channel | syndrome
    n = 8, 12, 16
    rates = 0.6, 0.75, 0.9
    trials = 10000
    matrices = 20
    seed = 0
    mode = montecarlo      ; exact | montecarlo

    [ensemble]
    kind = sparse          ; sparse | all_linear
    tau = 3
    q = 2

    [source]
    bernoulli = 0.11       ; or: probs = 0.5, 0.3, 0.2

    [channel]
    bsc = 0.05             ; or one "row.<x> = ..." line per input symbol

Errors raise :class:`ConfigError` carrying the offending line number.
"""
from __future__ import annotations

import configparser
import re
from typing import Dict, Optional, Tuple

from . import types as ty
from .harness import ExperimentConfig


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, path: str = "<config>"):
        self.line = line
        where = f"{path}:{line}" if line else path
        super().__init__(f"{where}: {message}")


_KNOWN = {
    "experiment": {"kind", "n", "rates", "rate", "rate_b", "trials", "matrices", "seed",
                   "mode", "ci", "random_c", "xi", "reestimate", "label"},
    "ensemble": {"kind", "kind_b", "tau", "q", "alpha", "beta", "hash_pairs", "hash_trials"},
    "source": {"bernoulli", "probs", "uniform"},
    "channel": {"bsc", "additive", "identity"},
}


def _line_index(text: str) -> Dict[Tuple[str, str], int]:
    """Map ``(section, key)`` to its 1-based line; sections map under key ``""``."""
    out, section = {}, None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            out.setdefault((section, ""), i)
        elif section and line and line[0] not in "#;" and ("=" in line or ":" in line):
            key = re.split(r"[=:]", line, maxsplit=1)[0].strip().lower()
            out.setdefault((section, key), i)
    return out


class _Reader:
    def __init__(self, text: str, path: str):
        self.path = path
        self.lines = _line_index(text)
        self.cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            self.cp.read_string(text)
        except configparser.Error as e:
            raise ConfigError(str(e).splitlines()[0], getattr(e, "lineno", None), path) from None

    def fail(self, section, key, msg):
        raise ConfigError(msg, self.lines.get((section, key)) or self.lines.get((section, "")), self.path)

    def has(self, section, key):
        return self.cp.has_option(section, key)

    def get(self, section, key, conv=str, default=None, required=False):
        if not self.has(section, key):
            if required:
                self.fail(section, "", f"missing [{section}] {key}")
            return default
        raw = self.cp.get(section, key).strip()
        try:
            return conv(raw)
        except (TypeError, ValueError) as e:
            self.fail(section, key, f"bad value for {key!r}: {raw!r} ({e})")

    def check_keys(self):
        for sec in self.cp.sections():
            if sec not in _KNOWN:
                self.fail(sec, "", f"unknown section [{sec}]")
            for key in self.cp.options(sec):
                if key not in _KNOWN[sec] and not (sec == "channel" and key.startswith("row.")):
                    self.fail(sec, key, f"unknown key {key!r} in [{sec}]")


def _floats(s: str) -> Tuple[float, ...]:
    vals = tuple(float(v) for v in s.replace(",", " ").split())
    if not vals:
        raise ValueError("empty list")
    return vals


def _ints(s: str) -> Tuple[int, ...]:
    vals = tuple(int(v) for v in s.replace(",", " ").split())
    if not vals:
        raise ValueError("empty list")
    return vals


def _bool(s: str) -> bool:
    b = s.lower()
    if b in ("1", "true", "yes", "on"):
        return True
    if b in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _source(r: _Reader, q: int) -> ty.Distribution:
    if not r.cp.has_section("source"):
        r.fail("experiment", "", "missing [source] section")
    given = [k for k in ("bernoulli", "probs", "uniform") if r.has("source", k)]
    if len(given) != 1:
        r.fail("source", "", "give exactly one of bernoulli, probs, uniform")
    k = given[0]
    try:
        if k == "bernoulli":
            return ty.Distribution.bernoulli(r.get("source", k, float))
        if k == "uniform":
            return ty.Distribution.uniform(r.get("source", k, int))
        return ty.Distribution(r.get("source", k, _floats))
    except ValueError as e:
        r.fail("source", k, str(e))


def _channel(r: _Reader, x_size: int) -> Optional[ty.ConditionalDistribution]:
    if not r.cp.has_section("channel"):
        return None
    keys = r.cp.options("channel")
    try:
        if "bsc" in keys:
            return ty.ConditionalDistribution.bsc(r.get("channel", "bsc", float))
        if "additive" in keys:
            return ty.ConditionalDistribution.additive(
                ty.Distribution(r.get("channel", "additive", _floats)))
        if "identity" in keys:
            k = r.get("channel", "identity", int)
            return ty.ConditionalDistribution([[float(i == j) for j in range(k)] for i in range(k)])
        rows = [r.get("channel", f"row.{x}", _floats) for x in range(x_size)]
        if any(row is None for row in rows):
            r.fail("channel", "", f"need row.0 .. row.{x_size - 1}")
        return ty.ConditionalDistribution(rows)
    except ValueError as e:
        r.fail("channel", keys[0] if keys else "", str(e))


def parse_config(text: str, path: str = "<config>", kind: Optional[str] = None) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig`; ``kind`` overrides or fills ``[experiment] kind``."""
    r = _Reader(text, path)
    r.check_keys()
    if not r.cp.has_section("experiment"):
        raise ConfigError("missing [experiment] section", None, path)
    ex = "experiment"
    file_kind = r.get(ex, "kind")
    if kind and file_kind and file_kind != kind:
        r.fail(ex, "kind", f"config is for {file_kind!r}, not {kind!r}")
    kind = kind or file_kind
    if kind is None:
        r.fail(ex, "", "missing [experiment] kind")
    en = "ensemble"
    q = r.get(en, "q", int, 2)
    src = _source(r, q)
    chan = _channel(r, src.size)
    if kind == "channel" and chan is None:
        r.fail(ex, "kind", "channel experiments need a [channel] section")
    rates = r.get(ex, "rates", _floats) or r.get(ex, "rate", _floats)
    if rates is None:
        r.fail(ex, "", "missing [experiment] rates")
    kw = dict(
        kind=kind,
        n_values=r.get(ex, "n", _ints, required=True),
        rates=rates,
        source=src,
        channel=chan,
        rate_b=r.get(ex, "rate_b", float),
        ensemble=r.get(en, "kind", str, "sparse"),
        ensemble_b=r.get(en, "kind_b", str),
        tau=r.get(en, "tau", int, 3),
        q=q,
        trials=r.get(ex, "trials", int, 10_000),
        matrices=r.get(ex, "matrices", int, 1),
        seed=r.get(ex, "seed", int, 0),
        mode=r.get(ex, "mode", str, "montecarlo"),
        ci=r.get(ex, "ci", str, "normal"),
        random_c=r.get(ex, "random_c", _bool, True),
        xi=r.get(ex, "xi", float, 1.0),
        alpha=r.get(en, "alpha", float),
        beta=r.get(en, "beta", float),
        hash_pairs=r.get(en, "hash_pairs", int, 64),
        hash_trials=r.get(en, "hash_trials", int, 500),
        reestimate=r.get(ex, "reestimate", _bool, True),
        label=r.get(ex, "label", str, ""),
    )
    for name in ("kind", "kind_b"):
        v = r.get(en, name)
        if v is not None and v not in ("sparse", "all_linear"):
            r.fail(en, name, f"unknown ensemble {v!r}")
    if kw["ci"] not in ("normal", "exact"):
        r.fail(ex, "ci", f"unknown interval {kw['ci']!r}")
    try:
        return ExperimentConfig(**kw)
    except ValueError as e:
        msg = str(e)
        key = next((k for k in ("mode", "trials", "matrices", "rate_b", "kind") if k in msg), "")
        r.fail(ex, key, msg)


def load_config(path: str, kind: Optional[str] = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(e.strerror or str(e), None, path) from None
    return parse_config(text, path, kind)
