"""Experiment configuration: a flat INI file of key = value lists.

One [model] section selects and parameterizes the system, [sweep] holds
the lambda0 / delta_lambda / n0 grids, [window] the trace sampling,
[unfolding] the spacing-diagnostic options, and [run] output and
execution knobs.  All validation problems are collected and reported in
a single ConfigError.
"""

import configparser
import hashlib
from dataclasses import dataclass, replace

from .errors import ConfigError
from .models import DickeParams, SpinChainParams
from .quench import TimeWindow

__all__ = ["ExperimentConfig", "load_config", "parse_config"]

_DEFAULTS = {
    "window": {"tau0": "1e7", "span": "250", "n_steps": "1000"},
    "unfolding": {"poly_degree": "6", "trim_fraction": "0.1"},
    "run": {"out_dir": "runs", "seed": "0", "workers": "1", "truncation_k": "200"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed and validated experiment description."""

    params: object  # DickeParams or SpinChainParams at coupling 0
    lambda0: tuple
    delta_lambda: tuple
    n0: tuple
    window: TimeWindow
    poly_degree: int
    trim_fraction: float
    out_dir: str
    seed: int
    workers: int
    truncation_k: int
    raw_text: str

    @property
    def config_hash(self):
        # Hash only what determines the numbers (model, grids, window,
        # unfolding, seed): output bytes must not depend on out_dir or
        # worker count.
        canon = "\n".join(
            [
                repr(self.params),
                " ".join(repr(x) for x in self.lambda0),
                " ".join(repr(x) for x in self.delta_lambda),
                " ".join(str(n) for n in self.n0),
                repr(self.window),
                f"{self.poly_degree} {self.trim_fraction!r}",
                str(self.seed),
            ]
        )
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]

    def with_full_scale(self):
        """Opt-in full-scale variant: Dicke j = 20, n_max = 250."""
        if not isinstance(self.params, DickeParams):
            return self
        scaled = DickeParams(
            j=20.0,
            omega=self.params.omega,
            omega0=self.params.omega0,
            lam=self.params.lam,
            n_max=250,
        )
        return replace(self, params=scaled)


def _floats(raw):
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def _ints(raw):
    return tuple(int(tok) for tok in raw.replace(",", " ").split())


def parse_config(text):
    """Parse and validate config text; raises ConfigError listing every
    problem at once."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    problems = []
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"INI syntax: {exc}"]) from exc

    def get(section, key, cast, default=None):
        raw = cp.get(section, key, fallback=None)
        if raw is None:
            fb = _DEFAULTS.get(section, {}).get(key, default)
            if fb is None:
                problems.append(f"[{section}] {key} is required")
                return None
            raw = fb
        try:
            return cast(raw)
        except (TypeError, ValueError) as exc:
            problems.append(f"[{section}] {key} = {raw!r}: {exc}")
            return None

    params = None
    kind = cp.get("model", "kind", fallback=None)
    if kind is None:
        problems.append("[model] kind is required (dicke or spin_chain)")
    elif kind == "dicke":
        j = get("model", "j", float)
        n_max = get("model", "n_max", int)
        omega = get("model", "omega", float, default="1.0")
        omega0 = get("model", "omega0", float, default="1.0")
        if None not in (j, n_max, omega, omega0):
            try:
                params = DickeParams(j=j, omega=omega, omega0=omega0, n_max=n_max)
            except ValueError as exc:
                problems.append(f"[model] {exc}")
    elif kind == "spin_chain":
        length = get("model", "L", int)
        n_up = get("model", "n_up", int)
        mu = get("model", "mu", float, default="0.5")
        exchange = get("model", "J", float, default="1.0")
        if None not in (length, n_up, mu, exchange):
            try:
                params = SpinChainParams(L=length, n_up=n_up, mu=mu, J=exchange)
            except ValueError as exc:
                problems.append(f"[model] {exc}")
    else:
        problems.append(f"[model] kind = {kind!r} is not dicke or spin_chain")

    lambda0 = get("sweep", "lambda0", _floats) or ()
    delta_lambda = get("sweep", "delta_lambda", _floats) or ()
    n0 = get("sweep", "n0", _ints) or ()
    if cp.has_section("sweep"):
        if not lambda0:
            problems.append("[sweep] lambda0 list must be non-empty")
        if not delta_lambda:
            problems.append("[sweep] delta_lambda list must be non-empty")
        if not n0:
            problems.append("[sweep] n0 list must be non-empty")
        if any(x < 0 for x in lambda0):
            problems.append("[sweep] lambda0 values must be non-negative")
        if any(x < 0 for x in delta_lambda):
            problems.append("[sweep] delta_lambda values must be non-negative")
        if any(x < 1 for x in n0):
            problems.append("[sweep] n0 indices are 1-based and must be >= 1")
    else:
        problems.append("[sweep] section is required")

    tau0 = get("window", "tau0", float)
    span = get("window", "span", float)
    n_steps = get("window", "n_steps", int)
    window = None
    if None not in (tau0, span, n_steps):
        try:
            window = TimeWindow(tau0=tau0, span=span, n_steps=n_steps)
        except ValueError as exc:
            problems.append(f"[window] {exc}")

    poly_degree = get("unfolding", "poly_degree", int)
    trim_fraction = get("unfolding", "trim_fraction", float)
    if poly_degree is not None and poly_degree < 1:
        problems.append("[unfolding] poly_degree must be >= 1")
    if trim_fraction is not None and not 0.0 <= trim_fraction < 0.5:
        problems.append("[unfolding] trim_fraction must lie in [0, 0.5)")

    out_dir = get("run", "out_dir", str)
    seed = get("run", "seed", int)
    workers = get("run", "workers", int)
    truncation_k = get("run", "truncation_k", int)
    if workers is not None and workers < 1:
        problems.append("[run] workers must be >= 1")
    if truncation_k is not None and truncation_k < 1:
        problems.append("[run] truncation_k must be >= 1")

    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(
        params=params,
        lambda0=lambda0,
        delta_lambda=delta_lambda,
        n0=n0,
        window=window,
        poly_degree=poly_degree,
        trim_fraction=trim_fraction,
        out_dir=out_dir,
        seed=seed,
        workers=workers,
        truncation_k=truncation_k,
        raw_text=text,
    )


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
