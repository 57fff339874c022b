"""Application traffic models: mixture-distributed message sources and bulk fill.

A message source draws APDU sizes and inter-arrival times from weighted
mixtures of deterministic, Weibull, lognormal, and truncated-normal
components. A bulk source keeps a sender's window permanently full.
"""

import math
from typing import Callable, List, Optional

import numpy as np

from .errors import ConfigError, SimulationError
from .kernel import Kernel, s_to_ticks

MIXTURE_KINDS = ("deterministic", "weibull", "lognormal", "normal")

MAX_REDRAWS = 1000


class MixtureDistribution:
    """Weighted mixture over scalar components, sampled with one RNG stream."""

    def __init__(self, components: List[dict], rng: np.random.Generator):
        if not components:
            raise ConfigError("mixture: needs at least one component")
        self.rng = rng
        self.components = []
        total = 0.0
        for i, comp in enumerate(components):
            where = f"mixture component {i}"
            if not isinstance(comp, dict):
                raise ConfigError(f"{where}: must be a mapping")
            kind = comp.get("kind")
            if kind not in MIXTURE_KINDS:
                raise ConfigError(f"{where}: kind {kind!r} is not one of {MIXTURE_KINDS}")
            weight = comp.get("weight")
            if not isinstance(weight, (int, float)) or not 0.0 < weight <= 1.0:
                raise ConfigError(f"{where}: weight must be in (0, 1]")
            known = {"kind", "weight"}
            if kind == "deterministic":
                value = self._num(comp, "value", where)
                if value <= 0:
                    raise ConfigError(f"{where}: value must be positive")
                params = ("deterministic", value)
                known |= {"value"}
            elif kind == "weibull":
                shape = self._num(comp, "shape", where)
                scale = self._num(comp, "scale", where)
                if shape <= 0 or scale <= 0:
                    raise ConfigError(f"{where}: shape and scale must be positive")
                params = ("weibull", shape, scale)
                known |= {"shape", "scale"}
            elif kind == "lognormal":
                mu = self._num(comp, "mu", where)
                sigma = self._num(comp, "sigma", where)
                if sigma < 0:
                    raise ConfigError(f"{where}: sigma must be non-negative")
                params = ("lognormal", mu, sigma)
                known |= {"mu", "sigma"}
            else:
                mean = self._num(comp, "mean", where)
                stddev = self._num(comp, "stddev", where)
                if stddev < 0:
                    raise ConfigError(f"{where}: stddev must be non-negative")
                if mean <= 0 and stddev == 0:
                    raise ConfigError(f"{where}: degenerate normal must be positive")
                params = ("normal", mean, stddev)
                known |= {"mean", "stddev"}
            extra = set(comp) - known - {k for k in comp if k.startswith("note")}
            if extra:
                raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
            self.components.append((float(weight), params))
            total += float(weight)
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"mixture: weights sum to {total!r}, expected 1.0")
        self._cum = []
        acc = 0.0
        for weight, _ in self.components:
            acc += weight
            self._cum.append(acc)
        self._cum[-1] = 1.0

    @staticmethod
    def _num(comp: dict, key: str, where: str) -> float:
        value = comp.get(key)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{where}: {key} must be a number")
        return float(value)

    def _pick(self) -> tuple:
        u = self.rng.random()
        for threshold, (_, params) in zip(self._cum, self.components):
            if u < threshold:
                return params
        return self.components[-1][1]

    def sample(self) -> float:
        params = self._pick()
        kind = params[0]
        if kind == "deterministic":
            return params[1]
        if kind == "weibull":
            shape, scale = params[1], params[2]
            u = self.rng.random()
            return scale * (-math.log(1.0 - u)) ** (1.0 / shape)
        if kind == "lognormal":
            mu, sigma = params[1], params[2]
            return math.exp(mu + sigma * self.rng.standard_normal())
        mean, stddev = params[1], params[2]
        if stddev == 0.0:
            return mean
        for _ in range(MAX_REDRAWS):
            x = mean + stddev * self.rng.standard_normal()
            if x > 0.0:
                return x
        raise SimulationError("truncated normal: exceeded redraw limit")

    def mean(self) -> float:
        """Analytic mixture mean (the normal term uses its truncated form)."""
        out = 0.0
        for weight, params in self.components:
            kind = params[0]
            if kind == "deterministic":
                m = params[1]
            elif kind == "weibull":
                shape, scale = params[1], params[2]
                m = scale * math.gamma(1.0 + 1.0 / shape)
            elif kind == "lognormal":
                mu, sigma = params[1], params[2]
                m = math.exp(mu + sigma * sigma / 2.0)
            else:
                mean, stddev = params[1], params[2]
                if stddev == 0.0:
                    m = mean
                else:
                    a = -mean / stddev
                    phi = math.exp(-a * a / 2.0) / math.sqrt(2.0 * math.pi)
                    upper = 1.0 - 0.5 * (1.0 + math.erf(a / math.sqrt(2.0)))
                    m = mean + stddev * phi / upper
            out += weight * m
        return out


class ApduSource:
    """Feeds whole application messages to a sender at mixture-drawn intervals."""

    def __init__(self, kernel: Kernel, sender, size_dist: MixtureDistribution,
                 iat_dist: MixtureDistribution, *, start_s: float = 0.0,
                 stop_s: Optional[float] = None, name: str = "apdu-source"):
        self.kernel = kernel
        self.sender = sender
        self.size_dist = size_dist
        self.iat_dist = iat_dist
        self.name = name
        self.start_ns = s_to_ticks(start_s)
        self.stop_ns = None if stop_s is None else s_to_ticks(stop_s)
        self.messages = 0
        self.bytes_offered = 0
        first = self.start_ns + s_to_ticks(self.iat_dist.sample())
        self._arm(first)

    def _arm(self, at_ns: int) -> None:
        if self.stop_ns is not None and at_ns >= self.stop_ns:
            return
        self.kernel.schedule(at_ns, self._fire, None, kind="app-generate",
                             target=self.name)

    def _fire(self, _arg) -> None:
        size = max(1, round(self.size_dist.sample()))
        self.messages += 1
        self.bytes_offered += size
        self.sender.on_app_data(size)
        nxt = self.kernel.now + s_to_ticks(self.iat_dist.sample())
        self._arm(nxt)


class FtpSource:
    """Greedy bulk upload: grants the sender as many bytes as it can send."""

    def __init__(self, kernel: Kernel, sender, *, start_s: float = 0.0,
                 stop_s: Optional[float] = None):
        self.kernel = kernel
        self.sender = sender
        self.start_ns = s_to_ticks(start_s)
        self.stop_ns = None if stop_s is None else s_to_ticks(stop_s)
        self.bytes_granted = 0
        sender.app_pull = self.pull
        kernel.schedule(self.start_ns, lambda _arg: sender.wakeup(), None,
                        kind="app-generate", target="ftp-source")

    def pull(self, want_bytes: int) -> int:
        now = self.kernel.now
        if now < self.start_ns:
            return 0
        if self.stop_ns is not None and now >= self.stop_ns:
            return 0
        self.bytes_granted += want_bytes
        return want_bytes
