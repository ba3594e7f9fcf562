"""Channel acceptance models for liquidity failures."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .graph import Network, Route
from .rng import u53

SCALE = 1 << 53


class Kind(str, Enum):
    ALWAYS = "always"
    BERNOULLI = "bernoulli"
    UNIFORM_LIQUIDITY = "uniform-liquidity"
    BLOCKED = "blocked"


@dataclass(frozen=True)
class AvailabilityModel:
    kind: Kind = Kind.ALWAYS
    p: float = 1.0
    factor: float = 0.0
    blocked: frozenset = field(default_factory=frozenset)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.factor < 0:
            raise ValueError("factor must be >= 0")


def always_available() -> AvailabilityModel:
    return AvailabilityModel(Kind.ALWAYS)


def bernoulli(p: float, seed: int = 0) -> AvailabilityModel:
    return AvailabilityModel(Kind.BERNOULLI, p=p, seed=seed)


def uniform_liquidity(factor: float, seed: int = 0) -> AvailabilityModel:
    return AvailabilityModel(Kind.UNIFORM_LIQUIDITY, factor=factor, seed=seed)


def blocked_schedule(indices) -> AvailabilityModel:
    return AvailabilityModel(Kind.BLOCKED, blocked=frozenset(indices))


def channel_accepts(capacity: int, amount: int, model: AvailabilityModel, draw: int) -> bool:
    """Decide one channel; ``draw`` is a uniform integer in ``[0, 2**53)``.

    Uniform liquidity locks ``v * amount * factor`` msat (floored) with
    ``v = draw / 2**53`` and accepts iff the rest still covers ``amount``.
    """
    if model.kind == Kind.BERNOULLI:
        return draw < model.p * SCALE
    if model.kind == Kind.UNIFORM_LIQUIDITY:
        f = Fraction(model.factor)
        locked = (draw * amount * f.numerator) // (SCALE * f.denominator)
        return capacity - locked >= amount
    return True


class Episode:
    """Liquidity state for one discovery episode.

    Each channel's draw is taken once, lazily, from ``(model.seed, episode_id,
    channel)``, so candidate routes sharing a channel see the same state and
    re-running an episode reproduces it. ``presented`` counts routes tested so
    far; the blocked schedule keys on it.
    """

    def __init__(self, network: Network, model: AvailabilityModel, episode_id: int, amount: int):
        self.network = network
        self.model = model
        self.episode_id = episode_id
        self.amount = amount
        self.presented = 0
        self._state = {}

    def draw(self, channel: int) -> int:
        return u53(self.model.seed, self.episode_id, channel)

    def channel_ok(self, channel: int) -> bool:
        ok = self._state.get(channel)
        if ok is None:
            cap = int(self.network.capacity[channel])
            ok = channel_accepts(cap, self.amount, self.model, self.draw(channel))
            self._state[channel] = ok
        return ok

    def route_available(self, route: Route) -> bool:
        index = self.presented
        self.presented += 1
        if self.model.kind == Kind.BLOCKED:
            return index not in self.model.blocked
        if self.model.kind == Kind.ALWAYS:
            return True
        return all(self.channel_ok(c) for c in route.channels)


def route_available(route: Route, amount: int, model: AvailabilityModel, episode: Episode) -> bool:
    if episode.amount != amount or episode.model != model:
        raise ValueError("episode was opened for a different amount or model")
    return episode.route_available(route)
