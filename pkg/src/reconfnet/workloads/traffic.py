"""Seeded traffic generators: gravity background, AI elephant flows and their mix."""

import numpy as np

from ..classes import Network, TrafficMatrix
from ..exceptions import ConfigError, FormatError, ReconfnetError


def _n_pods(net: Network | int) -> int:
    return net if isinstance(net, int) else net.n_pods


def gen_gravity_traffic(
    net: Network | int, total_volume: float, rng_seed: int, sigma: float = 1.0
) -> TrafficMatrix:
    """D_ij proportional to w_i * w_j with log-normal weights, summing to `total_volume`.

    sigma=0 gives uniform weights.
    """
    if not total_volume >= 0:
        raise ConfigError(field="total_volume", requirement="non-negative", value=total_volume)
    if not sigma >= 0:
        raise ConfigError(field="sigma", requirement="non-negative", value=sigma)
    n = _n_pods(net)
    rng = np.random.default_rng(rng_seed)
    w = rng.lognormal(mean=0.0, sigma=sigma, size=n)
    outer = np.outer(w, w)
    np.fill_diagonal(outer, 0.0)
    return TrafficMatrix(total_volume * outer / outer.sum())


def random_derangement(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform permutation without fixed points (rejection sampling)."""
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == np.arange(n)):
            return perm


def gen_ai_traffic(
    net: Network | int, n_flows: int, flow_size: float, rng_seed: int
) -> TrafficMatrix:
    """`n_flows` elephant flows along the edges of a random derangement."""
    n = _n_pods(net)
    if n < 2:
        raise ConfigError(field="n_pods", requirement="at least 2", value=n)
    if not 0 <= n_flows <= n:
        raise ConfigError(field="n_flows", requirement=f"between 0 and {n}", value=n_flows)
    if not flow_size >= 0:
        raise ConfigError(field="flow_size", requirement="non-negative", value=flow_size)
    rng = np.random.default_rng(rng_seed)
    perm = random_derangement(n, rng)
    sources = rng.permutation(n)[:n_flows]
    demand = np.zeros((n, n))
    demand[sources, perm[sources]] = flow_size
    return TrafficMatrix(demand)


def mix_traffic(
    ai: TrafficMatrix, background_fraction: float, rng_seed: int, sigma: float = 1.0
) -> TrafficMatrix:
    """AI flows plus a gravity floor carrying `background_fraction` of the AI volume."""
    if not background_fraction >= 0:
        raise ConfigError(
            field="background_fraction", requirement="non-negative", value=background_fraction
        )
    if background_fraction == 0:
        return ai
    background = gen_gravity_traffic(ai.n_pods, background_fraction * ai.total, rng_seed, sigma)
    return ai + background


def _options(spec: str, parts: list[str], allowed: set[str]) -> tuple[list[str], dict[str, str]]:
    positional, options = [], {}
    for part in parts:
        if "=" in part:
            key, value = part.split("=", 1)
            if key not in allowed:
                raise FormatError(403, kind="traffic", spec=spec)
            options[key] = value
        else:
            positional.append(part)
    return positional, options


def parse_traffic_spec(spec: str, net: Network, seed: int = 0) -> TrafficMatrix:
    """Build traffic from `gravity:VOLUME[:sigma=S][:seed=K]` or
    `ai:FLOWS:SIZE[:background=F][:seed=K]`; `seed` applies when none is given."""
    kind, *parts = spec.split(":")
    try:
        if kind == "gravity":
            (volume,), opts = _options(spec, parts, {"sigma", "seed"})
            return gen_gravity_traffic(
                net,
                float(volume),
                int(opts.get("seed", seed)),
                float(opts.get("sigma", 1.0)),
            )
        if kind == "ai":
            (flows, size), opts = _options(spec, parts, {"background", "seed"})
            rng_seed = int(opts.get("seed", seed))
            ai = gen_ai_traffic(net, int(flows), float(size), rng_seed)
            return mix_traffic(ai, float(opts.get("background", 0.0)), rng_seed + 1)
    except ValueError as e:
        if isinstance(e, ReconfnetError):
            raise
        raise FormatError(403, kind="traffic", spec=spec)
    raise FormatError(403, kind="traffic", spec=spec)
