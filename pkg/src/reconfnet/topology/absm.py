"""Topology optimization for fixed link loads: closed-form feasibility and accelerated binary search."""

import math

import numpy as np

from ..classes import AbsmConfig, LinkLoads, Network, Topology, ToSolution
from ..exceptions import ConfigError, InfeasibleError
from ..log import get_logger
from ..utils import pair_load, safe_ceil

logger = get_logger(__name__)


def _check_u(u: float):
    if not (math.isfinite(u) and u > 0):
        raise ConfigError(field="u", requirement="a positive finite utilization", value=u)


def _required(pair: np.ndarray, u: float) -> np.ndarray:
    return safe_ceil(pair / u).astype(np.int64)


def _fits(n: np.ndarray, net: Network) -> bool:
    return bool(np.all(n.sum(axis=1) <= net.port_budget))


def _bound(pair: np.ndarray, n: np.ndarray) -> float:
    loaded = pair > 0
    if not loaded.any():
        return 0.0
    if np.any(n[loaded] == 0):
        return math.inf
    return float((pair[loaded] / n[loaded]).max())


def required_links(loads: LinkLoads, net: Network, u: float) -> np.ndarray:
    """Pointwise minimal symmetric link counts carrying `loads` at utilization u."""
    _check_u(u)
    return _required(pair_load(loads.load, net.link_capacity), u)


def feasibility_check(loads: LinkLoads, net: Network, u: float) -> tuple[bool, np.ndarray]:
    n = required_links(loads, net, u)
    return _fits(n, net), n


def refine_upper_bound(loads: LinkLoads, net: Network, n_u: np.ndarray) -> float:
    """Smallest utilization the allocation n_u still supports."""
    return _bound(pair_load(loads.load, net.link_capacity), np.asarray(n_u))


def auto_upper_bound(loads: LinkLoads, net: Network) -> float:
    return float(pair_load(loads.load, net.link_capacity).max()) + 1.0


def check_neighbour_budget(pair: np.ndarray, net: Network):
    """Every loaded pair needs one link, so loaded neighbours cannot exceed ports."""
    neighbours = (pair > 0).sum(axis=1)
    over = np.flatnonzero(neighbours > net.port_budget)
    if over.size:
        pod = int(over[0])
        raise InfeasibleError(
            pod=pod, neighbors=int(neighbours[pod]), budget=int(net.port_budget[pod])
        )


def absm(loads: LinkLoads, net: Network, cfg: AbsmConfig | None = None) -> ToSolution:
    cfg = cfg or AbsmConfig()
    pair = pair_load(loads.load, net.link_capacity)
    if not np.any(pair > 0):
        return ToSolution(Topology.zeros(net.n_pods), 0.0, 0, True)

    check_neighbour_budget(pair, net)

    if cfg.initial_upper_bound == "auto":
        upper = auto_upper_bound(loads, net)
    else:
        upper = float(cfg.initial_upper_bound)
    eps = cfg.epsilon * upper if cfg.relative else cfg.epsilon

    best = _required(pair, upper)
    iterations = 1
    if not _fits(best, net):
        logger.debug("absm: initial upper bound %g is infeasible", upper)
        return ToSolution(
            Topology.zeros(net.n_pods), math.inf, iterations, False, upper, eps
        )

    lo, hi = 0.0, _bound(pair, best)
    while hi - lo > eps and iterations < cfg.max_iterations:
        iterations += 1
        mid = (lo + hi) / 2
        n = _required(pair, mid)
        if _fits(n, net):
            hi, best = _bound(pair, n), n
        else:
            lo = mid
        logger.debug("absm: iteration %d bounds [%.9g, %.9g]", iterations, lo, hi)

    return ToSolution(Topology(best), hi, iterations, True, upper, eps)
