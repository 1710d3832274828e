"""Routing optimization on a fixed topology by blockwise MLU descent.

Each sweep visits the loaded source-destination pairs, busiest bottleneck
first, and re-optimizes one pair's split with every other pair frozen. The
one-pair problem is exact: a pair's two-hop paths are link-disjoint, so the
smallest feasible bottleneck level is found by binary search over a greedy
fill of the residual capacities.

Single-pair moves stall where only a joint move of several pairs lowers the
maximum. Once the sweeps settle, a smoothing phase replaces the maximum by a
log-sum-exp of all link utilizations, moves every pair at once towards its best
response under that cost and lowers the temperature in stages. Link prices of
the smooth cost bound the optimum from below and end the phase once the gap
closes. The best point found is swept again.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..classes import Network, RoConfig, Routing, Topology, TrafficMatrix
from ..exceptions import ValidationError
from ..log import get_logger
from ..model import capacity_matrix, compute_link_loads
from .paths import PathSet, enumerate_two_hop_paths

logger = get_logger(__name__)

# smoothing temperatures, relative to the MLU the sweeps reached
START_TEMPERATURE = 0.02
COOLING = 0.5
STAGE_STEPS = 25
MAX_BISECTIONS = 100


def _util(load: np.ndarray, capacity: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        util = np.where(capacity > 0, load / np.where(capacity > 0, capacity, 1.0), 0.0)
    util[(capacity == 0) & (load > 1e-12)] = math.inf
    return util


def _carried_load(volume: np.ndarray, splits: np.ndarray) -> np.ndarray:
    """Link loads of arbitrary (also signed) relay splits."""
    carried = splits * volume[:, :, None]
    second = carried.sum(axis=0).T
    np.fill_diagonal(second, 0.0)
    return carried.sum(axis=1) + second


@dataclass
class _State:
    demand: np.ndarray
    capacity: np.ndarray
    usable: np.ndarray
    splits: np.ndarray
    load: np.ndarray

    def mlu(self) -> float:
        util = _util(self.load, self.capacity)
        return float(util.max()) if util.size else 0.0

    def apply(self, s: int, d: int, x: np.ndarray, sign: float):
        """Add (sign=1) or remove (sign=-1) pair (s, d) carrying split x."""
        carried = sign * self.demand[s, d] * x
        self.load[s, :] += carried
        second = carried.copy()
        second[d] = 0.0
        self.load[:, d] += second
        if sign < 0:
            np.maximum(self.load[s, :], 0.0, out=self.load[s, :])
            np.maximum(self.load[:, d], 0.0, out=self.load[:, d])

    def saturated(self, mlu: float, tolerance: float) -> int:
        """Links within `tolerance` of the current MLU."""
        if mlu <= 0:
            return 0
        return int((_util(self.load, self.capacity) >= mlu - tolerance).sum())

    def block_order(self) -> list[tuple[int, int]]:
        """Loaded pairs by descending bottleneck over their used paths, ties by index."""
        util = _util(self.load, self.capacity)
        through = np.maximum(util[:, None, :], util.T[None, :, :])
        bottleneck = np.where(self.splits > 0, through, 0.0).max(axis=2)
        rows, cols = np.nonzero(self.demand > 0)
        order = np.lexsort((cols, rows, -bottleneck[rows, cols]))
        return [(int(rows[x]), int(cols[x])) for x in order]


def _path_terms(state: _State, s: int, d: int):
    """Residual load and capacity on both hops of every path of pair (s, d)."""
    r1, c1 = state.load[s, :].copy(), state.capacity[s, :].copy()
    r2, c2 = state.load[:, d].copy(), state.capacity[:, d].copy()
    # the direct path has no second hop
    r2[d], c2[d] = 0.0, math.inf
    return r1, c1, r2, c2


def _fill(level: float, v: float, usable, r1, c1, r2, c2) -> np.ndarray:
    """Largest share each path can take without exceeding `level`."""
    with np.errstate(invalid="ignore"):
        room = np.minimum(level * c1 - r1, np.where(np.isinf(c2), math.inf, level * c2 - r2))
    return np.where(usable, np.maximum(room, 0.0), 0.0) / v


def _level(x: np.ndarray, v: float, r1, c1, r2, c2) -> float:
    used = x > 0
    if not used.any():
        return 0.0
    first = (r1[used] + v * x[used]) / c1[used]
    c2u = c2[used]
    second = np.where(np.isinf(c2u), 0.0, (r2[used] + v * x[used]) / np.where(np.isinf(c2u), 1.0, c2u))
    return float(max(first.max(), second.max()))


def optimize_block(state: _State, s: int, d: int, cfg: RoConfig) -> bool:
    """Re-split pair (s, d) at its smallest bottleneck level; True if a share moved."""
    v = state.demand[s, d]
    old = state.splits[s, d].copy()
    usable = state.usable[s, d]

    state.apply(s, d, old, -1.0)
    r1, c1, r2, c2 = _path_terms(state, s, d)
    hi = _level(old, v, r1, c1, r2, c2)

    with np.errstate(divide="ignore", invalid="ignore"):
        hop1 = np.where(usable, r1 / c1, math.inf)
        hop2 = np.where(usable & ~np.isinf(c2), r2 / np.where(np.isinf(c2), 1.0, c2), 0.0)
    lo = float(np.maximum(hop1, hop2).min())

    while hi - lo > cfg.epsilon_inner:
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        if _fill(mid, v, usable, r1, c1, r2, c2).sum() >= 1.0:
            hi = mid
        else:
            lo = mid

    room = _fill(hi, v, usable, r1, c1, r2, c2)
    total = room.sum()
    new = room / total if total >= 1.0 else old
    if new is not old and _level(new, v, r1, c1, r2, c2) > _level(old, v, r1, c1, r2, c2):
        new = old

    state.splits[s, d] = new
    state.apply(s, d, new, 1.0)
    # the level is only known to epsilon_inner, and so are the shares
    widest = float(np.where(usable, np.maximum(c1, np.where(np.isinf(c2), 0.0, c2)), 0.0).max())
    return bool(np.abs(new - old).max() > max(cfg.tolerance, 2.0 * cfg.epsilon_inner * widest / v))


def _descend(state: _State, cfg: RoConfig) -> float:
    mlu = state.mlu()
    saturated = state.saturated(mlu, cfg.tolerance)
    for sweep in range(1, cfg.max_sweeps + 1):
        before, crowded = mlu, saturated
        moved = sum(optimize_block(state, s, d, cfg) for s, d in state.block_order())
        mlu = state.mlu()
        saturated = state.saturated(mlu, cfg.tolerance)
        logger.debug(
            "ro: sweep %d moved %d pairs, mlu %.9g on %d links", sweep, moved, mlu, saturated
        )
        # several links can share the maximum; fewer of them is progress too
        if before - mlu < cfg.tolerance and saturated >= crowded and not moved:
            break
    return mlu


class _Smoother:
    """All pairs at once, on the relay tensor [s, d, k] (k == d is the direct path)."""

    def __init__(self, demand: np.ndarray, capacity: np.ndarray, usable: np.ndarray, cfg: RoConfig):
        self.cfg = cfg
        self.volume = demand
        self.capacity = capacity
        self.links = capacity > 0
        self.loaded = demand > 0
        self.usable = usable & self.loaded[:, :, None]
        self.direct = np.eye(demand.shape[0], dtype=bool)[None, :, :]
        self.v = np.where(self.loaded, demand, 1.0)[:, :, None]
        second = self.usable & ~self.direct
        self.c1 = np.where(self.usable, capacity[:, None, :], 1.0)
        self.c2 = np.where(second, capacity.T[None, :, :], 1.0)
        self.safe = np.where(self.links, capacity, 1.0)

    def utilization(self, splits: np.ndarray) -> np.ndarray:
        return np.where(self.links, _carried_load(self.volume, splits) / self.safe, 0.0)

    def smoothed(self, util: np.ndarray, beta: float) -> float:
        u = util[self.links]
        top = u.max()
        return float(top + np.log(np.sum(self.capacity[self.links] * np.exp(beta * (u - top)))) / beta)

    def lower_bound(self, util: np.ndarray, beta: float) -> float:
        """Shortest-path bound on the optimal MLU under link prices of the smooth cost."""
        top = util[self.links].max()
        price = np.where(self.links, np.exp(beta * (util - top)), 0.0)
        cost = price[:, None, :] + np.where(self.direct, 0.0, price.T[None, :, :])
        dist = np.where(self.usable, cost, math.inf).min(axis=2)
        spent = float((self.volume * np.where(self.loaded, dist, 0.0)).sum())
        return spent / float((price * self.capacity).sum())

    def _hard_room(self, level: np.ndarray, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
        first = (level * self.c1 - r1) / self.v
        second = np.where(self.direct, math.inf, (level * self.c2 - r2) / self.v)
        return np.where(self.usable, np.minimum(first, second), -math.inf)

    def _soft_room(self, level: np.ndarray, beta: float, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
        """Shares at which each path's soft level, log-sum-exp over its hops, meets `level`."""
        x = np.where(self.usable, self._hard_room(level, r1, r2), 0.0)
        blocked = self.direct | ~self.usable
        # convex in x and nonnegative at the hard room: Newton descends onto the root
        for _ in range(6):
            e1 = beta * ((r1 + self.v * x) / self.c1 - level)
            e2 = np.where(blocked, -math.inf, beta * ((r2 + self.v * x) / self.c2 - level))
            z = np.logaddexp(e1, e2)
            share = np.exp(e1 - z)
            x = x - z / (beta * self.v * (share / self.c1 + (1.0 - share) / self.c2))
        return np.where(self.usable, np.maximum(x, 0.0), 0.0)

    def _bisect(self, lo: np.ndarray, hi: np.ndarray, room) -> tuple[np.ndarray, np.ndarray]:
        for _ in range(MAX_BISECTIONS):
            if np.max(hi - lo) <= self.cfg.epsilon_inner:
                break
            mid = (lo + hi) / 2
            enough = room(mid).sum(axis=2, keepdims=True) >= 1.0
            hi = np.where(enough, mid, hi)
            lo = np.where(enough, lo, mid)
        return lo, hi

    def best_response(self, splits: np.ndarray, beta: float) -> np.ndarray:
        """Every pair's exact minimizer of the smooth cost with the other pairs frozen."""
        load = _carried_load(self.volume, splits)
        own = splits * self.volume[:, :, None]
        r1 = np.maximum(load[:, None, :] - own, 0.0)
        r2 = np.maximum(load.T[None, :, :] - own, 0.0)

        empty = np.maximum(r1 / self.c1, np.where(self.direct, 0.0, r2 / self.c2))
        full = np.maximum((r1 + self.v) / self.c1, np.where(self.direct, 0.0, (r2 + self.v) / self.c2))
        loaded = self.loaded[:, :, None]
        lo = np.where(loaded, np.where(self.usable, empty, math.inf).min(axis=2, keepdims=True), 0.0)
        hi = np.where(loaded, np.where(self.usable, full, math.inf).min(axis=2, keepdims=True), 0.0)
        lo, hi = self._bisect(lo, hi, lambda level: np.maximum(self._hard_room(level, r1, r2), 0.0))

        # the soft level exceeds the hard one by at most log(2) / beta
        hi = np.where(loaded, hi + math.log(2.0) / beta, 0.0)
        lo, hi = self._bisect(lo, hi, lambda level: self._soft_room(level, beta, r1, r2))

        room = self._soft_room(hi, beta, r1, r2)
        total = room.sum(axis=2, keepdims=True)
        response = np.divide(room, total, out=splits.copy(), where=total > 0)
        return np.where(loaded, response, splits)

    def step(self, util: np.ndarray, shift: np.ndarray, beta: float) -> float:
        """Exact line search of the smooth cost along `shift`, within [0, 1]."""
        u, du, c = util[self.links], shift[self.links], self.capacity[self.links]

        def slope(t: float) -> float:
            e = beta * (u + t * du)
            return float(np.sum(c * du * np.exp(e - e.max())))

        if slope(0.0) >= 0.0:
            return 0.0
        if slope(1.0) <= 0.0:
            return 1.0
        lo, hi = 0.0, 1.0
        for _ in range(40):
            mid = (lo + hi) / 2
            if slope(mid) < 0.0:
                lo = mid
            else:
                hi = mid
        return lo


def _smooth(state: _State, cfg: RoConfig) -> tuple[np.ndarray, float, float]:
    """Best splits seen, their MLU, and the best lower bound on the optimal MLU."""
    smoother = _Smoother(state.demand, state.capacity, state.usable, cfg)
    splits = state.splits.copy()
    best, best_mlu = splits, state.mlu()

    capacity = state.capacity[smoother.links]
    spread = max(math.log(capacity.sum() / capacity.min()), math.log(2.0))
    # the smooth optimum overshoots the true one by at most temperature * spread
    coolest = cfg.gap * best_mlu / (2.0 * spread)
    temperature = max(START_TEMPERATURE * best_mlu, coolest)

    floor, previous, stage, steps = 0.0, math.inf, 0, 0
    while steps < cfg.smoothing_iterations:
        beta = 1.0 / temperature
        util = smoother.utilization(splits)
        mlu = float(util.max())
        if mlu < best_mlu:
            best, best_mlu = splits.copy(), mlu
        floor = max(floor, smoother.lower_bound(util, beta))
        if best_mlu <= floor * (1.0 + cfg.gap):
            break

        value = smoother.smoothed(util, beta)
        if temperature > coolest and (previous - value < 1e-3 * temperature or stage == STAGE_STEPS):
            temperature = max(temperature * COOLING, coolest)
            logger.debug("ro: smoothing at temperature %.3g, best mlu %.9g", temperature, best_mlu)
            previous, stage = math.inf, 0
            continue

        direction = smoother.best_response(splits, beta) - splits
        t = smoother.step(util, smoother.utilization(direction), beta)
        if t <= 0.0:
            if temperature <= coolest:
                break
            previous = -math.inf
            continue
        splits = splits + t * direction
        previous, stage, steps = value, stage + 1, steps + 1

    return best, best_mlu, floor


def solve_ro(
    demand: TrafficMatrix,
    topo: Topology,
    net: Network,
    init: Routing,
    cfg: RoConfig | None = None,
    paths: PathSet | None = None,
) -> tuple[Routing, float]:
    cfg = cfg or RoConfig()
    paths = paths or enumerate_two_hop_paths(topo, net)
    paths.require_routable(demand)
    init.check(demand)

    loaded = demand.demand > 0
    stray = np.argwhere((init.splits > 0) & loaded[:, :, None] & ~paths.usable)
    if stray.size:
        s, d, k = (int(x) for x in stray[0])
        a, b = (s, d) if k == d else ((s, k) if not topo.links[s, k] else (k, d))
        raise ValidationError(208, i=s, j=d, a=a, b=b)

    state = _State(
        demand=demand.demand,
        capacity=capacity_matrix(topo, net),
        usable=paths.usable,
        splits=init.splits.copy(),
        load=compute_link_loads(demand, init).load.copy(),
    )
    if not loaded.any():
        return Routing(state.splits), 0.0

    start = state.mlu()
    mlu = _descend(state, cfg)
    if cfg.smoothing_iterations and 0 < mlu < math.inf:
        splits, smoothed, floor = _smooth(state, cfg)
        logger.debug("ro: sweeps %.9g, smoothing %.9g, lower bound %.9g", mlu, smoothed, floor)
        if smoothed < mlu - cfg.tolerance:
            state.splits = splits.copy()
            state.load = _carried_load(state.demand, splits)
            mlu = _descend(state, cfg)

    routing = Routing(state.splits)
    # recompute from scratch so incremental drift never leaks out
    final = float(_util(compute_link_loads(demand, routing).load, state.capacity).max())
    if final > start:
        return init, start
    return routing, final
