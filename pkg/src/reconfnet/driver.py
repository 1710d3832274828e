"""Alternating topology and routing optimization.

Every round runs TO on the current link loads, refines the topology with the
residual ports, re-optimizes routing hot-started from the previous routing and
recomputes the loads. Accepted MLUs never increase.
"""

import time
from dataclasses import dataclass
from typing import Callable, Optional

from .classes import (
    AtroConfig,
    AtroResult,
    Network,
    RoConfig,
    Routing,
    SolveReport,
    Topology,
    TrafficMatrix,
)
from .exceptions import ConfigError, SeedInfeasibleError, UnroutableError, ValidationError
from .log import get_logger
from .model import compute_link_loads, compute_mlu, direct_path_routing, validate_solution
from .routing import enumerate_two_hop_paths, project_routing, solve_ro
from .topology import absm, refine

logger = get_logger(__name__)

RoSolver = Callable[
    [TrafficMatrix, Topology, Network, Routing, RoConfig], tuple[Routing, float]
]


@dataclass(frozen=True)
class _Round:
    topology: Topology
    routing: Routing
    mlu: float


def _check_seeds(
    demand: TrafficMatrix,
    net: Network,
    topology: Optional[Topology],
    routing: Optional[Routing],
):
    if routing is not None and topology is None:
        raise ConfigError(
            field="seed_routing", requirement="accompanied by a seed topology", value=None
        )
    if topology is None:
        return
    what = "topology"
    try:
        topology.check(net)
        enumerate_two_hop_paths(topology, net).require_routable(demand)
        if routing is not None:
            what = "routing"
            validate_solution(demand, topology, routing, net)
    except (ValidationError, UnroutableError) as e:
        raise SeedInfeasibleError(what=what, reason=e.message.message)


def _topology(loads, net: Network, cfg: AtroConfig) -> Topology:
    solution = absm(loads, net, cfg.absm)
    if not solution.feasible:
        raise ConfigError(
            field="absm.initial_upper_bound",
            requirement="large enough for the loads to fit the port budgets",
            value=solution.upper_bound,
        )
    return solution.topology


def _run(
    demand: TrafficMatrix,
    net: Network,
    cfg: AtroConfig,
    method: str,
    ro: RoSolver,
    routing: Routing,
    seed_topology: Optional[Topology] = None,
    seed_routing: Optional[Routing] = None,
) -> AtroResult:
    t0 = time.perf_counter()
    loads = compute_link_loads(demand, routing)

    incumbent: Optional[_Round] = None
    trajectory: list[float] = []
    previous = float("inf")
    converged = False
    rounds = 0

    for rounds in range(1, cfg.max_rounds + 1):
        first = rounds == 1
        topo = seed_topology if first and seed_topology is not None else _topology(loads, net, cfg)
        if cfg.enable_refinement:
            topo = refine(topo, loads, net)

        if first and seed_routing is not None:
            start = compute_mlu(loads, topo, net)
            candidate, mlu = seed_routing, start
        else:
            projected = project_routing(routing, topo, demand, net)
            start = compute_mlu(compute_link_loads(demand, projected), topo, net)
            candidate, mlu = ro(demand, topo, net, projected, cfg.ro)
            if mlu > start:
                candidate, mlu = projected, start

        if incumbent is None:
            trajectory.append(start)
        elif mlu > incumbent.mlu:
            logger.info(
                "round %d: mlu %.9g above incumbent %.9g, stopping", rounds, mlu, incumbent.mlu
            )
            converged = True
            break

        incumbent = _Round(topo, candidate, mlu)
        trajectory.append(mlu)
        routing = candidate
        loads = compute_link_loads(demand, routing)
        logger.info("round %d: mlu %.9g on %d links", rounds, mlu, topo.total_links)

        if abs(previous - mlu) < cfg.epsilon or mlu == 0:
            converged = True
            break
        previous = mlu

    assert incumbent is not None
    wall_time = time.perf_counter() - t0
    report = SolveReport(
        mlu=incumbent.mlu,
        iterations=rounds,
        wall_time=wall_time,
        converged=converged,
        mlu_trajectory=tuple(trajectory),
        method=method,
        feasible=True,
        total_links=incumbent.topology.total_links,
        extra={"refinement": cfg.enable_refinement},
    )
    return AtroResult(
        incumbent.topology,
        incumbent.routing,
        report,
        compute_link_loads(demand, incumbent.routing),
    )


def atro(
    demand: TrafficMatrix,
    net: Network,
    cfg: AtroConfig | None = None,
    init: Routing | None = None,
    ro: RoSolver = solve_ro,
) -> AtroResult:
    """Alternate TO and RO from `init` (direct paths by default) until the MLU settles."""
    cfg = cfg or AtroConfig()
    method = "atro" if cfg.enable_refinement else "atro-o"
    return _run(demand, net, cfg, method, ro, init or direct_path_routing(net))


def atro_hot_start(
    demand: TrafficMatrix,
    net: Network,
    cfg: AtroConfig | None = None,
    seed_topology: Topology | None = None,
    seed_routing: Routing | None = None,
    ro: RoSolver = solve_ro,
) -> AtroResult:
    """Start from a given topology, skipping the first TO, and optionally from a
    routing on it, skipping the first RO as well."""
    cfg = cfg or AtroConfig()
    _check_seeds(demand, net, seed_topology, seed_routing)
    if seed_routing is not None:
        method = "atro-r"
    elif seed_topology is not None:
        method = "atro-t"
    else:
        method = "atro" if cfg.enable_refinement else "atro-o"
    return _run(
        demand,
        net,
        cfg,
        method,
        ro,
        seed_routing or direct_path_routing(net),
        seed_topology,
        seed_routing,
    )
