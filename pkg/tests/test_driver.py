import numpy as np
import pytest

from reconfnet.classes import AbsmConfig, AtroConfig, LinkLoads, Network, TrafficMatrix
from reconfnet.driver import atro, atro_hot_start
from reconfnet.exceptions import ConfigError, SeedInfeasibleError
from reconfnet.model import compute_link_loads, compute_mlu, validate_solution
from reconfnet.topology import absm
from reconfnet.workloads import gen_ai_traffic, gen_full_mesh, gen_gravity_traffic, mix_traffic

from instances import spare_port_instance, random_demand, triangle


def keep_routing(demand, topo, net, init, cfg):
    return init, compute_mlu(compute_link_loads(demand, init), topo, net)


def non_increasing(values) -> bool:
    return all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_zero_demand_converges_at_once():
    net = Network.uniform(4, 3)
    result = atro(TrafficMatrix.zeros(4), net, AtroConfig(enable_refinement=False))
    assert result.report.mlu == 0.0
    assert result.report.iterations == 1
    assert result.report.converged
    assert result.topology.total_links == 0


def test_refinement_unlocks_relay():
    demand, net = spare_port_instance()
    result = atro(demand, net)
    report = result.report
    assert report.method == "atro"
    assert report.mlu == pytest.approx(0.15, abs=1e-6)
    assert report.mlu_trajectory[0] == pytest.approx(0.2)
    assert non_increasing(report.mlu_trajectory)
    assert report.iterations <= 3
    assert report.converged
    assert result.topology == triangle(3, 1, 1)
    validate_solution(demand, result.topology, result.routing, net)


def test_without_refinement_stays_one_hop():
    demand, net = spare_port_instance()
    report = atro(demand, net, AtroConfig(enable_refinement=False)).report
    assert report.method == "atro-o"
    assert report.mlu == pytest.approx(0.2)
    assert all(u == pytest.approx(0.2) for u in report.mlu_trajectory)
    assert report.extra == {"refinement": False}


# A-B : A-C ratios that no split of A's four ports matches exactly
@pytest.mark.parametrize(
    "ab, ac",
    [
        (0.4, 0.2),
        (4.0, 2.0),
        (0.04, 0.02),
        (0.5, 0.1),
        (0.7, 0.1),
        (0.3, 0.2),
        (0.45, 0.25),
        (0.2, 0.5),
        (0.15, 0.6),
    ],
)
def test_refinement_beats_one_hop(ab, ac):
    demand, net = spare_port_instance(ab, ac)
    refined = atro(demand, net).report
    one_hop = atro(demand, net, AtroConfig(enable_refinement=False)).report
    assert refined.mlu < one_hop.mlu - 1e-6
    assert one_hop.mlu == pytest.approx(absm(LinkLoads(demand.demand), net).mlu)


def test_direct_routing_reduces_to_one_hop_to():
    rng = np.random.default_rng(2)
    net = Network.uniform(6, 8)
    demand = random_demand(rng, 6)
    result = atro(demand, net, AtroConfig(enable_refinement=False), ro=keep_routing)
    expected = absm(LinkLoads(demand.demand), net)
    assert result.report.mlu == pytest.approx(expected.mlu)
    assert result.topology == expected.topology


def test_loads_match_returned_routing():
    demand, net = spare_port_instance()
    result = atro(demand, net)
    assert np.allclose(result.loads.load, compute_link_loads(demand, result.routing).load)


def test_hot_start_from_own_output():
    demand, net = spare_port_instance()
    first = atro(demand, net)
    again = atro_hot_start(demand, net, seed_topology=first.topology, seed_routing=first.routing)
    assert again.report.method == "atro-r"
    assert again.report.mlu == pytest.approx(first.report.mlu, abs=1e-4)
    assert again.report.iterations <= 2


def test_hot_start_from_dense_topology():
    demand, net = spare_port_instance()
    result = atro_hot_start(demand, net, seed_topology=triangle(2, 2, 2))
    assert result.report.method == "atro-t"
    assert result.report.mlu <= 0.2 + 1e-9
    validate_solution(demand, result.topology, result.routing, net)


@pytest.mark.parametrize("seed", [triangle(3, 3, 0), triangle(1, 0, 0)])
def test_hot_start_rejects_infeasible_seed(seed):
    demand, net = spare_port_instance()
    with pytest.raises(SeedInfeasibleError) as e:
        atro_hot_start(demand, net, seed_topology=seed)
    assert e.value.code == 303
    assert e.value.exit_code == 5
    assert e.value.details["what"] == "topology"


def test_hot_start_rejects_routing_off_the_seed_topology():
    demand, net = spare_port_instance()
    first = atro(demand, net)
    with pytest.raises(SeedInfeasibleError) as e:
        atro_hot_start(demand, net, seed_topology=triangle(2, 1, 0), seed_routing=first.routing)
    assert e.value.details["what"] == "routing"


def test_seed_routing_needs_seed_topology():
    demand, net = spare_port_instance()
    first = atro(demand, net)
    with pytest.raises(ConfigError):
        atro_hot_start(demand, net, seed_routing=first.routing)


def test_manual_upper_bound_below_loads():
    demand, net = spare_port_instance()
    cfg = AtroConfig(absm=AbsmConfig(initial_upper_bound=0.01))
    with pytest.raises(ConfigError) as e:
        atro(demand, net, cfg)
    assert e.value.details["field"] == "absm.initial_upper_bound"


def sweep_instances():
    """Gravity and AI-with-background workloads over full meshes of 4, 8 and 16 PoDs."""
    rng = np.random.default_rng(7)
    for n, count in ((4, 40), (8, 40), (16, 20)):
        for seed in range(count):
            net = gen_full_mesh(n, int(rng.integers(n - 1, 3 * n)))
            yield net, gen_gravity_traffic(net, float(n), seed)
            ai = gen_ai_traffic(net, n, 1.0, seed)
            yield net, mix_traffic(ai, 0.1, seed)


@pytest.mark.slow
def test_trajectories_are_monotone_and_short():
    rounds = []
    for net, demand in sweep_instances():
        result = atro(demand, net)
        report = result.report
        assert non_increasing(report.mlu_trajectory)
        assert report.mlu == report.mlu_trajectory[-1]
        assert report.mlu <= absm(LinkLoads(demand.demand), net).mlu + 1e-9
        validate_solution(demand, result.topology, result.routing, net)
        rounds.append(report.iterations)
    assert len(rounds) >= 200
    assert sum(r <= 3 for r in rounds) >= 0.9 * len(rounds)
