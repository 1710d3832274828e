import numpy as np
import pytest

from reconfnet.classes import Network
from reconfnet.exceptions import ConfigError, FormatError
from reconfnet.io import save_network_json
from reconfnet.workloads import (
    gen_ai_traffic,
    gen_full_mesh,
    gen_gravity_traffic,
    mix_traffic,
    parse_network_spec,
    parse_traffic_spec,
    preset,
    random_derangement,
    topology_stats,
)

from instances import triangle


@pytest.mark.parametrize("n_pods, edges", [(16, 240), (32, 992), (64, 4032), (128, 16256), (2, 2)])
def test_full_mesh_candidate_edges(n_pods, edges):
    assert gen_full_mesh(n_pods, 4).candidate_edges == edges


def test_presets():
    net = preset("topo32")
    assert net.n_pods == 32
    assert np.all(net.port_budget == 64)
    assert parse_network_spec("meta-pod") == gen_full_mesh(4, 16)
    with pytest.raises(FormatError) as e:
        preset("topo7")
    assert e.value.code == 403


def test_network_specs(tmp_path):
    net = parse_network_spec("full-mesh:5:3:2.5")
    assert net == Network.uniform(5, 3, 2.5)
    path = tmp_path / "net.json"
    save_network_json(net, path)
    assert parse_network_spec(str(path)) == net
    for bad in ("full-mesh:5", "full-mesh:x:3", "ring:4", str(tmp_path / "missing.json")):
        with pytest.raises(FormatError):
            parse_network_spec(bad)


def test_gravity_traffic():
    demand = gen_gravity_traffic(8, 100.0, rng_seed=1)
    assert demand.total == pytest.approx(100.0)
    assert np.all(np.diag(demand.demand) == 0)
    assert demand == gen_gravity_traffic(8, 100.0, rng_seed=1)
    assert demand != gen_gravity_traffic(8, 100.0, rng_seed=2)


def test_gravity_uniform_and_zero():
    demand = gen_gravity_traffic(4, 12.0, rng_seed=0, sigma=0.0).demand
    off = demand[~np.eye(4, dtype=bool)]
    assert np.allclose(off, 1.0)
    assert gen_gravity_traffic(4, 0.0, rng_seed=0).total == 0.0
    with pytest.raises(ConfigError):
        gen_gravity_traffic(4, -1.0, rng_seed=0)


def test_derangement_has_no_fixed_points():
    rng = np.random.default_rng(0)
    for n in range(2, 10):
        perm = random_derangement(n, rng)
        assert sorted(perm) == list(range(n))
        assert not np.any(perm == np.arange(n))


def test_ai_traffic():
    demand = gen_ai_traffic(8, n_flows=5, flow_size=3.0, rng_seed=4).demand
    assert np.count_nonzero(demand) == 5
    assert set(demand[demand > 0]) == {3.0}
    # one flow per source and per destination
    assert np.all((demand > 0).sum(axis=1) <= 1)
    assert np.all((demand > 0).sum(axis=0) <= 1)
    with pytest.raises(ConfigError):
        gen_ai_traffic(4, n_flows=5, flow_size=1.0, rng_seed=0)
    with pytest.raises(ConfigError):
        gen_ai_traffic(4, n_flows=2, flow_size=-1.0, rng_seed=0)


def test_mixed_traffic():
    ai = gen_ai_traffic(6, n_flows=6, flow_size=2.0, rng_seed=0)
    mixed = mix_traffic(ai, 0.5, rng_seed=1)
    assert mixed.total == pytest.approx(1.5 * ai.total)
    assert np.all(mixed.demand >= ai.demand)
    assert mix_traffic(ai, 0.0, rng_seed=1) is ai


def test_traffic_specs():
    net = gen_full_mesh(6, 8)
    assert parse_traffic_spec("gravity:10", net, seed=3) == gen_gravity_traffic(net, 10.0, 3)
    assert parse_traffic_spec("gravity:10:seed=9", net, seed=3) == gen_gravity_traffic(net, 10.0, 9)
    assert parse_traffic_spec("gravity:10:sigma=0", net).demand[0, 1] == pytest.approx(10 / 30)
    ai = parse_traffic_spec("ai:4:2.0:background=0.25", net, seed=5)
    assert ai.total == pytest.approx(10.0)


@pytest.mark.parametrize(
    "spec", ["gravity", "gravity:x", "gravity:1:2", "gravity:1:mode=x", "ai:3", "uniform:1"]
)
def test_bad_traffic_specs(spec):
    with pytest.raises(FormatError) as e:
        parse_traffic_spec(spec, gen_full_mesh(4, 4))
    assert e.value.code == 403


def test_traffic_spec_keeps_config_errors():
    with pytest.raises(ConfigError):
        parse_traffic_spec("ai:9:1.0", gen_full_mesh(4, 4))


def test_topology_stats():
    stats = topology_stats(triangle(2, 1, 0), Network.uniform(3, 4), reference_links=6)
    assert stats["total_links"] == 3
    assert stats["used_ports"] == [3, 2, 1]
    assert stats["max_used_ports"] == 3
    assert stats["residual_ports"] == 6
    assert stats["connected_pairs"] == 2
    assert stats["links_normalized"] == pytest.approx(0.5)
