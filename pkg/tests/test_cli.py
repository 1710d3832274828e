import csv
import json

import pytest
from click.testing import CliRunner

from reconfnet.cli import cli
from reconfnet.classes import Network
from reconfnet.io import (
    load_network_json,
    load_topology_csv,
    load_traffic_csv,
    save_network_json,
    save_topology_csv,
    save_traffic_csv,
)

from instances import spare_port_instance, triangle


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def triangle_files(tmp_path):
    demand, net = spare_port_instance()
    save_traffic_csv(demand, tmp_path / "traffic.csv")
    save_network_json(net, tmp_path / "net.json")
    return str(tmp_path / "net.json"), str(tmp_path / "traffic.csv")


def read_report(directory):
    return json.loads((directory / "report.json").read_text())


def test_to_writes_results(runner, tmp_path):
    args = ["to", "-n", "full-mesh:4:4", "-t", "gravity:10", "--seed", "1", "--quiet"]
    first = runner.invoke(cli, [*args, "-o", str(tmp_path / "a")])
    second = runner.invoke(cli, [*args, "-o", str(tmp_path / "b")])
    assert first.exit_code == 0, first.output
    assert second.exit_code == 0, second.output
    topo = (tmp_path / "a" / "topology.csv").read_text()
    assert topo == (tmp_path / "b" / "topology.csv").read_text()
    report = read_report(tmp_path / "a")
    assert report["method"] == "absm"
    assert report["feasible"]
    assert report["extra"]["n_pods"] == 4
    assert report["mlu"] >= report["extra"]["port_lower_bound"]
    assert load_topology_csv(tmp_path / "a" / "topology.csv").total_links == report["total_links"]


def test_to_reports_infeasible_upper_bound(runner, tmp_path):
    result = runner.invoke(
        cli, ["to", "-t", "gravity:10", "--upper-bound", "0.001", "-o", str(tmp_path)]
    )
    assert result.exit_code == 3
    assert read_report(tmp_path)["mlu"] is None
    assert "E305" in result.output
    assert "--upper-bound" in result.output


def test_atro_refinement_on_triangle(runner, tmp_path, triangle_files):
    net, traffic = triangle_files
    refined = runner.invoke(cli, ["atro", "-n", net, "-t", traffic, "-o", str(tmp_path / "r")])
    plain = runner.invoke(
        cli, ["atro", "-n", net, "-t", traffic, "--no-refine", "-o", str(tmp_path / "o")]
    )
    assert refined.exit_code == 0, refined.output
    assert plain.exit_code == 0, plain.output
    assert "trajectory" in refined.output

    report = read_report(tmp_path / "r")
    assert report["method"] == "atro"
    assert report["mlu"] == pytest.approx(0.15, abs=1e-6)
    trajectory = report["mlu_trajectory"]
    assert all(b <= a + 1e-12 for a, b in zip(trajectory, trajectory[1:]))
    assert report["extra"]["total_links"] == 5
    assert read_report(tmp_path / "o")["mlu"] == pytest.approx(0.2)
    assert (tmp_path / "r" / "routing.csv").is_file()


def test_atro_hot_start_from_files(runner, tmp_path, triangle_files):
    net, traffic = triangle_files
    first = runner.invoke(cli, ["atro", "-n", net, "-t", traffic, "-o", str(tmp_path / "a"), "--quiet"])
    assert first.exit_code == 0, first.output
    again = runner.invoke(
        cli,
        [
            "atro", "-n", net, "-t", traffic, "-o", str(tmp_path / "b"), "--quiet",
            "--seed-topology", str(tmp_path / "a" / "topology.csv"),
            "--seed-routing", str(tmp_path / "a" / "routing.csv"),
        ],
    )
    assert again.exit_code == 0, again.output
    report = read_report(tmp_path / "b")
    assert report["method"] == "atro-r"
    assert report["mlu"] == pytest.approx(read_report(tmp_path / "a")["mlu"], abs=1e-4)


def test_atro_rejects_seed_over_budget(runner, tmp_path, triangle_files):
    net, traffic = triangle_files
    save_topology_csv(triangle(3, 3, 0), tmp_path / "seed.csv")
    result = runner.invoke(
        cli, ["atro", "-n", net, "-t", traffic, "--seed-topology", str(tmp_path / "seed.csv")]
    )
    assert result.exit_code == 5


def test_bench_writes_table(runner, tmp_path):
    out = tmp_path / "bench.csv"
    result = runner.invoke(
        cli,
        [
            "bench", "-m", "absm", "-m", "atro", "-n", "full-mesh:4:4", "-t", "gravity:10",
            "--seeds", "2", "-j", "1", "-o", str(out), "--quiet",
        ],
    )
    assert result.exit_code == 0, result.output
    with open(out, newline="") as f:
        rows = list(csv.DictReader(f))
    assert [r["method"] for r in rows] == ["absm", "atro"] * 2
    assert json.loads((tmp_path / "bench.rounds.json").read_text())["runs"] == 2


def test_bench_from_suite_file(runner, tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps({"methods": ["absm"], "networks": ["full-mesh:3:2"], "seeds": 1}))
    result = runner.invoke(cli, ["bench", str(suite), "-j", "1", "-o", str(tmp_path / "b.csv")])
    assert result.exit_code == 0, result.output
    assert "Suite summary" in result.output


def test_bench_gates_brute(runner, tmp_path):
    result = runner.invoke(cli, ["bench", "-m", "brute", "-j", "1", "-o", str(tmp_path / "b.csv")])
    assert result.exit_code == 2


def test_gen_topo(runner, tmp_path):
    out = tmp_path / "net.json"
    result = runner.invoke(cli, ["gen-topo", "topo16", "-o", str(out)])
    assert result.exit_code == 0, result.output
    assert "240 candidate edges" in " ".join(result.output.split())
    assert load_network_json(out) == Network.uniform(16, 32)


def test_gen_traffic(runner, tmp_path):
    out = tmp_path / "t.csv"
    result = runner.invoke(cli, ["gen-traffic", "gravity:5", "-n", "full-mesh:4:4", "-o", str(out)])
    assert result.exit_code == 0, result.output
    assert load_traffic_csv(out).total == pytest.approx(5.0)


def test_bad_spec_exits_with_usage_code(runner, tmp_path):
    result = runner.invoke(cli, ["gen-traffic", "zipf:5", "-o", str(tmp_path / "t.csv")])
    assert result.exit_code == 2
