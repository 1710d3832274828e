"""Benchmark suites: every method on every (network, traffic, seed) instance.

Instances run in a process pool; rows are merged back in instance order so a
suite's CSV is identical for any worker count.
"""

import csv
import json
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

from tqdm import tqdm

from .baselines import brute_force_to, bvn_topology, mcf_topology
from .baselines.brute import MAX_PODS
from .classes import AbsmConfig, AtroConfig, LinkLoads, Network, RoConfig, TrafficMatrix
from .driver import atro
from .exceptions import ConfigError, FormatError, InfeasibleError, UnroutableError
from .io import read_json
from .log import get_logger
from .model import compute_mlu
from .topology import absm
from .utils import derive_seed
from .workloads import parse_network_spec, parse_traffic_spec

logger = get_logger(__name__)

METHODS = ("absm", "atro", "atro-o", "bvn", "mcf", "brute")
JOBS_ENV = "RECONFNET_JOBS"
COLUMNS = [
    "instance",
    "network",
    "traffic",
    "seed",
    "n_pods",
    "method",
    "feasible",
    "mlu",
    "mlu_normalized_to_atro",
    "wall_time",
    "total_links",
    "rounds",
]


@dataclass(frozen=True)
class SuiteSpec:
    methods: tuple[str, ...] = ("absm", "atro", "bvn", "mcf")
    networks: tuple[str, ...] = ("meta-pod",)
    traffic: tuple[str, ...] = ("gravity:10",)
    seeds: int = 1
    base_seed: int = 0
    allow_brute: bool = False
    atro: AtroConfig = field(default_factory=AtroConfig)

    def __post_init__(self):
        for method in self.methods:
            if method not in METHODS:
                raise ConfigError(102, method=method)
        if "brute" in self.methods and not self.allow_brute:
            raise ConfigError(103)
        if not isinstance(self.seeds, int) or self.seeds < 1:
            raise ConfigError(field="seeds", requirement="a positive integer", value=self.seeds)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SuiteSpec":
        data = dict(data)
        try:
            for key in ("methods", "networks", "traffic"):
                if key in data:
                    data[key] = tuple(data[key])
            if "atro" in data:
                atro_cfg = dict(data["atro"])
                if "absm" in atro_cfg:
                    atro_cfg["absm"] = AbsmConfig(**atro_cfg["absm"])
                if "ro" in atro_cfg:
                    atro_cfg["ro"] = RoConfig(**atro_cfg["ro"])
                data["atro"] = AtroConfig(**atro_cfg)
            return cls(**data)
        except TypeError as e:
            raise FormatError(403, kind="suite", spec=str(e))

    @classmethod
    def load(cls, path: str | Path) -> "SuiteSpec":
        data = read_json(path)
        if not isinstance(data, dict):
            raise FormatError(404, path=path, reason="expected an object")
        return cls.from_dict(data)

    def instances(self) -> list["Instance"]:
        out = []
        for network in self.networks:
            for traffic in self.traffic:
                for index in range(self.seeds):
                    seed = derive_seed(network, traffic, self.base_seed, index)
                    out.append(Instance(network, traffic, index, seed))
        return out


@dataclass(frozen=True, order=True)
class Instance:
    network: str
    traffic: str
    index: int
    seed: int

    @property
    def key(self) -> str:
        return f"{self.network}|{self.traffic}|{self.index}"

    def build(self) -> tuple[Network, TrafficMatrix]:
        net = parse_network_spec(self.network)
        return net, parse_traffic_spec(self.traffic, net, self.seed)


@dataclass
class Row:
    instance: str
    network: str
    traffic: str
    seed: int
    n_pods: int
    method: str
    feasible: bool
    mlu: float
    wall_time: float
    total_links: int
    rounds: int
    mlu_normalized_to_atro: float | None = None

    def as_csv(self) -> dict[str, Any]:
        data = {name: getattr(self, name) for name in COLUMNS}
        if data["mlu_normalized_to_atro"] is None:
            data["mlu_normalized_to_atro"] = ""
        return data


def _one_hop(demand: TrafficMatrix, net: Network, build: Callable) -> tuple[float, int, int]:
    topo = build()
    return compute_mlu(LinkLoads(demand.demand), topo, net), topo.total_links, 1


def _solve(method: str, demand: TrafficMatrix, net: Network, cfg: AtroConfig):
    """(mlu, total_links, rounds) for one method; timing is done by the caller."""
    loads = LinkLoads(demand.demand)
    if method == "absm":
        solution = absm(loads, net, cfg.absm)
        return solution.mlu, solution.topology.total_links, 1
    if method == "brute":
        solution = brute_force_to(loads, net)
        return solution.mlu, solution.topology.total_links, 1
    if method == "bvn":
        return _one_hop(demand, net, lambda: bvn_topology(demand, net))
    if method == "mcf":
        return _one_hop(demand, net, lambda: mcf_topology(loads, net))
    variant = cfg if method == "atro" else replace(cfg, enable_refinement=False)
    report = atro(demand, net, variant).report
    return report.mlu, report.total_links, report.iterations


def run_instance(instance: Instance, methods: tuple[str, ...], cfg: AtroConfig) -> list[Row]:
    net, demand = instance.build()
    rows = []
    for method in methods:
        if method == "brute" and net.n_pods > MAX_PODS:
            logger.warning("skipping brute on %s: more than %d PoDs", instance.key, MAX_PODS)
            continue
        t0 = time.perf_counter()
        try:
            mlu, links, rounds = _solve(method, demand, net, cfg)
            feasible = math.isfinite(mlu)
        except (InfeasibleError, UnroutableError) as e:
            logger.info("%s on %s: %s", method, instance.key, e.message.message)
            mlu, links, rounds, feasible = math.inf, 0, 0, False
        wall_time = time.perf_counter() - t0
        rows.append(
            Row(
                instance.key,
                instance.network,
                instance.traffic,
                instance.seed,
                net.n_pods,
                method,
                feasible,
                mlu,
                wall_time,
                links,
                rounds,
            )
        )
    normalize(rows)
    return rows


def normalize(rows: list[Row]):
    """Divide each row's MLU by the ATRO MLU of the same instance."""
    reference = next((r.mlu for r in rows if r.method == "atro"), None)
    if reference is None:
        return
    for row in rows:
        if reference == 0:
            row.mlu_normalized_to_atro = 1.0 if row.mlu == 0 else math.inf
        else:
            row.mlu_normalized_to_atro = row.mlu / reference


def resolve_jobs(jobs: int | None = None) -> int:
    if jobs is None:
        raw = os.environ.get(JOBS_ENV)
        if raw is None:
            return os.cpu_count() or 1
        try:
            jobs = int(raw)
        except ValueError:
            raise ConfigError(field=JOBS_ENV, requirement="a positive integer", value=raw)
    if jobs < 1:
        raise ConfigError(field="jobs", requirement="a positive integer", value=jobs)
    return jobs


@dataclass
class SuiteResult:
    rows: list[Row]

    @property
    def histogram(self) -> dict[int, int]:
        """Convergence rounds of the ATRO rows: round count -> runs."""
        counts = Counter(r.rounds for r in self.rows if r.method == "atro" and r.feasible)
        return dict(sorted(counts.items()))

    def histogram_json(self) -> str:
        hist = self.histogram
        return json.dumps(
            {"runs": sum(hist.values()), "rounds": {str(k): v for k, v in hist.items()}},
            indent=2,
        )


def run_suite(spec: SuiteSpec, jobs: int | None = None, progress: bool = True) -> SuiteResult:
    instances = spec.instances()
    jobs = resolve_jobs(jobs)
    by_key: dict[Instance, list[Row]] = {}

    if jobs == 1:
        for instance in tqdm(instances, leave=False, disable=not progress):
            by_key[instance] = run_instance(instance, spec.methods, spec.atro)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = {
                executor.submit(run_instance, instance, spec.methods, spec.atro): instance
                for instance in instances
            }
            with tqdm(total=len(futures), leave=False, disable=not progress) as pbar:
                for future in as_completed(futures):
                    instance = futures[future]
                    by_key[instance] = future.result()
                    pbar.set_description(instance.key)
                    pbar.update(1)

    rows = [row for instance in sorted(by_key) for row in by_key[instance]]
    return SuiteResult(rows)


def write_csv(result: SuiteResult, path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=COLUMNS)
        writer.writeheader()
        writer.writerows(row.as_csv() for row in result.rows)


def write_histogram(result: SuiteResult, path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(result.histogram_json() + "\n", encoding="utf-8")
