"""Command-line interface for reconfnet."""

import functools
import platform
import time
from dataclasses import replace
from pathlib import Path
from typing import Optional

import click
import rich.markup
from rich.console import Console
from rich.table import Table

from .. import __version__
from ..bench import METHODS, SuiteSpec, resolve_jobs, run_suite, write_csv, write_histogram
from ..classes import (
    AbsmConfig,
    AtroConfig,
    LinkLoads,
    Network,
    RoConfig,
    SolveReport,
    TrafficMatrix,
)
from ..driver import atro_hot_start
from ..exceptions import (
    FormatError,
    InfeasibleError,
    ReconfnetError,
    SeedInfeasibleError,
    ValidationError,
)
from ..io import (
    load_routing_csv,
    load_topology_csv,
    load_traffic_csv,
    save_network_json,
    save_report_json,
    save_routing_csv,
    save_topology_csv,
    save_traffic_csv,
)
from ..log import setup
from ..model import port_lower_bound
from ..topology import absm
from ..workloads import parse_network_spec, parse_traffic_spec, topology_stats

console = Console()
err_console = Console(stderr=True)


def render_error(error: ReconfnetError):
    message = error.message
    err_console.print(f"[bold red]{message.type}[/bold red]", highlight=False)
    err_console.print(
        f"  [dim]\\[{message.code}][/dim] {rich.markup.escape(message.message)}",
        highlight=False,
    )
    if message.help:
        err_console.print(f"  [dim]{rich.markup.escape(message.help)}[/dim]", highlight=False)


def reported(func):
    """Render library errors and map them to exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ReconfnetError as e:
            render_error(e)
            raise SystemExit(e.exit_code)
        except KeyboardInterrupt:
            err_console.print("[red]Interrupted by user[/red]")
            raise SystemExit(130)

    return wrapper


def load_traffic(spec: str, net: Network, seed: int) -> TrafficMatrix:
    """A CSV path or a generator spec."""
    if Path(spec).is_file():
        return load_traffic_csv(spec, n_pods=net.n_pods)
    return parse_traffic_spec(spec, net, seed)


def parse_upper_bound(value: str) -> float | str:
    if value == "auto":
        return value
    try:
        return float(value)
    except ValueError:
        raise click.BadParameter(f"expected 'auto' or a number, got {value!r}")


def absm_config(epsilon: float, upper_bound: str, absolute: bool, max_iterations: int) -> AbsmConfig:
    return AbsmConfig(
        epsilon=epsilon,
        initial_upper_bound=parse_upper_bound(upper_bound),
        max_iterations=max_iterations,
        relative=not absolute,
    )


def print_report(report: SolveReport, output: Path):
    console.print(
        f"[green]{report.method}[/green]: mlu [bold]{report.mlu:.6g}[/bold], "
        f"{report.total_links} links, {report.iterations} iteration(s), "
        f"{report.wall_time * 1000:.2f} ms [dim]-> {output}[/dim]",
        highlight=False,
    )


def instance_options(func):
    options = [
        click.option(
            "-n",
            "--net",
            "network",
            default="meta-pod",
            show_default=True,
            help="Network: preset name, full-mesh:N:PORTS[:CAPACITY] or a JSON file.",
        ),
        click.option(
            "-t",
            "--traffic",
            required=True,
            help="Traffic: gravity:VOLUME[:sigma=S][:seed=K], ai:FLOWS:SIZE[:background=F][:seed=K] or a CSV file.",
        ),
        click.option("--seed", default=0, show_default=True, help="Seed for generated traffic."),
        click.option(
            "-o",
            "--output",
            type=click.Path(file_okay=False),
            default=".",
            show_default=True,
            help="Directory for the result files.",
        ),
        click.option("--epsilon", default=1e-6, show_default=True, help="ABSM stopping threshold."),
        click.option(
            "--upper-bound",
            default="auto",
            show_default=True,
            help="Initial ABSM upper bound M, or 'auto'.",
        ),
        click.option(
            "--absolute", is_flag=True, help="Treat --epsilon as absolute instead of relative to M."
        ),
        click.option("--max-iterations", default=200, show_default=True),
        click.option("--quiet", is_flag=True, help="Suppress non-essential output."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(
    version=__version__,
    prog_name="reconfnet",
    message=f"%(prog)s, version %(version)s (Python {platform.python_version()})",
)
@click.option("-v", "--verbose", count=True, help="Repeat for more log output.")
def cli(verbose: int) -> None:
    setup(verbose)


@cli.command("to")
@instance_options
@reported
def to(
    network: str,
    traffic: str,
    seed: int,
    output: str,
    epsilon: float,
    upper_bound: str,
    absolute: bool,
    max_iterations: int,
    quiet: bool,
) -> None:
    """Optimize the topology for direct-path routing (one-hop)."""
    cfg = absm_config(epsilon, upper_bound, absolute, max_iterations)
    net = parse_network_spec(network)
    demand = load_traffic(traffic, net, seed)
    loads = LinkLoads(demand.demand)

    t0 = time.perf_counter()
    solution = absm(loads, net, cfg)
    wall_time = time.perf_counter() - t0

    out = Path(output)
    report = SolveReport(
        mlu=solution.mlu,
        iterations=solution.iterations,
        wall_time=wall_time,
        converged=solution.feasible,
        method="absm",
        feasible=solution.feasible,
        total_links=solution.topology.total_links,
        extra={
            "n_pods": net.n_pods,
            "upper_bound": solution.upper_bound,
            "tolerance": solution.tolerance,
            "port_lower_bound": port_lower_bound(loads, net),
        },
    )
    save_topology_csv(solution.topology, out / "topology.csv")
    save_report_json(report, out / "report.json")
    if not solution.feasible:
        raise InfeasibleError(305, upper_bound=solution.upper_bound)
    if not quiet:
        print_report(report, out)


def _load_seeds(
    seed_topology: Optional[str], seed_routing: Optional[str], net: Network
):
    topo = routing = None
    try:
        if seed_topology:
            topo = load_topology_csv(seed_topology, n_pods=net.n_pods)
        if seed_routing:
            routing = load_routing_csv(seed_routing, n_pods=net.n_pods)
    except (ValidationError, FormatError) as e:
        what = "routing" if topo is not None else "topology"
        raise SeedInfeasibleError(what=what, reason=e.message.message)
    return topo, routing


@cli.command("atro")
@instance_options
@click.option("--no-refine", is_flag=True, help="Disable traffic-aware refinement (ATRO-O).")
@click.option("--rounds", "max_rounds", default=10, show_default=True, help="Maximum rounds.")
@click.option("--round-epsilon", default=1e-4, show_default=True, help="Outer stopping threshold.")
@click.option("--ro-tolerance", default=1e-6, show_default=True)
@click.option("--max-sweeps", default=50, show_default=True)
@click.option(
    "--seed-topology",
    type=click.Path(exists=True, dir_okay=False),
    help="Topology CSV to start from (skips the first TO step).",
)
@click.option(
    "--seed-routing",
    type=click.Path(exists=True, dir_okay=False),
    help="Routing CSV to start from; needs --seed-topology (skips the first RO step).",
)
@reported
def atro_cmd(
    network: str,
    traffic: str,
    seed: int,
    output: str,
    epsilon: float,
    upper_bound: str,
    absolute: bool,
    max_iterations: int,
    quiet: bool,
    no_refine: bool,
    max_rounds: int,
    round_epsilon: float,
    ro_tolerance: float,
    max_sweeps: int,
    seed_topology: Optional[str],
    seed_routing: Optional[str],
) -> None:
    """Alternate topology and routing optimization (two-hop)."""
    cfg = AtroConfig(
        epsilon=round_epsilon,
        max_rounds=max_rounds,
        enable_refinement=not no_refine,
        absm=absm_config(epsilon, upper_bound, absolute, max_iterations),
        ro=RoConfig(tolerance=ro_tolerance, max_sweeps=max_sweeps),
    )
    net = parse_network_spec(network)
    demand = load_traffic(traffic, net, seed)
    topo, routing = _load_seeds(seed_topology, seed_routing, net)

    result = atro_hot_start(demand, net, cfg, seed_topology=topo, seed_routing=routing)

    out = Path(output)
    report = result.report
    report.extra.update(topology_stats(result.topology, net))
    save_topology_csv(result.topology, out / "topology.csv")
    save_routing_csv(result.routing, out / "routing.csv")
    save_report_json(report, out / "report.json")
    if not quiet:
        print_report(report, out)
        trajectory = " -> ".join(f"{u:.6g}" for u in report.mlu_trajectory)
        console.print(f"  [dim]trajectory: {trajectory}[/dim]", highlight=False)


def print_summary(result):
    table = Table(title="Suite summary")
    table.add_column("method")
    table.add_column("runs", justify="right")
    table.add_column("feasible", justify="right")
    table.add_column("mean mlu / atro", justify="right")
    table.add_column("mean time (ms)", justify="right")
    methods = list(dict.fromkeys(row.method for row in result.rows))
    for method in methods:
        rows = [r for r in result.rows if r.method == method]
        ratios = [r.mlu_normalized_to_atro for r in rows if r.mlu_normalized_to_atro is not None]
        table.add_row(
            method,
            str(len(rows)),
            str(sum(r.feasible for r in rows)),
            f"{sum(ratios) / len(ratios):.4f}" if ratios else "-",
            f"{1000 * sum(r.wall_time for r in rows) / len(rows):.2f}",
        )
    console.print(table)
    if result.histogram:
        rounds = ", ".join(f"{k}: {v}" for k, v in result.histogram.items())
        console.print(f"[dim]ATRO rounds: {rounds}[/dim]", highlight=False)


@cli.command("bench")
@click.argument("suite", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "-m",
    "--method",
    "methods",
    multiple=True,
    type=click.Choice(METHODS),
    help="Method to run (repeatable); overrides the suite file.",
)
@click.option("-n", "--net", "networks", multiple=True, help="Network spec (repeatable).")
@click.option("-t", "--traffic", "traffic", multiple=True, help="Traffic spec (repeatable).")
@click.option("--seeds", type=int, default=None, help="Instances per (network, traffic).")
@click.option("--base-seed", type=int, default=None)
@click.option("--allow-brute", is_flag=True, help="Allow exhaustive search rows (N <= 4 only).")
@click.option("-j", "--jobs", type=int, default=None, help="Worker processes [env: RECONFNET_JOBS].")
@click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False),
    default="bench.csv",
    show_default=True,
    help="Result CSV; the round histogram goes next to it.",
)
@click.option("--quiet", is_flag=True, help="Suppress progress and the summary table.")
@reported
def bench(
    suite: Optional[str],
    methods: tuple[str, ...],
    networks: tuple[str, ...],
    traffic: tuple[str, ...],
    seeds: Optional[int],
    base_seed: Optional[int],
    allow_brute: bool,
    jobs: Optional[int],
    output: str,
    quiet: bool,
) -> None:
    """Run every method on every instance of a suite and write a CSV table."""
    base = SuiteSpec.load(suite) if suite else None
    overrides = {
        "methods": methods,
        "networks": networks,
        "traffic": traffic,
        "seeds": seeds,
        "base_seed": base_seed,
    }
    data = {k: v for k, v in overrides.items() if v is not None and v != ()}
    if allow_brute:
        data["allow_brute"] = True
    spec = replace(base, **data) if base else SuiteSpec(**data)

    result = run_suite(spec, jobs=resolve_jobs(jobs), progress=not quiet)

    out = Path(output)
    write_csv(result, out)
    write_histogram(result, out.with_suffix(".rounds.json"))
    if not quiet:
        print_summary(result)
        console.print(f"[green]Wrote {len(result.rows)} rows to {out}[/green]", highlight=False)


@cli.command("gen-topo")
@click.argument("network")
@click.option(
    "-o", "--output", type=click.Path(dir_okay=False), default="network.json", show_default=True
)
@click.option("--quiet", is_flag=True)
@reported
def gen_topo(network: str, output: str, quiet: bool) -> None:
    """Write a network (preset or full-mesh:N:PORTS[:CAPACITY]) as JSON."""
    net = parse_network_spec(network)
    save_network_json(net, output)
    if not quiet:
        console.print(
            f"[green]{net.n_pods} PoDs, {net.candidate_edges} candidate edges -> {output}[/green]",
            highlight=False,
        )


@cli.command("gen-traffic")
@click.argument("traffic")
@click.option("-n", "--net", "network", default="meta-pod", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option(
    "-o", "--output", type=click.Path(dir_okay=False), default="traffic.csv", show_default=True
)
@click.option("--quiet", is_flag=True)
@reported
def gen_traffic(traffic: str, network: str, seed: int, output: str, quiet: bool) -> None:
    """Write generated traffic as an i,j,value CSV."""
    net = parse_network_spec(network)
    demand = parse_traffic_spec(traffic, net, seed)
    save_traffic_csv(demand, output)
    if not quiet:
        console.print(
            f"[green]total volume {demand.total:g} over {net.n_pods} PoDs -> {output}[/green]",
            highlight=False,
        )
