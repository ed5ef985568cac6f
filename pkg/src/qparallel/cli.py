"""Command-line front door: estimate, flamegraph, simulate, sweep and examples."""

import csv
import functools
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, List, Optional, Sequence, Tuple, TypeVar

import click
import numpy as np
from loguru import logger
from tabulate import tabulate

from .config import RunConfig, parse_entry_args, resolve_metric, setup_logging
from .core.ir import Trace, count_gates, t_like
from .core.qubit_manager import QubitManager
from .core.scheduler import critical_path, format_report, resource_report, schedule
from .errors import QParallelError, ValidationError
from .flamegraph import FILE_SUFFIX, to_speedscope
from .lowering import trace_program
from .parser import parse
from .simulator import equivalent, run, slots_for
from .stdlib import (
    FAMILIES,
    MCX,
    MODES,
    SERIAL,
    CircuitSpec,
    corpus_programs,
    trace_circuit,
    write_corpus,
)
from .syntax import DOUBLE, INT

F = TypeVar("F", bound=Callable[..., Any])

SWEEP_HEADER = ("family", "size", "mode", "extra", "depth", "t_count", "qubits")


def _guarded(func: F) -> F:
    """Turn qparallel errors into a diagnostic on stderr and the error's exit code."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except QParallelError as exc:
            click.echo(f"error: {exc}", err=True)
            if isinstance(exc, ValidationError):
                for diagnostic in exc.diagnostics:
                    click.echo(f"  {diagnostic}", err=True)
            sys.exit(exc.exit_code)

    return wrapper  # type: ignore[return-value]


def _int_list(_ctx: click.Context, _param: click.Parameter, value: Optional[str]) -> List[int]:
    if not value:
        return []
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}") from None


def _program_options(func: F) -> F:
    options = [
        click.argument("source", type=click.Path(dir_okay=False, path_type=Path)),
        click.option("--entry", default="Main", show_default=True, help="Entry operation."),
        click.option(
            "--arg", "args", multiple=True, metavar="NAME=VALUE", help="Entry argument."
        ),
        click.option("--metric", default=None, help="Metric preset, YAML or GATE=COST file."),
        click.option("--force-serial", is_flag=True, help="Ignore parallel keywords and fanout."),
        click.option("--max-qubits", type=int, default=None, help="Live qubit limit."),
        click.option("--seed", type=int, default=0, show_default=True, help="Measurement seed."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _config(
    source: Path,
    entry: str,
    args: Sequence[str],
    metric: Optional[str],
    force_serial: bool,
    max_qubits: Optional[int],
    seed: int,
    output: Optional[Path] = None,
    top: int = 5,
) -> RunConfig:
    return RunConfig(
        source=source,
        entry=entry,
        args=parse_entry_args(args),
        metric=resolve_metric(metric),
        force_serial=force_serial,
        output=output,
        seed=seed,
        max_qubits=max_qubits,
        top=top,
    )


def trace_config(config: RunConfig, serial: Optional[bool] = None) -> Trace:
    """Parse and trace the program a run configuration points at."""
    program = parse(config.read_source())
    manager = QubitManager(max_qubits=config.max_qubits)
    use_serial = config.force_serial if serial is None else serial
    return trace_program(program, config.entry, config.args, manager=manager, serial=use_serial)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging on stderr.")
@click.version_option(package_name="qparallel")
def cli(verbose: bool) -> None:
    """Explicit-parallelism toolkit for a small quantum language."""
    setup_logging(verbose)


@cli.command()
@_program_options
@click.option("--top", type=int, default=5, show_default=True, help="Frames to list.")
@_guarded
def estimate(top: int, **options: Any) -> None:
    """Print depth, T-count, gate count, qubit width and the heaviest frames."""
    config = _config(top=top, **options)
    trace = trace_config(config)
    sched = schedule(trace, config.metric)
    report = resource_report(trace, sched, config.metric.name)
    click.echo(format_report(report, top=config.top))


@cli.command()
@_program_options
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None)
@_guarded
def flamegraph(output: Optional[Path], **options: Any) -> None:
    """Write the critical path as a speedscope evented profile."""
    config = _config(output=output, **options)
    trace = trace_config(config)
    sched = schedule(trace, config.metric)
    target = config.output or Path(config.source.stem + FILE_SUFFIX)
    name = f"{config.entry} ({config.metric.name})"
    text = to_speedscope(critical_path(sched, trace), sched.depth, name)
    target.write_text(text, encoding="utf-8")
    logger.info(f"[FLAME] wrote {target}")
    click.echo(f"depth {sched.depth}")
    click.echo(f"wrote {target}")


@cli.command()
@_program_options
@click.option(
    "--check-parallel", is_flag=True, help="Compare parallel and serial lowering on all inputs."
)
@_guarded
def simulate(check_parallel: bool, **options: Any) -> None:
    """Run the program on the statevector simulator."""
    config = _config(**options)
    if check_parallel:
        parallel = trace_config(config, serial=False)
        serial = trace_config(config, serial=True)
        verdict = equivalent(parallel, serial, seeds=(config.seed + 1, config.seed + 2))
        status = "PASS" if verdict.equivalent else "FAIL"
        click.echo(
            f"{status} max deviation {verdict.max_deviation:.3g}"
            f" over {verdict.inputs_checked} runs"
        )
        if not verdict.equivalent:
            sys.exit(5)
        return

    trace = trace_config(config)
    result = run(trace, slots_for(trace), seed=config.seed)
    click.echo(_state_table(result.state))
    if result.outcomes:
        outcomes = " ".join(f"r{index}={bit}" for index, bit in sorted(result.outcomes.items()))
        click.echo(f"measurements: {outcomes}")


def _state_table(state: "np.ndarray", limit: int = 16) -> str:
    n = max(1, int(np.log2(len(state))))
    nonzero = [i for i in np.argsort(-np.abs(state)) if abs(state[i]) > 1e-9][:limit]
    rows = []
    for i in nonzero:
        amp = complex(state[i])
        bits = format(int(i), f"0{n}b")[::-1]
        rows.append([bits, f"{amp.real:+.6f}{amp.imag:+.6f}j", f"{abs(amp) ** 2:.6f}"])
    return tabulate(rows, headers=["slots 0..", "amplitude", "probability"], tablefmt="simple")


@cli.command()
@click.argument("family", type=click.Choice(FAMILIES))
@click.option("--sizes", callback=_int_list, required=True, help="Comma-separated sizes.")
@click.option("--modes", default=",".join(MODES), show_default=True)
@click.option("--metric", default=None, help="Metric preset or metric file.")
@click.option("--cutoff", callback=_int_list, default=None, help="mcx recursion cutoffs.")
@click.option("--q", "qs", callback=_int_list, default=None, help="givens Fourier register counts.")
@click.option("--bitwidth", type=int, default=32, show_default=True, help="givens adder width.")
@click.option("--k", type=int, default=2, show_default=True, help="Fanout replicas.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Rows computed concurrently.")
@_guarded
def sweep(
    family: str,
    sizes: List[int],
    modes: str,
    metric: Optional[str],
    cutoff: List[int],
    qs: List[int],
    bitwidth: int,
    k: int,
    jobs: int,
) -> None:
    """Emit one CSV row per (size, mode, parameter) point of a circuit family."""
    table = resolve_metric(metric)
    specs = _sweep_specs(family, sizes, modes.split(","), cutoff, qs, bitwidth, k)
    for spec in specs:
        spec.validate()

    def measure(spec: CircuitSpec) -> Tuple[Any, ...]:
        trace = trace_circuit(spec)
        sched = schedule(trace, table)
        return (
            spec.family,
            spec.size,
            spec.mode,
            spec.extras(),
            sched.depth,
            count_gates(trace, t_like),
            trace.high_watermark,
        )

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        rows = list(pool.map(measure, specs))
    logger.debug(f"[SWEEP] {family}: {len(rows)} rows with {jobs} job(s)")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    writer.writerows(rows)


def _sweep_specs(
    family: str,
    sizes: Sequence[int],
    modes: Sequence[str],
    cutoffs: Sequence[int],
    qs: Sequence[int],
    bitwidth: int,
    k: int,
) -> List[CircuitSpec]:
    specs = []
    for size in sizes:
        for mode in modes:
            mode = mode.strip()
            if family == MCX and cutoffs and mode != SERIAL:
                specs.extend(CircuitSpec(family, size, mode, cutoff=c) for c in cutoffs)
            elif qs:
                specs.extend(
                    CircuitSpec(family, size, mode, bitwidth=bitwidth, q=q, k=k) for q in qs
                )
            else:
                specs.append(CircuitSpec(family, size, mode, bitwidth=bitwidth, k=k))
    return specs


@cli.command()
@click.option(
    "--write", "directory", type=click.Path(file_okay=False, path_type=Path), default=None
)
@_guarded
def examples(directory: Optional[Path]) -> None:
    """List the corpus, or write it (plus generated samples) into a directory."""
    if directory is not None:
        for path in write_corpus(directory):
            click.echo(str(path))
        return
    rows = []
    for name, text in corpus_programs().items():
        program = parse(text)
        entries = [
            f"{op.name}({', '.join(p.name for p in op.params)})"
            for op in program.operations
            if all(p.type in (INT, DOUBLE) for p in op.params)
        ]
        rows.append([name, ", ".join(entries)])
    click.echo(tabulate(rows, headers=["program", "entry points"], tablefmt="simple"))


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
