"""
Command-line entry point for the EO strata toolkit.

Commands:
    eo orth      EO catalog and Hasse diagram of SO(n,2)
    eo embed     image of each stratum under SO(n-1,2) -> SO(n,2) or GU(n,1) -> GU(n+1,1)
    eo newton    Newton cocharacters, slopes and p-ranks
    eo unitary   strata of GU(n,1) with p-rank, a-number and slopes
    eo verify    consistency sweeps

Every command builds a Report and prints it as a table, as JSON or as DOT.
"""

import functools
import json
import logging
import sys
from typing import Dict, List, Optional, Sequence

import click
from colorama import Fore, Style
from dotenv import load_dotenv
from sympy import isprime

from backend.config.config import Config
from backend.engines import (
    clifford_newton,
    diagrams,
    strata_orth,
    unitary_dd,
    verification,
    zipcox,
)
from backend.engines.errors import InternalConsistencyError, VerificationFailure
from backend.models.models import (
    NewtonKind,
    OrthCase,
    OutputFormat,
    Parity,
    PrimeBehavior,
    Report,
    Splitness,
    Suite,
)


# Configure logger
logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_VERIFICATION = 3
EXIT_INTERNAL = 4

# Above this rank the Newton table falls back to the closed-form slopes
NEWTON_DERIVED_MAX = 6

FORMAT_OPTION = click.option(
    "--format",
    "fmt",
    type=click.Choice([f.value for f in OutputFormat]),
    default=OutputFormat.TABLE.value,
    show_default=True,
    help="Output format.",
)


def _handle_errors(command):
    """Map engine errors to the exit codes of the CLI."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except VerificationFailure as e:
            click.echo(f"{Fore.RED}FAILED{Style.RESET_ALL} {e}", err=True)
            for failure in e.failures:
                click.echo(f"  {failure}", err=True)
            ctx.exit(EXIT_VERIFICATION)
        except InternalConsistencyError as e:
            click.echo(f"{Fore.RED}INTERNAL ERROR{Style.RESET_ALL} {e}", err=True)
            if e.trace is not None:
                click.echo(json.dumps(e.trace, sort_keys=True, indent=2, default=str), err=True)
            ctx.exit(EXIT_INTERNAL)
        except ValueError as e:
            raise click.UsageError(str(e), ctx=ctx)

    return wrapper


def _check_prime(ctx, param, value):
    if value is None:
        return value
    if value < 3 or not isprime(value):
        raise click.BadParameter(f"must be an odd prime, got {value}")
    return value


def _report_json(report: Report) -> str:
    return json.dumps(report.model_dump(mode="json", by_alias=True), sort_keys=True, indent=2)


def _format_table(rows: List[Dict], columns: Sequence[str]) -> str:
    cells = [[str(row.get(col, "")) for col in columns] for row in rows]
    widths = [max([len(col)] + [len(r[k]) for r in cells]) for k, col in enumerate(columns)]
    lines = ["  ".join(col.ljust(w) for col, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in cells:
        lines.append("  ".join(value.ljust(w) for value, w in zip(r, widths)))
    return "\n".join(lines)


def _emit(
    report: Report,
    fmt: str,
    columns: Dict[str, Sequence[str]],
    ascii_diagram: Optional[str] = None,
    dot_key: Optional[str] = None,
):
    fmt = OutputFormat(fmt)
    if fmt == OutputFormat.JSON:
        click.echo(_report_json(report))
        return
    if fmt == OutputFormat.DOT:
        if dot_key is None or dot_key not in report.diagrams:
            raise click.UsageError(f"DOT output is not available for {report.command}")
        click.echo(report.diagrams[dot_key])
        return
    for name, cols in columns.items():
        click.echo(f"{Style.BRIGHT}{name}{Style.RESET_ALL}")
        click.echo(_format_table(report.tables.get(name, []), cols))
        click.echo("")
    if ascii_diagram:
        click.echo(ascii_diagram)
        click.echo("")
    status = f"{Fore.GREEN}OK{Style.RESET_ALL}" if report.ok else f"{Fore.RED}FAILED{Style.RESET_ALL}"
    click.echo(f"{report.command}: {status}")


def _select_case(
    n: int,
    p: int,
    source: Optional[str],
    subcase: Optional[str],
    ambient: Optional[str],
    c_class: Optional[str],
) -> OrthCase:
    """Pick one OrthCase from the case flags; flags that do not apply to n are usage errors."""
    if n % 2:
        if ambient is not None or c_class is not None:
            raise click.UsageError("--ambient and --c apply to even n only")
        source = Splitness(source or Splitness.SPLIT.value)
        if source == Splitness.SPLIT and subcase is not None:
            raise click.UsageError("--subcase applies to a nonsplit source only")
        for case in strata_orth.orth_cases(n, p):
            if case.source_splitness != source:
                continue
            if source == Splitness.NONSPLIT and case.subcase != (subcase or "I"):
                continue
            return case
    else:
        if source is not None or subcase is not None:
            raise click.UsageError("--source and --subcase apply to odd n only")
        ambient = Splitness(ambient or Splitness.SPLIT.value)
        square = (c_class or "square") == "square"
        for case in strata_orth.orth_cases(n, p):
            if case.ambient_splitness == ambient and (case.c == 1) == square:
                return case
    raise click.UsageError(f"No case for n={n} p={p} with the given flags")


def _case_options(command):
    options = [
        click.option("--source", type=click.Choice(["split", "nonsplit"]), help="Source splitness (odd n)."),
        click.option("--subcase", type=click.Choice(["I", "II"]), help="Nonsplit source subcase (odd n)."),
        click.option("--ambient", type=click.Choice(["split", "nonsplit"]), help="Ambient splitness (even n)."),
        click.option(
            "--c", "c_class", type=click.Choice(["square", "nonsquare"]), help="Class of the source middle constant (even n)."
        ),
        click.option("--p", type=int, default=None, callback=_check_prime, help="Odd prime, default EO_PRIME."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _orth_nodes(D):
    return [(label.name, label.dim) for label in zipcox.labels(D)]


@click.group()
@click.option("--log-level", default=None, help="Log level, default EO_LOG_LEVEL.")
@click.pass_context
def cli(ctx, log_level):
    """EO strata of orthogonal and unitary Shimura varieties."""
    load_dotenv()
    try:
        config = Config(load_env=False)
    except ValueError as e:
        raise click.UsageError(str(e))
    level = (log_level or config.get_log_level()).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise click.BadParameter(f"not a logging level: {level}", param_hint="--log-level")
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
    ctx.obj = config


@cli.command()
@click.option("--n", type=click.IntRange(min=1), required=True, help="Rank parameter of SO(n,2).")
@_case_options
@FORMAT_OPTION
@click.pass_obj
@_handle_errors
def orth(config, n, source, subcase, ambient, c_class, p, fmt):
    """
    EO catalog of SO(n,2): dimensions, a-numbers, p-ranks and the Hasse diagram.
    """
    p = p or config.get_prime()
    case = _select_case(n, p, source, subcase, ambient, c_class)
    D = strata_orth.ambient_datum(case)
    rows = [
        {**info.model_dump(mode="json"), "perm": list(info.perm)}
        for info in strata_orth.catalog(case)
    ]
    nodes = _orth_nodes(D)
    covers = zipcox.hasse_diagram(D)
    title = f"EO strata of SO({n},2), {strata_orth.case_name(case)}, p={p}"
    report = Report(
        command="orth",
        inputs={"n": n, "p": p, "case": case.model_dump(mode="json"), "psi": D.psi.kind.value},
        tables={"strata": rows, "covers": [{"lower": a, "upper": b} for a, b in covers]},
        diagrams={"hasse": diagrams.hasse_dot(title, nodes, covers)},
    )
    logger.info(f"orth n={n} p={p}: {len(rows)} strata")
    _emit(
        report,
        fmt,
        {"strata": ["name", "dim", "a_number", "p_rank", "basic", "perm"]},
        ascii_diagram=diagrams.hasse_ascii(nodes, covers),
        dot_key="hasse",
    )


@cli.group()
def embed():
    """Image of each EO stratum under the natural embeddings."""


@embed.command("orth")
@click.option("--n", type=click.IntRange(min=1), required=True, help="Rank parameter of the target SO(n,2).")
@_case_options
@FORMAT_OPTION
@click.pass_obj
@_handle_errors
def embed_orth(config, n, source, subcase, ambient, c_class, p, fmt):
    """
    SO(n-1,2) -> SO(n,2): derived image, closed form and their agreement per stratum.
    """
    p = p or config.get_prime()
    case = _select_case(n, p, source, subcase, ambient, c_class)
    rows = strata_orth.embedding_rows(case)
    target = strata_orth.ambient_datum(case)
    target_poset = (_orth_nodes(target), zipcox.hasse_diagram(target))
    if n == 1:
        source_poset = ([("pt", 0)], [])
    else:
        D = strata_orth.source_datum(case)
        source_poset = (_orth_nodes(D), zipcox.hasse_diagram(D))
    images = [(row.source, row.target) for row in rows]
    title = f"SO({n - 1},2) -> SO({n},2), {strata_orth.case_name(case)}, p={p}"
    report = Report(
        command="embed orth",
        inputs={"n": n, "p": p, "case": case.model_dump(mode="json")},
        tables={"embedding": [row.model_dump(mode="json") for row in rows]},
        diagrams={"embedding": diagrams.embedding_dot(title, source_poset, target_poset, images)},
        ok=all(row.agree for row in rows),
    )
    _emit(
        report,
        fmt,
        {"embedding": ["source", "source_dim", "target", "target_dim", "closed_form_dim", "route", "agree"]},
        dot_key="embedding",
    )
    if not report.ok:
        bad = [row.model_dump(mode="json") for row in rows if not row.agree]
        raise InternalConsistencyError(f"Embedding routes disagree for {strata_orth.case_name(case)}", trace=bad)


@embed.command("unitary")
@click.option("--n", type=click.IntRange(min=1, max=unitary_dd.MAX_UNITARY_N), required=True, help="GU(n,1).")
@click.option("--split/--inert", "split", default=False, help="Behavior of p in the quadratic field.")
@FORMAT_OPTION
@_handle_errors
def embed_unitary(n, split, fmt):
    """
    GU(n,1) -> GU(n+1,1): closed form, canonical filtration and a second route per stratum.
    """
    behavior = PrimeBehavior.SPLIT if split else PrimeBehavior.INERT
    rows = [unitary_dd.embed_image_unitary(n, a, behavior) for a in range(n + 1)]
    source_nodes = [(f"a={a}", a) for a in range(n + 1)]
    target_nodes = [(f"a={a}", a) for a in range(n + 2)]
    images = [(f"a={row.a}", f"a={row.closed_form}") for row in rows]
    title = f"GU({n},1) -> GU({n + 1},1), p {behavior.value}"
    report = Report(
        command="embed unitary",
        inputs={"n": n, "behavior": behavior.value},
        tables={"embedding": [row.model_dump(mode="json") for row in rows]},
        diagrams={
            "embedding": diagrams.embedding_dot(
                title,
                (source_nodes, diagrams.chain(source_nodes)),
                (target_nodes, diagrams.chain(target_nodes)),
                images,
            )
        },
    )
    _emit(
        report,
        fmt,
        {"embedding": ["a", "closed_form", "filtration", "second_route", "second_route_name", "codim_route", "agree"]},
        dot_key="embedding",
    )


def _newton_rows(n: int, parity: Parity) -> List[Dict]:
    rows = []
    derived = n <= NEWTON_DERIVED_MAX
    for b in clifford_newton.newton_set(n, parity):
        if b.kind == NewtonKind.BASIC:
            slopes, route = clifford_newton.basic_slopes(n), "closed-form"
        elif derived:
            slopes = clifford_newton.slopes_of_nu(n, b.j, primed=b.kind == NewtonKind.PRIMED, parity=parity)
            route = "clifford"
        else:
            slopes, route = clifford_newton.closed_form_slopes(n, b.j), "closed-form"
        rows.append(
            {
                "name": b.name,
                "kind": b.kind.value,
                "j": b.j,
                "coefficients": [str(x) for x in b.coefficients],
                "dim": b.dim,
                "p_rank": b.p_rank,
                "slopes": {str(s): k for s, k in slopes.entries},
                "slopes_text": str(slopes),
                "route": route,
            }
        )
    return rows


@cli.command()
@click.option("--n", type=click.IntRange(min=1, max=clifford_newton.MAX_CLIFFORD_N), required=True)
@click.option(
    "--even-split/--even-nonsplit", "even_split", default=True, help="Case of SO(n,2) at p for even n."
)
@FORMAT_OPTION
@_handle_errors
def newton(n, even_split, fmt):
    """
    Newton cocharacters of SO(n,2) with stratum dimensions, p-ranks and Kuga-Satake slopes.
    """
    if n % 2:
        parity = Parity.ODD
    else:
        parity = Parity.EVEN_SPLIT if even_split else Parity.EVEN_NONSPLIT
    rows = _newton_rows(n, parity)
    report = Report(
        command="newton",
        inputs={"n": n, "case": parity.value},
        tables={"newton": rows},
    )
    _emit(report, fmt, {"newton": ["name", "dim", "p_rank", "slopes_text", "route"]})


@cli.command()
@click.option("--n", type=click.IntRange(min=1, max=unitary_dd.MAX_UNITARY_N), required=True, help="GU(n,1).")
@click.option("--split/--inert", "split", default=False, help="Behavior of p in the quadratic field.")
@FORMAT_OPTION
@_handle_errors
def unitary(n, split, fmt):
    """
    EO strata of GU(n,1). The a-number column uses the abelian-variety convention;
    shifted_n gives the same family in the (n+1,1) indexing.
    """
    behavior = PrimeBehavior.SPLIT if split else PrimeBehavior.INERT
    rows = []
    for info in unitary_dd.unitary_catalog(n, behavior):
        row = info.model_dump(mode="json", exclude={"slopes"})
        row["slopes"] = {str(s): k for s, k in info.slopes.entries} if info.slopes else None
        row["slopes_text"] = str(info.slopes) if info.slopes else ""
        rows.append(row)
    nodes = [(f"a={row['a']}", row["dim"]) for row in rows]
    covers = diagrams.chain(nodes)
    report = Report(
        command="unitary",
        inputs={"n": n, "behavior": behavior.value},
        tables={"strata": rows},
        diagrams={"hasse": diagrams.hasse_dot(f"EO strata of GU({n},1), p {behavior.value}", nodes, covers)},
    )
    _emit(
        report,
        fmt,
        {"strata": ["a", "dim", "p_rank", "a_number", "shifted_n", "rho", "supersingular", "slopes_text"]},
        dot_key="hasse",
    )


@cli.command()
@click.argument("suite", type=click.Choice([s.value for s in Suite]), default=Suite.ALL.value)
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Seed, default EO_SEED.")
@click.option("--samples", type=click.IntRange(min=1), default=None, help="Samples per frame condition.")
@click.option("--n", "n_values", type=click.IntRange(min=1, max=verification.FRAME_N_MAX), multiple=True)
@click.option("--p", "primes", type=int, multiple=True, help="Primes for the frame suite.")
@FORMAT_OPTION
@click.pass_obj
@_handle_errors
def verify(config, suite, seed, samples, n_values, primes, fmt):
    """
    Run the consistency sweeps. Exit status 0 only if every check passes.
    """
    for p in primes:
        _check_prime(None, None, p)
    seed = config.get_seed() if seed is None else seed
    samples = samples or config.get_samples()
    results = verification.run_suites(Suite(suite), seed, samples, n_values or None, primes or None)
    rows = [
        {"suite": item.suite.value, **check.model_dump(mode="json")}
        for item in results
        for check in item.checks
    ]
    failures = [row for row in rows if not row["passed"]]
    report = Report(
        command="verify",
        inputs={
            "suite": suite,
            "seed": seed,
            "samples": samples,
            "n": list(n_values),
            "p": list(primes),
        },
        tables={
            "checks": rows,
            "summary": [
                {
                    "suite": item.suite.value,
                    "checks": len(item.checks),
                    "failed": sum(1 for check in item.checks if not check.passed),
                }
                for item in results
            ],
        },
        ok=not failures,
    )
    _emit(report, fmt, {"summary": ["suite", "checks", "failed"]})
    if failures:
        raise VerificationFailure(f"{len(failures)} checks failed", [row["name"] for row in failures])


if __name__ == "__main__":
    cli()
