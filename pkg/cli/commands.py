"""
cs3kit command line.

Every command resolves a RunConfig (defaults, optional JSON file,
environment, flags), configures logging to stderr and prints its report on
stdout, either as rich tables or as JSON with --format json.

Exit codes: 0 success or "true", 1 semantic "false", 2 usage error,
3 internal verification failure or an unexpected toolkit error.
"""

import functools
import json
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import click
from rich.console import Console
from rich.table import Table

from circuits.circuit import cs_count, display_word, eval_word, gate_histogram, k_count, parse_word
from circuits.relations import (LEVEL_SET_IDS, RELATION_SETS, builtin_relation_sets, load_relation_file,
                                summarize_by_family, verify_relations)
from presentations.rspresent import (brute_force_monoid, cyclic_toy, determinant_kernel, dihedral_toy,
                                     load_presentation_file, rs_present, save_presentation)
from rewriting.normalizer import almost_normalize, equiv_check, render_syllables
from subgroups.factor import FACTOR_GROUPS, NotMember, factor
from subgroups.membership import DISPLAY_NAMES
from subgroups.tables import (ENUMERABLE, clear_table_cache, enumerate_subgroup, get_tables, is_table_cached,
                             save_tables)
from utils.config import RunConfig, load_run_config
from utils.errors import Cs3Error
from utils.logger import configure_logging, get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _console() -> Console:
    # bound per call so the current sys.stdout is used
    return Console(highlight=False)


def _emit_json(data: Any) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False, default=str))


def _config(ctx: click.Context) -> RunConfig:
    return ctx.obj["config"]


def _as_json(ctx: click.Context) -> bool:
    return _config(ctx).output_format == "json"


def _tables(ctx: click.Context):
    config = _config(ctx)
    return get_tables(config.resolved_cache_dir, progress=not _as_json(ctx))


def guarded(f):
    """Map toolkit errors escaping a command to the internal-failure exit code."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except Cs3Error as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"Error: {type(e).__name__}: {e}", err=True)
            sys.exit(EXIT_INTERNAL)

    return wrapper


def _parse(text: str):
    try:
        return parse_word(text)
    except Cs3Error as e:
        raise click.BadParameter(str(e))


@click.group()
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="JSON file with configuration values.")
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), help="Table cache directory.")
@click.option("--output-dir", type=click.Path(file_okay=False, path_type=Path), help="Session output directory.")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
                                               case_sensitive=False))
@click.option("--log-file", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), help="Report format.")
@click.option("--workers", type=click.IntRange(min=1), help="Processes for relation verification.")
@click.option("--seed", type=int, help="Seed for every sampled check.")
@click.option("--pass-cap", type=click.IntRange(min=1), help="Normalizer pass cap.")
@click.option("--step-cap", type=click.IntRange(min=1), help="Rewrite step cap per fixpoint run.")
@click.option("--check-every", type=click.IntRange(min=0),
              help="Re-check the operator every N rewrite steps; 0 disables.")
@click.option("--debug-verify/--no-debug-verify", default=None,
              help="Re-check the operator after every rewrite.")
@click.pass_context
def cli(ctx, config_file, cache_dir, output_dir, log_level, log_file, output_format, workers, seed,
        pass_cap, step_cap, check_every, debug_verify):
    """Exact verification and rewriting for 3-qubit Clifford+CS circuits."""
    overrides = {
        "cache_dir": cache_dir, "output_dir": output_dir,
        "log_level": log_level.upper() if log_level else None, "log_file": log_file,
        "output_format": output_format, "workers": workers, "seed": seed, "pass_cap": pass_cap,
        "step_cap": step_cap, "check_every": check_every, "debug_verify": debug_verify,
    }
    try:
        config = load_run_config(config_file, overrides)
    except (ValueError, FileNotFoundError) as e:
        raise click.UsageError(f"invalid configuration: {e}")
    configure_logging(config.log_level, str(config.log_file) if config.log_file else None)
    ctx.ensure_object(dict)
    ctx.obj["config"] = config


# --- eval / equiv / normalize --------------------------------------------------------

@cli.command("eval")
@click.argument("word")
@click.pass_context
@guarded
def eval_command(ctx, word):
    """Print the exact 8x8 matrix of WORD."""
    w = _parse(word)
    m = eval_word(w)
    stats = {"length": len(w), "cs_count": cs_count(w), "k_count": k_count(w)}
    if _as_json(ctx):
        _emit_json({"word": display_word(w), "matrix": m.to_json(), "det": str(m.det()),
                    "histogram": gate_histogram(w), **stats})
        return
    console = _console()
    table = Table(title=display_word(w) or "ε", show_header=False)
    for row in m.entries:
        table.add_row(*(str(e) for e in row))
    console.print(table)
    console.print(f"det = {m.det()} | length {stats['length']} | CS-count {stats['cs_count']} "
                  f"| K-count {stats['k_count']}")


@cli.command("equiv")
@click.argument("u")
@click.argument("v")
@click.option("--forms/--no-forms", default=False, help="Also compare almost-normal forms.")
@click.pass_context
@guarded
def equiv_command(ctx, u, v, forms):
    """Exit 0 when U and V denote the same operator, 1 otherwise."""
    wu, wv = _parse(u), _parse(v)
    result = equiv_check(wu, wv, compare_forms=forms, config=_config(ctx),
                         tables=_tables(ctx) if forms else None)
    if _as_json(ctx):
        _emit_json(result.to_dict())
    elif result.equal:
        click.echo("Equal")
    else:
        r, c, a, b = result.witness
        click.echo(f"NotEqual: entry ({r}, {c}) is {a} vs {b}")
    ctx.exit(EXIT_OK if result.equal else EXIT_FALSE)


@cli.command("normalize")
@click.argument("word")
@click.pass_context
@guarded
def normalize_command(ctx, word):
    """Almost-normal form of WORD with its syllable structure."""
    tables = _tables(ctx)
    sw, stats = almost_normalize(_parse(word), _config(ctx), tables)
    flat = sw.flatten(tables)
    if _as_json(ctx):
        _emit_json({"word": display_word(flat), "structure": sw.structure(tables), "stats": stats.to_dict()})
        return
    console = _console()
    console.print(display_word(flat) or "ε")
    console.print(render_syllables(sw, tables))
    table = Table("statistic", "value")
    for key, value in stats.to_dict().items():
        if key != "rewrites":
            table.add_row(key, str(value))
    console.print(table)


# --- verify -------------------------------------------------------------------------------

@cli.command("verify")
@click.option("--set", "set_name", type=click.Choice(sorted(RELATION_SETS) + list(LEVEL_SET_IDS),
                                                       case_sensitive=False),
              help="Built-in relation set.")
@click.option("--n", "n", type=click.IntRange(2, 16), default=None, help="Dimension for level/u8.")
@click.option("--file", "relation_file", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="File of 'lhs = rhs' relations.")
@click.pass_context
@guarded
def verify_command(ctx, set_name, n, relation_file):
    """
    Verify a relation set by exact matrix equality. A failing built-in set is
    an internal failure (exit 3); a failing user file is a "false" answer
    (exit 1).
    """
    if bool(set_name) == bool(relation_file):
        raise click.UsageError("give exactly one of --set or --file")
    config = _config(ctx)
    if relation_file:
        relations = load_relation_file(relation_file)
    else:
        relations = builtin_relation_sets(set_name, n)
    results = verify_relations(relations, workers=config.workers, progress=not _as_json(ctx),
                               desc=set_name or relation_file.name)
    failed = [r for r in results if not r.holds]

    if _as_json(ctx):
        _emit_json({"total": len(results), "passed": len(results) - len(failed),
                    "families": summarize_by_family(results), "results": [r.to_dict() for r in results]})
    else:
        console = _console()
        table = Table("family", "instance", "relation", "result")
        for r in results:
            table.add_row(r.relation.family, r.relation.instance, str(r.relation),
                          "[green]PASS[/green]" if r.holds else "[red]FAIL[/red]")
        console.print(table)
        console.print(f"{len(results) - len(failed)}/{len(results)} relations hold")

    if failed:
        ctx.exit(EXIT_FALSE if relation_file else EXIT_INTERNAL)


# --- factor / enumerate / tables ----------------------------------------------------------

@cli.command("factor")
@click.option("--group", "group", required=True, type=click.Choice(FACTOR_GROUPS))
@click.argument("word")
@click.pass_context
@guarded
def factor_command(ctx, group, word):
    """Normal-form tuple of WORD in GROUP; exit 1 when it is not a member."""
    tables = _tables(ctx)
    try:
        normal = factor(group, eval_word(_parse(word)), tables)
    except NotMember as e:
        if _as_json(ctx):
            _emit_json({"group": group, "member": False, "reason": str(e)})
        else:
            click.echo(f"not in {DISPLAY_NAMES.get(group, group)}: {e}")
        ctx.exit(EXIT_FALSE)
        return
    payload = {"group": group, "member": True, "tuple": normal.to_dict(),
               "word": display_word(normal.word(tables)) or "ε"}
    if _as_json(ctx):
        _emit_json(payload)
        return
    console = _console()
    table = Table("field", "value", title=f"{DISPLAY_NAMES.get(group, group)} normal form")
    for key, value in normal.to_dict().items():
        table.add_row(key, json.dumps(value, sort_keys=True) if isinstance(value, dict) else str(value))
    console.print(table)
    console.print(payload["word"])


@cli.command("enumerate")
@click.option("--group", "group", required=True, type=click.Choice(ENUMERABLE))
@click.option("--show", type=click.IntRange(min=0), default=0, help="Print the first N shortest words.")
@click.pass_context
@guarded
def enumerate_command(ctx, group, show):
    """Breadth-first enumeration of a finite subgroup."""
    table = enumerate_subgroup(group, progress=not _as_json(ctx))
    words = [display_word(w) or "ε" for w in list(table.words.values())[:show]]
    if _as_json(ctx):
        _emit_json({"group": group, "order": table.order, "words": words})
        return
    click.echo(f"|{DISPLAY_NAMES.get(group, group)}| = {table.order}")
    for w in words:
        click.echo(f"  {w}")


@cli.group("tables")
def tables_group():
    """Subgroup lookup tables."""


@tables_group.command("build")
@click.pass_context
@guarded
def tables_build(ctx):
    """Rebuild the coset, C and Q tables and write the cache file."""
    config = _config(ctx)
    replaced = is_table_cached(config.resolved_cache_dir)
    tables = get_tables(rebuild=True, progress=config.output_format != "json")
    path = save_tables(tables, config.resolved_cache_dir)
    if config.output_format == "json":
        _emit_json({"path": str(path), "coset_representatives": len(tables.coset_words), "replaced": replaced})
    else:
        verb = "replaced" if replaced else "wrote"
        click.echo(f"{verb} {len(tables.coset_words)} coset representatives in {path}")


@tables_group.command("clear")
@click.pass_context
@guarded
def tables_clear(ctx):
    """Delete the table cache file; exit 1 when there was none."""
    config = _config(ctx)
    removed = clear_table_cache(config.resolved_cache_dir)
    if config.output_format == "json":
        _emit_json({"cache_dir": str(config.resolved_cache_dir), "removed": removed})
    else:
        click.echo(f"removed table cache in {config.resolved_cache_dir}" if removed
                   else f"no table cache in {config.resolved_cache_dir}")
    if not removed:
        ctx.exit(EXIT_FALSE)


# --- Reidemeister-Schreier -----------------------------------------------------------------

@cli.group("rs")
def rs_group():
    """Reidemeister-Schreier kernel presentations."""


def _toy_report(name: str, toy) -> Dict:
    p, cs, model = toy()
    kernel = rs_present(p, cs)
    presented = brute_force_monoid(kernel.presentation)
    report = {"name": name, "kernel": kernel.to_dict()}
    try:
        oracle = brute_force_monoid(kernel.presentation, model=lambda w: model(kernel.expand(w)))
        report.update({"presented_order": presented.order, "oracle_order": oracle.order,
                       "agree": presented.order == oracle.order})
    except Cs3Error as e:
        # infinite kernels only get the bounded soundness check
        report.update({"presented_order": None, "oracle_order": None, "agree": None, "note": str(e)})
    return report


@rs_group.command("demo")
@click.option("--u8/--no-u8", default=False, help="Also run the determinant-parity kernel of U_8.")
@click.pass_context
@guarded
def rs_demo(ctx, u8):
    """Toy kernels with their oracle check; optionally the U_8 application."""
    config = _config(ctx)
    reports = [_toy_report("cyclic", cyclic_toy)]
    p, cs, model = dihedral_toy()
    reports.append({"name": "dihedral", "kernel": rs_present(p, cs).to_dict()})
    level = None
    if u8:
        level = determinant_kernel(8, config.sample_size, config.seed,
                                   progress=config.output_format != "json").to_dict()
    if config.output_format == "json":
        _emit_json({"toys": reports, "u8": level})
    else:
        console = _console()
        for r in reports:
            kernel = r["kernel"]
            console.print(f"[bold]{r['name']}[/bold]: generators {kernel['generators']}")
            for lhs, rhs in kernel["relations"]:
                console.print(f"  {' '.join(lhs) or 'ε'} = {' '.join(rhs) or 'ε'}")
            if r.get("presented_order") is not None:
                console.print(f"  presented order {r['presented_order']}, oracle {r['oracle_order']}")
        if level:
            console.print(f"U_8: {level['schreier_generators']} Schreier generators, "
                          f"{level['raw_relations']} relations, sampled soundness "
                          f"{'PASS' if level['soundness']['passed'] else 'FAIL'}")
    if any(r.get("agree") is False for r in reports) or (level and not level["soundness"]["passed"]):
        ctx.exit(EXIT_INTERNAL)


@rs_group.command("run")
@click.argument("presentation_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), help="Write the kernel presentation.")
@click.option("--no-eliminate", is_flag=True, help="Keep generators that reduce to ε.")
@click.pass_context
@guarded
def rs_run(ctx, presentation_file, output, no_eliminate):
    """Kernel presentation of the grading stored alongside the presentation."""
    config = _config(ctx)
    p, cs = load_presentation_file(presentation_file)
    if cs is None:
        raise click.UsageError("presentation file carries no grading")
    kernel = rs_present(p, cs, eliminate=not no_eliminate, progress=config.output_format != "json")
    if output:
        save_presentation(kernel, output)
    if config.output_format == "json":
        _emit_json(kernel.to_dict())
    else:
        click.echo(f"{len(kernel.presentation.generators)} generators, "
                   f"{len(kernel.presentation.relations)} relations")
        for lhs, rhs in kernel.presentation.relations:
            click.echo(f"  {' '.join(lhs) or 'ε'} = {' '.join(rhs) or 'ε'}")


# --- selftest -------------------------------------------------------------------------------

@cli.command("selftest")
@click.option("--quick", is_flag=True, help="Reduced sample sizes.")
@click.option("--only", multiple=True, help="Run only the named step (repeatable).")
@click.pass_context
@guarded
def selftest_command(ctx, quick, only):
    """Run the acceptance suite; exit 3 when any step fails."""
    from pipeline.verification_runner import AcceptanceSizes, VerificationRunner

    sizes = AcceptanceSizes.quick() if quick else AcceptanceSizes()
    runner = VerificationRunner(_config(ctx), sizes, tables=_tables(ctx))
    unknown = set(only) - {name for name, _ in runner.STEPS}
    if unknown:
        raise click.UsageError(f"unknown steps: {sorted(unknown)}")
    summary = runner.run(only=list(only) or None)
    if _as_json(ctx):
        _emit_json(summary)
    else:
        console = _console()
        table = Table("step", "result", "seconds", title=f"selftest {summary['session_id']}")
        for name, step in summary["steps"].items():
            table.add_row(name, "[green]PASS[/green]" if step["passed"] else "[red]FAIL[/red]",
                          f"{step['seconds']:.2f}")
        console.print(table)
        console.print(f"reports in {runner.output_path}")
    if not summary["passed"]:
        ctx.exit(EXIT_INTERNAL)


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI on argv and return the exit code instead of exiting."""
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name="cs3kit",
                      standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_FALSE
    except SystemExit as e:
        return int(e.code or 0)
    return rv if isinstance(rv, int) else EXIT_OK
