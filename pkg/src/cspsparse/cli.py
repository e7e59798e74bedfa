"""Command-line front end: ``cspsparse <command> [options]``.

Exit codes: 0 success, 1 verification failed, 2 usage or parse error,
3 semantic error (empty support, budget exceeded, unsupported input).
"""
from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from .demos import DEMOS, run_demo
from .histogram_core import classify
from .instance import (KINDS, complete, format_instance, is_complete, parse_instance,
                       random_instance)
from .relation_core import (EmptySupportError, ParseError, RelationError,
                            format_relation, max_and_arity, parse_relation)
from .sparsify import DEFAULT_KAPPA, PlanError, apply_plan, plan
from .verify import (DEFAULT_BUDGET, BudgetError, codeword_census, exhaustive_verify,
                     witness_family_rpartite, witness_family_uniform)

EXIT_FAIL, EXIT_USAGE, EXIT_SEMANTIC = 1, 2, 3


class Rational(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational such as 1/4 or 0.25", param, ctx)


RATIONAL = Rational()
relation_opt = click.option("--relation", "relation_path", required=True,
                            type=click.Path(exists=True, dir_okay=False),
                            help="Relation file.")
instance_opt = click.option("--instance", "instance_path", required=True,
                            type=click.Path(exists=True, dir_okay=False),
                            help="Instance file.")
out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None,
                       help="Output file (default: stdout).")
json_opt = click.option("--json", "as_json", is_flag=True, help="Machine-readable JSON output.")
eps_opt = click.option("--eps", type=RATIONAL, required=True, help="Accuracy, e.g. 1/4.")
budget_opt = click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True,
                          help="Maximum number of assignments to enumerate.")
threads_opt = click.option("--threads", type=int, default=None,
                           help="Worker threads (default: all cores).")


def _read(path: str) -> str:
    return Path(path).read_text()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _relation(path: str):
    R = parse_relation(_read(path))
    R.require_support()
    return R


@click.group()
def main():
    """Sparsification toolkit for complete and random CSP instances."""


@main.command()
@relation_opt
@out_opt
@json_opt
def analyze(relation_path, out, as_json):
    """Classify a relation and write its report."""
    report = classify(_relation(relation_path))
    _emit(report.to_json() + "\n" if as_json else report.to_text(), out)


@main.command()
@click.option("--kind", type=click.Choice(KINDS), required=True)
@click.option("--n", "n", type=int, required=True, help="Variables (per part for rpartite).")
@click.option("--r", "r", type=int, default=None, help="Arity (default: from --relation).")
@click.option("--relation", "relation_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Relation file supplying the arity.")
@click.option("--m", "m", type=int, default=None, help="Random clause count (default: complete).")
@click.option("--seed", type=int, default=0, show_default=True)
@out_opt
def gen(kind, n, r, relation_path, m, seed, out):
    """Generate a complete or random instance."""
    if r is None:
        if relation_path is None:
            raise click.UsageError("give --r or --relation")
        r = parse_relation(_read(relation_path)).r
    C = complete(kind, n, r) if m is None else random_instance(kind, n, r, m, seed)
    _emit(format_instance(C), out)


@main.command()
@relation_opt
@instance_opt
@eps_opt
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--kappa", type=float, default=DEFAULT_KAPPA, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Where to write the sparsified instance.")
@json_opt
def sparsify(relation_path, instance_path, eps, seed, kappa, out, as_json):
    """Plan and build a sparsifier; print the plan."""
    R = _relation(relation_path)
    C = parse_instance(_read(instance_path))
    p = plan(classify(R), C.n, C.m, eps, kind=C.kind, kappa=kappa, complete=is_complete(C))
    Path(out).write_text(format_instance(apply_plan(p, C, seed)))
    click.echo(p.to_json() if as_json else p.to_text().rstrip("\n"))


@main.command()
@relation_opt
@instance_opt
@click.option("--sparsifier", "sparsifier_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Reweighted instance to check.")
@eps_opt
@budget_opt
@threads_opt
@json_opt
def verify(relation_path, instance_path, sparsifier_path, eps, budget, threads, as_json):
    """Exhaustively check a sparsifier against its source instance."""
    R = _relation(relation_path)
    C = parse_instance(_read(instance_path))
    C_hat = parse_instance(_read(sparsifier_path))
    rep = exhaustive_verify(R, C, C_hat, eps, budget=budget, threads=threads)
    click.echo(rep.to_json() if as_json else rep.to_text().rstrip("\n"))
    if not rep.passed:
        sys.exit(EXIT_FAIL)


@main.command()
@relation_opt
@instance_opt
@click.option("--threshold", "thresholds", type=float, multiple=True, required=True,
              help="Codeword weight threshold (repeatable).")
@click.option("--dominant", default=None, help="Only t-dominant assignments, e.g. 10.")
@budget_opt
@json_opt
def census(relation_path, instance_path, thresholds, dominant, budget, as_json):
    """Count distinct low-weight codewords."""
    R = _relation(relation_path)
    C = parse_instance(_read(instance_path))
    t = None if dominant is None else tuple(int(x) for x in dominant.replace(",", ""))
    res = codeword_census(R, C, thresholds, dominant=t, budget=budget)
    click.echo(json.dumps(res.to_dict(), indent=2) if as_json else res.table().rstrip("\n"))


@main.command()
@relation_opt
@click.option("--n", "n", type=int, required=True)
@click.option("--kind", type=click.Choice(["uniform", "rpartite"]), default="rpartite",
              show_default=True)
@json_opt
def witness(relation_path, n, kind, as_json):
    """Build the lower-bound witness family."""
    R = _relation(relation_path)
    if kind == "uniform":
        fam = witness_family_uniform(R, n)
    else:
        fam = witness_family_rpartite(R, max_and_arity(R)[1], n)
    d = fam.to_dict()
    if as_json:
        click.echo(json.dumps(d, indent=2))
    else:
        d["satisfied_counts"] = " ".join(map(str, d["satisfied_counts"]))
        click.echo("\n".join(f"{k}: {v}" for k, v in d.items()))


@main.command()
@click.argument("name")
@click.option("--trials", type=int, default=None, help="Seeded trials (default per demo).")
def demo(name, trials):
    """Run a named end-to-end demo."""
    if name not in DEMOS:
        click.echo(f"unknown demo {name!r}; available: {', '.join(DEMOS)}", err=True)
        sys.exit(EXIT_USAGE)
    kwargs = {} if trials is None else {"trials": trials}
    res = run_demo(name, log=click.echo, **kwargs)
    if not res.ok:
        sys.exit(EXIT_FAIL)


@main.command("show-relation")
@relation_opt
def show_relation(relation_path):
    """Parse and reprint a relation file in canonical form."""
    click.echo(format_relation(parse_relation(_read(relation_path))), nl=False)


def run(argv=None) -> int:
    """Invoke the CLI and map library errors to exit codes."""
    try:
        main.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except ParseError as e:
        click.echo(f"parse error: {e}", err=True)
        return EXIT_USAGE
    except (EmptySupportError, BudgetError, PlanError, RelationError) as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_SEMANTIC
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_SEMANTIC
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0
    return 0


def entry() -> None:
    sys.exit(run())
