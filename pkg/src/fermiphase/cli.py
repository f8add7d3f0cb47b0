"""Command-line entry point.

Commands fill in as the engine layers land; `verify` always reflects the
full set of self-checks available so far.
"""

from __future__ import annotations

import sys

import click

from . import __version__


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Classify point-group-equivariant fermionic invertible phases."""


@main.command()
def verify() -> None:
    """Self-test algebra and catalog invariants; exit nonzero on failure."""
    from .f2homalg import free_module, make_algebra, restrict_to_e1, verify_module

    failures = []
    for name in ("A(1)", "E(1)"):
        alg = make_algebra(name)  # constructor runs exhaustive structure checks
        click.echo(f"{name}: dimension {alg.dim}, top degree {alg.top_degree}")
        report = verify_module(free_module(alg, [(0, "x")]))
        if report:
            failures.append((name, report))
    restricted = restrict_to_e1(free_module(make_algebra("A(1)"), [(0, "x")]))
    report = verify_module(restricted)
    if report:
        failures.append(("A(1) restricted to E(1)", report))
    if failures:
        for name, report in failures:
            click.echo(f"FAIL {name}: {report}", err=True)
        sys.exit(1)
    click.echo("all self-checks passed")


if __name__ == "__main__":
    main()
