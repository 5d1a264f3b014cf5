#!/usr/bin/env python3

import time

import click
from rich.console import Console
from rich.table import Table

from corpus import a_unused_inputs, tradeoff_automaton
from solver import SolveConfig, Solver

console = Console()


def timed_run(automaton, cfg: SolveConfig, repeat: int):
    """Best wall-clock time of `repeat` runs, with the last outcome."""
    best, outcome = float("inf"), None
    for _ in range(repeat):
        solver = Solver(automaton, cfg)
        start = time.perf_counter()
        outcome = solver.run()
        best = min(best, time.perf_counter() - start)
    return best, outcome


@click.command()
@click.option('--sizes', default='50,100,200', help='Comma-separated state counts')
@click.option('-k', 'k', default=3, type=int, help='Bound used for every run')
@click.option('--repeat', default=3, type=int, help='Runs per measurement; the best is reported')
@click.option('--outputs', default=4, type=int, help='Output propositions of the trade-off automata')
@click.option('--downset', default='antichain', type=click.Choice(['antichain', 'full', 'kdtree', 'bins']),
              help='Downset backend used for the vector comparison')
def main(sizes, k, repeat, outputs, downset):
    """
    Compare vector backends on trade-off automata and count cpre applications of
    pure against refined input selection.
    """
    table = Table(title="Vector backends", border_style="blue")
    table.add_column("|Q|", style="cyan", justify="right")
    table.add_column("plain (s)", justify="right")
    table.add_column("lanes (s)", justify="right")
    table.add_column("lanes / plain", style="green", justify="right")
    table.add_column("cpre", justify="right")

    for n in (int(s) for s in sizes.split(",")):
        automaton = tradeoff_automaton(n, outputs)
        base = dict(k=k, downset=downset, bool_states="off", picker="rr")
        plain_time, plain = timed_run(automaton, SolveConfig(vector="plain", **base), repeat)
        lanes_time, lanes = timed_run(automaton, SolveConfig(vector="lanes", **base), repeat)
        if plain.realizable != lanes.realizable:
            console.print(f"[red]Backends disagree on |Q|={n}[/red]")
        table.add_row(str(n), f"{plain_time:.3f}", f"{lanes_time:.3f}",
                      f"{lanes_time / plain_time:.2f}", str(lanes.applications))
    console.print(table)

    counts = Table(title="Input selection", border_style="blue")
    counts.add_column("Automaton", style="cyan")
    counts.add_column("pure", justify="right")
    counts.add_column("refined", justify="right", style="green")
    for unused in (1, 2, 3):
        automaton = a_unused_inputs(unused)
        pure = Solver(automaton, SolveConfig(k=k, inputs="pure", picker="rr")).run()
        refined = Solver(automaton, SolveConfig(k=k, inputs="refined", picker="rr")).run()
        counts.add_row(f"{unused} unused inputs", str(pure.applications), str(refined.applications))
    console.print(counts)


if __name__ == "__main__":
    main()
