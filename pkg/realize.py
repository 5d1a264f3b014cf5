#!/usr/bin/env python3

import sys

import click
from rich.panel import Panel
from rich.table import Table

import config
from actions import build_actions, describe_actions
from errors import BonsaiError
from hoa_format import parse_outs, print_hoa, read_hoa_file
from pipeline import CheckMode, RunPlan, Verdict, configure_logging, err_console, run_plan
from solver import SolveConfig
from unreal import OutputShifter

console = err_console


@click.command()
@click.option('--aut', 'aut_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='HOA automaton of the negated specification, solved for realizability')
@click.option('--neg-aut', 'neg_aut_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='HOA automaton of the specification itself, used for the unrealizability check')
@click.option('--check', type=click.Choice(['real', 'unreal', 'both']), default=None,
              help='Which check to run (default: both when --neg-aut is given, real otherwise)')
@click.option('-k', '--k-initial', type=int, default=None, help=f'First k of the schedule (default: {config.K_INITIAL})')
@click.option('--k-growth', type=float, default=None, help=f'Schedule growth factor (default: {config.K_GROWTH})')
@click.option('--kmax', type=int, default=None, help=f'Largest k tried (default: {config.K_MAX})')
@click.option('--outs', default=None, help='Comma-separated output propositions; overrides controllable-AP')
@click.option('--downset', type=click.Choice(['antichain', 'full', 'kdtree', 'bins']), default=None,
              help=f'Downset backend (default: {config.DOWNSET_BACKEND})')
@click.option('--vector', type=click.Choice(['plain', 'lanes']), default=None,
              help=f'Vector backend (default: {config.VECTOR_BACKEND})')
@click.option('--bool-states', type=click.Choice(['on', 'off']), default=None,
              help=f'One-bit valuation of bounded states (default: {config.BOOL_STATES})')
@click.option('--inputs', type=click.Choice(['pure', 'refined']), default=None,
              help=f'Input selection (default: {config.INPUT_SELECTION})')
@click.option('--precompute', type=click.Choice(['on', 'off']), default=None,
              help=f'Materialize io-actions up front (default: {config.PRECOMPUTE})')
@click.option('--picker', type=click.Choice(['rr', 'critical', 'critical-pq', 'critical-randp', 'critical-randf']),
              default=None, help=f'Input-action picker (default: {config.PICKER})')
@click.option('--seed', type=int, default=None, help=f'Seed of the randomized pickers (default: {config.SEED})')
@click.option('--timeout', type=float, default=None, help=f'Wall-clock limit in seconds (default: {config.TIMEOUT})')
@click.option('--step-budget', type=int, default=None,
              help=f'cpre applications per solve before giving up (default: {config.STEP_BUDGET})')
@click.option('--trace', is_flag=True, help='Print one machine-readable line per cpre application')
@click.option('--dump-actions', is_flag=True, help='Print the terminal inputs and IOs, then exit')
@click.option('--emit-shifted', type=click.Path(dir_okay=False, writable=True), default=None,
              help='Write the output-shifted automaton of --neg-aut as HOA')
@click.option('--ltl', default=None, help='Reserved; LTL input is not supported')
@click.option('--verbose', '-v', is_flag=True, help='Debug logging on stderr')
def main(aut_path, neg_aut_path, check, k_initial, k_growth, kmax, outs, downset, vector,
         bool_states, inputs, precompute, picker, seed, timeout, step_budget, trace,
         dump_actions, emit_shifted, ltl, verbose):
    """
    Decide realizability of a Büchi automaton specification.

    Prints exactly one of REALIZABLE (exit 10), UNREALIZABLE (exit 20) or
    UNKNOWN (exit 0) on stdout. Usage and input errors exit with status 2.
    """
    log_level = "DEBUG" if verbose else config.LOG_LEVEL
    configure_logging(log_level, trace)

    if ltl is not None:
        console.print("[red]Error: LTL input is not supported[/red]")
        console.print("[yellow]Compile the formula and its negation to HOA with an external "
                      "LTL translator and pass them with --aut and --neg-aut[/yellow]")
        sys.exit(2)

    if check is None:
        check = 'both' if neg_aut_path and aut_path else ('unreal' if neg_aut_path else 'real')

    try:
        solve_cfg = SolveConfig(
            vector=vector or config.VECTOR_BACKEND,
            downset=downset or config.DOWNSET_BACKEND,
            bool_states=bool_states or config.BOOL_STATES,
            inputs=inputs or config.INPUT_SELECTION,
            precompute=precompute or config.PRECOMPUTE,
            picker=picker or config.PICKER,
            seed=config.SEED if seed is None else seed,
            step_budget=config.STEP_BUDGET if step_budget is None else step_budget,
            trace=trace,
        )
        plan = RunPlan(
            aut_path=aut_path,
            neg_aut_path=neg_aut_path,
            check=CheckMode(check),
            k_initial=config.K_INITIAL if k_initial is None else k_initial,
            k_growth=config.K_GROWTH if k_growth is None else k_growth,
            k_max=config.K_MAX if kmax is None else kmax,
            timeout=config.TIMEOUT if timeout is None else timeout,
            outs=parse_outs(outs),
            solve=solve_cfg,
        )
        # Parse up front so input errors surface here and not inside a worker.
        automaton = read_hoa_file(aut_path, plan.outs) if aut_path else None
        negated = read_hoa_file(neg_aut_path, plan.outs) if neg_aut_path else None
    except BonsaiError as e:
        console.print(f"[red]Error: {e}[/red]")
        sys.exit(2)

    if dump_actions:
        for title, aut in (("aut", automaton), ("neg-aut", negated)):
            if aut is not None:
                actions = build_actions(aut, solve_cfg.inputs, solve_cfg.precompute)
                console.print(Panel(describe_actions(aut, actions), title=f"{title}: {len(actions)} input-actions",
                                    border_style="cyan"))
        return

    if emit_shifted:
        if negated is None:
            console.print("[red]Error: --emit-shifted needs --neg-aut[/red]")
            sys.exit(2)
        shifter = OutputShifter(negated)
        with open(emit_shifted, "w") as f:
            f.write(print_hoa(shifter.shift(), name="output-shifted", pending=shifter.pending_formulas()))
        console.print(f"[green]Wrote shifted automaton ({len(shifter.states)} states) to {emit_shifted}[/green]")

    show_configuration(plan)

    try:
        verdict = run_plan(plan, log_level)
    except BonsaiError as e:
        console.print(f"[red]Error: {e}[/red]")
        sys.exit(2)
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted[/yellow]")
        verdict = Verdict.UNKNOWN

    click.echo(verdict.value)
    sys.exit(verdict.exit_code)


def show_configuration(plan: RunPlan):
    """Summarise the run on stderr."""
    table = Table(border_style="blue", show_header=False)
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")
    cfg = plan.solve
    table.add_row("Check", plan.check.value)
    table.add_row("Automaton", str(plan.aut_path))
    table.add_row("Negated automaton", str(plan.neg_aut_path))
    table.add_row("k schedule", ", ".join(str(k) for k in plan.schedule()))
    table.add_row("Downset / vectors", f"{cfg.downset.value} / {cfg.vector}")
    table.add_row("Boolean states", "on" if cfg.bool_states else "off")
    table.add_row("Inputs / precompute", f"{cfg.inputs.value} / {'on' if cfg.precompute else 'off'}")
    table.add_row("Picker / seed", f"{cfg.picker.value} / {cfg.seed}")
    table.add_row("Timeout", f"{plan.timeout:g}s")
    console.print(Panel.fit(table, title="[bold blue]Backward realizability[/bold blue]", border_style="blue"))


if __name__ == "__main__":
    main()
