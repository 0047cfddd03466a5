"""
Command line interface for dickepulse
"""

import io
import sys
import traceback
from dataclasses import replace
from pathlib import Path
from typing import Optional, Tuple

import click
import numpy as np

from .core.chain import (
    PulseSequence,
    SystemConfig,
    TargetSpec,
    evolve_state,
    fidelity,
    overlap_fidelity,
    phase_maximized_fidelity,
)
from .core.config import Config
from .core.errors import NumericalError
from .core.jobs import TARGET_HELP, JobSpec, parse_target
from .core.optimizer import SearchConfig, area_scaling_bound, random_start, parameters_to_sequence, synthesize
from .core.oracle import symmetry_spectrum_check, verify_factorization, MAX_SPECTRUM_IONS
from .core.robustness import NoiseMode, NoiseModel, fidelity_vs_sigma
from .core.tables import TableRow, all_rows, parse_row_key
from .core.timing import timing_report
from .utils.formatters import (
    curve_table,
    fmt3,
    generic_table,
    populations_table,
    sequence_table,
    solutions_table,
    status,
)
from .utils.logger import setup_logging
from .utils.storage import (
    SequenceRecord,
    load_sequence,
    save_report,
    save_solutions,
    write_curve_csv,
)

EXIT_OK = 0
EXIT_NOT_ACHIEVED = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

REPLAY_FLOOR = 0.98


def _prepare(config_path: Optional[Path], debug: bool) -> Config:
    """Load (or default) the configuration, validate it and start logging"""
    cfg = Config.load(config_path) if config_path else Config.create_default()
    errors = cfg.validate()
    if errors:
        raise ValueError("invalid configuration: " + "; ".join(errors))
    setup_logging(cfg.logging, debug)
    return cfg


def _fail(context: str, error: Exception, debug: bool) -> None:
    if isinstance(error, NumericalError):
        code = EXIT_NUMERICAL
    elif isinstance(error, (ValueError, FileNotFoundError)):
        code = EXIT_INPUT
    else:
        code = EXIT_NOT_ACHIEVED
    click.echo(f"Error {context}: {error}", err=True)
    if debug:
        traceback.print_exc()
    sys.exit(code)


def _resolve_source(sequence_file: Optional[Path], index: int, table_row: Optional[str],
                    ions: Optional[int], eta: Optional[float], cfg: Config
                    ) -> Tuple[SystemConfig, PulseSequence, Optional[TableRow], Optional[SequenceRecord]]:
    """
    System and sequence from a file, a solutions entry or a built-in table row

    Returns:
        (system, sequence, table row or None, file record or None)
    """
    if sequence_file and table_row:
        raise ValueError("give either a sequence file or --paper-row, not both")

    trap = cfg.system.trap_frequency
    if table_row:
        row = parse_row_key(table_row)
        if ions is not None and ions != row.n_ions:
            raise ValueError(f"--ions {ions} conflicts with table row {row.key}")
        lamb_dicke = cfg.system.lamb_dicke if eta is None else eta
        return SystemConfig(row.n_ions, lamb_dicke, trap), row.sequence, row, None

    if sequence_file:
        record = load_sequence(sequence_file, index)
        if ions is not None and record.n_ions is not None and ions != record.n_ions:
            raise ValueError(f"--ions {ions} conflicts with n_ions={record.n_ions} in {sequence_file}")
        n_ions = ions if ions is not None else record.n_ions
        if n_ions is None:
            raise ValueError(f"{sequence_file} does not name n_ions; pass --ions")
        if eta is not None:
            lamb_dicke = eta
        elif record.n_ions is not None:
            lamb_dicke = record.lamb_dicke
        else:
            lamb_dicke = cfg.system.lamb_dicke
        return SystemConfig(n_ions, lamb_dicke, trap), record.sequence, None, record

    raise ValueError("no sequence given: pass a sequence file or --paper-row kind:N")


def _resolve_target(target: Optional[str], system: SystemConfig, row: Optional[TableRow],
                    record: Optional[SequenceRecord]) -> TargetSpec:
    """--target first, then the row's own target, then the one stored with the sequence"""
    if target:
        return parse_target(target, system.n_ions)
    if row is not None:
        return row.target()
    if record is not None and record.target is not None:
        if record.target.amplitudes.size != system.dimension:
            raise ValueError(
                f"stored target '{record.target.label}' has {record.target.amplitudes.size} "
                f"amplitudes, N={system.n_ions} needs {system.dimension}"
            )
        return record.target
    if record is not None and record.target_label:
        if record.target_label.startswith(("custom", "superposition")):
            raise ValueError(
                f"stored target '{record.target_label}' has no amplitudes; pass --target"
            )
        return parse_target(record.target_label, system.n_ions)
    return parse_target("dicke", system.n_ions)


def _default_output(cfg: Config, stem: str, suffix: str) -> Path:
    safe = stem.replace(":", "").replace("/", "_")
    return Path(cfg.output.directory) / f"{safe}{suffix}"


config_option = click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Configuration file path (defaults are used when omitted)",
)
debug_option = click.option("--debug", "-d", is_flag=True, help="Enable debug logging")
sequence_argument = click.argument(
    "sequence_file", required=False, type=click.Path(dir_okay=False, path_type=Path)
)
table_row_option = click.option(
    "--paper-row", "--table-row", "table_row", help="Built-in table row, e.g. dicke:6 or noon:4"
)
index_option = click.option(
    "--index", type=int, default=0, show_default=True,
    help="Entry of a solutions file (0 is the best solution)",
)
eta_option = click.option("--eta", type=float, default=None, help="Lamb-Dicke parameter")


@click.group()
@click.version_option(package_name="dickepulse")
def main():
    """dickepulse - composite pulse sequences for Dicke and NOON states of trapped ions"""
    pass


@main.command("init-config")
@click.option(
    "--output",
    "-o",
    type=click.Path(path_type=Path),
    default="config/dickepulse.yaml",
    help="Output configuration file path",
)
def init_config(output: Path):
    """Generate a default configuration file"""
    try:
        config = Config.create_default()
        config.save(output)
        click.echo(f"Default configuration saved to {output}")
    except Exception as e:
        click.echo(f"Error creating configuration: {e}", err=True)
        sys.exit(EXIT_NOT_ACHIEVED)


@main.command("synthesize")
@click.option("--ions", "-n", type=int, required=True, help="Number of ions N")
@eta_option
@click.option("--target", "-t", default="dicke", show_default=True, help=TARGET_HELP)
@click.option("--restarts", type=int, default=None, help="Monte-Carlo restarts")
@click.option("--seed", type=int, default=None, help="Random seed")
@click.option("--fidelity-goal", type=float, default=None, help="Fidelity a solution must reach")
@click.option("--max-iterations", type=int, default=None, help="Quasi-Newton iterations per restart")
@click.option("--workers", type=int, default=None, help="Worker processes")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Solutions file (JSON)")
@click.option("--show", type=int, default=5, show_default=True, help="Solutions to print")
@config_option
@debug_option
def synthesize_cmd(ions: int, eta: Optional[float], target: str, restarts: Optional[int],
                   seed: Optional[int], fidelity_goal: Optional[float],
                   max_iterations: Optional[int], workers: Optional[int], out: Optional[Path],
                   show: int, config_path: Optional[Path], debug: bool):
    """Search for minimal-area sequences reaching a target state"""
    try:
        cfg = _prepare(config_path, debug)
        system = SystemConfig(ions, cfg.system.lamb_dicke if eta is None else eta,
                              cfg.system.trap_frequency)
        job = JobSpec(
            system=system,
            target=parse_target(target, ions),
            search=SearchConfig.from_settings(
                cfg.search, ions,
                n_restarts=restarts,
                rng_seed=seed,
                fidelity_goal=fidelity_goal,
                max_iterations=max_iterations,
                workers=workers,
            ),
            out=out or _default_output(cfg, f"solutions_{target}_N{ions}", ".json"),
        )

        solutions = synthesize(job.system, job.target, job.search)
        save_solutions(solutions, job.out, job.system, job.target, job.search.fidelity_goal)

        best = solutions[0]
        click.echo(solutions_table(solutions, show))
        click.echo()
        click.echo(sequence_table(best.sequence))
        click.echo()
        click.echo(f"Target:   {job.target.label} (N={ions}, eta={system.lamb_dicke:g})")
        click.echo(f"Best A_tot: {fmt3(best.total_area)} pi   fidelity: {best.fidelity:.6f}")
        bound = area_scaling_bound(job.target.label, ions)
        if bound is not None:
            click.echo(f"Area bound {fmt3(bound)} pi: {status(best.total_area <= bound)}")
        click.echo(f"Solutions written to {job.out}")

        if not best.qualified:
            click.echo(
                f"No solution reached F >= {job.search.fidelity_goal}; best-fidelity fallback written",
                err=True,
            )
            sys.exit(EXIT_NOT_ACHIEVED)
    except Exception as e:
        _fail("during synthesis", e, debug)


@main.command("replay")
@sequence_argument
@table_row_option
@index_option
@click.option("--ions", "-n", type=int, default=None, help="Number of ions N")
@eta_option
@click.option("--target", "-t", default=None, help=TARGET_HELP)
@click.option("--fidelity-goal", type=float, default=None,
              help="Exit with status 1 when the fidelity stays below this value")
@config_option
@debug_option
def replay(sequence_file: Optional[Path], table_row: Optional[str], index: int,
           ions: Optional[int], eta: Optional[float], target: Optional[str],
           fidelity_goal: Optional[float], config_path: Optional[Path], debug: bool):
    """Evaluate a stored sequence against a target"""
    try:
        cfg = _prepare(config_path, debug)
        system, seq, row, record = _resolve_source(sequence_file, index, table_row, ions, eta, cfg)
        spec = _resolve_target(target, system, row, record)

        value = fidelity(system, seq, spec)
        state = evolve_state(system, seq)

        click.echo(sequence_table(seq))
        click.echo()
        click.echo(populations_table(state))
        click.echo()
        click.echo(f"Target:   {spec.label} (N={system.n_ions}, eta={system.lamb_dicke:g})")
        click.echo(f"Fidelity: {value:.6f}")
        if spec.support().size == 2:
            fixed = overlap_fidelity(replace(spec, phase_free=False), state.amplitudes)
            click.echo(f"Fixed-phase fidelity: {fixed:.6f}")
            click.echo(f"Phase-maximized fidelity: {phase_maximized_fidelity(system, seq, spec):.6f}")
        if row is not None:
            click.echo(f"Printed A_tot: {row.total_area:.2f} pi   recomputed: {fmt3(seq.total_area)} pi")

        if fidelity_goal is not None and value < fidelity_goal:
            click.echo(f"Fidelity below {fidelity_goal}", err=True)
            sys.exit(EXIT_NOT_ACHIEVED)
    except Exception as e:
        _fail("during replay", e, debug)


@main.command("verify")
@sequence_argument
@table_row_option
@index_option
@click.option("--ions", "-n", type=int, default=None, help="Number of ions N")
@eta_option
@click.option("--phonon-cutoff", type=int, default=None,
              help="Highest phonon number kept (default N + oracle.phonon_buffer)")
@click.option("--seed", type=int, default=None,
              help="Seed of the random sequence used when no sequence is given")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Report file (JSON)")
@config_option
@debug_option
def verify(sequence_file: Optional[Path], table_row: Optional[str], index: int,
           ions: Optional[int], eta: Optional[float], phonon_cutoff: Optional[int],
           seed: Optional[int], out: Optional[Path], config_path: Optional[Path], debug: bool):
    """Check the chain model against the full ion-phonon space"""
    try:
        cfg = _prepare(config_path, debug)
        if sequence_file or table_row:
            system, seq, _, _ = _resolve_source(sequence_file, index, table_row, ions, eta, cfg)
        else:
            if ions is None:
                raise ValueError("pass --ions, a sequence file or --paper-row")
            system = SystemConfig(ions, cfg.system.lamb_dicke if eta is None else eta,
                                  cfg.system.trap_frequency)
            rng = np.random.default_rng(cfg.search.seed if seed is None else seed)
            seq = parameters_to_sequence(random_start(ions, (0.0, 2.0), rng), ions)
            click.echo(f"Random sequence: {seq.to_pairs()}")

        cutoff = phonon_cutoff if phonon_cutoff is not None else system.n_ions + cfg.oracle.phonon_buffer
        factorization = verify_factorization(system, seq, cutoff)
        passed = (factorization.max_amplitude_discrepancy < cfg.oracle.discrepancy_tol
                  and factorization.max_leakage < cfg.oracle.leakage_tol)

        rows = [
            ["amplitude discrepancy", f"{factorization.max_amplitude_discrepancy:.3e}",
             f"{cfg.oracle.discrepancy_tol:g}"],
            ["chain leakage", f"{factorization.max_leakage:.3e}", f"{cfg.oracle.leakage_tol:g}"],
            ["n - nu sector population", f"{factorization.max_sector_population:.3e}", ""],
        ]

        report = {"factorization": factorization.to_dict(), "symmetry": None}
        if system.n_ions <= MAX_SPECTRUM_IONS:
            symmetry = symmetry_spectrum_check(system.n_ions)
            report["symmetry"] = symmetry.to_dict()
            rows.append(["J^2 residual", f"{symmetry.max_casimir_residual:.3e}", "1e-10"])
            rows.append(["swap residual", f"{symmetry.max_swap_residual:.3e}", "1e-10"])
            passed = passed and symmetry.passed()
        else:
            click.echo(f"Symmetry check skipped above N={MAX_SPECTRUM_IONS}", err=True)
        report["passed"] = passed

        click.echo(generic_table(rows, ["check", "value", "limit"]))
        click.echo(f"N={system.n_ions} eta={system.lamb_dicke:g} cutoff={cutoff}: {status(passed)}")
        if out:
            save_report(report, out)
            click.echo(f"Report written to {out}")
        if not passed:
            sys.exit(EXIT_NOT_ACHIEVED)
    except Exception as e:
        _fail("during verification", e, debug)


@main.command("robustness")
@sequence_argument
@table_row_option
@index_option
@click.option("--ions", "-n", type=int, default=None, help="Number of ions N")
@eta_option
@click.option("--target", "-t", default=None, help=TARGET_HELP)
@click.option("--sigma", "sigmas", type=float, multiple=True,
              help="Noise level; repeat for a grid (default from config)")
@click.option("--trials", type=int, default=None, help="Perturbed sequences per sigma")
@click.option("--seed", type=int, default=None, help="Random seed")
@click.option("--mode", type=click.Choice([m.value for m in NoiseMode]), default=None,
              help="Noise model")
@click.option("--workers", type=int, default=None, help="Worker processes")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Curve file (CSV); CSV goes to stdout when omitted")
@config_option
@debug_option
def robustness(sequence_file: Optional[Path], table_row: Optional[str], index: int,
               ions: Optional[int], eta: Optional[float], target: Optional[str],
               sigmas: Tuple[float, ...], trials: Optional[int], seed: Optional[int],
               mode: Optional[str], workers: Optional[int], out: Optional[Path],
               config_path: Optional[Path], debug: bool):
    """Mean fidelity versus control-parameter noise"""
    try:
        cfg = _prepare(config_path, debug)
        system, seq, row, record = _resolve_source(sequence_file, index, table_row, ions, eta, cfg)
        spec = _resolve_target(target, system, row, record)
        settings = cfg.robustness
        model = NoiseModel(
            sigma=0.0,
            trials=settings.trials if trials is None else trials,
            rng_seed=settings.seed if seed is None else seed,
            mode=NoiseMode(mode or settings.mode),
        )
        grid = list(sigmas) if sigmas else list(settings.sigmas)
        curve = fidelity_vs_sigma(
            system, seq, spec, grid, model,
            workers=settings.workers if workers is None else workers,
            sequence_id=table_row or str(sequence_file),
        )

        if out:
            write_curve_csv(curve, out)
            click.echo(curve_table(curve))
            click.echo(f"Curve written to {out}")
        else:
            buffer = io.StringIO()
            write_curve_csv(curve, buffer)
            click.echo(buffer.getvalue(), nl=False)
    except Exception as e:
        _fail("during robustness sweep", e, debug)


@main.command("timing")
@sequence_argument
@table_row_option
@index_option
@click.option("--total-area", type=float, default=None, help="Total pulse area in units of pi")
@click.option("--ions", "-n", type=int, default=None, help="Number of ions N (adds the bounds)")
@click.option("--trap-frequency", type=float, default=None, help="Trap frequency in rad/s")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Report file (JSON)")
@config_option
@debug_option
def timing(sequence_file: Optional[Path], table_row: Optional[str], index: int,
           total_area: Optional[float], ions: Optional[int], trap_frequency: Optional[float],
           out: Optional[Path], config_path: Optional[Path], debug: bool):
    """Sequence duration at the maximum sideband coupling"""
    try:
        cfg = _prepare(config_path, debug)
        n_ions = ions
        if total_area is None:
            system, seq, _, _ = _resolve_source(sequence_file, index, table_row, ions, None, cfg)
            total_area = seq.total_area
            n_ions = system.n_ions
        elif sequence_file or table_row:
            raise ValueError("give either --total-area or a sequence, not both")

        report = timing_report(
            total_area,
            cfg.system.trap_frequency if trap_frequency is None else trap_frequency,
            cfg.timing.coupling_fraction,
            n_ions,
        )
        rows = [
            ["total area", f"{fmt3(report.total_area)} pi"],
            ["coupling g", f"{report.coupling_g:.4g} rad/s"],
            ["duration", f"{report.duration_us:.3f} us"],
            ["pi pulse", f"{report.pi_pulse_us:.3f} us"],
        ]
        if report.n_ions is not None:
            rows.append(["Dicke bound (N/2) T_pi", f"{report.dicke_bound_us:.3f} us"])
            rows.append(["NOON bound (N/3) T_pi", f"{report.noon_bound_us:.3f} us"])
        click.echo(generic_table(rows, ["quantity", "value"]))
        if out:
            save_report(report.to_dict(), out)
            click.echo(f"Report written to {out}")
    except Exception as e:
        _fail("computing timing", e, debug)


@main.command("tables")
@click.option("--kind", type=click.Choice(["dicke", "noon", "all"]), default="all",
              show_default=True, help="Which table to replay")
@eta_option
@config_option
@debug_option
def tables(kind: str, eta: Optional[float], config_path: Optional[Path], debug: bool):
    """Replay every built-in table row"""
    try:
        cfg = _prepare(config_path, debug)
        lamb_dicke = cfg.system.lamb_dicke if eta is None else eta
        rows = []
        all_passed = True
        for row in all_rows():
            if kind != "all" and row.kind != kind:
                continue
            system = SystemConfig(row.n_ions, lamb_dicke, cfg.system.trap_frequency)
            value = fidelity(system, row.sequence, row.target())
            bound = area_scaling_bound(row.kind, row.n_ions)
            passed = value >= REPLAY_FLOOR
            all_passed = all_passed and passed
            rows.append([
                row.kind, row.n_ions, row.excitation, f"{row.total_area:.2f}",
                fmt3(row.sequence.total_area), f"{value:.4f}",
                "yes" if row.sequence.total_area <= bound else "no", status(passed),
            ])
        click.echo(generic_table(
            rows, ["kind", "N", "n", "A_tot printed", "A_tot", "fidelity", "below bound", "status"]
        ))
        if not all_passed:
            sys.exit(EXIT_NOT_ACHIEVED)
    except Exception as e:
        _fail("replaying tables", e, debug)


if __name__ == "__main__":
    main()
