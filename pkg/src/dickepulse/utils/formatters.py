"""
Human-readable output: sequence tables in units of pi and pass/fail marks
"""

from typing import Iterable, List, Sequence

from colorama import Fore, Style
from tabulate import tabulate

from ..core.chain import ChainState, PulseSequence
from ..core.optimizer import Solution
from ..core.robustness import RobustnessCurve

TABLE_FORMAT = "github"


def fmt3(value: float) -> str:
    """Three decimals, the precision of the printed sequence tables"""
    return f"{value:.3f}"


def sequence_line(seq: PulseSequence) -> str:
    """'A1, phi1; A2, phi2; ...' in units of pi"""
    return "; ".join(f"{fmt3(p.area)}, {fmt3(p.phase)}" for p in seq)


def sequence_table(seq: PulseSequence) -> str:
    rows = [[k, fmt3(p.area), fmt3(p.phase)] for k, p in enumerate(seq, start=1)]
    rows.append(["total", fmt3(seq.total_area), ""])
    return tabulate(rows, headers=["k", "A_k / pi", "phi_k / pi"], tablefmt=TABLE_FORMAT)


def solutions_table(solutions: Sequence[Solution], limit: int = 5) -> str:
    rows = [
        [rank, fmt3(s.total_area), f"{s.fidelity:.6f}", s.restart_index, sequence_line(s.sequence)]
        for rank, s in enumerate(solutions[:limit])
    ]
    return tabulate(rows, headers=["rank", "A_tot / pi", "fidelity", "restart", "A_k, phi_k"],
                    tablefmt=TABLE_FORMAT)


def populations_table(state: ChainState) -> str:
    rows = [[n, f"{state.magnetic_number(n):+.1f}", f"{p:.6f}"]
            for n, p in enumerate(state.populations())]
    return tabulate(rows, headers=["n", "m", "population"], tablefmt=TABLE_FORMAT)


def curve_table(curve: RobustnessCurve) -> str:
    rows = [[f"{s:g}", f"{m:.6f}", f"{sd:.2e}", f"{lo:.6f}"] for s, m, sd, lo in curve.to_rows()]
    return tabulate(rows, headers=["sigma", "mean F", "std F", "min F"], tablefmt=TABLE_FORMAT)


def generic_table(rows: Iterable[List[object]], headers: List[str]) -> str:
    return tabulate(list(rows), headers=headers, tablefmt=TABLE_FORMAT)


def status(passed: bool, color: bool = True) -> str:
    """PASS / FAIL, coloured for terminals"""
    text = "PASS" if passed else "FAIL"
    if not color:
        return text
    return f"{Fore.GREEN if passed else Fore.RED}{text}{Style.RESET_ALL}"
