"""
Job description assembled by the command line
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .chain import SystemConfig, TargetSpec, dicke_target, noon_target
from .optimizer import SearchConfig
from ..utils.storage import load_target

TARGET_HELP = "dicke[:<n>] | noon[:free] | custom:<file>"


@dataclass(frozen=True)
class JobSpec:
    """System, target and (for synthesis) search settings of one run"""
    system: SystemConfig
    target: TargetSpec
    search: Optional[SearchConfig] = None
    out: Optional[Path] = None

    def __post_init__(self):
        if self.target.amplitudes.size != self.system.dimension:
            raise ValueError(
                f"target '{self.target.label}' has {self.target.amplitudes.size} amplitudes, "
                f"N={self.system.n_ions} needs {self.system.dimension}"
            )


def parse_target(text: str, n_ions: int) -> TargetSpec:
    """
    Resolve a target string

    "dicke" alone means n = floor(N/2). "noon" scores against relative phase
    0; "noon:free" maximizes over the relative phase of the two components.
    "custom:<file>" reads a JSON amplitude file.

    Raises:
        ValueError: unknown kind or bad excitation number
        SequenceFormatError: unreadable custom target file
    """
    kind, _, argument = text.strip().partition(":")
    kind = kind.lower()

    if kind == "dicke":
        if not argument:
            return dicke_target(n_ions, n_ions // 2)
        try:
            excitations = int(argument)
        except ValueError:
            raise ValueError(f"Dicke excitation number must be an integer, got '{argument}'")
        return dicke_target(n_ions, excitations)

    if kind == "noon":
        option = argument.strip().lower()
        if option not in ("", "fixed", "free"):
            raise ValueError(f"unknown NOON option '{argument}' (use 'noon' or 'noon:free')")
        return noon_target(n_ions, phase_free=option == "free")

    if kind == "custom":
        if not argument:
            raise ValueError("custom target needs a file: custom:<file>")
        target = load_target(Path(argument))
        if target.amplitudes.size != n_ions + 1:
            raise ValueError(
                f"custom target has {target.amplitudes.size} amplitudes, N={n_ions} needs {n_ions + 1}"
            )
        return target

    raise ValueError(f"unknown target '{text}' (use {TARGET_HELP})")
