"""
Exception types raised by dickepulse

Argument errors use the builtin ValueError; the classes here mark failures the
command line maps to distinct exit codes.
"""

from typing import Optional


class DickePulseError(Exception):
    """Base class for dickepulse errors"""


class SequenceFormatError(DickePulseError, ValueError):
    """A sequence, solutions or target file could not be parsed"""

    def __init__(self, message: str, source: Optional[str] = None,
                 field: Optional[str] = None, line: Optional[int] = None):
        self.source = source
        self.field = field
        self.line = line

        location = []
        if source:
            location.append(str(source))
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class NumericalError(DickePulseError, ArithmeticError):
    """Non-finite values or a failed decomposition"""


class CutoffError(NumericalError):
    """Population reached the truncated edge of the phonon Fock space"""

    def __init__(self, leakage: float, cutoff: int):
        self.leakage = leakage
        self.cutoff = cutoff
        super().__init__(
            f"phonon cutoff {cutoff} too small: boundary population {leakage:.3e}"
        )
