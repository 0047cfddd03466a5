"""
Wall-clock duration of a sequence at the maximum sideband coupling
"""

from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional

import numpy as np

DEFAULT_COUPLING_FRACTION = 0.1


@dataclass(frozen=True)
class TimingReport:
    """
    Durations for a sequence of total area A (units of pi)

    g = coupling_fraction * trap_frequency; a pulse of area A pi lasts A pi / g.
    """
    total_area: float
    trap_frequency: float
    coupling_g: float
    duration_us: float
    pi_pulse_us: float
    n_ions: Optional[int] = None
    dicke_bound_us: Optional[float] = None
    noon_bound_us: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def coupling_strength(trap_frequency: float,
                      coupling_fraction: float = DEFAULT_COUPLING_FRACTION) -> float:
    """Maximum coupling g in rad/s"""
    if trap_frequency <= 0.0:
        raise ValueError(f"trap frequency must be positive, got {trap_frequency}")
    if not 0.0 < coupling_fraction <= 1.0:
        raise ValueError(f"coupling fraction must lie in (0, 1], got {coupling_fraction}")
    return coupling_fraction * trap_frequency


def timing_report(total_area: float, trap_frequency: float,
                  coupling_fraction: float = DEFAULT_COUPLING_FRACTION,
                  n_ions: Optional[int] = None) -> TimingReport:
    """
    Build a timing report

    Args:
        total_area: Sum of pulse areas, units of pi
        trap_frequency: Trap frequency in rad/s
        coupling_fraction: g / trap_frequency
        n_ions: When given, the Dicke (N/2) T_pi and NOON (N/3) T_pi bounds are added

    Returns:
        TimingReport with durations in microseconds
    """
    if total_area < 0.0:
        raise ValueError(f"total area must be non-negative, got {total_area}")
    g = coupling_strength(trap_frequency, coupling_fraction)
    pi_pulse_us = np.pi / g * 1e6

    dicke_bound = noon_bound = None
    if n_ions is not None:
        if n_ions < 1:
            raise ValueError(f"n_ions must be positive, got {n_ions}")
        dicke_bound = n_ions / 2.0 * pi_pulse_us
        noon_bound = n_ions / 3.0 * pi_pulse_us

    return TimingReport(
        total_area=float(total_area),
        trap_frequency=float(trap_frequency),
        coupling_g=g,
        duration_us=total_area * np.pi / g * 1e6,
        pi_pulse_us=pi_pulse_us,
        n_ions=n_ions,
        dicke_bound_us=dicke_bound,
        noon_bound_us=noon_bound,
    )
