"""
dickepulse - composite pulse sequences for trapped-ion Dicke and NOON states

Uniform blue-sideband pulses keep N ions and their centre-of-mass mode inside
the (N+1)-state chain |W^N_n>|n>. The package evaluates sequences exactly on
that chain, searches for minimal-area sequences reaching a target, checks the
chain model against the full ion-phonon space and measures robustness to
control errors.
"""

__version__ = "0.1.0"

from .core.chain import (
    ChainState,
    Pulse,
    PulseSequence,
    SystemConfig,
    TargetSpec,
    dicke_target,
    fidelity,
    noon_target,
)
from .core.config import Config

__all__ = [
    "ChainState",
    "Config",
    "Pulse",
    "PulseSequence",
    "SystemConfig",
    "TargetSpec",
    "dicke_target",
    "fidelity",
    "noon_target",
]
