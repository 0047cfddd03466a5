"""
Symmetric Dicke chain model

N ions driven uniformly on the first blue sideband of the centre-of-mass mode
stay inside the (N+1)-state chain |W^N_n>|n>, n = 0..N. This module holds the
chain couplings, single-pulse and sequence propagators, target-state
constructors and the fidelity used by the optimizer.

Areas and phases are kept in units of pi throughout; conversion to radians
happens only where the generator is built. The raising element of a pulse
carries exp(+i*phase*pi), so G(n-1, n) = (A*pi/2) * (lambda/g) * exp(-i*phase*pi).
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import NumericalError
from ..utils.logger import PulseLogger

logger = PulseLogger(__name__)

NORM_TOLERANCE = 1e-12

# Hermitian (N+1)x(N+1) generator, tridiagonal with zero diagonal
GeneratorMatrix = np.ndarray


class Sideband(str, Enum):
    """Motional sideband the laser is tuned to (red is reserved, not modelled)"""
    BLUE = "blue"


@dataclass(frozen=True)
class SystemConfig:
    """Ion chain and trap parameters"""
    n_ions: int
    lamb_dicke: float = 0.0
    trap_frequency: float = 4.0e6  # rad/s, used only for durations
    sideband: Sideband = Sideband.BLUE

    def __post_init__(self):
        if int(self.n_ions) != self.n_ions or self.n_ions < 1:
            raise ValueError(f"n_ions must be a positive integer, got {self.n_ions}")
        if not np.isfinite(self.lamb_dicke) or self.lamb_dicke < 0:
            raise ValueError(f"lamb_dicke must be non-negative, got {self.lamb_dicke}")
        if not np.isfinite(self.trap_frequency) or self.trap_frequency <= 0:
            raise ValueError(
                f"trap_frequency must be positive, got {self.trap_frequency}"
            )
        object.__setattr__(self, "n_ions", int(self.n_ions))
        object.__setattr__(self, "lamb_dicke", float(self.lamb_dicke))
        object.__setattr__(self, "trap_frequency", float(self.trap_frequency))
        object.__setattr__(self, "sideband", Sideband(self.sideband))

    @property
    def dimension(self) -> int:
        """Number of chain states, N + 1"""
        return self.n_ions + 1


@dataclass(frozen=True)
class Pulse:
    """A resonant pulse: area and phase, both in units of pi"""
    area: float
    phase: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.area) or self.area < 0:
            raise ValueError(f"pulse area must be finite and non-negative, got {self.area}")
        if not np.isfinite(self.phase):
            raise ValueError(f"pulse phase must be finite, got {self.phase}")
        phase = float(self.phase) % 2.0
        if phase >= 2.0:
            phase = 0.0
        object.__setattr__(self, "area", float(self.area))
        object.__setattr__(self, "phase", phase)


@dataclass(frozen=True)
class PulseSequence:
    """Ordered composite sequence; pulse 0 is applied first"""
    pulses: Tuple[Pulse, ...]

    def __post_init__(self):
        pulses = tuple(self.pulses)
        if not pulses:
            raise ValueError("a pulse sequence needs at least one pulse")
        if not all(isinstance(p, Pulse) for p in pulses):
            raise ValueError("pulse sequence entries must be Pulse instances")
        object.__setattr__(self, "pulses", pulses)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "PulseSequence":
        """Build from (area, phase) pairs in units of pi"""
        return cls(tuple(Pulse(float(a), float(phi)) for a, phi in pairs))

    def to_pairs(self) -> List[Tuple[float, float]]:
        return [(p.area, p.phase) for p in self.pulses]

    @property
    def total_area(self) -> float:
        """Sum of pulse areas in units of pi"""
        return float(sum(p.area for p in self.pulses))

    @property
    def areas(self) -> np.ndarray:
        return np.array([p.area for p in self.pulses])

    @property
    def phases(self) -> np.ndarray:
        return np.array([p.phase for p in self.pulses])

    def concatenate(self, later: "PulseSequence") -> "PulseSequence":
        """This sequence followed by ``later``"""
        return PulseSequence(self.pulses + later.pulses)

    def shift_phases(self, delta: float) -> "PulseSequence":
        """Common phase offset (units of pi) added to every pulse"""
        return PulseSequence(tuple(Pulse(p.area, p.phase + delta) for p in self.pulses))

    def __len__(self) -> int:
        return len(self.pulses)

    def __iter__(self) -> Iterator[Pulse]:
        return iter(self.pulses)

    def __getitem__(self, index: int) -> Pulse:
        return self.pulses[index]


def _frozen_vector(values) -> np.ndarray:
    vector = np.array(values, dtype=complex).reshape(-1)
    vector.setflags(write=False)
    return vector


@dataclass(frozen=True, eq=False)
class ChainState:
    """Amplitudes on |W^N_n>|n>, n = 0..N"""
    amplitudes: np.ndarray

    def __post_init__(self):
        vector = _frozen_vector(self.amplitudes)
        if vector.size < 2:
            raise ValueError("a chain state needs at least two amplitudes")
        object.__setattr__(self, "amplitudes", vector)

    @classmethod
    def ground(cls, n_ions: int) -> "ChainState":
        """The initial state |00...0>|0>"""
        vector = np.zeros(n_ions + 1, dtype=complex)
        vector[0] = 1.0
        return cls(vector)

    @property
    def n_ions(self) -> int:
        return self.amplitudes.size - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def populations(self) -> np.ndarray:
        """|amplitude|^2 per chain index"""
        return np.abs(self.amplitudes) ** 2

    def magnetic_number(self, n: int) -> float:
        """m_j = n - N/2 of chain index n (j = N/2)"""
        return n - self.n_ions / 2.0


@dataclass(frozen=True, eq=False)
class TargetSpec:
    """Normalized target amplitudes on the chain"""
    amplitudes: np.ndarray
    label: str = "custom"
    phase_free: bool = False  # fidelity maximized over the relative phase

    def __post_init__(self):
        vector = _frozen_vector(self.amplitudes)
        if vector.size < 2:
            raise ValueError("a target needs at least two amplitudes")
        norm_sq = float(np.sum(np.abs(vector) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"target amplitudes are not normalized (|t|^2 = {norm_sq!r})")
        object.__setattr__(self, "amplitudes", vector)

    @property
    def n_ions(self) -> int:
        return self.amplitudes.size - 1

    def support(self) -> np.ndarray:
        """Chain indices with non-zero amplitude"""
        return np.flatnonzero(np.abs(self.amplitudes) > 0.0)


def laguerre_assoc(n: int, x: float) -> float:
    """
    Generalized Laguerre polynomial L^1_n(x)

    Uses the three-term recurrence
    (k+1) L_{k+1} = (2k + 2 - x) L_k - (k+1) L_{k-1}, L_0 = 1, L_1 = 2 - x.
    """
    if n < 0 or int(n) != n:
        raise ValueError(f"Laguerre degree must be a non-negative integer, got {n}")
    if x < 0:
        raise ValueError(f"Laguerre argument must be non-negative, got {x}")

    previous, current = 1.0, 2.0 - x
    if n == 0:
        return previous
    for k in range(1, int(n)):
        previous, current = current, ((2 * k + 2 - x) * current - (k + 1) * previous) / (k + 1)
    return current


@lru_cache(maxsize=128)
def _couplings(n_ions: int, lamb_dicke: float) -> np.ndarray:
    eta_sq = lamb_dicke ** 2
    values = np.array([
        laguerre_assoc(nu - 1, eta_sq) * np.sqrt(n_ions - nu + 1)
        for nu in range(1, n_ions + 1)
    ])
    values.setflags(write=False)
    return values


def chain_couplings(config: SystemConfig) -> np.ndarray:
    """
    Neighbour couplings lambda_{nu-1,nu}/g = L^1_{nu-1}(eta^2) sqrt(N - nu + 1)

    Returns:
        Read-only array, entry nu-1 couples chain indices nu-1 and nu
    """
    return _couplings(config.n_ions, config.lamb_dicke)


@lru_cache(maxsize=128)
def _ladder_spectrum(n_ions: int, lamb_dicke: float) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of the real coupling ladder K (G = (A pi/2) D K D^dag)"""
    couplings = _couplings(n_ions, lamb_dicke)
    try:
        eigenvalues, eigenvectors = eigh_tridiagonal(np.zeros(n_ions + 1), couplings)
    except (LinAlgError, ValueError) as e:
        raise NumericalError(f"chain eigendecomposition failed: {e}") from e
    eigenvalues.setflags(write=False)
    eigenvectors.setflags(write=False)
    return eigenvalues, eigenvectors


def _phase_gauge(dimension: int, phase: float) -> np.ndarray:
    # diag(exp(i n phase pi)) carries the pulse phase onto the real ladder
    return np.exp(1j * np.pi * phase * np.arange(dimension))


def build_generator(config: SystemConfig, pulse: Pulse) -> GeneratorMatrix:
    """
    Integrated blue-sideband Hamiltonian of one pulse on the chain, (1/hbar) int H dt

    Returns:
        Hermitian tridiagonal matrix with zero diagonal
    """
    couplings = chain_couplings(config)
    upper = (pulse.area * np.pi / 2.0) * couplings * np.exp(-1j * np.pi * pulse.phase)
    index = np.arange(config.n_ions)

    generator = np.zeros((config.dimension, config.dimension), dtype=complex)
    generator[index, index + 1] = upper
    generator[index + 1, index] = np.conj(upper)
    return generator


def pulse_propagator(config: SystemConfig, pulse: Pulse) -> np.ndarray:
    """
    U(A, phase) = exp(-i G) by spectral decomposition of the Hermitian generator

    The generator factors as (A pi/2) D K D^dag with K the real coupling ladder
    and D a diagonal phase matrix, so the real eigenbasis of K is shared by
    every pulse of a given system.
    """
    eigenvalues, eigenvectors = _ladder_spectrum(config.n_ions, config.lamb_dicke)
    rotation = np.exp(-1j * (pulse.area * np.pi / 2.0) * eigenvalues)
    core = (eigenvectors * rotation) @ eigenvectors.T
    gauge = _phase_gauge(config.dimension, pulse.phase)
    propagator = gauge[:, None] * core * np.conj(gauge)[None, :]

    if not np.all(np.isfinite(propagator)):
        raise NumericalError(f"non-finite propagator for pulse {pulse}")
    return propagator


def sequence_propagator(config: SystemConfig, seq: PulseSequence) -> np.ndarray:
    """U_tot = U_M ... U_2 U_1, pulse 1 applied first"""
    total = np.eye(config.dimension, dtype=complex)
    for pulse in seq:
        total = pulse_propagator(config, pulse) @ total
    return total


def evolve_amplitudes(config: SystemConfig, areas: Sequence[float], phases: Sequence[float],
                      initial: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Kernel behind evolve_state on raw parameter arrays

    Areas may be negative here (a pulse of area -A equals area A with the
    phase advanced by one), which lets finite differences straddle A = 0.

    Args:
        config: System parameters
        areas: Pulse areas, units of pi
        phases: Pulse phases, units of pi
        initial: Starting amplitudes; the ground state when omitted

    Returns:
        Final amplitudes
    """
    if initial is None:
        psi = np.zeros(config.dimension, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.array(initial, dtype=complex)

    eigenvalues, eigenvectors = _ladder_spectrum(config.n_ions, config.lamb_dicke)
    for area, phase in zip(areas, phases):
        gauge = _phase_gauge(config.dimension, phase)
        rotation = np.exp(-1j * (area * np.pi / 2.0) * eigenvalues)
        psi = gauge * (eigenvectors @ (rotation * (eigenvectors.T @ (np.conj(gauge) * psi))))

    if not np.all(np.isfinite(psi)):
        raise NumericalError("non-finite amplitudes after evolution")
    return psi


def evolve_state(config: SystemConfig, seq: PulseSequence,
                 initial: Optional[ChainState] = None) -> ChainState:
    """
    Apply a sequence to a chain state (the ground state by default)

    Works on the state vector, O(N^2) per pulse, without forming U_tot.
    """
    start = None
    if initial is not None:
        if initial.amplitudes.size != config.dimension:
            raise ValueError(
                f"state has {initial.amplitudes.size} amplitudes, chain has {config.dimension}"
            )
        start = initial.amplitudes
    return ChainState(evolve_amplitudes(config, seq.areas, seq.phases, start))


def populations(state: ChainState) -> np.ndarray:
    return state.populations()


def dicke_target(n_ions: int, excitations: int) -> TargetSpec:
    """The chain basis state |W^N_n>|n>"""
    if n_ions < 1:
        raise ValueError(f"n_ions must be positive, got {n_ions}")
    if not 0 <= excitations <= n_ions:
        raise ValueError(f"excitation number {excitations} outside 0..{n_ions}")
    vector = np.zeros(n_ions + 1, dtype=complex)
    vector[excitations] = 1.0
    return TargetSpec(vector, label=f"dicke:{excitations}")


def noon_target(n_ions: int, phase_free: bool = False) -> TargetSpec:
    """(|W^N_0>|0> + |W^N_N>|N>)/sqrt(2); relative phase zero unless phase_free"""
    if n_ions < 1:
        raise ValueError(f"n_ions must be positive, got {n_ions}")
    vector = np.zeros(n_ions + 1, dtype=complex)
    vector[0] = vector[n_ions] = 1.0 / np.sqrt(2.0)
    return TargetSpec(vector, label="noon:free" if phase_free else "noon", phase_free=phase_free)


def superposition_target(n_ions: int, weights: Dict[int, complex],
                         phase_free: bool = False) -> TargetSpec:
    """
    Normalized superposition of chain states

    Args:
        n_ions: Number of ions N
        weights: Unnormalized amplitude per excitation number
        phase_free: Maximize fidelity over the relative phase (two components only)
    """
    vector = np.zeros(n_ions + 1, dtype=complex)
    for n, amplitude in weights.items():
        if not 0 <= n <= n_ions:
            raise ValueError(f"excitation number {n} outside 0..{n_ions}")
        vector[n] = amplitude
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise ValueError("superposition has zero norm")
    vector = vector / norm
    # renormalize once more so |t|^2 sits on 1 to machine precision
    vector = vector / np.linalg.norm(vector)
    label = "superposition:" + ",".join(str(n) for n in sorted(weights))
    return TargetSpec(vector, label=label, phase_free=phase_free)


def custom_target(amplitudes: Sequence[complex], label: str = "custom",
                  phase_free: bool = False) -> TargetSpec:
    """
    Target from user amplitudes

    Deviations of |t|^2 from one up to 1e-9 are renormalized silently, up to
    1e-3 with a warning; larger deviations are rejected.
    """
    vector = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if vector.size < 2:
        raise ValueError("a target needs at least two amplitudes")
    if not np.all(np.isfinite(vector)):
        raise ValueError("target amplitudes must be finite")

    norm_sq = float(np.sum(np.abs(vector) ** 2))
    deviation = abs(norm_sq - 1.0)
    if deviation > 1e-3:
        raise ValueError(f"target amplitudes are far from normalized (|t|^2 = {norm_sq:.6g})")
    if deviation > 1e-9:
        logger.warning(f"renormalizing target '{label}' (|t|^2 = {norm_sq:.12g})")

    vector = vector / np.sqrt(norm_sq)
    vector = vector / np.linalg.norm(vector)
    return TargetSpec(vector, label=label, phase_free=phase_free)


def _check_dimensions(config: SystemConfig, target: TargetSpec) -> None:
    if target.amplitudes.size != config.dimension:
        raise ValueError(
            f"target has {target.amplitudes.size} amplitudes, chain has {config.dimension}"
        )


def _phase_free_overlap(target: TargetSpec, amplitudes: np.ndarray) -> float:
    support = target.support()
    if support.size == 1:
        return float(abs(np.conj(target.amplitudes[support[0]]) * amplitudes[support[0]]) ** 2)
    if support.size == 2:
        i, j = support
        value = (abs(target.amplitudes[i] * amplitudes[i])
                 + abs(target.amplitudes[j] * amplitudes[j])) ** 2
        return float(value)
    raise ValueError(
        f"relative-phase maximization needs at most two target components, got {support.size}"
    )


def overlap_fidelity(target: TargetSpec, amplitudes: np.ndarray) -> float:
    """|<t|psi>|^2, or the phase-maximized value when the target is phase free"""
    if target.phase_free:
        value = _phase_free_overlap(target, amplitudes)
    else:
        value = float(abs(np.vdot(target.amplitudes, amplitudes)) ** 2)
    return min(1.0, max(0.0, value))


def fidelity(config: SystemConfig, seq: PulseSequence, target: TargetSpec) -> float:
    """F = |<t| U_tot |00...0>|0>|^2"""
    _check_dimensions(config, target)
    return overlap_fidelity(target, evolve_state(config, seq).amplitudes)


def phase_maximized_fidelity(config: SystemConfig, seq: PulseSequence,
                             target: TargetSpec) -> float:
    """Fidelity maximized over the relative phase of a two-component target"""
    _check_dimensions(config, target)
    state = evolve_state(config, seq)
    return min(1.0, max(0.0, _phase_free_overlap(target, state.amplitudes)))


