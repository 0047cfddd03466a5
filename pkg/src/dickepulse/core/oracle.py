"""
Brute-force oracle on the full 2^N x phonon Fock space

Nothing here uses the symmetric-chain reduction: the blue-sideband generator
is assembled on every internal bitstring and phonon number, evolved with a
sparse exponential, and only then projected onto the Dicke chain. Agreement
with core.chain is the independent check of the factorization and of the
coupling formula.

Basis index = bits * (cutoff + 1) + phonons, where bit k of ``bits`` is the
state of ion k.
"""

from dataclasses import dataclass, field, asdict
from math import comb
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .chain import ChainState, Pulse, PulseSequence, SystemConfig, laguerre_assoc, pulse_propagator
from .errors import CutoffError, NumericalError
from ..utils.logger import PulseLogger

logger = PulseLogger(__name__)

MAX_ORACLE_IONS = 12
MAX_SPECTRUM_IONS = 10
DEFAULT_PHONON_BUFFER = 4
CUTOFF_LEAKAGE_LIMIT = 1e-12

# sparse Hermitian matrix on the full space
FullGenerator = sp.csr_matrix


@dataclass(frozen=True, eq=False)
class FullState:
    """Amplitudes over (internal bitstring, phonon number)"""
    amplitudes: np.ndarray
    n_ions: int
    phonon_cutoff: int

    def __post_init__(self):
        vector = np.array(self.amplitudes, dtype=complex).reshape(-1)
        expected = (2 ** self.n_ions) * (self.phonon_cutoff + 1)
        if vector.size != expected:
            raise ValueError(f"full state needs {expected} amplitudes, got {vector.size}")
        vector.setflags(write=False)
        object.__setattr__(self, "amplitudes", vector)

    @classmethod
    def ground(cls, n_ions: int, phonon_cutoff: int) -> "FullState":
        """|00...0>|0>"""
        vector = np.zeros((2 ** n_ions) * (phonon_cutoff + 1), dtype=complex)
        vector[0] = 1.0
        return cls(vector, n_ions, phonon_cutoff)

    @classmethod
    def from_components(cls, n_ions: int, phonon_cutoff: int,
                        components: Dict[Tuple[str, int], complex]) -> "FullState":
        """
        Build from {(bitstring, phonons): amplitude}; bitstring lists ions left to right
        """
        vector = np.zeros((2 ** n_ions) * (phonon_cutoff + 1), dtype=complex)
        for (label, phonons), amplitude in components.items():
            if len(label) != n_ions or set(label) - {"0", "1"}:
                raise ValueError(f"bitstring '{label}' does not describe {n_ions} ions")
            if not 0 <= phonons <= phonon_cutoff:
                raise ValueError(f"phonon number {phonons} outside 0..{phonon_cutoff}")
            bits = sum(1 << k for k, q in enumerate(label) if q == "1")
            vector[bits * (phonon_cutoff + 1) + phonons] += amplitude
        return cls(vector, n_ions, phonon_cutoff)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def grid(self) -> np.ndarray:
        """Amplitudes reshaped to (2^N, cutoff + 1)"""
        return self.amplitudes.reshape(2 ** self.n_ions, self.phonon_cutoff + 1)


@dataclass
class FactorizationReport:
    """Chain-versus-full comparison over every pulse boundary"""
    n_ions: int
    lamb_dicke: float
    phonon_cutoff: int
    pulses: int
    max_amplitude_discrepancy: float
    max_leakage: float
    max_sector_population: float
    max_norm_error: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SymmetryReport:
    """Casimir and exchange-symmetry check of the Dicke states"""
    n_ions: int
    expected_eigenvalue: float
    eigenvalues: List[float] = field(default_factory=list)
    max_casimir_residual: float = 0.0
    max_swap_residual: float = 0.0

    def passed(self, tolerance: float = 1e-10) -> bool:
        return self.max_casimir_residual < tolerance and self.max_swap_residual < tolerance

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def default_cutoff(n_ions: int) -> int:
    return n_ions + DEFAULT_PHONON_BUFFER


def _popcounts(n_ions: int) -> np.ndarray:
    states = np.arange(2 ** n_ions)
    counts = np.zeros_like(states)
    for k in range(n_ions):
        counts += (states >> k) & 1
    return counts


def build_full_generator(config: SystemConfig, pulse: Pulse, phonon_cutoff: int) -> FullGenerator:
    """
    (A pi/2) sum_k [exp(i phase pi) a^dag(eta) sigma^+_k + h.c.] on the truncated space

    <nu+1| a^dag(eta) |nu> = L^1_nu(eta^2) / sqrt(nu + 1)

    Raises:
        ValueError: cutoff leaves no room for a sideband transition
    """
    if phonon_cutoff < 1:
        raise ValueError(f"phonon cutoff must be at least 1, got {phonon_cutoff}")

    n_ions = config.n_ions
    levels = phonon_cutoff + 1
    dimension = (2 ** n_ions) * levels
    eta_sq = config.lamb_dicke ** 2

    phonons = np.arange(phonon_cutoff)
    ladder = np.array([laguerre_assoc(nu, eta_sq) / np.sqrt(nu + 1) for nu in phonons])
    coefficient = (pulse.area * np.pi / 2.0) * np.exp(1j * np.pi * pulse.phase)

    states = np.arange(2 ** n_ions)
    rows, cols, values = [], [], []
    for k in range(n_ions):
        mask = 1 << k
        unexcited = states[(states & mask) == 0]
        cols.append((unexcited[:, None] * levels + phonons[None, :]).ravel())
        rows.append(((unexcited | mask)[:, None] * levels + phonons[None, :] + 1).ravel())
        values.append(np.broadcast_to(coefficient * ladder, (unexcited.size, phonon_cutoff)).ravel())

    raising = sp.coo_matrix(
        (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dimension, dimension),
        dtype=complex,
    ).tocsr()
    return (raising + raising.conj().T).tocsr()


def _boundary_mask(n_ions: int, phonon_cutoff: int) -> np.ndarray:
    # states whose raising transition is cut off by the truncation
    grid = np.zeros((2 ** n_ions, phonon_cutoff + 1), dtype=bool)
    grid[:, phonon_cutoff] = _popcounts(n_ions) < n_ions
    return grid.ravel()


def evolve_full_trajectory(config: SystemConfig, seq: PulseSequence,
                           phonon_cutoff: Optional[int] = None) -> List[FullState]:
    """
    Full-space states from |00...0>|0> at every pulse boundary

    Returns:
        M + 1 states: the initial state and the state after each pulse

    Raises:
        CutoffError: population on truncated boundary states reached 1e-12
    """
    cutoff = default_cutoff(config.n_ions) if phonon_cutoff is None else int(phonon_cutoff)
    current = FullState.ground(config.n_ions, cutoff)
    boundary = _boundary_mask(config.n_ions, cutoff)
    trajectory = [current]

    for pulse in seq:
        generator = build_full_generator(config, pulse, cutoff)
        psi = expm_multiply(-1j * generator, current.amplitudes)
        if not np.all(np.isfinite(psi)):
            raise NumericalError(f"non-finite full-space amplitudes after pulse {pulse}")
        leakage = float(np.sum(np.abs(psi[boundary]) ** 2))
        if leakage >= CUTOFF_LEAKAGE_LIMIT:
            raise CutoffError(leakage, cutoff)
        current = FullState(psi, config.n_ions, cutoff)
        trajectory.append(current)
    return trajectory


def evolve_full(config: SystemConfig, seq: PulseSequence,
                phonon_cutoff: Optional[int] = None) -> FullState:
    """Full-space state after the whole sequence"""
    return evolve_full_trajectory(config, seq, phonon_cutoff)[-1]


def project_to_chain(full: FullState) -> Tuple[ChainState, float]:
    """
    Overlaps with |W^N_n>|n>, amplitude 1/sqrt(C(N, n)) per permutation

    Returns:
        (chain state, leakage = 1 - sum |chain|^2)
    """
    grid = full.grid()
    counts = _popcounts(full.n_ions)
    chain = np.zeros(full.n_ions + 1, dtype=complex)
    for n in range(min(full.n_ions, full.phonon_cutoff) + 1):
        chain[n] = grid[counts == n, n].sum() / np.sqrt(comb(full.n_ions, n))
    leakage = max(0.0, 1.0 - float(np.sum(np.abs(chain) ** 2)))
    return ChainState(chain), leakage


def sector_population(full: FullState) -> float:
    """Population with internal excitations != phonon number (n - nu != 0)"""
    grid = full.grid()
    counts = _popcounts(full.n_ions)
    mismatch = counts[:, None] != np.arange(full.phonon_cutoff + 1)[None, :]
    return float(np.sum(np.abs(grid[mismatch]) ** 2))


def verify_factorization(config: SystemConfig, seq: PulseSequence,
                         phonon_cutoff: Optional[int] = None) -> FactorizationReport:
    """
    Compare the projected full-space evolution with the chain propagators

    Raises:
        ValueError: more than MAX_ORACLE_IONS ions
    """
    if config.n_ions > MAX_ORACLE_IONS:
        raise ValueError(
            f"full-space oracle limited to N <= {MAX_ORACLE_IONS}, got {config.n_ions}"
        )
    cutoff = default_cutoff(config.n_ions) if phonon_cutoff is None else int(phonon_cutoff)
    trajectory = evolve_full_trajectory(config, seq, cutoff)

    propagator = np.eye(config.dimension, dtype=complex)
    discrepancy = leakage = sector = norm_error = 0.0
    for step, full in enumerate(trajectory):
        if step > 0:
            propagator = pulse_propagator(config, seq[step - 1]) @ propagator
        chain, leak = project_to_chain(full)
        discrepancy = max(discrepancy, float(np.max(np.abs(chain.amplitudes - propagator[:, 0]))))
        leakage = max(leakage, leak)
        sector = max(sector, sector_population(full))
        norm_error = max(norm_error, abs(full.norm - 1.0))

    report = FactorizationReport(
        n_ions=config.n_ions,
        lamb_dicke=config.lamb_dicke,
        phonon_cutoff=cutoff,
        pulses=len(seq),
        max_amplitude_discrepancy=discrepancy,
        max_leakage=leakage,
        max_sector_population=sector,
        max_norm_error=norm_error,
    )
    logger.debug(
        f"factorization N={config.n_ions} eta={config.lamb_dicke}: "
        f"discrepancy={discrepancy:.3e} leakage={leakage:.3e}"
    )
    return report


def raising_operator(n_ions: int) -> sp.csr_matrix:
    """J+ = sum_k sigma^+_k on the 2^N internal space"""
    states = np.arange(2 ** n_ions)
    rows, cols = [], []
    for k in range(n_ions):
        mask = 1 << k
        unexcited = states[(states & mask) == 0]
        rows.append(unexcited | mask)
        cols.append(unexcited)
    rows_all = np.concatenate(rows)
    data = np.ones(rows_all.size)
    return sp.coo_matrix(
        (data, (rows_all, np.concatenate(cols))), shape=(2 ** n_ions, 2 ** n_ions)
    ).tocsr()


def casimir_operator(n_ions: int) -> sp.csr_matrix:
    """J^2 = (J+ J- + J- J+)/2 + Jz^2 on the internal space"""
    raising = raising_operator(n_ions)
    lowering = raising.T.tocsr()
    jz = sp.diags(_popcounts(n_ions) - n_ions / 2.0)
    return (0.5 * (raising @ lowering + lowering @ raising) + jz @ jz).tocsr()


def dicke_internal_state(n_ions: int, excitations: int) -> np.ndarray:
    """|W^N_n> on the 2^N internal space"""
    if not 0 <= excitations <= n_ions:
        raise ValueError(f"excitation number {excitations} outside 0..{n_ions}")
    vector = np.zeros(2 ** n_ions, dtype=complex)
    vector[_popcounts(n_ions) == excitations] = 1.0 / np.sqrt(comb(n_ions, excitations))
    return vector


def _swap_permutation(n_ions: int, k: int, l: int) -> np.ndarray:
    states = np.arange(2 ** n_ions)
    bit_k = (states >> k) & 1
    bit_l = (states >> l) & 1
    differ = bit_k != bit_l
    swapped = states.copy()
    swapped[differ] ^= (1 << k) | (1 << l)
    return swapped


def symmetry_spectrum_check(n_ions: int) -> SymmetryReport:
    """
    Check J^2 |W^N_n> = (1 + N/2)(N/2) |W^N_n> and S_kl |W^N_n> = |W^N_n>

    Raises:
        ValueError: N outside 1..MAX_SPECTRUM_IONS
    """
    if not 1 <= n_ions <= MAX_SPECTRUM_IONS:
        raise ValueError(f"symmetry check limited to 1 <= N <= {MAX_SPECTRUM_IONS}, got {n_ions}")

    expected = (1.0 + n_ions / 2.0) * (n_ions / 2.0)
    casimir = casimir_operator(n_ions)
    swaps = [_swap_permutation(n_ions, k, l)
             for k in range(n_ions) for l in range(k + 1, n_ions)]

    report = SymmetryReport(n_ions=n_ions, expected_eigenvalue=expected)
    for n in range(n_ions + 1):
        state = dicke_internal_state(n_ions, n)
        image = casimir @ state
        report.eigenvalues.append(float(np.real(np.vdot(state, image))))
        report.max_casimir_residual = max(
            report.max_casimir_residual, float(np.max(np.abs(image - expected * state)))
        )
        for permutation in swaps:
            report.max_swap_residual = max(
                report.max_swap_residual, float(np.max(np.abs(state[permutation] - state)))
            )
    logger.log_check(f"J^2 eigenvalue N={n_ions}", report.max_casimir_residual, 1e-10)
    return report


def casimir_commutator_norm(config: SystemConfig, pulse: Pulse, phonon_cutoff: int) -> float:
    """||[J^2 x 1, G]||_max for one pulse generator"""
    generator = build_full_generator(config, pulse, phonon_cutoff)
    casimir = sp.kron(casimir_operator(config.n_ions), sp.identity(phonon_cutoff + 1)).tocsr()
    commutator = (casimir @ generator - generator @ casimir).tocsr()
    commutator.eliminate_zeros()
    if commutator.nnz == 0:
        return 0.0
    return float(np.max(np.abs(commutator.data)))
