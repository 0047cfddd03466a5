"""
Multistart quasi-Newton synthesis of composite sequences

The free parameters of an N-pulse sequence are the N areas followed by the
N-1 phases of pulses 2..N (the first phase is the reference and stays 0).
Each restart draws a Monte-Carlo start point and refines it with L-BFGS-B on
1 - F, areas boxed and phases free; the synthesized list keeps the solutions
that reach the fidelity goal, smallest total area first.

Starts are drawn on the area simplex by default: the total start area is the
target's area-scaling bound times a factor uniform in START_SCALE, split over
the pulses with flat Dirichlet weights. With biased_starts off, areas are
uniform over the area box.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .chain import (
    ChainState,
    PulseSequence,
    SystemConfig,
    TargetSpec,
    evolve_amplitudes,
    fidelity,
    overlap_fidelity,
)
from .config import SearchSettings
from .errors import NumericalError
from ..utils.logger import PulseLogger
from ..utils.parallel import run_indexed

logger = PulseLogger(__name__)

AREA_TIE_TOLERANCE = 1e-6
START_SCALE = (0.25, 2.0)  # total start area relative to the area-scaling bound
_FTOL = 1e-15


def default_restarts(n_ions: int) -> int:
    """Restart budget by chain size: 500 up to N = 6, 2000 above"""
    return 500 if n_ions <= 6 else 2000


def area_scaling_bound(kind: str, n_ions: int) -> Optional[float]:
    """Total-area ceiling in units of pi: N/2 for Dicke, N/3 for NOON targets"""
    if kind.startswith("dicke"):
        return n_ions / 2.0
    if kind.startswith("noon"):
        return n_ions / 3.0
    return None


@dataclass(frozen=True)
class SearchConfig:
    """Optimizer settings; areas, bounds and steps in units of pi"""
    n_restarts: int = 500
    fidelity_goal: float = 0.999
    max_iterations: int = 500
    gradient_step: float = 1e-6
    convergence_tol: float = 1e-9
    area_bounds: Tuple[float, float] = (0.0, 2.0)
    rng_seed: int = 2011
    workers: int = 1
    biased_starts: bool = True  # simplex starts scaled to the area-scaling bound

    def __post_init__(self):
        lower, upper = (float(v) for v in self.area_bounds)
        object.__setattr__(self, "area_bounds", (lower, upper))
        if self.n_restarts < 1:
            raise ValueError(f"n_restarts must be at least 1, got {self.n_restarts}")
        if not 0.0 < self.fidelity_goal <= 1.0:
            raise ValueError(f"fidelity_goal must lie in (0, 1], got {self.fidelity_goal}")
        if self.max_iterations < 0:
            raise ValueError(f"max_iterations must be non-negative, got {self.max_iterations}")
        if self.gradient_step <= 0 or self.convergence_tol <= 0:
            raise ValueError("gradient_step and convergence_tol must be positive")
        if lower < 0 or upper <= lower:
            raise ValueError(f"invalid area bounds {self.area_bounds}")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise ValueError(f"rng_seed must be an unsigned 64-bit integer, got {self.rng_seed}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")

    @classmethod
    def from_settings(cls, settings: SearchSettings, n_ions: int, **overrides) -> "SearchConfig":
        """
        Build from the config file section

        Args:
            settings: search section of the loaded Config
            n_ions: Chain size, used for the default restart budget
            **overrides: Command-line values; None entries are ignored
        """
        values = dict(
            n_restarts=settings.n_restarts or default_restarts(n_ions),
            fidelity_goal=settings.fidelity_goal,
            max_iterations=settings.max_iterations,
            gradient_step=settings.gradient_step,
            convergence_tol=settings.convergence_tol,
            area_bounds=(settings.area_min, settings.area_max),
            rng_seed=settings.seed,
            workers=settings.workers,
            biased_starts=settings.biased_starts,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class Solution:
    """One refined restart"""
    sequence: PulseSequence
    fidelity: float
    total_area: float
    restart_index: int
    iterations: int
    qualified: bool = True  # fidelity reached the goal


def parameter_count(n_ions: int) -> int:
    return 2 * n_ions - 1


def parameters_to_sequence(params: Sequence[float], n_ions: int) -> PulseSequence:
    """Areas then phases 2..N; the first phase is fixed to 0"""
    params = np.asarray(params, dtype=float)
    if params.size != parameter_count(n_ions):
        raise ValueError(f"expected {parameter_count(n_ions)} parameters, got {params.size}")
    areas = np.maximum(params[:n_ions], 0.0)
    phases = np.concatenate(([0.0], params[n_ions:]))
    return PulseSequence.from_pairs(zip(areas, phases))


def sequence_to_parameters(seq: PulseSequence) -> np.ndarray:
    """Inverse of parameters_to_sequence, phases taken relative to the first pulse"""
    phases = (seq.phases - seq.phases[0]) % 2.0
    return np.concatenate((seq.areas, phases[1:]))


def random_start(n_ions: int, bounds: Tuple[float, float], rng: np.random.Generator,
                 total_area: Optional[float] = None) -> np.ndarray:
    """
    Monte-Carlo start point

    Areas are uniform in bounds, or, when total_area is given, total_area split
    by flat Dirichlet weights and clipped to bounds. Free phases are uniform in
    [0, 2).
    """
    lower, upper = bounds
    if total_area is None:
        areas = rng.uniform(lower, upper, n_ions)
    else:
        areas = np.clip(total_area * rng.dirichlet(np.ones(n_ions)), lower, upper)
    phases = rng.uniform(0.0, 2.0, n_ions - 1)
    return np.concatenate((areas, phases))


def start_area_budget(target: TargetSpec, n_ions: int) -> float:
    """Reference total start area: the area-scaling bound, N/2 for targets without one"""
    bound = area_scaling_bound(target.label, n_ions)
    return n_ions / 2.0 if bound is None else bound


def _split(params: np.ndarray, n_ions: int) -> Tuple[np.ndarray, np.ndarray]:
    return params[:n_ions], np.concatenate(([0.0], params[n_ions:]))


def _evaluate(config: SystemConfig, target: TargetSpec, params: np.ndarray) -> float:
    areas, phases = _split(params, config.n_ions)
    value = overlap_fidelity(target, evolve_amplitudes(config, areas, phases))
    if not np.isfinite(value):
        raise NumericalError(f"non-finite fidelity at parameters {params}")
    return value


def objective_gradient(config: SystemConfig, target: TargetSpec, params: Sequence[float],
                       step: float = 1e-6) -> Tuple[float, np.ndarray]:
    """
    Fidelity and its central finite-difference gradient

    Args:
        config: System parameters
        target: Target state
        params: Parameter vector of length 2N - 1
        step: Finite-difference step, units of pi

    Returns:
        (fidelity, gradient)
    """
    params = np.asarray(params, dtype=float)
    if params.size != parameter_count(config.n_ions):
        raise ValueError(
            f"expected {parameter_count(config.n_ions)} parameters, got {params.size}"
        )
    value = _evaluate(config, target, params)
    gradient = np.empty_like(params)
    for i in range(params.size):
        shifted = params.copy()
        shifted[i] += step
        forward = _evaluate(config, target, shifted)
        shifted[i] -= 2.0 * step
        backward = _evaluate(config, target, shifted)
        gradient[i] = (forward - backward) / (2.0 * step)
    return value, gradient


def local_refine(config: SystemConfig, target: TargetSpec, start_params: Sequence[float],
                 search: SearchConfig, restart_index: int = 0) -> Solution:
    """
    L-BFGS-B descent on 1 - F from one start point

    Areas are boxed to search.area_bounds, phases are unbounded. The gradient
    is the central finite difference of objective_gradient. Stops when the
    projected gradient drops below search.convergence_tol, when the loss
    stops changing, or after search.max_iterations.

    Args:
        config: System parameters
        target: Target state
        start_params: Start vector of length 2N - 1
        search: Optimizer settings
        restart_index: Label stored in the returned Solution

    Returns:
        Solution with phases wrapped into [0, 2) and the fidelity recomputed
        from the final sequence
    """
    n_ions = config.n_ions
    lower, upper = search.area_bounds
    x = np.asarray(start_params, dtype=float).copy()
    if x.size != parameter_count(n_ions):
        raise ValueError(f"expected {parameter_count(n_ions)} parameters, got {x.size}")
    x[:n_ions] = np.clip(x[:n_ions], lower, upper)
    iterations = 0

    if search.max_iterations > 0:
        def loss(params: np.ndarray) -> Tuple[float, np.ndarray]:
            value, gradient = objective_gradient(config, target, params, search.gradient_step)
            return 1.0 - value, -gradient

        result = minimize(
            loss,
            x,
            jac=True,
            method="L-BFGS-B",
            bounds=[(lower, upper)] * n_ions + [(None, None)] * (n_ions - 1),
            options={
                "maxiter": search.max_iterations,
                "gtol": search.convergence_tol,
                "ftol": _FTOL,
            },
        )
        if not np.all(np.isfinite(result.x)):
            raise NumericalError(f"restart {restart_index} left the finite domain")
        x, iterations = result.x, int(result.nit)
        if not result.success:
            logger.debug(f"restart {restart_index}: {result.message}")

    sequence = parameters_to_sequence(x, n_ions)
    final_fidelity = fidelity(config, sequence, target)
    return Solution(
        sequence=sequence,
        fidelity=final_fidelity,
        total_area=sequence.total_area,
        restart_index=restart_index,
        iterations=iterations,
        qualified=final_fidelity >= search.fidelity_goal,
    )


def _run_restart(task) -> Optional[Solution]:
    config, target, search, restart_index, budget = task
    # private stream per restart: results do not depend on scheduling
    rng = np.random.default_rng([search.rng_seed, restart_index])
    total_area = budget * rng.uniform(*START_SCALE) if search.biased_starts else None
    start = random_start(config.n_ions, search.area_bounds, rng, total_area)
    try:
        solution = local_refine(config, target, start, search, restart_index)
    except NumericalError as e:
        logger.log_error(f"restart {restart_index} aborted", e)
        return None
    logger.log_restart(restart_index, solution.fidelity, solution.total_area,
                       solution.iterations)
    return solution


def _rank_key(solution: Solution) -> Tuple[int, float, int]:
    # areas are bucketed so the ordering stays a total order across near-ties
    return (int(round(solution.total_area / AREA_TIE_TOLERANCE)), -solution.fidelity,
            solution.restart_index)


def rank_solutions(solutions: Sequence[Solution]) -> List[Solution]:
    """
    Qualifying solutions by total area, ties broken by fidelity then restart index

    Areas falling in the same AREA_TIE_TOLERANCE bucket count as tied.

    When nothing qualifies the single best-fidelity solution is returned; its
    ``qualified`` flag is False.
    """
    qualifying = [s for s in solutions if s.qualified]
    if qualifying:
        return sorted(qualifying, key=_rank_key)
    if not solutions:
        raise NumericalError("every restart failed")
    best = min(solutions, key=lambda s: (-s.fidelity, s.restart_index))
    return [best]


def synthesize(config: SystemConfig, target: TargetSpec, search: SearchConfig) -> List[Solution]:
    """
    Run search.n_restarts independent refinements and rank the results

    Returns:
        Qualifying solutions, best first; or the flagged best-fidelity fallback
    """
    if target.amplitudes.size != config.dimension:
        raise ValueError(
            f"target has {target.amplitudes.size} amplitudes, chain has {config.dimension}"
        )
    trivial = overlap_fidelity(target, ChainState.ground(config.n_ions).amplitudes)
    if trivial >= search.fidelity_goal:
        # nothing beats zero total area
        zero = parameters_to_sequence(np.zeros(parameter_count(config.n_ions)), config.n_ions)
        logger.log_solution(target.label, trivial, 0.0, True)
        return [Solution(zero, trivial, 0.0, restart_index=0, iterations=0)]

    logger.info(
        f"Synthesizing {target.label} for N={config.n_ions}: {search.n_restarts} restarts, "
        f"goal F>={search.fidelity_goal}"
    )

    budget = start_area_budget(target, config.n_ions)
    tasks = [(config, target, search, i, budget) for i in range(search.n_restarts)]
    outcomes = run_indexed(_run_restart, tasks, search.workers)
    ranked = rank_solutions([s for s in outcomes if s is not None])

    best = ranked[0]
    logger.log_solution(target.label, best.fidelity, best.total_area, best.qualified)
    if best.qualified:
        logger.info(f"{len(ranked)} of {search.n_restarts} restarts reached the goal")
    else:
        logger.warning(
            f"no restart reached F>={search.fidelity_goal}; best F={best.fidelity:.6f}"
        )
    return ranked
