"""
Monte-Carlo sensitivity of a sequence to area and phase errors
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .chain import Pulse, PulseSequence, SystemConfig, TargetSpec, fidelity
from ..utils.logger import PulseLogger
from ..utils.parallel import run_indexed

logger = PulseLogger(__name__)

TRIAL_BLOCK = 250


class NoiseMode(str, Enum):
    """How phases are perturbed; areas are always perturbed relatively"""
    RELATIVE_AREA_ABSOLUTE_PHASE = "relative_area_absolute_phase"
    RELATIVE_BOTH = "relative_both"


@dataclass(frozen=True)
class NoiseModel:
    """
    Gaussian control-parameter jitter

    In the default mode phase jitter has standard deviation sigma in units of
    pi (sigma * pi radians).
    """
    sigma: float = 0.0
    trials: int = 1000
    rng_seed: int = 7
    mode: NoiseMode = NoiseMode.RELATIVE_AREA_ABSOLUTE_PHASE

    def __post_init__(self):
        if self.sigma < 0.0 or not np.isfinite(self.sigma):
            raise ValueError(f"sigma must be a non-negative number, got {self.sigma}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        object.__setattr__(self, "mode", NoiseMode(self.mode))

    def with_sigma(self, sigma: float) -> "NoiseModel":
        return replace(self, sigma=float(sigma))


@dataclass(frozen=True)
class CurvePoint:
    sigma: float
    mean_fidelity: float
    std_fidelity: float
    min_fidelity: float


@dataclass(frozen=True)
class RobustnessCurve:
    """Fidelity statistics per sigma, sorted by sigma"""
    points: Tuple[CurvePoint, ...]
    sequence_id: str
    target_id: str
    trials: int = 0

    def to_rows(self) -> List[Tuple[float, float, float, float]]:
        return [(p.sigma, p.mean_fidelity, p.std_fidelity, p.min_fidelity) for p in self.points]

    def means(self) -> np.ndarray:
        return np.array([p.mean_fidelity for p in self.points])

    def standard_errors(self) -> np.ndarray:
        scale = np.sqrt(max(self.trials, 1))
        return np.array([p.std_fidelity / scale for p in self.points])


def _draws(model: NoiseModel, trial_index: int, count: int) -> Tuple[np.ndarray, np.ndarray]:
    # area draws first, then phase draws; one stream per (seed, trial)
    rng = np.random.default_rng([model.rng_seed, trial_index])
    z_area = rng.standard_normal(count)
    z_phase = rng.standard_normal(count)
    return z_area, z_phase


def perturb(seq: PulseSequence, model: NoiseModel, trial_index: int) -> PulseSequence:
    """
    One perturbed copy of a sequence

    Draws depend only on (model.rng_seed, trial_index, pulse index), so the
    same trial under different sigmas sees the same underlying normals.
    """
    if model.sigma == 0.0:
        return seq

    z_area, z_phase = _draws(model, trial_index, len(seq))
    areas = np.maximum(seq.areas * (1.0 + model.sigma * z_area), 0.0)
    if model.mode is NoiseMode.RELATIVE_BOTH:
        phases = seq.phases * (1.0 + model.sigma * z_phase)
    else:
        phases = seq.phases + model.sigma * z_phase
    return PulseSequence(tuple(Pulse(float(a), float(p)) for a, p in zip(areas, phases)))


def _evaluate_block(task) -> List[float]:
    config, seq, target, model, start, stop = task
    return [fidelity(config, perturb(seq, model, trial), target) for trial in range(start, stop)]


def _blocks(trials: int) -> Iterable[Tuple[int, int]]:
    for start in range(0, trials, TRIAL_BLOCK):
        yield start, min(start + TRIAL_BLOCK, trials)


def fidelity_vs_sigma(config: SystemConfig, seq: PulseSequence, target: TargetSpec,
                      sigmas: Sequence[float], model: NoiseModel,
                      workers: int = 1, sequence_id: str = "sequence") -> RobustnessCurve:
    """
    Mean, standard deviation and minimum fidelity over model.trials perturbations per sigma

    Args:
        config: System parameters
        seq: Unperturbed sequence
        target: Target state
        sigmas: Noise levels; duplicates are evaluated once
        model: Trial count, seed and mode (its own sigma is ignored)
        workers: Worker processes for the trials
        sequence_id: Label stored on the curve

    Returns:
        Curve sorted by sigma
    """
    grid = sorted({float(s) for s in sigmas})
    if not grid:
        raise ValueError("at least one sigma is required")
    if grid[0] < 0.0:
        raise ValueError(f"sigma must be non-negative, got {grid[0]}")

    points = []
    for sigma in grid:
        noise = model.with_sigma(sigma)
        if sigma == 0.0:
            values = np.full(1, fidelity(config, seq, target))
        else:
            tasks = [(config, seq, target, noise, start, stop) for start, stop in _blocks(noise.trials)]
            values = np.concatenate([np.asarray(block) for block in run_indexed(_evaluate_block, tasks, workers)])
        std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
        point = CurvePoint(
            sigma=sigma,
            mean_fidelity=float(np.clip(np.mean(values), 0.0, 1.0)),
            std_fidelity=std,
            min_fidelity=float(np.min(values)),
        )
        logger.debug(
            f"sigma={sigma:g}: mean={point.mean_fidelity:.6f} std={std:.2e} "
            f"min={point.min_fidelity:.6f}"
        )
        points.append(point)

    return RobustnessCurve(
        points=tuple(points),
        sequence_id=sequence_id,
        target_id=target.label,
        trials=model.trials,
    )
