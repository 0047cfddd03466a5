"""
Helpers shared by several test modules
"""

import numpy as np

from dickepulse.core.chain import PulseSequence


def random_sequence(rng: np.random.Generator, pulses: int, max_area: float = 2.0) -> PulseSequence:
    """Areas uniform in [0, max_area), phases uniform in [0, 2)"""
    areas = rng.uniform(0.0, max_area, pulses)
    phases = rng.uniform(0.0, 2.0, pulses)
    return PulseSequence.from_pairs(zip(areas, phases))
