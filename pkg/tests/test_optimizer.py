"""
Tests for the multistart optimizer
"""

import numpy as np
import pytest

from dickepulse.core.chain import SystemConfig, custom_target, dicke_target, fidelity, noon_target
from dickepulse.core.config import SearchSettings
from dickepulse.core.optimizer import (
    SearchConfig,
    Solution,
    _evaluate,
    area_scaling_bound,
    default_restarts,
    local_refine,
    objective_gradient,
    parameter_count,
    parameters_to_sequence,
    random_start,
    rank_solutions,
    sequence_to_parameters,
    start_area_budget,
    synthesize,
)
from dickepulse.core.tables import table_row


def _solution(area, value, index, qualified=True):
    seq = parameters_to_sequence(np.array([area]), 1)
    return Solution(seq, value, area, index, 0, qualified)


class TestSearchConfig:
    def test_defaults(self):
        search = SearchConfig()
        assert search.n_restarts == 500
        assert search.area_bounds == (0.0, 2.0)

    @pytest.mark.parametrize("kwargs", [
        {"n_restarts": 0},
        {"fidelity_goal": 1.5},
        {"fidelity_goal": 0.0},
        {"area_bounds": (1.0, 0.5)},
        {"area_bounds": (-0.1, 2.0)},
        {"gradient_step": 0.0},
        {"workers": 0},
        {"rng_seed": -1},
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SearchConfig(**kwargs)

    def test_from_settings(self):
        settings = SearchSettings()
        assert SearchConfig.from_settings(settings, 4).n_restarts == 500
        assert SearchConfig.from_settings(settings, 8).n_restarts == 2000
        search = SearchConfig.from_settings(settings, 4, n_restarts=7, rng_seed=None)
        assert search.n_restarts == 7
        assert search.rng_seed == settings.seed
        assert not SearchConfig.from_settings(SearchSettings(biased_starts=False), 4).biased_starts

    def test_restart_budget(self):
        assert default_restarts(6) == 500
        assert default_restarts(7) == 2000

    def test_area_scaling_bound(self):
        assert area_scaling_bound("dicke:4", 8) == 4.0
        assert area_scaling_bound("noon", 9) == 3.0
        assert area_scaling_bound("custom", 9) is None


class TestParameters:
    def test_layout(self):
        seq = parameters_to_sequence([0.5, 0.25, 0.75, 1.5, 0.2], 3)
        assert seq.to_pairs() == [(0.5, 0.0), (0.25, 1.5), (0.75, 0.2)]
        assert parameter_count(3) == 5

    def test_inverse(self):
        row = table_row("dicke", 4)
        params = sequence_to_parameters(row.sequence)
        np.testing.assert_allclose(parameters_to_sequence(params, 4).to_pairs(), row.sequence.to_pairs())

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            parameters_to_sequence([0.5, 0.25], 3)

    def test_random_start_bounds(self, rng):
        start = random_start(5, (0.0, 2.0), rng)
        assert start.size == 9
        assert np.all((start[:5] >= 0.0) & (start[:5] <= 2.0))
        assert np.all((start[5:] >= 0.0) & (start[5:] < 2.0))

    def test_start_on_area_simplex(self):
        start = random_start(4, (0.0, 2.0), np.random.default_rng(7), total_area=1.0)
        assert start[:4].sum() == pytest.approx(1.0)
        assert np.all(start[:4] >= 0.0)
        again = random_start(4, (0.0, 2.0), np.random.default_rng(7), total_area=1.0)
        np.testing.assert_array_equal(start, again)

    def test_start_clipped_to_bounds(self, rng):
        for _ in range(20):
            start = random_start(3, (0.0, 0.5), rng, total_area=6.0)
            assert np.all(start[:3] <= 0.5)

    def test_start_area_budget(self):
        assert start_area_budget(dicke_target(4, 2), 4) == 2.0
        assert start_area_budget(noon_target(6, phase_free=True), 6) == 2.0
        assert start_area_budget(custom_target([0.6, 0.0, 0.8]), 2) == 1.0


class TestGradient:
    def test_against_five_point_stencil(self, rng):
        h = 1e-3
        for k in range(100):
            n_ions = 1 + k % 5
            config = SystemConfig(n_ions, float(rng.uniform(0.0, 0.2)))
            target = dicke_target(n_ions, n_ions // 2) if k % 2 else noon_target(n_ions, phase_free=True)
            params = random_start(n_ions, (0.2, 1.8), rng)
            _, gradient = objective_gradient(config, target, params)
            for i in range(params.size):
                offsets = []
                for shift in (2, 1, -1, -2):
                    moved = params.copy()
                    moved[i] += shift * h
                    offsets.append(_evaluate(config, target, moved))
                stencil = (-offsets[0] + 8 * offsets[1] - 8 * offsets[2] + offsets[3]) / (12 * h)
                assert gradient[i] == pytest.approx(stencil, abs=1e-5)

    def test_gradient_at_lower_bound(self):
        config = SystemConfig(2)
        value, gradient = objective_gradient(config, dicke_target(2, 1), [0.0, 0.5, 0.3])
        assert np.all(np.isfinite(gradient))
        assert 0.0 <= value <= 1.0

    def test_phase_of_empty_pulse_has_no_gradient(self):
        _, gradient = objective_gradient(SystemConfig(2), dicke_target(2, 1), [1.0, 0.0, 0.3])
        assert gradient[2] == pytest.approx(0.0, abs=1e-8)


class TestRefine:
    def test_single_ion_pi_pulse(self):
        config = SystemConfig(1)
        solution = local_refine(config, dicke_target(1, 1), [0.6], SearchConfig(n_restarts=1))
        assert solution.fidelity >= 0.999999
        assert solution.total_area == pytest.approx(1.0, abs=1e-3)
        assert solution.qualified

    def test_single_ion_converges_to_exact_area(self):
        solution = local_refine(SystemConfig(1), dicke_target(1, 1), [0.7], SearchConfig(n_restarts=1))
        assert solution.total_area == pytest.approx(1.0, abs=1e-6)
        assert solution.iterations > 0

    def test_zero_iterations_returns_start(self):
        start = np.array([0.4, 0.3, 0.9, 1.2, 0.5])
        solution = local_refine(SystemConfig(3), dicke_target(3, 1), start,
                                SearchConfig(n_restarts=1, max_iterations=0))
        assert solution.iterations == 0
        np.testing.assert_allclose(sequence_to_parameters(solution.sequence), start)
        assert solution.fidelity == pytest.approx(_evaluate(SystemConfig(3), dicke_target(3, 1), start))

    @pytest.mark.parametrize("kind,n_ions", [("dicke", 4), ("noon", 4)])
    def test_nudged_table_row_returns_to_its_basin(self, kind, n_ions):
        row = table_row(kind, n_ions)
        start = sequence_to_parameters(row.sequence) + 0.001
        solution = local_refine(SystemConfig(n_ions), row.target(), start, SearchConfig(n_restarts=1))
        assert solution.fidelity >= 0.999
        assert solution.total_area == pytest.approx(row.sequence.total_area, abs=0.05)

    def test_refine_never_worsens_table_row(self):
        row = table_row("dicke", 4)
        config = SystemConfig(4)
        start = sequence_to_parameters(row.sequence)
        before = fidelity(config, row.sequence, row.target())
        solution = local_refine(config, row.target(), start, SearchConfig(n_restarts=1, max_iterations=50))
        assert solution.fidelity >= before - 1e-12
        assert solution.fidelity == pytest.approx(fidelity(config, solution.sequence, row.target()))


class TestRanking:
    def test_area_then_fidelity_then_index(self):
        ranked = rank_solutions([
            _solution(1.2, 0.9995, 0),
            _solution(1.0, 0.9991, 3),
            _solution(1.0 + 1e-8, 0.9999, 5),
            _solution(1.0, 0.9991, 1),
            _solution(0.5, 0.5, 2, qualified=False),
        ])
        assert [s.restart_index for s in ranked] == [5, 1, 3, 0]

    def test_chain_of_near_ties_stays_ordered(self):
        # neighbours differ by less than the tie tolerance, the ends by much more
        solutions = [_solution(1.0 + 0.9e-6 * k, 0.9990 + 1e-5 * k, k) for k in range(30)]
        ranked = rank_solutions(list(reversed(solutions)))
        assert [s.restart_index for s in rank_solutions(solutions)] == [s.restart_index for s in ranked]
        areas = [s.total_area for s in ranked]
        for i in range(len(areas)):
            for j in range(i + 1, len(areas)):
                assert areas[j] >= areas[i] - 1e-6

    def test_fallback_when_nothing_qualifies(self):
        ranked = rank_solutions([_solution(0.5, 0.4, 0, False), _solution(1.5, 0.8, 1, False)])
        assert len(ranked) == 1
        assert ranked[0].restart_index == 1
        assert not ranked[0].qualified


class TestSynthesize:
    def test_trivial_target_needs_no_area(self):
        solutions = synthesize(SystemConfig(1), dicke_target(1, 0), SearchConfig(n_restarts=5))
        assert solutions[0].total_area == 0.0
        assert solutions[0].fidelity == 1.0

    def test_single_ion(self):
        solutions = synthesize(SystemConfig(1), dicke_target(1, 1), SearchConfig(n_restarts=10))
        best = solutions[0]
        assert best.qualified
        assert best.total_area == pytest.approx(1.0, abs=1e-3)

    def test_reproducible(self):
        search = SearchConfig(n_restarts=6, max_iterations=40, rng_seed=99)
        config, target = SystemConfig(2), dicke_target(2, 1)
        first = synthesize(config, target, search)
        second = synthesize(config, target, search)
        assert [s.sequence.to_pairs() for s in first] == [s.sequence.to_pairs() for s in second]

    def test_worker_count_does_not_change_results(self):
        config, target = SystemConfig(2), dicke_target(2, 1)
        serial = synthesize(config, target, SearchConfig(n_restarts=4, max_iterations=30))
        pooled = synthesize(config, target, SearchConfig(n_restarts=4, max_iterations=30, workers=2))
        assert [s.fidelity for s in serial] == [s.fidelity for s in pooled]
        assert [s.restart_index for s in serial] == [s.restart_index for s in pooled]

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            synthesize(SystemConfig(3), dicke_target(2, 1), SearchConfig(n_restarts=1))


@pytest.mark.slow
class TestSynthesisParity:
    @pytest.mark.parametrize("kind,n_ions,make_target", [
        ("dicke", 3, lambda n: dicke_target(n, n // 2)),
        ("dicke", 4, lambda n: dicke_target(n, n // 2)),
        ("dicke", 5, lambda n: dicke_target(n, n // 2)),
        ("dicke", 6, lambda n: dicke_target(n, n // 2)),
        ("noon", 3, lambda n: noon_target(n, phase_free=True)),
        ("noon", 4, lambda n: noon_target(n, phase_free=True)),
        ("noon", 5, lambda n: noon_target(n, phase_free=True)),
        ("noon", 6, lambda n: noon_target(n, phase_free=True)),
    ])
    def test_matches_published_area(self, kind, n_ions, make_target):
        row = table_row(kind, n_ions)
        solutions = synthesize(SystemConfig(n_ions), make_target(n_ions), SearchConfig(n_restarts=500))
        best = solutions[0]
        assert best.qualified
        assert best.fidelity >= 0.999
        assert best.total_area <= 1.1 * row.total_area
