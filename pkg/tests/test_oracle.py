"""
Tests for the full ion-phonon space oracle
"""

import numpy as np
import pytest

from dickepulse.core.chain import Pulse, PulseSequence, SystemConfig, evolve_state
from dickepulse.core.errors import CutoffError
from dickepulse.core.oracle import (
    FullState,
    build_full_generator,
    casimir_commutator_norm,
    casimir_operator,
    dicke_internal_state,
    evolve_full,
    evolve_full_trajectory,
    project_to_chain,
    sector_population,
    symmetry_spectrum_check,
    verify_factorization,
)
from tests.helpers import random_sequence


class TestFullState:
    def test_ground(self):
        state = FullState.ground(3, 4)
        assert state.amplitudes.size == 8 * 5
        assert state.norm == 1.0

    def test_size_check(self):
        with pytest.raises(ValueError):
            FullState(np.zeros(7), 3, 1)

    def test_from_components(self):
        state = FullState.from_components(2, 2, {("10", 1): 1 / np.sqrt(2), ("01", 1): 1 / np.sqrt(2)})
        chain, leakage = project_to_chain(state)
        np.testing.assert_allclose(chain.amplitudes, [0, 1, 0], atol=1e-15)
        assert leakage == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(ValueError):
            FullState.from_components(2, 2, {("102", 0): 1.0})


class TestGenerator:
    def test_hermitian(self):
        generator = build_full_generator(SystemConfig(3, 0.1), Pulse(0.8, 0.4), 5)
        difference = generator - generator.conj().T
        assert abs(difference).max() < 1e-15

    def test_cutoff_must_allow_a_transition(self):
        with pytest.raises(ValueError):
            build_full_generator(SystemConfig(2), Pulse(1.0), 0)

    def test_single_ion_element(self):
        # <1,1| G |0,0> = (A pi/2) exp(i phase pi) L^1_0(eta^2)
        generator = build_full_generator(SystemConfig(1, 0.3), Pulse(1.0, 0.5), 2).toarray()
        levels = 3
        assert generator[1 * levels + 1, 0] == pytest.approx((np.pi / 2) * 1j)

    def test_commutes_with_casimir(self, rng):
        for _ in range(5):
            config = SystemConfig(int(rng.integers(1, 5)), float(rng.uniform(0, 0.3)))
            pulse = Pulse(rng.uniform(0, 2), rng.uniform(0, 2))
            assert casimir_commutator_norm(config, pulse, config.n_ions + 2) < 1e-12


class TestFactorization:
    def test_table_row(self, dicke3_row):
        report = verify_factorization(SystemConfig(3), dicke3_row.sequence)
        assert report.max_amplitude_discrepancy < 1e-9
        assert report.max_leakage < 1e-10
        assert report.max_sector_population < 1e-20
        assert report.pulses == 3
        assert report.phonon_cutoff == 7

    def test_random_sequence_off_lamb_dicke(self, rng):
        config = SystemConfig(2, 0.2)
        report = verify_factorization(config, random_sequence(rng, 4))
        assert report.max_amplitude_discrepancy < 1e-9
        assert report.max_leakage < 1e-10

    def test_cutoff_at_ion_count_is_exact(self, rng):
        config = SystemConfig(3, 0.1)
        report = verify_factorization(config, random_sequence(rng, 3), phonon_cutoff=3)
        assert report.max_amplitude_discrepancy < 1e-9

    def test_small_cutoff_is_rejected(self):
        seq = PulseSequence.from_pairs([(1.0, 0.0)])
        with pytest.raises(CutoffError) as excinfo:
            evolve_full(SystemConfig(3), seq, phonon_cutoff=1)
        assert excinfo.value.leakage > 1e-12
        assert excinfo.value.cutoff == 1

    def test_trajectory_and_projection(self, rng):
        config = SystemConfig(3, 0.05)
        seq = random_sequence(rng, 3)
        trajectory = evolve_full_trajectory(config, seq)
        assert len(trajectory) == 4
        chain, leakage = project_to_chain(trajectory[-1])
        np.testing.assert_allclose(chain.amplitudes, evolve_state(config, seq).amplitudes, atol=1e-9)
        assert leakage < 1e-10
        assert all(abs(state.norm - 1.0) < 1e-10 for state in trajectory)

    def test_sector_population(self):
        assert sector_population(FullState.from_components(3, 3, {("100", 0): 1.0})) == 1.0
        assert sector_population(FullState.from_components(3, 3, {("100", 1): 1.0})) == 0.0

    def test_size_limit(self):
        with pytest.raises(ValueError):
            verify_factorization(SystemConfig(13), PulseSequence.from_pairs([(0.1, 0.0)]))

    @pytest.mark.slow
    def test_randomized_sweep(self, rng):
        for k in range(50):
            n_ions = 1 + k % 8
            for eta in (0.0, 0.1, 0.2):
                config = SystemConfig(n_ions, eta)
                report = verify_factorization(config, random_sequence(rng, n_ions))
                assert report.max_amplitude_discrepancy < 1e-9
                assert report.max_leakage < 1e-10


class TestSymmetry:
    @pytest.mark.parametrize("n_ions", range(1, 9))
    def test_dicke_states_are_symmetric(self, n_ions):
        report = symmetry_spectrum_check(n_ions)
        assert report.passed(1e-10)
        np.testing.assert_allclose(report.eigenvalues, report.expected_eigenvalue, atol=1e-10)
        assert report.expected_eigenvalue == pytest.approx((1 + n_ions / 2) * n_ions / 2)

    def test_singlet_has_zero_casimir(self):
        singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
        np.testing.assert_allclose(casimir_operator(2) @ singlet, 0.0, atol=1e-15)

    def test_dicke_internal_state(self):
        state = dicke_internal_state(4, 2)
        assert np.linalg.norm(state) == pytest.approx(1.0)
        assert np.count_nonzero(state) == 6
        with pytest.raises(ValueError):
            dicke_internal_state(4, 5)

    def test_size_limit(self):
        with pytest.raises(ValueError):
            symmetry_spectrum_check(11)
