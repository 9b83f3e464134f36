import math
import random

import numpy as np
import pytest

from qirb.builder import classify_outcome
from qirb.pipeline import ExperimentDesign, build_design_circuits, simulate_design
from qirb.simulator import (
    InstrumentErrorSpec,
    NoiseModel,
    OneQubitPauliChannel,
    TwoQubitDepolarizing,
    simulate_result,
    simulate_shots,
)
from qirb.theory import exact_success_expectation

from test_builder import build_random


class TestNoiseModelTypes:
    def test_fidelity_shorthand(self):
        noise = NoiseModel.depolarizing(0.999, 0.995, 0.02)
        assert math.isclose(noise.oneq.fidelity, 0.999)
        assert math.isclose(noise.oneq.px, 0.001 / 3)
        assert math.isclose(noise.twoq.fidelity, 0.995)
        assert math.isclose(noise.twoq.eps_each, 0.005 / 15)
        assert noise.readout_flip == 0.02

    def test_validation(self):
        with pytest.raises(ValueError):
            OneQubitPauliChannel(0.5, 0.4, 0.3)
        with pytest.raises(ValueError):
            TwoQubitDepolarizing(0.1)
        with pytest.raises(ValueError):
            InstrumentErrorSpec(pre_flip=1.5)

    def test_instrument_no_error_prob(self):
        spec = InstrumentErrorSpec(0.1, 0.2, 0.3)
        assert math.isclose(spec.no_error_prob(2), 0.9 * 0.8 * 0.49)


class TestDeterminism:
    def test_same_seed_reproduces_records(self):
        c = build_random(3, 5, seed=0)
        noise = NoiseModel.depolarizing()
        a = simulate_shots(c, noise, 50, seed=4)
        b = simulate_shots(c, noise, 50, seed=4)
        assert a == b

    def test_shot_records_classify_consistently(self):
        c = build_random(2, 4, seed=1)
        for rec in simulate_shots(c, NoiseModel.depolarizing(), 60, seed=5):
            assert classify_outcome(c, rec.outcome) == rec.success

    def test_worker_count_does_not_change_results(self):
        design = ExperimentDesign(n=2, p_cnot=0.3, p_mcm=0.3, depths=(0, 2, 5),
                                  circuits_per_depth=3, shots=40, seed=9)
        circuits = build_design_circuits(design)
        noise = NoiseModel.depolarizing()
        serial = simulate_design(circuits, noise, design, threads=1)
        parallel = simulate_design(circuits, noise, design, threads=4)
        assert serial == parallel


class TestMcmStatistics:
    def test_certain_preflip_halves_of_circuits_fail(self):
        # A guaranteed pre-measurement flip on a one-wire, depth-1,
        # single-MCM circuit flips classification exactly when the tracked
        # component on the measured wire is Z, which happens for 3/4 of the
        # sampled circuits: the circuit-averaged mean success is -1/2.
        noise = NoiseModel(
            oneq=OneQubitPauliChannel(),
            twoq=TwoQubitDepolarizing(),
            mcm=InstrumentErrorSpec(pre_flip=1.0),
            readout_flip=0.0,
        )
        total = 0.0
        reps = 600
        for seed in range(reps):
            c = build_random(1, 1, seed=seed, p_mcm=1.0, p_cnot=0.0)
            total += simulate_result(c, noise, 8, seed=seed, with_counts=False).f_value
        mean = total / reps
        sigma = math.sqrt(0.75 / reps)  # per-circuit F is +/-1 here
        assert abs(mean - (-0.5)) < 3 * sigma

    def test_single_location_linearity(self):
        # One error location with flip probability q gives mean 1 - 2q.
        q = 0.17
        noise = NoiseModel(
            oneq=OneQubitPauliChannel(),
            twoq=TwoQubitDepolarizing(),
            mcm=InstrumentErrorSpec(pre_flip=q),
            readout_flip=0.0,
        )
        for seed in range(40):
            c = build_random(1, 1, seed=seed, p_mcm=1.0, p_cnot=0.0)
            if c.dressed[0].pre_meas_component.letter_code(0) == 0:
                continue
            shots = 20000
            mean = simulate_result(c, noise, shots, seed=seed, with_counts=False).f_value
            expect = 1 - 2 * q
            sigma = math.sqrt((1 - expect**2) / shots)
            assert abs(mean - expect) < 4 * sigma
            break
        else:
            pytest.fail("no circuit with a Z component found")

    def test_off_support_mcm_bits_are_uniform(self):
        # Discarded MCM bits carry no parity constraint; their marginals
        # stay near 1/2 under zero noise.
        rng = random.Random(0)
        ones = total = 0
        for seed in range(60):
            c = build_random(2, 2, seed=seed, p_mcm=1.0)
            res = simulate_shots(c, NoiseModel.zero(), 30, seed=rng.randrange(1 << 30))
            for k in range(c.m):
                if (c.discard_mask >> k) & 1:
                    for rec in res:
                        ones += rec.outcome.bits[k]
                        total += 1
        assert total > 300
        assert abs(ones / total - 0.5) < 3 * math.sqrt(0.25 / total)


class TestOracleAgreement:
    def test_exact_expectation_matches_monte_carlo(self):
        noise = NoiseModel.depolarizing(0.99, 0.98, 0.05, mcm_post_flip=0.03,
                                        mcm_unmeasured_depol=0.02)
        shots = 40000
        for seed in range(5):
            c = build_random(3, 5, seed=seed, reset=bool(seed % 2))
            exact = exact_success_expectation(c, noise)
            mc = simulate_result(c, noise, shots, seed=seed + 100, with_counts=False).f_value
            sigma = math.sqrt(max(1e-12, 1 - exact**2) / shots)
            assert abs(mc - exact) < 4 * sigma


class TestResetFreeModes:
    def test_modes_agree_shot_by_shot(self):
        noise = NoiseModel.depolarizing(0.995, 0.99, 0.04)
        for seed in range(4):
            c = build_random(3, 6, seed=seed, reset=False, p_mcm=0.7)
            a = simulate_shots(c, noise, 120, seed=seed, reset_free_mode="frame-correction")
            b = simulate_shots(c, noise, 120, seed=seed, reset_free_mode="feedforward-x")
            assert [r.success for r in a] == [r.success for r in b]

    def test_counts_histogram_sums_to_shots(self):
        c = build_random(2, 3, seed=3, reset=False)
        res = simulate_result(c, NoiseModel.depolarizing(), 97, seed=8)
        assert sum(res.counts.values()) == 97
        assert res.n_success + res.n_fail == 97


def test_simulator_rejects_bad_arguments():
    c = build_random(2, 2, seed=0)
    with pytest.raises(ValueError):
        simulate_shots(c, NoiseModel.zero(), 0, seed=1)
    c_free = build_random(2, 2, seed=0, reset=False)
    with pytest.raises(ValueError):
        simulate_shots(c_free, NoiseModel.zero(), 5, seed=1, reset_free_mode="bogus")


def test_batch_phases_match_reference_tableau():
    # The batched executor and the per-shot reference tableau agree on
    # deterministic outcomes for a fixed Clifford prefix.
    from qirb.simulator import _BatchExecutor
    from qirb.tableau import StabilizerTableau
    from qirb.seeding import derive_np_rng

    for seed in range(10):
        c = build_random(3, 4, seed=seed)
        ex = _BatchExecutor(c, NoiseModel.zero(), 7, derive_np_rng(seed), "frame-correction")
        ex._gate_sublayer(c.prep_layer)
        ref = StabilizerTableau(c.n)
        for g in c.prep_layer.gates:
            ref.apply_gate(g.index, g.wires)
        assert ex.x == ref.x and ex.z == ref.z
        for row in range(2 * c.n):
            assert (ex.r[row] == ref.r[row]).all()
