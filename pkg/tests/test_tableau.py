import random

from qirb.pauli import CNOT_INDEX, CliffordGate, SignedPauli, conjugate
from qirb.tableau import StabilizerTableau, tableau_measure_z

from test_pauli import H, S  # canonical indices resolved from the table


def test_zero_state_measures_zero_deterministically():
    t = StabilizerTableau(1)
    assert t.is_deterministic(0)
    assert t.measure_z(0, random.Random(0)) == 0


def test_plus_state_measures_uniformly_and_collapses():
    rng = random.Random(5)
    counts = [0, 0]
    for _ in range(400):
        t = StabilizerTableau(1)
        t.apply_clifford(H, 0)
        bit = tableau_measure_z(t, 0, rng)
        counts[bit] += 1
        # Post-measurement state is the observed basis state.
        assert t.measure_z(0, rng) == bit
    assert abs(counts[0] - 200) < 3 * (400 * 0.25) ** 0.5


def test_bell_pair_correlations():
    rng = random.Random(9)
    patterns = {0: 0, 3: 0}
    for _ in range(400):
        t = StabilizerTableau(2)
        t.apply_clifford(H, 0)
        t.apply_cnot(0, 1)
        b0 = t.measure_z(0, rng)
        b1 = t.measure_z(1, rng)
        assert b0 == b1
        patterns[b0 * 3] += 1
    assert abs(patterns[0] - 200) < 3 * (400 * 0.25) ** 0.5


def test_expectation_tracks_conjugated_stabilizers():
    # Starting from |0..0>, the state after a gate sequence is stabilized by
    # the conjugated Z operators with their exact signs.
    rng = random.Random(31)
    for _ in range(30):
        n = rng.randrange(1, 5)
        t = StabilizerTableau(n)
        gates = []
        for _ in range(rng.randrange(1, 12)):
            if n > 1 and rng.random() < 0.3:
                a = rng.randrange(n)
                b = (a + 1 + rng.randrange(n - 1)) % n
                g = CliffordGate(CNOT_INDEX, (a, b))
            else:
                g = CliffordGate(rng.randrange(24), (rng.randrange(n),))
            gates.append(g)
            t.apply_gate(g.index, g.wires)
        layer_gates = tuple(gates)
        for q in range(n):
            z_q = SignedPauli(n, 0, 1 << q, 1)
            image = conjugate(layer_gates, z_q)
            assert t.expectation(image) == 1
            assert t.expectation(image.with_sign(-image.sign)) == -1


def test_apply_pauli_flips_anticommuting_stabilizers():
    t = StabilizerTableau(1)
    t.apply_pauli(1, 0)  # X on |0> gives |1>
    assert t.measure_z(0, random.Random(0)) == 1
    t2 = StabilizerTableau(1)
    t2.apply_pauli(0, 1)  # Z on |0> does nothing observable
    assert t2.measure_z(0, random.Random(0)) == 0


def test_phase_gate_sign_via_tableau():
    # S|+> has stabilizer Y: measuring X basis statistics via conjugation.
    t = StabilizerTableau(1)
    t.apply_clifford(H, 0)
    t.apply_clifford(S, 0)
    assert t.expectation(SignedPauli.from_string("Y")) == 1

    image = conjugate(
        (CliffordGate(H, (0,)), CliffordGate(S, (0,))), SignedPauli.from_string("Z")
    )
    assert image == SignedPauli.from_string("Y")
