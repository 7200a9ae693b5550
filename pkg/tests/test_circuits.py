import numpy as np
import pytest

from uqres import circuits as qc
from uqres import interference as itf
from uqres import qkernel as qk
from uqres.circuits import Circuit, Cond, Discard, Gate, Measure, Mux
from uqres.qkernel import CapExceededError, HilbertSpec, InvariantError


def with_ancilla(psi, anc_dim=2):
    return qk.tensor(psi, qk.zero_state((anc_dim,)))


def choi_fidelity(channel, ideal_gate):
    got = itf.choi_state(channel).state.matrix
    want = itf.choi_state(ideal_gate).state.matrix
    return float(np.trace(got @ want).real)  # ideal Choi state is pure


def test_empty_circuit_single_branch():
    c = Circuit(HilbertSpec((2,)), ())
    psi = qk.plus_state(2)
    branches = qc.simulate(c, psi)
    assert len(branches) == 1
    assert branches[0].probability == pytest.approx(1.0)
    assert np.allclose(branches[0].state.amplitudes, psi.amplitudes)


def test_measure_plus_state():
    c = Circuit(HilbertSpec((2,)), (Measure(0, "Z", "m"),))
    branches = qc.simulate(c, qk.plus_state(2))
    assert len(branches) == 2
    for b in branches:
        assert b.probability == pytest.approx(0.5, abs=1e-12)
    assert {b.outcomes["m"] for b in branches} == {0, 1}


def test_bell_pair_correlated_outcomes():
    c = Circuit(HilbertSpec((2, 2)), (
        Gate(qk.H, (0,)),
        Gate(qk.CX, (0, 1)),
        Measure(0, "Z", "m0"),
        Measure(1, "Z", "m1"),
    ))
    branches = qc.simulate(c, qk.zero_state((2, 2)))
    assert len(branches) == 2
    for b in branches:
        assert b.outcomes["m0"] == b.outcomes["m1"]
        assert b.probability == pytest.approx(0.5, abs=1e-12)


def test_branch_probabilities_sum_to_one():
    rng = np.random.default_rng(0)
    c = Circuit(HilbertSpec((2, 2)), (
        Gate(qk.haar_unitary(4, rng), (0, 1)),
        Measure(0, "X", "a"),
        Measure(1, "Y", "b"),
    ))
    branches = qc.simulate(c, qk.random_state((2, 2), rng))
    assert sum(b.probability for b in branches) == pytest.approx(1.0, abs=1e-9)


def test_h_teleportation_deterministic():
    circ = qc.h_teleportation()
    rng = np.random.default_rng(1)
    inputs = [with_ancilla(qk.random_state((2,), rng)) for _ in range(10)]
    ok, worst = qc.is_deterministic(circ, inputs)
    assert ok and worst < 1e-9

    psi = qk.random_state((2,), rng)
    target = qk.apply_unitary(psi, qk.H)
    for b in qc.simulate(circ, with_ancilla(psi)):
        assert qk.state_fidelity(b.state, target) == pytest.approx(1.0, abs=1e-10)
        assert b.probability == pytest.approx(0.5, abs=1e-9)


def test_t_injection_deterministic():
    circ = qc.t_injection()
    rng = np.random.default_rng(2)
    inputs = [with_ancilla(qk.random_state((2,), rng)) for _ in range(10)]
    ok, worst = qc.is_deterministic(circ, inputs)
    assert ok and worst < 1e-9

    psi = qk.random_state((2,), rng)
    target = qk.apply_unitary(psi, qk.T)
    for b in qc.simulate(circ, with_ancilla(psi)):
        assert qk.state_fidelity(b.state, target) == pytest.approx(1.0, abs=1e-10)
        assert b.probability == pytest.approx(0.5, abs=1e-9)


def test_teleportation_probabilities_input_independent():
    rng = np.random.default_rng(3)
    for circ in (qc.h_teleportation(), qc.t_injection()):
        for _ in range(5):
            branches = qc.simulate(circ, with_ancilla(qk.random_state((2,), rng)))
            assert [round(b.probability, 9) for b in branches] == [0.5, 0.5]


def test_branch_averaged_channels_match_gates():
    h_chan = qc.induced_channel(qc.h_teleportation(), [0], fixed={1: 0})
    assert choi_fidelity(h_chan, qk.gate("H")) >= 1 - 1e-9
    t_chan = qc.induced_channel(qc.t_injection(), [0], fixed={1: 0})
    assert choi_fidelity(t_chan, qk.gate("T")) >= 1 - 1e-9


def test_encrypted_t_injection_all_keys():
    rng = np.random.default_rng(4)
    for a in (0, 1):
        for b in (0, 1):
            circ = qc.encrypted_t_injection((a, b))
            psi = qk.random_state((2,), rng)
            pad = (np.linalg.matrix_power(qk.X, a)
                   @ np.linalg.matrix_power(qk.Z, b))
            enc = qk.apply_unitary(psi, pad)
            target = qk.apply_unitary(psi, qk.T)
            for br in qc.simulate(circ, with_ancilla(enc)):
                assert qk.state_fidelity(br.state, target) == pytest.approx(
                    1.0, abs=1e-10)


def test_contextual_builders_realize_their_gates():
    rng = np.random.default_rng(5)
    cases = [(qc.contextual_h(), qk.H), (qc.contextual_t(), qk.T),
             (qc.contextual_cz(), qk.CZ)]
    for circ, gate in cases:
        d1, d2 = circ.wires.dims
        for _ in range(5):
            psi = qk.random_state((d2,), rng)
            target = qk.StateVector(psi.spec, gate @ psi.amplitudes)
            branches = qc.simulate(circ, qk.tensor(qk.zero_state((d1,)), psi))
            for b in branches:
                assert qk.state_fidelity(b.state, target) == pytest.approx(
                    1.0, abs=1e-9)
        chan = qc.induced_channel(circ, [1], fixed={0: 0})
        assert choi_fidelity(chan, qk.UnitaryOp(HilbertSpec((d2,)), gate)) >= 1 - 1e-9


def test_classical_mux_contextual_circuit_is_identity():
    # All multiplexer branches trivial: data passes through on every branch.
    cu = itf.Multiplexer((np.eye(2, dtype=complex), np.eye(2, dtype=complex)))
    circ = qc.contextual_circuit(qk.H, cu, qk.H, [np.eye(2)] * 2)
    rng = np.random.default_rng(6)
    for _ in range(5):
        psi = qk.random_state((2,), rng)
        for b in qc.simulate(circ, qk.tensor(qk.zero_state((2,)), psi)):
            assert qk.state_fidelity(b.state, psi) == pytest.approx(1.0, abs=1e-10)


def test_is_deterministic_negative_case():
    c = Circuit(HilbertSpec((2,)), (Measure(0, "Z", "m"),))
    ok, worst = qc.is_deterministic(c, [qk.plus_state(2)])
    assert not ok and worst > 0.9


def test_lcu_circuit_single_surviving_branch():
    circ = qc.lcu_circuit(np.array([1, 1]) / np.sqrt(2), (qk.Z, qk.X))
    psi = qk.zero_state((2,))
    ok, _ = qc.is_deterministic(circ, [qk.tensor(qk.zero_state((2,)), psi)],
                                keep=lambda rec: rec["anc"] == 0)
    assert ok
    branches = qc.simulate(circ, qk.tensor(qk.zero_state((2,)), psi))
    success = [b for b in branches if b.outcomes["anc"] == 0]
    assert len(success) == 1
    assert success[0].probability == pytest.approx(0.5, abs=1e-9)
    target = qk.apply_unitary(psi, qk.H)
    assert qk.state_fidelity(success[0].state, target) == pytest.approx(1.0, abs=1e-9)


def test_free_circuit_check():
    free = Circuit(HilbertSpec((2, 2, 2)), (
        Gate(qk.T, (0,)),
        Gate(qk.CX, (0, 1)),
        Gate(qk.CCX, (0, 1, 2)),
        Gate(qk.CZ, (1, 2)),
        Gate(qk.S, (2,)),
        Measure(0, "Z", "m"),
        Cond({"m": 1}, Gate(qk.X, (1,))),
    ))
    assert qc.free_circuit_check(free)

    with_h = Circuit(HilbertSpec((2,)), (Gate(qk.H, (0,)),))
    assert not qc.free_circuit_check(with_h)

    with_mx = Circuit(HilbertSpec((2,)), (Measure(0, "X", "m"),))
    assert not qc.free_circuit_check(with_mx)

    assert qc.free_circuit_check(Circuit(HilbertSpec((2,)), ()))


def test_free_circuits_preserve_basis_states():
    # Five wires, all basis inputs, every branch stays a basis state.
    rng = np.random.default_rng(7)
    diag = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, size=4)))
    circ = Circuit(HilbertSpec((2,) * 5), (
        Gate(qk.T, (0,)),
        Gate(qk.CX, (1, 2)),
        Gate(qk.CCX, (0, 3, 4)),
        Gate(diag, (2, 3)),
        Gate(qk.CZ, (3, 4)),
        Measure(1, "Z", "m"),
        Cond({"m": 1}, Gate(qk.X, (2,))),
    ))
    assert qc.free_circuit_check(circ)
    spec = HilbertSpec((2,) * 5)
    for idx in range(32):
        for b in qc.simulate(circ, qk.basis_state(spec, idx)):
            probs = b.state.probabilities()
            assert probs.max() == pytest.approx(1.0, abs=1e-10)


def test_branch_kraus_completeness():
    circ = qc.t_injection()
    ks = [k for _, k in qc.branch_kraus(circ)]
    acc = sum(k.conj().T @ k for k in ks)
    assert np.abs(acc - np.eye(4)).max() < 1e-10


def test_branch_kraus_agrees_with_simulation():
    # Dual route: the per-branch Kraus operators applied to a fixed input must
    # reproduce the simulator's branch probabilities and post-states.
    rng = np.random.default_rng(11)
    circ = qc.Circuit(HilbertSpec((2, 2)), (
        Gate(qk.haar_unitary(4, rng), (0, 1)),
        Measure(0, "X", "a"),
        Cond({"a": 1}, Gate(qk.Z, (1,))),
        Discard(0),
    ))
    psi = qk.random_state((2, 2), rng)
    sim = {tuple(sorted(b.outcomes.items())): b for b in qc.simulate(circ, psi)}
    for rec, k in qc.branch_kraus(circ):
        v = k @ psi.amplitudes
        p = float(np.vdot(v, v).real)
        b = sim[tuple(sorted(rec.items()))]
        assert p == pytest.approx(b.probability, abs=1e-12)
        assert qk.equal_up_to_phase(v / np.sqrt(p), b.state.amplitudes, tol=1e-10)


def test_circuit_validation_errors():
    spec = HilbertSpec((2, 2))
    with pytest.raises(InvariantError):
        Circuit(spec, (Gate(qk.H, (5,)),))
    with pytest.raises(InvariantError):
        Circuit(spec, (Mux(0, (np.eye(2),), (1,)),))      # branch count != dim
    with pytest.raises(InvariantError):
        Circuit(spec, (Cond({"m": 1}, Gate(qk.X, (0,))),))  # undefined name
    with pytest.raises(InvariantError):
        Circuit(spec, (Discard(0),))                       # discard before measure
    with pytest.raises(InvariantError):
        Circuit(spec, (Measure(0, "Z", "m"), Gate(qk.H, (0,))))  # reuse after measure


def test_branch_cap():
    ins = tuple(Measure(w, "Z", f"m{w}") for w in range(5))
    circ = Circuit(HilbertSpec((2,) * 5), ins)
    state = qk.random_state((2,) * 5, np.random.default_rng(8))
    with pytest.raises(CapExceededError):
        qc.simulate(circ, state, branch_cap=8)


def test_json_round_trip():
    circ = Circuit(HilbertSpec((2, 2)), (
        Gate(qk.H, (0,), name="H"),
        Mux(0, (np.eye(2, dtype=complex), qk.X), (1,)),
        Gate(qk.haar_unitary(2, np.random.default_rng(9)), (0,)),
        Measure(0, "Z", "m"),
        Cond({"m": 1}, Gate(qk.Z, (1,))),
        Discard(0),
    ))
    doc = qc.circuit_to_json(circ)
    back = qc.circuit_from_json(doc)
    rng = np.random.default_rng(10)
    psi = qk.random_state((2, 2), rng)
    b1 = qc.simulate(circ, psi)
    b2 = qc.simulate(back, psi)
    assert len(b1) == len(b2)
    for x, y in zip(b1, b2):
        assert x.outcomes == y.outcomes
        assert x.probability == pytest.approx(y.probability, abs=1e-12)
        assert np.abs(x.state.amplitudes - y.state.amplitudes).max() < 1e-12
