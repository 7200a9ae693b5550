import numpy as np
import pytest

from uqres import algorithms as alg
from uqres import circuits as qc
from uqres import interference as itf
from uqres import qkernel as qk
from uqres.interference import Multiplexer
from uqres.qkernel import InvariantError


def binary_entropy(p):
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)


def test_sandwich_reduces_to_product_for_classical_mux():
    rng = np.random.default_rng(0)
    for d1 in (2, 3):
        cu = Multiplexer(tuple(np.eye(d1, dtype=complex) for _ in range(d1)))
        v, w = qk.haar_unitary(d1, rng), qk.haar_unitary(d1, rng)
        got = alg.sandwiched_interference(v, cu, w)
        assert got == pytest.approx(itf.interference_power(v @ w), abs=1e-9)


def test_sandwich_reduces_to_mux_average_for_trivial_sides():
    rng = np.random.default_rng(1)
    d1, d2 = 3, 2
    cu = Multiplexer(tuple(qk.haar_unitary(d2, rng) for _ in range(d1)))
    eye = np.eye(d1, dtype=complex)
    got = alg.sandwiched_interference(eye, cu, eye)
    branch_avg = np.mean([itf.interference_power(u) for u in cu.branches])
    assert got == pytest.approx(branch_avg, abs=1e-9)
    assert got == pytest.approx(itf.interference_power(cu.matrix), abs=1e-9)


def test_sandwich_matches_dual_state_route():
    rng = np.random.default_rng(2)
    for _ in range(20):
        d1, d2 = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        cu = Multiplexer(tuple(qk.haar_unitary(d2, rng) for _ in range(d1)))
        v, w = qk.haar_unitary(d1, rng), qk.haar_unitary(d1, rng)
        direct = alg.sandwiched_interference(v, cu, w)
        assembled = np.kron(v, np.eye(d2)) @ cu.matrix @ np.kron(w, np.eye(d2))
        assert direct == pytest.approx(itf.interference_power(assembled), abs=1e-9)


def test_sandwich_circuit_builder():
    rng = np.random.default_rng(3)
    cu = Multiplexer((qk.haar_unitary(2, rng), qk.haar_unitary(2, rng)))
    circ = alg.sandwich_circuit(qk.H, cu, qk.H)
    psi = qk.random_state((2, 2), rng)
    (branch,) = qc.simulate(circ, psi)
    assembled = np.kron(qk.H, np.eye(2)) @ cu.matrix @ np.kron(qk.H, np.eye(2))
    assert np.abs(branch.state.amplitudes - assembled @ psi.amplitudes).max() < 1e-10


def test_rotation_v_coherences():
    for eps in (1e-3, 1e-2, 0.1):
        v = alg.rotation_v(eps)
        assert itf.interference_power(v, "l1") == pytest.approx(
            2 * np.sqrt(eps * (1 - eps)), abs=1e-12)
        assert itf.interference_power(v, "relative_entropy") == pytest.approx(
            binary_entropy(eps), abs=1e-12)
    with pytest.raises(InvariantError):
        alg.rotation_v(0.0)
    with pytest.raises(InvariantError):
        alg.rotation_v(1.0)


def test_one_control_build_final_state():
    rng = np.random.default_rng(4)
    for n in (1, 2, 3):
        u = qk.haar_unitary(2 ** n, rng)
        eps = 0.05
        circuit, state = alg.one_control_build(u, eps)
        expect = np.zeros(2 ** (n + 1), dtype=complex)
        expect[0] = np.sqrt(1 - eps)
        expect[2 ** n:] = np.sqrt(eps) * u[:, 0]
        assert np.abs(state.amplitudes - expect).max() < 1e-10
        # the circuit run on |0>|0..0> reproduces it exactly
        (branch,) = qc.simulate(circuit, qk.zero_state((2, 2 ** n)))
        assert np.abs(branch.state.amplitudes - expect).max() < 1e-10


def test_one_control_trivial_u_gives_plus_control():
    circuit, state = alg.one_control_build(np.eye(2, dtype=complex), 0.5)
    expect = np.zeros(4)
    expect[0] = expect[2] = 2 ** -0.5
    assert np.abs(state.amplitudes - expect).max() < 1e-10


def test_one_control_decomposition_examples():
    # U = H x H: I(U) = 2 so the mux contributes exactly 1.
    u = np.kron(qk.H, qk.H)
    eps = 0.01
    res = alg.one_control_interference_decomposition(u, eps)
    assert res < 1e-9
    whole = Multiplexer((np.eye(4, dtype=complex), u)).matrix @ np.kron(
        alg.rotation_v(eps), np.eye(4))
    assert itf.interference_power(whole) == pytest.approx(
        binary_entropy(eps) + 1.0, abs=1e-9)

    # Pauli-string U: I(U) = 0 so the whole circuit carries only I(V_eps).
    pauli = np.kron(qk.X, qk.Z)
    whole = Multiplexer((np.eye(4, dtype=complex), pauli)).matrix @ np.kron(
        alg.rotation_v(eps), np.eye(4))
    assert itf.interference_power(whole) == pytest.approx(
        binary_entropy(eps), abs=1e-9)


def test_one_control_decomposition_random_suite():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 4))
        u = qk.haar_unitary(2 ** n, rng)
        for eps in (1e-3, 1e-2, 0.1):
            worst = max(worst, alg.one_control_interference_decomposition(u, eps))
    assert worst < 1e-9


def test_one_control_entanglement_small_for_small_eps():
    rng = np.random.default_rng(6)
    u = qk.haar_unitary(4, rng)
    _, s_small = alg.one_control_build(u, 1e-3)
    from uqres import measures as ms
    ent = ms.entanglement_entropy(s_small, [0])
    assert ent < 0.02  # sqrt(eps)-level overlap keeps the cut nearly product


def test_lcu_single_term():
    rng = np.random.default_rng(7)
    psi = qk.random_state((2,), rng)
    out, prob = alg.lcu_apply(np.array([1.0]), [qk.X], psi)
    assert prob == pytest.approx(1.0, abs=1e-12)
    assert qk.state_fidelity(out, qk.apply_unitary(psi, qk.X)) >= 1 - 1e-12


def test_lcu_hadamard_from_x_plus_z():
    psi = qk.zero_state((2,))
    out, prob = alg.lcu_apply(np.array([1, 1]) / np.sqrt(2), [qk.X, qk.Z], psi)
    assert prob == pytest.approx(0.5, abs=1e-12)
    assert qk.state_fidelity(out, qk.apply_unitary(psi, qk.H)) >= 1 - 1e-12


def test_lcu_destructive_interference_rejected():
    psi = qk.zero_state((2,))
    with pytest.raises(InvariantError):
        alg.lcu_apply(np.array([1, -1]) / np.sqrt(2), [np.eye(2), np.eye(2)], psi)


def test_lcu_matches_direct_operator():
    rng = np.random.default_rng(8)
    for _ in range(10):
        k = int(rng.integers(1, 4))
        us = [qk.haar_unitary(4, rng) for _ in range(k)]
        c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        psi = qk.random_state((2, 2), rng)
        target = sum(ci * (ui @ psi.amplitudes) for ci, ui in zip(c, us))
        nt = np.linalg.norm(target)
        if nt < 1e-6:
            continue
        out, prob = alg.lcu_apply(c, us, psi)
        assert abs(abs(np.vdot(out.amplitudes, target / nt)) - 1) < 1e-10
        lam = np.abs(c).sum()
        assert prob == pytest.approx(nt ** 2 / lam ** 2, abs=1e-10)


def test_grover_exact_for_two_qubits():
    steps = alg.grover_trace(2, marked=3, iterations=1)
    assert steps[0].success_probability == pytest.approx(0.25, abs=1e-12)
    assert steps[1].success_probability == pytest.approx(1.0, abs=1e-12)


def test_grover_closed_form_all_sizes():
    for n in (2, 3, 4, 5, 6):
        steps = alg.grover_trace(n, marked=1, iterations=20)
        for s in steps:
            assert s.success_probability == pytest.approx(s.closed_form, abs=1e-10)


def test_grover_coherence_profile():
    steps = alg.grover_trace(4, marked=5, iterations=6)
    assert steps[0].coherence_computational == pytest.approx(4.0, abs=1e-9)
    assert all(s.coherence_rotated <= 1.0 + 1e-12 for s in steps)


def test_incoherent_absorption():
    # Pre/post computational permutations leave every interference value fixed.
    rng = np.random.default_rng(9)
    for _ in range(10):
        d = int(rng.integers(2, 5))
        u = qk.haar_unitary(d, rng)
        p = np.eye(d)[:, rng.permutation(d)].astype(complex)
        q = np.eye(d)[:, rng.permutation(d)].astype(complex)
        base = itf.interference_power(u)
        assert abs(itf.interference_power(p @ u) - base) < 1e-12
        assert abs(itf.interference_power(u @ q) - base) < 1e-12
        assert abs(itf.interference_power(p @ u @ q) - base) < 1e-12


def test_report_validation():
    with pytest.raises(InvariantError):
        alg.AlgorithmReport("x", residuals={"bad": -1.0})
    rep = alg.grover_report(2, 0, 2)
    doc = rep.to_dict()
    assert doc["algorithm"] == "amplitude-rotation-search"
    assert len(doc["success_probabilities"]) == 3
