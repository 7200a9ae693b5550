"""Resource accounting for some standard circuit families.

Sandwiched circuits (V x 1) CU (W x 1) get their interference evaluated by the
explicit column-entropy formula, independently of the channel-based measure,
so the two routes can be cross-checked.  The one-control-qubit universality
construction, linear combinations of unitaries, and fixed-point-free search
are analyzed for the same quantities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import interference as itf
from . import measures as ms
from . import qkernel as qk
from .circuits import Circuit, Gate, Mux
from .interference import Multiplexer
from .qkernel import HilbertSpec, InvariantError, StateVector


@dataclass(frozen=True)
class AlgorithmReport:
    """Summary of one analysis: parameters, interference terms, residuals, successes."""

    algorithm: str
    parameters: dict = field(default_factory=dict)
    interference_terms: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    success_probabilities: tuple = ()

    def __post_init__(self):
        for name, value in self.residuals.items():
            if value < 0:
                raise InvariantError(f"negative residual {name}: {value}")

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm,
                "parameters": dict(self.parameters),
                "interference_terms": dict(self.interference_terms),
                "residuals": dict(self.residuals),
                "success_probabilities": list(self.success_probabilities)}


# ---------------------------------------------------------------------------
# Sandwiched circuits
# ---------------------------------------------------------------------------

def sandwiched_interference(v: np.ndarray, cu: Multiplexer, w: np.ndarray) -> float:
    """Average column entropy of (V x 1) CU (W x 1), evaluated termwise.

    p_{(a,mu),(b,nu)} = |sum_i v_{ai} w_{ib} U_{i, mu nu}|^2 is averaged over the
    input indices (b, nu) as a Shannon entropy over the output indices; this is
    the relative-entropy interference power computed without assembling the
    classical dual state.
    """
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    d1, d2 = cu.control_dim, cu.target_dim
    if v.shape != (d1, d1) or w.shape != (d1, d1):
        raise InvariantError("V and W must act on the control factor")
    us = np.stack(cu.branches)                      # (i, mu, nu)
    total = 0.0
    for b in range(d1):
        # amp[a, mu, nu] = sum_i v_{ai} w_{ib} U_{i, mu, nu}
        amp = np.einsum("ai,i,imn->amn", v, w[:, b], us)
        for nu in range(d2):
            total += qk.shannon_entropy(np.abs(amp[:, :, nu]) ** 2)
    return total / (d1 * d2)


def sandwich_circuit(v: np.ndarray, cu: Multiplexer, w: np.ndarray) -> Circuit:
    """The sandwiched unitary as a two-wire circuit (control, data)."""
    return Circuit(HilbertSpec((cu.control_dim, cu.target_dim)), (
        Gate(np.asarray(w, dtype=complex), (0,), name="W"),
        Mux(0, cu.branches, (1,)),
        Gate(np.asarray(v, dtype=complex), (0,), name="V"),
    ))


# ---------------------------------------------------------------------------
# One-control-qubit universality construction
# ---------------------------------------------------------------------------

def rotation_v(epsilon: float) -> np.ndarray:
    """V_eps = [[sqrt(1-eps), -sqrt(eps)], [sqrt(eps), sqrt(1-eps)]]."""
    if not 0.0 < epsilon < 1.0:
        raise InvariantError("epsilon must lie strictly between 0 and 1")
    c, s = np.sqrt(1.0 - epsilon), np.sqrt(epsilon)
    return np.array([[c, -s], [s, c]], dtype=complex)


def one_control_build(u: np.ndarray, epsilon: float) -> tuple[Circuit, StateVector]:
    """Circuit CU (V_eps x 1) on |0>|0..0> and its final state.

    The final state is sqrt(1-eps) |0>|0..0> + sqrt(eps) |1> U|0..0>.
    """
    u = np.asarray(u, dtype=complex)
    n_dim = u.shape[0]
    if n_dim > 64:
        raise InvariantError("data register limited to 6 qubits")
    v = rotation_v(epsilon)
    circuit = Circuit(HilbertSpec((2, n_dim)), (
        Gate(v, (0,), name="V_eps"),
        Mux(0, (np.eye(n_dim, dtype=complex), u), (1,)),
    ))
    amps = np.zeros(2 * n_dim, dtype=complex)
    amps[0] = np.sqrt(1.0 - epsilon)
    amps[n_dim:] = np.sqrt(epsilon) * u[:, 0]
    return circuit, StateVector(HilbertSpec((2, n_dim)), amps)


def one_control_interference_decomposition(u: np.ndarray, epsilon: float) -> float:
    """Residual |I(CU (V_eps x 1)) - I(V_eps) - I(U)/2| (relative-entropy measure)."""
    u = np.asarray(u, dtype=complex)
    v = rotation_v(epsilon)
    cu = Multiplexer((np.eye(u.shape[0], dtype=complex), u))
    whole = cu.matrix @ np.kron(v, np.eye(u.shape[0]))
    i_whole = itf.interference_power(whole)
    i_v = itf.interference_power(v)
    i_u = itf.interference_power(u)
    return float(abs(i_whole - i_v - 0.5 * i_u))


def one_control_report(u: np.ndarray, epsilon: float) -> AlgorithmReport:
    v = rotation_v(epsilon)
    circuit, state = one_control_build(u, epsilon)
    ent = ms.entanglement_entropy(state, [0])
    return AlgorithmReport(
        algorithm="one-control-qubit",
        parameters={"epsilon": epsilon, "data_dim": int(np.asarray(u).shape[0])},
        interference_terms={
            "c_l1_v": itf.interference_power(v, "l1"),
            "c_rel_v": itf.interference_power(v),
            "i_u": itf.interference_power(np.asarray(u, dtype=complex)),
            "control_data_entanglement": ent,
        },
        residuals={"additive_decomposition": one_control_interference_decomposition(u, epsilon)},
    )


# ---------------------------------------------------------------------------
# Linear combination of unitaries
# ---------------------------------------------------------------------------

def lcu_apply(coeffs, unitaries, psi: StateVector) -> tuple[StateVector, float]:
    """Prepare/select/unprepare with post-selection on control |0>.

    Phases of the coefficients fold into the unitaries; the control is prepared
    with amplitudes sqrt(|c_i| / lambda), lambda = sum |c_i|.  Returns the
    normalized (sum_i c_i U_i)|psi> and success probability
    ||sum c_i U_i psi||^2 / lambda^2.  Raises on complete destructive
    interference.
    """
    c = np.asarray(coeffs, dtype=complex)
    us = [np.asarray(u, dtype=complex) for u in unitaries]
    if len(us) != c.size or c.size == 0:
        raise InvariantError("need one unitary per coefficient")
    d = us[0].shape[0]
    if psi.dim != d:
        raise InvariantError("state dimension does not match the unitaries")
    lam = float(np.abs(c).sum())
    if lam < 1e-12:
        raise InvariantError("all coefficients vanish")
    out = sum(ci * (ui @ psi.amplitudes) for ci, ui in zip(c, us))
    norm2 = float(np.vdot(out, out).real)
    prob = norm2 / lam ** 2
    if norm2 < 1e-24:
        raise InvariantError("complete destructive interference: zero output")
    return StateVector(psi.spec, out / np.sqrt(norm2)), prob


# ---------------------------------------------------------------------------
# Search as a two-dimensional rotation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroverStep:
    step: int
    success_probability: float
    closed_form: float
    coherence_computational: float
    coherence_rotated: float


def grover_trace(n: int, marked: int, iterations: int) -> list[GroverStep]:
    """Per-step success probabilities and coherences of standard search.

    Success after k steps is sin^2((2k+1) theta) with theta = asin(2^{-n/2});
    the rotated-basis coherence lives on the 2D span of the marked state and
    the uniform unmarked state and stays below 1 bit, unlike the
    computational-basis coherence which starts at n bits.
    """
    if n > 6:
        raise InvariantError("search register limited to 6 qubits")
    dim = 2 ** n
    if not 0 <= marked < dim:
        raise InvariantError("marked index out of range")
    theta = np.arcsin(dim ** -0.5)
    spec = HilbertSpec((2,) * n)
    state = np.full(dim, dim ** -0.5, dtype=complex)
    unmarked = np.ones(dim, dtype=complex)
    unmarked[marked] = 0
    unmarked /= np.linalg.norm(unmarked)
    marked_vec = np.zeros(dim, dtype=complex)
    marked_vec[marked] = 1
    uniform = np.full(dim, dim ** -0.5, dtype=complex)
    oracle = np.eye(dim) - 2 * np.outer(marked_vec, marked_vec.conj())
    diffusion = 2 * np.outer(uniform, uniform.conj()) - np.eye(dim)

    def rotated_coherence(vec):
        amp2 = np.array([abs(np.vdot(marked_vec, vec)) ** 2,
                         abs(np.vdot(unmarked, vec)) ** 2])
        return qk.shannon_entropy(amp2 / amp2.sum())

    steps = []
    for k in range(iterations + 1):
        sv = StateVector(spec, state / np.linalg.norm(state))
        steps.append(GroverStep(
            step=k,
            success_probability=float(abs(state[marked]) ** 2),
            closed_form=float(np.sin((2 * k + 1) * theta) ** 2),
            coherence_computational=ms.rel_ent_coherence(sv),
            coherence_rotated=rotated_coherence(state),
        ))
        state = diffusion @ (oracle @ state)
    return steps


def grover_report(n: int, marked: int, iterations: int) -> AlgorithmReport:
    steps = grover_trace(n, marked, iterations)
    return AlgorithmReport(
        algorithm="amplitude-rotation-search",
        parameters={"n": n, "marked": marked, "iterations": iterations},
        interference_terms={
            "initial_coherence_computational": steps[0].coherence_computational,
            "max_coherence_rotated": max(s.coherence_rotated for s in steps),
        },
        residuals={"closed_form_mismatch": max(
            abs(s.success_probability - s.closed_form) for s in steps)},
        success_probabilities=tuple(s.success_probability for s in steps),
    )
