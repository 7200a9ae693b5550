"""Dynamic coherence of gates and channels.

A channel is mapped either to its Choi state (identity tensor channel acting on
half of an ebit, channel on the second half) or to its classical dual state,
where the ebit is dephased first:

    m_E = (1/d) sum_i P_i (x) E(P_i).

The interference power of a gate is the coherence of its classical dual state,
which reduces to the average coherence of the column outputs E(P_i).  Pauli and
other monomial gates score zero; the Hadamard gate scores 1 on a qubit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import measures as ms
from . import qkernel as qk
from .qkernel import (DensityOperator, HilbertSpec, InvariantError, QuantumChannel,
                      UnitaryOp)

MEASURES = ("l1", "relative_entropy", "log")


@dataclass(frozen=True)
class Multiplexer:
    """Block-diagonal controlled unitary sum_i P_i (x) U_i with the control first.

    Represented as the branch list plus dimensions so additivity checks can
    locate the control factor of the assembled matrix.
    """

    branches: tuple[np.ndarray, ...]

    def __post_init__(self):
        brs = tuple(np.asarray(b, dtype=complex) for b in self.branches)
        object.__setattr__(self, "branches", brs)
        if not brs:
            raise InvariantError("multiplexer needs at least one branch")
        d2 = brs[0].shape[0]
        for b in brs:
            if b.shape != (d2, d2):
                raise InvariantError("multiplexer branches must be square and same-dimensional")
            if not np.allclose(b.conj().T @ b, np.eye(d2), atol=1e-10):
                raise InvariantError("multiplexer branch is not unitary")

    @property
    def control_dim(self) -> int:
        return len(self.branches)

    @property
    def target_dim(self) -> int:
        return self.branches[0].shape[0]

    @property
    def matrix(self) -> np.ndarray:
        d1, d2 = self.control_dim, self.target_dim
        m = np.zeros((d1 * d2, d1 * d2), dtype=complex)
        for i, b in enumerate(self.branches):
            m[i * d2:(i + 1) * d2, i * d2:(i + 1) * d2] = b
        return m

    def unitary(self) -> UnitaryOp:
        return UnitaryOp(HilbertSpec((self.control_dim, self.target_dim)), self.matrix)


@dataclass(frozen=True)
class DualState:
    """Channel-state dual: kind 'choi' or 'classical', state on control (x) output.

    For kind 'classical' the control-reduced state is maximally mixed and the
    control off-diagonal blocks vanish.
    """

    kind: str
    state: DensityOperator

    def __post_init__(self):
        if self.kind not in ("choi", "classical"):
            raise InvariantError(f"unknown dual-state kind {self.kind!r}")
        if self.state.spec.n_subsystems != 2:
            raise InvariantError("dual state must live on control (x) output")
        if self.kind == "classical":
            d1, d2 = self.state.spec.dims
            control = qk.partial_trace(self.state, [0])
            if not np.allclose(control.matrix, np.eye(d1) / d1, atol=1e-9):
                raise InvariantError("classical dual: control marginal is not maximally mixed")
            m = self.state.matrix.reshape(d1, d2, d1, d2)
            for i in range(d1):
                for j in range(d1):
                    if i != j and np.abs(m[i, :, j, :]).max() > 1e-9:
                        raise InvariantError("classical dual: control off-diagonal block nonzero")


def _as_channel(e) -> QuantumChannel:
    if isinstance(e, QuantumChannel):
        return e
    if isinstance(e, UnitaryOp):
        return e.channel()
    if isinstance(e, Multiplexer):
        return e.unitary().channel()
    if isinstance(e, np.ndarray):
        d = e.shape[0]
        return UnitaryOp(HilbertSpec((d,)), e).channel()
    raise InvariantError(f"cannot interpret {type(e).__name__} as a channel")


def _column_outputs(channel: QuantumChannel) -> list[DensityOperator]:
    d = channel.in_spec.total_dim
    outs = []
    for i in range(d):
        p = np.zeros((d, d), dtype=complex)
        p[i, i] = 1
        rho = sum(k @ p @ k.conj().T for k in channel.kraus)
        outs.append(DensityOperator(channel.out_spec, rho))
    return outs


def choi_state(e) -> DualState:
    """Choi state (1/d) sum_ij |i><j| (x) E(|i><j|); channel acts on the second half."""
    channel = _as_channel(e)
    if not channel.is_square:
        raise InvariantError("choi_state requires a square channel")
    d = channel.in_spec.total_dim
    dout = channel.out_spec.total_dim
    omega = np.zeros(d * d, dtype=complex)
    omega[[i * d + i for i in range(d)]] = 1 / np.sqrt(d)
    acc = np.zeros((d * dout, d * dout), dtype=complex)
    for k in channel.kraus:
        v = np.kron(np.eye(d), k) @ omega
        acc += np.outer(v, v.conj())
    spec = HilbertSpec((d, dout))
    return DualState("choi", DensityOperator(spec, acc))


def classical_dual(e) -> DualState:
    """Classical dual m_E = (1/d) sum_i P_i (x) E(P_i)."""
    channel = _as_channel(e)
    if not channel.is_square:
        raise InvariantError("classical_dual requires a square channel")
    d = channel.in_spec.total_dim
    dout = channel.out_spec.total_dim
    m = np.zeros((d * dout, d * dout), dtype=complex)
    for i, rho in enumerate(_column_outputs(channel)):
        m[i * dout:(i + 1) * dout, i * dout:(i + 1) * dout] = rho.matrix / d
    return DualState("classical", DensityOperator(HilbertSpec((d, dout)), m))


def interference_power(e, measure: str = "relative_entropy") -> float:
    """Average output coherence of E over basis-projector inputs.

    Equal to the corresponding coherence of the classical dual state:
    C(m_E) = (1/d) sum_i C(E(P_i)), C_r(m_E) = (1/d) sum_i C_r(E(P_i)),
    and the log measure is log2(C(m_E) + 1).  For a unitary with the
    relative-entropy measure this is the average Shannon entropy of the
    squared column amplitudes.
    """
    if measure not in MEASURES:
        raise InvariantError(f"unknown measure {measure!r}; choose from {MEASURES}")
    channel = _as_channel(e)
    outs = _column_outputs(channel)
    d = len(outs)
    if measure == "relative_entropy":
        return sum(ms.rel_ent_coherence(r) for r in outs) / d
    c_avg = sum(ms.l1_coherence(r) for r in outs) / d
    if measure == "l1":
        return c_avg
    return float(np.log2(c_avg + 1.0))


def interference_additivity_check(v: np.ndarray | UnitaryOp, cu: Multiplexer,
                                  measure: str = "relative_entropy") -> tuple[float, float]:
    """Residuals |I(CU (V x 1)) - I(V) - I(CU)| and |I((V x 1) CU) - I(V) - I(CU)|.

    V must act on the control factor of the multiplexer.
    """
    vm = v.matrix if isinstance(v, UnitaryOp) else np.asarray(v, dtype=complex)
    if vm.shape != (cu.control_dim, cu.control_dim):
        raise InvariantError(
            f"V has dimension {vm.shape[0]}, control dimension is {cu.control_dim}")
    big_v = np.kron(vm, np.eye(cu.target_dim))
    cu_m = cu.matrix
    i_v = interference_power(vm, measure)
    i_cu = interference_power(cu_m, measure)
    r1 = abs(interference_power(cu_m @ big_v, measure) - i_v - i_cu)
    r2 = abs(interference_power(big_v @ cu_m, measure) - i_v - i_cu)
    return (float(r1), float(r2))


def dual_state_coherence(dual: DualState, measure: str = "relative_entropy") -> float:
    """Coherence of an assembled dual state, measured directly on the big matrix."""
    if measure == "relative_entropy":
        return ms.rel_ent_coherence(dual.state)
    if measure == "l1":
        return ms.l1_coherence(dual.state)
    if measure == "log":
        return ms.log_coherence(dual.state)
    raise InvariantError(f"unknown measure {measure!r}")
