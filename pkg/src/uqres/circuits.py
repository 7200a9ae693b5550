"""Circuit IR with multiplexers, basis measurements and outcome-conditioned gates.

Simulation enumerates every measurement branch exactly: a branch carries its
outcome record, probability, and pure post-state on the surviving (undiscarded)
wires.  A second walk extracts per-branch Kraus operators, which assemble the
branch-averaged channel of a circuit for Choi-fidelity comparisons.

Contextual circuits follow the control/data sandwich: prepare the control,
apply a multiplexer onto the data, rotate the control, measure it in the
computational basis, apply outcome-conditioned data corrections, and discard
the control.  Deterministic instances (gate teleportation, magic injection,
linear-combination circuits with correctable failure branches) are built here
and verified by :func:`is_deterministic`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qkernel as qk
from .interference import Multiplexer
from .qkernel import (CapExceededError, HilbertSpec, InvariantError, QuantumChannel,
                      StateVector)

BRANCH_CAP = 2 ** 16


# ---------------------------------------------------------------------------
# Instructions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gate:
    matrix: np.ndarray
    wires: tuple[int, ...]
    name: str | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvariantError("gate matrix must be square")
        if not np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=1e-10):
            raise InvariantError(f"gate {self.name or ''} is not unitary")


@dataclass(frozen=True)
class Mux:
    """Multiplexer: branch i of ``branches`` acts on ``targets`` when the control
    wire holds computational value i."""
    control: int
    branches: tuple[np.ndarray, ...]
    targets: tuple[int, ...]

    def __post_init__(self):
        brs = tuple(np.asarray(b, dtype=complex) for b in self.branches)
        object.__setattr__(self, "branches", brs)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        d = brs[0].shape[0]
        for b in brs:
            if b.shape != (d, d):
                raise InvariantError("mux branches must be square and same-dimensional")
            if not np.allclose(b.conj().T @ b, np.eye(d), atol=1e-10):
                raise InvariantError("mux branch is not unitary")


@dataclass(frozen=True)
class Measure:
    wire: int
    basis: str | np.ndarray = "Z"
    out: str = "m"


@dataclass(frozen=True)
class Cond:
    """Apply ``gate`` when every named outcome matches the given value."""
    when: dict
    gate: Gate


@dataclass(frozen=True)
class Discard:
    wire: int


Instruction = Gate | Mux | Measure | Cond | Discard


# ---------------------------------------------------------------------------
# Circuit container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Circuit:
    wires: HilbertSpec
    instructions: tuple = field(default_factory=tuple)

    def __post_init__(self):
        ins = tuple(self.instructions)
        object.__setattr__(self, "instructions", ins)
        dims = self.wires.dims
        n = len(dims)
        measured: dict[int, str] = {}
        discarded: set[int] = set()
        names: set[str] = set()

        def check_active(ws, what):
            for w in ws:
                if not (0 <= w < n):
                    raise InvariantError(f"{what} wire {w} out of range")
                if w in measured or w in discarded:
                    raise InvariantError(f"{what} acts on wire {w} after measurement/discard")

        for ins_ in ins:
            if isinstance(ins_, Gate):
                check_active(ins_.wires, "gate")
                if len(set(ins_.wires)) != len(ins_.wires):
                    raise InvariantError(f"gate wires {ins_.wires} repeat a wire")
                d_sub = int(np.prod([dims[w] for w in ins_.wires]))
                if ins_.matrix.shape != (d_sub, d_sub):
                    raise InvariantError(
                        f"gate dimension {ins_.matrix.shape[0]} does not match wires {ins_.wires}")
            elif isinstance(ins_, Mux):
                check_active((ins_.control,) + ins_.targets, "mux")
                mux_wires = (ins_.control,) + ins_.targets
                if len(set(mux_wires)) != len(mux_wires):
                    raise InvariantError("mux control/target wires overlap")
                if len(ins_.branches) != dims[ins_.control]:
                    raise InvariantError(
                        f"mux branch count {len(ins_.branches)} != control dimension "
                        f"{dims[ins_.control]}")
                d_sub = int(np.prod([dims[w] for w in ins_.targets]))
                if ins_.branches[0].shape != (d_sub, d_sub):
                    raise InvariantError("mux branch dimension does not match target wires")
            elif isinstance(ins_, Measure):
                check_active((ins_.wire,), "measure")
                if isinstance(ins_.basis, str):
                    if ins_.basis not in ("Z", "X", "Y"):
                        raise InvariantError(f"unknown basis {ins_.basis!r}")
                    if ins_.basis in ("X", "Y") and dims[ins_.wire] != 2:
                        raise InvariantError("X/Y bases are qubit-only; pass a custom matrix")
                if ins_.out in names:
                    raise InvariantError(f"duplicate outcome name {ins_.out!r}")
                names.add(ins_.out)
                measured[ins_.wire] = ins_.out
            elif isinstance(ins_, Cond):
                unknown = set(ins_.when) - names
                if unknown:
                    raise InvariantError(f"conditioned gate references unmeasured {unknown}")
                check_active(ins_.gate.wires, "conditioned gate")
            elif isinstance(ins_, Discard):
                w = ins_.wire
                if w in discarded:
                    raise InvariantError(f"wire {w} discarded twice")
                if w not in measured:
                    raise InvariantError(f"wire {w} must be measured before discard")
                discarded.add(w)
            else:
                raise InvariantError(f"unknown instruction {type(ins_).__name__}")
        object.__setattr__(self, "_discarded", frozenset(discarded))

    @property
    def surviving_wires(self) -> tuple[int, ...]:
        return tuple(w for w in range(len(self.wires.dims)) if w not in self._discarded)

    @property
    def n_wires(self) -> int:
        return len(self.wires.dims)


def _basis_matrix(basis, d: int) -> np.ndarray:
    if isinstance(basis, str):
        if basis == "Z":
            return np.eye(d, dtype=complex)
        if basis == "X":
            return qk.H.copy()
        if basis == "Y":
            return np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2)
        raise InvariantError(f"unknown basis {basis!r}")
    b = np.asarray(basis, dtype=complex)
    if b.shape != (d, d) or not np.allclose(b.conj().T @ b, np.eye(d), atol=1e-10):
        raise InvariantError("custom measurement basis must be a unitary of the wire dimension")
    return b


# ---------------------------------------------------------------------------
# Branch simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchOutcome:
    """One measurement branch: outcome record, probability, surviving-wire state."""
    outcomes: dict
    probability: float
    state: StateVector


def simulate(circuit: Circuit, input_state: StateVector,
             branch_cap: int = BRANCH_CAP, prune: float = 1e-14) -> list[BranchOutcome]:
    """Exhaustive branch enumeration with exact probabilities and post-states.

    Branches with probability below ``prune`` are dropped; the remaining
    probabilities still sum to 1 up to that tolerance.
    """
    if input_state.spec.dims != circuit.wires.dims:
        raise InvariantError("input state dims do not match circuit wires")
    dims = circuit.wires.dims
    branches: list[tuple[dict, np.ndarray, float]] = [({}, input_state.amplitudes.copy(), 1.0)]
    pending_discard: list[int] = []

    for ins in circuit.instructions:
        if isinstance(ins, Gate):
            branches = [(rec, qk.apply_on_wires(a, ins.matrix, ins.wires, dims), p)
                        for rec, a, p in branches]
        elif isinstance(ins, Mux):
            m = _mux_matrix(ins, dims)
            ws = (ins.control,) + ins.targets
            branches = [(rec, qk.apply_on_wires(a, m, ws, dims), p) for rec, a, p in branches]
        elif isinstance(ins, Measure):
            d = dims[ins.wire]
            b = _basis_matrix(ins.basis, d)
            new = []
            for rec, a, p in branches:
                for k in range(d):
                    col = b[:, k]
                    proj = np.outer(col, col.conj())
                    a_k = qk.apply_on_wires(a, proj, [ins.wire], dims)
                    pk = float(np.vdot(a_k, a_k).real)
                    if pk > prune:
                        new.append(({**rec, ins.out: k}, a_k / np.sqrt(pk), p * pk))
            branches = new
            if len(branches) > branch_cap:
                raise CapExceededError(f"branch count exceeds cap {branch_cap}")
        elif isinstance(ins, Cond):
            branches = [
                (rec,
                 qk.apply_on_wires(a, ins.gate.matrix, ins.gate.wires, dims)
                 if all(rec.get(k) == v for k, v in ins.when.items()) else a,
                 p)
                for rec, a, p in branches]
        elif isinstance(ins, Discard):
            pending_discard.append(ins.wire)

    # Contract discarded wires: after measurement each holds a definite basis
    # state, so the branch state factorizes exactly.
    survivors = [w for w in range(len(dims)) if w not in pending_discard]
    out_dims = tuple(dims[w] for w in survivors) if survivors else (1,)
    spec = HilbertSpec(out_dims, cap=circuit.wires.cap)
    basis_of = {m.wire: _basis_matrix(m.basis, dims[m.wire])
                for m in circuit.instructions if isinstance(m, Measure)}
    name_of = {m.wire: m.out for m in circuit.instructions if isinstance(m, Measure)}
    results = []
    for rec, a, p in branches:
        tens = a.reshape(dims)
        for w in sorted(pending_discard, reverse=True):
            col = basis_of[w][:, rec[name_of[w]]]
            tens = np.tensordot(col.conj(), tens, axes=([0], [w]))
        results.append(BranchOutcome(rec, p, StateVector(spec, tens.reshape(-1))))
    return results


def _mux_matrix(mux: Mux, dims) -> np.ndarray:
    """Full matrix of a mux on (control,) + targets, control as leading factor."""
    dc = dims[mux.control]
    dt = mux.branches[0].shape[0]
    m = np.zeros((dc * dt, dc * dt), dtype=complex)
    for i, b in enumerate(mux.branches):
        m[i * dt:(i + 1) * dt, i * dt:(i + 1) * dt] = b
    return m


def branch_kraus(circuit: Circuit) -> list[tuple[dict, np.ndarray]]:
    """Per-branch Kraus operators from the full input space to the surviving wires.

    The set over all branches satisfies sum K†K = identity, so it defines the
    branch-averaged channel of the circuit.
    """
    dims = circuit.wires.dims
    total = int(np.prod(dims))
    branches: list[tuple[dict, np.ndarray]] = [({}, np.eye(total, dtype=complex))]
    pending_discard: list[int] = []

    def lift(op, wires):
        return qk.embed_operator(op, wires, dims)

    for ins in circuit.instructions:
        if isinstance(ins, Gate):
            g = lift(ins.matrix, ins.wires)
            branches = [(rec, g @ k) for rec, k in branches]
        elif isinstance(ins, Mux):
            g = lift(_mux_matrix(ins, dims), (ins.control,) + ins.targets)
            branches = [(rec, g @ k) for rec, k in branches]
        elif isinstance(ins, Measure):
            d = dims[ins.wire]
            b = _basis_matrix(ins.basis, d)
            new = []
            for rec, k in branches:
                for out in range(d):
                    col = b[:, out]
                    proj = lift(np.outer(col, col.conj()), [ins.wire])
                    kk = proj @ k
                    if np.abs(kk).max() > 1e-12:
                        new.append(({**rec, ins.out: out}, kk))
            branches = new
        elif isinstance(ins, Cond):
            g = lift(ins.gate.matrix, ins.gate.wires)
            branches = [(rec, g @ k if all(rec.get(n) == v for n, v in ins.when.items()) else k)
                        for rec, k in branches]
        elif isinstance(ins, Discard):
            pending_discard.append(ins.wire)

    basis_of = {m.wire: _basis_matrix(m.basis, dims[m.wire])
                for m in circuit.instructions if isinstance(m, Measure)}
    name_of = {m.wire: m.out for m in circuit.instructions if isinstance(m, Measure)}
    out = []
    for rec, k in branches:
        mat = k.reshape(dims + (total,))
        for w in sorted(pending_discard, reverse=True):
            col = basis_of[w][:, rec[name_of[w]]]
            mat = np.tensordot(col.conj(), mat, axes=([0], [w]))
        out.append((rec, mat.reshape(-1, total)))
    return out


def induced_channel(circuit: Circuit, input_wires, fixed: dict | None = None) -> QuantumChannel:
    """Branch-averaged channel restricted to ``input_wires``.

    ``fixed`` maps every other wire to its (computational) preparation value;
    unlisted non-input wires default to 0.
    """
    dims = circuit.wires.dims
    input_wires = [int(w) for w in input_wires]
    fixed = dict(fixed or {})
    rest = [w for w in range(len(dims)) if w not in input_wires]
    d_in = int(np.prod([dims[w] for w in input_wires])) if input_wires else 1
    inj = np.zeros((int(np.prod(dims)), d_in), dtype=complex)
    for idx in range(d_in):
        digits = np.unravel_index(idx, tuple(dims[w] for w in input_wires)) if input_wires else ()
        full = [0] * len(dims)
        for w, v in zip(input_wires, digits):
            full[w] = int(v)
        for w in rest:
            full[w] = int(fixed.get(w, 0))
        inj[np.ravel_multi_index(full, dims), idx] = 1
    ks = [k @ inj for _, k in branch_kraus(circuit)]
    surv = circuit.surviving_wires
    out_dims = tuple(dims[w] for w in surv) if surv else (1,)
    in_dims = tuple(dims[w] for w in input_wires) if input_wires else (1,)
    return QuantumChannel(HilbertSpec(in_dims), HilbertSpec(out_dims), tuple(ks))


def is_deterministic(circuit: Circuit, inputs, tol: float = 1e-9,
                     keep=None) -> tuple[bool, float]:
    """True iff all (kept) branches agree up to global phase on every sampled input.

    Returns the verdict together with the maximum branch infidelity observed.
    ``keep`` optionally filters branches by their outcome record (e.g. to drop a
    post-selected failure branch).
    """
    worst = 0.0
    for psi in inputs:
        branches = simulate(circuit, psi)
        if keep is not None:
            branches = [b for b in branches if keep(b.outcomes)]
        if not branches:
            raise InvariantError("no branches survive the filter")
        ref = branches[0].state.amplitudes
        for b in branches[1:]:
            fid = abs(np.vdot(ref, b.state.amplitudes)) ** 2
            worst = max(worst, 1.0 - float(fid))
    return worst <= tol, worst


def _is_monomial(m: np.ndarray, tol: float = 1e-10) -> bool:
    """One nonzero entry per row and column: diagonal or basis-permuting gates."""
    mask = np.abs(m) > tol
    return bool((mask.sum(axis=0) == 1).all() and (mask.sum(axis=1) == 1).all())


def free_circuit_check(circuit: Circuit) -> bool:
    """True iff every gate is diagonal/basis-permuting and all measurements are Z.

    Such circuits never generate superposition from basis inputs; they form the
    classical free set of the contextual model.
    """
    for ins in circuit.instructions:
        if isinstance(ins, Gate) and not _is_monomial(ins.matrix):
            return False
        if isinstance(ins, Cond) and not _is_monomial(ins.gate.matrix):
            return False
        if isinstance(ins, Mux) and not all(_is_monomial(b) for b in ins.branches):
            return False
        if isinstance(ins, Measure) and not (isinstance(ins.basis, str) and ins.basis == "Z"):
            return False
    return True


# ---------------------------------------------------------------------------
# Contextual constructions
# ---------------------------------------------------------------------------

def contextual_circuit(u1: np.ndarray, cu: Multiplexer, u2: np.ndarray,
                       corrections) -> Circuit:
    """Control/data sandwich with measured-control feedback.

    Wire 0 is the control (dimension = branch count of ``cu``), wire 1 the
    data.  The feedback stage measures the rotated control in the computational
    basis and applies ``corrections[k]`` to the data on outcome k, then
    discards the control.
    """
    d1, d2 = cu.control_dim, cu.target_dim
    corrections = [np.asarray(c, dtype=complex) for c in corrections]
    if len(corrections) != d1:
        raise InvariantError(f"need {d1} corrections, got {len(corrections)}")
    ins = [Gate(u1, (0,), name="U1"),
           Mux(0, cu.branches, (1,)),
           Gate(u2, (0,), name="U2"),
           Measure(0, "Z", "ctx")]
    ins += [Cond({"ctx": k}, Gate(c, (1,), name=f"V{k}")) for k, c in enumerate(corrections)]
    ins.append(Discard(0))
    return Circuit(HilbertSpec((d1, d2)), tuple(ins))


def _prep_amplitudes(coeffs, unitaries) -> tuple[np.ndarray, list[np.ndarray], float]:
    """Standard combination bookkeeping: amplitudes sqrt(|c_i|/lambda), phases
    folded into the unitaries, lambda = sum |c_i|."""
    c = np.asarray(coeffs, dtype=complex)
    us = [np.asarray(u, dtype=complex) for u in unitaries]
    if len(us) != c.size or c.size == 0:
        raise InvariantError("need one unitary per coefficient")
    mags = np.abs(c)
    lam = float(mags.sum())
    if lam < 1e-12:
        raise InvariantError("all coefficients vanish")
    alpha = np.sqrt(mags / lam).astype(complex)
    folded = [u if mag < 1e-15 else (ci / mag) * u
              for ci, mag, u in zip(c, mags, us)]
    return alpha, folded, lam


def contextual_from_lcu(target: np.ndarray, coeffs, unitaries,
                        prep: np.ndarray | None = None) -> Circuit:
    """Deterministic contextual realization of ``target`` = sum_i c_i U_i.

    The control is prepared with amplitudes sqrt(|c_i| / sum|c|) (coefficient
    phases fold into the branch unitaries) and un-prepared with the inverse.
    Every measurement branch operator must be proportional to a unitary, in
    which case the conditioned correction rotates it back onto the target;
    raises if some branch is not correctable.  ``prep`` overrides the default
    completion of the amplitude column (its first column must equal it), which
    matters when only a particular completion makes all branches correctable.
    """
    target = np.asarray(target, dtype=complex)
    alpha, us, _ = _prep_amplitudes(coeffs, unitaries)
    d1 = alpha.size
    d2 = us[0].shape[0]
    if prep is None:
        u1 = _complete_column(alpha)
    else:
        u1 = np.asarray(prep, dtype=complex)
        if np.abs(u1[:, 0] - alpha).max() > 1e-10:
            raise InvariantError("prep's first column must equal the amplitude vector")
    u2 = u1.conj().T
    corrections = []
    for k in range(d1):
        bk = sum(u2[k, i] * alpha[i] * us[i] for i in range(d1))
        gram = bk.conj().T @ bk
        scale = float(np.trace(gram).real) / d2
        if scale < 1e-12:
            corrections.append(np.eye(d2, dtype=complex))   # branch never occurs
            continue
        if np.abs(gram - scale * np.eye(d2)).max() > 1e-9:
            raise InvariantError(f"branch {k} is not proportional to a unitary")
        corrections.append(target @ bk.conj().T / np.sqrt(scale))
    return contextual_circuit(u1, Multiplexer(tuple(us)), u2, corrections)


def _complete_column(col: np.ndarray) -> np.ndarray:
    v = col.reshape(-1, 1)
    basis = [v[:, 0]]
    n = v.shape[0]
    for seed in range(n):
        if len(basis) == n:
            break
        cand = np.zeros(n, dtype=complex)
        cand[seed] = 1.0
        for b in basis:
            cand = cand - b * np.vdot(b, cand)
        norm = np.linalg.norm(cand)
        if norm > 1e-7:
            basis.append(cand / norm)
    return np.column_stack(basis)


def contextual_h() -> Circuit:
    """H as an equal superposition of the Z and X contexts, with Pauli fix-up."""
    return contextual_from_lcu(qk.H, np.array([1, 1]) / np.sqrt(2), (qk.Z, qk.X))


def contextual_t() -> Circuit:
    """T as cos(pi/8) 1 + sin(pi/8) (iZ) with diagonal branch corrections."""
    return contextual_from_lcu(qk.T, np.array([np.cos(np.pi / 8), np.sin(np.pi / 8)]),
                               (np.eye(2), 1j * qk.Z))


def contextual_cz() -> Circuit:
    """CZ as the four-term diagonal-Pauli combination (11 + Z1 + 1Z - ZZ)/2.

    The Hadamard-pair completion keeps every failure branch a diagonal sign
    pattern, hence correctable by diagonal Paulis.
    """
    us = (np.eye(4), np.kron(qk.Z, qk.I2), np.kron(qk.I2, qk.Z), np.kron(qk.Z, qk.Z))
    return contextual_from_lcu(qk.CZ, np.array([1, 1, 1, -1]) / 2.0, us,
                               prep=np.kron(qk.H, qk.H))


def h_teleportation() -> Circuit:
    """One-bit gate teleportation of H.

    Wire 0 carries the input and is measured in the X basis; wire 1 starts in
    |0>, is prepared to |+>, couples through CZ, and holds H|psi> on every
    branch after the conditioned X fix.
    """
    return Circuit(HilbertSpec((2, 2)), (
        Gate(qk.H, (1,), name="H"),
        Gate(qk.CZ, (0, 1), name="CZ"),
        Measure(0, "X", "s"),
        Cond({"s": 1}, Gate(qk.X, (1,), name="X")),
        Discard(0),
    ))


def t_injection() -> Circuit:
    """Magic-state injection of T.

    Wire 1 is prepared in T|+>; a CX controlled by the ancilla targets the data
    wire 0, which is then read out in Z.  On outcome 1 the ancilla needs the
    X-then-S† fix; both branches end in T|psi> up to global phase.
    """
    correction = qk.GATES["SDG"] @ qk.X
    return Circuit(HilbertSpec((2, 2)), (
        Gate(qk.H, (1,), name="H"),
        Gate(qk.T, (1,), name="T"),
        Gate(qk.CX, (1, 0), name="CX"),
        Measure(0, "Z", "s"),
        Cond({"s": 1}, Gate(correction, (1,), name="SdgX")),
        Discard(0),
    ))


def _pauli_power(a: int, b: int) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    if a:
        m = qk.X @ m
    if b:
        m = qk.Z @ m
    return m


def encrypted_t_injection(key: tuple[int, int]) -> Circuit:
    """T injection on a one-time-padded input X^a Z^b |psi>, followed by decryption.

    Pushing T through the pad leaves X^a Z^{a xor b} S^{-a}; with the key known
    classically the decryption applies S^a Z^{a xor b} X^a, so every branch
    ends in T|psi> exactly.
    """
    a, b = int(key[0]) & 1, int(key[1]) & 1
    base = t_injection()
    s_pow = np.linalg.matrix_power(qk.S, a)
    decrypt = s_pow @ _pauli_power(a, a ^ b).conj().T
    ins = base.instructions[:-1] + (Gate(decrypt, (1,), name="decrypt"),) + base.instructions[-1:]
    return Circuit(base.wires, ins)


def lcu_circuit(coeffs, unitaries) -> Circuit:
    """Probabilistic prepare/select/unprepare circuit; control outcome 0 succeeds."""
    alpha, us, _ = _prep_amplitudes(coeffs, unitaries)
    u1 = _complete_column(alpha)
    return Circuit(HilbertSpec((alpha.size, us[0].shape[0])), (
        Gate(u1, (0,), name="prep"),
        Mux(0, tuple(us), (1,)),
        Gate(u1.conj().T, (0,), name="unprep"),
        Measure(0, "Z", "anc"),
        Discard(0),
    ))


# ---------------------------------------------------------------------------
# JSON round-trip
# ---------------------------------------------------------------------------

def _mat_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _mat_from_json(rows) -> np.ndarray:
    return np.array([[complex(v[0], v[1]) for v in row] for row in rows])


def circuit_to_json(circuit: Circuit) -> dict:
    ops = []
    for ins in circuit.instructions:
        if isinstance(ins, Gate):
            entry = {"type": "gate", "wires": list(ins.wires)}
            if ins.name and ins.name in qk.GATES and np.allclose(qk.GATES[ins.name], ins.matrix):
                entry["name"] = ins.name
            else:
                entry["matrix"] = _mat_to_json(ins.matrix)
            ops.append(entry)
        elif isinstance(ins, Mux):
            ops.append({"type": "mux", "control": ins.control,
                        "branches": [_mat_to_json(b) for b in ins.branches],
                        "targets": list(ins.targets)})
        elif isinstance(ins, Measure):
            basis = ins.basis if isinstance(ins.basis, str) else _mat_to_json(ins.basis)
            ops.append({"type": "measure", "wire": ins.wire, "basis": basis, "out": ins.out})
        elif isinstance(ins, Cond):
            ops.append({"type": "cond", "when": dict(ins.when),
                        "gate": {"wires": list(ins.gate.wires),
                                 "matrix": _mat_to_json(ins.gate.matrix)}})
        elif isinstance(ins, Discard):
            ops.append({"type": "discard", "wire": ins.wire})
    return {"wires": list(circuit.wires.dims), "ops": ops}


def circuit_from_json(doc: dict) -> Circuit:
    dims = tuple(int(d) for d in doc["wires"])
    ins: list[Instruction] = []
    for op in doc["ops"]:
        kind = op["type"]
        if kind == "gate":
            if "name" in op:
                mat = qk.GATES.get(op["name"].upper())
                if mat is None:
                    raise InvariantError(f"unknown gate name {op['name']!r}")
                ins.append(Gate(mat, tuple(op["wires"]), name=op["name"].upper()))
            else:
                ins.append(Gate(_mat_from_json(op["matrix"]), tuple(op["wires"])))
        elif kind == "mux":
            ins.append(Mux(int(op["control"]),
                           tuple(_mat_from_json(b) for b in op["branches"]),
                           tuple(op["targets"])))
        elif kind == "measure":
            basis = op.get("basis", "Z")
            if not isinstance(basis, str):
                basis = _mat_from_json(basis)
            ins.append(Measure(int(op["wire"]), basis, op["out"]))
        elif kind == "cond":
            g = op["gate"]
            ins.append(Cond({k: int(v) for k, v in op["when"].items()},
                            Gate(_mat_from_json(g["matrix"]), tuple(g["wires"]))))
        elif kind == "discard":
            ins.append(Discard(int(op["wire"])))
        else:
            raise InvariantError(f"unknown op type {kind!r}")
    return Circuit(HilbertSpec(dims), tuple(ins))
