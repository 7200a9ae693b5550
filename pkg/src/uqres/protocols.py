"""Two-party protocol simulations with enforced communication constraints.

Party A is the server, party B the client.  Protocols run on a streaming
register of named qubits (measured qubits are contracted out immediately), so
branch enumeration stays exact while the live register stays small.  Every
action is logged to an append-only transcript; the only communication
primitive is a single final broadcast, and a validator counts directed
pre-broadcast messages (which the implemented protocols never emit).

Measurement outcomes and PR-box hidden bits are drawn from an OutcomeSource:
``SamplingSource`` draws with a seeded generator, while ``enumerate_runs``
replays a protocol over every outcome path for exhaustive verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import qkernel as qk
from .qkernel import HilbertSpec, InvariantError, ResourceError, StateVector

PARTIES = ("A", "B")


# ---------------------------------------------------------------------------
# Keys, boxes, transcripts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PauliKey:
    """One-time-pad key bits (a, b) for the encoding X^a Z^b."""
    a: int
    b: int

    def __post_init__(self):
        object.__setattr__(self, "a", int(self.a) & 1)
        object.__setattr__(self, "b", int(self.b) & 1)


def pauli_pad(key: PauliKey) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    if key.b:
        m = qk.Z @ m
    if key.a:
        m = qk.X @ m
    return m


def pauli_encrypt(psi: StateVector, key: PauliKey) -> StateVector:
    """X^a Z^b |psi> on a single qubit."""
    if psi.spec.dims != (2,):
        raise InvariantError("pauli_encrypt acts on a single qubit")
    return qk.apply_unitary(psi, pauli_pad(key))


@dataclass
class PRBox:
    """One-shot nonsignaling box: on inputs (x, y) outputs (a, b) with a xor b = x y.

    The hidden bit is the side-A output; it is uniform, fixed at first use, and
    the box cannot be called twice.
    """
    box_id: int
    hidden: int | None = None
    consumed: bool = False


def pr_box_call(box: PRBox, x: int, y: int, source: "OutcomeSource | None" = None,
                transcript: "Transcript | None" = None) -> tuple[int, int]:
    if box.consumed:
        raise ResourceError(f"PR box {box.box_id} already consumed")
    box.consumed = True
    if box.hidden is None:
        if source is None:
            raise ResourceError("unsampled PR box needs an outcome source")
        box.hidden = source.draw(f"prbox{box.box_id}", [0.5, 0.5])
    a = int(box.hidden) & 1
    b = a ^ ((int(x) & 1) * (int(y) & 1))
    if transcript is not None:
        transcript.log("A", "pr-box-call", {"box": box.box_id, "x": int(x) & 1})
        transcript.log("B", "pr-box-call", {"box": box.box_id, "y": int(y) & 1})
    return a, b


@dataclass(frozen=True)
class TranscriptEvent:
    t: int
    party: str
    action: str
    payload: dict


class Transcript:
    """Append-only event log for a two-party run."""

    ACTIONS = ("local-op", "measure", "pr-box-call", "broadcast", "message")

    def __init__(self):
        self.events: list[TranscriptEvent] = []

    def log(self, party: str, action: str, payload: dict | None = None):
        if party not in PARTIES:
            raise InvariantError(f"unknown party {party!r}")
        if action not in self.ACTIONS:
            raise InvariantError(f"unknown action {action!r}")
        self.events.append(TranscriptEvent(len(self.events), party, action,
                                           dict(payload or {})))

    def to_json_lines(self) -> list[str]:
        import json
        return [json.dumps({"t": e.t, "party": e.party, "action": e.action,
                            "payload": e.payload}, sort_keys=True)
                for e in self.events]


def lobc_violations(transcript: Transcript) -> int:
    """Count directed messages before the first broadcast (must be 0 for LOBC)."""
    count = 0
    for e in transcript.events:
        if e.action == "broadcast":
            break
        if e.action == "message":
            count += 1
    return count


def measurement_bases_at(transcript: Transcript, party: str) -> set[str]:
    return {e.payload.get("basis", "?") for e in transcript.events
            if e.party == party and e.action == "measure"}


# ---------------------------------------------------------------------------
# Outcome sources (sampling / exhaustive replay)
# ---------------------------------------------------------------------------

class OutcomeSource:
    probability: float

    def draw(self, label: str, probs) -> int:
        raise NotImplementedError


class SamplingSource(OutcomeSource):
    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.probability = 1.0
        self.path: list[tuple[str, int]] = []

    def draw(self, label, probs):
        p = np.asarray(probs, dtype=float)
        p = p / p.sum()
        k = int(self.rng.choice(len(p), p=p))
        self.probability *= float(p[k])
        self.path.append((label, k))
        return k


class _Fork(Exception):
    def __init__(self, options):
        self.options = options


class ReplaySource(OutcomeSource):
    """Follows a prescribed outcome prefix, forking when the prefix runs out."""

    def __init__(self, prefix: tuple[int, ...]):
        self.prefix = prefix
        self.pos = 0
        self.probability = 1.0
        self.path: list[tuple[str, int]] = []

    def draw(self, label, probs):
        p = np.asarray(probs, dtype=float)
        if self.pos >= len(self.prefix):
            raise _Fork([k for k in range(len(p)) if p[k] > 1e-12])
        k = self.prefix[self.pos]
        self.pos += 1
        self.probability *= float(p[k])
        self.path.append((label, k))
        return k


def enumerate_runs(protocol_fn):
    """Run ``protocol_fn(source)`` over every outcome path; returns [(prob, result)].

    The protocol must be a pure function of its source (rebuilt state per call).
    """
    results = []
    stack: list[tuple[int, ...]] = [()]
    while stack:
        prefix = stack.pop()
        src = ReplaySource(prefix)
        try:
            res = protocol_fn(src)
        except _Fork as f:
            stack.extend(prefix + (k,) for k in f.options)
            continue
        results.append((src.probability, res))
    return results


# ---------------------------------------------------------------------------
# Streaming named-qubit register
# ---------------------------------------------------------------------------

def angle_basis(theta: float) -> np.ndarray:
    """Basis columns (|0> + (-1)^s e^{i theta} |1>)/sqrt(2), s = 0, 1."""
    return np.array([[1, 1], [np.exp(1j * theta), -np.exp(1j * theta)]],
                    dtype=complex) / math.sqrt(2)


_BASES = {"Z": np.eye(2, dtype=complex), "X": qk.H}


class Register:
    """Statevector over named qubits; measurement contracts the qubit away."""

    def __init__(self, live_cap: int = 12):
        self.names: list[str] = []
        self.owners: dict[str, str] = {}
        self.vec = np.ones(1, dtype=complex)
        self.live_cap = live_cap
        self.max_live = 0

    def _check_cap(self):
        if len(self.names) > self.live_cap:
            raise qk.CapExceededError(
                f"live register of {len(self.names)} qubits exceeds cap {self.live_cap}")
        self.max_live = max(self.max_live, len(self.names))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InvariantError(f"no live qubit named {name!r}") from None

    def add_qubit(self, name: str, owner: str, amplitudes) -> None:
        if name in self.names:
            raise InvariantError(f"duplicate qubit name {name!r}")
        amps = np.asarray(amplitudes, dtype=complex)
        self.vec = np.kron(self.vec, amps / np.linalg.norm(amps))
        self.names.append(name)
        self.owners[name] = owner
        self._check_cap()

    def add_state(self, names, owner: str, amplitudes) -> None:
        """Kron in a joint pure state on fresh qubits (first name most significant)."""
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.size != 2 ** len(names):
            raise InvariantError("amplitude length does not match qubit count")
        for name in names:
            if name in self.names:
                raise InvariantError(f"duplicate qubit name {name!r}")
            self.owners[name] = owner
        self.vec = np.kron(self.vec, amps / np.linalg.norm(amps))
        self.names += list(names)
        self._check_cap()

    def add_ebit(self, name_a: str, name_b: str, owner_a: str = "A", owner_b: str = "B"):
        for name, owner in ((name_a, owner_a), (name_b, owner_b)):
            if name in self.names:
                raise InvariantError(f"duplicate qubit name {name!r}")
            self.owners[name] = owner
        self.vec = np.kron(self.vec, np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2))
        self.names += [name_a, name_b]
        self._check_cap()

    def apply(self, u: np.ndarray, names, party: str | None = None,
              transcript: Transcript | None = None, op: str = ""):
        wires = [self.index(n) for n in names]
        if party is not None:
            for n in names:
                if self.owners[n] != party:
                    raise InvariantError(f"party {party} cannot act on {n!r}")
        self.vec = qk.apply_on_wires(self.vec, u, wires, (2,) * len(self.names))
        if transcript is not None and party is not None:
            transcript.log(party, "local-op", {"op": op, "qubits": list(names)})

    def measure(self, name: str, basis, source: OutcomeSource, label: str,
                party: str | None = None, transcript: Transcript | None = None) -> int:
        w = self.index(name)
        if party is not None and self.owners[name] != party:
            raise InvariantError(f"party {party} cannot measure {name!r}")
        b = _BASES[basis] if isinstance(basis, str) else np.asarray(basis, dtype=complex)
        tens = self.vec.reshape((2,) * len(self.names))
        subs = [np.tensordot(b[:, k].conj(), tens, axes=([0], [w])) for k in range(2)]
        probs = [float((np.abs(s) ** 2).sum()) for s in subs]
        k = source.draw(label, probs)
        post = subs[k].reshape(-1)
        self.vec = post / math.sqrt(probs[k])
        self.names.pop(w)
        del self.owners[name]
        if transcript is not None and party is not None:
            basis_name = basis if isinstance(basis, str) else "rotated"
            transcript.log(party, "measure", {"qubit": name, "basis": basis_name})
        return k

    def extract(self, names_in_order) -> StateVector:
        order = [self.index(n) for n in names_in_order]
        if sorted(order) != list(range(len(self.names))):
            raise InvariantError("extract must list every live qubit exactly once")
        tens = self.vec.reshape((2,) * len(self.names))
        tens = np.transpose(tens, order)
        return StateVector(HilbertSpec((2,) * len(self.names)), tens.reshape(-1))

    def reduced(self, names) -> np.ndarray:
        """Reduced density matrix of the listed live qubits (in the listed order)."""
        order = [self.index(n) for n in names]
        rest = [w for w in range(len(self.names)) if w not in order]
        tens = self.vec.reshape((2,) * len(self.names))
        tens = np.transpose(tens, order + rest)
        flat = tens.reshape(2 ** len(order), -1)
        return flat @ flat.conj().T


# ---------------------------------------------------------------------------
# Diagonal helpers for the split-phase gadget
# ---------------------------------------------------------------------------

def _s_power(k: int) -> np.ndarray:
    return np.diag([1, 1j ** (k % 4)]).astype(complex)


def _z_power(k: int) -> np.ndarray:
    return np.diag([1, (-1) ** (k % 2)]).astype(complex)


# ---------------------------------------------------------------------------
# Nonlocal T-gate teleportation through one ebit and one PR box
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BTTResult:
    output: StateVector          # A's data qubit, still padded
    new_key: PauliKey            # B's updated key
    transcript: Transcript
    ebits_consumed: int
    pr_boxes_consumed: int


def btt(psi: StateVector, key: PauliKey, source: OutcomeSource,
        box: PRBox | None = None) -> BTTResult:
    """Apply T to a one-time-padded qubit using one ebit and one PR box.

    A starts with X^a Z^b |psi> and ends with X^{a'} Z^{b'} T |psi>; B computes
    the new key from local data alone.  No directed message is ever sent: the
    phase correction that normally needs measurement feedback is split through
    the box, with A applying S^0 Z^{z_A} (her key share is trivial here) and B
    applying S^a Z^{z_B} on her ebit half.
    """
    if psi.spec.dims != (2,):
        raise InvariantError("btt teleports a single qubit")
    box = box if box is not None else PRBox(box_id=0)
    if box.consumed:
        raise ResourceError("btt needs an unconsumed PR box")
    tr = Transcript()
    reg = Register()
    reg.add_qubit("data", "A", pauli_encrypt(psi, key).amplitudes)
    reg.add_ebit("eA", "eB")
    tr.log("B", "local-op", {"op": "encrypt", "qubits": ["data"]})

    # A applies T; pad becomes X^a Z^{a xor b} S^{-a}.
    reg.apply(qk.T, ["data"], party="A", transcript=tr, op="T")
    # Link A's data value onto B's ebit half.
    reg.apply(qk.CX, ["data", "eA"], party="A", transcript=tr, op="CX")
    c = reg.measure("eA", "Z", source, "c", party="A", transcript=tr)

    # Box linearizes the product c*a into shares z_A (at A) and z_B (at B).
    z_a, z_b = pr_box_call(box, c, key.a, source=source, transcript=tr)
    reg.apply(_z_power(z_a), ["data"], party="A", transcript=tr, op=f"Z^{z_a}")
    reg.apply(_s_power(key.a) @ _z_power(z_b), ["eB"], party="B", transcript=tr,
              op=f"S^{key.a} Z^{z_b}")
    m = reg.measure("eB", "X", source, "m", party="B", transcript=tr)

    tr.log("A", "broadcast", {"payload": {"c": c}})
    tr.log("B", "broadcast", {"payload": {}})
    new_key = PauliKey(key.a, key.b ^ m)
    return BTTResult(reg.extract(["data"]), new_key, tr, 1, 1)


def btt_branches(psi: StateVector, key: PauliKey):
    """All (probability, BTTResult) branches of a BTT run, enumerated exactly."""
    return enumerate_runs(lambda src: btt(psi, key, src))


# ---------------------------------------------------------------------------
# PMQC: blind H/T/CZ programs on a tailed cluster, broadcast-only
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PMQCResources:
    ebits: int
    pr_boxes: int


@dataclass
class _Share:
    """A frame bit split into an A-known part and a B-known part."""
    a: int = 0
    b: int = 0

    @property
    def value(self) -> int:
        return self.a ^ self.b


@dataclass
class _Row:
    qubit: int
    cur: str                      # current head holding the logical state
    x: _Share = field(default_factory=_Share)
    z: _Share = field(default_factory=_Share)
    sites: int = 0
    _pending_head: str = ""
    _pending_m: int = 0


@dataclass(frozen=True)
class PMQCResult:
    output: StateVector                    # A's output heads, still padded
    keys: tuple[tuple[int, int], ...]      # final (x, z) pads, known to B post-broadcast
    target: np.ndarray                     # ideal program unitary on the logical qubits
    transcript: Transcript
    ebits_consumed: int
    pr_boxes_consumed: int
    t_events: int
    max_live_qubits: int


def _validate_program(programs, cz_after):
    if not 1 <= len(programs) <= 2:
        raise InvariantError("pmqc supports 1 or 2 logical qubits")
    for gates in programs:
        if len(gates) > 4:
            raise InvariantError("at most 4 gates per logical qubit")
        for g in gates:
            if g not in ("H", "T"):
                raise InvariantError(f"pmqc gate {g!r} not in {{H, T}}")
    if cz_after is not None:
        if len(programs) != 2:
            raise InvariantError("cz_after needs two logical qubits")
        k0, k1 = cz_after
        if not (0 <= k0 <= len(programs[0]) and 0 <= k1 <= len(programs[1])):
            raise InvariantError("cz_after indices out of range")


def pmqc_run(plaintext: StateVector, programs, cz_after=None, *,
             source: OutcomeSource, resources: PMQCResources | None = None,
             on_step=None) -> PMQCResult:
    """Run an H/T (+ optional single CZ) program blindly on one-time-padded inputs.

    B injects the plaintext by Bell-measuring it against the input-site tails
    (which simultaneously pads it); A executes the circuit-specific tailed
    cluster with X/Z measurements only; every T gate triggers one
    linearization event consuming exactly one ebit and one PR box.  The final
    broadcast lets B assemble the output pads.  ``on_step(label, register)``
    is invoked after each protocol stage for privacy instrumentation.
    """
    programs = tuple(tuple(g.upper() for g in gates) for gates in programs)
    _validate_program(programs, cz_after)
    nq = len(programs)
    if plaintext.spec.dims != (2,) * nq:
        raise InvariantError(f"plaintext must be {nq} qubits")
    t_total = sum(g == "T" for gates in programs for g in gates)
    if resources is not None and (resources.ebits < t_total or resources.pr_boxes < t_total):
        raise ResourceError(
            f"program needs {t_total} ebits and PR boxes, got "
            f"{resources.ebits} ebits / {resources.pr_boxes} boxes")

    tr = Transcript()
    reg = Register(live_cap=12)
    counters = {"ebits": 0, "boxes": 0, "t_events": 0, "sites": 0}
    target = np.eye(2 ** nq, dtype=complex)

    def step(label):
        if on_step is not None:
            on_step(label, reg)

    def embed(g, q):
        return qk.embed_operator(g, [q], (2,) * nq)

    # Inject plaintext through the input-site tails (Bell measurement at B).
    reg.add_state([f"pi{q}" for q in range(nq)], "B", plaintext.amplitudes)

    rows = []
    for q in range(nq):
        head, tail = f"h{q}s0", f"t{q}s0"
        reg.add_ebit(head, tail, "A", "B")
        counters["sites"] += 1
        reg.apply(qk.CX, [f"pi{q}", tail], party="B", transcript=tr, op="CX")
        reg.apply(qk.H, [f"pi{q}"], party="B", transcript=tr, op="H")
        m1 = reg.measure(f"pi{q}", "Z", source, f"bell{q}a", party="B", transcript=tr)
        m2 = reg.measure(tail, "Z", source, f"bell{q}b", party="B", transcript=tr)
        rows.append(_Row(q, head, _Share(0, m2), _Share(0, m1)))
        step(f"inject_q{q}")

    def new_site(row: _Row) -> None:
        """Grow the row by one tailed site: tail removed at B, CZ edge at A."""
        row.sites += 1
        counters["sites"] += 1
        head, tail = f"h{row.qubit}s{row.sites}", f"t{row.qubit}s{row.sites}"
        reg.add_ebit(head, tail, "A", "B")
        m = reg.measure(tail, "X", source, f"tail_{tail}", party="B", transcript=tr)
        reg.apply(qk.CZ, [row.cur, head], party="A", transcript=tr, op="CZ")
        row._pending_head = head
        row._pending_m = m

    def hop(row: _Row) -> None:
        """X-measure the current head; the logical state moves one site right."""
        new_site(row)
        a = reg.measure(row.cur, "X", source, f"hop_{row.cur}", party="A", transcript=tr)
        row.cur = row._pending_head
        old_x, old_z = row.x, row.z
        row.x = _Share(old_z.a ^ a, old_z.b)
        row.z = _Share(old_x.a, old_x.b ^ row._pending_m)
        nonlocal target
        target = embed(qk.H, row.qubit) @ target
        step(f"hop_q{row.qubit}_s{row.sites}")

    def t_gadget(row: _Row) -> None:
        """Imprint T on the current site and linearize the S byproduct.

        Consumes one fresh ebit and one PR box; A's S-power uses only her own
        frame share, B's only hers, and the box output bits z_A/z_B absorb the
        cross term, so the pad stays Pauli with shares intact.
        """
        counters["t_events"] += 1
        counters["ebits"] += 1
        counters["boxes"] += 1
        reg.apply(qk.T, [row.cur], party="A", transcript=tr, op="T-imprint")
        ga, gb = f"g{counters['t_events']}A", f"g{counters['t_events']}B"
        reg.add_ebit(ga, gb, "A", "B")
        reg.apply(qk.CX, [row.cur, ga], party="A", transcript=tr, op="CX")
        c = reg.measure(ga, "Z", source, f"gad{counters['t_events']}c",
                        party="A", transcript=tr)
        box = PRBox(box_id=counters["boxes"])
        z_a, z_b = pr_box_call(box, c ^ row.x.a, row.x.b, source=source, transcript=tr)
        reg.apply(_s_power(row.x.a) @ _z_power(z_a), [row.cur], party="A",
                  transcript=tr, op=f"S^{row.x.a} Z^{z_a}")
        reg.apply(_s_power(row.x.b) @ _z_power(z_b), [gb], party="B",
                  transcript=tr, op=f"S^{row.x.b} Z^{z_b}")
        m_g = reg.measure(gb, "X", source, f"gad{counters['t_events']}m",
                          party="B", transcript=tr)
        # Pushing T through X^x Z^z gives X^x Z^{x+z} S^{-x}; the split S^x
        # correction conjugates back through X^x, restoring Z^z exactly, so
        # only the disentangling outcome enters the frame.
        row.z = _Share(row.z.a, row.z.b ^ m_g)
        nonlocal target
        target = embed(qk.T, row.qubit) @ target
        step(f"tgadget_q{row.qubit}")

    def run_gate(row: _Row, g: str) -> None:
        if g == "H":
            hop(row)
        else:
            t_gadget(row)
            hop(row)
            hop(row)

    def apply_cz() -> None:
        nonlocal target
        reg.apply(qk.CZ, [rows[0].cur, rows[1].cur], party="A", transcript=tr, op="CZ")
        x0, x1 = rows[0].x, rows[1].x
        rows[0].z = _Share(rows[0].z.a ^ x1.a, rows[0].z.b ^ x1.b)
        rows[1].z = _Share(rows[1].z.a ^ x0.a, rows[1].z.b ^ x0.b)
        target = qk.CZ @ target
        step("cz")

    if cz_after is None:
        for q, row in enumerate(rows):
            for g in programs[q]:
                run_gate(row, g)
    else:
        k0, k1 = cz_after
        for q, row, k in ((0, rows[0], k0), (1, rows[1], k1)):
            for g in programs[q][:k]:
                run_gate(row, g)
        apply_cz()
        for q, row, k in ((0, rows[0], k0), (1, rows[1], k1)):
            for g in programs[q][k:]:
                run_gate(row, g)

    tr.log("A", "broadcast",
           {"payload": {f"shares_q{r.qubit}": [r.x.a, r.z.a] for r in rows}})
    tr.log("B", "broadcast", {"payload": {}})
    keys = tuple((r.x.value, r.z.value) for r in rows)
    output = reg.extract([r.cur for r in rows])
    step("end")
    return PMQCResult(output, keys, target, tr, counters["ebits"], counters["boxes"],
                      counters["t_events"], reg.max_live)


def decrypt_pads(state: StateVector, keys) -> StateVector:
    """Undo per-qubit pads X^x Z^z on consecutive qubit wires."""
    amps = state.amplitudes
    dims = state.spec.dims
    for q, (x, z) in enumerate(keys):
        pad = pauli_pad(PauliKey(x, z))
        amps = qk.apply_on_wires(amps, pad.conj().T, [q], dims)
    return StateVector(state.spec, amps)


def program_unitary(programs, cz_after=None) -> np.ndarray:
    """Direct-circuit oracle: the program applied plainly to the logical qubits."""
    nq = len(programs)
    dims = (2,) * nq
    u = np.eye(2 ** nq, dtype=complex)

    def emb(g, q):
        return qk.embed_operator(g, [q], dims)

    if cz_after is None:
        for q, gates in enumerate(programs):
            for g in gates:
                u = emb(qk.GATES[g.upper()], q) @ u
    else:
        k0, k1 = cz_after
        for q, k in ((0, k0), (1, k1)):
            for g in programs[q][:k]:
                u = emb(qk.GATES[g.upper()], q) @ u
        u = qk.CZ @ u
        for q, k in ((0, k0), (1, k1)):
            for g in programs[q][k:]:
                u = emb(qk.GATES[g.upper()], q) @ u
    return u


# ---------------------------------------------------------------------------
# Plain MBQC gate teleportation on a 1D cluster row
# ---------------------------------------------------------------------------

def mbqc_target(angles) -> np.ndarray:
    """Ideal gate of a measurement pattern: product of J(theta) = H diag(1, e^{i theta})."""
    u = np.eye(2, dtype=complex)
    for th in angles:
        u = (qk.H @ np.diag([1, np.exp(1j * th)])) @ u
    return u


@dataclass(frozen=True)
class MBQCBranch:
    outcomes: tuple[int, ...]
    probability: float
    corrected: StateVector


def mbqc_gate(angles, psi: StateVector, adaptive: bool = True) -> list[MBQCBranch]:
    """Measure a 1D cluster row site by site; returns all branches with corrections.

    With adaptive angle signs (flip when the running X-frame bit is set) every
    corrected branch equals the target gate on |psi>; without adaptivity the
    branches disagree for non-Pauli angles.
    """
    angles = list(angles)
    if len(angles) + 1 > 6:
        raise InvariantError("cluster row limited to 6 qubits")
    if psi.spec.dims != (2,):
        raise InvariantError("mbqc_gate teleports a single qubit")

    def run(source: OutcomeSource):
        reg = Register()
        reg.add_qubit("c0", "A", psi.amplitudes)
        x = z = 0
        outs = []
        cur = "c0"
        for k, th in enumerate(angles):
            nxt = f"c{k + 1}"
            reg.add_qubit(nxt, "A", np.array([1, 1]) / math.sqrt(2))
            reg.apply(qk.CZ, [cur, nxt])
            meas_angle = -th * (-1) ** x if adaptive else -th
            s = reg.measure(cur, angle_basis(meas_angle), source, f"s{k}")
            outs.append(s)
            x, z = s ^ z, x
            cur = nxt
        state = reg.extract([cur])
        pad = pauli_pad(PauliKey(x, z))
        corrected = qk.apply_unitary(state, pad.conj().T)
        return tuple(outs), corrected

    return [MBQCBranch(outs, prob, corr)
            for prob, (outs, corr) in enumerate_runs(run)]


# ---------------------------------------------------------------------------
# CHSH with PR boxes
# ---------------------------------------------------------------------------

def chsh_game(rounds: int = 0, rng: np.random.Generator | None = None) -> float:
    """Win rate of the PR-box strategy: exhaustive over inputs and hidden bits.

    With ``rounds`` > 0, plays that many seeded rounds instead (the strategy
    still never loses; sampling exists for marginal statistics).
    """
    if rounds <= 0:
        wins = total = 0
        for x in (0, 1):
            for y in (0, 1):
                for hidden in (0, 1):
                    a, b = pr_box_call(PRBox(0, hidden=hidden), x, y)
                    wins += (a ^ b) == (x * y)
                    total += 1
        return wins / total
    rng = rng if rng is not None else np.random.default_rng(0)
    wins = 0
    for k in range(rounds):
        x, y = int(rng.integers(2)), int(rng.integers(2))
        a, b = pr_box_call(PRBox(k, hidden=int(rng.integers(2))), x, y)
        wins += (a ^ b) == (x * y)
    return wins / rounds


def pr_box_marginal_samples(n: int, seed: int = 0) -> tuple[int, int]:
    """Counts of a=1 and b=1 over n fresh boxes with uniformly random inputs."""
    rng = np.random.default_rng(seed)
    ca = cb = 0
    for k in range(n):
        a, b = pr_box_call(PRBox(k, hidden=int(rng.integers(2))),
                           int(rng.integers(2)), int(rng.integers(2)))
        ca += a
        cb += b
    return ca, cb
