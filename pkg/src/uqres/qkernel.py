"""Foundation types and exact dense linear algebra for finite-dimensional quantum systems.

Everything is dense, exact (up to float64), and immutable: states, operators and
channels are validated against their defining invariants at construction time and
never mutated afterwards.  All entropies and logarithms in this package are base 2.

Conventions:
  - Subsystem order is big-endian: the leftmost subsystem in ``dims`` is the most
    significant digit of the composite basis index (wire 0 = top wire).
  - Invariant tolerances are 1e-10 unless a type states otherwise.
  - Eigenvalues of density operators in [-1e-10, 0] are clamped to 0 before
    entropies are taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

DEFAULT_DIM_CAP = 4096
ATOL = 1e-10
KRAUS_ATOL = 1e-9


class UqresError(Exception):
    """Base class for all toolkit errors."""


class InvariantError(UqresError):
    """A domain-type invariant or operation precondition is violated."""


class CapExceededError(UqresError):
    """A requested object exceeds the configured dimension/branch cap."""


class ResourceError(UqresError):
    """A protocol resource (ebit, PR box) is missing or already consumed."""


def _as_complex_array(data, shape_hint: str) -> np.ndarray:
    arr = np.asarray(data, dtype=complex)
    if arr.size == 0:
        raise InvariantError(f"empty {shape_hint}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HilbertSpec:
    """Composite Hilbert space given by an ordered tuple of subsystem dimensions.

    ``total_dim`` is the product of ``dims`` and is bounded by ``cap`` (default
    4096); constructors of larger objects raise :class:`CapExceededError`.
    Dimension-1 subsystems are permitted only as degenerate registers (e.g. a
    length-0 clock); regular subsystems have dimension >= 2.
    """

    dims: tuple[int, ...]
    cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims:
            raise InvariantError("HilbertSpec needs at least one subsystem")
        if any(d < 1 for d in dims):
            raise InvariantError(f"subsystem dimensions must be >= 1, got {dims}")
        if self.total_dim > self.cap:
            raise CapExceededError(
                f"total dimension {self.total_dim} exceeds cap {self.cap}")

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def __mul__(self, other: "HilbertSpec") -> "HilbertSpec":
        return HilbertSpec(self.dims + other.dims, cap=max(self.cap, other.cap))


def _single(d: int, cap: int = DEFAULT_DIM_CAP) -> HilbertSpec:
    return HilbertSpec((d,), cap=cap)


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over a :class:`HilbertSpec` (squared norm 1 to 1e-10)."""

    spec: HilbertSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _as_complex_array(self.amplitudes, "amplitude vector")
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (self.spec.total_dim,):
            raise InvariantError(
                f"amplitude vector has shape {amps.shape}, expected ({self.spec.total_dim},)")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > 1e-10:
            raise InvariantError(f"state not normalized: |psi|^2 = {norm2!r}")

    @property
    def dim(self) -> int:
        return self.spec.total_dim

    def density(self) -> "DensityOperator":
        return DensityOperator(self.spec, np.outer(self.amplitudes, self.amplitudes.conj()))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityOperator:
    """Density operator: Hermitian, unit trace, PSD (eigenvalues >= -1e-10)."""

    spec: HilbertSpec
    matrix: np.ndarray

    def __post_init__(self):
        mat = _as_complex_array(self.matrix, "density matrix")
        object.__setattr__(self, "matrix", mat)
        d = self.spec.total_dim
        if mat.shape != (d, d):
            raise InvariantError(f"density matrix has shape {mat.shape}, expected ({d}, {d})")
        if not np.allclose(mat, mat.conj().T, atol=1e-10):
            raise InvariantError("density matrix not Hermitian within 1e-10")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > 1e-10:
            raise InvariantError(f"density matrix trace {tr!r} != 1")
        lo = float(np.linalg.eigvalsh(mat).min())
        if lo < -1e-10:
            raise InvariantError(f"density matrix has negative eigenvalue {lo!r}")

    @property
    def dim(self) -> int:
        return self.spec.total_dim

    def eigenvalues(self) -> np.ndarray:
        """Clamped nonnegative spectrum (ascending)."""
        vals = np.linalg.eigvalsh(self.matrix)
        return np.where((vals < 0) & (vals >= -1e-10), 0.0, vals)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True)
class UnitaryOp:
    """Unitary operator on a :class:`HilbertSpec` (U†U = 1 to 1e-10)."""

    spec: HilbertSpec
    matrix: np.ndarray
    name: str | None = None

    def __post_init__(self):
        mat = _as_complex_array(self.matrix, "unitary matrix")
        object.__setattr__(self, "matrix", mat)
        d = self.spec.total_dim
        if mat.shape != (d, d):
            raise InvariantError(f"unitary has shape {mat.shape}, expected ({d}, {d})")
        if not np.allclose(mat.conj().T @ mat, np.eye(d), atol=1e-10):
            raise InvariantError("matrix is not unitary within 1e-10")

    @property
    def dim(self) -> int:
        return self.spec.total_dim

    def dagger(self) -> "UnitaryOp":
        return UnitaryOp(self.spec, self.matrix.conj().T,
                         name=None if self.name is None else self.name + "^dag")

    def channel(self) -> "QuantumChannel":
        return QuantumChannel(self.spec, self.spec, [self.matrix])


@dataclass(frozen=True)
class QuantumChannel:
    """CPTP map given by a finite Kraus set (sum K†K = 1 to 1e-9)."""

    in_spec: HilbertSpec
    out_spec: HilbertSpec
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ks = tuple(_as_complex_array(k, "Kraus operator") for k in self.kraus)
        object.__setattr__(self, "kraus", ks)
        if not ks:
            raise InvariantError("channel needs at least one Kraus operator")
        din, dout = self.in_spec.total_dim, self.out_spec.total_dim
        for k in ks:
            if k.shape != (dout, din):
                raise InvariantError(
                    f"Kraus operator has shape {k.shape}, expected ({dout}, {din})")
        acc = sum(k.conj().T @ k for k in ks)
        if not np.allclose(acc, np.eye(din), atol=KRAUS_ATOL):
            raise InvariantError("Kraus completeness sum K†K != 1 within 1e-9")

    @property
    def is_square(self) -> bool:
        return self.in_spec.total_dim == self.out_spec.total_dim


# ---------------------------------------------------------------------------
# Named gates
# ---------------------------------------------------------------------------

_SQRT2_INV = 1.0 / math.sqrt(2.0)
TAU = np.exp(1j * np.pi / 8)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
S = np.array([[1, 0], [0, 1j]], dtype=complex)
# Symmetric convention: T = diag(tau, tau*) with tau = e^{i pi/8}.
T = np.array([[TAU, 0], [0, np.conj(TAU)]], dtype=complex)
CX = np.array([[1, 0, 0, 0],
               [0, 1, 0, 0],
               [0, 0, 0, 1],
               [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)
CCX = np.eye(8, dtype=complex)
CCX[6, 6] = CCX[7, 7] = 0
CCX[6, 7] = CCX[7, 6] = 1
CCX.setflags(write=False)
for _m in (I2, X, Y, Z, H, S, T, CX, CZ, SWAP):
    _m.setflags(write=False)

GATES = {
    "I": I2, "X": X, "Y": Y, "Z": Z, "H": H, "S": S, "T": T,
    "SDG": S.conj().T, "TDG": T.conj().T,
    "CX": CX, "CZ": CZ, "SWAP": SWAP, "CCX": CCX,
}

_GATE_DIMS = {"I": (2,), "X": (2,), "Y": (2,), "Z": (2,), "H": (2,), "S": (2,),
              "T": (2,), "SDG": (2,), "TDG": (2,), "CX": (2, 2), "CZ": (2, 2),
              "SWAP": (2, 2), "CCX": (2, 2, 2)}


def gate(name: str) -> UnitaryOp:
    """Named gate constructor (H, T, S, X, Y, Z, CX, CZ, CCX, SWAP, SDG, TDG, I)."""
    key = name.upper()
    if key not in GATES:
        raise InvariantError(f"unknown gate name {name!r}")
    return UnitaryOp(HilbertSpec(_GATE_DIMS[key]), GATES[key], name=key)


# Qudit generalizations -----------------------------------------------------

def shift_x(d: int) -> np.ndarray:
    """Generalized Pauli X: |j> -> |j+1 mod d>."""
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[(j + 1) % d, j] = 1
    return m


def clock_z(d: int) -> np.ndarray:
    """Generalized Pauli Z: |j> -> w^j |j>, w = e^{2 pi i / d}."""
    w = np.exp(2j * np.pi / d)
    return np.diag(w ** np.arange(d))


def fourier(d: int) -> np.ndarray:
    """Discrete Fourier gate F|j> = d^{-1/2} sum_k w^{jk} |k>."""
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / math.sqrt(d)


def generalized_cx(d: int) -> np.ndarray:
    """Qudit CX: |i, j> -> |i, i+j mod d>."""
    m = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            m[i * d + ((i + j) % d), i * d + j] = 1
    return m


# State constructors ---------------------------------------------------------

def basis_state(spec: HilbertSpec, index: int) -> StateVector:
    amps = np.zeros(spec.total_dim, dtype=complex)
    amps[index] = 1
    return StateVector(spec, amps)


def zero_state(dims) -> StateVector:
    return basis_state(HilbertSpec(tuple(dims)), 0)


def plus_state(d: int = 2) -> StateVector:
    return StateVector(_single(d), np.full(d, 1 / math.sqrt(d), dtype=complex))


def maximally_mixed(d: int) -> DensityOperator:
    return DensityOperator(_single(d), np.eye(d, dtype=complex) / d)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def tensor(a, b):
    """Kronecker product of two values of the same kind, concatenating dims."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(a.spec * b.spec, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(a.spec * b.spec, np.kron(a.matrix, b.matrix))
    if isinstance(a, UnitaryOp) and isinstance(b, UnitaryOp):
        return UnitaryOp(a.spec * b.spec, np.kron(a.matrix, b.matrix))
    raise InvariantError(
        f"tensor requires matching kinds, got {type(a).__name__} and {type(b).__name__}")


def tensor_all(values):
    return reduce(tensor, values)


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Reduced state on the subsystems in ``keep`` (indices into ``spec.dims``).

    Kept subsystems appear in ascending index order regardless of the order
    they are listed in.
    """
    keep = sorted(set(int(k) for k in keep))
    n = rho.spec.n_subsystems
    if not keep:
        raise InvariantError("partial_trace needs a nonempty keep set")
    if any(k < 0 or k >= n for k in keep):
        raise InvariantError(f"keep indices {keep} out of range for {n} subsystems")
    dims = rho.spec.dims
    tens = rho.matrix.reshape(dims + dims)
    # Trace out complement pairwise, highest index first so positions stay valid.
    traced = tens
    removed = 0
    for idx in sorted(set(range(n)) - set(keep), reverse=True):
        cur_n = n - removed
        traced = np.trace(traced, axis1=idx, axis2=idx + cur_n)
        removed += 1
    kept_dims = tuple(dims[k] for k in keep)
    d_keep = int(np.prod(kept_dims))
    return DensityOperator(HilbertSpec(kept_dims, cap=rho.spec.cap),
                           traced.reshape(d_keep, d_keep))


def von_neumann_entropy(rho: DensityOperator) -> float:
    """S(rho) = -sum p log2 p over the clamped spectrum, with 0 log 0 := 0."""
    return shannon_entropy(rho.eigenvalues())


def shannon_entropy(p) -> float:
    """Base-2 Shannon entropy of a nonnegative vector (zeros skipped)."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum()) if p.size else 0.0


def apply_channel(channel: QuantumChannel, rho: DensityOperator) -> DensityOperator:
    if rho.spec.dims != channel.in_spec.dims:
        raise InvariantError(
            f"channel input dims {channel.in_spec.dims} do not match state dims {rho.spec.dims}")
    out = sum(k @ rho.matrix @ k.conj().T for k in channel.kraus)
    return DensityOperator(channel.out_spec, out)


def apply_unitary(rho_or_psi, u: np.ndarray):
    """Apply a full-space unitary matrix to a StateVector or DensityOperator."""
    if isinstance(rho_or_psi, StateVector):
        return StateVector(rho_or_psi.spec, u @ rho_or_psi.amplitudes)
    if isinstance(rho_or_psi, DensityOperator):
        return DensityOperator(rho_or_psi.spec, u @ rho_or_psi.matrix @ u.conj().T)
    raise InvariantError(f"cannot apply unitary to {type(rho_or_psi).__name__}")


def dephase(rho: DensityOperator) -> DensityOperator:
    """Completely dephasing channel: keep the computational-basis diagonal."""
    return DensityOperator(rho.spec, np.diag(np.diag(rho.matrix)))


def dephasing_channel(d: int) -> QuantumChannel:
    ks = [np.zeros((d, d), dtype=complex) for _ in range(d)]
    for i in range(d):
        ks[i][i, i] = 1
    spec = _single(d)
    return QuantumChannel(spec, spec, tuple(ks))


# Wire embedding -------------------------------------------------------------

def embed_operator(m: np.ndarray, wires, dims) -> np.ndarray:
    """Embed an operator acting on ``wires`` (in the given order) into the full space."""
    dims = tuple(int(d) for d in dims)
    wires = [int(w) for w in wires]
    n = len(dims)
    if len(set(wires)) != len(wires) or any(w < 0 or w >= n for w in wires):
        raise InvariantError(f"bad wire set {wires} for {n} subsystems")
    d_sub = int(np.prod([dims[w] for w in wires]))
    if m.shape != (d_sub, d_sub):
        raise InvariantError(f"operator shape {m.shape} does not match wires {wires}")
    rest = [w for w in range(n) if w not in wires]
    big = np.kron(m, np.eye(int(np.prod([dims[w] for w in rest])) if rest else 1))
    # big acts on subsystem order wires + rest; permute back to natural order.
    order = wires + rest
    perm = np.argsort(order)
    src_dims = [dims[w] for w in order]
    tens = big.reshape(src_dims + src_dims)
    tens = np.transpose(tens, list(perm) + [p + n for p in perm])
    d = int(np.prod(dims))
    return tens.reshape(d, d)


def apply_on_wires(amps: np.ndarray, m: np.ndarray, wires, dims) -> np.ndarray:
    """Apply an operator on a wire subset to a raw amplitude vector (no copy of m)."""
    dims = tuple(int(d) for d in dims)
    wires = [int(w) for w in wires]
    n = len(dims)
    tens = amps.reshape(dims)
    rest = [w for w in range(n) if w not in wires]
    perm = wires + rest
    tens = np.transpose(tens, perm)
    d_sub = int(np.prod([dims[w] for w in wires]))
    flat = tens.reshape(d_sub, -1)
    flat = m @ flat
    out_dims = [dims[w] for w in perm]
    tens = flat.reshape(out_dims)
    tens = np.transpose(tens, np.argsort(perm))
    return tens.reshape(-1)


# Dense numerics -------------------------------------------------------------

def expm_hermitian(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """e^{i t H} for Hermitian H via eigendecomposition."""
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * t * vals)) @ vecs.conj().T


def hermitian_sqrt(m: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix (small negatives clamped)."""
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def spectral_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


# Fidelity and comparison ----------------------------------------------------

def state_fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for pure states."""
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def fidelity_with_pure(psi: StateVector, rho: DensityOperator) -> float:
    """<psi| rho |psi>."""
    v = psi.amplitudes
    return float((v.conj() @ rho.matrix @ v).real)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < tol or nb < tol:
        return na < tol and nb < tol
    return bool(abs(abs(np.vdot(a, b)) / (na * nb) - 1.0) <= tol)


# Seeded randomness ----------------------------------------------------------

def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fixing."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph


def random_state(dims, rng: np.random.Generator) -> StateVector:
    spec = HilbertSpec(tuple(dims))
    v = rng.standard_normal(spec.total_dim) + 1j * rng.standard_normal(spec.total_dim)
    return StateVector(spec, v / np.linalg.norm(v))


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random mixed state: partial trace of a Haar-ish pure state on d x rank."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityOperator(_single(d), m)
