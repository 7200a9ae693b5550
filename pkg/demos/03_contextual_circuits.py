"""Contextual circuits: deterministic gates from superposed classical contexts.

Classical circuits (diagonal gates, basis permutations, Z readout) can never
create superposition.  Putting a quantum control register around them changes
that: a gate becomes a measured superposition of contexts with conditioned
Pauli-style fix-ups, realized deterministically on every branch.
"""

import numpy as np

from uqres import circuits as qc
from uqres import qkernel as qk

rng = np.random.default_rng(0)


def show(label, circuit, gate, data_dim, control_dim):
    psi = qk.random_state((data_dim,), rng)
    target = qk.StateVector(psi.spec, gate @ psi.amplitudes)
    branches = qc.simulate(circuit, qk.tensor(qk.zero_state((control_dim,)), psi))
    fids = [qk.state_fidelity(b.state, target) for b in branches]
    probs = [round(b.probability, 6) for b in branches]
    print(f"{label}: branches {probs}, min fidelity to target {min(fids):.12f}")


# H = (Z + X)/sqrt(2): two contexts, Pauli fix-up on the failure branch.
show("contextual H ", qc.contextual_h(), qk.H, 2, 2)
# T = cos(pi/8) 1 + sin(pi/8) iZ: diagonal corrections.
show("contextual T ", qc.contextual_t(), qk.T, 2, 2)
# CZ = (11 + Z1 + 1Z - ZZ)/2 with a four-dimensional control.
show("contextual CZ", qc.contextual_cz(), qk.CZ, 4, 4)

# One-bit teleportation of H: the measured wire carries the input.
print()
circ = qc.h_teleportation()
psi = qk.random_state((2,), rng)
for b in qc.simulate(circ, qk.tensor(psi, qk.zero_state((2,)))):
    f = qk.state_fidelity(b.state, qk.apply_unitary(psi, qk.H))
    print(f"H teleportation outcome {b.outcomes['s']}: p = {b.probability:.3f}, "
          f"fidelity {f:.12f}")

# Magic-state injection of T on a one-time-padded input, decrypted by key.
print()
for key in ((0, 0), (1, 0), (0, 1), (1, 1)):
    circ = qc.encrypted_t_injection(key)
    pad = (np.linalg.matrix_power(qk.X, key[0])
           @ np.linalg.matrix_power(qk.Z, key[1]))
    enc = qk.apply_unitary(psi, pad)
    fids = [qk.state_fidelity(b.state, qk.apply_unitary(psi, qk.T))
            for b in qc.simulate(circ, qk.tensor(enc, qk.zero_state((2,))))]
    print(f"padded T injection, key {key}: min fidelity {min(fids):.12f}")

# The free set really is classical: basis states in, basis states out.
print()
free = qc.Circuit(qk.HilbertSpec((2, 2, 2)), (
    qc.Gate(qk.T, (0,)),
    qc.Gate(qk.CX, (0, 1)),
    qc.Gate(qk.CCX, (0, 1, 2)),
    qc.Measure(0, "Z", "m"),
))
print("free_circuit_check(T, CX, CCX, M_Z):", qc.free_circuit_check(free))
spec = qk.HilbertSpec((2, 2, 2))
peaked = all(b.state.probabilities().max() > 1 - 1e-10
             for i in range(8) for b in qc.simulate(free, qk.basis_state(spec, i)))
print("every basis input stays a basis state on every branch:", peaked)
print("...but one Hadamard breaks membership:",
      qc.free_circuit_check(qc.Circuit(qk.HilbertSpec((2,)), (qc.Gate(qk.H, (0,)),))))
