"""Hamiltonian-family models: term sums, quenched automata, history states.

Three levels of control over interaction terms: free weighted sums with
Trotterized evolution, program-steered constant-time quenches in a brickwork,
and adiabatic interpolation whose universality rests on the circuit-history
construction and its tridiagonal walk matrix.
"""

import numpy as np

from uqres import hamiltonian as ham
from uqres import qkernel as qk

# --- stoquasticity and Trotterization ----------------------------------------
print("stoquastic(-X):", ham.is_stoquastic(-qk.X))
print("stoquastic(+X):", ham.is_stoquastic(qk.X))
alpha_zz = 0.8 * np.kron(qk.Z, qk.Z) + np.kron(np.diag([0.1, -0.2]), np.eye(2))
print("stoquastic(alpha ZZ + A x 1):", ham.is_stoquastic(alpha_zz))

spec = qk.HilbertSpec((2, 2, 2))
terms = []
for i in (0, 1):
    for p in (qk.X, qk.Y, qk.Z):
        terms.append(ham.HamiltonianTerm((i, i + 1), np.kron(p, p), 0.5))
heis = ham.TermSum(spec, tuple(terms))
print("\nfirst-order Trotter error on a 3-site exchange chain, t = 0.5:")
for steps in (8, 16, 32, 64):
    print(f"  n = {steps:3d}: {ham.trotter_error(heis, 0.5, steps):.3e}")

# --- low-energy simulation error -----------------------------------------------
rng = np.random.default_rng(0)
g = rng.standard_normal((4, 4))
h_target = (g + g.T) / 2
h_big = np.zeros((6, 6))
h_big[:4, :4] = h_target
h_big[4:, 4:] = np.diag([40.0, 55.0])       # junk far above the cutoff
encode = np.zeros((6, 4))
encode[:4, :4] = np.eye(4)
print("\nsimulation error with high-energy junk above the cutoff:",
      ham.simulation_error(h_big, h_target, encode, delta=10.0))

# --- programmed quench automaton -------------------------------------------------
h_local, u, w, pi = ham.hqca_local_term()
print("\nquench equals i x (local term):",
      np.abs(ham.hqca_quench() - 1j * h_local).max())
data = qk.random_state((2, 2, 2, 2), rng)
layers = [{0: 1, 2: 2}, {1: 1}]        # W, SWAP brick then W on the middle pair
out = ham.hqca_run(layers, data)
direct = ham.hqca_direct(layers, data)
print("two-layer brickwork vs direct circuit fidelity:",
      qk.state_fidelity(out, direct))

# --- history states and the walk matrix ------------------------------------------
circuit = [qk.H, qk.T, qk.H, qk.T]
hs = ham.history_state(circuit, qk.zero_state((2,)))
print("\nclock marginal (uniform):", np.round(ham.clock_probabilities(hs), 6))
for pad in (0, 4, 12):
    padded = circuit + [np.eye(2, dtype=complex)] * pad
    hsp = ham.history_state(padded, qk.zero_state((2,)))
    print(f"  padding {pad:2d} identities -> readout probability "
          f"{ham.readout_success_probability(hsp, len(circuit)):.4f}")

hw = ham.walk_hamiltonian(3)
print("\nwalk matrix (L = 3):")
print(hw.real)
vals = np.linalg.eigvalsh(hw)
print("spectrum:", np.round(vals, 6), " gap formula:", 1 - np.cos(np.pi / 4))
print("stoquastic in the history basis:", ham.is_stoquastic(hw))

scan = ham.adiabatic_gap_scan(np.diag([0.0, 1, 1, 1]).astype(complex), hw, 51)
s_min, g_min = ham.min_gap(scan)
print(f"initial-projector -> walk scan: min gap {g_min:.4f} at s = {s_min:.2f}")

scan = ham.adiabatic_gap_scan(qk.Z / np.sqrt(2), qk.X / np.sqrt(2), 101)
s_min, g_min = ham.min_gap(scan)
print(f"unit-norm Z -> X scan: min gap {g_min:.6f} at s = {s_min:.2f}")
