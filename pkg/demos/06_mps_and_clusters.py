"""Matrix-product states: ebits, valence bonds, and two ways to prepare a chain.

Every state is a matrix-product state built from ebits and local fusions; the
same chain can be contracted directly or prepared by a sequential circuit whose
per-site unitaries dilate the canonicalized tensors.  Cluster states close the
loop: graph-state stabilizers certify the prepared state.
"""

import numpy as np

from uqres import measures as ms
from uqres import mps
from uqres import qkernel as qk

# --- ebits ---------------------------------------------------------------------
for d in (2, 3):
    e = mps.make_ebit(d)
    print(f"ebit d={d}: entanglement {ms.entanglement_entropy(e, [0]):.6f} "
          f"(log2 d = {np.log2(d):.6f})")

# --- valence bonds ----------------------------------------------------------------
# Fusing neighboring ebit halves onto their shared value turns a ring of ebits
# into a GHZ state.
ghz = mps.vbs_state([mps.fusion_projector(2)] * 3, ebits=3)
print("\nring of 3 fused ebits:", np.round(ghz.amplitudes.real, 4))

# --- contraction vs sequential preparation -----------------------------------------
rng = np.random.default_rng(2)
tensors = tuple(rng.standard_normal((2, 3, 3)) + 1j * rng.standard_normal((2, 3, 3))
                for _ in range(5))
boundary = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
chain = mps.MPSChain(tensors, boundary)
direct = mps.contract(chain)
prepared, prob = mps.sequential_prepare_detailed(chain)
print(f"\nrandom bond-3 chain on 5 qubits: fidelity(contract, sequential) = "
      f"{qk.state_fidelity(direct, prepared):.12f}")
print(f"boundary post-selection success probability: {prob:.4f}")

# GHZ and cluster chains have exact tensor representations.
print("ghz chain:", qk.state_fidelity(mps.contract(mps.ghz_chain(5)),
                                      mps.sequential_prepare(mps.ghz_chain(5))))
print("cluster chain vs CZ construction:",
      qk.state_fidelity(mps.contract(mps.cluster_chain(5)),
                        mps.cluster_state(mps.line_graph(5))))

# --- graph states and stabilizers ---------------------------------------------------
g = mps.GraphSpec(5, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)))
state = mps.cluster_state(g)
expectations = mps.graph_stabilizer_expectations(g, state)
print("\nstabilizer expectations on a wheel-ish graph:", np.round(expectations, 10))

# Tailed clusters keep an ebit partner per site (the substrate for blind
# computation): heads first, tails behind.
tg = mps.GraphSpec(2, ((0, 1),), (True, True))
tail_state = mps.cluster_state(tg)
print("tailed pair dims:", tail_state.spec.dims,
      " tail wires:", [mps.tail_wire(tg, v) for v in range(2)])
print("head-tail entanglement:", ms.entanglement_entropy(tail_state, [0, 1]))
