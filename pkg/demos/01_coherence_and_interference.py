"""Static coherence measures and the interference power of gates.

A state's coherence lives in its off-diagonal structure; a gate's interference
power is the average coherence it creates from basis states.  This walk-through
computes the three coherence measures on familiar states, then exercises the
classical channel-state duality and the additivity law for controlled gates.
"""

import numpy as np

from uqres import interference as itf
from uqres import measures as ms
from uqres import qkernel as qk

# --- coherence of states ----------------------------------------------------
plus = qk.plus_state(2)
t_plus = qk.apply_unitary(plus, qk.T)

print("C(|0>)      =", ms.l1_coherence(qk.zero_state((2,))))
print("C(|+>)      =", ms.l1_coherence(plus))
print("C(T|+>)     =", ms.l1_coherence(t_plus), "   (the magic state is just as coherent)")
print("Q(|+>)      =", ms.log_coherence(plus))
print("C_r(|+>)    =", ms.rel_ent_coherence(plus))
print("Q is additive: Q(|+>|+>) =", ms.log_coherence(qk.tensor(plus, plus).density()))

# A qudit uniform state reaches the maximum log2 d.
for d in (2, 3, 5):
    print(f"Q(uniform, d={d}) = {ms.log_coherence(qk.plus_state(d)):.6f}"
          f"  vs log2 d = {np.log2(d):.6f}")

# --- interference power of gates ---------------------------------------------
print()
print("I_r(H)  =", itf.interference_power(qk.H))
print("I_r(T)  =", itf.interference_power(qk.T), "  (diagonal gates are classical)")
print("I_r(CX) =", itf.interference_power(qk.CX), " (permutations too)")

# The power is literally the coherence of the classical dual state
# m_E = (1/d) sum_i P_i (x) E(P_i):
dual = itf.classical_dual(qk.gate("H"))
print("C_r(m_H) =", itf.dual_state_coherence(dual), " (same number, via the dual state)")

# --- additivity for controlled gates ------------------------------------------
# I(CU (V x 1)) = I(V) + I(CU), in both orders.
rng = np.random.default_rng(0)
cu = itf.Multiplexer((qk.haar_unitary(2, rng), qk.haar_unitary(2, rng)))
v = qk.haar_unitary(2, rng)
r1, r2 = itf.interference_additivity_check(v, cu)
print()
print("additivity residuals for a random (V, CU):", r1, r2)
print("I(CU(H x 1)) =", itf.interference_power(cu.matrix @ np.kron(qk.H, np.eye(2))),
      "= 1 + I(CU) =", 1 + itf.interference_power(cu.matrix))

# Distance-based resource measures against a finite free sample.
free = ms.incoherent_sample(2)
print()
print("trace distance of |+> to the incoherent sample:",
      ms.distance_resource(plus, free, "trace"))
print("set distance of {|+>} to the sample:",
      ms.set_distance([plus], free, "trace"))
