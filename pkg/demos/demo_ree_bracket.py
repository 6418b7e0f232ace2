#!/usr/bin/env python3
"""Relative entropy of entanglement: certified lower bounds against
separable-ensemble upper bounds on reference states."""

import numpy as np

from locbound import DensityMatrix, RegisterLayout, max_entangled_state, ree_bracket
from locbound.rand import random_pure

lay = RegisterLayout.qubits("a", "b")

print("=== Bell pair ===")
bell = max_entangled_state(1, "a", "b").to_density()
br = ree_bracket(bell, ["a"])
print(f"lower={br.lower:.9f}  upper={br.upper:.9f}  "
      f"restarts={br.restarts_run}  converged={br.converged}")

print("\n=== biased pure state sqrt(3/4)|00> + sqrt(1/4)|11> ===")
v = np.zeros(4)
v[0], v[3] = np.sqrt(0.75), np.sqrt(0.25)
st = DensityMatrix.from_vector(lay, v)
br = ree_bracket(st, ["a"])
print(f"lower={br.lower:.9f}  upper={br.upper:.9f}  (= h(1/4) = 0.811278...)")

print("\n=== separable Werner state (singlet weight 1/4) ===")
psi_m = np.array([0, 1, -1, 0]) / np.sqrt(2)
wern = DensityMatrix(lay, 0.25 * np.outer(psi_m, psi_m) + 0.75 * np.eye(4) / 4)
br = ree_bracket(wern, ["a"])
print(f"lower={br.lower:.9f}  upper={br.upper:.2e}  (separable: both near 0)")

print("\n=== witness ensemble for the Bell pair ===")
br = ree_bracket(bell, ["a"])
ens = br.ensemble
top = np.argsort(br.ensemble.weights)[::-1][:4]
for t in top:
    w = ens.weights[t]
    if w < 1e-6:
        continue
    a = np.round(ens.a_factors[t], 3)
    b = np.round(ens.b_factors[t], 3)
    print(f"  weight {w:.4f}  a={a}  b={b}")

print("\n=== random pure states: gap between bounds ===")
rng = np.random.default_rng(7)
worst = 0.0
for _ in range(25):
    rho = random_pure(rng, lay).to_density()
    b = ree_bracket(rho, ["a"])
    worst = max(worst, b.upper - b.lower)
print("worst upper - lower over 25 pure states:", worst)
