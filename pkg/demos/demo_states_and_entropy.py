#!/usr/bin/env python3
"""States and entropies: labelled registers, reduced states, and the
standard distance/entropy inequalities on random inputs."""

import numpy as np

from locbound import (
    DensityMatrix,
    RegisterLayout,
    fidelity,
    max_entangled_state,
    partial_trace,
    purify,
    trace_distance,
    vn_entropy,
    coherent_info,
    cond_mutual_info,
    relative_entropy,
)
from locbound.rand import random_density

print("=== labelled registers ===")
bell = max_entangled_state(1, "R", "L")
rho = bell.to_density()
print("Bell pair on (R, L)")
print("  S(R)      =", vn_entropy(rho, ["R"]))
print("  I(R > L)  =", coherent_info(rho, ["R"]))
print("  reduced R =\n", partial_trace(rho, ["L"]).matrix.real)

print("\n=== purification round trip ===")
mixed = DensityMatrix(RegisterLayout.qubits("q"), np.diag([0.75, 0.25]))
pure = purify(mixed)
print("purify(diag(3/4, 1/4)) amplitudes:", np.round(np.abs(pure.vector), 6))
print("trace-back fidelity:", fidelity(pure.reduced(["q"]), mixed))

print("\n=== GHZ conditional mutual information ===")
lay3 = RegisterLayout.qubits("a", "b", "c")
v = np.zeros(8)
v[0] = v[7] = 1 / np.sqrt(2)
ghz = DensityMatrix.from_vector(lay3, v)
print("I(a : c | b) =", cond_mutual_info(ghz, ["a"], ["c"], ["b"]))

print("\n=== Fuchs-van de Graaf sweep on random pairs ===")
rng = np.random.default_rng(0)
lay = RegisterLayout.of(("a", 4), ("b", 4))
worst = 0.0
for _ in range(200):
    r1 = random_density(rng, lay)
    r2 = random_density(rng, lay)
    f = fidelity(r1, r2)
    t = trace_distance(r1, r2)
    worst = max(worst, 2 * (1 - np.sqrt(f)) - t, t - 2 * np.sqrt(1 - f))
print("worst violation over 200 pairs:", worst, "(<= 0 up to float noise)")

print("\n=== relative entropy ties to conditional entropy ===")
lay2 = RegisterLayout.qubits("a", "b")
rho = random_density(rng, lay2)
sig = np.kron(np.eye(2), partial_trace(rho, ["a"]).matrix)
print("D(rho || I (x) rho_B)    =", float(relative_entropy(rho, sig)))
print("-(S(ab) - S(b)) = -S(a|b) =", -(vn_entropy(rho) - vn_entropy(rho, ["b"])))
