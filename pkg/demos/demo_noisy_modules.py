#!/usr/bin/env python3
"""Noisy error-correction modules: exact channel simulation, logical error
rates, and consistency with the memory-overhead floor."""

import numpy as np

from locbound import BoundInputs, logical_error_rate, overhead_floor, simulate_module
from locbound.verify import repetition_module, trivial_module

print("=== trivial one-qubit module: delta = 3p/4 exactly ===")
for p in (0.1, 0.25, 0.5):
    delta = logical_error_rate(trivial_module(p))
    print(f"  p={p:5.2f}: delta={delta:.12f}  3p/4={0.75 * p:.12f}")

print("\n=== three-qubit repetition module (measure, correct, reset) ===")
for p in (0.02, 0.05, 0.1):
    for rounds in (1, 2):
        mod = repetition_module(p, rounds=rounds)
        delta = logical_error_rate(mod)
        print(f"  p={p:5.2f} rounds={rounds}: m={mod.m} depth={mod.depth} "
              f"delta={delta:.6f}")

print("\n=== classical record branches of one noisy round ===")
mod = repetition_module(0.1, rounds=1)
out = simulate_module(mod)
for label, weight, _ in sorted(out.branches, key=lambda b: -b[1])[:4]:
    print(f"  weight {weight:.4f}  label {label!r}")

print("\n=== erased-round variant: the region really is forgotten ===")
erased = simulate_module(mod, erased=(("d0", "d1"), 0))
red = erased.average_state().reduced(["d0", "d1"])
print("reduced state on the erased pair:\n", np.round(red.matrix.real, 6))

print("\n=== overhead floor consistency ===")
for p in (0.1, 0.25):
    mod = trivial_module(p)
    delta = logical_error_rate(mod)
    report = overhead_floor(BoundInputs(m=mod.m, k=mod.k, depth=float(mod.depth),
                                        p=p, delta=delta, dim=2))
    print(f"  p={p}: measured delta={delta:.4f}, floor={report.value:.4f}, "
          f"m/k={mod.m / mod.k}, satisfiable={report.satisfiable}")
