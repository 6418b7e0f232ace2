#!/usr/bin/env python3
"""Run the full verification harness at reduced budgets and print each
report; the acceptance suite runs the same checks at full scale."""

import json

from locbound import (
    five_qubit_code,
    four_two_two_code,
    verify_appendix,
    verify_corr_max_entangled,
    verify_depth_bound,
    verify_overhead_consistency,
    verify_sie,
    verify_structure_code,
)


def show(report):
    print(json.dumps(report.to_json(), indent=2)[:600])
    print()


print("--- small incremental entangling ---")
show(verify_sie(seed=7, qubits=6, layers=30))

print("--- code structure (five-qubit, pairs + singleton) ---")
show(verify_structure_code(five_qubit_code(), [[0, 1], [2, 3], [4]]))

print("--- code structure ([[4,2,2]], singletons) ---")
show(verify_structure_code(four_two_two_code(), [[0], [1], [2], [3]]))

print("--- correctable regions are maximally entangled ---")
show(verify_corr_max_entangled(five_qubit_code(), n_states=8, seed=3))

print("--- depth bound scenarios ---")
show(verify_depth_bound())

print("--- appendix inequalities ---")
show(verify_appendix(seed=11, trials=200))

print("--- overhead consistency over the module corpus ---")
show(verify_overhead_consistency())
