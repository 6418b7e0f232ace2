import json

import numpy as np
import pytest

from locbound.circuit import Circuit, ConnectivityGraph, Layer, Measure
from locbound.stabilizer import five_qubit_code, four_two_two_code, repetition_code
from locbound.verify import (
    DepthBoundScenario,
    default_module_corpus,
    default_depth_bound_scenarios,
    isolated_pair_module,
    repetition_module,
    swap_module,
    trivial_module,
    verify_appendix,
    verify_corr_max_entangled,
    verify_depth_bound,
    verify_overhead_consistency,
    verify_sie,
    verify_structure_code,
)


def test_verify_sie_passes():
    report = verify_sie(seed=7, qubits=6, layers=30)
    assert report.passed
    assert report.violations == 0
    assert report.trials > 0


def test_verify_sie_deterministic():
    a = verify_sie(seed=21, qubits=4, layers=10).to_json()
    b = verify_sie(seed=21, qubits=4, layers=10).to_json()
    assert json.dumps(a) == json.dumps(b)


def test_verify_sie_guards():
    with pytest.raises(ValueError):
        verify_sie(qubits=10)
    g = ConnectivityGraph(["0"], [])
    circ = Circuit(g, [Layer([Measure("0", "s")])])
    with pytest.raises(ValueError):
        verify_sie(circuit=circ)


def test_sie_bell_creation_increment():
    # one CNOT on |+0>: the entropy across U = {0} jumps by exactly 1,
    # comfortably below the bound 3 |dU| = 6
    from locbound.verify import _cut_entropy

    h = np.array([1, 1], dtype=complex) / np.sqrt(2)
    vec = np.kron(h, np.array([1, 0], dtype=complex))
    before = _cut_entropy(vec, (2, 2), [0])
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                    dtype=complex)
    after_vec = cnot @ vec
    after = _cut_entropy(after_vec, (2, 2), [0])
    g = ConnectivityGraph(["0", "1"], [("0", "1")])
    from locbound.circuit import boundary

    assert abs(before) < 1e-12
    assert abs(after - 1.0) < 1e-12
    assert after - before <= 3 * len(boundary(g, ["0"]))


def test_verify_structure_code():
    code = five_qubit_code()
    report = verify_structure_code(code, [[0, 1], [2, 3], [4]])
    assert report.passed
    assert abs(report.parameters["ree_lower_sum"] - 5.0) < 1e-8

    singles = verify_structure_code(code, [[0], [1], [2], [3], [4]])
    assert singles.passed
    assert abs(singles.parameters["ree_lower_sum"] - 5.0) < 1e-8

    report422 = verify_structure_code(four_two_two_code(), [[0], [1], [2], [3]])
    assert report422.passed
    assert abs(report422.parameters["ree_lower_sum"] - 4.0) < 1e-8

    with pytest.raises(ValueError):
        verify_structure_code(code, [[0, 1, 2], [3, 4]])  # block size >= d
    with pytest.raises(ValueError):
        verify_structure_code(code, [[0, 1], [2, 3]])  # not a partition


def test_verify_corr_max_entangled():
    report = verify_corr_max_entangled(five_qubit_code(), n_states=6, seed=3)
    assert report.passed
    assert report.worst_margin <= 1e-8
    # d = 1 code: no regions below distance, vacuous pass
    vac = verify_corr_max_entangled(repetition_code(), n_states=3, seed=3)
    assert vac.passed
    assert vac.trials == 0


def test_verify_depth_bound_default():
    report = verify_depth_bound()
    assert report.passed
    names = [d["scenario"] for d in report.parameters["scenarios"]]
    assert "isolated-bell-contrapositive" in names


def test_verify_depth_bound_rejects_ill_posed():
    # nontrivial cut with an encoded (non-pure-on-data) target
    sc = DepthBoundScenario("bad", repetition_module(0.2, rounds=1), gamma=("d0",))
    with pytest.raises(ValueError):
        verify_depth_bound([sc])


def test_verify_appendix():
    report = verify_appendix(seed=5, trials=40)
    assert report.passed
    assert report.violations == 0
    assert report.parameters["sandwich_trials"] == 40


def test_verify_overhead_consistency():
    report = verify_overhead_consistency()
    assert report.passed
    modules = report.parameters["modules"]
    names = [m["module"] for m in modules]
    assert "trivial-1q" in names
    assert "repetition-3q-J2" in names
    for entry in modules:
        if "ratio" in entry:
            assert entry["ratio"] >= entry["floor"] - 1e-9


def test_corpus_modules_validate():
    for module in default_module_corpus():
        assert module.validate().ok
    for sc in default_depth_bound_scenarios():
        assert sc.module.validate().ok


def test_repetition_module_corrects_bit_flips():
    # with measurement + correction the repetition module beats an
    # unprotected qubit against pure bit-flip noise; under depolarizing it
    # still produces a valid logical error rate
    from locbound.circuit import logical_error_rate

    mod = repetition_module(0.08, rounds=1)
    delta = logical_error_rate(mod)
    assert 0.0 < delta < 1.0


def test_swap_and_isolated_modules():
    assert swap_module(0.1).depth == 1
    assert isolated_pair_module(0.1).depth == 0
    assert trivial_module(0.1).k == 1
    assert swap_module(0.1).k == 0


def test_report_pass_iff_no_violations():
    report = verify_appendix(seed=5, trials=5)
    assert report.passed == (report.violations == 0)
    payload = report.to_json()
    assert set(payload) == {
        "lemma", "trials", "violations", "worst_margin", "parameters", "seed", "pass",
    }
