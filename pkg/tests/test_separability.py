import math

import numpy as np
import pytest

from locbound.entropy import relative_entropy, vn_entropy
from locbound.qstate import (
    ClassicalQuantumState,
    DensityMatrix,
    RegisterLayout,
    max_entangled_state,
)
from locbound.rand import apply_kraus, random_density, random_pure, random_unitary
from locbound.separability import (
    _objective_and_grad,
    ree_bracket,
    ree_lower,
    ree_lower_cq,
    ree_upper,
    ree_upper_cq,
)

Q2 = RegisterLayout.qubits("a", "b")


def bell_state():
    return max_entangled_state(1, "a", "b").to_density()


def test_ree_lower_examples():
    assert abs(ree_lower(bell_state(), ["a"]) - 1.0) < 1e-9
    rng = np.random.default_rng(0)
    prod = DensityMatrix(
        Q2,
        np.kron(random_density(rng, RegisterLayout.qubits("a")).matrix,
                random_density(rng, RegisterLayout.qubits("b")).matrix),
        validate=False,
    )
    assert abs(ree_lower(prod, ["a"])) < 1e-9
    mm = DensityMatrix.maximally_mixed(Q2)
    assert ree_lower(mm, ["a"]) == 0.0  # max(-1, -1, 0)

    with pytest.raises(ValueError):
        ree_lower(mm, ["a"], ["a"])


def test_ree_upper_pure_product():
    rng = np.random.default_rng(1)
    prod = DensityMatrix(
        Q2,
        np.kron(random_pure(rng, RegisterLayout.qubits("a")).to_density().matrix,
                random_pure(rng, RegisterLayout.qubits("b")).to_density().matrix),
        validate=False,
    )
    val, ens = ree_upper(prod, ["a"], restarts=2, iterations=200, seed=0)
    assert val <= 1e-6


def test_ree_upper_bell_with_witness():
    val, ens = ree_upper(bell_state(), ["a"], restarts=3, iterations=400, seed=0)
    assert abs(val - 1.0) <= 1e-3
    # the witness ensemble itself must certify the bound
    sigma = ens.assemble(Q2)
    recomputed = relative_entropy(bell_state(), sigma)
    assert recomputed.is_finite
    assert abs(float(recomputed) - val) < 1e-9


def test_ree_upper_werner_quarter():
    # singlet weight 1/4: separable, certified by the positive partial
    # transpose of the input (2x2 case)
    psi_m = np.array([0, 1, -1, 0]) / np.sqrt(2)
    mat = 0.25 * np.outer(psi_m, psi_m) + 0.75 * np.eye(4) / 4
    pt = mat.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    assert np.linalg.eigvalsh(pt).min() >= -1e-12
    wern = DensityMatrix(Q2, mat)
    val, _ = ree_upper(wern, ["a"], seed=0)
    assert val <= 0.02


def test_ree_upper_dimension_cap():
    big = RegisterLayout.of(("a", 16), ("b", 8))
    rho = DensityMatrix.maximally_mixed(big)
    with pytest.raises(ValueError):
        ree_upper(rho, ["a"])


def test_ree_bracket_examples():
    br = ree_bracket(bell_state(), ["a"], seed=0)
    assert abs(br.lower - 1.0) < 1e-9
    assert br.lower <= br.upper + 1e-6
    assert br.upper <= 1.001

    rng = np.random.default_rng(2)
    prod = DensityMatrix(
        Q2,
        np.kron(random_density(rng, RegisterLayout.qubits("a")).matrix,
                random_density(rng, RegisterLayout.qubits("b")).matrix),
        validate=False,
    )
    br = ree_bracket(prod, ["a"], seed=0)
    assert br.lower == 0.0
    assert br.upper <= 1e-3

    v = np.zeros(4)
    v[0], v[3] = np.sqrt(0.75), np.sqrt(0.25)
    st = DensityMatrix.from_vector(Q2, v)
    br = ree_bracket(st, ["a"], seed=0)
    h_quarter = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))
    assert abs(br.lower - h_quarter) < 1e-9
    assert br.upper - br.lower <= 1e-3


def test_pure_state_tightness():
    rng = np.random.default_rng(3)
    for i in range(20):
        rho = random_pure(rng, Q2).to_density()
        br = ree_bracket(rho, ["a"], seed=i)
        assert br.upper - br.lower <= 1e-3
        # for pure states the REE equals the entanglement entropy
        assert abs(br.lower - vn_entropy(rho, ["a"])) < 1e-9


def test_sandwich_random_states():
    rng = np.random.default_rng(4)
    layouts = [
        (Q2, 3, 120, 300),
        (RegisterLayout.of(("a", 2), ("b", 4)), 1, 60, 80),
        (RegisterLayout.of(("a", 4), ("b", 4)), 1, 30, 30),
    ]
    for lay, restarts, iters, n_states in layouts:
        for i in range(n_states):
            rho = random_density(rng, lay, rank=int(rng.integers(1, lay.dim + 1)))
            low = ree_lower(rho, ["a"])
            up, _ = ree_upper(rho, ["a"], restarts=restarts, iterations=iters, seed=i)
            assert low <= up + 1e-6


def test_monotone_under_separable_channels():
    # transport the witness ensemble through a random product channel:
    # separable channels map it to a separable state, so the transported
    # relative entropy stays a valid upper bound and cannot grow
    rng = np.random.default_rng(5)
    for i in range(15):
        rho = random_density(rng, Q2, rank=int(rng.integers(1, 5)))
        up, ens = ree_upper(rho, ["a"], restarts=3, iterations=200, seed=i)
        probs = rng.dirichlet(np.ones(3))
        kraus = [
            np.sqrt(p) * np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
            for p in probs
        ]
        out_rho = DensityMatrix(Q2, apply_kraus(rho.matrix, kraus), validate=False)
        out_sig = DensityMatrix(Q2, apply_kraus(ens.assemble(Q2).matrix, kraus),
                                validate=False)
        transported = relative_entropy(out_rho, out_sig)
        assert transported.is_finite
        assert float(transported) <= up + 1e-3


def test_budget_monotone_and_deterministic():
    rng = np.random.default_rng(6)
    rho = random_density(rng, Q2)
    small, _ = ree_upper(rho, ["a"], restarts=1, iterations=40, seed=9)
    big, _ = ree_upper(rho, ["a"], restarts=6, iterations=400, seed=9)
    assert big <= small + 1e-12
    again, _ = ree_upper(rho, ["a"], restarts=6, iterations=400, seed=9)
    assert big == again


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(7)
    rho = random_density(rng, Q2).matrix
    terms, da, db = 4, 2, 2
    theta = rng.standard_normal(terms * (1 + 2 * da + 2 * db))
    evals = np.clip(np.linalg.eigvalsh(rho), 0, None)
    pos = evals[evals > 1e-12]
    tr_log = float((pos * np.log2(pos)).sum())
    f0, grad = _objective_and_grad(theta, rho, terms, da, db, tr_log)
    h = 1e-6
    for idx in rng.choice(len(theta), size=12, replace=False):
        bump = theta.copy()
        bump[idx] += h
        f1, _ = _objective_and_grad(bump, rho, terms, da, db, tr_log)
        fd = (f1 - f0) / h
        assert abs(fd - grad[idx]) < 5e-5 * max(1.0, abs(fd))


def test_thread_override_reproduces_serial(monkeypatch):
    rng = np.random.default_rng(8)
    rho = random_density(rng, Q2)
    serial, _ = ree_upper(rho, ["a"], restarts=4, iterations=120, seed=3)
    monkeypatch.setenv("LOCBOUND_THREADS", "3")
    threaded, _ = ree_upper(rho, ["a"], restarts=4, iterations=120, seed=3)
    assert serial == threaded


def test_cq_ree_bounds():
    zero = DensityMatrix.computational(Q2, [0, 0])
    bell = bell_state()
    cq = ClassicalQuantumState(Q2, [("s=0;", 0.5, zero), ("s=1;", 0.5, bell)])
    up = ree_upper_cq(cq, ["a"], restarts=2, iterations=200, seed=0)
    low = ree_lower_cq(cq, ["a"])
    assert low <= up + 1e-6
    # upper bound averages the branch values: 0.5 * 0 + 0.5 * 1
    assert abs(up - 0.5) <= 2e-3
