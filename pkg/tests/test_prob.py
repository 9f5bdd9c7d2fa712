import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matchhelper.prob import (DONT_CARE, FunctionTable, JointPmf, Pmf, ValidationError,
                              binary_entropy, conditional_entropy, entropy, joint_entropy,
                              marginals, pushforward, tv_distance)
from matchhelper.instances import example1

from .conftest import h2


def pmf_vectors(min_size=2, max_size=6):
    return st.lists(st.floats(0, 1), min_size=min_size, max_size=max_size).filter(
        lambda v: sum(v) > 1e-3).map(lambda v: np.array(v) / sum(v))


def test_entropy_examples():
    assert entropy([0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)
    assert entropy([1.0, 0.0]) == 0.0
    # direct evaluation: -(3/4 log 3/4 + 1/4 log 1/4)
    assert entropy([0.75, 0.25]) == pytest.approx(0.8112781244591328, abs=1e-15)


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(0.25) == pytest.approx(0.8112781244591328, abs=1e-15)
    assert binary_entropy(0.2) == pytest.approx(binary_entropy(0.8), abs=1e-15)
    with pytest.raises(ValueError):
        binary_entropy(1.01)
    with pytest.raises(ValueError):
        binary_entropy(-0.5)


def test_pmf_validation():
    with pytest.raises(ValidationError):
        Pmf(np.array([0.5, 0.49]))
    with pytest.raises(ValidationError):
        Pmf(np.array([1.5, -0.5]))
    with pytest.raises(ValidationError):
        JointPmf(np.array([[0.5, 0.5], [0.0, -0.0001]]))


@pytest.mark.parametrize("d", [0.05, 0.2, 0.3, 0.49])
def test_marginals_example1(d):
    p1, p2 = marginals(example1(d).joint)
    np.testing.assert_allclose(p1.masses, [1 / 3] * 3, atol=1e-15)
    np.testing.assert_allclose(p2.masses, [1 / 3] * 3, atol=1e-15)


def test_marginals_simple(rng):
    p1, p2 = marginals(JointPmf(np.eye(2) / 2))
    np.testing.assert_allclose(p1.masses, [0.5, 0.5])
    np.testing.assert_allclose(p2.masses, [0.5, 0.5])
    a, b = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(4))
    p1, p2 = marginals(JointPmf(np.outer(a, b)))
    np.testing.assert_allclose(p1.masses, a, atol=1e-14)
    np.testing.assert_allclose(p2.masses, b, atol=1e-14)


@pytest.mark.parametrize("d", [0.1, 0.25, 0.4])
def test_conditional_entropy_example1(d):
    expected = 2 / 3 * h2(d) + 1 / 3 * entropy([d, d, 1 - 2 * d])
    assert conditional_entropy(example1(d).joint, given=1) == pytest.approx(expected, abs=1e-12)


def test_conditional_entropy_trivial(rng):
    a, b = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
    assert conditional_entropy(JointPmf(np.outer(a, b))) == pytest.approx(entropy(b), abs=1e-12)
    assert conditional_entropy(JointPmf(np.diag(a))) == 0.0


def test_tv_examples():
    p = Pmf(np.array([0.3, 0.7]))
    assert tv_distance(p, p) == 0.0
    assert tv_distance(Pmf(np.array([1.0, 0.0])), Pmf(np.array([0.0, 1.0]))) == 1.0
    assert tv_distance(Pmf(np.array([0.5, 0.5])), Pmf(np.array([0.75, 0.25]))) == 0.25
    with pytest.raises(ValueError):
        tv_distance(Pmf(np.array([1.0])), Pmf(np.array([0.5, 0.5])))


@pytest.mark.parametrize("d", [0.1, 0.3])
def test_pushforward_example1(d):
    inst = example1(d)
    pf = pushforward(inst.joint, inst.function)
    got = dict(zip(pf.labels, pf.masses))
    expected = {1: (2 - 2 * d) / 3, 2: (1 - 2 * d) / 3, 3: 2 * d / 3, 4: 2 * d / 3}
    assert set(got) == set(expected)
    for k, v in expected.items():
        assert got[k] == pytest.approx(v, abs=1e-15)


def test_pushforward_trivial(rng):
    m = rng.random((3, 3))
    P = JointPmf(m / m.sum())
    const = FunctionTable.from_callable(3, 3, lambda i, j: "c")
    assert entropy(pushforward(P, const)) == 0.0
    ident = FunctionTable.from_callable(3, 3, lambda i, j: (i, j))
    np.testing.assert_allclose(pushforward(P, ident).masses, P.matrix.ravel(), atol=1e-15)


def test_pushforward_rejects_dontcare_on_support():
    P = JointPmf(np.full((2, 2), 0.25))
    F = FunctionTable(((DONT_CARE, 1), (1, 0)))
    with pytest.raises(ValidationError):
        pushforward(P, F)


@given(pmf_vectors(1, 8))
def test_entropy_bounds(p):
    h = entropy(p)
    assert -1e-12 <= h <= np.log2(len(p)) + 1e-12


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_entropy_uniform_is_max(n):
    assert entropy(Pmf.uniform(n)) == pytest.approx(np.log2(n), abs=1e-12)


@settings(max_examples=60)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(pmf_vectors(n, n), pmf_vectors(n, n),
                                                      pmf_vectors(n, n))))
def test_tv_is_metric(triple):
    a, b, c = (Pmf(x) for x in triple)
    assert tv_distance(a, b) == pytest.approx(tv_distance(b, a), abs=1e-15)
    assert tv_distance(a, a) <= 1e-12
    assert tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12
    assert 0 <= tv_distance(a, b) <= 1 + 1e-12


def test_chain_rule_and_data_processing(rng):
    for _ in range(50):
        n1, n2 = rng.integers(1, 6, size=2)
        m = rng.random((n1, n2)) * (rng.random((n1, n2)) > 0.3)
        if m.sum() == 0:
            continue
        P = JointPmf(m / m.sum())
        p1, _ = marginals(P)
        assert joint_entropy(P) == pytest.approx(entropy(p1) + conditional_entropy(P, 1), abs=1e-9)
        F = FunctionTable.from_callable(n1, n2, lambda i, j: int(rng.integers(0, 3)))
        pf = pushforward(P, F)
        assert pf.masses.sum() == pytest.approx(1.0, abs=1e-12)
        assert entropy(pf) <= joint_entropy(P) + 1e-9
