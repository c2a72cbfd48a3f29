"""Empirical joint tables, mutual information and the decomposition solver."""

import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from duokerr.infodecomp import (DiscreteJoint, OptimizationError, broja_pid,
                                co_information, discretize, joint_histogram,
                                load_gate, mutual_information, symbolize)

DATA = os.path.join(os.path.dirname(__file__), "data")

# I(Z:(X,Y)) of the AND gate: 3/4 log2(4/3) + 1/4 log2(4)
AND_MI = 0.75 * np.log2(4 / 3) + 0.5
AND_RDN = 0.75 * np.log2(4 / 3)


def random_joint(seed, dims=(2, 2, 2)):
    rng = np.random.default_rng(seed)
    return DiscreteJoint(rng.dirichlet(np.ones(np.prod(dims))).reshape(dims))


def test_table_validation():
    with pytest.raises(ValueError, match="three axes"):
        DiscreteJoint(np.full((2, 2), 0.25))
    with pytest.raises(ValueError, match="negative"):
        DiscreteJoint(np.array([[[0.6, 0.5]], [[-0.1, 0.0]]]))
    with pytest.raises(ValueError, match="sum"):
        DiscreteJoint(np.full((2, 1, 1), 0.4))
    with pytest.raises(ValueError):
        random_joint(0).pairwise(3)


def test_discretize_two_level():
    syms = discretize(np.array([-1.0, 1.0, 1.0, -1.0]), n_bins=2)
    assert syms.tolist() == [0, 1, 1, 0]


def test_discretize_ramp_quartiles():
    syms = discretize(np.linspace(0.0, 1.0, 8), n_bins=4)
    assert syms.tolist() == [0, 0, 1, 1, 2, 2, 3, 3]  # top edge in top bin


def test_discretize_constant_warns():
    with pytest.warns(UserWarning, match="single symbol"):
        syms = discretize(np.full(10, 2.5))
    assert not syms.any()


def test_discretize_explicit_edges():
    syms = discretize([0.1, 0.6, 2.0], strategy="explicit_edges",
                      edges=[0.0, 0.5, 1.0])
    assert syms.tolist() == [0, 1, 1]  # clipped into the outer bins


def test_discretize_errors():
    with pytest.raises(ValueError):
        discretize([], n_bins=2)
    with pytest.raises(ValueError):
        discretize([1.0, 2.0], n_bins=1)
    with pytest.raises(ValueError):
        discretize([1.0], strategy="explicit_edges")
    with pytest.raises(ValueError):
        discretize([1.0], strategy="quantile")


def test_symbolize_natural_alphabet():
    assert symbolize([-1.0, 1.0, -1.0]).tolist() == [0, 1, 0]


def test_joint_histogram_delta():
    j = joint_histogram([0], [0], [0])
    assert j.probs.shape == (1, 1, 1) and j.probs[0, 0, 0] == 1.0


def test_joint_histogram_counts():
    rng = np.random.default_rng(3)
    s, x1, x2 = (rng.integers(0, k, size=500) for k in (2, 4, 3))
    j = joint_histogram(s, x1, x2)
    counts = j.probs * 500
    assert np.abs(counts - np.round(counts)).max() < 1e-9
    assert j.dims == (2, 4, 3)


def test_joint_histogram_independent_streams():
    # product structure within sampling error: Pearson statistic against the
    # fitted product of marginals, 8 cells minus 1 minus 3 fitted params
    # leaves 4 dof; 18.47 is the 99.9% point
    rng = np.random.default_rng(11)
    s, x1, x2 = (rng.integers(0, 2, size=4000) for _ in range(3))
    j = joint_histogram(s, x1, x2)
    expected = (j.marginal_s()[:, None, None]
                * j.pairwise(1).sum(axis=0)[None, :, None]
                * j.pairwise(2).sum(axis=0)[None, None, :]) * 4000
    stat = ((j.probs * 4000 - expected) ** 2 / expected).sum()
    assert stat < 18.47


def test_joint_histogram_errors():
    with pytest.raises(ValueError):
        joint_histogram([0, 1], [0], [0])
    with pytest.raises(ValueError):
        joint_histogram([], [], [])


def test_mutual_information_values():
    product = DiscreteJoint(np.full((2, 2, 2), 0.125))
    assert mutual_information(product, "joint") == pytest.approx(0.0, abs=1e-12)
    copy = load_gate("copy")
    assert mutual_information(copy, "x1") == pytest.approx(1.0, abs=1e-12)
    gate = load_gate("and")
    assert mutual_information(gate, "joint") == pytest.approx(AND_MI, abs=1e-12)
    assert mutual_information(gate, "x1") == pytest.approx(AND_RDN, abs=1e-12)
    assert mutual_information(gate, "x2") == pytest.approx(AND_RDN, abs=1e-12)
    with pytest.raises(ValueError):
        mutual_information(gate, "x3")


def test_co_information_values():
    assert co_information(load_gate("xor")) == pytest.approx(-1.0, abs=1e-12)
    assert co_information(load_gate("copy")) == pytest.approx(1.0, abs=1e-12)
    product = DiscreteJoint(np.full((2, 2, 2), 0.125))
    assert co_information(product) == pytest.approx(0.0, abs=1e-12)


def test_broja_and_gate():
    pid = broja_pid(load_gate("and"))
    assert pid.synergy == pytest.approx(0.5, abs=1e-6)
    assert pid.redundancy == pytest.approx(AND_RDN, abs=1e-6)
    assert pid.unique1 == pytest.approx(0.0, abs=1e-6)
    assert pid.unique2 == pytest.approx(0.0, abs=1e-6)
    assert pid.syn_norm == pytest.approx(0.5 / AND_MI, abs=1e-5)


def test_broja_xor_gate():
    pid = broja_pid(load_gate("xor"))
    assert pid.synergy == pytest.approx(1.0, abs=1e-8)
    assert pid.redundancy == pytest.approx(0.0, abs=1e-8)
    assert pid.unique1 == pytest.approx(0.0, abs=1e-8)


def test_broja_copy_gate():
    pid = broja_pid(load_gate("copy"))
    assert pid.redundancy == pytest.approx(1.0, abs=1e-8)
    assert pid.synergy == pytest.approx(0.0, abs=1e-8)


def test_optimum_is_admissible():
    p = load_gate("and")
    pid, q = broja_pid(p, return_q=True)
    qj = DiscreteJoint(q)
    assert np.abs(qj.pairwise(1) - p.pairwise(1)).max() < 1e-10
    assert np.abs(qj.pairwise(2) - p.pairwise(2)).max() < 1e-10
    assert mutual_information(qj, "joint") == pytest.approx(
        pid.mi_joint - pid.synergy, abs=1e-9)


def test_projection_agrees_with_grid_scan():
    for seed in range(5):
        p = random_joint(seed)
        proj = broja_pid(p, method="projection")
        grid = broja_pid(p, method="grid")
        assert abs(proj.synergy - grid.synergy) < 1e-6
    with pytest.raises(ValueError, match="at most 3"):
        broja_pid(random_joint(0, dims=(2, 4, 4)), method="grid")
    with pytest.raises(ValueError, match="method"):
        broja_pid(random_joint(0), method="anneal")


@given(seed=st.integers(0, 10_000), n1=st.integers(2, 3), n2=st.integers(2, 3))
@settings(max_examples=25, deadline=None)
def test_pid_identities(seed, n1, n2):
    pid = broja_pid(random_joint(seed, dims=(2, n1, n2)))
    assert min(pid.redundancy, pid.synergy, pid.unique1, pid.unique2) >= 0.0
    assert abs(pid.mi_joint - (pid.redundancy + pid.synergy
                               + pid.unique1 + pid.unique2)) < 1e-6
    assert abs(pid.mi_1 - (pid.redundancy + pid.unique1)) < 1e-6
    assert abs(pid.mi_2 - (pid.redundancy + pid.unique2)) < 1e-6


@given(seed=st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_source_swap_symmetry(seed):
    p = random_joint(seed, dims=(2, 3, 2))
    a = broja_pid(p)
    b = broja_pid(p.swap_sources())
    assert abs(a.synergy - b.synergy) < 1e-8
    assert abs(a.redundancy - b.redundancy) < 1e-8
    assert abs(a.unique1 - b.unique2) < 1e-8
    assert abs(a.unique2 - b.unique1) < 1e-8


def test_objective_convex_along_segments():
    # the joint MI is convex in Q for fixed marginals of s; check chords
    # between the independent table and the optimizer's solution
    for seed in range(3):
        p = random_joint(seed, dims=(2, 3, 3))
        _, q = broja_pid(p, return_q=True)
        ps = p.marginal_s()[:, None, None]
        indep = np.where(ps > 0, p.pairwise(1)[:, :, None]
                         * p.pairwise(2)[:, None, :] / np.where(ps > 0, ps, 1),
                         0.0)

        def mi_of(table):
            return mutual_information(DiscreteJoint(table), "joint")

        f0, f1 = mi_of(indep), mi_of(q)
        for lam in (0.25, 0.5, 0.75):
            chord = (1 - lam) * f0 + lam * f1
            assert mi_of((1 - lam) * indep + lam * q) <= chord + 1e-10


def test_budget_exhaustion_reports_residual():
    with pytest.raises(OptimizationError, match="no convergence after 2"):
        broja_pid(load_gate("and"), tol=1e-18, max_iter=2)
    try:
        broja_pid(load_gate("and"), tol=1e-18, max_iter=2)
    except OptimizationError as exc:
        assert exc.residual > 0


def test_csv_round_trip(tmp_path):
    p = load_gate("and")
    path = tmp_path / "gate.csv"
    p.to_csv(path)
    back = DiscreteJoint.from_csv(path)
    assert np.abs(back.probs - p.probs).max() < 1e-12
    with pytest.raises(FileNotFoundError):
        load_gate("nand")
    (tmp_path / "empty.csv").write_text("s,x1,x2,prob\n")
    with pytest.raises(ValueError, match="no probability rows"):
        DiscreteJoint.from_csv(tmp_path / "empty.csv")


@pytest.mark.parametrize("name,synergy", [
    ("hard_joint", 0.009422268261376765),
    ("slow_joint", 0.027261130214036533),
])
def test_empirical_tables_converge(name, synergy):
    # sampled 2x16x16 tables whose optimum hugs a polytope face; these stall
    # if the inner projections are allowed to run looser than the outer drop
    pid = broja_pid(DiscreteJoint.from_csv(os.path.join(DATA, f"{name}.csv")))
    assert pid.synergy == pytest.approx(synergy, abs=1e-6)
    assert abs(pid.mi_joint - (pid.redundancy + pid.synergy
                               + pid.unique1 + pid.unique2)) < 1e-6
