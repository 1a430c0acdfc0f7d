from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sffsba import search
from sffsba.criterion import criterion_value
from sffsba.netgen import DirectedGeneNetwork, generate_er
from sffsba.pgn import ExpressionMatrix, build_transition_model, simulate
from sffsba.search import (network_inference, sbs, sffs, sffs_ba_inner, sfs, TargetEvaluator)

from conftest import balanced_xor_matrix, copy_matrix, random_matrix, xor_matrix


def copy_link_pgn(seed, n=10, n_times=100, target=0, source=3, deterministic=False):
    """ER background network where ``target`` is driven only by ``source`` through identity."""
    net = generate_er(n, 1.5, seed)
    preds = [list(p) for p in net.predecessors]
    preds[target] = [source]
    preds[source] = []   # fair-coin driver
    net = DirectedGeneNetwork(n, preds, "ER", seed)
    model = build_transition_model(net, seed=seed + 1)
    model.functions[target][0] = [0, 1]
    if deterministic:
        model.functions[target][:] = [0, 1]
    return simulate(model, n_times, seed + 2)


def exhaustive_min(exps, target, max_size=2, alpha=1.0):
    pool = [j for j in range(exps.n_genes) if j != target]
    return min(criterion_value(exps, target, s, alpha)
               for r in range(1, max_size + 1) for s in combinations(pool, r))


# -- sfs ---------------------------------------------------------------------

def test_sfs_noop_when_base_has_target_size(copy_exps):
    subset, value = sfs(copy_exps, 0, {3, 5}, 2)
    assert subset == (3, 5)
    assert value == criterion_value(copy_exps, 0, [3, 5])


def test_sfs_finds_copy_link():
    for seed in range(20):
        exps = copy_link_pgn(seed)
        subset, value = sfs(exps, 0, (), 1)
        assert subset == (3,)
        # ~1% of transitions are flipped by the noisy functions; H(0.05) ~ 0.29
        assert value < 0.3


def test_sfs_xor_singletons_are_useless():
    exps = balanced_xor_matrix(n=6, reps=16, seed=0)
    subset, value = sfs(exps, 2, (), 1, alpha=0)
    assert len(subset) == 1 and value > 0.9


def test_sfs_rejects_oversized_target(copy_exps):
    with pytest.raises(ValueError):
        sfs(copy_exps, 0, (), copy_exps.n_genes + 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 10), st.integers(8, 60), st.integers(0, 10 ** 6), st.integers(2, 4))
def test_sfs_nesting(n, n_times, seed, size):
    exps = random_matrix(n, n_times, seed)
    size = min(size, n - 1)
    small, _ = sfs(exps, 0, (), size - 1)
    big, _ = sfs(exps, 0, (), size)
    assert set(small) <= set(big)


# -- sbs ---------------------------------------------------------------------

def test_sbs_drops_irrelevant_feature():
    for seed in range(5):
        exps = copy_link_pgn(seed, deterministic=True)
        assert sbs(exps, 0, {3, 7})[0] == (3,)


def test_sbs_keeps_xor_pair():
    exps = balanced_xor_matrix(n=6, reps=16, seed=1)
    subset, value = sbs(exps, 2, {0, 1}, alpha=0)
    assert subset == (0, 1) and value == 0.0


def test_sbs_singleton_unchanged(copy_exps):
    assert sbs(copy_exps, 0, {5})[0] == (5,)
    with pytest.raises(ValueError):
        sbs(copy_exps, 0, set())


# -- sffs --------------------------------------------------------------------

def test_sffs_copy_link():
    for seed in range(5):
        exps = copy_link_pgn(seed, deterministic=True)
        subset, value = sffs(exps, 0, 4)
        assert subset == (3,) and value == 0.0


def test_sffs_tie_prefers_smallest_cardinality():
    exps = copy_matrix(n=6, n_times=80, seed=3, target=0, source=2)
    subset, value = sffs(exps, 0, 3, alpha=0)
    assert subset == (2,) and value == 0.0


@pytest.mark.xfail(strict=True, reason="empirical conditioning keeps lowering the criterion "
                                        "on random targets, so SFFS does not stop at one feature")
def test_sffs_source_returns_single_feature():
    hits = 0
    for seed in range(50):
        exps = random_matrix(20, 50, seed)
        hits += len(sffs(exps, 0, 5)[0]) == 1
    assert hits >= 45


def test_sffs_max_size_one_equals_sfs():
    for seed in range(10):
        exps = random_matrix(8, 30, seed)
        assert sffs(exps, 1, 1) == sfs(exps, 1, (), 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 10), st.integers(8, 60), st.integers(0, 10 ** 6), st.integers(1, 4))
def test_sffs_never_worse_than_sfs(n, n_times, seed, size):
    exps = random_matrix(n, n_times, seed)
    size = min(size, n - 1)
    best_sfs = min(sfs(exps, 0, (), s)[1] for s in range(1, size + 1))
    assert sffs(exps, 0, size)[1] <= best_sfs + 1e-12


# -- sffs_ba_inner -----------------------------------------------------------

def test_inner_k1_returns_all_singletons():
    exps = random_matrix(4, 30, 0)
    psets, best, gain = sffs_ba_inner(0, 1.0, [], 1, exps, exclude_self=False)
    assert sorted(psets) == [(0,), (1,), (2,), (3,)]
    values = [criterion_value(exps, 0, p) for p in psets]
    assert best == min(values)
    assert values == sorted(values)
    assert gain == pytest.approx(1.0 - best)
    psets, _, _ = sffs_ba_inner(0, 1.0, [], 1, exps)
    assert sorted(psets) == [(1,), (2,), (3,)]


def test_inner_recovers_xor_pair():
    found = 0
    for seed in range(20):
        exps = xor_matrix(n=8, n_times=64, seed=seed)
        psets, cfv, _ = sffs_ba_inner(2, 1.0, [], 1, exps)
        psets, best, gain = sffs_ba_inner(2, cfv, psets, 2, exps, delta=0.05)
        found += psets == [(0, 1)] and best == 0.0 and gain > 0.8
    assert found == 20


def test_inner_at_optimum_keeps_set():
    exps = copy_matrix(n=6, n_times=40, seed=0, target=0, source=3)
    psets, best, gain = sffs_ba_inner(0, 0.0, [(3,)], 2, exps)
    assert psets == [(3,)] and best == 0.0 and gain == 0.0


def test_inner_breadth_expands_every_singleton(monkeypatch):
    exps = random_matrix(7, 40, 5)
    ev = TargetEvaluator(exps, 0)
    expanded = []
    original = ev.best_partner

    def spy(feature):
        expanded.append(feature)
        return original(feature)

    monkeypatch.setattr(ev, "best_partner", spy)
    psets, cfv, _ = sffs_ba_inner(0, 1.0, [], 1, exps, evaluator=ev)
    assert len(psets) == 6
    sffs_ba_inner(0, cfv, psets, 2, exps, evaluator=ev)
    assert sorted(expanded) == [1, 2, 3, 4, 5, 6]


def test_pair_shortcut_matches_generic_sfs():
    exps = random_matrix(9, 50, 8)
    ev = TargetEvaluator(exps, 4)
    for j in ev.pool:
        partner, value = ev.best_partner(int(j))
        generic = sfs(exps, 4, (int(j),), 2)
        assert _sorted_pair(j, partner) == generic[0]
        assert value == pytest.approx(generic[1], abs=1e-12)


def _sorted_pair(a, b):
    return tuple(sorted((int(a), int(b))))


def test_exhaustive_oracle():
    hits = total = 0
    for seed in range(20):
        net = generate_er(8, 2, seed)
        exps = simulate(build_transition_model(net, seed=seed + 100), 64, seed + 200)
        for target in range(8):
            psets, cfv, _ = sffs_ba_inner(target, 1.0, [], 1, exps)
            psets, best, _ = sffs_ba_inner(target, cfv, psets, 2, exps)
            assert best == pytest.approx(criterion_value(exps, target, psets[0]), abs=1e-12)
            hits += best <= exhaustive_min(exps, target) + 0.05 + 1e-12
            total += 1
    assert hits / total >= 0.9


# -- network_inference ------------------------------------------------------

def test_schedule_arithmetic():
    exps = random_matrix(100, 30, 1)
    inferred = network_inference(range(100), exps, gamma=2.5, optimum_epsilon=0.0)
    assert inferred.schedule == [100, 100, 17]


def test_schedule_with_round_option():
    assert search._next_count(17, 3, 2.5, "round") == 1
    assert search._next_count(100, 2, 2.5, "round") == 18
    assert search._next_count(100, 2, 2.5, "floor") == 17


def test_single_target_keeps_initialization():
    exps = random_matrix(10, 30, 2)
    inferred = network_inference([4], exps)
    assert inferred.schedule == []
    assert inferred.predictors == {4: ()}


def test_huge_gamma_runs_two_rounds():
    exps = random_matrix(30, 30, 3)
    inferred = network_inference(range(30), exps, gamma=1e6, optimum_epsilon=0.0)
    assert inferred.schedule == [30, 30]
    assert all(r == 2 for r in inferred.rounds_active.values())


@settings(max_examples=10, deadline=None)
@given(st.integers(5, 40), st.integers(10, 40), st.integers(0, 10 ** 6), st.floats(0.5, 4))
def test_schedule_non_increasing(n, n_times, seed, gamma):
    exps = random_matrix(n, n_times, seed)
    sched = network_inference(range(n), exps, gamma=gamma).schedule
    assert all(b <= a for a, b in zip(sched[1:], sched[2:]))


def test_frozen_targets_are_not_expanded():
    exps = copy_matrix(n=12, n_times=60, seed=4, target=0, source=3)
    inferred = network_inference(range(12), exps, optimum_epsilon=0.01)
    assert inferred.predictors[0] == (3,)
    assert inferred.rounds_active[0] == 1


def test_source_rule_empties_flat_targets():
    rng = np.random.default_rng(0)
    values = rng.integers(0, 2, size=(12, 100), dtype=np.uint8)
    inferred = network_inference(range(12), ExpressionMatrix(values))
    n_empty = sum(1 for p in inferred.predictors.values() if not p)
    assert n_empty >= 8


def test_determinism():
    exps = random_matrix(25, 40, 6)
    a = network_inference(range(25), exps)
    b = network_inference(range(25), exps)
    assert a.predictors == b.predictors and a.values == b.values


def test_infer_network_methods():
    exps = random_matrix(10, 30, 7)
    for method in search.METHODS:
        inferred = search.infer_network(exps, method)
        assert set(inferred.predictors) == set(range(10))
        for t, preds in inferred.predictors.items():
            assert t not in preds
    with pytest.raises(ValueError):
        search.infer_network(exps, "BOGUS")
