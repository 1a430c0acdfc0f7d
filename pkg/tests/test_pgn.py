from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from sffsba import pgn
from sffsba.netgen import DirectedGeneNetwork, generate_ba, generate_er
from sffsba.pgn import TransitionModel, build_transition_model, simulate, step


def test_truth_table_sizes():
    net = DirectedGeneNetwork(4, [[], [0], [0, 1], [0, 1, 2]])
    model = build_transition_model(net, seed=0)
    assert [t.shape for t in model.functions] == [(3, 1), (3, 2), (3, 4), (3, 8)]
    assert 2 ** model.functions[2].shape[1] == 16


def test_default_probabilities_satisfy_reachability():
    model = build_transition_model(generate_er(20, 2, 0), 0.98, 0.01, 0.01, seed=1)
    assert all(c > 0 for c in model.selection_probs)
    assert abs(sum(model.selection_probs) - 1) <= 1e-12


@pytest.mark.parametrize("probs", [(1.0, 0.0, 0.0), (0.5, 0.5, 0.1), (0.9, 0.2, -0.1)])
def test_invalid_probabilities(probs):
    with pytest.raises(ValueError):
        build_transition_model(generate_er(5, 1, 0), *probs, seed=0)


def _identical_model(net, seed=0):
    model = build_transition_model(net, seed=seed, source_uniform=False)
    for t in model.functions:
        t[1:] = t[0]
    return model


def test_identical_functions_make_step_deterministic():
    net = generate_ba(30, 2, 3)
    model = _identical_model(net)
    state = np.random.default_rng(0).integers(0, 2, 30, dtype=np.uint8)
    outs = {tuple(step(model, state, np.random.default_rng(s))) for s in range(20)}
    assert len(outs) == 1


def test_single_gene_is_a_source():
    net = DirectedGeneNetwork(1, [[]])
    net.validate()
    model = build_transition_model(net, seed=0)
    exps = simulate(model, 2000, seed=1)
    # fair-coin source behaviour
    assert 0.45 < exps.values.mean() < 0.55


def test_copy_chain_agreement():
    net = DirectedGeneNetwork(2, [[], [0]])
    model = build_transition_model(net, seed=0)
    model.functions[1][0] = [0, 1]
    exps = simulate(model, 10001, seed=7)
    agree = np.mean(exps.values[1, 1:] == exps.values[0, :-1])
    assert agree >= 0.97


def test_simulate_shape_and_determinism():
    model = build_transition_model(generate_er(100, 2, 0), seed=1)
    exps = simulate(model, 5, seed=3)
    assert exps.values.shape == (100, 5) and exps.n_genes == 100 and exps.n_times == 5
    assert set(np.unique(exps.values)) <= {0, 1}
    np.testing.assert_array_equal(exps.values, simulate(model, 5, seed=3).values)


def test_simulate_needs_two_points():
    model = build_transition_model(generate_er(5, 1, 0), seed=1)
    with pytest.raises(ValueError):
        simulate(model, 1, seed=0)


def test_deterministic_model_trajectory_follows_first_column():
    net = generate_er(20, 2, 5)
    model = _identical_model(net, seed=2)
    exps = simulate(model, 12, seed=4)
    state = exps.values[:, 0]
    for t in range(1, 12):
        state = step(model, state, np.random.default_rng(t))
        np.testing.assert_array_equal(exps.values[:, t], state)


def _next_states(model, state, draws, seed):
    rng = np.random.default_rng(seed)
    return np.array([step(model, state, rng) for _ in range(draws)])


def test_homogeneity():
    net = generate_er(6, 1.5, 11)
    model = build_transition_model(net, seed=12)
    state = np.array([1, 0, 1, 1, 0, 0], dtype=np.uint8)
    a = _next_states(model, state, 3000, seed=1)
    b = _next_states(model, state, 3000, seed=2)
    # per-gene marginals of two independent epochs agree within sampling error
    assert np.all(np.abs(a.mean(axis=0) - b.mean(axis=0)) < 0.05)


def test_chain_leaves_fixed_points():
    net = generate_er(8, 1.5, 3)
    model = build_transition_model(net, seed=4, source_uniform=False)
    exps = simulate(model, 3000, seed=5)
    assert len({tuple(c) for c in exps.values.T}) > 1


def test_conditional_independence():
    net = DirectedGeneNetwork(3, [[], [0], [0]])
    model = build_transition_model(net, 0.6, 0.2, 0.2, seed=0)
    model.functions[1][:] = [[0, 1], [1, 0], [1, 1]]
    model.functions[2][:] = [[1, 0], [0, 0], [0, 1]]
    nxt = _next_states(model, np.array([1, 0, 0], dtype=np.uint8), 4000, seed=9)
    table = np.zeros((2, 2))
    for a, b in zip(nxt[:, 1], nxt[:, 2]):
        table[a, b] += 1
    assert stats.chi2_contingency(table)[1] > 0.01


def test_quasi_determinism():
    # modal probability is 0.98**n, so keep the network small
    net = generate_er(4, 2, 21)
    model = build_transition_model(net, seed=22, source_uniform=False)
    for t in model.functions:
        t[1] = 1 - t[0]
        t[2] = 1 - t[0]
    rng = np.random.default_rng(0)
    for _ in range(5):
        state = rng.integers(0, 2, 4, dtype=np.uint8)
        nxt = _next_states(model, state, 2000, seed=int(rng.integers(1e6)))
        modal = Counter(map(tuple, nxt)).most_common(1)[0][1] / len(nxt)
        assert modal >= 0.9


def test_hub_genes_use_hashed_tables():
    net = DirectedGeneNetwork(21, [list(range(1, 21))] + [[] for _ in range(20)])
    model = build_transition_model(net, seed=0)
    assert isinstance(model.functions[0], pgn.HashedTables)
    assert model.functions[0].shape == (3, 2 ** 20)
    exps = simulate(model, 50, seed=1)
    assert exps.values.shape == (21, 50)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 30), st.integers(2, 40), st.integers(0, 10 ** 6))
def test_matrix_round_trip(n, n_times, seed):
    values = np.random.default_rng(seed).integers(0, 2, (n, n_times), dtype=np.uint8)
    exps = pgn.ExpressionMatrix(values, seed)
    text = pgn.format_matrix(exps)
    assert text.startswith(f"# n={n} T={n_times} seed={seed}\n")
    back = pgn.parse_matrix(text)
    np.testing.assert_array_equal(back.values, values)
    assert back.seed == seed and pgn.format_matrix(back) == text


def test_matrix_file_round_trip(tmp_path):
    exps = simulate(build_transition_model(generate_ba(30, 2, 1), seed=2), 20, seed=3)
    pgn.write_matrix(exps, tmp_path / "m.tsv")
    back = pgn.read_matrix(tmp_path / "m.tsv")
    pgn.write_matrix(back, tmp_path / "m2.tsv")
    assert (tmp_path / "m.tsv").read_bytes() == (tmp_path / "m2.tsv").read_bytes()
