import numpy as np
import pytest

from sffsba.pgn import ExpressionMatrix


def random_matrix(n, n_times, seed):
    rng = np.random.default_rng(seed)
    return ExpressionMatrix(rng.integers(0, 2, size=(n, n_times), dtype=np.uint8), seed)


def xor_matrix(n=8, n_times=64, seed=0, target=2, inputs=(0, 1)):
    """Target at t+1 is the XOR of two inputs at t; every other gene is a fair coin."""
    rng = np.random.default_rng(seed)
    while True:
        values = rng.integers(0, 2, size=(n, n_times), dtype=np.uint8)
        a, b = inputs
        values[target, 1:] = values[a, :-1] ^ values[b, :-1]
        patterns = set(zip(values[a, :-1].tolist(), values[b, :-1].tolist()))
        if len(patterns) == 4:
            return ExpressionMatrix(values, seed)


def balanced_xor_matrix(n=4, reps=16, seed=0, target=2, inputs=(0, 1)):
    """Every input pattern appears exactly ``reps`` times, in shuffled order."""
    rng = np.random.default_rng(seed)
    patterns = np.array([(0, 0), (0, 1), (1, 0), (1, 1)] * reps, dtype=np.uint8)
    patterns = patterns[rng.permutation(len(patterns))]
    n_times = len(patterns) + 1
    values = rng.integers(0, 2, size=(n, n_times), dtype=np.uint8)
    a, b = inputs
    values[a, :-1] = patterns[:, 0]
    values[b, :-1] = patterns[:, 1]
    values[target, 1:] = patterns[:, 0] ^ patterns[:, 1]
    return ExpressionMatrix(values, seed)


def copy_matrix(n=8, n_times=64, seed=0, target=0, source=3):
    """Target at t+1 copies ``source`` at t."""
    rng = np.random.default_rng(seed)
    values = rng.integers(0, 2, size=(n, n_times), dtype=np.uint8)
    values[target, 1:] = values[source, :-1]
    return ExpressionMatrix(values, seed)


@pytest.fixture
def xor_exps():
    return xor_matrix()


@pytest.fixture
def copy_exps():
    return copy_matrix()
