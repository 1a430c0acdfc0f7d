"""Probabilistic Genetic Network model and simulator.

Each gene carries three random truth tables over its predictors.  At every
step a gene independently picks table ``j`` with probability ``c_j`` and
evaluates it on the previous state of its predictors.  Predictor bits are
packed most-significant first in predecessor-list order.
"""
import hashlib
from dataclasses import dataclass

import numpy as np

from .kernels import hashed_bits_np, simulate_kernel
from .netgen import DirectedGeneNetwork

DEFAULT_PROBS = (0.98, 0.01, 0.01)
# genes with more predictors than this get hashed tables instead of stored ones
MAX_TABLE_BITS = 16


class HashedTables:
    """Three uniformly random truth tables over ``d`` inputs, never materialized.

    Entry ``(f, code)`` is one bit of a splitmix64 hash of ``keys[f]`` and
    ``code``, so each table behaves as an independent uniform draw from all
    Boolean functions of ``d`` inputs.
    """

    def __init__(self, d, keys):
        self.d = int(d)
        self.keys = np.asarray(keys, dtype=np.uint64)

    @property
    def shape(self):
        return (3, 2 ** self.d)

    def __getitem__(self, index):
        f, code = index
        return int(hashed_bits_np(self.keys[f], code))

    def __array__(self, dtype=None, copy=None):
        raise TypeError("hashed tables are too large to materialize")


@dataclass
class TransitionModel:
    network: DirectedGeneNetwork
    functions: list          # per gene: uint8 array of shape (3, 2**d)
    selection_probs: tuple
    source_uniform: bool = True

    def __post_init__(self):
        self.selection_probs = _check_probs(self.selection_probs)
        for i, tables in enumerate(self.functions):
            d = len(self.network.predecessors[i])
            if tables.shape != (3, 2 ** d):
                raise ValueError(f"gene {i}: expected tables of shape (3, {2 ** d})")

    @property
    def n(self):
        return self.network.n

    def _packed(self):
        preds = self.network.predecessors
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(p) for p in preds])
        flat = np.array([j for p in preds for j in p], dtype=np.int64)
        hashed = np.array([isinstance(t, HashedTables) for t in self.functions], dtype=bool)
        stored = [t.shape[1] for t in self.functions if not isinstance(t, HashedTables)]
        width = max(stored, default=1)
        tables = np.zeros((self.n, 3, width), dtype=np.uint8)
        keys = np.zeros((self.n, 3), dtype=np.uint64)
        for i, t in enumerate(self.functions):
            if hashed[i]:
                keys[i] = t.keys
            else:
                tables[i, :, : t.shape[1]] = t
        return flat, ptr, tables, hashed, keys


@dataclass
class ExpressionMatrix:
    values: np.ndarray       # uint8, genes x time
    seed: int = 0

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.uint8)
        if self.values.ndim != 2:
            raise ValueError("expression matrix must be 2-D")
        if np.any(self.values > 1):
            raise ValueError("expression values must be 0 or 1")

    @property
    def n_genes(self):
        return self.values.shape[0]

    @property
    def n_times(self):
        return self.values.shape[1]

    def checksum(self):
        return hashlib.sha256(self.values.tobytes() + bytes(str(self.values.shape), "ascii")).hexdigest()


def _check_probs(probs):
    probs = tuple(float(c) for c in probs)
    if len(probs) != 3:
        raise ValueError("exactly three selection probabilities are required")
    if any(not c > 0 for c in probs):
        raise ValueError("every selection probability must be positive")
    if abs(sum(probs) - 1.0) > 1e-12:
        raise ValueError("selection probabilities must sum to 1")
    return probs


def build_transition_model(net, c1=0.98, c2=0.01, c3=0.01, seed=0, source_uniform=True):
    probs = _check_probs((c1, c2, c3))
    rng = np.random.default_rng(seed)
    functions = []
    for preds in net.predecessors:
        d = len(preds)
        if d > MAX_TABLE_BITS:
            keys = rng.integers(0, 2 ** 63, size=3, dtype=np.uint64)
            functions.append(HashedTables(d, keys))
        else:
            functions.append(rng.integers(0, 2, size=(3, 2 ** d), dtype=np.uint8))
    return TransitionModel(net, functions, probs, source_uniform)


def _draw_choices(model, rng, size):
    cum = np.cumsum(model.selection_probs)
    u = rng.random(size)
    choice = np.searchsorted(cum[:-1], u, side="right").astype(np.int64)
    coins = rng.integers(0, 2, size=size, dtype=np.uint8)
    return choice, coins


def step(model, state, rng):
    """One synchronous transition from ``state``; ``rng`` is a numpy Generator."""
    state = np.asarray(state, dtype=np.uint8)
    if state.shape != (model.n,):
        raise ValueError("state length does not match the model")
    choice, coins = _draw_choices(model, rng, (1, model.n))
    return simulate_kernel(state, *model._packed(), choice, coins, model.source_uniform)[:, 1]


def simulate(model, n_times, seed):
    if n_times < 2:
        raise ValueError("n_times must be at least 2")
    rng = np.random.default_rng(seed)
    state0 = rng.integers(0, 2, size=model.n, dtype=np.uint8)
    choice, coins = _draw_choices(model, rng, (n_times - 1, model.n))
    values = simulate_kernel(state0, *model._packed(), choice, coins, model.source_uniform)
    return ExpressionMatrix(values, seed)


# --------------------------------------------------------------------------
# expression-matrix text format


def format_matrix(exps):
    lines = [f"# n={exps.n_genes} T={exps.n_times} seed={exps.seed}"]
    lines.extend("\t".join(map(str, row)) for row in exps.values.tolist())
    return "\n".join(lines) + "\n"


def parse_matrix(text):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing matrix header")
    header = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    n, n_times = int(header["n"]), int(header["T"])
    rows = [list(map(int, line.split("\t"))) for line in lines[1:] if line.strip()]
    values = np.array(rows, dtype=np.uint8).reshape(n, n_times)
    return ExpressionMatrix(values, int(header.get("seed", 0)))


def write_matrix(exps, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(format_matrix(exps))


def read_matrix(path):
    with open(path) as fh:
        return parse_matrix(fh.read())
