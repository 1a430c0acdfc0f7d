"""Mean conditional entropy criterion and IMP scores.

Entropies are in bits, which for a binary target already lies in [0, 1].
Predictor patterns never seen in the samples are penalized: each contributes
pseudo-mass ``alpha`` with maximal entropy, so the value is::

    (sum_x n_x H(Y | X=x) + alpha * U) / (N + alpha * U)

where ``U`` counts the unobserved patterns among all ``2**d``.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels

DEFAULT_ALPHA = 1.0


@dataclass
class SamplePairs:
    predictor_patterns: np.ndarray   # (count, d) uint8
    target_values: np.ndarray        # (count,) uint8

    def __post_init__(self):
        self.predictor_patterns = np.asarray(self.predictor_patterns, dtype=np.uint8)
        self.target_values = np.asarray(self.target_values, dtype=np.uint8).ravel()
        if self.predictor_patterns.ndim == 1:
            self.predictor_patterns = self.predictor_patterns.reshape(-1, 1)
        if self.predictor_patterns.shape[0] != self.target_values.shape[0]:
            raise ValueError("pattern and target lists differ in length")

    @property
    def count(self):
        return self.target_values.shape[0]

    @property
    def arity(self):
        return self.predictor_patterns.shape[1]


def extract_pairs(exps, target, candidates):
    """Pairs (candidate values at t, target value at t+1) for t in [0, T-2]."""
    cand = list(candidates)
    values = exps.values
    patterns = values[cand, :-1].T if cand else np.zeros((values.shape[1] - 1, 0), np.uint8)
    return SamplePairs(patterns, values[target, 1:])


def pattern_codes(patterns):
    """Pack each row of bits into an integer, first column most significant."""
    patterns = np.asarray(patterns, dtype=np.int64)
    codes = np.zeros(patterns.shape[0], dtype=np.int64)
    for col in range(patterns.shape[1]):
        codes = 2 * codes + patterns[:, col]
    return codes


def mean_conditional_entropy(pairs, alpha=DEFAULT_ALPHA):
    if pairs.count < 1:
        raise ValueError("at least one sample pair is required")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    ids, m = kernels.compact_ids(pattern_codes(pairs.predictor_patterns))
    return kernels.score_ids(ids, m, 2.0 ** pairs.arity, pairs.target_values, alpha)


def criterion_value(exps, target, candidates, alpha=DEFAULT_ALPHA):
    return mean_conditional_entropy(extract_pairs(exps, target, candidates), alpha)


def prediction_quality(exps, target, candidates, alpha=DEFAULT_ALPHA):
    """``1 - H``: 0 means no prediction, 1 full prediction."""
    return 1.0 - criterion_value(exps, target, candidates, alpha)


def _subset_qualities(exps, target, candidate_set, alpha):
    cand = sorted(set(candidate_set))
    if len(cand) < 2:
        raise ValueError("IMP needs a candidate set of at least two genes")
    full = prediction_quality(exps, target, cand, alpha)
    best_sub = max(
        prediction_quality(exps, target, sub, alpha)
        for r in range(len(cand))
        for sub in combinations(cand, r)
    )
    return full, best_sub


def imp_score(exps, target, candidate_set, alpha=DEFAULT_ALPHA):
    """Quality of the full set minus the best quality over its proper subsets."""
    full, best_sub = _subset_qualities(exps, target, candidate_set, alpha)
    return full - best_sub


def is_imp(full_quality, best_subset_quality, lam=0.2, delta=0.8):
    if not 0.0 <= lam < delta <= 1.0:
        raise ValueError("require 0 <= lambda < delta <= 1")
    return best_subset_quality <= lam and full_quality >= delta


def is_imp_set(exps, target, candidate_set, lam=0.2, delta=0.8, alpha=DEFAULT_ALPHA):
    full, best_sub = _subset_qualities(exps, target, candidate_set, alpha)
    return is_imp(full, best_sub, lam, delta)
