"""Sequential search engines: SFS, SBS, SFFS and the SFFS-BA scheduler.

All engines minimize the mean conditional entropy of one target gene.  Sets
are returned as sorted tuples of gene indices.  Ties are broken by the lowest
gene index, then by lexicographic set order.
"""
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .criterion import DEFAULT_ALPHA

METHODS = ("SFS", "SFFS", "SFFS-BA")


@dataclass
class SearchConfig:
    gamma: float = 2.5
    delta: float = 0.05
    optimum_epsilon: float = 0.01
    max_cardinality: int = 5
    alpha: float = DEFAULT_ALPHA
    rounding: str = "floor"

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.delta < 0 or self.optimum_epsilon < 0:
            raise ValueError("delta and optimum_epsilon must be non-negative")
        if self.max_cardinality is not None and self.max_cardinality < 1:
            raise ValueError("max_cardinality must be at least 1")
        if self.rounding not in ("floor", "round"):
            raise ValueError("rounding must be 'floor' or 'round'")


@dataclass
class InferenceState:
    target: int
    psets: list = field(default_factory=list)
    cfv: float = 1.0
    gain: float = 0.0
    rounds_active: int = 0


@dataclass
class InferredNetwork:
    n: int
    predictors: dict            # target -> tuple of predictor indices
    values: dict                # target -> criterion value
    rounds_active: dict = field(default_factory=dict)
    schedule: list = field(default_factory=list)
    method: str = "SFFS-BA"

    def edge_set(self):
        return {(j, t) for t, preds in self.predictors.items() for j in preds}

    def to_network(self, seed=0):
        from .netgen import DirectedGeneNetwork
        preds = [list(self.predictors.get(i, ())) for i in range(self.n)]
        return DirectedGeneNetwork(self.n, preds, self.method, seed)


class TargetEvaluator:
    """Criterion evaluations for one target over one expression matrix.

    ``exclude_self`` removes the target from the candidate pool.  Whole-set
    values are memoized; batched one-feature extensions go straight to the
    kernel.
    """

    def __init__(self, exps, target, alpha=DEFAULT_ALPHA, exclude_self=True):
        values = exps.values
        self.n = values.shape[0]
        self.target = int(target)
        self.alpha = float(alpha)
        self.lagged = np.ascontiguousarray(values[:, :-1])
        self.y = np.ascontiguousarray(values[target, 1:])
        pool = np.arange(self.n, dtype=np.int64)
        if exclude_self:
            pool = pool[pool != self.target]
        self.pool = pool
        self._cache = {}
        self._empty_ids = np.zeros(self.y.shape[0], dtype=np.int64)
        self._pairs = None
        self._pool_pos = None

    def _ids(self, subset):
        if not subset:
            return self._empty_ids, 1
        return kernels.subset_ids(self.lagged, subset)

    def value(self, subset):
        key = tuple(sorted(subset))
        v = self._cache.get(key)
        if v is None:
            ids, m = self._ids(key)
            v = kernels.score_ids(ids, m, 2.0 ** len(key), self.y, self.alpha)
            self._cache[key] = v
        return v

    def candidates(self, subset):
        if not subset:
            return self.pool
        keep = np.ones(self.n, dtype=bool)
        keep[list(subset)] = False
        return self.pool[keep[self.pool]]

    def pair_table(self):
        """Lazily computed pair scores over ``pool`` (row/column = pool position)."""
        if self._pairs is None:
            self._pairs = kernels.pair_scores(self.lagged, self.pool, self.y, self.alpha)
            self._pool_pos = {int(j): i for i, j in enumerate(self.pool)}
        return self._pairs

    def _pool_pos_map(self):
        self.pair_table()
        return self._pool_pos

    def best_partner(self, feature):
        """Best pair containing ``feature``: ``(partner, value)``."""
        table = self.pair_table()
        row = table[self._pool_pos[feature]]
        if row.shape[0] < 2:
            return None, math.inf
        best = int(np.argmin(row))
        return int(self.pool[best]), float(row[best])

    def best_extension(self, subset):
        """Best single feature to add: ``(feature, value)`` or ``(None, inf)``."""
        cands = self.candidates(subset)
        if cands.shape[0] == 0:
            return None, math.inf
        ids, m = self._ids(tuple(sorted(subset)))
        scores = kernels.extension_scores(ids, m, 2.0 ** (len(subset) + 1),
                                          self.lagged, cands, self.y, self.alpha)
        best = int(np.argmin(scores))
        return int(cands[best]), float(scores[best])


def _evaluator(exps, target, alpha, evaluator):
    if evaluator is not None:
        return evaluator
    return TargetEvaluator(exps, target, alpha)


def _sorted(subset):
    return tuple(sorted(int(j) for j in subset))


def sfs(exps, target, base_set=(), target_size=1, alpha=DEFAULT_ALPHA, evaluator=None):
    """Greedy forward selection from ``base_set`` up to ``target_size`` features."""
    base = _sorted(base_set)
    if len(base) > target_size:
        raise ValueError("base_set is larger than target_size")
    n = exps.n_genes if evaluator is None else evaluator.n
    if target_size > n:
        raise ValueError("target_size exceeds the number of genes")
    ev = _evaluator(exps, target, alpha, evaluator)
    current = list(base)
    value = ev.value(current)
    while len(current) < target_size:
        feature, v = ev.best_extension(current)
        if feature is None:
            break
        current.append(feature)
        value = v
    current = _sorted(current)
    ev._cache.setdefault(current, value)
    return current, value


def sbs(exps, target, subset, alpha=DEFAULT_ALPHA, evaluator=None):
    """Backward elimination while a removal does not worsen the criterion."""
    current = _sorted(subset)
    if not current:
        raise ValueError("sbs needs a non-empty set")
    ev = _evaluator(exps, target, alpha, evaluator)
    value = ev.value(current)
    while len(current) > 1:
        trial = [(ev.value(current[:i] + current[i + 1:]), current[i]) for i in range(len(current))]
        best_v, drop = min(trial)
        if best_v > value:
            break
        current = tuple(j for j in current if j != drop)
        value = best_v
    return current, value


def sffs(exps, target, max_size=1, alpha=DEFAULT_ALPHA, evaluator=None):
    """Sequential floating forward selection.

    Keeps the best set found at every cardinality; after each inclusion,
    conditionally excludes features while that beats the stored best of the
    smaller cardinality (only for sets larger than two).  Returns the global
    best, preferring the smallest cardinality on ties.
    """
    n = exps.n_genes if evaluator is None else evaluator.n
    if not 1 <= max_size <= n:
        raise ValueError("max_size must lie in [1, n]")
    ev = _evaluator(exps, target, alpha, evaluator)
    limit = min(max_size, ev.pool.shape[0])
    best = {}
    current = ()
    while len(current) < limit:
        feature, v = ev.best_extension(current)
        if feature is None:
            break
        current = _sorted(current + (feature,))
        k = len(current)
        if k in best and best[k][0] <= v:
            v, current = best[k]
        else:
            best[k] = (v, current)
        while len(current) > 2:
            trial = [(ev.value(current[:i] + current[i + 1:]), current[i]) for i in range(len(current))]
            v_drop, drop = min(trial)
            smaller = len(current) - 1
            if smaller in best and v_drop >= best[smaller][0]:
                break
            current = tuple(j for j in current if j != drop)
            best[smaller] = (v_drop, current)
    if not best:
        return (), ev.value(())
    value, subset = min((v, k, s) for k, (v, s) in best.items())[0::2]
    return subset, value


def sffs_ba_inner(target, cfv, psets, k, exps, delta=0.05, alpha=DEFAULT_ALPHA,
                  evaluator=None, exclude_self=True):
    """One SFFS-BA expansion of ``target`` at cardinality ``k``.

    Returns ``(psets, best_cfv, gain)``.  For ``k == 1`` every singleton is
    returned, ranked by criterion value, ``best_cfv`` being the best of them.
    For larger ``k`` only the best accepted set is kept; an expansion is
    accepted when it beats the running best by more than ``delta``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    ev = evaluator if evaluator is not None else TargetEvaluator(exps, target, alpha, exclude_self)
    queue = deque(_sorted(p) for p in psets)
    if not queue:
        queue.extend((int(j),) for j in ev.pool)
    best_cfv = cfv
    best_set = None
    singles = []
    budget = len(queue)
    while queue and budget > 0 and len(queue[0]) <= k:
        pset = queue.popleft()
        budget -= 1
        if k == 2 and len(pset) == 1 and pset[0] in ev._pool_pos_map():
            partner, newcfv = ev.best_partner(pset[0])
            newset = pset if partner is None else _sorted(pset + (partner,))
            if partner is None:
                newcfv = ev.value(pset)
        else:
            newset, newcfv = sfs(exps, target, pset, max(k, len(pset)), alpha, evaluator=ev)
        if newcfv < best_cfv and (best_cfv - newcfv) > delta:
            newset, newcfv = sbs(exps, target, newset, alpha, evaluator=ev)
            best_cfv, best_set = newcfv, newset
        if len(pset) == 1:
            singles.append((ev.value(pset), pset))
    if k == 1:
        singles.sort()
        ranked = [p for _, p in singles]
        if singles:
            best_cfv = min(best_cfv, singles[0][0])
        return ranked, best_cfv, cfv - best_cfv
    if best_set is None:
        if psets:
            keep = _sorted(psets[0])
        else:
            keep = min(singles)[1] if singles else ()
        return [keep], cfv, 0.0
    return [best_set], best_cfv, cfv - best_cfv


def _next_count(n, k, gamma, rounding):
    raw = n * k ** (-gamma)
    return int(math.floor(raw)) if rounding == "floor" else int(round(raw))


def network_inference(targets, exps, gamma=2.5, delta=0.05, alpha=DEFAULT_ALPHA,
                      optimum_epsilon=0.01, max_cardinality=5, rounding="floor",
                      source_rule=True):
    """Iterative SFFS-BA over ``targets`` with a power-law pruning schedule.

    Round ``k`` expands the active targets to cardinality ``k``; targets are
    then ranked by gain, and only the top ``floor(n * k**-gamma)`` non-frozen
    ones stay active.  A target is frozen once its criterion value is at most
    ``optimum_epsilon``.  ``schedule`` records how many targets each round
    processed.
    """
    cfg = SearchConfig(gamma, delta, optimum_epsilon, max_cardinality, alpha, rounding)
    targets = [int(t) for t in targets]
    if not targets:
        raise ValueError("targets must be non-empty")
    states = {t: InferenceState(t) for t in targets}
    evaluators = {t: TargetEvaluator(exps, t, alpha) for t in targets}
    order = list(targets)
    n = len(targets)
    k = 1
    schedule = []
    while n > 1 and (cfg.max_cardinality is None or k <= cfg.max_cardinality):
        active = [t for t in order if states[t].cfv > cfg.optimum_epsilon][:n]
        if not active:
            break
        for t in active:
            st = states[t]
            st.psets, st.cfv, st.gain = sffs_ba_inner(
                t, st.cfv, st.psets, k, exps, delta, alpha, evaluator=evaluators[t])
            st.rounds_active += 1
        schedule.append(len(active))
        order = sorted(active, key=lambda t: (-states[t].gain, t))
        n = _next_count(len(active), k, cfg.gamma, cfg.rounding)
        k += 1

    predictors, values = {}, {}
    for t in targets:
        st = states[t]
        chosen = st.psets[0] if st.psets else ()
        value = st.cfv if st.psets else evaluators[t].value(())
        if source_rule and len(chosen) <= 1:
            empty = evaluators[t].value(())
            if not chosen or empty - evaluators[t].value(chosen) <= delta:
                chosen, value = (), empty
        predictors[t] = tuple(chosen)
        values[t] = float(value)
    return InferredNetwork(exps.n_genes, predictors, values,
                           {t: states[t].rounds_active for t in targets}, schedule, "SFFS-BA")


def _baseline(exps, targets, method, alpha, max_cardinality):
    predictors, values = {}, {}
    for t in targets:
        ev = TargetEvaluator(exps, t, alpha)
        limit = min(max_cardinality, ev.pool.shape[0])
        if method == "SFS":
            current, value = (), ev.value(())
            while len(current) < limit:
                feature, v = ev.best_extension(current)
                if feature is None or v >= value:
                    break
                current, value = _sorted(current + (feature,)), v
        else:
            current, value = sffs(exps, t, limit, alpha, evaluator=ev)
        predictors[t] = current
        values[t] = float(value)
    return InferredNetwork(exps.n_genes, predictors, values, {t: 1 for t in targets}, [], method)


def infer_network(exps, method="SFFS-BA", config=None, targets=None):
    """Run one of :data:`METHODS` over every target (or ``targets``)."""
    cfg = config or SearchConfig()
    targets = list(range(exps.n_genes)) if targets is None else list(targets)
    if method == "SFFS-BA":
        return network_inference(targets, exps, cfg.gamma, cfg.delta, cfg.alpha,
                                 cfg.optimum_epsilon, cfg.max_cardinality, cfg.rounding)
    if method in ("SFS", "SFFS"):
        return _baseline(exps, targets, method, cfg.alpha, cfg.max_cardinality or exps.n_genes)
    raise ValueError(f"unknown method {method!r}")
