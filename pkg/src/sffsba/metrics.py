"""Edge-level similarity between a ground-truth and an inferred network."""
import math
from dataclasses import dataclass

import numpy as np


@dataclass
class SimilarityReport:
    tp: int
    fp: int
    fn: int
    ppv: float
    sensitivity: float
    similarity: float


def _edges(net):
    return net.edge_set()


def score(truth, inferred):
    """Compare directed ``predictor -> target`` edges.

    Empty denominators: with nothing inferred PPV is 1 only if the truth is
    empty too; with nothing to recover sensitivity is 1.
    """
    if truth.n != inferred.n:
        raise ValueError(f"gene counts differ: {truth.n} vs {inferred.n}")
    true_edges = _edges(truth)
    found = _edges(inferred)
    tp = len(true_edges & found)
    fp = len(found - true_edges)
    fn = len(true_edges - found)
    if tp + fp:
        ppv = tp / (tp + fp)
    else:
        ppv = 1.0 if not true_edges else 0.0
    sensitivity = tp / (tp + fn) if tp + fn else 1.0
    return SimilarityReport(tp, fp, fn, ppv, sensitivity, math.sqrt(ppv * sensitivity))


def aggregate(reports):
    """Summary statistics of the similarity values (linear-interpolation quartiles)."""
    if not reports:
        raise ValueError("cannot aggregate an empty list of reports")
    sims = np.array([r.similarity if isinstance(r, SimilarityReport) else float(r) for r in reports])
    q1, median, q3 = np.percentile(sims, [25, 50, 75], method="linear")
    return {
        "count": int(sims.size),
        "mean": float(sims.mean()),
        "std": float(sims.std()),
        "min": float(sims.min()),
        "q1": float(q1),
        "median": float(median),
        "q3": float(q3),
        "max": float(sims.max()),
    }
