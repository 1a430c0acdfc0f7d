"""Directed ground-truth topologies (ER, BA, WS) and degree statistics.

``avg_k`` is treated as the target mean in-degree by every generator, so a
BA network attaches ``round(avg_k)`` links per arriving node and a WS lattice
links every node to its ``round(avg_k)`` clockwise neighbours.  Undirected
BA/WS links are oriented by a fair coin.
"""
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

TOPOLOGIES = ("ER", "BA", "WS")


@dataclass
class DirectedGeneNetwork:
    n: int
    predecessors: list
    topology_tag: str = "ER"
    seed: int = 0

    def __post_init__(self):
        self.predecessors = [list(map(int, p)) for p in self.predecessors]
        if len(self.predecessors) != self.n:
            raise ValueError("predecessor lists must cover every gene")

    @property
    def n_edges(self):
        return sum(len(p) for p in self.predecessors)

    def edges(self):
        """Directed ``(predictor, target)`` pairs, target-major order."""
        return [(j, i) for i, preds in enumerate(self.predecessors) for j in preds]

    def edge_set(self):
        return set(self.edges())

    def validate(self):
        for i, preds in enumerate(self.predecessors):
            if i in preds:
                raise ValueError(f"self-loop at gene {i}")
            if len(set(preds)) != len(preds):
                raise ValueError(f"duplicate predictor for gene {i}")
            if any(j < 0 or j >= self.n for j in preds):
                raise ValueError(f"predictor index out of range for gene {i}")
        return self


@dataclass
class DegreeHistogram:
    in_degrees: dict = field(default_factory=dict)
    out_degrees: dict = field(default_factory=dict)
    mean_in_degree: float = 0.0


def _check_common(n, avg_k, lower):
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n}")
    if not (avg_k >= lower and avg_k > 0 and avg_k <= n - 1):
        raise ValueError(f"avg_k must lie in [{lower}, n-1] and be positive, got {avg_k}")


def _from_undirected(n, links, rng, tag, seed):
    links = sorted(links)
    flips = rng.random(len(links)) < 0.5
    preds = [[] for _ in range(n)]
    for (u, v), flip in zip(links, flips):
        src, dst = (v, u) if flip else (u, v)
        preds[dst].append(src)
    for p in preds:
        p.sort()
    return DirectedGeneNetwork(n, preds, tag, seed)


def generate_er(n, avg_k, seed):
    """Each ordered pair ``j -> i`` (``j != i``) is an edge with probability ``avg_k/(n-1)``."""
    _check_common(n, avg_k, 0.0)
    rng = np.random.default_rng(seed)
    p = avg_k / (n - 1)
    adj = rng.random((n, n)) < p
    np.fill_diagonal(adj, False)
    preds = [np.flatnonzero(adj[i]).tolist() for i in range(n)]
    return DirectedGeneNetwork(n, preds, "ER", seed)


def generate_ba(n, avg_k, seed):
    """Barabási-Albert growth with ``m = round(avg_k)`` links per arriving node.

    Growth starts from a star on the first ``m + 1`` nodes; each later node
    picks ``m`` distinct existing nodes with probability proportional to their
    current degree.
    """
    _check_common(n, avg_k, 1.0)
    m = max(1, int(round(avg_k)))
    m = min(m, n - 1)
    rng = np.random.default_rng(seed)
    links = set()
    ends = []
    for v in range(m):
        links.add((v, m))
        ends.extend((v, m))
    for new in range(m + 1, n):
        chosen = set()
        while len(chosen) < m:
            chosen.add(ends[rng.integers(len(ends))])
        for v in sorted(chosen):
            links.add((v, new))
            ends.extend((v, new))
    return _from_undirected(n, links, rng, "BA", seed)


def generate_ws(n, avg_k, rewire_p, seed):
    """Ring lattice plus random rewiring.

    Every node links to its ``round(avg_k)`` clockwise neighbours (lattice
    degree ``2*round(avg_k)``).  With probability ``rewire_p`` a lattice link is
    replaced by a uniformly random non-duplicate pair, so ``rewire_p=1`` yields
    a uniform random graph with the same edge count.
    """
    _check_common(n, avg_k, 1.0)
    if not 0.0 <= rewire_p <= 1.0:
        raise ValueError(f"rewire_p must lie in [0, 1], got {rewire_p}")
    k = max(1, int(round(avg_k)))
    rng = np.random.default_rng(seed)
    links = set()
    for step in range(1, k + 1):
        for u in range(n):
            v = (u + step) % n
            if u != v:
                links.add((min(u, v), max(u, v)))
    max_links = n * (n - 1) // 2
    lattice = sorted(links)
    draws = rng.random(len(lattice))
    for link, r in zip(lattice, draws):
        if r >= rewire_p or len(links) >= max_links:
            continue
        links.discard(link)
        while True:
            u, v = rng.integers(n, size=2)
            if u == v:
                continue
            cand = (int(min(u, v)), int(max(u, v)))
            if cand not in links:
                links.add(cand)
                break
    return _from_undirected(n, links, rng, "WS", seed)


def generate(topology, n, avg_k, seed, rewire_p=0.1):
    if topology == "ER":
        return generate_er(n, avg_k, seed)
    if topology == "BA":
        return generate_ba(n, avg_k, seed)
    if topology == "WS":
        return generate_ws(n, avg_k, rewire_p, seed)
    raise ValueError(f"unknown topology {topology!r}")


def degree_histogram(net):
    in_deg = [len(p) for p in net.predecessors]
    out_deg = [0] * net.n
    for preds in net.predecessors:
        for j in preds:
            out_deg[j] += 1
    return DegreeHistogram(
        in_degrees=dict(sorted(Counter(in_deg).items())),
        out_degrees=dict(sorted(Counter(out_deg).items())),
        mean_in_degree=net.n_edges / net.n,
    )


def total_degrees(net):
    deg = np.array([len(p) for p in net.predecessors])
    for preds in net.predecessors:
        for j in preds:
            deg[j] += 1
    return deg


# --------------------------------------------------------------------------
# edge-list text format


def format_edge_list(net):
    lines = [f"# n={net.n} topology={net.topology_tag} seed={net.seed}"]
    lines.extend(f"{j}\t{i}" for j, i in net.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing edge-list header")
    header = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    n = int(header["n"])
    preds = [[] for _ in range(n)]
    for line in lines[1:]:
        if not line.strip():
            continue
        j, i = line.split("\t")
        preds[int(i)].append(int(j))
    return DirectedGeneNetwork(n, preds, header.get("topology", "ER"), int(header.get("seed", 0)))


def write_edge_list(net, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(format_edge_list(net))


def read_edge_list(path):
    with open(path) as fh:
        return parse_edge_list(fh.read())
