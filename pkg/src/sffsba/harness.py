"""Experiment sweeps: topology x <k> x signal size x run, every method per cell."""
import csv
import hashlib
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import metrics, netgen, pgn
from .search import METHODS, SearchConfig, infer_network

log = logging.getLogger(__name__)

CSV_COLUMNS = ("topology", "n", "avg_k", "signal_size", "method", "seed",
               "tp", "fp", "fn", "ppv", "sensitivity", "similarity")
DEFAULT_SIGNAL_SIZES = (5, 10, 15, 20, 40, 60, 80, 100)


@dataclass
class ExperimentConfig:
    topologies: list = field(default_factory=lambda: list(netgen.TOPOLOGIES))
    n: int = 100
    avg_k_values: list = field(default_factory=lambda: [1, 2, 3, 4, 5])
    signal_sizes: list = field(default_factory=lambda: list(DEFAULT_SIGNAL_SIZES))
    methods: list = field(default_factory=lambda: list(METHODS))
    runs: int = 50
    base_seed: int = 0
    gamma: float = 2.5
    delta: float = 0.05
    alpha: float = 1.0
    optimum_epsilon: float = 0.01
    max_cardinality: int = 5
    ws_rewire_p: float = 0.1
    source_uniform: bool = True
    selection_probs: list = field(default_factory=lambda: list(pgn.DEFAULT_PROBS))

    def __post_init__(self):
        for name in ("topologies", "avg_k_values", "signal_sizes", "methods", "selection_probs"):
            value = getattr(self, name)
            if isinstance(value, (str, int, float)):
                value = [value]
            value = list(value)
            if not value:
                raise ValueError(f"{name} must be non-empty")
            setattr(self, name, value)
        bad = set(self.topologies) - set(netgen.TOPOLOGIES)
        if bad:
            raise ValueError(f"unknown topologies: {sorted(bad)}")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods: {sorted(bad)}")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if any(t < 2 for t in self.signal_sizes):
            raise ValueError("signal sizes must be at least 2")
        if not 0.0 <= self.ws_rewire_p <= 1.0:
            raise ValueError("ws_rewire_p must lie in [0, 1]")
        self.search_config()

    def search_config(self):
        return SearchConfig(self.gamma, self.delta, self.optimum_epsilon,
                            self.max_cardinality, self.alpha)

    @classmethod
    def from_mapping(cls, mapping):
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**mapping)

    def to_mapping(self):
        return asdict(self)

    def n_rows(self):
        return (len(self.topologies) * len(self.avg_k_values) * len(self.signal_sizes)
                * len(self.methods) * self.runs)


def load_config(path):
    import yaml
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    return ExperimentConfig.from_mapping(data)


def _fmt_k(avg_k):
    return repr(float(avg_k)) if float(avg_k) != int(avg_k) else str(int(avg_k))


def cell_seed(base_seed, topology, avg_k, signal_size, run):
    """Stable 63-bit seed of one grid cell; independent of the rest of the grid."""
    key = f"{int(base_seed)}|{topology}|{_fmt_k(avg_k)}|{int(signal_size)}|{int(run)}"
    digest = hashlib.blake2b(key.encode("ascii"), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def build_cell(config, topology, avg_k, signal_size, seed):
    """Ground-truth network and expression matrix for one cell."""
    net_seed, model_seed, sim_seed = (int(s) for s in np.random.SeedSequence(seed).generate_state(3))
    net = netgen.generate(topology, config.n, avg_k, net_seed, rewire_p=config.ws_rewire_p)
    c1, c2, c3 = config.selection_probs
    model = pgn.build_transition_model(net, c1, c2, c3, model_seed, config.source_uniform)
    return net, pgn.simulate(model, int(signal_size), sim_seed)


def run_cell(config, topology, avg_k, signal_size, run):
    """Rows for every method on one cell; all methods see the same matrix."""
    seed = cell_seed(config.base_seed, topology, avg_k, signal_size, run)
    net, exps = build_cell(config, topology, avg_k, signal_size, seed)
    checksum = exps.checksum()
    log.debug("cell %s k=%s T=%s run=%s seed=%s matrix=%s",
              topology, avg_k, signal_size, run, seed, checksum[:16])
    rows = []
    search_cfg = config.search_config()
    for method in config.methods:
        report = metrics.score(net, infer_network(exps, method, search_cfg))
        rows.append({
            "topology": topology, "n": config.n, "avg_k": _fmt_k(avg_k),
            "signal_size": int(signal_size), "method": method, "seed": seed,
            "tp": report.tp, "fp": report.fp, "fn": report.fn,
            "ppv": report.ppv, "sensitivity": report.sensitivity,
            "similarity": report.similarity, "run": run, "checksum": checksum,
        })
    return rows


def _cells(config):
    for topology in config.topologies:
        for avg_k in config.avg_k_values:
            for signal_size in config.signal_sizes:
                for run in range(config.runs):
                    yield topology, avg_k, signal_size, run


def _run_cell_args(args):
    return run_cell(*args)


def run_experiment(config, jobs=1, progress=None):
    """All rows of the sweep, in grid order (topology, avg_k, signal, run, method)."""
    cells = list(_cells(config))
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_cell_args, [(config, *c) for c in cells], chunksize=4))
    else:
        chunks = []
        for i, cell in enumerate(cells):
            chunks.append(run_cell(config, *cell))
            if progress:
                progress(i + 1, len(cells))
    return [row for chunk in chunks for row in chunk]


def _csv_value(key, value):
    if key in ("ppv", "sensitivity", "similarity"):
        return f"{value:.6f}"
    return str(value)


def format_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_csv_value(c, row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(rows))


def read_csv(path):
    with open(path, newline="") as fh:
        return parse_csv(fh.read())


def parse_csv(text):
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        row = dict(raw)
        for key in ("n", "signal_size", "seed", "tp", "fp", "fn"):
            row[key] = int(row[key])
        for key in ("ppv", "sensitivity", "similarity"):
            row[key] = float(row[key])
        rows.append(row)
    return rows


# --------------------------------------------------------------------------
# figure tables


def _k_value(row):
    return float(row["avg_k"])


def _group(rows, keyfunc):
    groups = {}
    for row in rows:
        groups.setdefault(keyfunc(row), []).append(row)
    return groups


def _rank(order, value):
    return order.index(value) if value in order else len(order)


def _sort_key(key):
    topology, method, x = key
    return _rank(list(netgen.TOPOLOGIES), topology), _rank(list(METHODS), method), x


def run_means(rows, topology, method, signal_size):
    """Per-run similarity averaged over ``avg_k`` for one (topology, method, signal)."""
    sel = [r for r in rows if r["topology"] == topology and r["method"] == method
           and int(r["signal_size"]) == int(signal_size)]
    by_k = _group(sel, _k_value)
    if not by_k:
        return []
    series = [np.array([r["similarity"] for r in by_k[k]]) for k in sorted(by_k)]
    length = min(len(s) for s in series)
    return list(np.mean([s[:length] for s in series], axis=0))


def aggregate_figures(rows):
    """Plot-ready tables for the signal-size, boxplot and degree figures."""
    if not rows:
        raise ValueError("cannot aggregate an empty result table")
    fig3, fig4, fig5 = [], [], []
    by_signal = _group(rows, lambda r: (r["topology"], r["method"], int(r["signal_size"])))
    for key in sorted(by_signal, key=_sort_key):
        topology, method, signal_size = key
        sims = [r["similarity"] for r in by_signal[key]]
        fig3.append({"topology": topology, "method": method, "signal_size": signal_size,
                     "mean_similarity": float(np.mean(sims)), "count": len(sims)})
        stats = metrics.aggregate(run_means(rows, topology, method, signal_size))
        fig4.append({"topology": topology, "method": method, "signal_size": signal_size, **stats})

    by_k = _group(rows, lambda r: (r["topology"], r["method"], _k_value(r)))
    for key in sorted(by_k, key=_sort_key):
        topology, method, avg_k = key
        sims = [r["similarity"] for r in by_k[key]]
        fig5.append({"topology": topology, "method": method, "avg_k": _fmt_k(avg_k),
                     "mean_similarity": float(np.mean(sims)), "count": len(sims)})
    return {"fig3": fig3, "fig4": fig4, "fig5": fig5}


def format_table(table):
    if not table:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = list(table[0])
    writer.writerow(cols)
    for row in table:
        writer.writerow([f"{v:.6f}" if isinstance(v, float) else v for v in (row[c] for c in cols)])
    return buf.getvalue()
