"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5] [--n 100] [--T 100]

Kernel timings are taken in-process (both variants are always importable);
the end-to-end line runs one SFFS-BA inference in a fresh interpreter per
backend, selected with SFFSBA_DISABLE_NUMBA.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from sffsba import kernels
from sffsba.netgen import generate_ba
from sffsba.pgn import _draw_choices, build_transition_model, simulate

E2E = """
import time
from sffsba import backend
from sffsba.netgen import generate_ba
from sffsba.pgn import build_transition_model, simulate
from sffsba.search import infer_network
net = generate_ba({n}, 2, 0)
exps = simulate(build_transition_model(net, seed=1), {T}, 2)
infer_network(exps)  # warm-up / compile
t = time.perf_counter()
infer_network(exps)
print(backend(), time.perf_counter() - t)
"""


def best_of(fn, repeat):
    fn()  # compile
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--T", type=int, default=100)
    args = ap.parse_args()

    net = generate_ba(args.n, 2, 0)
    model = build_transition_model(net, seed=1)
    exps = simulate(model, args.T, 2)
    lagged = np.ascontiguousarray(exps.values[:, :-1])
    y = np.ascontiguousarray(exps.values[0, 1:])
    cands = np.arange(1, args.n, dtype=np.int64)
    ids, m = kernels.subset_ids(lagged, np.array([3, 7], dtype=np.int64))
    pool = cands[:40]

    flat, ptr, tables, hashed, keys = model._packed()
    rng = np.random.default_rng(3)
    state0 = rng.integers(0, 2, size=args.n, dtype=np.uint8)
    choice, coins = _draw_choices(model, rng, (args.T - 1, args.n))
    source = model.source_uniform

    cases = {
        "extension_scores": (lambda: kernels.extension_scores_nb(ids, m, 4, lagged, cands, y, 1.0),
                             lambda: kernels.extension_scores_np(ids, m, 4, lagged, cands, y, 1.0)),
        "pair_scores(40)": (lambda: kernels.pair_scores_nb(lagged, pool, y, 1.0),
                            lambda: kernels.pair_scores_np(lagged, pool, y, 1.0)),
        "simulate": (lambda: kernels.simulate_nb(state0, flat, ptr, tables, hashed, keys,
                                                 choice, coins, source),
                     lambda: kernels.simulate_np(state0, flat, ptr, tables, hashed, keys,
                                                 choice, coins, source)),
    }
    print(f"{'kernel':<20}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, (nb, np_) in cases.items():
        a, b = best_of(nb, args.repeat), best_of(np_, args.repeat)
        print(f"{name:<20}{a:>12.5f}{b:>12.5f}{b / a:>10.1f}")

    code = E2E.format(n=args.n, T=args.T)
    for flag in ("0", "1"):
        env = dict(os.environ, SFFSBA_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, check=True,
                             capture_output=True, text=True).stdout.split()
        print(f"infer_network [{out[0]}]: {float(out[1]):.3f} s")


if __name__ == "__main__":
    main()
