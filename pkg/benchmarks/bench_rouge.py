"""Compare the numba and numpy ROUGE kernels.

    python3 benchmarks/bench_rouge.py [--pairs 200] [--length 400] [--repeat 3]

Kernels are called directly on encoded int64 arrays, so the timings exclude
tokenization. Both paths are checked for identical results first.
"""

import argparse
import time

import numpy as np

from structsum.evaluation import _kernels as k


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--length", type=int, default=400, help="tokens per sequence (summaries run ~20-600)")
    ap.add_argument("--vocab", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    pairs = [
        (rng.integers(0, args.vocab, args.length, dtype=np.int64), rng.integers(0, args.vocab, args.length, dtype=np.int64))
        for _ in range(args.pairs)
    ]

    kernels = {
        "lcs": (k.lcs_length_numpy, k.lcs_length_numba, lambda f, a, b: f(a, b)),
        "overlap": (k.clipped_overlap_numpy, k.clipped_overlap_numba, lambda f, a, b: f(a, b, args.vocab)),
    }
    print(f"{args.pairs} pairs x {args.length} tokens, best of {args.repeat}")
    print(f"{'kernel':<10}{'numpy s':>12}{'numba s':>12}{'speedup':>10}")
    for name, (np_fn, nb_fn, call) in kernels.items():
        if nb_fn is None:
            print(f"{name:<10}{best_of(lambda: [call(np_fn, a, b) for a, b in pairs], args.repeat):>12.4f}{'n/a':>12}")
            continue
        for a, b in pairs[:20]:
            assert int(call(np_fn, a, b)) == int(call(nb_fn, a, b))
        call(nb_fn, *pairs[0])  # compile outside the timed region
        t_np = best_of(lambda: [call(np_fn, a, b) for a, b in pairs], args.repeat)
        t_nb = best_of(lambda: [call(nb_fn, a, b) for a, b in pairs], args.repeat)
        print(f"{name:<10}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
