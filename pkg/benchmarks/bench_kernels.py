"""Time the compiled text/vote kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py --texts 20000 --repeat 5
"""

import argparse
import logging
import random
import timeit

import numpy as np

from aradhati import _kernels_py
from aradhati.synth import learning_fixture

log = logging.getLogger("bench")

try:
    from aradhati import _kernels
except ImportError:  # extension not built
    _kernels = None


def cases(n_texts, n_votes, seed):
    texts = [t for t, _ in learning_fixture(n_texts, seed=seed)]
    rng = np.random.default_rng(seed)
    votes = rng.integers(0, 2, size=(n_votes, 3)).astype(np.int8)
    pred = rng.integers(0, 2, size=n_votes).astype(np.int8)
    truth = rng.integers(0, 2, size=n_votes).astype(np.int8)
    return {
        "clean_text": lambda k: [k.clean_text(t) for t in texts],
        "normalize_text": lambda k: [k.normalize_text(t) for t in texts],
        "majority_vote": lambda k: k.majority_vote(votes),
        "confusion_counts": lambda k: k.confusion_counts(pred, truth),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--texts", type=int, default=20000)
    ap.add_argument("--votes", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    random.seed(args.seed)

    backends = {"python": _kernels_py}
    if _kernels is None:
        log.warning("compiled kernels not importable; timing the fallback only")
    else:
        backends["cython"] = _kernels

    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases(args.texts, args.votes, args.seed).items():
        best = {}
        for b, mod in backends.items():
            best[b] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = f"{name:<18}" + "".join(f"{best[b] * 1e3:>10.1f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{best['python'] / best['cython']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
