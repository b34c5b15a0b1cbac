#!/usr/bin/env python3
"""Compare the compiled kernel backend against the pure-numpy fallback.

Times rdm_batch and compound_matrix on a few representative sector sizes
and prints the best-of-N wall time per backend plus the speedup of the
compiled extension.  Runs whatever backends are importable, so it still
works (as a single-column report) when the extension is not built.
"""

import argparse
import time

import numpy as np

from nrep.fock import random_amplitudes, random_unitary
from nrep.kernels import available_backends, dets_array, transition_table


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def print_row(label: str, names, times) -> None:
    cells = "".join(f"{times[name] * 1e3:>12.3f}" for name in names)
    if "pure" in times and "cython" in times:
        cells += f"{times['pure'] / times['cython']:>10.1f}x"
    print(f"{label:<28}{cells}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--batch", type=int, default=2000, help="states per rdm_batch call"
    )
    parser.add_argument(
        "--repeat", type=int, default=5, help="timed repetitions, best kept"
    )
    args = parser.parse_args(argv)

    backends = available_backends()
    names = sorted(backends)
    if len(names) < 2:
        print(f"only the {names[0]} backend is importable")

    header = "".join(f"{name + ' (ms)':>12}" for name in names)
    if len(names) == 2:
        header += f"{'speedup':>11}"
    print(f"{'problem':<28}{header}")

    for n, r in ((3, 6), (3, 7), (4, 8), (4, 10)):
        amps = np.ascontiguousarray(random_amplitudes(n, r, args.batch, seed=7))
        t = transition_table(n, r)
        targs = (t.src, t.dst, t.sign, t.flat, t.group_starts, t.group_flat, r)
        times = {
            name: best_of(lambda m=mod: m.rdm_batch(amps, *targs), args.repeat)
            for name, mod in backends.items()
        }
        print_row(f"rdm_batch ({n},{r}) x{args.batch}", names, times)

    for n, r in ((3, 7), (4, 9), (5, 10)):
        u = np.ascontiguousarray(random_unitary(r, seed=8).matrix)
        dets = dets_array(n, r)
        times = {
            name: best_of(lambda m=mod: m.compound_matrix(u, dets), args.repeat)
            for name, mod in backends.items()
        }
        print_row(f"compound_matrix ({n},{r})", names, times)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
