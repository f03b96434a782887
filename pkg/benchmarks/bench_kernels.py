"""Compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both routes must agree; the script exits non-zero if they do not.
"""
import argparse
import sys
import timeit
from array import array

from corrcalc._kernels_select import COMPILED, kernels, py_kernels
from corrcalc.fincat import enumerate_functors
from corrcalc.fixtures import arrow, chain3, finsets, p2


def laws_args(C):
    ptr, idx = C.csr_in()
    return (C.n_mor, array('i', C.src), array('i', C.tgt), array('i', C.ids), C.dense(), ptr, idx)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args(argv)
    print(f"compiled kernels available: {COMPILED}")
    rows, ok = [], True

    for C in (p2(), finsets(2), finsets(3)):
        args = laws_args(C)
        ok &= kernels.check_laws(*args) == py_kernels.check_laws(*args)
        rows.append((f"check_laws {C.name} ({C.n_mor} maps)",
                     best(lambda: kernels.check_laws(*args), a.repeat),
                     best(lambda: py_kernels.check_laws(*args), a.repeat)))

    for C, D in ((p2(), p2()), (chain3(), finsets(2)), (arrow(), finsets(3))):
        fast = enumerate_functors(C, D)
        slow = enumerate_functors(C, D, use_py=True)
        ok &= fast == slow
        rows.append((f"enumerate_functors {C.name} -> {D.name} ({len(fast)})",
                     best(lambda: enumerate_functors(C, D), a.repeat),
                     best(lambda: enumerate_functors(C, D, use_py=True), a.repeat)))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'compiled':>10}  {'python':>10}  speedup")
    for name, t_c, t_p in rows:
        print(f"{name:<{width}}  {t_c * 1e3:>8.2f}ms  {t_p * 1e3:>8.2f}ms  {t_p / t_c:>6.1f}x")
    print("routes agree" if ok else "ROUTES DISAGREE")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
