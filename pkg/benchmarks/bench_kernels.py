"""Time the compiled and pure-Python polynomial kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import random
import timeit
from fractions import Fraction

from orbicheck import _pykernel

try:
    from orbicheck import _ckernel
except ImportError:
    _ckernel = None


def dense(rng, arity, deg):
    """All monomials of total degree <= deg with small rational coefficients."""
    out = {}

    def walk(prefix, left):
        if len(prefix) == arity:
            out[tuple(prefix)] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 3))
            return
        for k in range(left + 1):
            walk(prefix + [k], left - k)

    walk([], deg)
    return out


def workloads(rng):
    f, g = dense(rng, 3, 6), dense(rng, 3, 5)
    fg = _pykernel.mul_terms(f, g)
    p = dense(rng, 3, 2)
    return {
        "mul_terms 3 vars deg 6 x deg 5": lambda k: k.mul_terms(f, g),
        "divmod_terms exact quotient": lambda k: k.divmod_terms(fg, g),
        "divmod_terms with remainder": lambda k: k.divmod_terms(f, p),
        "add_terms": lambda k: k.add_terms(f, g, -1),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _pykernel)] + ([("cython", _ckernel)] if _ckernel else [])
    print(f"{'workload':34} " + " ".join(f"{name:>12}" for name, _ in backends) + "   speedup")
    for label, fn in workloads(random.Random(0)).items():
        times = [min(timeit.repeat(lambda k=k: fn(k), number=1, repeat=args.repeat)) for _, k in backends]
        row = f"{label:34} " + " ".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"   {times[0] / times[1]:.2f}x"
        print(row)


if __name__ == "__main__":
    main()
