import os
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from orbicheck import _pykernel

try:
    from orbicheck import _ckernel
except ImportError:
    _ckernel = None


def random_terms(rng, arity=3, size=6, deg=4):
    out = {}
    for _ in range(size):
        e = tuple(rng.randint(0, deg) for _ in range(arity))
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        if c:
            out[e] = c
    return out


def test_pure_fallback_selected_by_environment():
    env = dict(os.environ, ORBICHECK_PURE="1")
    proc = subprocess.run([sys.executable, "-c", "from orbicheck import kernel; print(kernel.BACKEND)"],
                          capture_output=True, text=True, env=env, check=True)
    assert proc.stdout.strip() == "python"


@pytest.mark.skipif(_ckernel is None, reason="compiled kernel not built")
def test_backends_agree():
    rng = random.Random(1)
    for _ in range(200):
        a, b = random_terms(rng), random_terms(rng)
        assert _ckernel.mul_terms(a, b) == _pykernel.mul_terms(a, b)
        assert _ckernel.add_terms(a, b, -1) == _pykernel.add_terms(a, b, -1)
        assert _ckernel.scale_shift(a, Fraction(3, 2), (1, 0, 2)) == _pykernel.scale_shift(a, Fraction(3, 2), (1, 0, 2))
        if b:
            assert _ckernel.divmod_terms(a, b) == _pykernel.divmod_terms(a, b)
    assert _ckernel.BACKEND == "cython"
