import numpy as np
import pytest

from mosajscc import kernel
from mosajscc._pykernel import decode_batch as py_decode

needs_c = pytest.mark.skipif(kernel.decode_batch_c is None, reason="compiled kernel not built")


def _problem(seed, n_pairs=2000, n_cand=41):
    rng = np.random.default_rng(seed)
    levels = np.sort(rng.uniform(0.9, 6.0, n_cand))
    lam = rng.uniform(1e-3, 0.2, n_cand)
    gain = 0.5 * 155e-6 * (levels - 0.74) ** 2
    true = rng.integers(0, n_cand, n_pairs)
    vds = rng.uniform(4.5, 10.0, n_pairs)
    i1 = gain[true] * (1 + lam[true] * vds)
    i2 = gain[true] * (1 + lam[true] * (vds + 0.1))
    return gain, lam, i1, i2


def test_backend_selected():
    assert kernel.BACKEND in ("cython", "python")
    assert kernel.decode_batch is (kernel.decode_batch_c if kernel.BACKEND == "cython" else py_decode)


@needs_c
@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("correct", [False, True])
def test_backends_agree_bitwise(seed, correct):
    args = _problem(seed)
    a = py_decode(*args, 4.5, 10.0, 1e-9, correct)
    b = kernel.decode_batch_c(*args, 4.5, 10.0, 1e-9, correct)
    for x, y in zip(a, b):
        assert np.array_equal(np.asarray(x), np.asarray(y))


@pytest.mark.parametrize("impl", [py_decode, pytest.param("c", marks=needs_c)])
def test_ties_prefer_lower_candidate(impl):
    f = kernel.decode_batch_c if impl == "c" else impl
    gain = np.array([1e-4, 1e-4])
    lam = np.array([0.01, 0.01])
    choice, rank, *_ = f(gain, lam, np.array([1.1e-4]), np.array([1.2e-4]), 0.0, 100.0, 1e-9, True)
    assert choice[0] == 0 and rank[0] == 0


@pytest.mark.parametrize("impl", [py_decode, pytest.param("c", marks=needs_c)])
def test_fallback_rank_zero(impl):
    f = kernel.decode_batch_c if impl == "c" else impl
    gain = np.array([1e-4, 2e-4])
    lam = np.array([0.01, 0.01])
    choice, rank, v1, v2, passed = f(gain, lam, np.array([5e-4]), np.array([5.1e-4]), 4.5, 10.0, 1e-9, True)
    assert rank[0] == 0 and passed[0] == 0


def test_env_forces_python_backend():
    import os
    import subprocess
    import sys

    env = dict(os.environ, MOSAJSCC_KERNEL="python")
    r = subprocess.run(
        [sys.executable, "-c", "import mosajscc.kernel as k; print(k.BACKEND)"],
        capture_output=True, text=True, env=env,
    )
    assert r.stdout.strip() == "python"
