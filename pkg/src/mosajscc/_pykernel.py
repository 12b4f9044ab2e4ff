"""Numpy implementation of the batched slope-matching decoder.

Reference path and fallback for ``_ckernel``; both must return identical
arrays for identical inputs.
"""

import numpy as np


def decode_batch(gain, lam, ids1, ids2, vds_min, vds_max, tol, correct):
    gain = np.asarray(gain, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    ids1 = np.asarray(ids1, dtype=np.float64)
    ids2 = np.asarray(ids2, dtype=np.float64)
    n = ids1.shape[0]

    slope = lam * gain
    est = lam[None, :] * (ids1 + ids2)[:, None] / 2.0
    mismatch = np.abs(slope[None, :] - est)
    # stable sort: equal mismatches keep candidate order, lower level first
    order = np.argsort(mismatch, axis=1, kind="stable")

    rank = np.zeros(n, dtype=np.int64)
    passed = np.zeros(n, dtype=np.uint8)
    if correct:
        g = gain[order]
        lm = lam[order]
        v1 = (ids1[:, None] / g - 1.0) / lm
        v2 = (ids2[:, None] / g - 1.0) / lm
        lo, hi = vds_min - tol, vds_max + tol
        ok = (v1 >= lo) & (v1 <= hi) & (v2 >= lo) & (v2 <= hi)
        any_ok = ok.any(axis=1)
        rank = np.where(any_ok, ok.argmax(axis=1), 0).astype(np.int64)
        passed = any_ok.astype(np.uint8)

    choice = order[np.arange(n), rank].astype(np.int64)
    gc = gain[choice]
    lc = lam[choice]
    vds1 = (ids1 / gc - 1.0) / lc
    vds2 = (ids2 / gc - 1.0) / lc
    return choice, rank, vds1, vds2, passed
