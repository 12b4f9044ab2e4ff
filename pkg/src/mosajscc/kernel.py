"""Selects the compiled decode kernel when available, else the numpy one.

Set ``MOSAJSCC_KERNEL=python`` to force the numpy path.
"""

import os

from . import _pykernel

decode_batch_py = _pykernel.decode_batch

try:
    from ._ckernel import decode_batch as decode_batch_c
except ImportError:
    decode_batch_c = None

if decode_batch_c is not None and os.environ.get("MOSAJSCC_KERNEL", "").lower() != "python":
    decode_batch = decode_batch_c
    BACKEND = "cython"
else:
    decode_batch = decode_batch_py
    BACKEND = "python"
