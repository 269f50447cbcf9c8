"""Kernel backend selection.

The compiled extension is used when it imports; setting ``QSRLAB_PURE_PYTHON=1``
forces the numpy fallback. Both modules expose ``rank_packed``, ``rank_counts``,
``gamma_counts`` and ``jacobi_eigvalsh`` with identical results.
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("QSRLAB_PURE_PYTHON"):
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback

BACKEND = _impl.BACKEND
rank_packed = _impl.rank_packed
rank_counts = _impl.rank_counts
gamma_counts = _impl.gamma_counts
jacobi_eigvalsh = _impl.jacobi_eigvalsh


def available_backends():
    """Every importable kernel module, compiled first."""
    mods = []
    try:
        from . import _kernels

        mods.append(_kernels)
    except ImportError:
        pass
    mods.append(_fallback)
    return mods
