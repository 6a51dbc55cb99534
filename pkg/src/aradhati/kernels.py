"""Kernel selection: compiled extension if importable, pure Python otherwise.

Set ``ARADHATI_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("ARADHATI_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

clean_text = _impl.clean_text
normalize_text = _impl.normalize_text
majority_vote = _impl.majority_vote
confusion_counts = _impl.confusion_counts
