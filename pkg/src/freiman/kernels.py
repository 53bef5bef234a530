"""Backend selection for the enumeration kernels.

The compiled extension is used when it was built; set ``FREIMAN_PURE_PYTHON=1``
to force the pure-Python fallback.
"""

import os

from freiman import _pykernels

if os.environ.get("FREIMAN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from freiman import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
scan_separable = _impl.scan_separable
moment_tally = _impl.moment_tally


def backends():
    """Return every importable backend module, pure Python first."""
    found = [_pykernels]
    try:
        from freiman import _ckernels
    except ImportError:
        pass
    else:
        found.append(_ckernels)
    return found
