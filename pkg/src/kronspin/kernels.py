"""Select the compiled kernel module when available, else the pure-Python one.

Set ``KRONSPIN_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("KRONSPIN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        from . import _pykernels as _impl
else:
    from . import _pykernels as _impl

s_mul = _impl.s_mul
s_add = _impl.s_add
s_neg = _impl.s_neg
p_add = _impl.p_add
p_neg = _impl.p_neg
p_sub = _impl.p_sub
p_mul = _impl.p_mul
m_mul = _impl.m_mul
ZERO4 = (0, 0, 0, 0)

__all__ = [
    "BACKEND", "s_mul", "s_add", "s_neg", "p_add", "p_neg", "p_sub", "p_mul", "m_mul", "ZERO4",
]
