"""Kernel selection: compiled extension if available, pure Python otherwise.

Set ESCAPELAB_FORCE_FALLBACK=1 to ignore the compiled module (used by the
benchmark and the differential tests).  Both implementations consume
identical caller-supplied draw blocks and produce bitwise-identical paths.
"""

import os

from . import fallback

HAVE_COMPILED = False
if not os.environ.get("ESCAPELAB_FORCE_FALLBACK"):
    try:
        from . import _core as _impl

        HAVE_COMPILED = True
    except ImportError:
        _impl = fallback
else:
    _impl = fallback

sde_em_segment = _impl.sde_em_segment
bd_gillespie_segment = _impl.bd_gillespie_segment
feller_em_segment = _impl.feller_em_segment

__all__ = [
    "HAVE_COMPILED",
    "fallback",
    "sde_em_segment",
    "bd_gillespie_segment",
    "feller_em_segment",
]
