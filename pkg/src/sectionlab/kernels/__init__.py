"""Kernel backend selection.

The compiled extension is preferred when importable; the pure NumPy backend
is the fallback. Set SECTIONLAB_KERNELS=pure (or =native) to force a choice;
forcing ``native`` when the extension is missing raises ImportError rather
than silently degrading.
"""

import os

from . import _pure

_choice = os.environ.get("SECTIONLAB_KERNELS", "").strip().lower()

if _choice == "pure":
    _impl = _pure
elif _choice == "native":
    from . import _native as _impl
else:
    try:
        from . import _native as _impl
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
ray_triangle_hits = _impl.ray_triangle_hits
split_triangles_by_plane = _impl.split_triangles_by_plane


def backend_name() -> str:
    return BACKEND
