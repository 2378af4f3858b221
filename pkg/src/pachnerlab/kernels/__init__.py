"""Per-tetrahedron metric kernels with a compiled core and a pure fallback.

The compiled extension (``pachnerlab.kernels._ckernels``) is used when it
imported successfully; set ``PACHNERLAB_PURE=1`` before import to force the
pure-Python implementation.  Both backends expose the same functions with
identical semantics; ``BACKEND`` records which one is active.
"""

import os

from . import _pykernels

if os.environ.get("PACHNERLAB_PURE", "").lower() in ("1", "true", "yes"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

EDGE_ORDER = _impl.EDGE_ORDER
pair_index = _impl.pair_index
embed_tet = _impl.embed_tet
volume_signed = _impl.volume_signed
cm_determinant = _impl.cm_determinant
volume_from_lengths = _impl.volume_from_lengths
dihedral_at_edge = _impl.dihedral_at_edge
dihedral_all = _impl.dihedral_all


def available_backends():
    """Names of importable backends, compiled one first."""
    names = []
    try:
        from . import _ckernels  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names


def get_backend(name):
    """Return the backend module for 'cython' or 'python'."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
