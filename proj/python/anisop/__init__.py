"""Singular anisotropic p-Laplacian solver and threshold experiments."""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
    from ._core import __doc__ as _core_doc  # noqa: F401
except ImportError:  # build-tree layout: _core on sys.path
    from _core import *  # noqa: F401,F403

__version__ = "0.1.0"
