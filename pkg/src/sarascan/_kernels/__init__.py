"""Kernel backends: compiled fast path with a pure-Python fallback.

The two inner loops that dominate screening time (the running window
contrast and the windowed maximizer sweep) exist twice: a Cython extension
(``_core``) built by ``pip install .`` or ``python setup.py build_ext
--inplace``, and a NumPy reference (``_ref``).  The extension is preferred
when importable; set ``SARASCAN_BACKEND=python`` or ``=compiled`` to force a
choice.  Both produce the same results (the test suite compares them); only
speed differs.
"""

import os

from . import _ref

try:
    from . import _core
except ImportError:  # extension not built on this installation
    _core = None


def available_backends():
    """Mapping of backend name to implementing module."""
    out = {"python": _ref}
    if _core is not None:
        out["compiled"] = _core
    return out


def _select():
    forced = os.environ.get("SARASCAN_BACKEND", "").strip().lower()
    if forced:
        backends = available_backends()
        if forced not in backends:
            raise ImportError(
                f"SARASCAN_BACKEND={forced!r} not available here; "
                f"built backends: {sorted(backends)}"
            )
        return forced, backends[forced]
    if _core is not None:
        return "compiled", _core
    return "python", _ref


_active_name, _active = _select()


def backend_name():
    """Name of the backend behind the dispatch functions below."""
    return _active_name


def equal_weight_profile(y, h):
    return _active.equal_weight_profile(y, h)


def local_max_keep(absd, h):
    return _active.local_max_keep(absd, h)
