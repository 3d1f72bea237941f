"""Kernel backend selection.

The compiled backend is preferred when its extension module imported cleanly;
the pure-Python reference backend is the fallback.  Set CLOSURELAB_KERNEL to
``python`` or ``compiled`` to force a choice (the latter raises if the
extension is unavailable).
"""

import os

from . import _reference

_forced = os.environ.get("CLOSURELAB_KERNEL", "").strip().lower()

if _forced == "python":
    impl = _reference
elif _forced == "compiled":
    from . import _fast as impl
elif _forced:
    raise ValueError(
        f"CLOSURELAB_KERNEL={_forced!r}: expected 'python' or 'compiled'"
    )
else:
    try:
        from . import _fast as impl
    except ImportError:
        impl = _reference

BACKEND = impl.BACKEND

OK = impl.OK
DEAD_END = impl.DEAD_END
TIE = impl.TIE
BAD_ANNULUS = impl.BAD_ANNULUS

wrap_2pi = impl.wrap_2pi
wrap_pi = impl.wrap_pi
annulus_ok = impl.annulus_ok
inscribed_rho = impl.inscribed_rho
inscribed_center = impl.inscribed_center
chord_points = impl.chord_points
tangent_circles_to_chord = impl.tangent_circles_to_chord
steiner_pair = impl.steiner_pair
step_element = impl.step_element
seed_element = impl.seed_element
chain_run = impl.chain_run
chain_defect = impl.chain_defect


def get_backend(name=None):
    """Return a kernel module by name ('python', 'compiled', or None for the
    active one)."""
    if name is None:
        return impl
    if name == "python":
        return _reference
    if name == "compiled":
        from . import _fast

        return _fast
    raise ValueError(f"unknown kernel backend {name!r}")
