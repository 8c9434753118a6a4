"""Kernel backend selection.

The hot kernels (set-feasibility checks, per-receiver cancellation search,
and the branch-and-bound loop) exist twice: a Cython extension
(``_core_cy``) and a pure-Python twin (``_core_py``). The compiled one is
used when importable; set ``LINKACT_PURE=1`` to force the fallback.
``benchmarks/bench_cores.py`` compares the two.
"""

import os

if os.environ.get("LINKACT_PURE") == "1":
    from . import _core_py as impl

    BACKEND = "python"
else:
    try:
        from . import _core_cy as impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _core_py as impl

        BACKEND = "python"

REL_TOL = impl.REL_TOL
SCHEME_SUD = impl.SCHEME_SUD
SCHEME_SLIC = impl.SCHEME_SLIC
SCHEME_PIC = impl.SCHEME_PIC
SCHEME_SIC = impl.SCHEME_SIC

prepare = impl.prepare
feasible = impl.feasible
pic_cancels = impl.pic_cancels
sic_cancels = impl.sic_cancels
sic_receiver = impl.sic_receiver
pair_conflicts = impl.pair_conflicts
solve = impl.solve
