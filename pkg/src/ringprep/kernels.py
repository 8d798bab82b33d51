"""Kernel dispatch: compiled SU(2) core when built, NumPy fallback otherwise.

Set RINGPREP_FORCE_PURE=1 to skip the compiled extension (used by the
kernel benchmark and the fallback tests).
"""

import os

from . import _su2pure

su2_exp_batch = _su2pure.su2_exp_batch

if os.environ.get("RINGPREP_FORCE_PURE"):
    BACKEND = "pure"
    su2_chain = _su2pure.su2_chain
    su2_chain_batch = _su2pure.su2_chain_batch
else:
    try:
        from . import _su2core

        BACKEND = "compiled"

        def su2_chain(hx, hy, hz):
            import numpy as np

            return _su2core.su2_chain(
                np.asarray(hx, float), np.asarray(hy, float), np.asarray(hz, float)
            )

        def su2_chain_batch(hx, hy, hz):
            import numpy as np

            return _su2core.su2_chain_batch(
                np.asarray(hx, float), np.asarray(hy, float), np.asarray(hz, float)
            )

    except ImportError:
        BACKEND = "pure"
        su2_chain = _su2pure.su2_chain
        su2_chain_batch = _su2pure.su2_chain_batch
