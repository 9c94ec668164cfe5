"""Hot numerical kernels with a compiled core and a pure-Python fallback.

Both backends expose the same two functions:

``apply_rhs(rho, out, local, h_off, h_w, s_off, s_fac)``
    One evaluation of the master-equation right-hand side.
``rk4_propagate(rho, dt, nsteps, local, h_off, h_w, s_off, s_fac)``
    Fixed-step classical RK4, advancing rho in place.

The problem is encoded in shifted-diagonal form (see
holonome.lindblad for the assembly): excitation-conserving ladder
monomials touch a single generalized diagonal each, so one RHS costs
O(n^2) instead of the O(n^3) of dense matrix products.

Set HOLONOME_PURE_PYTHON=1 to force the fallback even when the compiled
extension is importable.
"""

import os

if os.environ.get("HOLONOME_PURE_PYTHON") == "1":
    from . import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _fallback as _impl

        BACKEND = "python"

apply_rhs = _impl.apply_rhs
rk4_propagate = _impl.rk4_propagate

__all__ = ["apply_rhs", "rk4_propagate", "BACKEND"]
