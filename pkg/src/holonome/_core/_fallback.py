"""Pure-numpy backend: vectorized shifted-diagonal master-equation kernels."""

import numpy as np


def apply_rhs(rho, out, local, h_off, h_w, s_off, s_fac):
    """out <- RHS(rho).  All arrays complex128; rho and out distinct."""
    n = rho.shape[0]
    np.multiply(local, rho, out=out)
    for k in range(len(h_off)):
        off = int(h_off[k])
        w = h_w[k]
        lo = max(0, -off)
        hi = n - max(0, off)
        if lo >= hi:
            continue
        # i * (rho T - T rho) for the shift term T[c+off, c] = w[c]
        out[lo + off : hi + off, :] -= (1j * w[lo:hi])[:, None] * rho[lo:hi, :]
        out[:, lo:hi] += rho[:, lo + off : hi + off] * (1j * w[lo:hi])[None, :]
    for k in range(len(s_off)):
        off = int(s_off[k])
        lo = max(0, -off)
        hi = n - max(0, off)
        if lo >= hi:
            continue
        # rate * A rho A^dag with the anticommutator half already in `local`
        out[lo + off : hi + off, lo + off : hi + off] += (
            s_fac[k, lo:hi, lo:hi] * rho[lo:hi, lo:hi]
        )
    return out


def rk4_propagate(rho, dt, nsteps, local, h_off, h_w, s_off, s_fac):
    """Advance rho in place by nsteps fixed RK4 steps of size dt."""
    k1 = np.empty_like(rho)
    k2 = np.empty_like(rho)
    k3 = np.empty_like(rho)
    k4 = np.empty_like(rho)
    tmp = np.empty_like(rho)
    args = (local, h_off, h_w, s_off, s_fac)
    for _ in range(int(nsteps)):
        apply_rhs(rho, k1, *args)
        np.multiply(k1, 0.5 * dt, out=tmp)
        tmp += rho
        apply_rhs(tmp, k2, *args)
        np.multiply(k2, 0.5 * dt, out=tmp)
        tmp += rho
        apply_rhs(tmp, k3, *args)
        np.multiply(k3, dt, out=tmp)
        tmp += rho
        apply_rhs(tmp, k4, *args)
        k2 += k3
        k1 += k4
        k2 *= 2.0
        k1 += k2
        k1 *= dt / 6.0
        rho += k1
    return rho
