# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend: shifted-diagonal master-equation kernels.

Semantics match holonome._core._fallback exactly; see that module and the
package docstring for the encoding.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx

cdef double complex I_POS = 1j
cdef double complex I_NEG = -1j


cdef void _rhs(const cplx[:, ::1] rho, cplx[:, ::1] out,
               const cplx[:, ::1] local,
               const cnp.int64_t[::1] h_off, const cplx[:, ::1] h_w,
               const cnp.int64_t[::1] s_off, const cplx[:, :, ::1] s_fac) noexcept nogil:
    cdef Py_ssize_t n = rho.shape[0]
    cdef Py_ssize_t i, j, c, k, r
    cdef Py_ssize_t off, lo, hi
    cdef cplx coef

    for i in range(n):
        for j in range(n):
            out[i, j] = local[i, j] * rho[i, j]

    for k in range(h_off.shape[0]):
        off = h_off[k]
        lo = -off if off < 0 else 0
        hi = n - off if off > 0 else n
        # T rho contribution: out[c+off, :] -= i w[c] rho[c, :]
        for c in range(lo, hi):
            coef = I_NEG * h_w[k, c]
            if coef.real != 0.0 or coef.imag != 0.0:
                r = c + off
                for j in range(n):
                    out[r, j] = out[r, j] + coef * rho[c, j]
        # rho T contribution: out[:, c] += i w[c] rho[:, c+off]
        for i in range(n):
            for c in range(lo, hi):
                out[i, c] = out[i, c] + I_POS * h_w[k, c] * rho[i, c + off]

    for k in range(s_off.shape[0]):
        off = s_off[k]
        lo = -off if off < 0 else 0
        hi = n - off if off > 0 else n
        # sandwich: out[c+off, j+off] += F[c, j] rho[c, j]
        for c in range(lo, hi):
            r = c + off
            for j in range(lo, hi):
                out[r, j + off] = out[r, j + off] + s_fac[k, c, j] * rho[c, j]


cdef void _stage(cplx[:, ::1] tmp, const cplx[:, ::1] rho,
                 const cplx[:, ::1] k, double a) noexcept nogil:
    cdef Py_ssize_t i, j, n = rho.shape[0]
    for i in range(n):
        for j in range(n):
            tmp[i, j] = rho[i, j] + a * k[i, j]


cdef void _finish(cplx[:, ::1] rho, const cplx[:, ::1] k1, const cplx[:, ::1] k2,
                  const cplx[:, ::1] k3, const cplx[:, ::1] k4, double w) noexcept nogil:
    cdef Py_ssize_t i, j, n = rho.shape[0]
    for i in range(n):
        for j in range(n):
            rho[i, j] = rho[i, j] + w * (k1[i, j] + 2.0 * (k2[i, j] + k3[i, j]) + k4[i, j])


def apply_rhs(rho, out, local, h_off, h_w, s_off, s_fac):
    """out <- RHS(rho).  All arrays complex128 C-contiguous; rho and out distinct."""
    _rhs(rho, out, local, h_off, h_w, s_off, s_fac)
    return out


def rk4_propagate(rho, double dt, Py_ssize_t nsteps, local, h_off, h_w, s_off, s_fac):
    """Advance rho in place by nsteps fixed RK4 steps of size dt."""
    k1 = np.empty_like(rho)
    k2 = np.empty_like(rho)
    k3 = np.empty_like(rho)
    k4 = np.empty_like(rho)
    tmp = np.empty_like(rho)

    cdef cplx[:, ::1] rho_v = rho
    cdef cplx[:, ::1] k1_v = k1
    cdef cplx[:, ::1] k2_v = k2
    cdef cplx[:, ::1] k3_v = k3
    cdef cplx[:, ::1] k4_v = k4
    cdef cplx[:, ::1] tmp_v = tmp
    cdef const cplx[:, ::1] local_v = local
    cdef const cnp.int64_t[::1] h_off_v = h_off
    cdef const cplx[:, ::1] h_w_v = h_w
    cdef const cnp.int64_t[::1] s_off_v = s_off
    cdef const cplx[:, :, ::1] s_fac_v = s_fac
    cdef Py_ssize_t step
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0

    with nogil:
        for step in range(nsteps):
            _rhs(rho_v, k1_v, local_v, h_off_v, h_w_v, s_off_v, s_fac_v)
            _stage(tmp_v, rho_v, k1_v, half)
            _rhs(tmp_v, k2_v, local_v, h_off_v, h_w_v, s_off_v, s_fac_v)
            _stage(tmp_v, rho_v, k2_v, half)
            _rhs(tmp_v, k3_v, local_v, h_off_v, h_w_v, s_off_v, s_fac_v)
            _stage(tmp_v, rho_v, k3_v, dt)
            _rhs(tmp_v, k4_v, local_v, h_off_v, h_w_v, s_off_v, s_fac_v)
            _finish(rho_v, k1_v, k2_v, k3_v, k4_v, sixth)
    return rho
