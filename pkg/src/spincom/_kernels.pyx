# cython: language_level=3
"""Compiled per-frequency kernels (see ``_kernels_py`` for the reference numpy version)."""
import numpy as np

cimport cython

ctypedef double complex cplx


cdef inline double _abs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _inverse(const double[:, ::1] drift, double omega, cplx inv[4][4]) noexcept nogil:
    """Invert -i*omega*I - drift by Gauss-Jordan elimination with partial pivoting."""
    cdef cplx m[4][4]
    cdef cplx f, tmp
    cdef int i, j, k, p
    cdef double best, mag
    for i in range(4):
        for j in range(4):
            m[i][j] = -drift[i, j]
            inv[i][j] = 0.0
        m[i][i] = m[i][i] - 1j * omega
        inv[i][i] = 1.0
    for k in range(4):
        p = k
        best = _abs2(m[k][k])
        for i in range(k + 1, 4):
            mag = _abs2(m[i][k])
            if mag > best:
                best = mag
                p = i
        if best == 0.0:
            return 1
        if p != k:
            for j in range(4):
                tmp = m[k][j]; m[k][j] = m[p][j]; m[p][j] = tmp
                tmp = inv[k][j]; inv[k][j] = inv[p][j]; inv[p][j] = tmp
        f = 1.0 / m[k][k]
        for j in range(4):
            m[k][j] = m[k][j] * f
            inv[k][j] = inv[k][j] * f
        for i in range(4):
            if i != k:
                f = m[i][k]
                if f != 0:
                    for j in range(4):
                        m[i][j] = m[i][j] - f * m[k][j]
                        inv[i][j] = inv[i][j] - f * inv[k][j]
    return 0


@cython.boundscheck(False)
@cython.wraparound(False)
def output_batch(const double[:, ::1] drift, const double[::1] omegas,
                 const double[:, ::1] output, const double[:, ::1] feedthrough,
                 const double[:, ::1] noise_input, const double[::1] noise,
                 const double[::1] signal):
    """Symmetrized output quadrature spectra and signal transfer per frequency.

    Returns ``(spec, transfer, bad)`` where ``spec[:, :] = (s_qq, s_pp,
    re s_qp, im s_qp)``, ``transfer[:, :] = (t_q, t_p)`` and ``bad`` is the
    index of the first singular frequency or -1.
    """
    cdef Py_ssize_t n = omegas.shape[0]
    cdef Py_ssize_t m = noise_input.shape[1]
    spec_arr = np.empty((n, 4), dtype=np.float64)
    trans_arr = np.empty((n, 2), dtype=np.complex128)
    cdef double[:, ::1] spec = spec_arr
    cdef cplx[:, ::1] trans = trans_arr
    cdef cplx inv[4][4]
    cdef cplx gain[2][4]
    cdef cplx tr[2][16]
    cdef cplx acc, sqp
    cdef double sqq, spp
    cdef Py_ssize_t w, a, i, j, k
    cdef Py_ssize_t bad = -1
    if m > 16:
        raise ValueError("at most 16 noise inputs supported")
    with nogil:
        for w in range(n):
            if _inverse(drift, omegas[w], inv) != 0:
                bad = w
                break
            for a in range(2):
                for j in range(4):
                    acc = 0.0
                    for i in range(4):
                        acc = acc + output[a, i] * inv[i][j]
                    gain[a][j] = acc
                for k in range(m):
                    acc = feedthrough[a, k]
                    for j in range(4):
                        acc = acc + gain[a][j] * noise_input[j, k]
                    tr[a][k] = acc
                acc = 0.0
                for j in range(4):
                    acc = acc + gain[a][j] * signal[j]
                trans[w, a] = acc
            sqq = 0.0
            spp = 0.0
            sqp = 0.0
            for k in range(m):
                sqq = sqq + noise[k] * _abs2(tr[0][k])
                spp = spp + noise[k] * _abs2(tr[1][k])
                sqp = sqp + noise[k] * tr[0][k] * tr[1][k].conjugate()
            spec[w, 0] = sqq
            spec[w, 1] = spp
            spec[w, 2] = sqp.real
            spec[w, 3] = sqp.imag
    return spec_arr, trans_arr, bad


@cython.boundscheck(False)
@cython.wraparound(False)
def cavity_batch(const double[:, ::1] drift, const double[:, ::1] diffusion,
                 const double[::1] omegas):
    """Diagonal of chi D chi^dagger per frequency; returns ``(diag, bad)``."""
    cdef Py_ssize_t n = omegas.shape[0]
    out_arr = np.empty((n, 4), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef cplx inv[4][4]
    cdef cplx acc
    cdef Py_ssize_t w, i, j, k
    cdef Py_ssize_t bad = -1
    with nogil:
        for w in range(n):
            if _inverse(drift, omegas[w], inv) != 0:
                bad = w
                break
            for i in range(4):
                acc = 0.0
                for j in range(4):
                    for k in range(4):
                        if diffusion[j, k] != 0.0:
                            acc = acc + inv[i][j] * diffusion[j, k] * inv[i][k].conjugate()
                out[w, i] = acc.real
    return out_arr, bad
