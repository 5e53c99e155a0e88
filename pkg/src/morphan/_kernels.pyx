# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled string kernels. Signatures mirror ``morphan._pykernels`` exactly."""
import numpy as np

cimport numpy as cnp
from libc.stdlib cimport calloc, free

cnp.import_array()


def shuffle_intersect(const int[::1] a, const int[::1] b, const int[::1] c, const int[::1] d):
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], nc = c.shape[0], nd = d.shape[0]
    if na + nd != nb + nc:
        return False
    cdef Py_ssize_t sj = nb + 1
    cdef Py_ssize_t si = (nd + 1) * sj
    cdef unsigned char *reach = <unsigned char *> calloc((na + 1) * si, 1)
    if reach == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j, k, l, t, klo, khi
    cdef int x
    cdef bint result
    reach[0] = 1
    for i in range(na + 1):
        for j in range(nd + 1):
            t = i + j
            klo = t - nc if t > nc else 0
            khi = t if t < nb else nb
            for k in range(klo, khi + 1):
                if not reach[i * si + j * sj + k]:
                    continue
                l = t - k
                if i < na:
                    x = a[i]
                    if k < nb and b[k] == x:
                        reach[(i + 1) * si + j * sj + k + 1] = 1
                    if l < nc and c[l] == x:
                        reach[(i + 1) * si + j * sj + k] = 1
                if j < nd:
                    x = d[j]
                    if k < nb and b[k] == x:
                        reach[i * si + (j + 1) * sj + k + 1] = 1
                    if l < nc and c[l] == x:
                        reach[i * si + (j + 1) * sj + k] = 1
    result = reach[na * si + nd * sj + nb] != 0
    free(reach)
    return result


def alea_trials(const int[::1] a, const int[::1] b, const int[::1] c, const double[:, ::1] u):
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], nc = c.shape[0]
    cdef Py_ssize_t n = nb + nc
    cdef Py_ssize_t rho = u.shape[0]
    cdef Py_ssize_t width = n - na if n >= na else 0
    out_arr = np.zeros((rho, width), dtype=np.int32)
    ok_arr = np.zeros(rho, dtype=np.uint8)
    if n < na:
        return out_arr, ok_arr
    if u.shape[1] < 2 * n:
        raise ValueError("need 2*(len(b)+len(c)) uniforms per trial")
    cdef int[:, ::1] out = out_arr
    cdef unsigned char[::1] ok = ok_arr
    cdef int[::1] s = np.empty(n, dtype=np.int32)
    cdef double[:, ::1] cnt = np.empty((n + 1, na + 1), dtype=np.float64)
    cdef Py_ssize_t r, t, ib, ic, rb, rc, i, j, w
    for r in range(rho):
        ib = 0
        ic = 0
        for t in range(n):
            rb = nb - ib
            rc = nc - ic
            if rc == 0 or (rb > 0 and u[r, t] * (rb + rc) < rb):
                s[t] = b[ib]
                ib += 1
            else:
                s[t] = c[ic]
                ic += 1
        for j in range(na):
            cnt[n, j] = 0.0
        cnt[n, na] = 1.0
        for i in range(n - 1, -1, -1):
            cnt[i, na] = 1.0
            for j in range(na - 1, -1, -1):
                cnt[i, j] = cnt[i + 1, j]
                if s[i] == a[j]:
                    cnt[i, j] += cnt[i + 1, j + 1]
        if cnt[0, 0] == 0.0:
            continue
        j = 0
        w = 0
        for i in range(n):
            if j < na and s[i] == a[j] and u[r, n + i] * cnt[i, j] < cnt[i + 1, j + 1]:
                j += 1
            else:
                out[r, w] = s[i]
                w += 1
        ok[r] = 1
    return out_arr, ok_arr


def common_extension(const int[::1] a, const int[::1] b):
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], i, j
    ext_arr = np.zeros((na + 1, nb + 1), dtype=np.int32)
    cdef int[:, ::1] ext = ext_arr
    for i in range(na - 1, -1, -1):
        for j in range(nb - 1, -1, -1):
            if a[i] == b[j]:
                ext[i, j] = ext[i + 1, j + 1] + 1
    return ext_arr
