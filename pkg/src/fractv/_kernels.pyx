# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, asin, sqrt, M_PI

cnp.import_array()

cdef double EARTH_RADIUS_KM = 6371.0
cdef double DEG = M_PI / 180.0


def haversine_matrix(lat, lon):
    cdef double[::1] la = np.ascontiguousarray(lat, dtype=np.float64)
    cdef double[::1] lo = np.ascontiguousarray(lon, dtype=np.float64)
    cdef Py_ssize_t n = la.shape[0]
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] d = out
    cdef double[::1] cphi = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double sdlat, sdlon, h
    for i in range(n):
        cphi[i] = cos(la[i] * DEG)
    for i in range(n):
        for j in range(i + 1, n):
            sdlat = sin((la[j] - la[i]) * DEG / 2.0)
            sdlon = sin((lo[j] - lo[i]) * DEG / 2.0)
            h = sdlat * sdlat + cphi[i] * cphi[j] * sdlon * sdlon
            if h > 1.0:
                h = 1.0
            d[i, j] = 2.0 * EARTH_RADIUS_KM * asin(sqrt(h))
            d[j, i] = d[i, j]
    return out


cdef inline double _median(double* buf, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double key
    for i in range(1, m):
        key = buf[i]
        j = i - 1
        while j >= 0 and buf[j] > key:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = key
    if m % 2 == 1:
        return buf[m // 2]
    return (buf[m // 2 - 1] + buf[m // 2]) / 2.0


def median_pass(Y, indptr, indices, bint temporal):
    cdef double[:, ::1] y = np.ascontiguousarray(Y, dtype=np.float64)
    cdef cnp.int64_t[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int64_t[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t n = y.shape[0], t = y.shape[1]
    out = np.empty((n, t), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t max_deg = 0, v, s, k, m
    for v in range(n):
        if ptr[v + 1] - ptr[v] > max_deg:
            max_deg = ptr[v + 1] - ptr[v]
    cdef double[::1] buf = np.empty(max_deg + 3, dtype=np.float64)
    with nogil:
        for v in range(n):
            for s in range(t):
                buf[0] = y[v, s]
                m = 1
                for k in range(ptr[v], ptr[v + 1]):
                    buf[m] = y[idx[k], s]
                    m += 1
                if temporal:
                    buf[m] = y[v, s - 1 if s > 0 else 0]
                    buf[m + 1] = y[v, s + 1 if s + 1 < t else t - 1]
                    m += 2
                o[v, s] = _median(&buf[0], m)
    return out
