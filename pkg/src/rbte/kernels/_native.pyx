# Compiled implementations of the hot kernels.  Semantics are locked to
# rbte.kernels._fallback; both backends must return bit-identical results.
#
# Connectivity uses two-pass raster-scan union-find (sequential memory
# access) rather than flood fill; only membership matters, so the label
# bookkeeping never leaks into the results.

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()

cdef double BIN_SCALE = 4.0 / np.pi

cdef int[4] DR = [0, 1, 1, 1]
cdef int[4] DC = [1, 1, 0, -1]


def suppress_nonmax(strength, orientation):
    """Directional non-maximum suppression with replicate borders."""
    cdef double[:, ::1] s = np.ascontiguousarray(strength, dtype=np.float64)
    cdef double[:, ::1] o = np.ascontiguousarray(orientation, dtype=np.float64)
    cdef Py_ssize_t h = s.shape[0], w = s.shape[1]
    out_arr = np.zeros((h, w), dtype=np.float64)
    bins_arr = np.zeros((h, w), dtype=np.int8)
    cdef double[:, ::1] out = out_arr
    cdef signed char[:, ::1] bins = bins_arr
    cdef Py_ssize_t r, c, rf, cf, rb, cb
    cdef int b
    cdef double v, t

    for r in range(h):
        for c in range(w):
            t = o[r, c] * BIN_SCALE + 0.5
            b = <int>floor(t)
            b = b % 4
            if b < 0:
                b += 4
            bins[r, c] = <signed char>b
            v = s[r, c]
            rf = r + DR[b]
            cf = c + DC[b]
            rb = r - DR[b]
            cb = c - DC[b]
            if rf < 0: rf = 0
            elif rf >= h: rf = h - 1
            if cf < 0: cf = 0
            elif cf >= w: cf = w - 1
            if rb < 0: rb = 0
            elif rb >= h: rb = h - 1
            if cb < 0: cb = 0
            elif cb >= w: cb = w - 1
            if v > s[rf, cf] and v > s[rb, cb]:
                out[r, c] = v
    return out_arr, bins_arr


cdef inline Py_ssize_t _find(Py_ssize_t* parent, Py_ssize_t x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef inline void _union(Py_ssize_t* parent, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef Py_ssize_t ra = _find(parent, a)
    cdef Py_ssize_t rb = _find(parent, b)
    if ra != rb:
        parent[ra] = rb


cdef void _link_prior_neighbors(
    const unsigned char* member, Py_ssize_t* parent, Py_ssize_t h, Py_ssize_t w
) noexcept nogil:
    # raster scan; union each member pixel with its already-seen neighbors
    # (W, NW, N, NE under 8-connectivity)
    cdef Py_ssize_t r, c, i
    for r in range(h):
        for c in range(w):
            i = r * w + c
            if not member[i]:
                continue
            parent[i] = i
            if c > 0 and member[i - 1]:
                _union(parent, i, i - 1)
            if r > 0:
                if member[i - w]:
                    _union(parent, i, i - w)
                if c > 0 and member[i - w - 1]:
                    _union(parent, i, i - w - 1)
                if c + 1 < w and member[i - w + 1]:
                    _union(parent, i, i - w + 1)


def hysteresis_mask(strength, double low, double high):
    """True where strength >= high, or >= low and 8-connected to >= high."""
    cdef double[:, ::1] s = np.ascontiguousarray(strength, dtype=np.float64)
    cdef Py_ssize_t h = s.shape[0], w = s.shape[1]
    weak_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] weak = weak_arr
    cdef Py_ssize_t r, c
    cdef bint any_strong = 0

    for r in range(h):
        for c in range(w):
            if s[r, c] >= low:
                weak[r, c] = 1
                if s[r, c] >= high:
                    any_strong = 1
    out_arr = np.zeros((h, w), dtype=bool)
    if not any_strong:
        return out_arr
    cdef unsigned char[:, ::1] out = out_arr.view(np.uint8)

    parent_arr = np.empty(h * w, dtype=np.intp)
    cdef Py_ssize_t[::1] parent_mv = parent_arr
    cdef Py_ssize_t* parent = &parent_mv[0]
    _link_prior_neighbors(&weak[0, 0], parent, h, w)

    anchored_arr = np.zeros(h * w, dtype=np.uint8)
    cdef unsigned char[::1] anchored = anchored_arr
    for r in range(h):
        for c in range(w):
            # the weak guard matters when low > high: parent entries exist
            # only for weak pixels
            if weak[r, c] and s[r, c] >= high:
                anchored[_find(parent, r * w + c)] = 1
    for r in range(h):
        for c in range(w):
            if weak[r, c] and anchored[_find(parent, r * w + c)]:
                out[r, c] = 1
    return out_arr


def filter_small_components(mask, Py_ssize_t min_size):
    """Clear 8-connected components smaller than min_size.

    Returns (filtered mask, component count before, component count after).
    """
    m_arr = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef unsigned char[:, ::1] m = m_arr
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    out_arr = np.zeros((h, w), dtype=bool)
    cdef unsigned char[:, ::1] out = out_arr.view(np.uint8)

    parent_arr = np.empty(h * w, dtype=np.intp)
    cdef Py_ssize_t[::1] parent_mv = parent_arr
    cdef Py_ssize_t* parent = &parent_mv[0]
    _link_prior_neighbors(&m[0, 0], parent, h, w)

    size_arr = np.zeros(h * w, dtype=np.intp)
    cdef Py_ssize_t[::1] size = size_arr
    cdef Py_ssize_t r, c, root
    cdef Py_ssize_t n_before = 0, n_after = 0

    for r in range(h):
        for c in range(w):
            if m[r, c]:
                size[_find(parent, r * w + c)] += 1
    for r in range(h):
        for c in range(w):
            if not m[r, c]:
                continue
            root = _find(parent, r * w + c)
            if parent[root] == root and size[root] > 0:
                n_before += 1
                if size[root] >= min_size:
                    n_after += 1
                size[root] = -size[root]  # visited marker, keeps magnitude
            if size[root] <= -min_size:
                out[r, c] = 1
    return out_arr, n_before, n_after
