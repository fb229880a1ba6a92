# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: ball enumeration and the float cutting-sequence walk.

Both mirror the pure-Python versions in ``_fallback`` and ``cutting`` and
must return identical results.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, sqrt, fabs, cosh, acosh, M_SQRT1_2
from libc.stdint cimport uint64_t, int64_t

from .errors import CapacityExceeded
from .cutting import WalkError, LETTER

NAME = "cython"

cdef double CELL = 1e-5
cdef double BAND = 1e-3
cdef double MATCH_TOL = 1e-6
cdef double SIGN_TOL = 1e-10


cdef inline uint64_t _mix(uint64_t h, int64_t v) nogil:
    h ^= <uint64_t>v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)
    h ^= h >> 31
    h *= 0xBF58476D1CE4E5B9ULL
    h ^= h >> 29
    return h


cdef inline uint64_t _hash4(int64_t* k) nogil:
    cdef uint64_t h = 0x243F6A8885A308D3ULL
    h = _mix(h, k[0])
    h = _mix(h, k[1])
    h = _mix(h, k[2])
    h = _mix(h, k[3])
    return h


cdef class _Table:
    """Open-addressing index of element rows keyed by their primary cell."""
    cdef public object mats_arr
    cdef double[:, ::1] mats
    cdef public object slots_arr
    cdef int64_t[::1] slots
    cdef uint64_t mask
    cdef Py_ssize_t n

    def __init__(self, Py_ssize_t capacity):
        self.mats_arr = np.empty((capacity, 4), dtype=np.float64)
        self.mats = self.mats_arr
        size = 1
        while size < 2 * capacity:
            size <<= 1
        self.slots_arr = np.full(size, -1, dtype=np.int64)
        self.slots = self.slots_arr
        self.mask = size - 1
        self.n = 0

    cdef void _grow(self):
        cdef Py_ssize_t cap = self.mats.shape[0] * 2
        new = np.empty((cap, 4), dtype=np.float64)
        new[:self.n] = self.mats_arr[:self.n]
        self.mats_arr = new
        self.mats = new
        size = self.slots.shape[0] * 2
        self.slots_arr = np.full(size, -1, dtype=np.int64)
        self.slots = self.slots_arr
        self.mask = size - 1
        cdef Py_ssize_t j
        cdef int64_t key[4]
        for j in range(self.n):
            self._primary(&self.mats[j, 0], key)
            self._insert_slot(key, j)

    cdef inline void _primary(self, double* m, int64_t* key) nogil:
        cdef int t
        for t in range(4):
            key[t] = <int64_t>floor(m[t] / CELL)

    cdef inline void _insert_slot(self, int64_t* key, int64_t j):
        cdef uint64_t h = _hash4(key) & self.mask
        while self.slots[h] >= 0:
            h = (h + 1) & self.mask
        self.slots[h] = j

    cdef inline bint _same(self, int64_t j, double* m):
        cdef int t
        for t in range(4):
            if fabs(self.mats[j, t] - m[t]) > MATCH_TOL:
                return False
        return True

    cdef bint _find_key(self, int64_t* key, double* m):
        cdef uint64_t h = _hash4(key) & self.mask
        cdef int64_t j
        cdef int64_t other[4]
        while True:
            j = self.slots[h]
            if j < 0:
                return False
            self._primary(&self.mats[j, 0], other)
            if (other[0] == key[0] and other[1] == key[1] and other[2] == key[2]
                    and other[3] == key[3] and self._same(j, m)):
                return True
            h = (h + 1) & self.mask

    cdef bint contains(self, double* m):
        cdef int64_t base[4]
        cdef int64_t alt[4]
        cdef int64_t probe[4]
        cdef int t, mask, nalt = 0
        cdef double s, frac
        for t in range(4):
            s = m[t] / CELL
            base[t] = <int64_t>floor(s)
            frac = s - base[t]
            alt[t] = base[t]
            if frac < BAND:
                alt[t] = base[t] - 1
                nalt += 1
            elif frac > 1.0 - BAND:
                alt[t] = base[t] + 1
                nalt += 1
        if self._find_key(base, m):
            return True
        if nalt == 0:
            return False
        for mask in range(1, 16):
            for t in range(4):
                if mask & (1 << t):
                    if alt[t] == base[t]:
                        break
                    probe[t] = alt[t]
                else:
                    probe[t] = base[t]
            else:
                if self._find_key(probe, m):
                    return True
        return False

    cdef Py_ssize_t add(self, double* m):
        cdef int64_t key[4]
        cdef int t
        if self.n >= self.mats.shape[0]:
            self._grow()
        for t in range(4):
            self.mats[self.n, t] = m[t]
        self._primary(m, key)
        self._insert_slot(key, self.n)
        self.n += 1
        return self.n - 1


def ball_bfs(gens_in, double radius, Py_ssize_t cap):
    """Compiled twin of ``_fallback.ball_bfs``."""
    cdef double[:, ::1] gens = np.ascontiguousarray(gens_in, dtype=np.float64)
    cdef double limit = 2.0 * cosh(radius) + 1e-9
    cdef Py_ssize_t init = 1024
    cdef _Table table = _Table(init)
    parent_arr = np.empty(init, dtype=np.int64)
    side_arr = np.empty(init, dtype=np.int8)
    cdef int64_t[::1] parent = parent_arr
    cdef signed char[::1] side = side_arr
    cdef double m[4]
    cdef double a1, b1, c1, d1
    cdef Py_ssize_t i = 0, j
    cdef int k, t, back
    m[0] = 1.0; m[1] = 0.0; m[2] = 0.0; m[3] = 1.0
    table.add(m)
    parent[0] = -1
    side[0] = -1
    while i < table.n:
        a1 = table.mats[i, 0]; b1 = table.mats[i, 1]
        c1 = table.mats[i, 2]; d1 = table.mats[i, 3]
        back = side[i]
        for k in range(8):
            if back >= 0 and k == (back + 4) % 8:
                continue
            m[0] = a1 * gens[k, 0] + b1 * gens[k, 2]
            m[1] = a1 * gens[k, 1] + b1 * gens[k, 3]
            m[2] = c1 * gens[k, 0] + d1 * gens[k, 2]
            m[3] = c1 * gens[k, 1] + d1 * gens[k, 3]
            if m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3] > limit:
                continue
            for t in range(4):
                if m[t] > SIGN_TOL:
                    break
                if m[t] < -SIGN_TOL:
                    m[0] = -m[0]; m[1] = -m[1]; m[2] = -m[2]; m[3] = -m[3]
                    break
            if table.contains(m):
                continue
            if table.n >= cap:
                raise CapacityExceeded(f"more than {cap} elements within radius {radius}")
            j = table.add(m)
            if j >= parent.shape[0]:
                parent_arr = np.resize(parent_arr, 2 * parent.shape[0])
                side_arr = np.resize(side_arr, 2 * side.shape[0])
                parent = parent_arr
                side = side_arr
            parent[j] = i
            side[j] = k
        i += 1
    n = table.n
    return (np.array(table.mats_arr[:n]), np.array(parent_arr[:n]), np.array(side_arr[:n]))


# -- cutting-sequence walk (double precision) ---------------------------------

cdef double TOL = 1e-8
cdef double CLOSE_RTOL = 1e-7
cdef double NX[8]
cdef double NY[8]
cdef double H
cdef double complex GA[8]
cdef double complex GB[8]


cdef void _init_sides():
    global H
    cdef double ch = 1.0 + sqrt(2.0)
    cdef double sh = sqrt(ch * ch - 1.0)
    cdef double r = M_SQRT1_2
    cdef double cs[8]
    cdef double sn[8]
    cs[:] = [1.0, r, 0.0, -r, -1.0, -r, 0.0, r]
    sn[:] = [0.0, r, 1.0, r, 0.0, -r, -1.0, -r]
    cdef int k
    for k in range(8):
        NX[k] = cs[k]
        NY[k] = sn[k]
        GA[k] = ch
        GB[k] = sh * cs[k] + 1j * sh * sn[k]
    H = sh / ch


_init_sides()


cdef inline double complex _cj(double complex z):
    return z.real - 1j * z.imag


cdef inline void _conj(double complex* al, double complex* be, int k):
    cdef double complex ga = GA[k], gb = GB[k]
    cdef double complex a1 = al[0] * ga + be[0] * _cj(gb)
    cdef double complex b1 = al[0] * gb + be[0] * _cj(ga)
    cdef double complex gac = _cj(ga)
    al[0] = gac * a1 - gb * _cj(b1)
    be[0] = gac * b1 - gb * _cj(a1)


cdef inline void _endpoints(double complex al, double complex be, double* P, double* Q):
    cdef double s = sqrt(al.real * al.real - 1.0)
    cdef double complex inv = be / (be.real * be.real + be.imag * be.imag)
    cdef double complex wm = (-s + 1j * al.imag) * inv
    cdef double complex wp = (s + 1j * al.imag) * inv
    P[0] = wm.real; P[1] = wm.imag
    Q[0] = wp.real; Q[1] = wp.imag


cdef inline bint _less(double t1, double c1, double t2, double c2):
    if t1 < t2 - TOL:
        return True
    if t1 > t2 + TOL:
        return False
    return c1 < c2


cdef int _segment(double* P, double* Q):
    cdef double ux = Q[0] - P[0], uy = Q[1] - P[1]
    cdef bint has_entry = False, has_exit = False
    cdef double et = 0, ec = 0, xt = 0, xc = 0
    cdef int exit_side = -1, k
    cdef double fp, fq, nperp, nu, t, c
    for k in range(8):
        fp = NX[k] * P[0] + NY[k] * P[1] - H
        fq = NX[k] * Q[0] + NY[k] * Q[1] - H
        nperp = -NX[k] * uy + NY[k] * ux
        if fabs(fp) <= TOL and fabs(fq) <= TOL:
            if nperp >= 0:
                return -1
            continue
        nu = fq - fp
        if nu == 0:
            if fp >= 0:
                return -1
            continue
        t = -fp / nu
        c = -nperp / nu
        if nu > 0:
            if not has_exit or _less(t, c, xt, xc):
                xt = t; xc = c; exit_side = k; has_exit = True
        elif not has_entry or _less(et, ec, t, c):
            et = t; ec = c; has_entry = True
    if not has_exit:
        return -1
    if has_entry and not _less(et, ec, xt, xc):
        return -1
    return exit_side


cdef double _foot_violation(double* P, double* Q, int* best_k):
    cdef double ux = Q[0] - P[0], uy = Q[1] - P[1]
    cdef double t = -(P[0] * ux + P[1] * uy) / (ux * ux + uy * uy)
    cdef double qx = P[0] + t * ux, qy = P[1] + t * uy
    cdef double best = -1e300, v
    cdef int k
    for k in range(8):
        v = NX[k] * qx + NY[k] * qy - H
        if v > best:
            best = v
            best_k[0] = k
    return best


def cutting_sequence(a, b, c, d, length_hint=None):
    """Compiled twin of ``cutting.cutting_sequence`` at double precision."""
    cdef double complex al = ((a + d) / 2.0) + 1j * ((b - c) / 2.0)
    cdef double complex be = ((a - d) / 2.0) - 1j * ((b + c) / 2.0)
    cdef double P[2]
    cdef double Q[2]
    cdef int k, side = -1, step, depth
    cdef double v
    if al.real < 0:
        al = -al
        be = -be
    if not al.real > 1:
        raise WalkError("element is not hyperbolic")
    if length_hint is None:
        length_hint = 2.0 * acosh(al.real)
    cdef int max_steps = 200 + int(60 * length_hint)
    for step in range(max_steps):
        _endpoints(al, be, P, Q)
        v = _foot_violation(P, Q, &k)
        if v <= TOL:
            break
        _conj(&al, &be, k)
    else:
        raise WalkError("could not bring the axis into the fundamental octagon")
    # breadth-first search over nearby tiles for one the pushed axis crosses
    frontier = [(al, be)]
    found = False
    for depth in range(5):
        nxt = []
        for pair in frontier:
            al = pair[0]
            be = pair[1]
            _endpoints(al, be, P, Q)
            side = _segment(P, Q)
            if side >= 0:
                found = True
                break
            for k in range(8):
                a2 = al
                b2 = be
                _conj_py(nxt, a2, b2, k)
        if found:
            break
        frontier = nxt
    if not found:
        raise WalkError("no tile around the axis foot meets the pushed axis")
    cdef double complex al0 = al, be0 = be
    cdef double scale = 1.0 + abs(al0)
    letters = []
    visited = np.empty((max_steps, 4), dtype=np.float64)
    cdef double[:, ::1] vis = visited
    cdef Py_ssize_t n = 0
    for step in range(max_steps):
        letters.append(LETTER[side])
        _conj(&al, &be, side)
        vis[n, 0] = al.real + be.real
        vis[n, 1] = al.imag - be.imag
        vis[n, 2] = -al.imag - be.imag
        vis[n, 3] = al.real - be.real
        n += 1
        if abs(al - al0) + abs(be - be0) <= CLOSE_RTOL * scale:
            return letters, [tuple(row) for row in visited[:n]]
        _endpoints(al, be, P, Q)
        side = _segment(P, Q)
        if side < 0:
            raise WalkError("pushed axis lost the tile it entered")
    raise WalkError(f"walk did not close after {max_steps} steps")


cdef void _conj_py(list out, double complex al, double complex be, int k):
    _conj(&al, &be, k)
    out.append((al, be))


def crossing_mask(mats_in):
    """True for rows whose left-pushed axis crosses the fundamental octagon."""
    cdef double[:, ::1] mats = np.ascontiguousarray(mats_in, dtype=np.float64)
    cdef Py_ssize_t n = mats.shape[0], j
    out = np.zeros(n, dtype=bool)
    cdef cnp.uint8_t[::1] res = out.view(np.uint8)
    cdef double complex al, be
    cdef double P[2]
    cdef double Q[2]
    for j in range(n):
        al = ((mats[j, 0] + mats[j, 3]) / 2.0) + 1j * ((mats[j, 1] - mats[j, 2]) / 2.0)
        be = ((mats[j, 0] - mats[j, 3]) / 2.0) - 1j * ((mats[j, 1] + mats[j, 2]) / 2.0)
        if al.real < 0:
            al = -al
            be = -be
        if not al.real > 1:
            continue
        _endpoints(al, be, P, Q)
        res[j] = _segment(P, Q) >= 0
    return out
