"""Cutting sequences of closed geodesics through the octagon tiling.

A hyperbolic element's axis crosses a periodic sequence of tiles of the
tiling by translates of the regular octagon F.  Reading off the side through
which the axis leaves each tile gives a cyclic word in the side-pairing
generators; up to rotation it depends only on the conjugacy class, and it is
the k-th power of the root sequence exactly when the element is a k-th power.

Geodesics that run through a vertex of the tiling, or along one of its edges,
are resolved by pushing the axis an infinitesimal distance to its left.  The
push commutes with every orientation-preserving isometry, so the resulting
sequence is still a class invariant.  First-order bookkeeping is enough: the
crossing of the pushed axis with a side line sits at parameter t + delta * c,
and ties in t are broken by c.

All geometry happens in the Klein disk, where geodesics and the sides of F
are straight chords.  The code works unchanged for Python floats and for
mpmath numbers, which is how long words are handled.
"""

from __future__ import annotations

import math

from .errors import GeodesicError

# cosh of the octagon inradius; the generator translation length is twice it
COSH_INRADIUS = 1.0 + math.sqrt(2.0)
SIDES = 8
LETTER = tuple(k + 1 if k < 4 else -(k - 3) for k in range(SIDES))
SIDE_OF_LETTER = {v: k for k, v in enumerate(LETTER)}


class WalkError(GeodesicError):
    pass


class TilingContext:
    """Generator matrices and side data at a chosen working precision.

    ``dps=None`` means IEEE doubles; otherwise mpmath with ``dps`` digits.
    """

    def __init__(self, dps=None):
        self.dps = dps
        if dps is None:
            self.sqrt = math.sqrt
            one = 1.0
            ch = COSH_INRADIUS
            sh = math.sqrt(ch * ch - 1.0)
            half = math.sqrt(0.5)
            self.tol = 1e-8
            self.close_rtol = 1e-7
            self._mk = complex
        else:
            import mpmath

            self._mp = mpmath.mp.clone()
            self._mp.dps = dps
            mp = self._mp
            self.sqrt = mp.sqrt
            one = mp.mpf(1)
            ch = 1 + mp.sqrt(2)
            sh = mp.sqrt(ch * ch - 1)
            half = mp.sqrt(mp.mpf(1) / 2)
            self.tol = mp.mpf(10) ** (-(dps // 2))
            self.close_rtol = mp.mpf(10) ** (-(dps // 2) + 1)
            self._mk = mp.mpc
        cos8 = [one, half, 0 * one, -half, -one, -half, 0 * one, half]
        sin8 = [0 * one, half, one, half, 0 * one, -half, -one, -half]
        self.normals = list(zip(cos8, sin8))
        self.h = sh / ch
        self.alpha = [self._mk(ch, 0 * one) for _ in range(SIDES)]
        self.beta = [self._mk(sh * cos8[k], sh * sin8[k]) for k in range(SIDES)]
        self.zero = 0 * one
        self.one = one

    def number(self, x):
        if self.dps is None:
            return float(x)
        return self._mp.mpf(x)

    def from_sl2(self, a, b, c, d):
        n = self.number
        a, b, c, d = n(a), n(b), n(c), n(d)
        al = self._mk((a + d) / 2, (b - c) / 2)
        be = self._mk((a - d) / 2, -(b + c) / 2)
        if al.real < 0:
            al, be = -al, -be
        return al, be

    def conj(self, al, be, k):
        """g_k^{-1} (al, be) g_k in SU(1,1) coordinates."""
        ga, gb = self.alpha[k], self.beta[k]
        a1 = al * ga + be * gb.conjugate()
        b1 = al * gb + be * ga.conjugate()
        gac = ga.conjugate()
        return gac * a1 - gb * b1.conjugate(), gac * b1 - gb * a1.conjugate()

    def endpoints(self, al, be):
        """Repelling and attracting fixed points on the unit circle."""
        s = self.sqrt(al.real * al.real - 1)
        inv = be / (be.real * be.real + be.imag * be.imag)
        im = al.imag
        w_minus = self._mk(-s, im) * inv
        w_plus = self._mk(s, im) * inv
        return (w_minus.real, w_minus.imag), (w_plus.real, w_plus.imag)

    def close(self, al, be, al0, be0):
        scale = 1 + abs(al0)
        return abs(al - al0) + abs(be - be0) <= self.close_rtol * scale


def su11_to_sl2(al, be):
    a = al.real + be.real
    b = al.imag - be.imag
    c = -al.imag - be.imag
    d = al.real - be.real
    return a, b, c, d


def _less(k1, k2, tol):
    if k1[0] < k2[0] - tol:
        return True
    if k1[0] > k2[0] + tol:
        return False
    return k1[1] < k2[1]


def perturbed_segment(ctx, P, Q):
    """Where the left-pushed chord P->Q meets F.

    Returns the side index through which it leaves F, or -1 when the pushed
    chord misses F entirely.
    """
    tol = ctx.tol
    ux, uy = Q[0] - P[0], Q[1] - P[1]
    entry = None
    exit_key = None
    exit_side = -1
    for k in range(SIDES):
        nx, ny = ctx.normals[k]
        fp = nx * P[0] + ny * P[1] - ctx.h
        fq = nx * Q[0] + ny * Q[1] - ctx.h
        n_perp = -nx * uy + ny * ux
        if abs(fp) <= tol and abs(fq) <= tol:
            # axis lies on this side line; F is on the pushed side or not
            if n_perp >= 0:
                return -1
            continue
        nu = fq - fp
        if nu == 0:
            if fp >= 0:
                return -1
            continue
        key = (-fp / nu, -n_perp / nu)
        if nu > 0:
            if exit_key is None or _less(key, exit_key, tol):
                exit_key = key
                exit_side = k
        elif entry is None or _less(entry, key, tol):
            entry = key
    if exit_key is None:
        return -1
    if entry is not None and not _less(entry, exit_key, tol):
        return -1
    return exit_side


def _foot_violation(ctx, P, Q):
    ux, uy = Q[0] - P[0], Q[1] - P[1]
    t = -(P[0] * ux + P[1] * uy) / (ux * ux + uy * uy)
    qx, qy = P[0] + t * ux, P[1] + t * uy
    best, best_k = None, -1
    for k in range(SIDES):
        nx, ny = ctx.normals[k]
        v = nx * qx + ny * qy - ctx.h
        if best is None or v > best:
            best, best_k = v, k
    return best, best_k


def _start_state(ctx, al, be, max_steps):
    for _ in range(max_steps):
        P, Q = ctx.endpoints(al, be)
        v, k = _foot_violation(ctx, P, Q)
        if v <= ctx.tol:
            break
        al, be = ctx.conj(al, be, k)
    else:
        raise WalkError("could not bring the axis into the fundamental octagon")
    frontier = [(al, be)]
    for _depth in range(5):
        nxt = []
        for a, b in frontier:
            P, Q = ctx.endpoints(a, b)
            side = perturbed_segment(ctx, P, Q)
            if side >= 0:
                return a, b, side
            nxt.extend(ctx.conj(a, b, k) for k in range(SIDES))
        frontier = nxt
    raise WalkError("no tile around the axis foot meets the pushed axis")


def cutting_sequence(ctx, a, b, c, d, length_hint=None):
    """Root cutting sequence of a hyperbolic SL(2,R) element.

    Returns ``(letters, visited)`` where ``letters`` is the cutting sequence
    of the primitive root, as generator letters, and ``visited`` lists the
    conjugates (as SL(2,R) tuples) whose pushed axis crosses F, one per letter.
    """
    al, be = ctx.from_sl2(a, b, c, d)
    if not al.real > 1:
        raise WalkError("element is not hyperbolic")
    if length_hint is None:
        length_hint = float(2 * math.acosh(float(al.real)))
    max_steps = 200 + int(60 * length_hint)
    al, be, side = _start_state(ctx, al, be, max_steps)
    al0, be0 = al, be
    letters = []
    visited = []
    for _ in range(max_steps):
        letters.append(LETTER[side])
        al, be = ctx.conj(al, be, side)
        visited.append(su11_to_sl2(al, be))
        if ctx.close(al, be, al0, be0):
            return letters, visited
        P, Q = ctx.endpoints(al, be)
        side = perturbed_segment(ctx, P, Q)
        if side < 0:
            raise WalkError("pushed axis lost the tile it entered")
    raise WalkError(f"walk did not close after {max_steps} steps")
