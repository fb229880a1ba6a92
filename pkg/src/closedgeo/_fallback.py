"""Pure-Python kernels, used when the compiled extension is unavailable."""

import math

import numpy as np

from . import cutting
from .errors import CapacityExceeded

NAME = "python"

CELL = 1e-5
BAND = 1e-3
MATCH_TOL = 1e-6
SIGN_TOL = 1e-10

_CTX = None


def _probe_keys(m):
    base = []
    alts = []
    for v in m:
        s = v / CELL
        f = math.floor(s)
        frac = s - f
        base.append(f)
        if frac < BAND:
            alts.append((f, f - 1))
        elif frac > 1.0 - BAND:
            alts.append((f, f + 1))
        else:
            alts.append((f,))
    key = tuple(base)
    if all(len(a) == 1 for a in alts):
        return key, (key,)
    keys = [()]
    for a in alts:
        keys = [k + (x,) for k in keys for x in a]
    return key, keys


def ball_bfs(gens, radius, cap):
    """Breadth-first enumeration of {g : d(i, g i) <= radius}.

    ``gens`` holds the eight side pairings (row k carries F across side k).
    Returns ``(mats, parent, side)``; element 0 is the identity and element j
    equals ``mats[parent[j]] @ gens[side[j]]``.

    The generators are the side pairings of the Dirichlet domain centred at i,
    so every tile crossed by the segment from i to g(i) has its centre within
    d(i, g(i)) of i; pruning at the radius therefore loses nothing.
    """
    gens = [tuple(float(x) for x in row) for row in gens]
    limit = 2.0 * math.cosh(radius) + 1e-9
    mats = [(1.0, 0.0, 0.0, 1.0)]
    parent = [-1]
    side = [-1]
    index = {_probe_keys(mats[0])[0]: 0}
    i = 0
    while i < len(mats):
        a1, b1, c1, d1 = mats[i]
        back = side[i]
        for k in range(8):
            if back >= 0 and k == (back + 4) % 8:
                continue
            a2, b2, c2, d2 = gens[k]
            a = a1 * a2 + b1 * c2
            b = a1 * b2 + b1 * d2
            c = c1 * a2 + d1 * c2
            d = c1 * b2 + d1 * d2
            if a * a + b * b + c * c + d * d > limit:
                continue
            for v in (a, b, c, d):
                if v > SIGN_TOL:
                    break
                if v < -SIGN_TOL:
                    a, b, c, d = -a, -b, -c, -d
                    break
            m = (a, b, c, d)
            key, probes = _probe_keys(m)
            hit = False
            for p in probes:
                j = index.get(p)
                if j is not None:
                    o = mats[j]
                    if (abs(o[0] - a) <= MATCH_TOL and abs(o[1] - b) <= MATCH_TOL
                            and abs(o[2] - c) <= MATCH_TOL and abs(o[3] - d) <= MATCH_TOL):
                        hit = True
                        break
            if hit:
                continue
            if len(mats) >= cap:
                raise CapacityExceeded(f"more than {cap} elements within radius {radius}")
            index[key] = len(mats)
            mats.append(m)
            parent.append(i)
            side.append(k)
        i += 1
    return (np.array(mats, dtype=np.float64).reshape(-1, 4),
            np.array(parent, dtype=np.int64),
            np.array(side, dtype=np.int8))


def cutting_sequence(a, b, c, d, length_hint=None):
    global _CTX
    if _CTX is None:
        _CTX = cutting.TilingContext()
    return cutting.cutting_sequence(_CTX, a, b, c, d, length_hint)


def crossing_mask(mats):
    """True for rows whose left-pushed axis crosses the fundamental octagon."""
    global _CTX
    if _CTX is None:
        _CTX = cutting.TilingContext()
    out = np.zeros(len(mats), dtype=bool)
    for j, m in enumerate(mats):
        al, be = _CTX.from_sl2(*m)
        if not al.real > 1:
            continue
        P, Q = _CTX.endpoints(al, be)
        out[j] = cutting.perturbed_segment(_CTX, P, Q) >= 0
    return out
