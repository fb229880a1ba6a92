"""The genus-2 surface group of the regular octagon (the Bolza group).

Words are tuples of signed generator indices in {+-1, ..., +-2g}; a negative
index denotes the inverse generator.  The generator with index k+1 is the
side pairing g_k of the octagon that carries F across its k-th side, so
g_{k+4} = g_k^{-1} and only g_0..g_3 are independent.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from . import cutting, kernels
from .errors import IdentityWord, RelatorNotFound
from .hyperbolic import (
    IDENTITY,
    Matrix2,
    PSL2Element,
    is_identity,
    mul,
    normalize_entries,
    norm_from_trace,
)

Word = Tuple[int, ...]
CyclicWord = Tuple[int, ...]


# -- word utilities ----------------------------------------------------------

def parse_word(text: str) -> Word:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(x) for x in text.split(","))


def format_word(w: Sequence[int]) -> str:
    return ",".join(str(x) for x in w)


def invert_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def free_reduce(w: Sequence[int]) -> Word:
    out: List[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_free_reduce(w: Sequence[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return tuple(w[i:j + 1])


def least_rotation(w: Sequence[int]) -> Word:
    """Lexicographically least rotation (Booth's algorithm, O(n))."""
    s = list(w) * 2
    n = len(w)
    if n == 0:
        return ()
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return tuple(s[k:k + n])


def smallest_period(w: Sequence[int]) -> int:
    """Smallest p dividing len(w) with w == w[:p] * (len(w)//p)."""
    n = len(w)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and w[i] != w[k]:
            k = fail[k - 1]
        if w[i] == w[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1] if n else 0
    return p if n and n % p == 0 else n


def primitive_root(c: Sequence[int]) -> Tuple[CyclicWord, int]:
    """Split a non-empty cyclic word as root^k with root not a proper power."""
    if not c:
        raise ValueError("empty cyclic word has no root")
    p = smallest_period(c)
    return least_rotation(c[:p]), len(c) // p


def abelianize(w: Sequence[int], genus: int = 2) -> Tuple[int, ...]:
    v = [0] * (2 * genus)
    for x in w:
        if x > 0:
            v[x - 1] += 1
        else:
            v[-x - 1] -= 1
    return tuple(v)


# -- the group ---------------------------------------------------------------

def _disk_generator(k: int, ch: float, sh: float) -> PSL2Element:
    # disk translation (alpha, beta) = (ch, sh e^{i k pi/4}) pulled back to H
    th = k * math.pi / 4
    br, bi = sh * math.cos(th), sh * math.sin(th)
    a, b, c, d = ch + br, -bi, -bi, ch - br
    return PSL2Element(Matrix2(*normalize_entries(a, b, c, d)), (cutting.LETTER[k],))


@dataclass(frozen=True)
class SurfaceGroup:
    genus: int
    generators: Tuple[PSL2Element, ...]
    relator: Word
    dehn_table: Dict[Word, Word] = field(repr=False, compare=False)
    vol: float
    systole: float
    circumradius: float

    def generator(self, letter: int) -> PSL2Element:
        g = self.generators[abs(letter) - 1]
        if letter > 0:
            return g
        a, b, c, d = g.mat
        return PSL2Element(Matrix2(*normalize_entries(d, -b, -c, a)), (letter,))

    def evaluate(self, w: Sequence[int]) -> PSL2Element:
        """Matrix of a word in double precision, with the word as witness."""
        g = IDENTITY
        for x in w:
            g = mul(g, self.generator(x))
        return PSL2Element(g.mat, tuple(w))

    def evaluate_precise(self, w: Sequence[int], dps: int | None = None):
        """Matrix entries of a word as mpmath numbers (sign-normalized)."""
        import mpmath

        if dps is None:
            dps = 30 + 2 * len(w)
        mp = mpmath.mp.clone()
        mp.dps = dps
        ch = 1 + mp.sqrt(2)
        sh = mp.sqrt(ch * ch - 1)
        gens = {}
        for k in range(8):
            th = k * mp.pi / 4
            br, bi = sh * mp.cos(th), sh * mp.sin(th)
            gens[cutting.LETTER[k]] = (ch + br, -bi, -bi, ch - br)
        a, b, c, d = mp.mpf(1), mp.mpf(0), mp.mpf(0), mp.mpf(1)
        for x in w:
            a2, b2, c2, d2 = gens[x]
            a, b, c, d = a * a2 + b * c2, a * b2 + b * d2, c * a2 + d * c2, c * b2 + d * d2
        return normalize_entries(a, b, c, d)

    def abelianize(self, w: Sequence[int]) -> Tuple[int, ...]:
        return abelianize(w, self.genus)

    def dehn_reduce(self, w: Sequence[int]) -> Word:
        return dehn_reduce(w, self.dehn_table)

    def cyclic_dehn_reduce(self, w: Sequence[int]) -> Word:
        return cyclic_dehn_reduce(w, self.dehn_table)

    def cyclic_normal_form(self, w: Sequence[int]) -> CyclicWord:
        return cyclic_normal_form(self, w)

    def root_and_power(self, w: Sequence[int]) -> Tuple[CyclicWord, int]:
        return conjugacy_root(self, w)


def _relator_classes(buckets, gen, tol):
    found = set()
    for ws in buckets.values():
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                r = cyclic_free_reduce(ws[i] + invert_word(ws[j]))
                if not r or not is_identity(_eval(gen, r), tol):
                    continue
                found.add(min(least_rotation(r), least_rotation(invert_word(r))))
    return found


def find_relator(gens: Sequence[PSL2Element], max_len: int = 8, tol: float = 1e-6) -> Word:
    """Search words of length <= max_len for the defining relation.

    Meet in the middle: two distinct freely reduced words of length at most
    max_len/2 with equal matrices give the relation u v^{-1}.  Exactly one
    relation class (up to rotation and inversion) of length max_len, and none
    shorter, is expected.
    """
    half = max_len // 2
    n = len(gens)
    letters = list(range(1, n + 1)) + [-k for k in range(1, n + 1)]

    def gen(x):
        g = gens[abs(x) - 1]
        if x > 0:
            return g
        a, b, c, d = g.mat
        return PSL2Element(Matrix2(*normalize_entries(d, -b, -c, a)))

    layer = [((), IDENTITY)]
    buckets = defaultdict(list)
    for _ in range(half + 1):
        nxt = []
        for w, g in layer:
            buckets[tuple(round(v, 3) for v in g.mat)].append(w)
            if len(w) == half:
                continue
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append((w + (x,), mul(g, gen(x))))
        layer = nxt
    classes = _relator_classes(buckets, gen, tol)
    short = [r for r in classes if len(r) < max_len]
    if short:
        raise RelatorNotFound(f"unexpected short relations {short!r}")
    if len(classes) != 1:
        raise RelatorNotFound(f"expected one relator class, found {len(classes)}")
    return classes.pop()


def _eval(gen, w):
    g = IDENTITY
    for x in w:
        g = mul(g, gen(x))
    return g


def build_dehn_table(relator: Sequence[int]) -> Dict[Word, Word]:
    """Map every cyclic subword longer than half a relator to its shorter equal."""
    n = len(relator)
    table: Dict[Word, Word] = {}
    for r in (tuple(relator), invert_word(relator)):
        for i in range(n):
            rot = r[i:] + r[:i]
            for length in range(n // 2 + 1, n + 1):
                table[rot[:length]] = invert_word(rot[length:])
    return table


def _longest_match(w, table, max_len):
    n = len(w)
    for length in range(min(max_len, n), 0, -1):
        for i in range(n - length + 1):
            if w[i:i + length] in table:
                return i, length
    return None


def dehn_reduce(w: Sequence[int], table: Dict[Word, Word]) -> Word:
    """Dehn's algorithm: free reduction plus relator-half replacements.

    Replaces the longest subword matching more than half of a relator
    rotation (leftmost on ties) until none is left.  Each replacement shortens
    the word, so this terminates, and for a surface group of genus >= 2 the
    result is empty exactly when w is trivial.
    """
    max_len = max(len(k) for k in table)
    w = free_reduce(w)
    while True:
        m = _longest_match(w, table, max_len)
        if m is None:
            return w
        i, length = m
        w = free_reduce(w[:i] + table[w[i:i + length]] + w[i + length:])


def cyclic_dehn_reduce(w: Sequence[int], table: Dict[Word, Word]) -> Word:
    """Dehn reduction applied to every rotation until nothing changes.

    The result is a conjugate of w that is cyclically free-reduced and has no
    cyclic subword longer than half a relator.
    """
    max_len = max(len(k) for k in table)
    w = cyclic_free_reduce(dehn_reduce(w, table))
    changed = True
    while changed and w:
        changed = False
        n = len(w)
        ww = w + w
        for length in range(min(max_len, n), 0, -1):
            for i in range(n):
                s = ww[i:i + length]
                if s in table:
                    rest = ww[i + length:i + n]
                    w = cyclic_free_reduce(dehn_reduce(table[s] + rest, table))
                    changed = True
                    break
            if changed:
                break
    return w


# -- conjugacy keys -----------------------------------------------------------

FLOAT_LENGTH_LIMIT = 14.0


def _translation_length_estimate(group, w):
    g = group.evaluate(w)
    t = abs(g.trace)
    if not math.isfinite(t):
        return float("inf")
    if t <= 2.0:
        return 0.0
    return norm_from_trace(t)[1]


def _walk_word(group: SurfaceGroup, w: Word):
    est = _translation_length_estimate(group, w)
    if est <= FLOAT_LENGTH_LIMIT:
        letters, _ = kernels.cutting_sequence(*group.evaluate(w).mat, est)
    else:
        dps = 30 + int(est / 2.0)
        ctx = cutting.TilingContext(dps)
        a, b, c, d = group.evaluate_precise(w, dps)
        letters, _ = cutting.cutting_sequence(ctx, a, b, c, d, est)
    root = least_rotation(letters)
    # the walk closes after one period of the primitive root
    power = max(1, round(est / _translation_length_estimate(group, root)))
    return root, power


def conjugacy_root(group: SurfaceGroup, w: Sequence[int]) -> Tuple[CyclicWord, int]:
    """Primitive-root key and power of the conjugacy class of w."""
    if not dehn_reduce(w, group.dehn_table):
        raise IdentityWord(f"word {format_word(w)!r} is trivial in the group")
    red = cyclic_dehn_reduce(w, group.dehn_table)
    red_root, k_word = primitive_root(red)
    root, k_geo = _walk_word(group, red_root)
    return root, k_word * k_geo


def inverse_key(group: SurfaceGroup, key: Sequence[int]) -> CyclicWord:
    """Key of the inverse class.

    Not simply the reversed inverted key: for axes through vertices of the
    tiling the left push lands on the other side once orientation flips.
    """
    return cyclic_normal_form(group, invert_word(key))


def cyclic_normal_form(group: SurfaceGroup, w: Sequence[int]) -> CyclicWord:
    """Canonical key of the conjugacy class of w.

    The word is first cyclically Dehn-reduced (a conjugate, usually much
    shorter) and then replaced by the cutting sequence of its axis, taken at
    its least rotation.  Dehn-reduced conjugates are not unique in a surface
    group, whereas the cutting sequence is.
    """
    root, k = conjugacy_root(group, w)
    return least_rotation(root * k)


# -- construction ---------------------------------------------------------------

def octagon_circumradius() -> float:
    # regular octagon with interior angles pi/4: cosh R = cot^2(pi/8)
    return math.acosh(1.0 / math.tan(math.pi / 8) ** 2)


def build_bolza_group() -> SurfaceGroup:
    ch = cutting.COSH_INRADIUS
    sh = math.sqrt(ch * ch - 1.0)
    gens = tuple(_disk_generator(k, ch, sh) for k in range(4))
    relator = find_relator(gens)
    systole = 2.0 * math.acosh(ch)
    return SurfaceGroup(
        genus=2,
        generators=gens,
        relator=relator,
        dehn_table=build_dehn_table(relator),
        vol=4.0 * math.pi * (2 - 1),
        systole=systole,
        circumradius=octagon_circumradius(),
    )


_BOLZA = None


def bolza() -> SurfaceGroup:
    """Cached Bolza group."""
    global _BOLZA
    if _BOLZA is None:
        _BOLZA = build_bolza_group()
    return _BOLZA
