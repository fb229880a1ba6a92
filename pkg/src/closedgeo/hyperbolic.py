"""Floating point arithmetic on PSL(2,R).

Elements are stored as 2x2 real matrices with determinant one, modulo the
sign ambiguity of PSL(2,R).  The sign is fixed by requiring the first entry
(in the order a, b, c, d) whose magnitude exceeds ``ZERO_TOL`` to be
positive, which makes the stored tuple usable as a deduplication key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

from .errors import NonHyperbolic

ZERO_TOL = 1e-10
IDENTITY_TOL = 1e-9
PARABOLIC_TOL = 1e-9
ACOSH_SLACK = 1e-12

Word = Tuple[int, ...]


class Matrix2(NamedTuple):
    a: float
    b: float
    c: float
    d: float

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def frobenius_sq(self) -> float:
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def check_det(self) -> bool:
        return abs(self.det() - 1.0) <= 1e-9 * max(1.0, self.frobenius_sq())


def normalize_entries(a, b, c, d):
    """Flip the overall sign so the first non-negligible entry is positive."""
    for v in (a, b, c, d):
        if abs(v) > ZERO_TOL:
            if v < 0:
                return -a, -b, -c, -d
            break
    return a, b, c, d


@dataclass(frozen=True)
class PSL2Element:
    mat: Matrix2
    word: Optional[Word] = None

    @classmethod
    def from_entries(cls, a, b, c, d, word=None) -> "PSL2Element":
        m = Matrix2(*normalize_entries(float(a), float(b), float(c), float(d)))
        if not m.check_det():
            raise ValueError(f"determinant {m.det()!r} is not 1")
        return cls(m, None if word is None else tuple(word))

    @property
    def trace(self) -> float:
        return self.mat.a + self.mat.d

    def normalize(self) -> "PSL2Element":
        return PSL2Element(Matrix2(*normalize_entries(*self.mat)), self.word)

    def __matmul__(self, other: "PSL2Element") -> "PSL2Element":
        return mul(self, other)


IDENTITY = PSL2Element(Matrix2(1.0, 0.0, 0.0, 1.0), ())


def mul(g: PSL2Element, h: PSL2Element) -> PSL2Element:
    a1, b1, c1, d1 = g.mat
    a2, b2, c2, d2 = h.mat
    m = normalize_entries(
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    )
    word = None
    if g.word is not None and h.word is not None:
        word = g.word + h.word
    return PSL2Element(Matrix2(*m), word)


def inverse(g: PSL2Element) -> PSL2Element:
    a, b, c, d = g.mat
    word = None if g.word is None else tuple(-x for x in reversed(g.word))
    return PSL2Element(Matrix2(*normalize_entries(d, -b, -c, a)), word)


def is_identity(g: PSL2Element, tol: float = IDENTITY_TOL) -> bool:
    a, b, c, d = g.mat
    return abs(a - 1) <= tol and abs(b) <= tol and abs(c) <= tol and abs(d - 1) <= tol


def classify(g: PSL2Element) -> str:
    """Return one of 'identity', 'elliptic', 'parabolic', 'hyperbolic'."""
    if is_identity(g):
        return "identity"
    t = abs(g.trace)
    if abs(t - 2.0) <= PARABOLIC_TOL:
        return "parabolic"
    return "elliptic" if t < 2.0 else "hyperbolic"


def norm_from_trace(t: float) -> Tuple[float, float]:
    t = abs(t)
    if t <= 2.0 + PARABOLIC_TOL:
        raise NonHyperbolic(f"|trace| = {t!r} is not > 2")
    # m + 1/m = t; write m = (t + sqrt(t^2-4))/2 without cancellation
    m = 0.5 * (t + math.sqrt((t - 2.0) * (t + 2.0)))
    return m * m, 2.0 * math.log(m)


def norm_and_length(g: PSL2Element) -> Tuple[float, float]:
    """Norm N = m^2 and translation length l = log N of a hyperbolic element."""
    return norm_from_trace(g.trace)


def acosh_clamped(x: float) -> float:
    if x < 1.0:
        if x < 1.0 - ACOSH_SLACK:
            raise ValueError(f"arccosh argument {x!r} below 1")
        return 0.0
    return math.acosh(x)


def origin_distance(g: PSL2Element) -> float:
    """Hyperbolic distance from i to g(i)."""
    return acosh_clamped(0.5 * g.mat.frobenius_sq())


def axis_distance(g: PSL2Element) -> float:
    """Distance from i to the axis of a hyperbolic element.

    Uses sinh(d/2) = cosh(rho) sinh(l/2), d the displacement of i.
    """
    _, l = norm_and_length(g)
    d = origin_distance(g)
    return acosh_clamped(math.sinh(0.5 * d) / math.sinh(0.5 * l))
