"""Pairings with a harmonic 1-form and the twisted Selberg zeta series.

A harmonic form is represented only by its periods over the generator basis
of H_1, so the pairing with a closed geodesic is an integer dot product.
Every series is summed over exactly the classes in the table, never over a
term count, so series evaluated together share one index set.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import mpmath
import numpy as np

from .enumerator import ClassTable, ConjClass
from .errors import DivergentRegion, InsufficientData, NonPositiveNorm
from .surface import abelianize

TAIL_MARGIN = 1.5
MIN_PRIMITIVE = 100


@dataclass(frozen=True)
class HarmonicForm:
    """A harmonic 1-form given by its periods over the generator basis."""

    periods: Tuple[float, ...]
    name: str = "alpha"
    allow_zero: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "periods", tuple(float(p) for p in self.periods))
        if not all(math.isfinite(p) for p in self.periods):
            raise ValueError("periods must be finite")
        if not self.allow_zero and not any(self.periods):
            raise ValueError("the harmonic form must be non-zero")

    def scaled(self, c: float) -> "HarmonicForm":
        return HarmonicForm(tuple(c * p for p in self.periods), self.name, self.allow_zero)

    def __neg__(self) -> "HarmonicForm":
        return self.scaled(-1.0)


@dataclass(frozen=True)
class SeriesValue:
    """A truncated series value with a heuristic bound on the omitted tail."""

    value: complex
    terms_used: int
    tail_bound: float
    rigorous: bool = False
    divergent: bool = False

    @property
    def real(self) -> float:
        return self.value.real

    def to_dict(self) -> dict:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "terms_used": self.terms_used,
            "tail_bound": self.tail_bound if math.isfinite(self.tail_bound) else None,
            "rigorous": self.rigorous,
            "divergent": self.divergent,
        }


# -- pairings ---------------------------------------------------------------------

def pairing(c, f: HarmonicForm) -> float:
    """<gamma, alpha> for a ConjClass or a word in the generators."""
    if isinstance(c, ConjClass):
        return class_pairing(c, f)
    return homology_pairing(abelianize(c, len(f.periods) // 2), f)


def class_pairing(c: ConjClass, f: HarmonicForm) -> float:
    """power * <root, alpha>, so that <g^m, alpha> = m <g, alpha> holds exactly."""
    root_h = tuple(v // c.power for v in c.homology)
    return c.power * homology_pairing(root_h, f)


def homology_pairing(h: Sequence[int], f: HarmonicForm) -> float:
    return math.fsum(float(a) * p for a, p in zip(h, f.periods))


def normalized_pairing(c: ConjClass, f: HarmonicForm, norm_alpha_sq: float, vol: float) -> float:
    """[gamma, alpha] = sqrt(vol / (2 |alpha|^2 l)) <gamma, alpha>."""
    return _normalize(class_pairing(c, f), c.l, norm_alpha_sq, vol)


def _normalize(p: float, l: float, norm_alpha_sq: float, vol: float) -> float:
    if not norm_alpha_sq > 0:
        raise NonPositiveNorm(f"|alpha|^2 must be positive, got {norm_alpha_sq!r}")
    if not vol > 0 or not l > 0:
        raise NonPositiveNorm("volume and length must be positive")
    return math.sqrt(vol / (2.0 * norm_alpha_sq * l)) * p


def character(c, eps: float, f: HarmonicForm) -> complex:
    """chi(gamma, eps) = exp(-i eps <gamma, alpha>)."""
    p = c if isinstance(c, float) else pairing(c, f)
    return cmath.exp(-1j * eps * p)


@dataclass
class _Arrays:
    """Per-class columns of a table, computed once per (table, form)."""

    l: np.ndarray
    logN0: np.ndarray
    p: np.ndarray
    power: np.ndarray
    primitive: np.ndarray


def _arrays(t: ClassTable, f: HarmonicForm) -> _Arrays:
    cache = t.__dict__.setdefault("_period_cache", {})
    hit = cache.get(f.periods)
    if hit is not None:
        return hit
    cs = t.classes
    l = np.array([c.l for c in cs], dtype=np.float64)
    power = np.array([c.power for c in cs], dtype=np.int64)
    # correctly rounded per class, so inverse classes get exactly opposite values
    # (a BLAS product may round rows differently)
    p = np.array([class_pairing(c, f) for c in cs], dtype=np.float64)
    arr = _Arrays(l, l / np.maximum(power, 1), p, power, power == 1)
    cache[f.periods] = arr
    return arr


def effective_norm_sq(t: ClassTable, f: HarmonicForm, T: float) -> float:
    """|alpha|^2 calibrated from the leading term of S_2(T) = (2/vol) |alpha|^2 T log T."""
    a = _arrays(t, f)
    sel = a.primitive & (a.l <= math.log(T) + 1e-12)
    if int(sel.sum()) < MIN_PRIMITIVE:
        raise InsufficientData(f"only {int(sel.sum())} primitive classes below T")
    s2 = math.fsum(ipow(a.p[sel], 2) * a.l[sel])
    return t.vol * s2 / (2.0 * T * math.log(T))


def eichler_diagnostics(t: ClassTable, f: HarmonicForm) -> Tuple[float, Optional[ConjClass]]:
    """max |<gamma, alpha>| / log N(gamma) over the table, and where it is attained."""
    if not t.classes:
        return 0.0, None
    a = _arrays(t, f)
    r = np.abs(a.p) / a.l
    j = int(np.argmax(r))
    return float(r[j]), t.classes[j]


def ipow(x: np.ndarray, n: int) -> np.ndarray:
    """x**n by repeated multiplication.

    numpy's vectorised pow is not exactly odd ((-x)**3 can differ from
    -(x**3) in the last bit), which would spoil exact cancellation.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.ones_like(x)
    for _ in range(n):
        out = out * x
    return out


# -- series -----------------------------------------------------------------------

def _csum(z: np.ndarray) -> complex:
    return complex(math.fsum(z.real), math.fsum(z.imag))


def _tail(x: float, a: float, k: float, scale: float = 1.0) -> float:
    """TAIL_MARGIN * scale * int_x^inf u^k e^{-a u} du."""
    if a <= 0:
        return math.inf
    v = mpmath.gammainc(k + 1, a * x) / mpmath.mpf(a) ** (k + 1)
    return float(TAIL_MARGIN * scale * v)


def _check(sigma: float, abscissa: float, name: str, strict: bool) -> bool:
    if sigma > abscissa:
        return False
    if strict:
        raise DivergentRegion(f"{name} needs Re(s) > {abscissa}, got {sigma}")
    return True


def _value(z, n, tail, divergent) -> SeriesValue:
    return SeriesValue(complex(z), int(n), math.inf if divergent else tail, False, divergent)


def E_series(s: complex, eps: float, t: ClassTable, f: HarmonicForm,
             strict: bool = False) -> SeriesValue:
    """E(s, eps) = sum over primitive classes of chi log N N^-s."""
    s = complex(s)
    div = _check(s.real, 1.0, "E", strict)
    a = _arrays(t, f)
    m = a.primitive
    terms = np.exp(-1j * eps * a.p[m] - s * a.l[m]) * a.l[m]
    return _value(_csum(terms), m.sum(), _tail(t.x_max, s.real - 1.0, 1.0), div)


def E_derivative(n: int, s: complex, t: ClassTable, f: HarmonicForm, eps: float = 0.0,
                 strict: bool = False) -> SeriesValue:
    """n-th eps-derivative of E: sum of (-i <gamma_0, alpha>)^n chi log N N^-s."""
    if n < 0:
        raise ValueError("derivative order must be non-negative")
    s = complex(s)
    div = _check(s.real, 1.0, "E^(n)", strict)
    a = _arrays(t, f)
    m = a.primitive
    p, l = a.p[m], a.l[m]
    terms = ((-1j) ** n * ipow(p, n)) * np.exp(-1j * eps * p - s * l) * l
    c = eichler_diagnostics(t, f)[0]
    # inverse pairs share lengths exactly, so fsum cancels odd orders to 0 at real s
    return _value(_csum(terms), m.sum(), _tail(t.x_max, s.real - 1.0, 1.0 + n, c ** n), div)


def A1_series(s: complex, eps: float, t: ClassTable, f: HarmonicForm,
              strict: bool = False) -> SeriesValue:
    """Sum over all classes of chi(gamma) log N(gamma_0) / (N^s (N - 1))."""
    s = complex(s)
    div = _check(s.real, 0.0, "A1", strict)
    a = _arrays(t, f)
    terms = np.exp(-1j * eps * a.p - s * a.l) * a.logN0 / np.expm1(a.l)
    return _value(_csum(terms), len(a.l), _tail(t.x_max, s.real, 1.0), div)


def A2_series(s: complex, eps: float, t: ClassTable, f: HarmonicForm,
              strict: bool = False) -> SeriesValue:
    """Sum over primitive classes of log N chi^2 N^-2s / (1 - chi N^-s)."""
    s = complex(s)
    div = _check(s.real, 0.5, "A2", strict)
    a = _arrays(t, f)
    m = a.primitive
    z = np.exp(-1j * eps * a.p[m] - s * a.l[m])
    terms = a.l[m] * z * z / (1.0 - z)
    scale = 1.0 / max(1e-300, 1.0 - math.exp(-s.real * t.systole))
    return _value(_csum(terms), m.sum(), _tail(t.x_max, 2.0 * s.real - 1.0, 1.0, scale), div)


def zeta_log_deriv_direct(s: complex, eps: float, t: ClassTable, f: HarmonicForm,
                          m_max: int = 30, strict: bool = False) -> SeriesValue:
    """Z'/Z expanded as a double sum over primitive classes and powers m <= m_max."""
    if m_max < 1:
        raise ValueError("m_max must be positive")
    s = complex(s)
    div = _check(s.real, 1.0, "Z'/Z", strict)
    a = _arrays(t, f)
    m = a.primitive
    p, l = a.p[m], a.l[m]
    ms = np.arange(1, m_max + 1)[:, None]
    terms = np.exp(ms * (-1j * eps * p - s * l)) * l / (-np.expm1(-ms * l))
    tail = (_tail(t.x_max, s.real - 1.0, 1.0) + _tail(t.x_max, s.real, 1.0)
            + _tail(t.x_max, 2.0 * s.real - 1.0, 1.0, 2.0))
    return _value(_csum(terms.ravel()), terms.size, tail, div)


def zeta_partial_log(s: complex, eps: float, t: ClassTable, f: HarmonicForm,
                     k_max: int = 60, strict: bool = False) -> SeriesValue:
    """log of the truncated product: sum of log(1 - chi N^{-s-k}), k = 0..k_max."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    s = complex(s)
    div = _check(s.real, 1.0, "Z", strict)
    a = _arrays(t, f)
    m = a.primitive
    p, l = a.p[m], a.l[m]
    ks = np.arange(0, k_max + 1)[:, None]
    z = np.exp(-1j * eps * p - (s + ks) * l)
    terms = np.log1p(-z)
    tail = _tail(t.x_max, s.real - 1.0, 0.0, 2.0)
    return _value(_csum(terms.ravel()), terms.size, tail, div)


def zeta_partial_product(s: complex, eps: float, t: ClassTable, f: HarmonicForm,
                         k_max: int = 60, strict: bool = False) -> SeriesValue:
    """The product over primitive classes and k = 0..k_max of (1 - chi N^{-s-k})."""
    lg = zeta_partial_log(s, eps, t, f, k_max, strict)
    val = cmath.exp(lg.value)
    return SeriesValue(val, lg.terms_used, abs(val) * math.expm1(lg.tail_bound)
                       if math.isfinite(lg.tail_bound) else math.inf, False, lg.divergent)


def partial_product_log_derivative(s: complex, eps: float, t: ClassTable, f: HarmonicForm,
                                   k_max: int = 60, h: float = 1e-4) -> complex:
    """Central difference in s of the log of the truncated product."""
    up = zeta_partial_log(complex(s) + h, eps, t, f, k_max).value
    dn = zeta_partial_log(complex(s) - h, eps, t, f, k_max).value
    return (up - dn) / (2.0 * h)


def splitting_residual(s: complex, eps: float, t: ClassTable, f: HarmonicForm,
                       m_max: int = 30) -> Tuple[float, float]:
    """|E + A1 + A2 - Z'/Z| and the combined tail bound of the four series."""
    parts = [E_series(s, eps, t, f), A1_series(s, eps, t, f), A2_series(s, eps, t, f)]
    direct = zeta_log_deriv_direct(s, eps, t, f, m_max)
    total = sum(v.value for v in parts)
    return abs(total - direct.value), sum(v.tail_bound for v in parts) + direct.tail_bound
