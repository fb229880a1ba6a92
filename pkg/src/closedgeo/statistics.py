"""Summatory sums, moments, Gaussian comparison and prime geodesic counts."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import erfc

from .enumerator import ClassTable, format_float
from .errors import DegenerateSample, InsufficientData
from .periods import HarmonicForm, _arrays, effective_norm_sq, ipow

MIN_SAMPLES = 100
N_MAX = 8
HIST_BINS = 41
HIST_RANGE = 4.0


def gaussian_moment(n: int) -> float:
    """E[Z^n] for a standard normal: (2m)!/(m! 2^m) for n = 2m, else 0."""
    if n % 2:
        return 0.0
    m = n // 2
    return math.factorial(2 * m) / (math.factorial(m) * 2 ** m)


def normal_cdf(x):
    """Standard normal CDF through erfc, accurate to ~1e-16 absolute."""
    return 0.5 * erfc(-np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def _select(t: ClassTable, f: HarmonicForm, T: float, primitive_only: bool):
    a = _arrays(t, f)
    sel = a.l <= math.log(T) + 1e-12
    if primitive_only:
        sel = sel & a.primitive
    return a, sel


def _check_T(t: ClassTable, T: float) -> None:
    if math.log(T) > t.x_max + 1e-9:
        raise InsufficientData(
            f"log T = {math.log(T):.6g} exceeds the table's x_max = {t.x_max:.6g}; "
            f"rebuild with --x-max {math.ceil(math.log(T))}")


def summatory(n: int, T: float, t: ClassTable, f: HarmonicForm,
              primitive_only: bool = True) -> float:
    """S_n(T): sum of <gamma, alpha>^n log N(gamma_0) over classes with N <= T.

    Over all classes the weight is the log norm of the primitive root, so
    powers enter like prime powers in the Chebyshev function.
    """
    _check_T(t, T)
    a, sel = _select(t, f, T, primitive_only)
    return math.fsum(ipow(a.p[sel], n) * a.logN0[sel])


@dataclass
class MomentReport:
    T: float
    n_max: int
    raw_moments: List[float]
    summatory: List[float]
    targets: List[float]
    count: int
    norm_mode: str
    norm_sq: float
    all_classes: bool = False

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "log_T": math.log(self.T),
            "n_max": self.n_max,
            "M": self.raw_moments,
            "S": self.summatory,
            "gaussian": self.targets,
            "count": self.count,
            "norm_mode": self.norm_mode,
            "norm_sq": self.norm_sq,
            "all_classes": self.all_classes,
        }


def normalized_samples(t: ClassTable, f: HarmonicForm, T: float, norm_sq: float,
                       primitive_only: bool = True) -> np.ndarray:
    """[gamma, alpha] over classes with N(gamma) <= T, in table order."""
    a, sel = _select(t, f, T, primitive_only)
    if not norm_sq > 0:
        from .errors import NonPositiveNorm

        raise NonPositiveNorm(f"|alpha|^2 must be positive, got {norm_sq!r}")
    return np.sqrt(t.vol / (2.0 * norm_sq * a.l[sel])) * a.p[sel]


def moments(T: float, t: ClassTable, f: HarmonicForm, norm_sq: Optional[float] = None,
            n_max: int = N_MAX, primitive_only: bool = True) -> MomentReport:
    """Empirical moments of [gamma_0, alpha] over N(gamma_0) <= T.

    ``norm_sq=None`` calibrates |alpha|^2 with effective_norm_sq at the same T.
    """
    _check_T(t, T)
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    mode = "user"
    if norm_sq is None:
        norm_sq = effective_norm_sq(t, f, T)
        mode = "effective"
    x = normalized_samples(t, f, T, norm_sq, primitive_only)
    if len(x) < MIN_SAMPLES:
        raise InsufficientData(f"only {len(x)} classes below T")
    raw = [math.fsum(ipow(x, n)) / len(x) for n in range(n_max + 1)]
    S = [summatory(n, T, t, f, primitive_only) for n in range(n_max + 1)]
    targets = [gaussian_moment(n) for n in range(n_max + 1)]
    return MomentReport(T, n_max, raw, S, targets, len(x), mode, norm_sq, not primitive_only)


def sample_moments(samples: Sequence[float], n_max: int = 6) -> List[float]:
    x = np.asarray(samples, dtype=np.float64)
    if len(x) == 0:
        raise InsufficientData("no samples")
    return [math.fsum(ipow(x, n)) / len(x) for n in range(n_max + 1)]


def moment_ratio_check(report) -> List[Tuple[int, float, float]]:
    """(2m, M_2m / M_2^m, (2m)!/(m! 2^m)) for m = 2, 3, ... up to n_max.

    Accepts a MomentReport or a plain list of raw moments.  The ratios do not
    depend on how |alpha|^2 was calibrated.
    """
    M = report.raw_moments if isinstance(report, MomentReport) else list(report)
    if not M[2] > 0:
        raise DegenerateSample("second moment is zero")
    out = []
    for m in range(2, (len(M) - 1) // 2 + 1):
        out.append((2 * m, M[2 * m] / M[2] ** m, gaussian_moment(2 * m)))
    return out


def studentize(samples) -> np.ndarray:
    """Divide by the sample standard deviation (samples are not re-centred)."""
    x = np.asarray(samples, dtype=np.float64)
    if len(x) < 2:
        raise InsufficientData("need at least two samples")
    sd = float(np.std(x))
    if not sd > 0:
        raise DegenerateSample("sample has zero variance")
    return x / sd


def ks_against_gaussian(samples) -> float:
    """Kolmogorov-Smirnov distance between studentized samples and Phi."""
    z = np.sort(studentize(samples))
    n = len(z)
    cdf = normal_cdf(z)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


def histogram(z, bins: int = HIST_BINS, lim: float = HIST_RANGE):
    """Counts on [-lim, lim] with outliers clipped into the end bins."""
    edges = np.linspace(-lim, lim, bins + 1)
    counts, _ = np.histogram(np.clip(z, -lim, lim), bins=edges)
    centres = 0.5 * (edges[:-1] + edges[1:])
    density = np.exp(-0.5 * centres ** 2) / math.sqrt(2.0 * math.pi)
    return edges, counts, density


def pgt_check(t: ClassTable, x_grid: Sequence[float]) -> List[Tuple[float, int, float, float]]:
    """(x, pi(x), e^x/x, ratio) with pi counting primitive oriented classes."""
    lp = np.sort(t.lengths(primitive_only=True))
    out = []
    for x in x_grid:
        x = float(x)
        if x > t.x_max + 1e-9:
            raise InsufficientData(
                f"x = {x:g} exceeds the table's x_max = {t.x_max:g}; rebuild with --x-max {x:g}")
        pi = int(np.searchsorted(lp, x + 1e-12, side="right"))
        li = math.exp(x) / x
        out.append((x, pi, li, pi / li))
    return out


def prime_power_roundtrip(n: int, T: float, t: ClassTable, f: HarmonicForm):
    """(phi_n(T), Pi_n(T), reconstruction of phi_n from Pi_n at T^(1/m)).

    phi_n sums <gamma, alpha>^n over all classes with N <= T and Pi_n over the
    primitive ones; since <gamma_0^m, alpha> = m <gamma_0, alpha> the two are
    related by phi_n(T) = sum over m of m^n Pi_n(T^(1/m)).
    """
    _check_T(t, T)
    a = _arrays(t, f)
    logT = math.log(T)
    phi = math.fsum(ipow(a.p[a.l <= logT + 1e-12], n))

    def Pi(log_bound):
        sel = a.primitive & (a.l <= log_bound + 1e-12)
        return math.fsum(ipow(a.p[sel], n))

    pi = Pi(logT)
    m_top = int(logT / t.systole) if t.systole > 0 else 1
    recon = math.fsum([pi] + [m ** n * Pi(logT / m) for m in range(2, m_top + 1)])
    return phi, pi, recon


@dataclass
class DistributionReport:
    T_grid: List[float]
    sample_sizes: List[int]
    ks: List[float]
    central_mass: List[float]
    edges: List[float]
    counts: List[List[int]]
    gauss_density: List[float]

    def to_dict(self) -> dict:
        return {
            "T_grid": self.T_grid,
            "sample_sizes": self.sample_sizes,
            "ks": self.ks,
            "central_mass": self.central_mass,
            "edges": self.edges,
            "counts": self.counts,
            "gauss_density": self.gauss_density,
        }


def distribution_report(t: ClassTable, f: HarmonicForm, T_grid: Sequence[float],
                        bins: int = HIST_BINS, primitive_only: bool = True,
                        norm_sq: Optional[float] = None) -> DistributionReport:
    """Histogram, KS distance and central mass of studentized [gamma, alpha] per T."""
    sizes, ks, mass, all_counts = [], [], [], []
    edges = density = None
    for T in T_grid:
        _check_T(t, T)
        # any positive norm works: studentization removes the scale
        z = normalized_samples(t, f, T, norm_sq or 1.0, primitive_only)
        if len(z) < MIN_SAMPLES:
            raise InsufficientData(f"only {len(z)} classes below T = {T:g}")
        z = studentize(z)
        edges, counts, density = histogram(z, bins)
        sizes.append(len(z))
        ks.append(ks_against_gaussian(z))
        mass.append(float(np.count_nonzero(np.abs(z) <= 1.0)) / len(z))
        all_counts.append([int(c) for c in counts])
    return DistributionReport(list(map(float, T_grid)), sizes, ks, mass,
                              [] if edges is None else edges.tolist(), all_counts,
                              [] if density is None else density.tolist())


# -- export -------------------------------------------------------------------------

def dumps_json(obj, indent: int = 2) -> str:
    """JSON with every float printed at 17 significant digits."""
    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, bool) or o is None:
            return "true" if o is True else "false" if o is False else "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            v = float(o)
            return format_float(v) if math.isfinite(v) else "null"
        if isinstance(o, str):
            import json

            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{enc(str(k), 0)}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            if len(o) == 0:
                return "[]"
            if all(isinstance(v, (int, float, np.integer, np.floating)) for v in o):
                return "[" + ", ".join(enc(v, 0) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        raise TypeError(f"cannot encode {type(o).__name__}")

    return enc(obj, 0) + "\n"


def stats_report(t: ClassTable, f: HarmonicForm, T_grid: Sequence[float],
                 n_max: int = N_MAX, bins: int = HIST_BINS, primitive_only: bool = True,
                 norm_sq: Optional[float] = None) -> Dict:
    """The full statistics report as a JSON-ready dict."""
    T_top = max(T_grid)
    rep = moments(T_top, t, f, norm_sq, n_max, primitive_only)
    dist = distribution_report(t, f, T_grid, bins, primitive_only, norm_sq)
    pgt = pgt_check(t, [math.log(T) for T in T_grid])
    ratios = moment_ratio_check(rep)
    return {
        "group": t.group_name,
        "x_max": t.x_max,
        "form": {"periods": list(f.periods)},
        "T_grid": list(map(float, T_grid)),
        "all_classes": not primitive_only,
        "pgt": [{"x": x, "pi": pi, "li": li, "ratio": r} for x, pi, li, r in pgt],
        "moments": rep.to_dict(),
        "moment_ratios": {f"M{n}/M2^{n // 2}": {"ratio": r, "target": g}
                          for n, r, g in ratios},
        "ks": dist.ks,
        "central_mass": dist.central_mass,
        "sample_sizes": dist.sample_sizes,
        "histogram": {"edges": dist.edges, "counts": dist.counts[-1],
                      "gauss_density": dist.gauss_density},
        "histograms": dist.counts,
    }


def export_class_csv(t: ClassTable, f: HarmonicForm, path, norm_sq: float) -> None:
    """Per-class rows (l, N, pairing, normalized value) for external plotting."""
    a = _arrays(t, f)
    z = np.sqrt(t.vol / (2.0 * norm_sq * a.l)) * a.p
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["l", "N", "primitive", "pairing", "normalized"])
        for c, p, v in zip(t.classes, a.p, z):
            w.writerow([format_float(c.l), format_float(c.N), int(c.primitive),
                        format_float(p), format_float(v)])


def export_histogram_csv(report: DistributionReport, path) -> None:
    """Bin edges, counts per T and the Gaussian overlay, one row per bin."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["left", "right", "gauss_density"]
                   + [f"count_logT_{math.log(T):.6g}" for T in report.T_grid])
        for k in range(len(report.gauss_density)):
            w.writerow([format_float(report.edges[k]), format_float(report.edges[k + 1]),
                        format_float(report.gauss_density[k])]
                       + [c[k] for c in report.counts])
