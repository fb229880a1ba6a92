"""Ball enumeration and reduction to conjugacy classes.

Every element with translation length at most x moves i by at most x + 2B,
where B bounds the distance from i to any point of the fundamental octagon.
So the classes with l <= x are all represented inside the ball of radius
x + 2B, and among those representatives we only need the ones whose axis
passes near i.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import cutting, kernels
from .errors import (
    CapacityExceeded,
    CorruptRow,
    FormatVersionMismatch,
    InvariantClash,
)
from .hyperbolic import PSL2Element, norm_from_trace
from .surface import (
    FLOAT_LENGTH_LIMIT,
    SurfaceGroup,
    abelianize,
    bolza,
    format_word,
    inverse_key,
    least_rotation,
    parse_word,
    primitive_root,
)

DEFAULT_SLACK = 0.05
DEFAULT_CAP = 50_000_000
TRACE_CLASH_TOL = 1e-6
FORMAT_VERSION = "v1"
COLUMNS = ("key_word", "trace", "N", "l", "primitive", "power", "root_word",
           "h1", "h2", "h3", "h4")


def default_B(group: SurfaceGroup, slack: float = DEFAULT_SLACK) -> float:
    return group.circumradius + slack


def _generator_rows(group: SurfaceGroup) -> np.ndarray:
    return np.array([group.generator(cutting.LETTER[k]).mat for k in range(8)],
                    dtype=np.float64)


@dataclass
class ElementTable:
    """All elements g with d(i, g i) <= radius, stored as a BFS tree.

    Row j of ``mats`` is ``mats[parent[j]] * g_{side[j]}``, which gives every
    element a word witness without storing words.
    """

    group: SurfaceGroup
    radius: float
    mats: np.ndarray
    parent: np.ndarray
    side: np.ndarray
    _index: Optional[dict] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.mats)

    def word(self, j: int) -> Tuple[int, ...]:
        letters = []
        while j > 0:
            letters.append(cutting.LETTER[int(self.side[j])])
            j = int(self.parent[j])
        return tuple(reversed(letters))

    def element(self, j: int) -> PSL2Element:
        return PSL2Element.from_entries(*self.mats[j], word=self.word(j))

    def traces(self) -> np.ndarray:
        return np.abs(self.mats[:, 0] + self.mats[:, 3])

    def origin_distances(self) -> np.ndarray:
        half = 0.5 * np.einsum("ij,ij->i", self.mats, self.mats)
        return np.arccosh(np.maximum(half, 1.0))

    def find(self, m) -> int:
        """Index of the element equal to m (any sign), or -1."""
        if self._index is None:
            self._index = _build_index(self.mats, range(len(self.mats)))
        return _lookup(self._index, self.mats, m)


def enumerate_ball(group: SurfaceGroup, x: float, B: Optional[float] = None,
                   cap: int = DEFAULT_CAP) -> ElementTable:
    """Elements within distance x + 2B of i (B defaults to circumradius + slack)."""
    if x <= 0:
        raise ValueError("x must be positive")
    if B is None:
        B = default_B(group)
    radius = x + 2.0 * B
    mats, parent, side = kernels.ball_bfs(_generator_rows(group), radius, int(cap))
    return ElementTable(group, radius, mats, parent, side)


# -- approximate matrix lookup ---------------------------------------------------

_CELL = 1e-6
_MATCH_TOL = 1e-6


def _cell(m):
    return tuple(math.floor(v / _CELL) for v in m)


def _sign_fix(m):
    for v in m:
        if v > 1e-10:
            return tuple(float(u) for u in m)
        if v < -1e-10:
            return tuple(-float(u) for u in m)
    return tuple(float(u) for u in m)


def _build_index(mats, rows) -> dict:
    index: dict = {}
    for j in rows:
        index.setdefault(_cell(mats[j]), []).append(j)
    return index


def _lookup(index, mats, m) -> int:
    m = _sign_fix(m)
    base = _cell(m)
    for da in (0, -1, 1):
        for db in (0, -1, 1):
            for dc in (0, -1, 1):
                for dd in (0, -1, 1):
                    key = (base[0] + da, base[1] + db, base[2] + dc, base[3] + dd)
                    for j in index.get(key, ()):
                        if all(abs(mats[j][t] - m[t]) <= _MATCH_TOL for t in range(4)):
                            return j
    return -1


# -- conjugacy classes -------------------------------------------------------------

@dataclass(frozen=True)
class ConjClass:
    """One oriented closed geodesic."""

    key: Tuple[int, ...]
    trace: float
    N: float
    l: float
    primitive: bool
    power: int
    root_key: Tuple[int, ...]
    homology: Tuple[int, ...]


@dataclass
class ClassTable:
    classes: List[ConjClass]
    x_max: float
    group_name: str = "bolza"
    slack: float = DEFAULT_SLACK
    genus: int = 2
    vol: float = 4.0 * math.pi
    systole: float = 2.0 * math.acosh(1.0 + math.sqrt(2.0))
    element_count: int = 0

    def __len__(self) -> int:
        return len(self.classes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClassTable):
            return NotImplemented
        return (self.classes == other.classes and self.x_max == other.x_max
                and self.group_name == other.group_name and self.slack == other.slack)

    def primitives(self) -> List[ConjClass]:
        return [c for c in self.classes if c.primitive]

    def by_key(self) -> Dict[Tuple[int, ...], ConjClass]:
        return {c.key: c for c in self.classes}

    def lengths(self, primitive_only: bool = False) -> np.ndarray:
        cs = self.primitives() if primitive_only else self.classes
        return np.array([c.l for c in cs])

    def min_length(self) -> float:
        return min((c.l for c in self.classes), default=float("nan"))


def _hyperbolic_candidates(elems: ElementTable, x: float, axis_radius: float) -> np.ndarray:
    """Rows that are hyperbolic, have l <= x and an axis within axis_radius of i."""
    t = elems.traces()
    hyp = t > 2.0 + 1e-9
    l = np.zeros_like(t)
    l[hyp] = 2.0 * np.arccosh(t[hyp] / 2.0)
    keep = hyp & (l <= x + 1e-9)
    idx = np.nonzero(keep)[0]
    if len(idx) == 0:
        return idx
    half = 0.5 * np.einsum("ij,ij->i", elems.mats[idx], elems.mats[idx])
    d = np.arccosh(np.maximum(half, 1.0))
    ratio = np.sinh(0.5 * d) / np.sinh(0.5 * l[idx])
    idx = idx[ratio <= math.cosh(axis_radius) * (1 + 1e-9)]
    # the walks visit exactly the conjugates whose pushed axis crosses F
    return idx[kernels.crossing_mask(elems.mats[idx])]


def _walk(group: SurfaceGroup, elems: ElementTable, j: int, l: float):
    if l <= FLOAT_LENGTH_LIMIT:
        letters, visited = kernels.cutting_sequence(*elems.mats[j], l)
        return letters, visited
    dps = 30 + int(l / 2.0)
    ctx = cutting.TilingContext(dps)
    a, b, c, d = group.evaluate_precise(elems.word(j), dps)
    letters, visited = cutting.cutting_sequence(ctx, a, b, c, d, l)
    return letters, [tuple(float(v) for v in m) for m in visited]


def build_class_table(elems: ElementTable, x: float,
                      slack: float = DEFAULT_SLACK) -> ClassTable:
    """One ConjClass per oriented closed geodesic with l <= x."""
    group = elems.group
    if elems.radius < x + 2.0 * group.circumradius - 1e-12:
        raise ValueError("element table radius is too small for this x")
    cand = _hyperbolic_candidates(elems, x, group.circumradius + slack)
    index = _build_index(elems.mats, cand)
    done = np.zeros(len(elems), dtype=bool)
    found: Dict[Tuple[int, ...], ConjClass] = {}
    root_len: Dict[Tuple[int, ...], float] = {}
    for j in cand:
        if done[j]:
            continue
        done[j] = True
        t = abs(float(elems.mats[j, 0] + elems.mats[j, 3]))
        N, l = norm_from_trace(t)
        letters, visited = _walk(group, elems, j, l)
        for m in visited:
            k = _lookup(index, elems.mats, m)
            if k >= 0:
                done[k] = True
        root = least_rotation(letters)
        if root not in root_len:
            root_len[root] = norm_from_trace(group.evaluate(root).trace)[1]
        power = max(1, round(l / root_len[root]))
        key = least_rotation(root * power)
        prev = found.get(key)
        if prev is not None:
            if abs(prev.trace - t) > TRACE_CLASH_TOL * max(1.0, t):
                raise InvariantClash(
                    f"class {format_word(key)} seen with traces {prev.trace!r} and {t!r}")
            continue
        h = tuple(power * v for v in abelianize(root, group.genus))
        found[key] = ConjClass(key, t, N, l, power == 1, power, root, h)
    classes = sorted(_share_inverse_lengths(group, found).values(), key=lambda c: (c.l, c.key))
    return ClassTable(classes, float(x), "bolza", float(slack), group.genus, group.vol,
                      group.systole, len(elems))


def _share_inverse_lengths(group, found):
    """Give each inverse pair bit-identical trace, N and l.

    The two classes are measured on different representatives, so their
    lengths can differ in the last bit; sharing them makes odd sums over
    all classes cancel exactly.
    """
    out = dict(found)
    for key, c in found.items():
        inv_key = inverse_key(group, key)
        inv = out.get(inv_key)
        if inv is None:
            raise InvariantClash(f"inverse of class {format_word(key)} is missing")
        if key < inv_key:
            out[inv_key] = ConjClass(inv_key, c.trace, c.N, c.l, inv.primitive, inv.power,
                                     inv.root_key, inv.homology)
    return out


def build_table(x: float, slack: float = DEFAULT_SLACK, cap: int = DEFAULT_CAP,
                group: Optional[SurfaceGroup] = None) -> ClassTable:
    """Enumerate and reduce in one call."""
    group = group or bolza()
    elems = enumerate_ball(group, x, default_B(group, slack), cap)
    return build_class_table(elems, x, slack)


# -- persistence -------------------------------------------------------------------

def _fmt(v: float) -> str:
    return repr(float(v)) if math.isfinite(v) else str(v)


def _header(t: ClassTable) -> str:
    return (f"# geodesic-classes {FORMAT_VERSION}; group={t.group_name}; "
            f"x_max={_fmt(t.x_max)}; slack={_fmt(t.slack)}")


def format_float(v: float) -> str:
    return f"{v:.17g}"


def save_table(t: ClassTable, path) -> None:
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_header(t) + "\n")
        fh.write(",".join(COLUMNS) + "\n")
        for c in t.classes:
            row = [
                '"' + format_word(c.key) + '"',
                format_float(c.trace),
                format_float(c.N),
                format_float(c.l),
                "1" if c.primitive else "0",
                str(c.power),
                '"' + format_word(c.root_key) + '"',
            ] + [str(v) for v in c.homology]
            fh.write(",".join(row) + "\n")
    os.replace(tmp, path)


def _parse_header(line: str) -> dict:
    if not line.startswith("# geodesic-classes "):
        raise FormatVersionMismatch("missing geodesic-classes header")
    parts = [p.strip() for p in line[len("# geodesic-classes "):].split(";")]
    if parts[0] != FORMAT_VERSION:
        raise FormatVersionMismatch(f"unsupported table version {parts[0]!r}")
    meta = {}
    for p in parts[1:]:
        if "=" not in p:
            raise FormatVersionMismatch(f"malformed header field {p!r}")
        k, v = p.split("=", 1)
        meta[k.strip()] = v.strip()
    for k in ("group", "x_max", "slack"):
        if k not in meta:
            raise FormatVersionMismatch(f"header lacks {k}")
    return meta


def read_header(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return _parse_header(fh.readline().rstrip("\n"))


def _split_row(line: str) -> List[str]:
    out, cur, quoted = [], [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "," and not quoted:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if quoted:
        raise ValueError("unterminated quote")
    out.append("".join(cur))
    return out


def _parse_row(fields: List[str], genus: int) -> ConjClass:
    if len(fields) != len(COLUMNS):
        raise ValueError(f"expected {len(COLUMNS)} fields, got {len(fields)}")
    key = parse_word(fields[0])
    trace, N, l = float(fields[1]), float(fields[2]), float(fields[3])
    if fields[4] not in ("0", "1"):
        raise ValueError(f"bad primitive flag {fields[4]!r}")
    primitive = fields[4] == "1"
    power = int(fields[5])
    root = parse_word(fields[6])
    h = tuple(int(v) for v in fields[7:])
    if not key or not root:
        raise ValueError("empty word")
    if power < 1 or primitive != (power == 1):
        raise ValueError("primitive flag disagrees with power")
    if least_rotation(root * power) != key:
        raise ValueError("key is not the power of its root")
    if primitive_root(root)[1] != 1:
        raise ValueError("root word is a proper power")
    if abs(math.cosh(l / 2) - trace / 2) > 1e-9 * trace or abs(math.log(N) - l) > 1e-9 * max(1.0, l):
        raise ValueError("trace, N and l are inconsistent")
    if h != tuple(power * v for v in abelianize(root, genus)):
        raise ValueError("homology does not match the root word")
    return ConjClass(key, trace, N, l, primitive, power, root, h)


def load_table(path) -> ClassTable:
    """Read and validate a class table written by save_table."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    meta = _parse_header(lines[0])
    if len(lines) < 2 or lines[1] != ",".join(COLUMNS):
        raise CorruptRow(2, "missing or wrong column header")
    if lines[-1] != "":
        raise CorruptRow(len(lines), "truncated row (no trailing newline)")
    genus = 2
    classes = []
    for n, line in enumerate(lines[2:-1], start=3):
        try:
            classes.append(_parse_row(_split_row(line), genus))
        except ValueError as exc:
            raise CorruptRow(n, str(exc)) from None
    x_max = float(meta["x_max"])
    for n, c in enumerate(classes, start=3):
        if c.l > x_max + 1e-9:
            raise CorruptRow(n, f"length {c.l!r} exceeds x_max")
    if any(a.l > b.l for a, b in zip(classes, classes[1:])):
        raise CorruptRow(2, "rows are not sorted by length")
    if len({c.key for c in classes}) != len(classes):
        raise CorruptRow(2, "duplicate class keys")
    return ClassTable(classes, x_max, meta["group"], float(meta["slack"]), genus)
