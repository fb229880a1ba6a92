import math
import random

import numpy as np
import pytest

from closedgeo.enumerator import (
    ClassTable,
    build_class_table,
    build_table,
    default_B,
    enumerate_ball,
    load_table,
    read_header,
    save_table,
)
from closedgeo.errors import CorruptRow, FormatVersionMismatch
from closedgeo.surface import abelianize, inverse_key, least_rotation
from oracles import conjugacy_components


def test_identity_only_ball(group):
    # smallest nontrivial displacement of i is the systole for the octagon centre
    elems = enumerate_ball(group, 0.5, B=0.25)
    assert len(elems) == 1
    assert np.allclose(elems.mats[0], (1, 0, 0, 1))


def test_growth_constant(group):
    elems = enumerate_ball(group, 12.0 - 2 * default_B(group))
    d = elems.origin_distances()
    ratios = [np.count_nonzero(d <= r + 1e-9) / math.exp(r) for r in (8.0, 10.0, 12.0)]
    assert max(ratios) / min(ratios) <= 1.10
    # hyperbolic area of the ball over the area of the octagon
    assert ratios[-1] == pytest.approx(math.pi / group.vol, rel=0.1)


def test_ball_closure(group):
    elems = enumerate_ball(group, 4.0)
    rng = random.Random(3)
    limit = 2 * math.cosh(elems.radius)
    checked = 0
    while checked < 1000:
        g = elems.mats[rng.randrange(len(elems))]
        h = elems.mats[rng.randrange(len(elems))]
        a, b, c, d = g
        e, f, p, q = h
        m = (a * e + b * p, a * f + b * q, c * e + d * p, c * f + d * q)
        if sum(v * v for v in m) > limit - 1e-6:
            continue
        assert elems.find(m) >= 0
        checked += 1


def test_inversion_closed_and_dedup(group):
    elems = enumerate_ball(group, 5.0)
    mats = elems.mats
    for j in range(0, len(mats), 97):
        a, b, c, d = mats[j]
        assert elems.find((d, -b, -c, a)) >= 0
    key = np.round(mats / 1e-6).astype(np.int64)
    assert len(np.unique(key, axis=0)) == len(mats)
    # no two rows within 1e-6 entrywise: sort and compare neighbours on first entry
    order = np.lexsort(mats.T[::-1])
    s = mats[order]
    close = np.all(np.abs(np.diff(s, axis=0)) < 1e-6, axis=1)
    assert not close.any()


def test_systole_count_oracle(group, table8):
    """Count systolic classes by brute force conjugation, no cutting sequences."""
    s = group.systole
    ar = group.circumradius + 1.0
    elems = enumerate_ball(group, s + 0.01, B=ar + 0.5)
    comps, _ = conjugacy_components(elems, s + 1e-6, ar)
    at_systole = [c for c in table8.classes if abs(c.l - s) < 1e-9]
    assert len(comps) == len(at_systole) == 24
    assert table8.min_length() == pytest.approx(s, abs=1e-9)


def test_class_counts_match_oracle(group):
    x = 6.0
    ar = group.circumradius + 1.0
    elems = enumerate_ball(group, x, B=ar + 0.5)
    comps, l = conjugacy_components(elems, x, ar)
    t = build_table(x)
    assert len(comps) == len(t)
    oracle = sorted(round(float(l[c[0]]), 8) for c in comps)
    assert oracle == sorted(round(c.l, 8) for c in t.classes)


def test_class_invariants(group, table10):
    t = table10
    keys = t.by_key()
    for c in t.classes:
        assert math.cosh(c.l / 2) == pytest.approx(c.trace / 2, rel=1e-9)
        assert c.l == pytest.approx(math.log(c.N), rel=1e-12)
        assert c.primitive == (c.power == 1)
        assert least_rotation(c.root_key * c.power) == c.key
        root = keys[c.root_key]
        assert root.primitive
        assert root.N ** c.power == pytest.approx(c.N, rel=1e-7)
        assert c.homology == tuple(c.power * v for v in abelianize(c.root_key))
    assert all(a.l <= b.l for a, b in zip(t.classes, t.classes[1:]))
    assert t.min_length() > 0


def test_class_count_at_10(table10):
    n = len(table10.primitives())
    target = math.exp(10) / 10
    assert abs(n / target - 1) <= 0.2


def test_inverse_involution(group, table10):
    keys = table10.by_key()
    for c in table10.classes:
        inv = keys[inverse_key(group, c.key)]
        assert inverse_key(group, inv.key) == c.key
        assert inv.l == c.l and inv.trace == c.trace
        assert inv.homology == tuple(-v for v in c.homology)
        assert inv.power == c.power


def test_completeness_larger_ball(group, table8):
    bigger = build_class_table(enumerate_ball(group, 8.0, B=default_B(group) + 0.5), 8.0)
    assert [c.key for c in bigger.classes] == [c.key for c in table8.classes]


def test_pi_monotone(table10):
    ls = table10.lengths(primitive_only=True)
    counts = [np.count_nonzero(ls <= x) for x in np.linspace(3, 10, 50)]
    assert counts == sorted(counts)
    assert np.count_nonzero(ls <= 3.0) == 0


def test_round_trip(tmp_path, table8):
    p = tmp_path / "t.csv"
    save_table(table8, p)
    assert load_table(p) == table8
    meta = read_header(p)
    assert meta["group"] == "bolza" and float(meta["x_max"]) == 8.0
    first = p.read_text().split("\n")[0]
    assert first == "# geodesic-classes v1; group=bolza; x_max=8.0; slack=0.05"


def test_truncated_file(tmp_path, table8):
    p = tmp_path / "t.csv"
    save_table(table8, p)
    text = p.read_text()
    p.write_text(text[: len(text) // 2])
    with pytest.raises(CorruptRow) as exc:
        load_table(p)
    assert exc.value.line > 2


def test_wrong_version(tmp_path, table8):
    p = tmp_path / "t.csv"
    save_table(table8, p)
    p.write_text(p.read_text().replace("geodesic-classes v1", "geodesic-classes v2", 1))
    with pytest.raises(FormatVersionMismatch):
        load_table(p)


def test_tampered_row(tmp_path, table8):
    p = tmp_path / "t.csv"
    save_table(table8, p)
    lines = p.read_text().split("\n")
    fields = lines[5].split(",")
    fields[-1] = str(int(fields[-1]) + 1)
    lines[5] = ",".join(fields)
    p.write_text("\n".join(lines))
    with pytest.raises(CorruptRow) as exc:
        load_table(p)
    assert exc.value.line == 6


def test_below_systole_empty(group):
    t = build_table(2.0)
    assert len(t) == 0
    assert isinstance(t, ClassTable)
