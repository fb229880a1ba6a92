import math
import random

import pytest

from closedgeo.errors import NonHyperbolic
from closedgeo.hyperbolic import (
    IDENTITY,
    Matrix2,
    PSL2Element,
    axis_distance,
    classify,
    inverse,
    is_identity,
    mul,
    norm_and_length,
    norm_from_trace,
    normalize_entries,
    origin_distance,
)


def diag(m):
    return PSL2Element.from_entries(m, 0, 0, 1 / m)


def test_identity_product():
    g = PSL2Element.from_entries(2, 1, 1, 1)
    assert mul(IDENTITY, g).mat == g.mat


def test_inverse_product():
    g = PSL2Element.from_entries(2, 1, 1, 1)
    assert is_identity(mul(g, inverse(g)))


def test_diagonal_closure():
    g = mul(diag(3.0), diag(5.0))
    assert g.mat.a == pytest.approx(15.0)
    assert g.mat.d == pytest.approx(1 / 15.0)


def test_word_concatenates():
    g = PSL2Element(Matrix2(1.0, 0.0, 0.0, 1.0), (1, 2))
    h = PSL2Element(Matrix2(1.0, 0.0, 0.0, 1.0), (-3,))
    assert mul(g, h).word == (1, 2, -3)
    assert inverse(g).word == (-2, -1)


def test_normalization_idempotent():
    e = normalize_entries(-0.0, -2.0, 0.5, -1.0)
    assert e[1] > 0
    assert normalize_entries(*e) == e
    # entries below the zero tolerance do not decide the sign
    assert normalize_entries(-1e-12, -1.0, 1.0, 0.0)[1] == 1.0


def test_det_enforced():
    with pytest.raises(ValueError):
        PSL2Element.from_entries(2, 0, 0, 2)


@pytest.mark.parametrize("mat, kind", [
    ((1, 0, 0, 1), "identity"),
    ((1, 1, 0, 1), "parabolic"),
    ((-1, 1, 0, -1), "parabolic"),
    ((2, 1, 1, 1), "hyperbolic"),
    ((0, 1, -1, 0), "elliptic"),
])
def test_classify(mat, kind):
    assert classify(PSL2Element.from_entries(*mat)) == kind


def test_norm_of_diagonal():
    N, l = norm_and_length(diag(math.e))
    assert N == pytest.approx(math.e ** 2)
    assert l == pytest.approx(2.0)


def test_norm_trace_two_and_a_half():
    N, l = norm_from_trace(2.5)
    # m + 1/m = 2.5 has root m = 2
    assert N == pytest.approx(4.0, rel=1e-14)
    assert l == pytest.approx(math.log(4.0), rel=1e-14)


def test_nonhyperbolic_boundary():
    with pytest.raises(NonHyperbolic):
        norm_from_trace(2 + 1e-12)


def test_origin_distance_examples():
    assert origin_distance(IDENTITY) == 0.0
    assert origin_distance(diag(math.e)) == pytest.approx(2.0, rel=1e-14)
    th = 0.7
    rot = PSL2Element.from_entries(math.cos(th), math.sin(th), -math.sin(th), math.cos(th))
    assert origin_distance(rot) == pytest.approx(0.0, abs=1e-7)


def test_enumerated_invariants(group):
    from closedgeo.enumerator import enumerate_ball

    elems = enumerate_ball(group, 4.0)
    rng = random.Random(3)
    idx = [j for j in range(1, len(elems)) if abs(elems.mats[j, 0] + elems.mats[j, 3]) > 2.001]
    for j in rng.sample(idx, 200):
        g = elems.element(j)
        h = elems.element(rng.choice(idx))
        N, l = norm_and_length(g)
        assert l <= origin_distance(g) + 1e-9
        Nc, lc = norm_and_length(mul(mul(h, g), inverse(h)))
        assert lc == pytest.approx(l, rel=1e-7)
        assert origin_distance(inverse(g)) == pytest.approx(origin_distance(g), abs=1e-12)
        # translation length and displacement fix the distance to the axis
        rho = axis_distance(g)
        assert math.sinh(origin_distance(g) / 2) == pytest.approx(
            math.cosh(rho) * math.sinh(l / 2), rel=1e-9)
