"""Measure expressions: canonical form, exact moments, sampling.

The moment engine is cross-checked three independent ways: closed-form
Fuss-Catalan counts for box powers of mp, a polynomial-composition check
of the S-transform identity psi(chi(z)) = z, and a second-moment law
computed by structural recursion on the expression tree.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtnflow.freeprob import (
    MP,
    ClassConv,
    Expr,
    FreeConv,
    MeasureFormatError,
    One,
    box_power_of_mp,
    canonicalize,
    class_conv,
    free_conv,
    moments,
    parse_measure,
    render,
    renyi_correction,
    s_series,
    sample_spectrum,
    vn_correction,
    vn_correction_mc,
)

# ---------------------------------------------------------------------------
# test-side series arithmetic, used as an oracle below


def poly_mul(a, b, deg):
    out = [Fraction(0)] * (deg + 1)
    for i, ai in enumerate(a[: deg + 1]):
        for j, bj in enumerate(b[: deg + 1 - i]):
            out[i + j] += ai * bj
    return out


def compose(outer, inner, deg):
    """outer(inner(z)) truncated at degree deg; inner has no constant term."""
    assert inner[0] == 0
    out = [Fraction(0)] * (deg + 1)
    power = [Fraction(1)] + [Fraction(0)] * deg
    for j, aj in enumerate(outer[: deg + 1]):
        if j:
            power = poly_mul(power, inner, deg)
        if aj:
            out = [o + aj * p for o, p in zip(out, power)]
    return out


def fuss_catalan(s: int, n: int) -> Fraction:
    return Fraction(math.comb((s + 1) * n, n), s * n + 1)


# ---------------------------------------------------------------------------
# canonical form


def test_canonicalize_flattens_and_sorts():
    raw = FreeConv((FreeConv((MP(), MP())), One(), MP()))
    assert canonicalize(raw) == FreeConv((MP(), MP(), MP()))
    raw = ClassConv((FreeConv((MP(), MP())), MP()))
    assert canonicalize(raw) == ClassConv((MP(), FreeConv((MP(), MP()))))


def test_canonicalize_collapses_degenerate_products():
    assert canonicalize(FreeConv((One(), One()))) == One()
    assert canonicalize(ClassConv(())) == One()
    assert canonicalize(FreeConv((MP(), One()))) == MP()
    assert canonicalize(ClassConv((FreeConv((MP(), One())),))) == MP()


def test_constructors_canonicalize():
    assert free_conv(MP()) == MP()
    assert free_conv() == One()
    assert class_conv(MP(), One(), MP()) == ClassConv((MP(), MP()))


def test_box_power_recognition():
    assert box_power_of_mp(One()) == 0
    assert box_power_of_mp(MP()) == 1
    assert box_power_of_mp(free_conv(MP(), MP(), MP())) == 3
    assert box_power_of_mp(class_conv(MP(), MP())) is None
    assert box_power_of_mp(free_conv(MP(), class_conv(MP(), MP()))) is None


EXPRS = st.recursive(
    st.sampled_from([One(), MP()]),
    lambda inner: st.builds(
        lambda kind, children: kind(tuple(children)),
        st.sampled_from([FreeConv, ClassConv]),
        st.lists(inner, min_size=2, max_size=3),
    ),
    max_leaves=6,
)


@given(EXPRS)
def test_canonicalize_is_idempotent(e):
    c = canonicalize(e)
    assert canonicalize(c) == c


@given(EXPRS)
def test_render_parse_round_trip(e):
    assert parse_measure(render(e)) == canonicalize(e)


@given(EXPRS)
def test_canonical_form_ignores_child_order(e):
    def reverse(x: Expr) -> Expr:
        if isinstance(x, (One, MP)):
            return x
        return type(x)(tuple(reverse(c) for c in reversed(x.children)))

    assert canonicalize(reverse(e)) == canonicalize(e)


# ---------------------------------------------------------------------------
# text form


def test_render_groups_repeated_box_factors():
    assert render(free_conv(MP(), MP())) == "pow_box(mp, 2)"
    assert render(free_conv(MP(), MP(), class_conv(MP(), MP()))) == (
        "box(pow_box(mp, 2), times(mp, mp))"
    )
    assert render(class_conv(MP(), MP())) == "times(mp, mp)"
    assert render(One()) == "one"


def test_parse_pow_box_zero_is_unit():
    assert parse_measure("pow_box(mp, 0)") == One()


def test_parse_accepts_whitespace():
    assert parse_measure(" box( mp , mp ) ") == free_conv(MP(), MP())


@pytest.mark.parametrize(
    "text",
    [
        "",
        "nope",
        "box(mp)",
        "times(mp)",
        "box mp",
        "box(mp",
        "box(mp,",
        "mp mp",
        "pow_box(mp)",
        "pow_box(mp, mp)",
        "pow_box(2, mp)",
        "times(mp; mp)",
        "box(mp,, mp)",
    ],
)
def test_parse_rejects_malformed_text(text):
    with pytest.raises(MeasureFormatError):
        parse_measure(text)


# ---------------------------------------------------------------------------
# exact moments


def test_mp_moments_are_catalan():
    expected = tuple(
        Fraction(math.comb(2 * n, n), n + 1) for n in range(1, 9)
    )
    assert moments(MP(), 8) == expected


@pytest.mark.parametrize("s", [0, 1, 2, 3, 4])
def test_box_power_moments_are_fuss_catalan(s):
    e = free_conv(*(MP() for _ in range(s)))
    got = moments(e, 6)
    assert got == tuple(fuss_catalan(s, n) for n in range(1, 7))


def test_classical_product_moments_multiply():
    got = moments(class_conv(MP(), MP()), 5)
    catalan = [Fraction(math.comb(2 * n, n), n + 1) for n in range(1, 6)]
    assert got == tuple(c * c for c in catalan)


def test_first_moment_is_always_one():
    for e in [One(), MP(), free_conv(MP(), MP()), class_conv(MP(), MP())]:
        assert moments(e, 1) == (Fraction(1),)


def test_moments_rejects_empty_request():
    with pytest.raises(ValueError):
        moments(MP(), 0)


S_CHECK_EXPRS = [
    MP(),
    free_conv(MP(), MP()),
    free_conv(MP(), MP(), MP()),
    class_conv(MP(), MP()),
    free_conv(MP(), class_conv(MP(), MP())),
    class_conv(MP(), free_conv(MP(), MP())),
]


@pytest.mark.parametrize("e", S_CHECK_EXPRS, ids=render)
def test_s_transform_inverts_the_moment_series(e):
    """psi(chi(z)) = z where chi(z) = S(z) z/(1+z), checked by composition."""
    n = 6
    mom = moments(e, n)
    s = list(s_series(e, n))
    low = [Fraction(0)] + [Fraction((-1) ** k) for k in range(n)]
    chi = poly_mul(low, s, n)
    psi = [Fraction(0), *mom]
    back = compose(psi, chi, n)
    assert back == [Fraction(0), Fraction(1)] + [Fraction(0)] * (n - 1)


def test_s_series_multiplies_under_box():
    n = 6
    for a, b in [(MP(), MP()), (MP(), free_conv(MP(), MP()))]:
        left = s_series(free_conv(a, b), n)
        prod = poly_mul(list(s_series(a, n)), list(s_series(b, n)), n - 1)
        assert list(left) == prod


def test_s_series_fixed_values():
    assert s_series(One(), 5) == (Fraction(1), 0, 0, 0, 0)
    assert s_series(MP(), 5) == (1, -1, 1, -1, 1)


def variance_law(e: Expr) -> Fraction:
    if isinstance(e, One):
        return Fraction(1)
    if isinstance(e, MP):
        return Fraction(2)
    if isinstance(e, ClassConv):
        out = Fraction(1)
        for child in e.children:
            out *= variance_law(child)
        return out
    return Fraction(1) + sum(variance_law(c) - 1 for c in e.children)


@settings(max_examples=60)
@given(EXPRS)
def test_second_moment_follows_the_variance_law(e):
    assert moments(e, 2)[1] == variance_law(canonicalize(e))


def test_demo_measure_moments_are_frozen():
    e = parse_measure(
        "box(times(box(pow_box(mp,3),times(pow_box(mp,2),mp)),"
        "box(times(mp,mp),mp)),pow_box(mp,2))"
    )
    assert moments(e, 3) == (Fraction(1), Fraction(47), Fraction(5063))


# ---------------------------------------------------------------------------
# entropy corrections


def test_vn_correction_closed_forms():
    assert vn_correction(One()) == 0
    assert vn_correction(MP()) == Fraction(1, 2)
    assert vn_correction(free_conv(MP(), MP())) == Fraction(5, 6)
    assert vn_correction(free_conv(MP(), MP(), MP())) == Fraction(13, 12)


def test_vn_correction_refuses_mixed_expressions():
    with pytest.raises(ValueError):
        vn_correction(class_conv(MP(), MP()))


def test_vn_correction_mc_matches_closed_form_for_mp():
    est = vn_correction_mc(MP(), size=256, count=16, seed=3)
    assert abs(est - 0.5) < 0.08


def test_renyi_correction_values():
    assert renyi_correction(MP(), 2) == pytest.approx(math.log(2))
    assert renyi_correction(free_conv(MP(), MP()), 2) == pytest.approx(math.log(3))
    assert renyi_correction(MP(), 3) == pytest.approx(math.log(5) / 2)
    with pytest.raises(ValueError):
        renyi_correction(MP(), 1)


# ---------------------------------------------------------------------------
# finite-size sampling


def test_sample_shape_and_row_order():
    lam = sample_spectrum(free_conv(MP(), class_conv(MP(), MP())), 32, count=3)
    assert lam.shape == (3, 32)
    assert np.all(np.diff(lam, axis=1) >= 0)


def test_sample_determinism_and_seed_separation():
    a = sample_spectrum(MP(), 64, count=2, seed=7)
    b = sample_spectrum(MP(), 64, count=2, seed=7)
    c = sample_spectrum(MP(), 64, count=2, seed=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_streams_are_keyed_per_draw():
    lam = sample_spectrum(MP(), 64, count=4, seed=0)
    assert not np.array_equal(lam[0], lam[1])


def test_unit_measure_samples_exactly():
    lam = sample_spectrum(One(), 16, count=2)
    assert np.array_equal(lam, np.ones((2, 16)))


def test_mp_sample_moments():
    lam = sample_spectrum(MP(), 256, count=24, seed=1)
    assert np.mean(lam) == pytest.approx(1.0, abs=0.03)
    assert np.mean(lam**2) == pytest.approx(2.0, rel=0.06)


def test_product_sample_moments():
    free = sample_spectrum(free_conv(MP(), MP()), 200, count=24, seed=2)
    assert np.mean(free**2) == pytest.approx(3.0, rel=0.1)
    classical = sample_spectrum(class_conv(MP(), MP()), 200, count=24, seed=2)
    assert np.mean(classical**2) == pytest.approx(4.0, rel=0.1)
