"""The operator ring: composition, the center, normal forms, level maps.

Composition has an action oracle — (P Q)(f) must equal P(Q(f)) — and the
curvature identities have closed-form unit oracles over Q.
"""

from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dopm.context import Context
from dopm.diffops import (DiffOp, apply_dp, central_embed, central_unit,
                          commutator, frob_descend, frob_raise, is_central,
                          kaneda_matrix, level_raise, quotient_matrix, theta,
                          theta_decompose, theta_power, theta_unit,
                          zo_decompose, zo_reassemble)
from dopm.linalg import pmat_eq, pmat_mul
from dopm.poly import Poly
from dopm.scalars import angle_mi_mod, frac_mod, mi_scale, mi_unit

CTXS = [Context(2, 0), Context(3, 0), Context(2, 1), Context(3, 1),
        Context(2, 0, r=2), Context(3, 1, r=2)]


@st.composite
def ops(draw, ctx, max_index=None, max_terms=3):
    hi = max_index if max_index is not None else ctx.pm1 + 2
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        k = tuple(draw(st.integers(0, hi)) for _ in range(ctx.r))
        e = tuple(draw(st.integers(0, 3)) for _ in range(ctx.r))
        c = draw(st.integers(1, ctx.p - 1)) if ctx.p > 2 else 1
        f = Poly.monomial(e, c, ctx.r, ctx.p)
        terms[k] = terms.get(k, Poly.zero(ctx.r, ctx.p)) + f
    return DiffOp(ctx, terms)


@st.composite
def fns(draw, ctx, max_exp=5):
    coeffs = {}
    for _ in range(draw(st.integers(0, 3))):
        e = tuple(draw(st.integers(0, max_exp)) for _ in range(ctx.r))
        coeffs[e] = draw(st.integers(1, max(ctx.p - 1, 1)))
    return Poly(coeffs, ctx.r, ctx.p)


# -- the basis action ---------------------------------------------------------

@pytest.mark.parametrize("ctx", CTXS[:4], ids=lambda c: f"p{c.p}m{c.m}")
def test_apply_dp_closed_form(ctx):
    for s in range(9):
        for h in range(9):
            got = apply_dp(ctx, (s,), Poly.monomial((h,), 1, 1, ctx.p))
            c = factorial(s // ctx.pm) * comb(h, s) % ctx.p if s <= h else 0
            want = Poly.monomial((h - s,), c, 1, ctx.p) if c else \
                Poly.zero(1, ctx.p)
            assert got == want


def test_first_partial_is_the_derivative():
    ctx = Context(5, 0, r=2)
    f = Poly({(3, 1): 2, (0, 4): 3, (1, 1): 1}, 2, 5)
    for i in range(2):
        d = DiffOp.dpartial(ctx, mi_unit(2, i))
        assert d.apply(f) == f.derivative(i)


# -- composition --------------------------------------------------------------

@given(st.data())
@settings(max_examples=50, deadline=None)
def test_composition_matches_the_action(data):
    ctx = data.draw(st.sampled_from(CTXS))
    a = data.draw(ops(ctx))
    b = data.draw(ops(ctx))
    f = data.draw(fns(ctx))
    assert (a * b).apply(f) == a.apply(b.apply(f))


@given(st.data())
@settings(max_examples=30, deadline=None)
def test_mul_is_associative(data):
    ctx = data.draw(st.sampled_from(CTXS))
    a = data.draw(ops(ctx, max_terms=2))
    b = data.draw(ops(ctx, max_terms=2))
    c = data.draw(ops(ctx, max_terms=2))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("ctx", CTXS[:4], ids=lambda c: f"p{c.p}m{c.m}")
def test_basis_product_is_the_angle_law(ctx):
    for k in range(7):
        for l in range(7):
            got = DiffOp.dpartial(ctx, (k,)) * DiffOp.dpartial(ctx, (l,))
            c = angle_mi_mod((k,), (l,), ctx.p, ctx.m, ctx.p)
            want = DiffOp.dpartial(ctx, (k + l,)).scale(c)
            assert got == want


def test_heisenberg_commutator():
    for ctx in CTXS[:4]:
        t = DiffOp.from_poly(ctx, Poly.variable(0, ctx.r, ctx.p))
        d = DiffOp.dpartial(ctx, mi_unit(ctx.r, 0))
        assert commutator(d, t) == DiffOp.one(ctx)


# -- the center ---------------------------------------------------------------

@pytest.mark.parametrize("ctx", CTXS, ids=str)
def test_theta_is_central_and_kills_functions(ctx):
    for i in range(ctx.r):
        th = theta(ctx, i)
        assert is_central(th)
        f = Poly({(2,) * ctx.r: 1, (1,) * ctx.r: ctx.p - 1}, ctx.r, ctx.p)
        assert not th.apply(f)
    d = DiffOp.dpartial(ctx, mi_unit(ctx.r, 0))
    assert not is_central(d)


@pytest.mark.parametrize("ctx", CTXS[:4], ids=lambda c: f"p{c.p}m{c.m}")
def test_theta_unit_oracle(ctx):
    p, pm = ctx.p, ctx.pm
    # (d^<p^m>)^p = u theta with u = (p^(m+1))! / ((p^m)!^p p!) over Q
    u = Fraction(factorial(p * pm), factorial(pm) ** p * factorial(p))
    assert theta_unit(ctx) == frac_mod(u, p)
    lhs = DiffOp.dpartial(ctx, (pm,)) ** p
    assert lhs == theta(ctx, 0).scale(theta_unit(ctx))


@pytest.mark.parametrize("ctx", CTXS[:4], ids=lambda c: f"p{c.p}m{c.m}")
def test_central_unit_oracle(ctx):
    p, q = ctx.p, ctx.pm1
    for c in range(1, 4):
        want = Fraction(factorial(p) ** c * factorial(c * q),
                        factorial(q) ** c * factorial(c * p))
        assert central_unit(ctx, (c,)) == frac_mod(want, p)
        # theta^c really is that multiple of the single basis element
        assert theta(ctx, 0) ** c == theta_power(ctx, (c,))
        assert theta_power(ctx, (c,)) == \
            DiffOp.dpartial(ctx, (c * q,)).scale(central_unit(ctx, (c,)))


def test_theta_powers_multiply_across_coordinates():
    ctx = Context(2, 1, r=2)
    lhs = (theta(ctx, 0) ** 2) * theta(ctx, 1)
    assert lhs == theta_power(ctx, (2, 1))


@given(st.data())
@settings(max_examples=30, deadline=None)
def test_central_embedding_round_trip(data):
    ctx = data.draw(st.sampled_from(CTXS[:4]))
    coeffs = {}
    for _ in range(data.draw(st.integers(1, 3))):
        a = data.draw(st.integers(0, 2))
        b = data.draw(st.integers(0, 2))
        coeffs[(a, b)] = data.draw(st.integers(1, ctx.p - 1)) if ctx.p > 2 \
            else 1
    g = Poly(coeffs, 2, ctx.p, "t'|xi'")
    z = central_embed(ctx, g)
    assert is_central(z)
    assert theta_decompose(z) == g


def test_theta_decompose_rejects_noncentral():
    ctx = Context(2, 0)
    with pytest.raises(ValueError):
        theta_decompose(DiffOp.dpartial(ctx, (1,)))
    with pytest.raises(ValueError):
        # t theta has its coefficient outside O_X'
        theta_decompose(theta(ctx, 0).premul(Poly.variable(0, 1, 2)))


# -- normal forms -------------------------------------------------------------

@given(st.data())
@settings(max_examples=40, deadline=None)
def test_zo_round_trip(data):
    ctx = data.draw(st.sampled_from(CTXS))
    op = data.draw(ops(ctx))
    assert zo_reassemble(ctx, zo_decompose(op)) == op


def test_kaneda_block_form():
    # right multiplication by d^<k> on the small-index basis at m = 0:
    # an identity block shifted by k, with theta entries where the index
    # wraps past p
    for p in (2, 3, 5):
        ctx = Context(p, 0)
        th = Poly.monomial((0, 1), 1, 2, p, "t|th")
        one = Poly.one(2, p, "t|th")
        zero = Poly.zero(2, p, "t|th")
        for k in range(p):
            want = [[zero] * p for _ in range(p)]
            for t in range(p):
                if t + k < p:
                    want[t + k][t] = one
                else:
                    want[t + k - p][t] = th
            got = kaneda_matrix(DiffOp.dpartial(ctx, (k,)))
            assert pmat_eq(got, want)


@given(st.data())
@settings(max_examples=25, deadline=None)
def test_kaneda_is_an_antihomomorphism(data):
    ctx = data.draw(st.sampled_from([Context(2, 0), Context(3, 0),
                                     Context(2, 1)]))
    a = data.draw(ops(ctx, max_terms=2))
    b = data.draw(ops(ctx, max_terms=2))
    assert pmat_eq(kaneda_matrix(a * b),
                   pmat_mul(kaneda_matrix(b), kaneda_matrix(a)))


def test_quotient_matrix_values():
    ctx = Context(2, 0)
    tp = Poly.variable(0, 1, 2, "t'")
    one, zero = Poly.one(1, 2, "t'"), Poly.zero(1, 2, "t'")
    d = quotient_matrix(DiffOp.dpartial(ctx, (1,)))
    assert pmat_eq(d, [[zero, one], [zero, zero]])
    t = quotient_matrix(DiffOp.from_poly(ctx, Poly.variable(0, 1, 2)))
    assert pmat_eq(t, [[zero, tp], [one, zero]])
    # theta acts as zero on the quotient
    assert pmat_eq(quotient_matrix(theta(ctx, 0)),
                   [[zero, zero], [zero, zero]])


@given(st.data())
@settings(max_examples=25, deadline=None)
def test_quotient_matrix_is_a_homomorphism(data):
    ctx = data.draw(st.sampled_from([Context(2, 0), Context(3, 0),
                                     Context(2, 1)]))
    a = data.draw(ops(ctx, max_terms=2))
    b = data.draw(ops(ctx, max_terms=2))
    assert pmat_eq(quotient_matrix(a * b),
                   pmat_mul(quotient_matrix(a), quotient_matrix(b)))


# -- level maps ---------------------------------------------------------------

@given(st.data())
@settings(max_examples=30, deadline=None)
def test_level_raise_is_a_ring_map(data):
    ctx = data.draw(st.sampled_from([Context(2, 0), Context(3, 0),
                                     Context(2, 1)]))
    a = data.draw(ops(ctx, max_terms=2))
    b = data.draw(ops(ctx, max_terms=2))
    assert level_raise(a * b) == level_raise(a) * level_raise(b)
    assert level_raise(a + b) == level_raise(a) + level_raise(b)


def test_level_raise_kills_nothing_it_should_not():
    # d^<1> at level 0 -> level 1 keeps coefficient 1 (q-factor 1/1)
    ctx = Context(2, 0)
    up = level_raise(DiffOp.dpartial(ctx, (1,)))
    assert up == DiffOp.dpartial(ctx.at_level(1), (1,))
    # d^<2> at level 0 is 2! d^[2]; at level 1 that picks up 2!/1 = 0 mod 2
    assert not level_raise(DiffOp.dpartial(ctx, (2,)))


@given(st.data())
@settings(max_examples=30, deadline=None)
def test_frobenius_raise_descend_round_trip(data):
    ctx = data.draw(st.sampled_from([Context(2, 0), Context(3, 0),
                                     Context(2, 1, r=2)]))
    op = data.draw(ops(ctx))
    up = frob_raise(op)
    assert frob_descend(up, divide_coeffs=True) == op
    a = data.draw(ops(ctx, max_terms=2))
    assert frob_raise(op * a) == frob_raise(op) * frob_raise(a)


def test_frob_descend_keeps_divisible_indices_only():
    ctx = Context(2, 1)
    op = DiffOp.dpartial(ctx, (2,), coeff=Poly.variable(0, 1, 2)) + \
        DiffOp.dpartial(ctx, (3,))
    down = frob_descend(op)
    want = DiffOp.dpartial(ctx.at_level(0), (1,),
                           coeff=Poly.variable(0, 1, 2))
    assert down == want
