"""The ring D^(m) of level-m differential operators on affine r-space.

Elements are finite sums  sum_k  f_k(t) * d^<k>  over the divided-power
basis, with coefficients mod p.  Composition is governed by

    d^<k> * f      = sum_{i<=k} {k \\ i} d^<i>(f) d^<k-i>        (Leibniz)
    d^<k> * d^<l>  = <k+l \\ k> d^<k+l>

and the center is generated over O_X' = k[t^{p^(m+1)}] by the curvature
elements theta_i = d^<p^(m+1) e_i>, which kill O_X because q(p^(m+1)) = p.
"""

from __future__ import annotations

from math import factorial

from .context import Context
from .poly import Poly
from .scalars import (angle, angle_mi_mod, box, box_le, brace_mi_mod,
                      dp_monomial_action, frac_mod, mi_add, mi_min, mi_scale,
                      mi_sub, mi_sum, mi_unit, mi_zero)


def apply_dp(ctx: Context, s, f: Poly) -> Poly:
    """d^<s>(f) for a single basis operator; exact on monomials."""
    out: dict = {}
    mod = f.mod
    for h, c in f.coeffs.items():
        a = dp_monomial_action(s, h, ctx.p, ctx.m)
        if not a:
            continue
        a = a * c
        e = mi_sub(h, s)
        out[e] = out.get(e, 0) + a
    return Poly(out, ctx.r, mod, f.var)


class DiffOp:
    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms):
        self.ctx = ctx
        clean = {}
        for k, f in terms.items():
            if f:
                assert f.nvars == ctx.r and f.mod == ctx.p, "bad coefficient"
                clean[tuple(k)] = f
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, {})

    @classmethod
    def from_poly(cls, ctx, f: Poly):
        return cls(ctx, {mi_zero(ctx.r): f})

    @classmethod
    def one(cls, ctx):
        return cls.from_poly(ctx, Poly.one(ctx.r, ctx.p))

    @classmethod
    def dpartial(cls, ctx, k, coeff=None):
        """f * d^<k>; `k` may be an int when r = 1."""
        if isinstance(k, int):
            assert ctx.r == 1
            k = (k,)
        f = coeff if coeff is not None else Poly.one(ctx.r, ctx.p)
        return cls(ctx, {tuple(k): f})

    # -- basics -------------------------------------------------------------

    def _check(self, other: "DiffOp"):
        assert self.ctx == other.ctx, "DiffOp context mismatch"

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def coeff(self, k) -> Poly:
        return self.terms.get(tuple(k), Poly.zero(self.ctx.r, self.ctx.p))

    def order(self) -> int:
        return max((mi_sum(k) for k in self.terms), default=-1)

    def theta_degree(self) -> int:
        q = self.ctx.pm1
        return max((sum(x // q for x in k) for k in self.terms), default=0)

    def theta_truncate(self, n: int) -> "DiffOp":
        q = self.ctx.pm1
        return DiffOp(self.ctx, {k: f for k, f in self.terms.items()
                                 if sum(x // q for x in k) <= n})

    def map_coeffs(self, fn) -> "DiffOp":
        return DiffOp(self.ctx, {k: fn(f) for k, f in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for k in sorted(self.terms, key=lambda k: (mi_sum(k), k), reverse=True):
            mono = "*".join(f"d{i+1}<{x}>" for i, x in enumerate(k) if x)
            f = self.terms[k]
            fs = repr(f)
            if mono:
                fs = f"({fs})*{mono}" if len(f.coeffs) > 1 or fs != "1" else mono
            bits.append(fs)
        return " + ".join(bits)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        zero = Poly.zero(self.ctx.r, self.ctx.p)
        for k, f in other.terms.items():
            out[k] = out.get(k, zero) + f
        return DiffOp(self.ctx, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "DiffOp":
        return DiffOp(self.ctx, {k: f.scale(c) for k, f in self.terms.items()})

    def premul(self, g: Poly) -> "DiffOp":
        """Left multiplication by a function: g * P."""
        return DiffOp(self.ctx, {k: g * f for k, f in self.terms.items()})

    def apply(self, f: Poly) -> Poly:
        acc = Poly.zero(self.ctx.r, f.mod, f.var)
        for k, g in self.terms.items():
            acc = acc + g * apply_dp(self.ctx, k, f)
        return acc

    def __mul__(self, other):
        """Composition P * Q as operators (P after Q)."""
        if isinstance(other, Poly):
            return self * DiffOp.from_poly(self.ctx, other)
        self._check(other)
        ctx = self.ctx
        p, m = ctx.p, ctx.m
        zero = Poly.zero(ctx.r, p)
        out: dict = {}
        for k, f in self.terms.items():
            for l, g in other.terms.items():
                # d^<i>(g) dies once i exceeds g's support, so cap i there
                for i in box_le(mi_min(k, g.max_exps())):
                    ki = mi_sub(k, i)
                    c = brace_mi_mod(i, ki, p, m, p)
                    if not c:
                        continue
                    c = c * angle_mi_mod(ki, l, p, m, p) % p
                    if not c:
                        continue
                    gi = apply_dp(ctx, i, g)
                    if not gi:
                        continue
                    s = mi_add(ki, l)
                    out[s] = out.get(s, zero) + (f * gi).scale(c)
        return DiffOp(ctx, out)

    def __rmul__(self, other):
        if isinstance(other, Poly):
            return self.premul(other)
        return NotImplemented

    def __pow__(self, n: int) -> "DiffOp":
        out = DiffOp.one(self.ctx)
        for _ in range(n):
            out = out * self
        return out


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return a * b - b * a


# ---------------------------------------------------------------------------
# curvature elements and the center

def theta(ctx: Context, i: int) -> DiffOp:
    """theta_i = d^<p^(m+1) e_i>, the i-th curvature generator."""
    return DiffOp.dpartial(ctx, mi_scale(mi_unit(ctx.r, i), ctx.pm1))


def theta_unit(ctx: Context) -> int:
    """Unit u with (d^<p^m e_i>)^p = u * theta_i, mod p."""
    u = 1
    for j in range(1, ctx.p):
        u = u * frac_mod(angle(j * ctx.pm, ctx.pm, ctx.p, ctx.m), ctx.p) % ctx.p
    return u


def central_unit(ctx: Context, c) -> int:
    """Unit A_c with theta^c = A_c * d^<c p^(m+1)>, mod p."""
    u = 1
    for ci in c:
        for j in range(1, ci):
            u = u * frac_mod(angle(j * ctx.pm1, ctx.pm1, ctx.p, ctx.m),
                             ctx.p) % ctx.p
    assert u, f"central unit vanished at {c}"
    return u


def theta_power(ctx: Context, c) -> DiffOp:
    return DiffOp.dpartial(ctx, mi_scale(c, ctx.pm1)).scale(central_unit(ctx, c))


def ring_generators(ctx: Context):
    """t_i and d^<p^l e_i> for l <= m: these generate D^(m) over k."""
    gens = []
    for i in range(ctx.r):
        gens.append(DiffOp.from_poly(ctx, Poly.variable(i, ctx.r, ctx.p)))
        for l in range(ctx.m + 1):
            gens.append(DiffOp.dpartial(ctx, mi_scale(mi_unit(ctx.r, i),
                                                      ctx.p**l)))
    return gens


def is_central(op: DiffOp) -> bool:
    return all(not commutator(op, g) for g in ring_generators(op.ctx))


def central_embed(ctx: Context, g: Poly) -> DiffOp:
    """O_X'[xi'] -> Z(D^(m)), t'^a xi'^b -> t^(q a) theta^b with q = p^(m+1).

    `g` has 2r variables: the first r are t', the last r xi'.
    """
    assert g.nvars == 2 * ctx.r and g.mod == ctx.p
    out = DiffOp.zero(ctx)
    for e, c in g.coeffs.items():
        a, b = e[:ctx.r], e[ctx.r:]
        f = Poly.monomial(mi_scale(a, ctx.pm1), c, ctx.r, ctx.p)
        out = out + theta_power(ctx, b).premul(f)
    return out


def theta_decompose(op: DiffOp) -> Poly:
    """Inverse of central_embed on its image; raises ValueError off it."""
    ctx = op.ctx
    q = ctx.pm1
    out: dict = {}
    for k, f in op.terms.items():
        if any(x % q for x in k):
            raise ValueError(f"index {k} is not divisible by p^(m+1)")
        b = tuple(x // q for x in k)
        inv = pow(central_unit(ctx, b), -1, ctx.p)
        for e, c in f.coeffs.items():
            if any(x % q for x in e):
                raise ValueError(f"coefficient exponent {e} not in O_X'")
            a = tuple(x // q for x in e)
            out[a + b] = out.get(a + b, 0) + c * inv
    return Poly(out, 2 * ctx.r, ctx.p, "t'|xi'")


# ---------------------------------------------------------------------------
# normal forms: O_X[theta]-combinations of the small-index basis

def zo_decompose(op: DiffOp):
    """Write P = sum_{u < p^(m+1)}  z_u(t, theta) * d^<u>.

    Returns {u: Poly in 2r variables "t|th"}; the decomposition peels
    theta^c off d^<c q + u> at the cost of the unit A_c <c q \\ u>.
    """
    ctx = op.ctx
    q = ctx.pm1
    out: dict = {}
    for k, f in op.terms.items():
        c = tuple(x // q for x in k)
        u = tuple(x % q for x in k)
        unit = central_unit(ctx, c) * angle_mi_mod(mi_scale(c, q), u,
                                                   ctx.p, ctx.m, ctx.p) % ctx.p
        inv = pow(unit, -1, ctx.p)
        slot = out.setdefault(u, {})
        for e, cf in f.coeffs.items():
            key = e + c
            slot[key] = (slot.get(key, 0) + cf * inv) % ctx.p
    polys = {u: Poly(d, 2 * ctx.r, ctx.p, "t|th") for u, d in out.items()}
    return {u: z for u, z in polys.items() if z}


def zo_reassemble(ctx: Context, zo) -> DiffOp:
    """Exact inverse of zo_decompose."""
    q = ctx.pm1
    out = DiffOp.zero(ctx)
    for u, z in zo.items():
        assert z.nvars == 2 * ctx.r
        for ec, cf in z.coeffs.items():
            e, c = ec[:ctx.r], ec[ctx.r:]
            unit = central_unit(ctx, c) * angle_mi_mod(mi_scale(c, q), u,
                                                       ctx.p, ctx.m, ctx.p)
            k = mi_add(mi_scale(c, q), u)
            f = Poly.monomial(e, cf * unit, ctx.r, ctx.p)
            out = out + DiffOp.dpartial(ctx, k, coeff=f)
    return out


def kaneda_matrix(op: DiffOp):
    """Matrix of right multiplication by P on the free left module
    O_X[theta]^(p^(m+1) r): M[u][t] = z-coefficient of d^<u> in d^<t> * P,
    rows/columns indexed by box(p^(m+1))^r in lex order.

    Entries are commutative polynomials in "t|th"; the defining relation
    is M(P*Q) = M(Q) @ M(P).
    """
    ctx = op.ctx
    basis = list(box(ctx.pm1, ctx.r))
    idx = {u: n for n, u in enumerate(basis)}
    zero = Poly.zero(2 * ctx.r, ctx.p, "t|th")
    mat = [[zero] * len(basis) for _ in basis]
    for tcol, tmi in enumerate(basis):
        zo = zo_decompose(DiffOp.dpartial(ctx, tmi) * op)
        for u, z in zo.items():
            mat[idx[u]][tcol] = z
    return mat


def quotient_matrix(op: DiffOp):
    """Matrix of P acting on O_X = O_X'{t^a : a < p^(m+1)}, over O_X'.

    The curvature ideal acts as zero here (q(p^(m+1))! = p!), so this is
    the faithful matrix model of D^(m)/(theta).  Entries are polynomials
    in t' = t^(p^(m+1)).
    """
    ctx = op.ctx
    q = ctx.pm1
    basis = list(box(q, ctx.r))
    idx = {u: n for n, u in enumerate(basis)}
    zero = Poly.zero(ctx.r, ctx.p, "t'")
    mat = [[zero] * len(basis) for _ in basis]
    for col, a in enumerate(basis):
        img = op.apply(Poly.monomial(a, 1, ctx.r, ctx.p))
        for h, c in img.coeffs.items():
            lo = tuple(x % q for x in h)
            hi = tuple(x // q for x in h)
            mat[idx[lo]][col] = mat[idx[lo]][col] + \
                Poly.monomial(hi, c, ctx.r, ctx.p, "t'")
    return mat


# ---------------------------------------------------------------------------
# changing the level

def level_raise(op: DiffOp, s: int = 1) -> DiffOp:
    """The canonical ring map D^(m) -> D^(m+s): d^<k> at level m equals
    q^(m)_k! d^[k], so its level-(m+s) coordinates pick up the integer
    factor prod_i q^(m)(k_i)! / q^(m+s)(k_i)!."""
    ctx = op.ctx
    up = ctx.at_level(ctx.m + s)
    out = {}
    for k, f in op.terms.items():
        c = 1
        for x in k:
            num = factorial(x // ctx.pm)
            den = factorial(x // up.pm)
            c = c * (num // den) % ctx.p
        g = f.scale(c)
        if g:
            out[k] = g
    return DiffOp(up, out)


def frob_descend(op: DiffOp, s: int = 1, divide_coeffs: bool = False) -> DiffOp:
    """Frobenius descent D^(m) -> D^(m-s): keep the terms whose index is
    divisible by p^s coordinate-wise, at index k/p^s; drop the rest.

    Coefficients ride along unchanged (the O_X (x) D^(m-s) reading); with
    `divide_coeffs` the t-exponents are divided too, which realizes the
    exact inverse of frob_raise.
    """
    ctx = op.ctx
    assert ctx.m >= s
    down = ctx.at_level(ctx.m - s)
    ps = ctx.p**s
    out = {}
    for k, f in op.terms.items():
        if any(x % ps for x in k):
            continue
        out[tuple(x // ps for x in k)] = \
            f.divide_exponents(ps) if divide_coeffs else f
    return DiffOp(down, out)


def frob_raise(op: DiffOp, s: int = 1) -> DiffOp:
    """Frobenius pullback D^(m) -> D^(m+s): indices and coefficient
    exponents both dilate by p^s.  A ring map; frob_descend with
    divide_coeffs inverts it exactly."""
    ctx = op.ctx
    up = ctx.at_level(ctx.m + s)
    ps = ctx.p**s
    return DiffOp(up, {mi_scale(k, ps): f.scale_exponents(ps)
                       for k, f in op.terms.items()})
