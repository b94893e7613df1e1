"""Dense linear algebra over GF(p) (numpy int64) and tiny matrices of
polynomials.

Entries stay below p <= 7, so int64 accumulation never overflows at the
dimensions that occur here; everything is reduced after each product.
"""

from __future__ import annotations

import numpy as np

from .poly import Poly


def rref_mod(a: np.ndarray, p: int):
    """Row-reduce in place over GF(p); returns (matrix, pivot columns)."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    rank = 0
    for c in range(cols):
        pr = None
        for r in range(rank, rows):
            if a[r, c]:
                pr = r
                break
        if pr is None:
            continue
        if pr != rank:
            a[[rank, pr]] = a[[pr, rank]]
        a[rank] = a[rank] * pow(int(a[rank, c]), -1, p) % p
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] = (a[r] - a[r, c] * a[rank]) % p
        pivots.append(c)
        rank += 1
        if rank == rows:
            break
    return a, pivots


def rank_mod(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(rref_mod(a, p)[1])


def nullspace_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Rows span {x : a @ x = 0 mod p}."""
    rows, cols = a.shape
    if a.size == 0:
        return np.eye(cols, dtype=np.int64)
    r, pivots = rref_mod(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for n, fc in enumerate(free):
        basis[n, fc] = 1
        for i, pc in enumerate(pivots):
            basis[n, pc] = (-r[i, fc]) % p
    return basis


def solve_mod(a: np.ndarray, b: np.ndarray, p: int):
    """One solution of a @ x = b mod p, or None."""
    rows, cols = a.shape
    aug = np.concatenate([a % p, b.reshape(rows, 1) % p], axis=1)
    r, pivots = rref_mod(aug, p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, cols]
    return x


def refine_kernel(basis: np.ndarray, cons: np.ndarray, p: int) -> np.ndarray:
    """Intersect the row space of `basis` with the kernel of `cons`.

    Constraints arrive in batches (cheap ones first), so the working
    space only ever shrinks.
    """
    if basis.shape[0] == 0:
        return basis
    reduced = cons % p @ basis.T % p
    small = nullspace_mod(reduced, p)
    return small @ basis % p


def row_space_contains(basis: np.ndarray, v: np.ndarray, p: int) -> bool:
    if basis.shape[0] == 0:
        return not np.any(v % p)
    return rank_mod(np.vstack([basis, v]), p) == rank_mod(basis, p)


# ---------------------------------------------------------------------------
# matrices of polynomials (module actions, Higgs fields)

def pmat_zero(n: int, nvars: int, mod, var="t"):
    z = Poly.zero(nvars, mod, var)
    return [[z] * n for _ in range(n)]


def pmat_eye(n: int, nvars: int, mod, var="t"):
    out = pmat_zero(n, nvars, mod, var)
    one = Poly.one(nvars, mod, var)
    for i in range(n):
        out[i][i] = one
    return out


def pmat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def pmat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def pmat_scale(a, c):
    return [[x.scale(c) if not isinstance(c, Poly) else c * x for x in ra]
            for ra in a]


def pmat_mul(a, b):
    n, mid, cols = len(a), len(b), len(b[0])
    proto = a[0][0]
    zero = Poly.zero(proto.nvars, proto.mod, proto.var)
    out = [[zero] * cols for _ in range(n)]
    for i in range(n):
        for k in range(mid):
            if not a[i][k]:
                continue
            for j in range(cols):
                if b[k][j]:
                    out[i][j] = out[i][j] + a[i][k] * b[k][j]
    return out


def pmat_pow(a, e: int):
    n = len(a)
    proto = a[0][0]
    out = pmat_eye(n, proto.nvars, proto.mod, proto.var)
    for _ in range(e):
        out = pmat_mul(out, a)
    return out


def pmat_map(a, fn):
    return [[fn(x) for x in ra] for ra in a]


def pmat_eq(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def pmat_is_zero(a) -> bool:
    return all(not x for ra in a for x in ra)
