"""Small dense linear algebra over GF(p), p prime.  Vectors are lists of ints."""

from __future__ import annotations

import itertools


def rref(rows, p: int):
    """Row-reduce ``rows``.  Returns (basis, pivots): nonzero rows in reduced
    echelon form with unit pivots, and the pivot column of each row."""
    m = [[x % p for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    basis: list[list[int]] = []
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][col]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][col], p - 2, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                mi, mr = m[i], m[r]
                m[i] = [(a - f * b) % p for a, b in zip(mi, mr)]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    basis = m[:r]
    return basis, pivots


def reduce(vec, basis, pivots, p: int) -> tuple:
    """Canonical representative of ``vec`` modulo the row span of ``basis``."""
    v = [x % p for x in vec]
    for row, col in zip(basis, pivots):
        f = v[col]
        if f:
            v = [(a - f * b) % p for a, b in zip(v, row)]
    return tuple(v)


def in_span(vec, basis, pivots, p: int) -> bool:
    return not any(reduce(vec, basis, pivots, p))


def nullspace(rows, ncols: int, p: int):
    """Basis of {x : rows . x = 0}."""
    basis, pivots = rref(rows, p)
    free = [c for c in range(ncols) if c not in set(pivots)]
    out = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for row, col in zip(basis, pivots):
            x[col] = (-row[f]) % p
        out.append(x)
    return out


def transpose(cols, nrows: int):
    if not cols:
        return [[] for _ in range(nrows)]
    return [[c[i] for c in cols] for i in range(nrows)]


def matvec(rows, vec, p: int) -> tuple:
    return tuple(sum(a * b for a, b in zip(r, vec)) % p for r in rows)


def span_points(basis, dim: int, p: int):
    """Every vector in the row span of ``basis`` (p**len(basis) of them)."""
    if not basis:
        yield tuple([0] * dim)
        return
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        v = [0] * dim
        for c, row in zip(coeffs, basis):
            if c:
                v = [(a + c * b) % p for a, b in zip(v, row)]
        yield tuple(v)
