"""Dense exact linear algebra over Gaussian rationals.

Hand-rolled on purpose: every matrix in this package is tiny (rank
rarely above ten) and must be handled exactly, so Gauss elimination
with explicit pivot normalization is both simpler and faster than
pulling in a symbolic library.  Vectors are lists of Scalar, matrices
are lists of rows.  All functions are pure and deterministic; pivots
are chosen lexicographically (first usable column, first usable row).
"""
from __future__ import annotations

from .scalars import ONE, ZERO, Scalar

Vector = list[Scalar]
Matrix = list[list[Scalar]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO for _ in range(cols)] for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def copy_matrix(m: Matrix) -> Matrix:
    return [row[:] for row in m]


def transpose(m: Matrix) -> Matrix:
    if not m:
        return []
    return [[m[i][j] for i in range(len(m))] for j in range(len(m[0]))]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_neg(a: Matrix) -> Matrix:
    return [[-x for x in row] for row in a]


def mat_scale(a: Matrix, c: Scalar) -> Matrix:
    return [[c * x for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            c = ai[k]
            if c.is_zero():
                continue
            bk = b[k]
            for j in range(cols):
                oi[j] = oi[j] + c * bk[j]
    return out


def mat_vec(a: Matrix, v: Vector) -> Vector:
    out = []
    for row in a:
        s = ZERO
        for c, x in zip(row, v):
            if not c.is_zero():
                s = s + c * x
        out.append(s)
    return out


def mat_pow(a: Matrix, k: int) -> Matrix:
    out = identity(len(a))
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def is_zero_matrix(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def mat_eq(a: Matrix, b: Matrix) -> bool:
    if len(a) != len(b):
        return False
    return all(ra == rb for ra, rb in zip(a, b))


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    r = copy_matrix(m)
    rows = len(r)
    cols = len(r[0]) if rows else 0
    pivots: list[int] = []
    lead = 0
    for col in range(cols):
        pivot_row = None
        for i in range(lead, rows):
            if not r[i][col].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        r[lead], r[pivot_row] = r[pivot_row], r[lead]
        inv = r[lead][col].inverse()
        r[lead] = [inv * x for x in r[lead]]
        for i in range(rows):
            if i != lead and not r[i][col].is_zero():
                c = r[i][col]
                r[i] = [x - c * y for x, y in zip(r[i], r[lead])]
        pivots.append(col)
        lead += 1
        if lead == rows:
            break
    return r, pivots


def rank(m: Matrix) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def nullspace(m: Matrix) -> list[Vector]:
    """Canonical basis of the right kernel.

    One vector per free column, in increasing column order, each with a 1
    in its free slot.
    """
    if not m:
        return []
    cols = len(m[0])
    r, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = [ZERO] * cols
        v[free] = ONE
        for row_idx, p in enumerate(pivots):
            v[p] = -r[row_idx][free]
        basis.append(v)
    return basis


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [m[i][:] + identity(n)[i] for i in range(n)]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in r[:n]]


def try_inverse(m: Matrix) -> Matrix | None:
    try:
        return inverse(m)
    except ValueError:
        return None


def solve(a: Matrix, b: Vector) -> Vector | None:
    """One solution of a x = b, or None if inconsistent.

    Free variables are set to zero, which makes the answer deterministic.
    """
    if not a:
        return [] if all(x.is_zero() for x in b) else None
    cols = len(a[0])
    aug = [row[:] + [bv] for row, bv in zip(a, b)]
    r, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [ZERO] * cols
    for row_idx, p in enumerate(pivots):
        x[p] = r[row_idx][cols]
    return x


def row_space_basis(vectors: list[Vector]) -> list[Vector]:
    """Canonical (reduced echelon) basis of the span of the given vectors."""
    if not vectors:
        return []
    r, pivots = rref(vectors)
    return r[: len(pivots)]


def subspace_equal(a: list[Vector], b: list[Vector]) -> bool:
    return row_space_basis(a) == row_space_basis(b)


def subspace_contains(space: list[Vector], v: Vector) -> bool:
    if all(x.is_zero() for x in v):
        return True
    if not space:
        return False
    return rank(space) == rank(space + [v])


def subspace_leq(sub: list[Vector], sup: list[Vector]) -> bool:
    """span(sub) ⊆ span(sup)."""
    if not sub:
        return True
    return rank(list(sup) + list(sub)) == rank(sup)


def subspace_sum(a: list[Vector], b: list[Vector]) -> list[Vector]:
    return row_space_basis(list(a) + list(b))


def subspace_intersection(a: list[Vector], b: list[Vector]) -> list[Vector]:
    """Canonical basis of span(a) ∩ span(b)."""
    if not a or not b:
        return []
    dim = len(a[0])
    # columns: coefficients on a, then on b; rows: ambient coordinates
    m = [[a[k][i] for k in range(len(a))] + [-b[k][i] for k in range(len(b))]
         for i in range(dim)]
    out = []
    for sol in nullspace(m):
        vec = [ZERO] * dim
        for k in range(len(a)):
            c = sol[k]
            if not c.is_zero():
                vec = [x + c * y for x, y in zip(vec, a[k])]
        out.append(vec)
    return row_space_basis(out)
