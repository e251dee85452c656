"""Nilpotent endomorphisms: index, Jordan data, monodromy weight filtration.

The weight filtration is computed by the classical inductive recipe: peel
off ker(N^n) and im(N^n), recurse on the subquotient.  Subspaces are kept
in reduced echelon form throughout so equality is a literal comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .linalg import Matrix, Vector
from .scalars import ZERO, Scalar


class NotNilpotent(ValueError):
    """The endomorphism has no vanishing power up to the dimension."""


class NotSplit(ValueError):
    """Hodge flag and weight filtration fail to induce a direct sum."""


def nilpotency_index(n_mat: Matrix) -> int:
    """Smallest n with N^(n+1) = 0."""
    dim = len(n_mat)
    power = linalg.identity(dim)
    for n in range(dim):
        power = linalg.mat_mul(power, n_mat)
        if linalg.is_zero_matrix(power):
            return n
    raise NotNilpotent(f"N^{dim} != 0")


def jordan_partition(n_mat: Matrix) -> list[int]:
    """Jordan block sizes in decreasing order, via rank differences."""
    dim = len(n_mat)
    nilpotency_index(n_mat)  # raises if not nilpotent
    ranks = [dim]
    power = linalg.identity(dim)
    while ranks[-1] > 0:
        power = linalg.mat_mul(power, n_mat)
        ranks.append(linalg.rank(power))
    # blocks of size exactly s: r_{s-1} - 2 r_s + r_{s+1}
    ranks.append(0)
    sizes = []
    for s in range(1, len(ranks) - 1):
        count = ranks[s - 1] - 2 * ranks[s] + ranks[s + 1]
        sizes.extend([s] * count)
    return sorted(sizes, reverse=True)


@dataclass(frozen=True, eq=True)
class WeightFiltration:
    """Increasing filtration MW_{<=k}, k in [-n, n], n the nilpotency index.

    Each stored basis is in canonical reduced echelon form.  Queries
    outside the stored range clamp to the zero space below and the full
    space above, which is what the doubled-index convention needs.
    """

    center_shift: int
    dim: int
    subspaces: dict[int, list[Vector]] = field(compare=True)

    def le(self, k: int) -> list[Vector]:
        n = self.center_shift
        if k < -n:
            return []
        if k > n:
            k = n
        return [list(v) for v in self.subspaces[k]]

    def dimension_le(self, k: int) -> int:
        return len(self.le(k))

    def graded_dimension(self, k: int) -> int:
        return self.dimension_le(k) - self.dimension_le(k - 1)


def _image_basis(m: Matrix) -> list[Vector]:
    cols = [[m[i][j] for i in range(len(m))] for j in range(len(m[0]))]
    return linalg.row_space_basis(cols)


def _kernel_basis(m: Matrix) -> list[Vector]:
    return linalg.row_space_basis(linalg.nullspace(m))


def _solve_in_basis(basis: list[Vector], v: Vector) -> list[Scalar]:
    """Coordinates of v in span(basis); basis assumed independent."""
    dim = len(v)
    a = [[basis[j][i] for j in range(len(basis))] for i in range(dim)]
    x = linalg.solve(a, v)
    if x is None:
        raise ValueError("vector not in span")
    return x


def _mw_core(mat: Matrix, dim: int) -> tuple[int, dict[int, list[Vector]]]:
    if dim == 0:
        return 0, {0: []}
    n = nilpotency_index(mat)
    full = linalg.row_space_basis(
        [[Scalar(1) if i == j else ZERO for i in range(dim)]
         for j in range(dim)])
    if n == 0:
        return 0, {0: full}

    power = linalg.mat_pow(mat, n)
    k_basis = _kernel_basis(power)
    i_basis = _image_basis(power)

    # complement of im(N^n) inside ker(N^n), preferring earlier echelon
    # vectors of K for determinism
    comp: list[Vector] = []
    current = list(i_basis)
    for v in k_basis:
        extended = linalg.row_space_basis(current + [v])
        if len(extended) > len(current):
            comp.append(v)
            current = extended

    q_dim = len(comp)
    lift_cols = i_basis + comp  # basis of K, quotient coords are the tail

    # induced endomorphism on K / im(N^n)
    induced = [[ZERO] * q_dim for _ in range(q_dim)]
    for j, c in enumerate(comp):
        w = linalg.mat_vec(mat, c)
        coords = _solve_in_basis(lift_cols, w)
        for i in range(q_dim):
            induced[i][j] = coords[len(i_basis) + i]

    child_n, child_sub = _mw_core(induced, q_dim)

    def child_le(k: int) -> list[Vector]:
        if k < -child_n:
            return []
        return child_sub[min(k, child_n)]

    out: dict[int, list[Vector]] = {n: full}
    for k in range(-n, n):
        quotient_vectors = child_le(k)
        lifted = [
            [sum((coords[j] * comp[j][i] for j in range(q_dim)), ZERO)
             for i in range(dim)]
            for coords in quotient_vectors
        ]
        out[k] = linalg.row_space_basis(i_basis + lifted)
    return n, out


def weight_filtration(n_mat: Matrix) -> WeightFiltration:
    """The unique filtration with N MW_{<=k} in MW_{<=k-2} and
    N^k : Gr_k -> Gr_{-k} an isomorphism for every k >= 0."""
    dim = len(n_mat)
    n, subspaces = _mw_core(n_mat, dim)
    return WeightFiltration(center_shift=n, dim=dim, subspaces=subspaces)


def _flag_evaluator(flag: dict[int, list[Vector]], dim: int):
    """Decreasing flag p -> F^{>=p}; clamps to full below, zero above."""
    keys = sorted(flag)
    canonical = {p: linalg.row_space_basis(flag[p]) for p in keys}
    for lower, upper in zip(keys, keys[1:]):
        if not linalg.subspace_leq(canonical[upper], canonical[lower]):
            raise ValueError("flag bases are not nested")
    full = linalg.row_space_basis(
        [[Scalar(1) if i == j else ZERO for i in range(dim)]
         for j in range(dim)])

    def ge(p: int) -> list[Vector]:
        # below the lowest stated step the flag is the whole space
        if not keys or p < keys[0]:
            return full
        if p > keys[-1]:
            return []
        return canonical[min(k for k in keys if k >= p)]

    return ge, keys


def graded_splitting(
        n_mat: Matrix,
        flag: dict[int, list[Vector]]) -> dict[int, list[Vector]]:
    """Graded pieces F^{>=p} ∩ MW_{<=p}, verified to give a direct sum.

    Both refinement identities are checked: partial sums from below must
    recover the weight filtration and partial sums from above the flag.
    Raises NotSplit when either fails.
    """
    dim = len(n_mat)
    mw = weight_filtration(n_mat)
    ge, keys = _flag_evaluator(flag, dim)

    lo = min([-mw.center_shift] + keys) if keys else -mw.center_shift
    hi = max([mw.center_shift] + keys) if keys else mw.center_shift

    pieces: dict[int, list[Vector]] = {}
    assembled: list[Vector] = []
    below: list[Vector] = []
    for p in range(lo, hi + 1):
        piece = linalg.subspace_intersection(ge(p), mw.le(p))
        if piece:
            pieces[p] = piece
            assembled.extend(piece)
        below = linalg.subspace_sum(below, piece)
        if not linalg.subspace_equal(below, mw.le(p)):
            raise NotSplit(
                f"partial sums up to weight {p} miss the weight filtration")
    if len(assembled) != dim or linalg.rank(assembled) != dim:
        raise NotSplit("graded pieces do not span")
    above: list[Vector] = []
    for p in range(hi, lo - 1, -1):
        above = linalg.subspace_sum(above, pieces.get(p, []))
        if not linalg.subspace_equal(above, ge(p)):
            raise NotSplit(
                f"partial sums down to weight {p} miss the flag")
    return pieces
