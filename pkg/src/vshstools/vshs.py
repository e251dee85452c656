"""Semi-infinite Hodge structures over the formal disc.

Two presentations of the same data and the translations between them:

* ReesModule: a free module over scalars[[u]] with a connection allowed a
  first-order pole in u and a sesquilinear pairing (the involution sends
  u to -u, nothing is complex-conjugated).
* GeometricVHS: a filtered flat bundle on the formal disc, the collapse
  of the grading to its parity.

Plus the normal-form machinery: formal flat gauge, Hodge-Tate splitting,
canonical coordinate, covariant extension of pairings, and the
equivalence with graded normal-form objects (DnObject).

Sign conventions are load-bearing and centralized here.  The grading
collapse evaluates u-polynomials at u = -1; the pairing additionally
picks up a factor i^{-k} in the degree k of the first argument.  That
twist is the single point where the two pictures' adjointness
conventions (skew on the Rees side, self-adjoint on the graded side)
get reconciled.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import linalg, nilpotent
from .linalg import Matrix, Vector
from .scalars import ONE, ZERO, Scalar, sqrt_exact
from .series import Series, SeriesMatrix


class NotFree(ValueError):
    """Module data does not present a free module of the stated rank."""


class InconsistentLift(ValueError):
    """The requested integer grading is incompatible with the data."""


class NotNilpotentResidue(ValueError):
    """Connection residue at q = 0 has a nonzero eigenvalue."""


class NotHodgeTate(ValueError):
    """Hodge flag and weight filtration fail to split compatibly."""


class DegreeViolation(ValueError):
    """Canonical connection has a component that is not grade-lowering."""


class NotProportional(ValueError):
    """Kodaira-Spencer component is not a scalar multiple of its value at 0."""


class ZeroKS(ValueError):
    """Kodaira-Spencer map vanishes at q = 0 (no maximal unipotency)."""


class ResidueNotCompatible(ValueError):
    """Pairing seed incompatible with the connection residue."""


class ZeroScalar(ValueError):
    """A nonzero scalar was required."""


class NoVolumeForm(ValueError):
    """Top graded piece is not one-dimensional."""


class InvariantViolation(ValueError):
    """A structural invariant of the data type fails."""


class PairingUnderdetermined(ValueError):
    """The constant-pairing constraint system is not one-dimensional."""


def _prefactor(n: int) -> Scalar:
    """(-1)^(n(n+1)/2) * i^n, the volume normalization unit."""
    sign = -1 if (n * (n + 1) // 2) % 2 else 1
    return Scalar(sign) * Scalar.i_power(n)


def _scalar_mat_eq(a: Matrix, b: Matrix) -> bool:
    return linalg.mat_eq(a, b)


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


class ReesModule:
    """Free graded module over scalars[[u]] with connection and pairing.

    conn_u / pairing_u map a u-power to the SeriesMatrix of that
    coefficient; components that are identically zero are dropped, so
    structural equality is meaningful.
    """

    __slots__ = ("degrees", "conn_u", "pairing_u", "parity", "order")

    def __init__(self, degrees: Sequence[int],
                 conn_u: Mapping[int, SeriesMatrix],
                 pairing_u: Mapping[int, SeriesMatrix],
                 parity: int,
                 order: int | None = None):
        rank = len(degrees)
        if rank == 0:
            raise NotFree("empty basis")
        if parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        kept_conn: dict[int, SeriesMatrix] = {}
        kept_pair: dict[int, SeriesMatrix] = {}
        for source, kept in ((conn_u, kept_conn), (pairing_u, kept_pair)):
            for p, mat in source.items():
                if mat.rows != rank or mat.cols != rank:
                    raise ValueError("component shape mismatch")
                if order is None:
                    order = mat.order
                elif mat.order != order:
                    raise ValueError("components must share one order")
                if not mat.is_zero():
                    kept[p] = mat
        if order is None:
            raise ValueError("order cannot be inferred from empty data")
        object.__setattr__(self, "degrees", tuple(degrees))
        object.__setattr__(self, "conn_u", kept_conn)
        object.__setattr__(self, "pairing_u", kept_pair)
        object.__setattr__(self, "parity", parity)
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("ReesModule is immutable")

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReesModule):
            return NotImplemented
        return (self.degrees, self.parity, self.order,
                self.conn_u, self.pairing_u) == \
            (other.degrees, other.parity, other.order,
             other.conn_u, other.pairing_u)

    def __repr__(self) -> str:
        return (f"ReesModule(rank={self.rank}, degrees={self.degrees}, "
                f"order={self.order})")


class GeometricVHS:
    """Filtered bundle with connection on the formal disc.

    levels2 holds twice the Hodge level of each frame vector (integers,
    so half-integral levels in odd dimension stay exact).  The frame is
    assumed adapted to the filtration: F^(>=p) is spanned over the
    series ring by the frame vectors with doubled level >= 2p.
    """

    __slots__ = ("conn", "levels2", "pairing", "parity")

    def __init__(self, conn: SeriesMatrix, levels2: Sequence[int],
                 pairing: SeriesMatrix | None, parity: int):
        if conn.rows != conn.cols:
            raise ValueError("connection must be square")
        if len(levels2) != conn.rows:
            raise ValueError("one level per frame vector required")
        if parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        lv = tuple(levels2)
        for i in range(conn.rows):
            for j in range(conn.cols):
                if lv[i] < lv[j] - 2 and not conn.entry(i, j).is_zero():
                    raise InvariantViolation(
                        f"Griffiths transversality violated at entry "
                        f"({i},{j}): level {lv[i]} < {lv[j]} - 2")
        if pairing is not None:
            if pairing.rows != conn.rows or pairing.cols != conn.cols:
                raise ValueError("pairing shape mismatch")
            if pairing.order != conn.order:
                raise ValueError("pairing and connection order mismatch")
            sign = Scalar(-1 if parity else 1)
            for i in range(conn.rows):
                for j in range(conn.cols):
                    if pairing.entry(i, j) != sign * pairing.entry(j, i):
                        raise InvariantViolation(
                            f"pairing symmetry fails at ({i},{j})")
            residual = pairing.theta_entries() - \
                (conn.transpose() * pairing + pairing * conn)
            if not residual.is_zero():
                raise InvariantViolation(
                    "pairing is not covariantly constant")
        object.__setattr__(self, "conn", conn)
        object.__setattr__(self, "levels2", lv)
        object.__setattr__(self, "pairing", pairing)
        object.__setattr__(self, "parity", parity)

    def __setattr__(self, name, value):
        raise AttributeError("GeometricVHS is immutable")

    @property
    def rank(self) -> int:
        return self.conn.rows

    @property
    def order(self) -> int:
        return self.conn.order

    @property
    def parity_split(self) -> tuple[int, int]:
        even = sum(1 for l in self.levels2 if l % 2 == 0)
        return even, self.rank - even

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeometricVHS):
            return NotImplemented
        return (self.conn, self.levels2, self.pairing, self.parity) == \
            (other.conn, other.levels2, other.pairing, other.parity)

    def __repr__(self) -> str:
        return (f"GeometricVHS(rank={self.rank}, levels2={self.levels2}, "
                f"order={self.order})")


class DnObject:
    """Graded normal-form object: (V, <.,.>, A(q)).

    Basis vectors are grouped by degree in ascending order, so index 0
    is the volume direction (degree -n).  The stored pairing carries the
    i-power twist already; concretely that makes A(0) skew for it, which
    is what self-adjointness in the sesquilinear sense amounts to after
    the twist.
    """

    __slots__ = ("n", "graded_dims", "degrees", "pairing0", "a_series")

    def __init__(self, n: int, graded_dims: Mapping[int, int],
                 pairing0: Matrix, a_series: SeriesMatrix):
        if n < 0:
            raise InvariantViolation("dimension must be nonnegative")
        dims = {int(k): int(d) for k, d in graded_dims.items() if d}
        for k, d in dims.items():
            if d < 0:
                raise InvariantViolation("negative graded dimension")
            if k < -n or k > n:
                raise InvariantViolation(
                    f"grading must be concentrated in [-{n}, {n}]; "
                    f"found degree {k}")
        if dims.get(-n, 0) != 1:
            raise InvariantViolation("V_{-n} must be one-dimensional")
        degrees: list[int] = []
        for k in sorted(dims):
            degrees.extend([k] * dims[k])
        rank = len(degrees)
        if a_series.rows != rank or a_series.cols != rank:
            raise InvariantViolation("A matrix size disagrees with grading")
        if len(pairing0) != rank or any(len(r) != rank for r in pairing0):
            raise InvariantViolation("pairing size disagrees with grading")

        for i in range(rank):
            for j in range(rank):
                if degrees[i] != degrees[j] + 2 and \
                        not a_series.entry(i, j).is_zero():
                    raise InvariantViolation(
                        f"A must have pure degree +2; entry ({i},{j}) "
                        f"maps degree {degrees[j]} to {degrees[i]}")
                if degrees[i] + degrees[j] != 0 and \
                        not pairing0[i][j].is_zero():
                    raise InvariantViolation(
                        f"pairing must have degree 0; entry ({i},{j}) "
                        f"pairs degrees {degrees[i]} and {degrees[j]}")

        sign = Scalar(-1 if n % 2 else 1)
        for i in range(rank):
            for j in range(rank):
                if pairing0[i][j] != sign * pairing0[j][i]:
                    raise InvariantViolation(
                        f"pairing symmetry <a,b> = (-1)^n <b,a> fails "
                        f"at ({i},{j})")
        if linalg.try_inverse(pairing0) is None:
            raise InvariantViolation("pairing must be nondegenerate")

        a0 = a_series.at0()
        for k in range(1, n + 1):
            if dims.get(k, 0) != dims.get(-k, 0):
                raise InvariantViolation(
                    f"graded dimensions at degrees {k} and {-k} differ")
        power = linalg.identity(rank)
        for k in range(1, n + 1):
            power = linalg.mat_mul(power, a0)
            d = dims.get(k, 0)
            if d == 0:
                continue
            rows = [i for i in range(rank) if degrees[i] == k]
            cols = [j for j in range(rank) if degrees[j] == -k]
            block = [[power[i][j] for j in cols] for i in rows]
            if linalg.rank(block) != d:
                raise InvariantViolation(
                    f"A(0)^{k} is not an isomorphism V_{-k} -> V_{k}")

        # self-adjointness of A(0) in the sesquilinear sense: with the
        # twisted pairing stored here the matrix condition is skewness
        at_p = linalg.mat_mul(linalg.transpose(a0), pairing0)
        p_a = linalg.mat_mul(pairing0, a0)
        if not linalg.is_zero_matrix(linalg.mat_add(at_p, p_a)):
            raise InvariantViolation(
                "A(0) is not self-adjoint with respect to the pairing")

        if n >= 1:
            rows = [i for i in range(rank) if degrees[i] == -n + 2]
            col = degrees.index(-n)
            for i in rows:
                e = a_series.entry(i, col)
                if any(not c.is_zero() for c in e.coeffs[1:]):
                    raise InvariantViolation(
                        "the V_{-n} -> V_{-n+2} component of A must be "
                        "constant")

        object.__setattr__(self, "n", n)
        object.__setattr__(self, "graded_dims", dims)
        object.__setattr__(self, "degrees", tuple(degrees))
        object.__setattr__(self, "pairing0",
                           tuple(tuple(row) for row in pairing0))
        object.__setattr__(self, "a_series", a_series)

    def __setattr__(self, name, value):
        raise AttributeError("DnObject is immutable")

    @property
    def rank(self) -> int:
        return len(self.degrees)

    @property
    def order(self) -> int:
        return self.a_series.order

    @property
    def volume_index(self) -> int:
        return self.degrees.index(-self.n)

    def pairing0_matrix(self) -> Matrix:
        return [list(row) for row in self.pairing0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DnObject):
            return NotImplemented
        return (self.n, self.degrees, self.pairing0, self.a_series) == \
            (other.n, other.degrees, other.pairing0, other.a_series)

    def __repr__(self) -> str:
        return f"DnObject(n={self.n}, degrees={self.degrees})"


class CanonicalConnection(NamedTuple):
    frame: SeriesMatrix
    a_series: SeriesMatrix
    levels2: tuple[int, ...]


@dataclass(frozen=True)
class NormalFormReport:
    mirror_coordinate: Series
    gauge: SeriesMatrix
    dn: DnObject
    volume_index: int


# ---------------------------------------------------------------------------
# gauge calculus
# ---------------------------------------------------------------------------


def gauge_transform(b: SeriesMatrix, g: SeriesMatrix) -> SeriesMatrix:
    """Connection matrix in the frame g: g^-1 b g - g^-1 (theta g)."""
    g_inv = g.inverse()
    return g_inv * (b * g) - g_inv * g.theta_entries()


def _ad(n_mat: Matrix, x: Matrix) -> Matrix:
    return linalg.mat_sub(linalg.mat_mul(n_mat, x), linalg.mat_mul(x, n_mat))


def formal_flat_gauge(b: SeriesMatrix) -> SeriesMatrix:
    """Unique U with U(0) = I and theta U = b U - U N, N = b(0).

    The order-k step inverts (k - ad_N); ad_N is nilpotent because N is,
    so the inverse is a terminating Neumann sum.
    """
    n_mat = b.at0()
    dim = b.rows
    try:
        nilpotent.nilpotency_index(n_mat)
    except nilpotent.NotNilpotent as exc:
        raise NotNilpotentResidue(str(exc)) from exc
    order = b.order
    b_coeffs = [b.coefficient_matrix(k) for k in range(order)]
    u_coeffs: list[Matrix] = [linalg.identity(dim)]
    cap = 2 * dim + 2
    for k in range(1, order):
        phi = linalg.zeros(dim, dim)
        for j in range(1, k + 1):
            phi = linalg.mat_add(
                phi, linalg.mat_mul(b_coeffs[j], u_coeffs[k - j]))
        inv_k = Scalar(1) / Scalar(k)
        term = phi
        acc = linalg.zeros(dim, dim)
        factor = inv_k
        steps = 0
        while not linalg.is_zero_matrix(term):
            acc = linalg.mat_add(acc, linalg.mat_scale(term, factor))
            term = _ad(n_mat, term)
            factor = factor * inv_k
            steps += 1
            if steps > cap:
                raise NotNilpotentResidue("ad of the residue does not "
                                          "terminate")
        u_coeffs.append(acc)
    return SeriesMatrix(
        [[Series([u_coeffs[k][i][j] for k in range(order)], order)
          for j in range(dim)] for i in range(dim)])


# ---------------------------------------------------------------------------
# Hodge-Tate splitting and canonical form
# ---------------------------------------------------------------------------


def hodge_tate_split(g: GeometricVHS) -> tuple[SeriesMatrix,
                                               tuple[int, ...]]:
    """Frame of the graded splitting, expressed in the flat frame.

    Returns (P, levels2) where column j of P spans the intersection of
    F^(>= p_j) with the flat extension of the weight filtration, p_j
    the j-th entry of levels2 (weakly decreasing).  The gauge of the
    constant residue by P is the canonical connection.
    """
    dim = g.rank
    order = g.order
    u = formal_flat_gauge(g.conn)
    n_mat = g.conn.at0()

    flag: dict[int, list[Vector]] = {}
    for level in sorted(set(g.levels2)):
        flag[level] = [
            [ONE if i == j else ZERO for i in range(dim)]
            for j in range(dim) if g.levels2[j] >= level
        ]
    try:
        pieces = nilpotent.graded_splitting(n_mat, flag)
    except nilpotent.NotSplit as exc:
        raise NotHodgeTate(
            f"flag and weight filtration do not split at q = 0: {exc}"
        ) from exc

    col_levels: list[int] = []
    p0_cols: list[Vector] = []
    for level in sorted(pieces, reverse=True):
        for v in pieces[level]:
            col_levels.append(level)
            p0_cols.append(v)
    if len(p0_cols) != dim:
        raise NotHodgeTate("graded pieces do not assemble to a frame")
    p0 = [[p0_cols[j][i] for j in range(dim)] for i in range(dim)]
    if linalg.try_inverse(p0) is None:
        raise NotHodgeTate("assembled frame is singular at q = 0")

    t_mat = u.scalar_right_mul(p0)
    t_coeffs = [t_mat.coefficient_matrix(k) for k in range(order)]

    # columns of the output, as coefficient vectors per q-order
    out_cols: list[list[Vector]] = []
    solver_cache: dict[int, tuple[list[int], list[int], Matrix]] = {}
    for j in range(dim):
        pj = col_levels[j]
        if pj not in solver_cache:
            low_rows = [i for i in range(dim) if g.levels2[i] < pj]
            low_cols = [c for c in range(dim) if col_levels[c] < pj]
            if len(low_rows) != len(low_cols):
                raise NotHodgeTate("flag and splitting sizes disagree")
            s_inv: Matrix | None = None
            if low_rows:
                s = [[p0[i][c] for c in low_cols] for i in low_rows]
                s_inv = linalg.try_inverse(s)
                if s_inv is None:
                    raise NotHodgeTate(
                        f"transversality fails below level {pj}")
            solver_cache[pj] = (low_rows, low_cols, s_inv)
        low_rows, low_cols, s_inv = solver_cache[pj]

        # z holds piece-frame coordinates per q-order
        z: list[Vector] = [[ONE if c == j else ZERO for c in range(dim)]]
        for m in range(1, order):
            zm = [ZERO] * dim
            if low_rows:
                rhs = []
                for i in low_rows:
                    s_val = ZERO
                    for l in range(1, m + 1):
                        row = t_coeffs[l][i]
                        prev = z[m - l]
                        for c in range(dim):
                            if not prev[c].is_zero():
                                s_val = s_val + row[c] * prev[c]
                    rhs.append(-s_val)
                corr = linalg.mat_vec(s_inv, rhs)
                for idx, c in enumerate(low_cols):
                    zm[c] = corr[idx]
            z.append(zm)
        out_cols.append([linalg.mat_vec(p0, zk) for zk in z])

    p_series = SeriesMatrix(
        [[Series([out_cols[j][k][i] for k in range(order)], order)
          for j in range(dim)] for i in range(dim)])

    # paranoia: each column must actually lie in its flag step
    check = u * p_series
    for j in range(dim):
        for i in range(dim):
            if g.levels2[i] < col_levels[j] and \
                    not check.entry(i, j).is_zero():
                raise NotHodgeTate(
                    "splitting residual is nonzero; flag does not extend")
    return p_series, tuple(col_levels)


def to_canonical_connection(g: GeometricVHS) -> CanonicalConnection:
    """Gauge to the frame where the connection is grade-lowering.

    The returned frame is cumulative from the input frame; a_series is
    the connection matrix in it, guaranteed to have entries only on
    blocks dropping the doubled level by exactly 2.
    """
    p, levels = hodge_tate_split(g)
    u = formal_flat_gauge(g.conn)
    order = g.order
    n_const = SeriesMatrix.from_scalar_matrix(g.conn.at0(), order)
    a = gauge_transform(n_const, p)
    for i in range(g.rank):
        for j in range(g.rank):
            if levels[i] != levels[j] - 2 and not a.entry(i, j).is_zero():
                raise DegreeViolation(
                    f"canonical connection entry ({i},{j}) relates levels "
                    f"{levels[j]} -> {levels[i]}")
    return CanonicalConnection(frame=u * p, a_series=a, levels2=levels)


def _ks_component(a: SeriesMatrix,
                  levels2: Sequence[int]) -> tuple[Series, int, list[int]]:
    """Kodaira-Spencer column data: (h, top column, next-piece rows)."""
    top = max(levels2)
    top_cols = [j for j, l in enumerate(levels2) if l == top]
    if len(top_cols) != 1:
        raise NotProportional(
            "top graded piece is not one-dimensional; the canonical "
            "coordinate is not defined by proportionality")
    col = top_cols[0]
    rows = [i for i, l in enumerate(levels2) if l == top - 2]
    comps = [a.entry(i, col) for i in rows]
    ref = None
    for s in comps:
        if not s.at0().is_zero():
            ref = s
            break
    if ref is None:
        raise ZeroKS("Kodaira-Spencer map vanishes at q = 0")
    h = ref * Series.constant(ref.at0().inverse(), a.order)
    for s in comps:
        if s != h * Series.constant(s.at0(), a.order):
            raise NotProportional(
                "Kodaira-Spencer component is not proportional to its "
                "value at q = 0")
    return h, col, rows


def canonical_coordinate(a: SeriesMatrix,
                         levels2: Sequence[int]) -> Series:
    """Coordinate Q(q) in which the Kodaira-Spencer map is constant.

    Normalized so Q'(0) = 1; any further scalar is the documented
    freedom and lives in rescale_coordinate.
    """
    h, _, _ = _ks_component(a, levels2)
    one = Series.one(a.order)
    return Series.coordinate(a.order) * (h - one).theta_inverse().exp()


def extend_pairing(a: SeriesMatrix, m0: Matrix, mode: str = "flat",
                   degrees: Sequence[int] | None = None) -> SeriesMatrix:
    """Covariantly constant extension of a constant pairing seed.

    mode "flat" solves theta M = A^T M + M A starting from m0, which
    requires the residue to be skew for m0.  mode "dn" is the graded
    picture: the precondition is self-adjointness of the residue, the
    i-power twist by `degrees` converts to the flat problem and back.
    """
    if mode == "dn":
        if degrees is None:
            raise ValueError("mode 'dn' needs the degree list")
        a0 = a.at0()
        if not _scalar_mat_eq(linalg.mat_mul(linalg.transpose(a0), m0),
                              linalg.mat_mul(m0, a0)):
            raise ResidueNotCompatible(
                "residue is not self-adjoint for the seed pairing")
        twist = [Scalar.i_power(k) for k in degrees]
        m0_tw = [[m0[i][j] * twist[j] for j in range(len(degrees))]
                 for i in range(len(degrees))]
        solved = extend_pairing(a, m0_tw, mode="flat")
        untw = [t.inverse() for t in twist]
        return SeriesMatrix(
            [[solved.entry(i, j) * untw[j] for j in range(len(degrees))]
             for i in range(len(degrees))])
    if mode != "flat":
        raise ValueError(f"unknown mode {mode!r}")

    dim = a.rows
    order = a.order
    a0 = a.at0()
    check = linalg.mat_add(
        linalg.mat_mul(linalg.transpose(a0), m0), linalg.mat_mul(m0, a0))
    if not linalg.is_zero_matrix(check):
        raise ResidueNotCompatible(
            "A(0)^T M0 + M0 A(0) != 0; the constant term cannot start a "
            "covariantly constant pairing")
    a0t = linalg.transpose(a0)
    a_coeffs = [a.coefficient_matrix(k) for k in range(order)]
    m_coeffs: list[Matrix] = [linalg.copy_matrix(m0)]
    cap = 2 * dim + 2
    for k in range(1, order):
        phi = linalg.zeros(dim, dim)
        for j in range(1, k + 1):
            ajt = linalg.transpose(a_coeffs[j])
            phi = linalg.mat_add(phi, linalg.mat_add(
                linalg.mat_mul(ajt, m_coeffs[k - j]),
                linalg.mat_mul(m_coeffs[k - j], a_coeffs[j])))
        inv_k = Scalar(1) / Scalar(k)
        term = phi
        acc = linalg.zeros(dim, dim)
        factor = inv_k
        steps = 0
        while not linalg.is_zero_matrix(term):
            acc = linalg.mat_add(acc, linalg.mat_scale(term, factor))
            term = linalg.mat_add(linalg.mat_mul(a0t, term),
                                  linalg.mat_mul(term, a0))
            factor = factor * inv_k
            steps += 1
            if steps > cap:
                raise ResidueNotCompatible(
                    "residue action is not nilpotent; the recursion "
                    "does not terminate")
        m_coeffs.append(acc)
    return SeriesMatrix(
        [[Series([m_coeffs[k][i][j] for k in range(order)], order)
          for j in range(dim)] for i in range(dim)])


def pairing_grading_check(m0: Matrix,
                          degrees: Sequence[int]) -> dict[str, object]:
    """Block-pattern report: antidiagonal support, nondegenerate blocks."""
    failures: list[str] = []
    antidiagonal = True
    for i, ki in enumerate(degrees):
        for j, kj in enumerate(degrees):
            if ki + kj != 0 and not m0[i][j].is_zero():
                antidiagonal = False
                failures.append(
                    f"entry ({i},{j}) pairs degrees {ki} and {kj}")
    nondeg = True
    for k in sorted({abs(d) for d in degrees}):
        rows = [i for i, d in enumerate(degrees) if d == k]
        cols = [j for j, d in enumerate(degrees) if d == -k]
        if not rows and not cols:
            continue
        if len(rows) != len(cols):
            nondeg = False
            failures.append(f"degrees {k} and {-k} have unequal dimensions")
            continue
        block = [[m0[i][j] for j in cols] for i in rows]
        if rows and linalg.try_inverse(block) is None:
            nondeg = False
            failures.append(f"block pairing degrees {k} and {-k} is "
                            "degenerate")
    return {"antidiagonal": antidiagonal,
            "nondegenerate_blocks": nondeg,
            "failures": failures}


def _solve_pairing0(a0: Matrix, degrees: Sequence[int],
                    parity: int) -> Matrix:
    """Constant pairing seed: antidiagonal pattern, (-1)^n symmetry,
    skew-compatible with the residue; must be unique up to scale."""
    dim = len(degrees)
    sign = Scalar(-1 if parity else 1)
    slots: list[tuple[int, int]] = []
    for i in range(dim):
        for j in range(i, dim):
            if degrees[i] + degrees[j] != 0:
                continue
            if i == j and parity == 1:
                continue  # forced zero by skew symmetry
            slots.append((i, j))
    if not slots:
        raise PairingUnderdetermined("no admissible pairing entries")

    def assemble(values: Sequence[Scalar]) -> Matrix:
        m = linalg.zeros(dim, dim)
        for (i, j), v in zip(slots, values):
            m[i][j] = v
            if i != j:
                m[j][i] = sign * v
        return m

    rows: list[Vector] = []
    a0t = linalg.transpose(a0)
    for s in range(len(slots)):
        basis_vals = [ONE if t == s else ZERO for t in range(len(slots))]
        m = assemble(basis_vals)
        res = linalg.mat_add(linalg.mat_mul(a0t, m), linalg.mat_mul(m, a0))
        rows.append([res[i][j] for i in range(dim) for j in range(dim)])
    coeff_matrix = [[rows[s][e] for s in range(len(slots))]
                    for e in range(dim * dim)]
    kernel = linalg.nullspace(coeff_matrix)
    if len(kernel) != 1:
        raise PairingUnderdetermined(
            f"constant pairing solution space has dimension {len(kernel)}, "
            "expected 1")
    m0 = assemble(kernel[0])
    if linalg.try_inverse(m0) is None:
        raise PairingUnderdetermined("the unique constant pairing is "
                                     "degenerate")
    return m0


# ---------------------------------------------------------------------------
# the normal-form functors
# ---------------------------------------------------------------------------


def to_normal_form(g: GeometricVHS, normalization: Scalar | None = None, *,
                   volume_basis: bool = False) -> NormalFormReport:
    """Canonical coordinates + graded frame -> DnObject.

    normalization, when given, prescribes the volume of the output: the
    top pairing value becomes (-1)^(n(n+1)/2) i^n times it.  If the
    input carries a pairing the volume vector is rescaled to achieve
    that; if the pairing is solved for, the pairing itself is scaled
    (its overall scalar is exactly the solved-for freedom).

    volume_basis additionally rebases along powers of A(0), which needs
    one-dimensional graded pieces; it is what makes the middle entry of
    a threefold's connection literally the Yukawa series over the
    volume.
    """
    canon = to_canonical_connection(g)
    order = g.order
    h, _, _ = _ks_component(canon.a_series, canon.levels2)
    one = Series.one(order)
    mirror = Series.coordinate(order) * (h - one).theta_inverse().exp()
    q_of = mirror.reverse()
    j_factor = h.compose(q_of).inverse()
    a_new = canon.a_series.compose_entries(q_of).map_entries(
        lambda e: e * j_factor)
    frame = canon.frame
    levels = list(canon.levels2)
    dim = len(levels)

    if volume_basis:
        if len(set(levels)) != dim:
            raise ValueError(
                "volume basis requires one-dimensional graded pieces")
        a0 = a_new.at0()
        scale = [ONE]
        for j in range(dim - 1):
            s = a0[j + 1][j]
            if s.is_zero():
                raise InvariantViolation(
                    "A(0) does not generate the frame from the volume "
                    "vector")
            scale.append(scale[-1] * s)
        c_mat = [[scale[i] if i == j else ZERO for j in range(dim)]
                 for i in range(dim)]
        c_inv = [[scale[i].inverse() if i == j else ZERO
                  for j in range(dim)] for i in range(dim)]
        a_new = a_new.scalar_left_mul(c_inv).scalar_right_mul(c_mat)
        frame = frame.scalar_right_mul(c_mat)

    n = max(levels)
    degrees = [-l for l in levels]
    parity = g.parity
    if n % 2 != parity:
        raise InvariantViolation(
            "top level parity disagrees with the stated dimension parity")

    pairing_supplied = g.pairing is not None
    if pairing_supplied:
        transported = (frame.transpose() * g.pairing * frame)\
            .compose_entries(q_of)
        residual = transported.theta_entries() - \
            (a_new.transpose() * transported + transported * a_new)
        if not residual.is_zero():
            raise InvariantViolation(
                "transported pairing is not covariantly constant in the "
                "canonical frame")
        m_series = transported
        m0 = m_series.at0()
    else:
        m0 = _solve_pairing0(a_new.at0(), degrees, parity)
        m_series = extend_pairing(a_new, m0, mode="flat")

    vol = 0  # columns are in descending level order
    partner_cands = [j for j, l in enumerate(levels) if l == -n]
    if len(partner_cands) != 1:
        raise InvariantViolation("degree n piece is not one-dimensional")
    partner = partner_cands[0]

    if normalization is not None:
        target_norm = Scalar.of(normalization)
        if target_norm.is_zero():
            raise ZeroScalar("volume normalization must be nonzero")
        target = _prefactor(n) * target_norm
        current = m0[vol][partner]
        if current.is_zero():
            raise InvariantViolation("top pairing value vanishes")
        ratio = target / current
        if not pairing_supplied:
            m_series = m_series * ratio
            m0 = [[x * ratio for x in row] for row in m0]
        else:
            if vol == partner:
                lam = sqrt_exact(ratio)
                if lam is None:
                    raise InvariantViolation(
                        "normalization is not attainable over Gaussian "
                        "rationals")
            else:
                lam = ratio
            d_mat = [[(lam if i == vol else ONE) if i == j else ZERO
                      for j in range(dim)] for i in range(dim)]
            d_inv = [[(lam.inverse() if i == vol else ONE) if i == j
                      else ZERO for j in range(dim)] for i in range(dim)]
            a_new = a_new.scalar_left_mul(d_inv).scalar_right_mul(d_mat)
            m_series = SeriesMatrix(
                [[m_series.entry(i, j) *
                  ((lam if i == vol else ONE) * (lam if j == vol else ONE))
                  for j in range(dim)] for i in range(dim)])
            m0 = m_series.at0()
            frame = frame.scalar_right_mul(d_mat)

    dims: dict[int, int] = {}
    for k in degrees:
        dims[k] = dims.get(k, 0) + 1
    dn = DnObject(n=n, graded_dims=dims, pairing0=m0, a_series=a_new)
    return NormalFormReport(mirror_coordinate=mirror, gauge=frame,
                            dn=dn, volume_index=vol)


def from_normal_form(d: DnObject) -> ReesModule:
    """The Rees-module incarnation of a graded normal-form object.

    Beyond the constructor's pointwise invariants this demands the
    pairing compatibility at every q-order (the compatible pairing on
    the module is u-independent exactly then); objects failing it do
    not produce a covariantly constant pairing and are rejected.
    """
    p0 = d.pairing0_matrix()
    order = d.order
    residual = d.a_series.transpose().scalar_right_mul(p0) + \
        d.a_series.scalar_left_mul(p0)
    if not residual.is_zero():
        raise InvariantViolation(
            "A(q) must be self-adjoint for the pairing at every order to "
            "define a module pairing")
    conn = {-1: -d.a_series}
    rank = d.rank
    m_untw = [[p0[i][j] * Scalar.i_power(-d.degrees[j])
               for j in range(rank)] for i in range(rank)]
    pairing = {0: SeriesMatrix.from_scalar_matrix(m_untw, order)}
    return ReesModule(d.degrees, conn, pairing, d.n % 2, order=order)


def rees_to_geometric(r: ReesModule) -> GeometricVHS:
    """Collapse the integer grading to its parity.

    u-polynomial values are evaluated at u = -1; the pairing entry in
    degrees (k_i, k_j) additionally picks up i^(-k_i).
    """
    rank = r.rank
    if rank == 0 or rank != len(r.degrees):
        raise NotFree("degree list does not present a basis")
    order = r.order
    conn = SeriesMatrix.zeros(rank, rank, order)
    for p, mat in r.conn_u.items():
        sign = Scalar(-1 if p % 2 else 1)
        conn = conn + mat * sign
    pairing = SeriesMatrix.zeros(rank, rank, order)
    for p, mat in r.pairing_u.items():
        sign = Scalar(-1 if p % 2 else 1)
        pairing = pairing + mat * sign
    twist = [Scalar.i_power(-k) for k in r.degrees]
    pairing = SeriesMatrix(
        [[pairing.entry(i, j) * twist[i] for j in range(rank)]
         for i in range(rank)])
    levels2 = [-k for k in r.degrees]
    return GeometricVHS(conn=conn, levels2=levels2, pairing=pairing,
                        parity=r.parity)


def geometric_to_rees(g: GeometricVHS,
                      degree_choice: Sequence[int] | None = None
                      ) -> ReesModule:
    """Inverse of the collapse: place each entry at its forced u-power."""
    levels = g.levels2
    canonical = [-l for l in levels]
    if degree_choice is not None:
        if list(degree_choice) != canonical:
            raise InconsistentLift(
                "degree choice must invert the stored Hodge levels")
    degrees = canonical
    if g.pairing is None:
        raise ValueError("a pairing is required to lift to a Rees module")
    rank = g.rank
    order = g.order
    conn_comp: dict[int, list[list[Series]]] = {}
    pair_comp: dict[int, list[list[Series]]] = {}
    zero = Series.zero(order)

    def put(target: dict[int, list[list[Series]]], p: int, i: int, j: int,
            value: Series) -> None:
        if p not in target:
            target[p] = [[zero] * rank for _ in range(rank)]
        target[p][i][j] = value

    for i in range(rank):
        for j in range(rank):
            entry = g.conn.entry(i, j)
            if entry.is_zero():
                continue
            diff = degrees[j] - degrees[i]
            if diff % 2 != 0:
                raise InconsistentLift(
                    f"connection entry ({i},{j}) mixes parities")
            p = diff // 2
            if p < -1:
                raise InconsistentLift(
                    f"connection entry ({i},{j}) needs u^{p}")
            sign = Scalar(-1 if p % 2 else 1)
            put(conn_comp, p, i, j, entry * sign)
    for i in range(rank):
        for j in range(rank):
            entry = g.pairing.entry(i, j)
            if entry.is_zero():
                continue
            s = degrees[i] + degrees[j]
            if s % 2 != 0:
                raise InconsistentLift(
                    f"pairing entry ({i},{j}) mixes parities")
            p = s // 2
            if p < 0:
                raise InconsistentLift(
                    f"pairing entry ({i},{j}) needs u^{p}")
            sign = Scalar(-1 if p % 2 else 1)
            put(pair_comp, p, i, j, entry * sign * Scalar.i_power(
                degrees[i]))
    conn_u = {p: SeriesMatrix(m) for p, m in conn_comp.items()}
    pairing_u = {p: SeriesMatrix(m) for p, m in pair_comp.items()}
    return ReesModule(degrees, conn_u, pairing_u, g.parity, order=order)


def verify_prevhs(r: ReesModule) -> dict[str, bool]:
    """Axiom report for a Rees module; never raises."""
    degrees = r.degrees
    rank = r.rank
    report: dict[str, bool] = {}

    report["u_valuation"] = all(p >= -1 for p in r.conn_u)

    grading_ok = True
    for p, mat in r.conn_u.items():
        for i in range(rank):
            for j in range(rank):
                if not mat.entry(i, j).is_zero() and \
                        2 * p != degrees[j] - degrees[i]:
                    grading_ok = False
    report["grading"] = grading_ok

    report["flatness"] = True  # one-dimensional base: nothing to check

    pair_deg_ok = all(p >= 0 for p in r.pairing_u)
    for p, mat in r.pairing_u.items():
        for i in range(rank):
            for j in range(rank):
                if not mat.entry(i, j).is_zero() and \
                        2 * p != degrees[i] + degrees[j]:
                    pair_deg_ok = False
    report["pairing_degree"] = pair_deg_ok

    sym_ok = True
    for p, mat in r.pairing_u.items():
        star = Scalar(-1 if p % 2 else 1)
        for i in range(rank):
            for j in range(rank):
                want = mat.entry(j, i) * \
                    (Scalar(-1 if (r.parity + degrees[i]) % 2 else 1) * star)
                if mat.entry(i, j) != want:
                    sym_ok = False
    report["pairing_symmetry"] = sym_ok

    # theta P = C^T P + P C*, as Laurent polynomials in u
    conn_t = {p: m.transpose() for p, m in r.conn_u.items()}
    conn_star = {p: m * Scalar(-1 if p % 2 else 1)
                 for p, m in r.conn_u.items()}
    residual: dict[int, SeriesMatrix] = {
        p: m.theta_entries() for p, m in r.pairing_u.items()}

    def accumulate(p: int, mat: SeriesMatrix) -> None:
        if p in residual:
            residual[p] = residual[p] - mat
        else:
            residual[p] = -mat

    for p1, ct in conn_t.items():
        for p2, pm in r.pairing_u.items():
            accumulate(p1 + p2, ct * pm)
    for p1, pm in r.pairing_u.items():
        for p2, cs in conn_star.items():
            accumulate(p1 + p2, pm * cs)
    report["covariant_constancy"] = all(m.is_zero()
                                        for m in residual.values())

    lead = linalg.zeros(rank, rank)
    for i in range(rank):
        for j in range(rank):
            s = degrees[i] + degrees[j]
            if s % 2 != 0 or s < 0:
                continue
            p = s // 2
            if p in r.pairing_u:
                lead[i][j] = r.pairing_u[p].entry(i, j).at0()
    report["nondegenerate_at_0"] = linalg.try_inverse(lead) is not None
    return report


def rescale_coordinate(d: DnObject, c: Scalar) -> DnObject:
    """Substitute Q -> Q/c in the connection; everything else fixed."""
    c = Scalar.of(c)
    if c.is_zero():
        raise ZeroScalar("coordinate rescale by zero")
    return DnObject(n=d.n, graded_dims=d.graded_dims,
                    pairing0=d.pairing0_matrix(),
                    a_series=d.a_series.dilate(c.inverse()))


def yukawa(obj, order: int | None = None) -> Series:
    """The n-fold self-pairing (volume, nabla^n volume), normalized so a
    constant connection returns the plain volume scalar."""
    if isinstance(obj, DnObject):
        n = obj.n
        conn = obj.a_series
        pairing = SeriesMatrix.from_scalar_matrix(obj.pairing0_matrix(),
                                                  conn.order)
        vol = obj.volume_index
        if obj.graded_dims.get(-n, 0) != 1:
            raise NoVolumeForm("V_{-n} is not one-dimensional")
    elif isinstance(obj, GeometricVHS):
        if obj.pairing is None:
            raise ValueError("a pairing is required for the Yukawa series")
        n = max(obj.levels2)
        conn = obj.conn
        pairing = obj.pairing
        tops = [i for i, l in enumerate(obj.levels2) if l == n]
        if len(tops) != 1:
            raise NoVolumeForm("top Hodge piece is not one-dimensional")
        vol = tops[0]
    else:
        raise TypeError("expected a DnObject or GeometricVHS")
    if order is not None:
        conn = conn.truncate(order)
        pairing = pairing.truncate(order)
    dim = conn.rows
    vec = [Series.one(conn.order) if i == vol else Series.zero(conn.order)
           for i in range(dim)]
    for _ in range(n):
        applied = conn.apply(vec)
        vec = [v.theta() + w for v, w in zip(vec, applied)]
    total = Series.zero(conn.order)
    for j in range(dim):
        total = total + pairing.entry(vol, j) * vec[j]
    return total * _prefactor(n).inverse()
