"""Exact linear algebra: Smith normal form, ranks and cohomology of bounded
cochain complexes over Z, Q, F_p and Z/p^N.

Over ``Z/p^N`` a complex is read as the reduction of a complex of free
``Z_p``-modules: a differential entry of valuation >= N is indistinguishable
from zero, and the reported cohomology is the ``Z_p``-cohomology seen at that
precision (torsion ``p^a`` with ``0 < a < N``, free summands counted as copies
of ``Z/p^N``).  :func:`module_cohomology_at` gives the literal
``Z/p^N``-module instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .scalars import NoCanonicalMap, RingMismatch, ScalarRing


class DegreeOutOfRange(IndexError):
    pass


class NotAComplex(ValueError):
    pass


class Matrix:
    """Dense matrix of canonical scalars.  Maps column vectors: (rows x cols)."""

    __slots__ = ("ring", "rows", "cols", "data")

    def __init__(self, ring: ScalarRing, rows: int, cols: int, data=None, *, clean=False):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = [[ring.zero()] * cols for _ in range(rows)]
        elif clean:
            self.data = data
        else:
            self.data = [[ring(x) for x in row] for row in data]
            if len(self.data) != rows or any(len(r) != cols for r in self.data):
                raise ValueError("matrix data has the wrong shape")

    @classmethod
    def from_rows(cls, ring, rows: Sequence[Sequence]) -> Matrix:
        rows = list(rows)
        ncols = len(rows[0]) if rows else 0
        return cls(ring, len(rows), ncols, [list(r) for r in rows])

    @classmethod
    def identity(cls, ring, n) -> Matrix:
        m = cls(ring, n, n)
        for i in range(n):
            m.data[i][i] = ring.one()
        return m

    @classmethod
    def from_triplets(cls, ring, rows, cols, triplets) -> Matrix:
        m = cls(ring, rows, cols)
        for i, j, v in triplets:
            m.data[i][j] = ring.add(m.data[i][j], ring(v))
        return m

    def copy(self) -> Matrix:
        return Matrix(self.ring, self.rows, self.cols, [list(r) for r in self.data], clean=True)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.ring == other.ring
                and self.rows == other.rows and self.cols == other.cols
                and self.data == other.data)

    def is_zero(self) -> bool:
        return all(not x for row in self.data for x in row)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        mod = self.ring.modulus
        if not other.rows:
            return Matrix(self.ring, self.rows, other.cols)
        cols_other = list(zip(*other.data))
        out = []
        for row in self.data:
            nz = [(k, a) for k, a in enumerate(row) if a]
            new = []
            for col in cols_other:
                s = sum(a * col[k] for k, a in nz)
                new.append(s % mod if mod else s)
            out.append(new)
        return Matrix(self.ring, self.rows, other.cols, out, clean=True)

    def transpose(self) -> Matrix:
        return Matrix(self.ring, self.cols, self.rows,
                      [list(c) for c in zip(*self.data)] if self.rows else
                      [[] for _ in range(self.cols)], clean=True)

    def change_ring(self, target: ScalarRing) -> Matrix:
        if not self.ring.has_map_to(target):
            raise NoCanonicalMap(f"no canonical map {self.ring} -> {target}")
        return Matrix(target, self.rows, self.cols,
                      [[target(x) for x in row] for row in self.data], clean=True)

    def triplets(self) -> list[tuple[int, int, object]]:
        return [(i, j, x) for i, row in enumerate(self.data) for j, x in enumerate(row) if x]

    def to_text(self) -> str:
        """Sparse triplet text: header line then ``row col value`` per entry."""
        lines = [f"{self.rows} {self.cols} {self.ring}"]
        lines += [f"{i} {j} {x}" for i, j, x in self.triplets()]
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, ring: ScalarRing) -> Matrix:
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        r, c = map(int, lines[0].split()[:2])
        trip = []
        for ln in lines[1:]:
            i, j, v = ln.split()
            trip.append((int(i), int(j), _parse_scalar(v)))
        return cls.from_triplets(ring, r, c, trip)

    def __repr__(self):
        return f"Matrix({self.ring}, {self.data})"


def _parse_scalar(s: str):
    from fractions import Fraction
    return Fraction(s) if "/" in s else int(s)


# elimination engine ---------------------------------------------------------

class _Eliminator:
    """Row/column operations on a work matrix, mirrored onto attached matrices.

    ``left``: receives the row ops (becomes U with U A V = D).
    ``right``: receives the column ops as column ops (becomes V).
    ``right_inv``: receives the inverse column ops as row ops (V^-1 X).
    ``left_inv``: receives the inverse row ops as column ops (Y U^-1).
    """

    def __init__(self, ring, a, left=None, right=None, right_inv=None, left_inv=None):
        self.ring = ring
        self.a = a
        self.left = left
        self.right = right
        self.right_inv = right_inv
        self.left_inv = left_inv
        self.mod = ring.modulus

    def _red(self, x):
        return x % self.mod if self.mod else x

    # row operations: R_i += c R_j
    def row_add(self, i, j, c):
        if not c:
            return
        red = self._red
        for m in (self.a, self.left):
            if m is not None:
                ri, rj = m[i], m[j]
                for k, v in enumerate(rj):
                    if v:
                        ri[k] = red(ri[k] + c * v)
        if self.left_inv is not None:  # columns: C_j -= c C_i
            for row in self.left_inv:
                if row[i]:
                    row[j] = red(row[j] - c * row[i])

    def row_swap(self, i, j):
        if i == j:
            return
        for m in (self.a, self.left):
            if m is not None:
                m[i], m[j] = m[j], m[i]
        if self.left_inv is not None:
            for row in self.left_inv:
                row[i], row[j] = row[j], row[i]

    def row_scale(self, i, u):
        """Multiply row i by a unit u."""
        red = self._red
        uinv = self.ring.inv(u)
        for m in (self.a, self.left):
            if m is not None:
                m[i] = [red(u * v) for v in m[i]]
        if self.left_inv is not None:
            for row in self.left_inv:
                row[i] = red(row[i] * uinv)

    # column operations: C_i += c C_j
    def col_add(self, i, j, c):
        if not c:
            return
        red = self._red
        for m in (self.a, self.right):
            if m is not None:
                for row in m:
                    if row[j]:
                        row[i] = red(row[i] + c * row[j])
        if self.right_inv is not None:  # rows: R_j -= c R_i
            ri, rj = self.right_inv[i], self.right_inv[j]
            for k, v in enumerate(ri):
                if v:
                    rj[k] = red(rj[k] - c * v)

    def col_swap(self, i, j):
        if i == j:
            return
        for m in (self.a, self.right):
            if m is not None:
                for row in m:
                    row[i], row[j] = row[j], row[i]
        if self.right_inv is not None:
            m = self.right_inv
            m[i], m[j] = m[j], m[i]

    def col_scale(self, i, u):
        red = self._red
        uinv = self.ring.inv(u)
        for m in (self.a, self.right):
            if m is not None:
                for row in m:
                    row[i] = red(row[i] * u)
        if self.right_inv is not None:
            self.right_inv[i] = [red(v * uinv) for v in self.right_inv[i]]


def _pivot_measure(ring: ScalarRing):
    if ring.kind == "Z":
        return abs
    if ring.kind == "Zpn":
        return ring.valuation
    return lambda x: 0


def _diagonalize(el: _Eliminator) -> list:
    """Reduce el.a to Smith form in place; returns the nonzero diagonal."""
    ring = el.ring
    a = el.a
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    measure = _pivot_measure(ring)
    diag = []
    t = 0
    while t < min(nrows, ncols):
        best = None
        for i in range(t, nrows):
            row = a[i]
            for j in range(t, ncols):
                x = row[j]
                if x:
                    m = measure(x)
                    if best is None or m < best[0]:
                        best = (m, i, j)
                        if m == 0 or (ring.kind == "Z" and m == 1):
                            break
            if best is not None and (best[0] == 0 or (ring.kind == "Z" and best[0] == 1)):
                break
        if best is None:
            break
        _, i, j = best
        el.row_swap(t, i)
        el.col_swap(t, j)
        if ring.kind == "Z":
            _clear_integer(el, t, nrows, ncols)
        else:
            piv = a[t][t]
            if ring.kind == "Zpn":
                v = ring.valuation(piv)
                unit = piv // ring.p**v
                el.row_scale(t, ring.inv(unit))
            else:
                el.row_scale(t, ring.inv(piv))
            piv = a[t][t]
            for i in range(t + 1, nrows):
                x = a[i][t]
                if x:
                    q = x // piv if ring.kind == "Zpn" else ring.div(x, piv)
                    el.row_add(i, t, ring.neg(q))
            for j in range(t + 1, ncols):
                x = a[t][j]
                if x:
                    q = x // piv if ring.kind == "Zpn" else ring.div(x, piv)
                    el.col_add(j, t, ring.neg(q))
        diag.append(a[t][t])
        t += 1
    return diag


def _clear_integer(el: _Eliminator, t: int, nrows: int, ncols: int):
    # each round moves the smallest entry of column/row t to the pivot and
    # reduces the rest with nearest-integer quotients, so |pivot| strictly drops
    a = el.a
    while True:
        while True:
            rows = [i for i in range(t + 1, nrows) if a[i][t]]
            cols = [j for j in range(t + 1, ncols) if a[t][j]]
            if not rows and not cols:
                break
            i_min = min(rows, key=lambda i: abs(a[i][t]), default=None)
            j_min = min(cols, key=lambda j: abs(a[t][j]), default=None)
            piv = abs(a[t][t])
            if i_min is not None and abs(a[i_min][t]) < piv:
                el.row_swap(t, i_min)
            elif j_min is not None and abs(a[t][j_min]) < piv:
                el.col_swap(t, j_min)
            piv = a[t][t]
            for i in range(t + 1, nrows):
                if a[i][t]:
                    el.row_add(i, t, -_round_div(a[i][t], piv))
            for j in range(t + 1, ncols):
                if a[t][j]:
                    el.col_add(j, t, -_round_div(a[t][j], piv))
        piv = a[t][t]
        if piv < 0:
            el.row_scale(t, -1)
            piv = -piv
        # divisibility of the remaining block
        bad = None
        for i in range(t + 1, nrows):
            row = a[i]
            for j in range(t + 1, ncols):
                if row[j] % piv:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is None:
            return
        el.row_add(t, bad, 1)


def _round_div(x: int, y: int) -> int:
    q, r = divmod(x, y)
    if 2 * abs(r) > abs(y):
        q += 1 if (r > 0) == (y > 0) else -1
    return q


def _normalize_diag(ring: ScalarRing, diag: list) -> list:
    if ring.kind == "Z":
        return [abs(x) for x in diag]
    if ring.kind == "Zpn":
        return [ring.p**ring.valuation(x) for x in diag]
    return [ring.one() for _ in diag]


def smith_normal_form(m: Matrix, transforms: bool = False):
    """Invariant factors of ``m`` (nonzero diagonal, each dividing the next).

    With ``transforms=True`` also returns (U, V), invertible, with
    ``U m V`` diagonal.  Over fields the diagonal is all ones (rank only).
    """
    work = [list(r) for r in m.data]
    if transforms:
        left = [list(r) for r in Matrix.identity(m.ring, m.rows).data]
        right = [list(r) for r in Matrix.identity(m.ring, m.cols).data]
        el = _Eliminator(m.ring, work, left=left, right=right)
    else:
        el = _Eliminator(m.ring, work)
    diag = _diagonalize(el)
    diag = _normalize_diag(m.ring, diag)
    if transforms:
        U = Matrix(m.ring, m.rows, m.rows, el.left, clean=True)
        V = Matrix(m.ring, m.cols, m.cols, el.right, clean=True)
        return diag, (U, V)
    return diag, None


def rank(m: Matrix) -> int:
    return len(smith_normal_form(m)[0])


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over a field; returns (R, pivot columns)."""
    ring = m.ring
    if not ring.is_field:
        raise ValueError(f"row reduction needs a field, got {ring}")
    a = [list(r) for r in m.data]
    pivots = []
    row = 0
    for col in range(m.cols):
        piv = next((i for i in range(row, m.rows) if a[i][col]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = ring.inv(a[row][col])
        a[row] = [ring.mul(inv, x) for x in a[row]]
        for i in range(m.rows):
            if i != row and a[i][col]:
                c = a[i][col]
                a[i] = [ring.sub(x, ring.mul(c, y)) for x, y in zip(a[i], a[row])]
        pivots.append(col)
        row += 1
        if row == m.rows:
            break
    return Matrix(ring, m.rows, m.cols, a, clean=True), pivots


def nullspace(m: Matrix) -> list[list]:
    """Basis of {v : m v = 0} over a field, one vector per free column."""
    r, pivots = rref(m)
    ring = m.ring
    free = [c for c in range(m.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [ring.zero()] * m.cols
        v[f] = ring.one()
        for i, pc in enumerate(pivots):
            v[pc] = ring.neg(r.data[i][f])
        basis.append(v)
    return basis


# cohomology ----------------------------------------------------------------

@dataclass(frozen=True)
class ModuleInvariants:
    """A finitely generated module as free rank plus invariant factors.

    Over ``Z/p^N`` "free" summands are copies of ``Z/p^N``; torsion factors are
    ``p^a`` with ``0 < a < N``.
    """

    ring: ScalarRing
    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.torsion} do not form a chain")
        if self.ring.is_field and self.torsion:
            raise ValueError("a vector space has no torsion")
        if self.free_rank < 0:
            raise NotAComplex("negative free rank: complex is not a precision-N lift")

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def tensor_fp_dim(self, p: int) -> int:
        """dim_{F_p} of M (x) F_p."""
        return self.free_rank + sum(1 for t in self.torsion if t % p == 0)

    def tor_fp_dim(self, p: int) -> int:
        """dim_{F_p} Tor_1(M, F_p) over Z / Z_p (free summands contribute nothing)."""
        return sum(1 for t in self.torsion if t % p == 0)

    def format(self) -> str:
        base = {"Z": "Z", "Q": "Q", "Fp": f"F{self.ring.p}",
                "Zpn": f"Z/{self.ring.modulus}"}[self.ring.kind]
        parts = []
        if self.free_rank:
            parts.append(base if self.free_rank == 1 else f"{base}^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return self.format()


def _split_diag(ring: ScalarRing, diag: list) -> tuple[int, list]:
    """(number of nonzero pivots, non-unit factors)."""
    torsion = [d for d in diag if not ring.is_unit(d)]
    return len(diag), torsion


@dataclass
class BoundedCochainComplex:
    """Finite cochain complex of free modules in degrees lo..hi.

    ``differentials[n]`` maps degree n to n+1 as a (dim_{n+1} x dim_n)
    matrix; missing entries are zero maps.
    """

    ring: ScalarRing
    lo: int
    hi: int
    dims: dict[int, int]
    differentials: dict[int, Matrix] = field(default_factory=dict)
    labels: dict[int, list[str]] = field(default_factory=dict)
    check: bool = True

    def __post_init__(self):
        for n in range(self.lo, self.hi + 1):
            self.dims.setdefault(n, 0)
        for n, d in self.differentials.items():
            if not (self.lo <= n < self.hi):
                raise DegreeOutOfRange(f"differential out of range at {n}")
            if d.ring != self.ring:
                raise RingMismatch("differential over a different ring")
            if d.cols != self.dims[n] or d.rows != self.dims[n + 1]:
                raise ValueError(f"d_{n} has shape {d.rows}x{d.cols}, expected "
                                 f"{self.dims[n + 1]}x{self.dims[n]}")
        if self.check:
            for n in range(self.lo, self.hi - 1):
                a, b = self.differentials.get(n), self.differentials.get(n + 1)
                if a is not None and b is not None and not (b @ a).is_zero():
                    raise NotAComplex(f"d_{n + 1} d_{n} != 0")

    def d(self, n: int) -> Matrix:
        if n in self.differentials:
            return self.differentials[n]
        return Matrix(self.ring, self.dims.get(n + 1, 0), self.dims.get(n, 0))

    def cohomology_at(self, n: int) -> ModuleInvariants:
        return cohomology_at(self, n)

    def cohomology(self) -> dict[int, ModuleInvariants]:
        return {n: cohomology_at(self, n) for n in range(self.lo, self.hi + 1)}

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * self.dims[n] for n in range(self.lo, self.hi + 1))

    def base_change(self, target: ScalarRing) -> BoundedCochainComplex:
        return base_change_complex(self, target)


def cohomology_at(C: BoundedCochainComplex, n: int) -> ModuleInvariants:
    if not (C.lo <= n <= C.hi):
        raise DegreeOutOfRange(f"degree {n} outside [{C.lo}, {C.hi}]")
    ring = C.ring
    dim = C.dims[n]
    dn = C.d(n)
    dprev = C.d(n - 1)
    if ring.kind == "Zpn" and not ring.is_field:
        rk_out, _ = _split_diag(ring, smith_normal_form(dn)[0])
        rk_in, tors = _split_diag(ring, smith_normal_form(dprev)[0])
        return ModuleInvariants(ring, dim - rk_out - rk_in, tuple(tors))
    if ring.is_field:
        r_out = rank(dn)
        r_in = rank(dprev)
        return ModuleInvariants(ring, dim - r_out - r_in)
    # Z: ker d_n is a direct summand; read im d_{n-1} inside it
    work = [list(r) for r in dn.data]
    x = [list(r) for r in dprev.data]
    el = _Eliminator(ring, work, right_inv=x)
    s = len(_diagonalize(el))
    assert all(not v for row in x[:s] for v in row)
    b = Matrix(ring, dim - s, dprev.cols, x[s:], clean=True)
    rk, tors = _split_diag(ring, smith_normal_form(b)[0])
    return ModuleInvariants(ring, dim - s - rk, tuple(tors))


def cohomology_representatives(C: BoundedCochainComplex, n: int) -> list[list]:
    """Cocycles (coordinate vectors in degree n) generating H^n.

    Torsion generators come first in the order of the invariant factors,
    then free generators; generators of trivial summands are dropped.
    Fields and Z only.
    """
    ring = C.ring
    if ring.kind == "Zpn" and not ring.is_field:
        raise NotImplementedError("representatives are computed over Z and fields")
    dim = C.dims[n]
    dn, dprev = C.d(n), C.d(n - 1)
    work = [list(r) for r in dn.data]
    x = [list(r) for r in dprev.data]
    right = [list(r) for r in Matrix.identity(ring, dim).data]
    el = _Eliminator(ring, work, right=right, right_inv=x)
    s = len(_diagonalize(el))
    k = dim - s
    b = [row for row in x[s:]]
    linv = [list(r) for r in Matrix.identity(ring, k).data]
    el2 = _Eliminator(ring, b, left_inv=linv)
    diag = _diagonalize(el2)
    gens = []
    for idx in range(k):
        if idx < len(diag) and ring.is_unit(diag[idx]):
            continue
        z = [linv[r][idx] for r in range(k)]
        # back to degree-n coordinates: x = V[:, s:] z
        vec = [ring.zero()] * dim
        for r in range(dim):
            acc = sum(right[r][s + q] * z[q] for q in range(k))
            vec[r] = ring(acc)
        gens.append(vec)
    return gens


def module_cohomology_at(C: BoundedCochainComplex, n: int) -> ModuleInvariants:
    """Literal ker/im as a Z/p^N-module (chain-ring computation)."""
    ring = C.ring
    if ring.kind != "Zpn" or ring.is_field:
        return cohomology_at(C, n)
    p, N = ring.p, ring.N
    dim = C.dims[n]
    dn, dprev = C.d(n), C.d(n - 1)
    work = [list(r) for r in dn.data]
    x = [list(r) for r in dprev.data]
    el = _Eliminator(ring, work, right_inv=x)
    diag = _diagonalize(el)
    vals = [ring.valuation(d) for d in diag]
    # ker D = (+)_{i<s} p^{N-a_i} Z/p^N  (+)  free part; relations presented over Z/p^N
    rel_rows = []
    ncols_rel = len(vals) + dprev.cols
    for i in range(dim):
        row = [0] * ncols_rel
        if i < len(vals):
            row[i] = p ** vals[i]
            shift = p ** (N - vals[i])
            row[len(vals):] = [v // shift for v in x[i]]
        else:
            row[len(vals):] = list(x[i])
        rel_rows.append(row)
    rel = Matrix(ring, dim, ncols_rel, rel_rows)
    rdiag = smith_normal_form(rel)[0]
    tors = [d for d in rdiag if not ring.is_unit(d)]
    free = dim - len(rdiag)
    return ModuleInvariants(ring, free, tuple(tors))


def base_change_complex(C: BoundedCochainComplex, target: ScalarRing) -> BoundedCochainComplex:
    if not C.ring.has_map_to(target):
        raise NoCanonicalMap(f"no canonical map {C.ring} -> {target}")
    return BoundedCochainComplex(
        target, C.lo, C.hi, dict(C.dims),
        {n: d.change_ring(target) for n, d in C.differentials.items()},
        dict(C.labels))


def universal_coefficients_holds(C: BoundedCochainComplex, p: int) -> list[tuple]:
    """Check dim H^n(C (x) F_p) = dim H^n(C) (x) F_p + dim Tor_1(H^{n+1}(C), F_p).

    Returns one (n, lhs, rhs) row per degree; the check passes when lhs == rhs
    everywhere.
    """
    fp = ScalarRing.prime_field(p)
    Cp = base_change_complex(C, fp)
    H = C.cohomology()
    rows = []
    for n in range(C.lo, C.hi + 1):
        lhs = cohomology_at(Cp, n).free_rank
        rhs = H[n].tensor_fp_dim(p)
        if n + 1 <= C.hi:
            rhs += H[n + 1].tor_fp_dim(p)
        rows.append((n, lhs, rhs))
    return rows
