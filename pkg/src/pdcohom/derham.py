"""Algebraic De Rham complexes of polynomial rings.

Forms are sums ``f_S dx_S`` with ``S`` a strictly increasing index tuple.
The complex is graded by ``deg(f dx_S) = deg f + |S|``, which ``d``
preserves, so each polynomial degree gives a finite slice complex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .envelope import UnsupportedRingModeCombination
from .linalg import (BoundedCochainComplex, Matrix, ModuleInvariants, cohomology_at,
                     cohomology_representatives)
from .poly import IdealPresentation, NotTriangular, Polynomial, monomials_of_degree
from .scalars import ScalarRing

Idx = tuple[int, ...]


def _insert_sign(i: int, S: Idx) -> tuple[int, Idx] | None:
    """dx_i ^ dx_S = sign * dx_{S + i}; None if i in S."""
    if i in S:
        return None
    k = sum(1 for s in S if s < i)
    return (-1) ** k, tuple(sorted(S + (i,)))


def _merge_sign(S: Idx, T: Idx) -> tuple[int, Idx] | None:
    """dx_S ^ dx_T = sign * dx_{S u T}; None if they overlap."""
    if set(S) & set(T):
        return None
    inv = sum(1 for s in S for t in T if s > t)
    return (-1) ** inv, tuple(sorted(S + T))


class DeRhamForm:
    __slots__ = ("ring", "nvars", "parts")

    def __init__(self, ring: ScalarRing, nvars: int, parts=None):
        self.ring = ring
        self.nvars = nvars
        clean = {}
        for S, f in (parts or {}).items():
            S = tuple(S)
            if list(S) != sorted(set(S)) or any(not 0 <= s < nvars for s in S):
                raise ValueError(f"index tuple {S} is not strictly increasing in range")
            if f:
                clean[S] = f
        self.parts: dict[Idx, Polynomial] = clean

    @classmethod
    def function(cls, f: Polynomial) -> DeRhamForm:
        return cls(f.ring, f.nvars, {(): f})

    @classmethod
    def dx(cls, ring, nvars, *idx) -> DeRhamForm:
        out = cls(ring, nvars, {(): Polynomial.one(ring, nvars)})
        for i in idx:
            out = wedge(out, cls(ring, nvars, {(i,): Polynomial.one(ring, nvars)}))
        return out

    def form_degrees(self) -> set[int]:
        return {len(S) for S in self.parts}

    def is_zero(self) -> bool:
        return not self.parts

    def __bool__(self):
        return bool(self.parts)

    def __eq__(self, other):
        return (isinstance(other, DeRhamForm) and self.ring == other.ring
                and self.nvars == other.nvars and self.parts == other.parts)

    def __hash__(self):
        return hash((self.ring, self.nvars, frozenset(self.parts.items())))

    def _like(self, parts):
        return DeRhamForm(self.ring, self.nvars, parts)

    def __add__(self, other: DeRhamForm) -> DeRhamForm:
        parts = dict(self.parts)
        for S, f in other.parts.items():
            parts[S] = parts[S] + f if S in parts else f
        return self._like(parts)

    def __neg__(self):
        return self._like({S: -f for S, f in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> DeRhamForm:
        if isinstance(c, Polynomial):
            return self._like({S: f * c for S, f in self.parts.items()})
        return self._like({S: f.scale(c) for S, f in self.parts.items()})

    def format(self) -> str:
        if not self.parts:
            return "0"
        out = []
        for S in sorted(self.parts, key=lambda S: (len(S), S)):
            f = self.parts[S]
            dx = "^".join(f"dx{i}" for i in S)
            fs = f.format()
            if not S:
                out.append(fs if len(f) == 1 else f"({fs})")
            elif fs == "1":
                out.append(dx)
            else:
                out.append(f"{fs if len(f) == 1 else f'({fs})'}*{dx}")
        return " + ".join(out)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"DeRhamForm({self.format()!r})"


def d_dR(w: DeRhamForm) -> DeRhamForm:
    parts: dict[Idx, Polynomial] = {}
    for S, f in w.parts.items():
        for i in range(w.nvars):
            hit = _insert_sign(i, S)
            if hit is None:
                continue
            df = f.partial_derivative(i)
            if not df:
                continue
            sign, T = hit
            term = df if sign > 0 else -df
            parts[T] = parts[T] + term if T in parts else term
    return w._like(parts)


def wedge(a: DeRhamForm, b: DeRhamForm) -> DeRhamForm:
    if a.ring != b.ring or a.nvars != b.nvars:
        raise ValueError("forms live over different rings")
    parts: dict[Idx, Polynomial] = {}
    for S, f in a.parts.items():
        for T, g in b.parts.items():
            hit = _merge_sign(S, T)
            if hit is None:
                continue
            sign, U = hit
            term = f * g
            if sign < 0:
                term = -term
            parts[U] = parts[U] + term if U in parts else term
    return a._like(parts)


def random_form(rng, ring, nvars, p, max_degree, nterms=3, coeff_bound=5) -> DeRhamForm:
    from .poly import random_polynomial
    subsets = list(combinations(range(nvars), p))
    parts = {}
    for _ in range(nterms):
        S = rng.choice(subsets)
        f = random_polynomial(rng, ring, nvars, max_degree, 2, coeff_bound)
        parts[S] = parts[S] + f if S in parts else f
    return DeRhamForm(ring, nvars, parts)


# slices --------------------------------------------------------------------

@dataclass
class DeRhamSlice:
    ring: ScalarRing
    nvars: int
    degree: int
    bases: dict[int, list[tuple[Idx, tuple]]]
    complex: BoundedCochainComplex

    def index(self, p: int) -> dict:
        return {b: i for i, b in enumerate(self.bases[p])}

    def vector_to_form(self, p: int, v: Sequence) -> DeRhamForm:
        parts: dict[Idx, dict] = {}
        for (S, e), c in zip(self.bases[p], v):
            if c:
                parts.setdefault(S, {})[e] = c
        return DeRhamForm(self.ring, self.nvars,
                          {S: Polynomial(self.ring, self.nvars, t) for S, t in parts.items()})

    def form_to_vector(self, p: int, w: DeRhamForm) -> list:
        idx = self.index(p)
        v = [self.ring.zero()] * len(idx)
        for S, f in w.parts.items():
            for e, c in f.terms.items():
                v[idx[(S, e)]] = self.ring.add(v[idx[(S, e)]], c)
        return v


def slice_basis(nvars: int, d: int, p: int) -> list[tuple[Idx, tuple]]:
    if d - p < 0:
        return []
    mons = monomials_of_degree(nvars, d - p)
    return [(S, e) for S in combinations(range(nvars), p) for e in mons]


def slice_differential(ring: ScalarRing, nvars: int, d: int, p: int) -> Matrix:
    src = slice_basis(nvars, d, p)
    tgt = {b: i for i, b in enumerate(slice_basis(nvars, d, p + 1))}
    m = Matrix(ring, len(tgt), len(src))
    for c, (S, e) in enumerate(src):
        for i in range(nvars):
            if not e[i]:
                continue
            hit = _insert_sign(i, S)
            if hit is None:
                continue
            sign, T = hit
            e2 = tuple(k - 1 if j == i else k for j, k in enumerate(e))
            r = tgt[(T, e2)]
            m.data[r][c] = ring.add(m.data[r][c], ring(sign * e[i]))
    return m


def derham_slice(ring: ScalarRing, nvars: int, d: int, stage: int = 0) -> DeRhamSlice:
    """Slice of polynomial degree d of Omega^{>= stage}."""
    bases = {p: (slice_basis(nvars, d, p) if p >= stage else []) for p in range(nvars + 1)}
    diffs = {}
    for p in range(nvars):
        if p >= stage and bases[p] and bases[p + 1]:
            diffs[p] = slice_differential(ring, nvars, d, p)
    C = BoundedCochainComplex(ring, 0, nvars, {p: len(b) for p, b in bases.items()}, diffs,
                              {p: [_label(b) for b in bs] for p, bs in bases.items()})
    return DeRhamSlice(ring, nvars, d, bases, C)


def hodge_stage(n: int, ring: ScalarRing, nvars: int, d: int) -> DeRhamSlice:
    """Brutal truncation Omega^{>= n} in polynomial degree d."""
    if n < 0:
        raise ValueError("stage must be nonnegative")
    return derham_slice(ring, nvars, d, stage=n)


def hodge_graded(n: int, ring: ScalarRing, nvars: int, d: int) -> DeRhamSlice:
    """gr^n of the Hodge filtration: Omega^n in degree n with zero differential."""
    bases = {p: (slice_basis(nvars, d, p) if p == n else []) for p in range(nvars + 1)}
    C = BoundedCochainComplex(ring, 0, nvars, {p: len(b) for p, b in bases.items()})
    return DeRhamSlice(ring, nvars, d, bases, C)


def _label(b) -> str:
    S, e = b
    mono = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e) if k) or "1"
    return mono + "".join(f"*dx{i}" for i in S)


# cohomology tables -----------------------------------------------------------

@dataclass
class CohomologyRow:
    coh_degree: int
    poly_degree: int
    invariants: ModuleInvariants
    representatives: list[str] = field(default_factory=list)

    def csv_fields(self) -> list[str]:
        return [str(self.coh_degree), str(self.poly_degree), str(self.invariants.free_rank),
                " ".join(str(t) for t in self.invariants.torsion),
                " ; ".join(self.representatives)]


CSV_HEADER = ["coh_degree", "poly_degree", "free_rank", "invariant_factors", "representative"]


def slice_cohomology(ring: ScalarRing, nvars: int, d: int,
                     representatives: bool = True) -> list[CohomologyRow]:
    sl = derham_slice(ring, nvars, d)
    rows = []
    for n in range(nvars + 1):
        inv = cohomology_at(sl.complex, n)
        reps = []
        if representatives and not inv.is_zero() and (ring.kind != "Zpn" or ring.is_field):
            reps = [sl.vector_to_form(n, v).format()
                    for v in cohomology_representatives(sl.complex, n)]
        rows.append(CohomologyRow(n, d, inv, reps))
    return rows


def derham_cohomology(ring: ScalarRing, nvars: int, D: int, representatives: bool = True,
                      map_fn: Callable = map) -> list[CohomologyRow]:
    """Table (n, d) -> H^n of the degree-d slice, for d = 0..D."""
    if D < 0:
        raise ValueError("degree cap must be nonnegative")
    per_slice = map_fn(lambda d: slice_cohomology(ring, nvars, d, representatives),
                       range(D + 1))
    rows = [r for chunk in per_slice for r in chunk]
    rows.sort(key=lambda r: (r.poly_degree, r.coh_degree))
    return rows


# Euler homotopy oracle ----------------------------------------------------------

def euler_contraction(w: DeRhamForm) -> DeRhamForm:
    """Interior product with the Euler field sum x_i d/dx_i."""
    parts: dict[Idx, Polynomial] = {}
    for S, f in w.parts.items():
        for k, s in enumerate(S):
            T = S[:k] + S[k + 1:]
            term = f * Polynomial.var(w.ring, w.nvars, s)
            if k % 2:
                term = -term
            parts[T] = parts[T] + term if T in parts else term
    return w._like(parts)


def euler_homotopy(w: DeRhamForm, d: int) -> DeRhamForm:
    """h = contraction / d on a form of total degree d >= 1 (rational coefficients)."""
    if d < 1:
        raise ValueError("the homotopy lives on slices of positive degree")
    return euler_contraction(w).scale(Fraction(1, d))


def homotopy_identity_holds(nvars: int, d: int) -> bool:
    """dh + hd = id on every basis form of the degree-d slice over Q."""
    Q = ScalarRing.rationals()
    for p in range(nvars + 1):
        for S, e in slice_basis(nvars, d, p):
            w = DeRhamForm(Q, nvars, {S: Polynomial.monomial(Q, nvars, e)})
            lhs = d_dR(euler_homotopy(w, d)) + euler_homotopy(d_dR(w), d)
            if lhs != w:
                return False
    return True


def poincare_by_homotopy(nvars: int, D: int) -> dict[tuple[int, int], int]:
    """Cohomology dimensions over Q forced by the homotopy.

    On slices d >= 1 every cocycle w equals d(h w), so all groups vanish;
    slice 0 is just the constants.
    """
    out = {}
    for d in range(D + 1):
        if d == 0:
            for n in range(nvars + 1):
                out[(n, 0)] = 1 if n == 0 else 0
            continue
        ok = homotopy_identity_holds(nvars, d)
        for n in range(nvars + 1):
            out[(n, d)] = 0 if ok else -1
    return out


# Kähler differentials of presented algebras --------------------------------------

@dataclass
class KahlerPresentation:
    """Omega^1_{A/k} = (+)_i A dx_i modulo the Jacobian rows of the generators."""

    ring: ScalarRing
    nvars: int
    ideal: IdealPresentation
    relations: list[list[Polynomial]]

    @property
    def is_free(self) -> bool:
        return all(not c for row in self.relations for c in row)

    @property
    def free_rank(self) -> int | None:
        return self.nvars if self.is_free else None

    def format(self) -> str:
        if not self.relations or self.is_free:
            return f"free of rank {self.nvars} on " + (
                ", ".join(f"dx{i}" for i in range(self.nvars)) or "nothing")
        rows = ["(" + ", ".join(str(c) for c in row) + ")" for row in self.relations]
        return "cokernel of " + "; ".join(rows)


def _as_ideal(ring, nvars, generators=None, ideal=None, mode="auto"):
    if ideal is not None:
        return ideal
    gens = list(generators or [])
    if not gens:
        return IdealPresentation.zero(ring, nvars)
    if mode == "auto":
        try:
            return IdealPresentation(ring, nvars, gens, "triangular")
        except NotTriangular:
            mode = "groebner"
    if mode == "groebner" and not ring.is_field:
        raise UnsupportedRingModeCombination(f"Groebner mode over {ring}")
    return IdealPresentation(ring, nvars, gens, mode)


def kahler_presentation(ring: ScalarRing, nvars: int, generators=None, *,
                        ideal: IdealPresentation | None = None,
                        mode: str = "auto") -> KahlerPresentation:
    I = _as_ideal(ring, nvars, generators, ideal, mode)
    rows = []
    for g in I.generators:
        rows.append([I.normal_form(g.partial_derivative(i)) for i in range(nvars)])
    return KahlerPresentation(ring, nvars, I, rows)


@dataclass
class UniversalDerivation:
    kahler: KahlerPresentation

    def d(self, a: Polynomial) -> list[Polynomial]:
        """Coefficients of da on dx_0..dx_{m-1}, reduced mod I (not mod relations)."""
        I = self.kahler.ideal
        return [I.normal_form(a.partial_derivative(i)) for i in range(self.kahler.nvars)]

    def table(self) -> dict[int, str]:
        return {i: f"dx{i}" for i in range(self.kahler.nvars)}


def universal_derivation(ring: ScalarRing, nvars: int, generators=None, *,
                         ideal: IdealPresentation | None = None,
                         mode: str = "auto") -> UniversalDerivation:
    return UniversalDerivation(kahler_presentation(ring, nvars, generators, ideal=ideal,
                                                   mode=mode))


def conormal_map(ideal: IdealPresentation, j: int) -> list[Polynomial]:
    """Image of the class of f_j in Omega^1_A (x) A/I: the reduced gradient of f_j."""
    f = ideal.generators[j]
    return [ideal.normal_form(f.partial_derivative(i)) for i in range(ideal.nvars)]


__all__ = [
    "DeRhamForm", "DeRhamSlice", "CohomologyRow", "KahlerPresentation", "UniversalDerivation",
    "d_dR", "wedge", "random_form", "slice_basis", "slice_differential", "derham_slice",
    "hodge_stage", "hodge_graded", "slice_cohomology", "derham_cohomology",
    "euler_contraction", "euler_homotopy", "homotopy_identity_holds", "poincare_by_homotopy",
    "kahler_presentation", "universal_derivation", "conormal_map", "CSV_HEADER",
    "UnsupportedRingModeCombination",
]
