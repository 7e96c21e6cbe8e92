"""Divided-power envelopes of regular sequences with the pd-adic filtration.

For ``I = (f_1, ..., f_r)`` regular in ``A = k[x]`` the envelope is
``A<y_1..y_r> / (y_i - f_i)``.  Elements are kept as :class:`PdElement`
values whose coefficients are standard monomials for ``I``; an ``I``-multiple
in a coefficient is pushed up one weight with ``f_i y^[e] = (e_i+1) y^[e+d_i]``.
Everything is computed modulo ``Fil^N``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from .linalg import Matrix, nullspace, rref
from .pd_free import PdElement, pd_gamma, pd_mul
from .poly import IdealPresentation, Polynomial, UnsupportedRing, monomials_of_degree
from .scalars import ScalarRing

Exp = tuple[int, ...]


class RegularityProbeFailed(ValueError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class UnsupportedRingModeCombination(ValueError):
    pass


class WeightOutOfRange(ValueError):
    pass


class TruncationTooSmall(ValueError):
    pass


@dataclass
class RegularQuotientPresentation:
    ring: ScalarRing
    nvars: int
    generators: list[Polynomial]
    mode: str = "triangular"
    N: int = 4
    pivots: list[int] | None = None
    degree_bound: int | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("truncation N must be positive")
        if self.mode not in ("triangular", "groebner"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "groebner" and not self.ring.is_field:
            raise UnsupportedRingModeCombination(
                f"Groebner presentations need a field, got {self.ring}")
        for g in self.generators:
            if g.ring != self.ring or g.nvars != self.nvars:
                raise ValueError(f"generator {g} is not in {self.ring}[x0..x{self.nvars - 1}]")

    @property
    def r(self) -> int:
        return len(self.generators)

    def ideal(self) -> IdealPresentation:
        if not self.generators:
            return IdealPresentation.zero(self.ring, self.nvars)
        if self.mode == "triangular":
            return IdealPresentation(self.ring, self.nvars, self.generators, "triangular",
                                     pivots=self.pivots)
        return IdealPresentation(self.ring, self.nvars, self.generators, "groebner")

    def default_degree_bound(self) -> int:
        degs = [g.degree() for g in self.generators if g]
        return max(degs, default=0) + sum(degs) + 1


# regularity probe ------------------------------------------------------------

@dataclass
class ProbeResult:
    passed: bool
    degree_bound: int
    field: ScalarRing
    witness: tuple | None = None
    witness_degree: int | None = None

    def format(self) -> str:
        if self.passed:
            return f"pass (Koszul H1 vanishes through degree {self.degree_bound} over {self.field})"
        w = ", ".join(str(c) for c in self.witness)
        return f"fail at degree {self.witness_degree}: witness ({w})"


def probe_field(ring: ScalarRing) -> ScalarRing:
    """Field over which the Koszul probe runs."""
    if ring.kind in ("Z", "Q"):
        return ScalarRing.rationals()
    return ScalarRing.prime_field(ring.p)


def _monomials_upto(nvars: int, d: int) -> list[Exp]:
    out = []
    for k in range(d + 1):
        out.extend(reversed(monomials_of_degree(nvars, k)))
    return out


def _koszul_columns(gens, nvars, level):
    """Coordinates of (a_1..a_r) with deg a_j + deg f_j <= level."""
    return [(j, e) for j, f in enumerate(gens)
            for e in _monomials_upto(nvars, level - f.degree())]


def regularity_probe(p: RegularQuotientPresentation, D: int | None = None) -> ProbeResult:
    """Bounded Koszul H1 check: every syzygy sum a_j f_j = 0 with
    deg a_j + deg f_j <= D' (D' <= D) must be a Koszul boundary."""
    K = probe_field(p.ring)
    gens = [g.change_ring(K) for g in p.generators]
    nv = p.nvars
    if D is None:
        D = p.default_degree_bound()
    degs = [g.degree() if g else 0 for g in gens]
    if D < max(degs, default=0):
        raise ValueError("degree bound below the generator degrees")
    # homogeneous syzygies are generated in their own degree; otherwise allow
    # boundaries whose top-degree parts cancel
    homogeneous = all(g.min_degree() == g.degree() for g in gens if g)
    slack = 0 if homogeneous else sum(degs)
    for level in range(max(degs, default=0), D + 1):
        cols = _koszul_columns(gens, nv, level)
        if not cols:
            continue
        rows = {e: i for i, e in enumerate(_monomials_upto(nv, level))}
        m = Matrix(K, len(rows), len(cols))
        for c, (j, e) in enumerate(cols):
            for te, tc in gens[j].mul_monomial(e).terms.items():
                m.data[rows[te]][c] = K.add(m.data[rows[te]][c], tc)
        kernel = nullspace(m)
        if not kernel:
            continue
        big = level + slack
        bcols = {key: i for i, key in enumerate(_koszul_columns(gens, nv, big))}
        bvecs = []
        r = len(gens)
        for i in range(r):
            for j in range(i + 1, r):
                for b in _monomials_upto(nv, big - degs[i] - degs[j]):
                    v = [K.zero()] * len(bcols)
                    for te, tc in gens[j].mul_monomial(b).terms.items():
                        v[bcols[(i, te)]] = K.add(v[bcols[(i, te)]], tc)
                    for te, tc in gens[i].mul_monomial(b).terms.items():
                        v[bcols[(j, te)]] = K.sub(v[bcols[(j, te)]], tc)
                    bvecs.append(v)
        echelon = _echelon(K, bvecs, len(bcols))
        for z in kernel:
            v = [K.zero()] * len(bcols)
            for c, (j, e) in enumerate(cols):
                v[bcols[(j, e)]] = z[c]
            if _reduce(K, v, echelon):
                lead = next(x for x in z if x)
                inv = K.inv(lead)
                parts = [dict() for _ in gens]
                for c, (j, e) in enumerate(cols):
                    if z[c]:
                        parts[j][e] = K.mul(inv, z[c])
                witness = tuple(Polynomial(K, nv, t) for t in parts)
                return ProbeResult(False, D, K, witness, level)
    return ProbeResult(True, D, K)


def _echelon(K: ScalarRing, vecs: list[list], width: int) -> list[tuple[int, list]]:
    """Row echelon form of ``vecs`` as (pivot column, row with unit pivot)."""
    rows = []
    if vecs:
        R, pivots = rref(Matrix(K, len(vecs), width, vecs, clean=True))
        rows = [(c, R.data[i]) for i, c in enumerate(pivots)]
    return rows


def _reduce(K: ScalarRing, v: list, echelon: list[tuple[int, list]]) -> bool:
    """True when v is not in the span of the echelon rows."""
    v = list(v)
    for c, row in echelon:
        if v[c]:
            a = v[c]
            v = [K.sub(x, K.mul(a, y)) if y else x for x, y in zip(v, row)]
    return any(v)


# envelope algebra -------------------------------------------------------------

class EnvelopeAlgebra:
    def __init__(self, presentation: RegularQuotientPresentation,
                 ideal: IdealPresentation | None = None):
        self.presentation = presentation
        self.ring = presentation.ring
        self.nvars = presentation.nvars
        self.r = presentation.r
        self.N = presentation.N
        self.ideal = ideal if ideal is not None else presentation.ideal()
        self.generators = list(presentation.generators)

    # element constructors ------------------------------------------------
    def zero(self) -> PdElement:
        return PdElement.zero(self.ring, self.nvars, self.r, self.N)

    def one(self) -> PdElement:
        return self.normal_form(PdElement.one(self.ring, self.nvars, self.r, self.N))

    def from_poly(self, f: Polynomial) -> PdElement:
        return self.normal_form(PdElement.from_poly(f, self.r, self.N))

    def y(self, i: int, k: int = 1) -> PdElement:
        """gamma_k of the i-th pd generator (the class of f_i)."""
        return PdElement.gen(self.ring, self.nvars, self.r, self.N, i, k)

    def monomial(self, e: Exp, c=1) -> PdElement:
        return self.normal_form(PdElement.monomial(self.ring, self.nvars, self.r, self.N, e, c))

    # normal forms ----------------------------------------------------------
    def _push(self, work, e, quotients, scale=1):
        for i, q in enumerate(quotients):
            if not q:
                continue
            e2 = tuple(k + 1 if j == i else k for j, k in enumerate(e))
            if sum(e2) >= self.N:
                continue
            term = q.scale(scale * (e[i] + 1))
            if term:
                work[e2] = work[e2] + term if e2 in work else term

    def normal_form(self, a: PdElement, rng: random.Random | None = None) -> PdElement:
        """Unique representative: coefficients reduced to standard monomials.

        With ``rng`` the reduction order (which term, which generator) is
        randomized; the result does not depend on it.
        """
        if a.ngens != self.r or a.N != self.N or a.nvars != self.nvars:
            raise ValueError("element does not belong to this envelope")
        if self.ideal.is_zero_ideal:
            return a
        work = dict(a.terms)
        out = {}
        for w in range(self.N):
            layer = sorted(e for e in work if sum(e) == w)
            if rng is not None:
                rng.shuffle(layer)
            for e in layer:
                c = work.pop(e)
                if rng is None:
                    qs, rem = self.ideal.divide(c)
                else:
                    qs, rem = self._random_divide(c, rng)
                if rem:
                    out[e] = rem
                self._push(work, e, qs)
        return PdElement(self.ring, self.nvars, self.r, self.N, out)

    def _random_divide(self, c: Polynomial, rng: random.Random):
        """Reduce arbitrary reducible terms in random order (not only leading ones)."""
        I = self.ideal
        ring = self.ring
        basis, leads = I.basis, I.leads
        bq = [dict() for _ in basis]
        p = dict(c.terms)
        while True:
            red = sorted(e for e in p if any(all(a >= b for a, b in zip(e, lm)) for lm in leads))
            if not red:
                break
            e = rng.choice(red)
            hits = [i for i, lm in enumerate(leads) if all(a >= b for a, b in zip(e, lm))]
            i = rng.choice(hits)
            lm = leads[i]
            shift = tuple(a - b for a, b in zip(e, lm))
            q = ring.mul(p[e], ring.inv(basis[i].terms[lm]))
            bq[i][shift] = ring.add(bq[i].get(shift, ring.zero()), q)
            for ge, gc in basis[i].terms.items():
                te = tuple(a + b for a, b in zip(ge, shift))
                v = ring.sub(p.get(te, ring.zero()), ring.mul(q, gc))
                if v:
                    p[te] = v
                else:
                    p.pop(te, None)
        rem = Polynomial(ring, self.nvars, p, clean=True)
        bqs = [Polynomial(ring, self.nvars, q) for q in bq]
        if I.mode == "triangular":
            return bqs, rem
        gq = [Polynomial.zero(ring, self.nvars) for _ in self.generators]
        for q, b in zip(bqs, basis):
            if q:
                for i, cof in enumerate(I._basis_in_generators(b)):
                    gq[i] = gq[i] + q * cof
        return gq, rem

    def is_normal(self, a: PdElement) -> bool:
        return all(self.ideal.normal_form(c) == c for c in a.terms.values())

    # algebra ----------------------------------------------------------------
    def add(self, a, b):
        return a + b

    def mul(self, a: PdElement, b: PdElement) -> PdElement:
        return self.normal_form(pd_mul(a, b))

    def gamma(self, n: int, a: PdElement) -> PdElement:
        return self.normal_form(pd_gamma(n, a))

    def filtration_level(self, a: PdElement) -> int:
        """Largest n with a in Fil^n (N for zero)."""
        a = self.normal_form(a)
        w = a.min_weight()
        return self.N if w is None else w

    def in_fil(self, a: PdElement, n: int) -> bool:
        return self.filtration_level(a) >= n

    # dumps ------------------------------------------------------------------
    def weight_basis(self, n: int) -> list[Exp]:
        if not 0 <= n < self.N:
            raise WeightOutOfRange(f"weight {n} outside [0, {self.N})")
        return list(reversed(monomials_of_degree(self.r, n)))

    def dump(self) -> str:
        lines = [f"envelope over {self.ring} in {self.nvars} variables, "
                 f"generators {[str(g) for g in self.generators]}, N={self.N}"]
        for n in range(self.N):
            basis = self.weight_basis(n)
            lines.append(f"weight {n}: " + ", ".join(_mono(e) for e in basis))
        lines.append("multiplication:")
        for n in range(self.N):
            for e in self.weight_basis(n):
                for m in range(n, self.N - n):
                    for f in self.weight_basis(m):
                        if m == n and f < e:
                            continue
                        prod = pd_mul(self.y_monomial(e), self.y_monomial(f))
                        lines.append(f"{_mono(e)} * {_mono(f)} = {prod.format()}")
        return "\n".join(lines)

    def y_monomial(self, e: Exp) -> PdElement:
        return PdElement.monomial(self.ring, self.nvars, self.r, self.N, e)


def _mono(e: Exp) -> str:
    parts = [f"g{i}^[{k}]" for i, k in enumerate(e) if k]
    return " * ".join(parts) if parts else "1"


def build_envelope(p: RegularQuotientPresentation, probe: bool = True) -> EnvelopeAlgebra:
    if p.mode == "groebner" and not p.ring.is_field:
        raise UnsupportedRingModeCombination(f"Groebner mode over {p.ring}")
    if p.ring.kind in ("Fp", "Zpn") and p.mode != "triangular" and not p.ring.is_field:
        raise UnsupportedRingModeCombination("only Triangular presentations over Z/p^N")
    if probe and p.generators:
        res = regularity_probe(p, p.degree_bound)
        if not res.passed:
            raise RegularityProbeFailed(f"sequence is not regular: {res.format()}", res)
    return EnvelopeAlgebra(p)


# graded pieces -----------------------------------------------------------------

@dataclass
class GradedPiece:
    weight: int
    basis: list[Exp]
    quotient_ideal: IdealPresentation
    norm_images: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.basis)


def envelope_graded_piece(E: EnvelopeAlgebra, n: int) -> GradedPiece:
    """gr^n as a free A/I-module on the weight-n pd monomials.

    ``norm_images`` records, for each weight-n exponent e, the leading
    coefficient of the class of f^e (which is prod e_i! times y^[e]).
    """
    basis = E.weight_basis(n)
    images = {}
    for e in basis:
        fe = Polynomial.one(E.ring, E.nvars)
        for g, k in zip(E.generators, e):
            fe = fe * g**k
        nf = E.from_poly(fe).weight_component(n)
        images[e] = nf.coefficient(e)
    return GradedPiece(n, basis, E.ideal, images)


def graded_rank_formula(r: int, n: int) -> int:
    return comb(r + n - 1, n)


# square-zero extension -----------------------------------------------------------

@dataclass
class SquareZeroData:
    conormal_basis: list[Polynomial]         # classes of f_1..f_r in I/I^2
    quotient_module_basis: list[str]         # A/I^2 over A/I: 1, y_1..y_r
    quotient_basis: list[Polynomial] | None  # a k-basis of A/I^2 when A/I is finite
    checks: list[tuple[str, bool]]

    @property
    def conormal_rank(self) -> int:
        return len(self.conormal_basis)

    @property
    def ok(self) -> bool:
        return all(v for _, v in self.checks)


def weight_one_split(E: EnvelopeAlgebra, a: Polynomial):
    """Normal form of a mod Fil^2 as (s_0, [s_1..s_r]) with a = s_0 + sum s_j f_j mod I^2."""
    nf = E.from_poly(a)
    zero = Polynomial.zero(E.ring, E.nvars)
    s0 = nf.coefficient((0,) * E.r)
    s = [nf.terms.get(tuple(1 if j == i else 0 for j in range(E.r)), zero) for i in range(E.r)]
    return s0, s


def connecting_class_holds(E: EnvelopeAlgebra, a: Polynomial) -> bool:
    """d(a) - d(s_0) == sum_j s_j df_j modulo I * Omega^1."""
    s0, s = weight_one_split(E, a)
    for i in range(E.nvars):
        lhs = a.partial_derivative(i) - s0.partial_derivative(i)
        rhs = Polynomial.zero(E.ring, E.nvars)
        for sj, f in zip(s, E.generators):
            rhs = rhs + sj * f.partial_derivative(i)
        if not E.ideal.contains(lhs - rhs):
            return False
    return True


def square_zero_truncation(E: EnvelopeAlgebra, test_degree: int = 3,
                           finite_cap: int = 12) -> SquareZeroData:
    if E.N < 2:
        raise TruncationTooSmall("square-zero data needs N >= 2")
    T = EnvelopeAlgebra(RegularQuotientPresentation(
        E.ring, E.nvars, E.generators, E.presentation.mode, 2, E.presentation.pivots,
        E.presentation.degree_bound), E.ideal)
    checks = []
    # f_i has class y_i in Env/Fil^2, so I/I^2 = Fil^1/Fil^2 is free on them
    for i, f in enumerate(E.generators):
        checks.append((f"class of f{i} is y{i}", T.from_poly(f) == T.y(i)))
    # the weight-one map a -> sum s_j [f_j] matches the universal derivation
    mons = _monomials_upto(E.nvars, test_degree)
    for e in mons:
        a = Polynomial.monomial(E.ring, E.nvars, e)
        checks.append((f"connecting class at {a}", connecting_class_holds(T, a)))
    std = _standard_basis(E.ideal, finite_cap)
    qbasis = None
    if std is not None:
        qbasis = [Polynomial.monomial(E.ring, E.nvars, e) for e in std]
        qbasis += [Polynomial.monomial(E.ring, E.nvars, e) * f
                   for f in E.generators for e in std]
    return SquareZeroData(
        list(E.generators), ["1"] + [f"y{i}" for i in range(E.r)], qbasis, checks)


def _standard_basis(ideal: IdealPresentation, cap: int) -> list[Exp] | None:
    """All standard monomials if A/I is finite (none of degree ``cap``)."""
    out = []
    for d in range(cap + 1):
        layer = ideal.standard_monomials(d)
        if d == cap and layer:
            return None
        out.extend(reversed(layer))
    return out


__all__ = [
    "RegularQuotientPresentation", "EnvelopeAlgebra", "ProbeResult", "GradedPiece",
    "SquareZeroData", "build_envelope", "envelope_graded_piece", "graded_rank_formula",
    "square_zero_truncation", "regularity_probe", "weight_one_split",
    "connecting_class_holds", "RegularityProbeFailed", "UnsupportedRingModeCombination",
    "WeightOutOfRange", "TruncationTooSmall", "probe_field", "UnsupportedRing",
]
