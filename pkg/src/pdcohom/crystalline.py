"""Crystalline cohomology over Z/p^N computed through lifts, with the mod-p
comparison.

Polynomial targets ``F_p[x]`` use the De Rham slice complexes of the lift
over ``Z/p^N``.  Triangular quotient targets ``F_p[x]/(f)`` use the graded
data of the pd envelope of the lifted ideal, compared with the envelope
built directly over ``F_p``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .derham import derham_slice
from .envelope import (EnvelopeAlgebra, RegularQuotientPresentation, build_envelope,
                       graded_rank_formula)
from .linalg import ModuleInvariants, base_change_complex, cohomology_at
from .pd_free import PdElement
from .poly import IdealPresentation, NotTriangular, Polynomial
from .scalars import ScalarRing


class ComparisonFailed(AssertionError):
    def __init__(self, message, slice_=None, rows=None):
        super().__init__(message)
        self.slice = slice_
        self.rows = rows or []


class InvalidLift(ValueError):
    pass


@dataclass
class LiftSpec:
    p: int
    N: int
    nvars: int
    target: list[Polynomial] = field(default_factory=list)
    lift: list[Polynomial] = field(default_factory=list)
    pivots: list[int] | None = None
    weight_cap: int = 3

    def __post_init__(self):
        fp = ScalarRing.prime_field(self.p)
        zpn = ScalarRing.padic(self.p, self.N)
        if len(self.target) != len(self.lift):
            raise InvalidLift("target and lift have different generator counts")
        for t, l in zip(self.target, self.lift):
            if t.ring != fp or l.ring != zpn:
                raise InvalidLift(f"generators must live over {fp} and {zpn}")
            if l.change_ring(fp) != t:
                raise InvalidLift(f"{l} does not reduce to {t} mod {self.p}")
        if self.lift:
            # both presentations must be triangular with the same pivots
            try:
                lid = IdealPresentation(zpn, self.nvars, self.lift, "triangular",
                                        pivots=self.pivots)
                tid = IdealPresentation(fp, self.nvars, self.target, "triangular",
                                        pivots=lid.pivots)
            except NotTriangular as exc:
                raise InvalidLift(f"lift is not a triangular presentation: {exc}") from exc
            self.pivots = lid.pivots
            if lid.leads != tid.leads:
                raise InvalidLift("lift and target have different leading terms")

    @property
    def fp(self) -> ScalarRing:
        return ScalarRing.prime_field(self.p)

    @property
    def zpn(self) -> ScalarRing:
        return ScalarRing.padic(self.p, self.N)

    @property
    def is_polynomial(self) -> bool:
        return not self.target

    def describe(self) -> str:
        base = f"F_{self.p}[{', '.join(f'x{i}' for i in range(self.nvars))}]"
        if self.target:
            base += "/(" + ", ".join(map(str, self.target)) + ")"
        lift = f"Z/{self.p}^{self.N}"
        if self.lift:
            lift += " lift (" + ", ".join(map(str, self.lift)) + ")"
        return f"{base} via {lift}"


def default_lift(p: int, nvars: int, target=(), N: int = 2, pivots=None,
                 weight_cap: int = 3) -> LiftSpec:
    """Reinterpret the integer coefficients of the target in Z/p^N.

    Targets given over Z keep their literals (x^2 - 2 lifts to x^2 - 2);
    targets over F_p lift their canonical representatives 0..p-1.
    """
    zpn = ScalarRing.padic(p, N)
    fp = ScalarRing.prime_field(p)
    lift, reduced = [], []
    for t in target:
        if t.ring.kind == "Z":
            lift.append(t.change_ring(zpn))
            reduced.append(t.change_ring(fp))
        else:
            lift.append(t.lift_literal(zpn))
            reduced.append(t)
    return LiftSpec(p, N, nvars, reduced, lift, pivots, weight_cap)


def random_lift(spec: LiftSpec, rng: random.Random) -> LiftSpec:
    """Another valid lift: coefficients moved by p*k, plus p-multiples of
    monomials below the pivot degree in the non-pivot variables."""
    zpn, p = spec.zpn, spec.p
    pivots = spec.pivots or []
    new = []
    for g, j in zip(spec.lift, pivots):
        e_piv = g.degree_in(j)
        terms = {}
        for e, c in g.terms.items():
            terms[e] = zpn.add(c, zpn(p * rng.randrange(spec.p ** max(spec.N - 1, 0) or 1)))
        free_vars = [v for v in range(spec.nvars) if v not in pivots or v == j]
        for _ in range(rng.randint(0, 2)):
            e = [0] * spec.nvars
            for v in free_vars:
                cap = e_piv - 1 if v == j else 2
                e[v] = rng.randint(0, max(cap, 0))
            e = tuple(e)
            terms[e] = zpn.add(terms.get(e, 0), zpn(p * rng.randint(1, p)))
        new.append(Polynomial(zpn, spec.nvars, terms))
    return LiftSpec(p, spec.N, spec.nvars, list(spec.target), new, list(pivots), spec.weight_cap)


# tables -------------------------------------------------------------------------

@dataclass
class CrystallineRow:
    coh_degree: int
    poly_degree: int
    invariants: ModuleInvariants
    weight: int | None = None

    def csv_fields(self) -> list[str]:
        return [str(self.coh_degree) if self.weight is None else f"w{self.weight}",
                str(self.poly_degree), str(self.invariants.free_rank),
                " ".join(str(t) for t in self.invariants.torsion)]


def crystalline_via_lift(spec: LiftSpec, D: int, map_fn: Callable = map) -> list[CrystallineRow]:
    if spec.is_polynomial:
        def one(d):
            C = derham_slice(spec.zpn, spec.nvars, d).complex
            return [CrystallineRow(n, d, cohomology_at(C, n)) for n in range(spec.nvars + 1)]
        return [r for chunk in map_fn(one, range(D + 1)) for r in chunk]
    E = lift_envelope(spec)
    rows = []
    for n in range(spec.weight_cap):
        rk = graded_rank_formula(E.r, n)
        for d in range(D + 1):
            std = len(E.ideal.standard_monomials(d))
            rows.append(CrystallineRow(0, d, ModuleInvariants(spec.zpn, rk * std), weight=n))
    return rows


def lift_envelope(spec: LiftSpec) -> EnvelopeAlgebra:
    return build_envelope(RegularQuotientPresentation(
        spec.zpn, spec.nvars, spec.lift, "triangular", spec.weight_cap, spec.pivots))


def target_envelope(spec: LiftSpec) -> EnvelopeAlgebra:
    return build_envelope(RegularQuotientPresentation(
        spec.fp, spec.nvars, spec.target, "triangular", spec.weight_cap, spec.pivots))


# comparison --------------------------------------------------------------------------

@dataclass
class ComparisonRow:
    slice: str
    side: str
    n: int
    dims: str
    invariant_factors: str
    verdict: str

    def csv_fields(self) -> list[str]:
        return [self.slice, self.side, str(self.n), self.dims, self.invariant_factors,
                self.verdict]


COMPARISON_HEADER = ["slice", "side", "n", "dims", "invariant_factors", "verdict"]


@dataclass
class ComparisonReport:
    spec: LiftSpec
    rows: list[ComparisonRow]

    @property
    def passed(self) -> bool:
        return all(r.verdict == "pass" for r in self.rows)

    def table(self) -> list[tuple]:
        return [tuple(r.csv_fields()) for r in self.rows]


def _poly_slice_rows(spec: LiftSpec, d: int) -> list[ComparisonRow]:
    p = spec.p
    C = derham_slice(spec.zpn, spec.nvars, d).complex
    direct = derham_slice(spec.fp, spec.nvars, d).complex
    reduced = base_change_complex(C, spec.fp)
    same = all(reduced.d(n) == direct.d(n) for n in range(spec.nvars))
    H = {n: cohomology_at(C, n) for n in range(spec.nvars + 1)}
    rows = []
    for n in range(spec.nvars + 1):
        lhs = cohomology_at(direct, n).free_rank
        rhs = H[n].tensor_fp_dim(p)
        if n + 1 in H:
            rhs += H[n + 1].tor_fp_dim(p)
        verdict = "pass" if same and lhs == rhs else "fail"
        tag = f"d={d}"
        rows.append(ComparisonRow(tag, "lift", n, str(H[n].free_rank),
                                  " ".join(str(t) for t in H[n].torsion), verdict))
        rows.append(ComparisonRow(tag, "F_p", n, str(lhs), "", verdict))
        rows.append(ComparisonRow(tag, "uct", n, f"{lhs}={rhs}", "", verdict))
    return rows


def rewriting_table(E: EnvelopeAlgebra, n: int, d: int, fp: ScalarRing) -> list[str]:
    """x_j * s * y^[e] in normal form, reduced to F_p, for deg s = d, |e| = n."""
    out = []
    std = E.ideal.standard_monomials(d)
    for e in E.weight_basis(n):
        for s in std:
            for j in range(E.nvars):
                c = Polynomial.monomial(E.ring, E.nvars, s).mul_monomial(
                    tuple(1 if i == j else 0 for i in range(E.nvars)))
                nf = E.normal_form(PdElement.monomial(E.ring, E.nvars, E.r, E.N, e, c))
                red = PdElement(fp, E.nvars, E.r, E.N,
                                {k: v.change_ring(fp) for k, v in nf.terms.items()})
                out.append(red.format())
    return out


def _quotient_slice_rows(spec: LiftSpec, El: EnvelopeAlgebra, Et: EnvelopeAlgebra,
                         n: int, d: int) -> list[ComparisonRow]:
    lift_rank = graded_rank_formula(El.r, n) * len(El.ideal.standard_monomials(d))
    direct_rank = graded_rank_formula(Et.r, n) * len(Et.ideal.standard_monomials(d))
    same = rewriting_table(El, n, d, spec.fp) == rewriting_table(Et, n, d, spec.fp)
    verdict = "pass" if same and lift_rank == direct_rank else "fail"
    tag = f"w={n},d={d}"
    return [ComparisonRow(tag, "lift", n, str(lift_rank), "", verdict),
            ComparisonRow(tag, "F_p", n, str(direct_rank), "", verdict),
            ComparisonRow(tag, "rewriting", n, "equal" if same else "differ", "", verdict)]


def mod_p_comparison(spec: LiftSpec, D: int, map_fn: Callable = map,
                     raise_on_fail: bool = True) -> ComparisonReport:
    if spec.is_polynomial:
        chunks = map_fn(lambda d: _poly_slice_rows(spec, d), range(D + 1))
    else:
        El, Et = lift_envelope(spec), target_envelope(spec)
        jobs = [(n, d) for n in range(spec.weight_cap) for d in range(D + 1)]
        chunks = map_fn(lambda nd: _quotient_slice_rows(spec, El, Et, *nd), jobs)
    rows = [r for chunk in chunks for r in chunk]
    report = ComparisonReport(spec, rows)
    if raise_on_fail and not report.passed:
        bad = next(r for r in rows if r.verdict != "pass")
        raise ComparisonFailed(f"mod-{spec.p} comparison failed at {bad.slice}", bad.slice, rows)
    return report


__all__ = [
    "LiftSpec", "CrystallineRow", "ComparisonRow", "ComparisonReport", "ComparisonFailed",
    "InvalidLift", "default_lift", "random_lift", "crystalline_via_lift", "mod_p_comparison",
    "lift_envelope", "target_envelope", "rewriting_table", "COMPARISON_HEADER",
]
