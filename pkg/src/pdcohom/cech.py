"""The cosimplicial pd-envelope (Cech-Alexander) complex of ``A = R[t_1..t_m]``.

Level ``s`` is the envelope of the kernel of the multiplication map
``A^{(x)(s+1)} = R[t_{j,c} : c = 0..s] -> A``, presented by the Triangular
sequence ``t_{j,c+1} - t_{j,c}`` with pivots ``t_{j,c+1}``.  Standard
monomials only involve the copy-0 variables, so level ``s`` has the
``R``-basis ``t_0^a y^[e]`` with ``e`` indexed by pairs ``(j, c)``.

A monotone map ``f: [s] -> [s']`` acts by ``t_{j,c} -> t_{j,f(c)}``; on pd
generators this is ``y_{j,c} -> y_{j,f(c)} + ... + y_{j,f(c+1)-1}``.
Codegeneracies are coordinate projections, so the normalized cochains in
codegree ``s`` are spanned by the basis elements using every gap ``c < s``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

from .derham import hodge_graded
from .envelope import EnvelopeAlgebra, RegularQuotientPresentation, regularity_probe
from .linalg import BoundedCochainComplex, Matrix, ModuleInvariants, cohomology_at
from .pd_free import PdElement, pd_gamma, pd_mul
from .poly import Polynomial, monomials_of_degree
from .scalars import ScalarRing

Exp = tuple[int, ...]


class WeightRequiresHigherCosimplicialCap(ValueError):
    pass


class CechComparisonFailed(AssertionError):
    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


# levels ---------------------------------------------------------------------

@dataclass
class CosimplicialLevel:
    ring: ScalarRing
    m: int
    s: int
    N: int
    envelope: EnvelopeAlgebra

    def var(self, j: int, c: int) -> int:
        return j * (self.s + 1) + c

    def gen(self, j: int, c: int) -> int:
        return j * self.s + c

    @property
    def nvars(self) -> int:
        return self.m * (self.s + 1)

    @property
    def ngens(self) -> int:
        return self.m * self.s

    def basis_element(self, a: Exp, e: Exp) -> PdElement:
        """t_0^a y^[e] with a indexed by j and e by generator index."""
        x = [0] * self.nvars
        for j, k in enumerate(a):
            x[self.var(j, 0)] = k
        c = Polynomial.monomial(self.ring, self.nvars, tuple(x))
        return PdElement(self.ring, self.nvars, self.ngens, self.N, {tuple(e): c})

    def split_key(self, e: Exp, coeff_exp: Exp) -> tuple[Exp, Exp]:
        """(a, e) coordinates of a normal-form term."""
        a = tuple(coeff_exp[self.var(j, 0)] for j in range(self.m))
        assert sum(a) == sum(coeff_exp), "normal form left copy-0 variables"
        return a, e


def build_level(ring: ScalarRing, m: int, s: int, N: int, probe: bool = True) -> CosimplicialLevel:
    nv = m * (s + 1)
    gens, pivots = [], []
    for j in range(m):
        for c in range(s):
            hi = Polynomial.var(ring, nv, j * (s + 1) + c + 1)
            lo = Polynomial.var(ring, nv, j * (s + 1) + c)
            gens.append(hi - lo)
            pivots.append(j * (s + 1) + c + 1)
    pres = RegularQuotientPresentation(ring, nv, gens, "triangular", N, pivots)
    if probe and gens:
        # linear and homogeneous: the first Koszul syzygies sit in degree 2
        res = regularity_probe(pres, 2)
        assert res.passed, res.format()
    return CosimplicialLevel(ring, m, s, N, EnvelopeAlgebra(pres))


# structure maps --------------------------------------------------------------------

def coface_function(s: int, k: int) -> tuple[int, ...]:
    """delta^k: [s] -> [s+1], skipping k."""
    return tuple(c if c < k else c + 1 for c in range(s + 1))


def codegeneracy_function(s: int, k: int) -> tuple[int, ...]:
    """sigma^k: [s+1] -> [s], hitting k twice."""
    return tuple(c if c <= k else c - 1 for c in range(s + 2))


def apply_map(f: Sequence[int], src: CosimplicialLevel, tgt: CosimplicialLevel,
              x: PdElement) -> PdElement:
    """Image of a level-``src`` element under the pd map induced by ``f``."""
    E = tgt.envelope
    m = src.m
    # images of pd generators: sums of consecutive target generators
    gen_img = []
    for j in range(m):
        for c in range(src.s):
            img = E.zero()
            for i in range(f[c], f[c + 1]):
                img = img + E.y(tgt.gen(j, i))
            gen_img.append(img)
    # images of copy-0 variables: t_{j,f(0)} in normal form
    var_img = [E.from_poly(Polynomial.var(tgt.ring, tgt.nvars, tgt.var(j, f[0])))
               for j in range(m)]
    out = E.zero()
    cache: dict = {}

    def gamma_img(g, k):
        key = (g, k)
        if key not in cache:
            cache[key] = pd_gamma(k, gen_img[g]) if gen_img[g] else E.zero()
        return cache[key]

    def var_pow(j, k):
        key = ("v", j, k)
        if key not in cache:
            acc = E.one()
            for _ in range(k):
                acc = E.mul(acc, var_img[j])
            cache[key] = acc
        return cache[key]

    for e, coeff in x.terms.items():
        piece = E.one()
        for g, k in enumerate(e):
            if k:
                piece = pd_mul(piece, gamma_img(g, k))
                if not piece:
                    break
        if not piece:
            continue
        for ce, cc in coeff.terms.items():
            a = src.split_key(e, ce)[0]
            term = piece.scale(cc)
            for j, k in enumerate(a):
                if k:
                    term = pd_mul(term, var_pow(j, k))
            out = out + term
    return E.normal_form(out)


# the complex ------------------------------------------------------------------------

@dataclass
class CechComplex:
    ring: ScalarRing
    m: int
    M: int
    N: int
    D: int
    levels: list[CosimplicialLevel]

    def coface(self, s: int, k: int, x: PdElement) -> PdElement:
        return apply_map(coface_function(s, k), self.levels[s], self.levels[s + 1], x)

    def codegeneracy(self, s: int, k: int, x: PdElement) -> PdElement:
        """sigma^k from level s+1 to level s."""
        return apply_map(codegeneracy_function(s, k), self.levels[s + 1], self.levels[s], x)


def build_cech(R: ScalarRing, m: int, M: int, N: int, D: int) -> CechComplex:
    if M < 1:
        raise ValueError("cosimplicial cap M must be at least 1")
    if N < 1 or D < 0 or m < 0:
        raise ValueError("caps must be positive")
    levels = [build_level(R, m, s, N) for s in range(M + 1)]
    return CechComplex(R, m, M, N, D, levels)


def weight_exponents(m: int, s: int, n: int, normalized: bool = True) -> list[Exp]:
    """Weight-n exponents over the m*s generators, optionally using every gap."""
    out = []
    for e in monomials_of_degree(m * s, n):
        if normalized and any(all(e[j * s + c] == 0 for j in range(m)) for c in range(s)):
            continue
        out.append(e)
    return out


def cochain_basis(m: int, s: int, n: int, d: int, normalized: bool = True):
    if d - n < 0:
        return []
    return [(a, e) for e in weight_exponents(m, s, n, normalized)
            for a in monomials_of_degree(m, d - n)]


def _graded_level(C: CechComplex, s: int, n: int) -> CosimplicialLevel:
    """Level s truncated at weight n+1, enough for the weight-n graded piece."""
    lv = C.levels[s]
    if lv.N == n + 1:
        return lv
    return _truncated_level(lv.ring, lv.m, s, n + 1)


@lru_cache(maxsize=None)
def _truncated_level(ring, m, s, N):
    return build_level(ring, m, s, N, probe=False)


def graded_differential(C: CechComplex, s: int, n: int, d: int,
                        normalized: bool = True) -> Matrix:
    """Weight-n part of sum_k (-1)^k delta^k from codegree s to s+1, slice d."""
    src_lv, tgt_lv = _graded_level(C, s, n), _graded_level(C, s + 1, n)
    src = cochain_basis(C.m, s, n, d, normalized)
    tgt = {b: i for i, b in enumerate(cochain_basis(C.m, s + 1, n, d, normalized))}
    mat = Matrix(C.ring, len(tgt), len(src))
    ring = C.ring
    for col, (a, e) in enumerate(src):
        x = src_lv.basis_element(a, e)
        acc: dict = {}
        for k in range(s + 2):
            img = apply_map(coface_function(s, k), src_lv, tgt_lv, x)
            for e2, coeff in img.terms.items():
                if sum(e2) != n:
                    continue
                for ce, cc in coeff.terms.items():
                    key = tgt_lv.split_key(e2, ce)
                    v = cc if k % 2 == 0 else ring.neg(cc)
                    acc[key] = ring.add(acc.get(key, ring.zero()), v)
        for key, v in acc.items():
            if not v:
                continue
            if key not in tgt:
                raise AssertionError(f"coface image {key} left the normalized cochains")
            mat.data[tgt[key]][col] = v
    return mat


def weight_complex(C: CechComplex, n: int, d: int, normalized: bool = True) -> BoundedCochainComplex:
    dims = {s: len(cochain_basis(C.m, s, n, d, normalized)) for s in range(C.M + 1)}
    diffs = {}
    for s in range(C.M):
        if dims[s] and dims[s + 1]:
            diffs[s] = graded_differential(C, s, n, d, normalized)
    return BoundedCochainComplex(C.ring, 0, C.M, dims, diffs)


def totalize_weight(C: CechComplex, n: int, D: int | None = None,
                    map_fn: Callable = map, normalized: bool = True
                    ) -> dict[int, list[ModuleInvariants]]:
    """Per slice d <= D: cohomology in codegrees 0..M-1 of the weight-n graded complex."""
    if n >= C.N:
        raise ValueError(f"weight {n} is not below the truncation {C.N}")
    if n + 1 > C.M:
        raise WeightRequiresHigherCosimplicialCap(
            f"weight {n} needs a cosimplicial cap of at least {n + 1}, got {C.M}")
    D = C.D if D is None else D

    def one(d):
        K = weight_complex(C, n, d, normalized)
        return d, [cohomology_at(K, s) for s in range(C.M)]

    return dict(map_fn(one, range(D + 1)))


def model_cohomology(R: ScalarRing, m: int, n: int, d: int, M: int) -> list[ModuleInvariants]:
    """Omega^n placed in degree n, slice d, codegrees 0..M-1."""
    K = hodge_graded(n, R, m, d).complex if n <= m else None
    out = []
    for s in range(M):
        if K is not None and s <= m:
            out.append(cohomology_at(K, s))
        else:
            out.append(ModuleInvariants(R, 0))
    return out


@dataclass
class CechRow:
    weight: int
    poly_degree: int
    coh_degree: int
    cech: ModuleInvariants
    model: ModuleInvariants
    M: int

    @property
    def passed(self) -> bool:
        return self.cech == self.model

    def csv_fields(self) -> list[str]:
        return [str(self.coh_degree), str(self.poly_degree), str(self.cech.free_rank),
                " ".join(str(t) for t in self.cech.torsion), f"w{self.weight}",
                str(self.M), str(self.model.free_rank), "pass" if self.passed else "fail"]


CECH_HEADER = ["coh_degree", "poly_degree", "free_rank", "invariant_factors",
               "representative", "M", "model_rank", "verdict"]


def cech_compare(R: ScalarRing, m: int, M: int, N: int, D: int, map_fn: Callable = map,
                 raise_on_fail: bool = True) -> list[CechRow]:
    C = build_cech(R, m, M, N, D)
    rows = []
    for n in range(min(N - 1, M - 1) + 1):
        table = totalize_weight(C, n, D, map_fn)
        for d in range(D + 1):
            model = model_cohomology(R, m, n, d, M)
            for s in range(M):
                rows.append(CechRow(n, d, s, table[d][s], model[s], M))
    if raise_on_fail:
        for r in rows:
            if not r.passed:
                raise CechComparisonFailed(
                    f"weight {r.weight}, slice {r.poly_degree}, degree {r.coh_degree}: "
                    f"{r.cech} vs model {r.model}", (r.weight, r.poly_degree, r.coh_degree))
    return rows


# structural checks -----------------------------------------------------------------

def level_generators(lv: CosimplicialLevel) -> list[PdElement]:
    """Copy-0 variables and pd generators of a level, the algebra generators."""
    E = lv.envelope
    out = [E.from_poly(Polynomial.var(lv.ring, lv.nvars, lv.var(j, 0))) for j in range(lv.m)]
    out += [E.y(g) for g in range(lv.ngens)]
    return out


def _compose(f: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
    """f after g."""
    return tuple(f[x] for x in g)


def cosimplicial_identities_hold(C: CechComplex) -> list[tuple[str, bool]]:
    """Check the coface/codegeneracy relations on algebra generators."""
    results = []
    lv = C.levels

    def same(path1, path2, s_src, label):
        ok = True
        for x in level_generators(lv[s_src]):
            a, b = x, x
            s = s_src
            for f, t in path1:
                a = apply_map(f, lv[s], lv[t], a)
                s = t
            s = s_src
            for f, t in path2:
                b = apply_map(f, lv[s], lv[t], b)
                s = t
            ok &= a == b
        results.append((label, ok))

    for s in range(C.M - 1):
        # delta^j delta^i = delta^i delta^{j-1} for i < j
        for j in range(s + 3):
            for i in range(j):
                same([(coface_function(s, i), s + 1), (coface_function(s + 1, j), s + 2)],
                     [(coface_function(s, j - 1), s + 1), (coface_function(s + 1, i), s + 2)],
                     s, f"d{j}d{i}=d{i}d{j - 1} at {s}")
    for s in range(C.M - 1):
        # sigma^j sigma^i = sigma^i sigma^{j+1} for i <= j, from level s+2 to s
        for j in range(s + 1):
            for i in range(j + 1):
                same([(codegeneracy_function(s + 1, i), s + 1), (codegeneracy_function(s, j), s)],
                     [(codegeneracy_function(s + 1, j + 1), s + 1),
                      (codegeneracy_function(s, i), s)],
                     s + 2, f"s{j}s{i}=s{i}s{j + 1} at {s}")
    for s in range(C.M):
        # sigma^j delta^i from level s to s (via s+1)
        for j in range(s + 1):
            for i in range(s + 2):
                lhs = [(coface_function(s, i), s + 1), (codegeneracy_function(s, j), s)]
                if i in (j, j + 1):
                    rhs = []
                elif i < j:
                    rhs = [(codegeneracy_function(s - 1, j - 1), s - 1),
                           (coface_function(s - 1, i), s)]
                else:
                    rhs = [(codegeneracy_function(s - 1, j), s - 1),
                           (coface_function(s - 1, i - 1), s)]
                same(lhs, rhs, s, f"s{j}d{i} at {s}")
    return results


def diagonal_change_of_variables(lv: CosimplicialLevel) -> bool:
    """u_{j,0} = t_{j,0}, u_{j,c} = t_{j,c} - t_{j,c-1} turns the kernel sequence into
    variables: each generator t_{j,c+1} - t_{j,c} becomes u_{j,c+1}.  Checks that the
    substitution is invertible and sends generators to variables."""
    R, nv = lv.ring, lv.nvars
    u = [Polynomial.var(R, nv, i) for i in range(nv)]
    # t_{j,c} = u_{j,0} + ... + u_{j,c}
    t_in_u = []
    for j in range(lv.m):
        for c in range(lv.s + 1):
            acc = Polynomial.zero(R, nv)
            for i in range(c + 1):
                acc = acc + u[lv.var(j, i)]
            t_in_u.append(acc)
    # inverse: u_{j,c} in terms of t
    u_in_t = []
    for j in range(lv.m):
        for c in range(lv.s + 1):
            t = Polynomial.var(R, nv, lv.var(j, c))
            u_in_t.append(t if c == 0 else t - Polynomial.var(R, nv, lv.var(j, c - 1)))
    for i in range(nv):
        if Polynomial.var(R, nv, i).substitute(t_in_u).substitute(u_in_t) != Polynomial.var(R, nv, i):
            return False
    for j in range(lv.m):
        for c in range(lv.s):
            g = lv.envelope.generators[lv.gen(j, c)]
            if g.substitute(t_in_u) != u[lv.var(j, c + 1)]:
                return False
    return True


__all__ = [
    "CosimplicialLevel", "CechComplex", "CechRow", "build_level", "build_cech",
    "coface_function", "codegeneracy_function", "apply_map", "weight_exponents",
    "cochain_basis", "graded_differential", "weight_complex", "totalize_weight",
    "model_cohomology", "cech_compare", "cosimplicial_identities_hold",
    "diagonal_change_of_variables", "level_generators", "CECH_HEADER",
    "WeightRequiresHigherCosimplicialCap", "CechComparisonFailed",
]
