"""Weight-truncated free divided-power algebras ``A<y_1, ..., y_r>``.

An element is a finite sum of ``c_e * y^[e]`` where ``y^[e]`` stands for
``gamma_{e_1}(y_1) ... gamma_{e_r}(y_r)`` and ``c_e`` is a polynomial in the
coefficient ring ``A = k[x_0, ..., x_{m-1}]``.  Monomials of weight
``sum(e) >= N`` are discarded, so every object lives in ``Fil^0 / Fil^N``.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial, prod
from typing import Sequence

from .poly import Polynomial, UnsupportedRing, grlex_key, monomials_of_degree
from .scalars import ScalarRing, binomial, pd_composition_coefficient

Exp = tuple[int, ...]


class TruncationMismatch(ValueError):
    pass


class NotInAugmentationIdeal(ValueError):
    pass


class NonzeroConstantTerm(ValueError):
    pass


class PdElement:
    __slots__ = ("ring", "nvars", "ngens", "N", "terms")

    def __init__(self, ring: ScalarRing, nvars: int, ngens: int, N: int, terms=None):
        self.ring = ring
        self.nvars = nvars
        self.ngens = ngens
        self.N = N
        t = {}
        for e, c in (terms or {}).items():
            if sum(e) < N and c:
                t[tuple(e)] = c
        self.terms: dict[Exp, Polynomial] = t

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring, nvars, ngens, N):
        return cls(ring, nvars, ngens, N)

    @classmethod
    def from_poly(cls, f: Polynomial, ngens: int, N: int) -> PdElement:
        return cls(f.ring, f.nvars, ngens, N, {(0,) * ngens: f})

    @classmethod
    def one(cls, ring, nvars, ngens, N):
        return cls.from_poly(Polynomial.one(ring, nvars), ngens, N)

    @classmethod
    def gen(cls, ring, nvars, ngens, N, i, k=1, c=1) -> PdElement:
        """``c * gamma_k(y_i)``."""
        e = tuple(k if j == i else 0 for j in range(ngens))
        return cls(ring, nvars, ngens, N, {e: Polynomial.constant(ring, nvars, c)})

    @classmethod
    def monomial(cls, ring, nvars, ngens, N, e: Exp, c=1) -> PdElement:
        coeff = c if isinstance(c, Polynomial) else Polynomial.constant(ring, nvars, c)
        return cls(ring, nvars, ngens, N, {tuple(e): coeff})

    def _like(self, terms) -> PdElement:
        return PdElement(self.ring, self.nvars, self.ngens, self.N, terms)

    def _check(self, other: PdElement):
        if (self.ring, self.nvars, self.ngens) != (other.ring, other.nvars, other.ngens):
            raise TruncationMismatch("elements live in different pd algebras")
        if self.N != other.N:
            raise TruncationMismatch(f"truncations {self.N} and {other.N} differ")

    # queries ----------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def min_weight(self) -> int | None:
        return min((sum(e) for e in self.terms), default=None)

    def weight_component(self, n: int) -> PdElement:
        return self._like({e: c for e, c in self.terms.items() if sum(e) == n})

    def truncate(self, N: int) -> PdElement:
        return PdElement(self.ring, self.nvars, self.ngens, N,
                         {e: c for e, c in self.terms.items() if sum(e) < N})

    def coefficient(self, e: Exp) -> Polynomial:
        return self.terms.get(tuple(e), Polynomial.zero(self.ring, self.nvars))

    def __eq__(self, other):
        if not isinstance(other, PdElement):
            return NotImplemented
        return ((self.ring, self.nvars, self.ngens, self.N)
                == (other.ring, other.nvars, other.ngens, other.N)
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.ring, self.nvars, self.ngens, self.N, frozenset(self.terms.items())))

    # arithmetic -------------------------------------------------------
    def __add__(self, other: PdElement) -> PdElement:
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t[e] + c if e in t else c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return self._like(t)

    def __neg__(self):
        return self._like({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> PdElement:
        """Multiply by a scalar or a coefficient polynomial."""
        if isinstance(c, Polynomial):
            return self._like({e: a * c for e, a in self.terms.items()})
        return self._like({e: a.scale(c) for e, a in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PdElement):
            return pd_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    # printing ---------------------------------------------------------
    def format(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e in sorted(self.terms, key=grlex_key, reverse=True):
            c = self.terms[e]
            gens = [f"g{i}^[{k}]" for i, k in enumerate(e) if k]
            cs = c.format()
            if gens:
                if cs == "1":
                    pieces.append(" * ".join(gens))
                else:
                    if len(c) > 1:
                        cs = f"({cs})"
                    pieces.append(" * ".join([cs] + gens))
            else:
                pieces.append(cs if len(c) == 1 else f"({cs})")
        return " + ".join(pieces)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"PdElement(N={self.N}, {self.format()!r})"


def monomial_product_coefficient(e: Exp, f: Exp) -> int:
    return prod(binomial(a + b, a) for a, b in zip(e, f))


def pd_mul(a: PdElement, b: PdElement) -> PdElement:
    a._check(b)
    N = a.N
    t: dict[Exp, Polynomial] = {}
    for e1, c1 in a.terms.items():
        w1 = sum(e1)
        for e2, c2 in b.terms.items():
            if w1 + sum(e2) >= N:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            k = monomial_product_coefficient(e1, e2)
            prod_c = (c1 * c2).scale(k)
            if prod_c:
                t[e] = t[e] + prod_c if e in t else prod_c
    return a._like(t)


def gamma_monomial(n: int, e: Exp) -> tuple[int, Exp]:
    """gamma_n(y^[e]) = coefficient * y^[n e] for a single pd monomial.

    Uses gamma_n(uv) = n! gamma_n(u) gamma_n(v) between the factors and
    gamma_n(gamma_m(y)) = (mn)!/((m!)^n n!) gamma_{mn}(y) on each factor.
    """
    support = [k for k in e if k]
    if not support:
        raise NotInAugmentationIdeal("gamma of a unit monomial")
    c = factorial(n) ** (len(support) - 1)
    for k in support:
        c *= pd_composition_coefficient(k, n)
    return c, tuple(n * k for k in e)


def pd_gamma(n: int, a: PdElement) -> PdElement:
    if n < 0:
        raise ValueError("n must be nonnegative")
    zero_e = (0,) * a.ngens
    if zero_e in a.terms:
        raise NotInAugmentationIdeal("element has a nonzero weight-0 component")
    one = PdElement.one(a.ring, a.nvars, a.ngens, a.N)
    if n == 0:
        return one
    # divided powers of each term: gamma_k(c y^[e]) = c^k gamma_k(y^[e])
    acc = [one] + [a._like({}) for _ in range(n)]
    for e, c in sorted(a.terms.items(), key=lambda t: grlex_key(t[0])):
        w = sum(e)
        powers = [one]
        ck = Polynomial.one(a.ring, a.nvars)
        for k in range(1, n + 1):
            ck = ck * c
            if k * w >= a.N:
                powers.append(a._like({}))
                continue
            coef, ek = gamma_monomial(k, e)
            powers.append(a._like({ek: ck.scale(coef)}))
        new = []
        for k in range(n + 1):
            s = a._like({})
            for i in range(k + 1):
                if acc[i] and powers[k - i]:
                    s = s + pd_mul(acc[i], powers[k - i])
            new.append(s)
        acc = new
    return acc[n]


# rational realization and norm ---------------------------------------------

def rational_realization(a: PdElement) -> Polynomial:
    """Image in Q[x_0..x_{m-1}, y_1..y_r] with y^[e] -> prod y_i^{e_i} / e_i!."""
    if not a.ring.embeds_in_q:
        raise UnsupportedRing(f"{a.ring} does not embed in Q")
    q = ScalarRing.rationals()
    nv = a.nvars + a.ngens
    out: dict = {}
    for e, c in a.terms.items():
        denom = prod(factorial(k) for k in e)
        for xe, xc in c.terms.items():
            key = tuple(xe) + tuple(e)
            out[key] = out.get(key, Fraction(0)) + Fraction(xc) / denom
    return Polynomial(q, nv, {k: v for k, v in out.items() if v})


def pd_from_rational(f: Polynomial, nvars: int, ngens: int, N: int,
                     ring: ScalarRing) -> PdElement:
    """Inverse of :func:`rational_realization` on its image (raises if not integral)."""
    terms: dict[Exp, dict] = {}
    for key, c in f.terms.items():
        xe, e = key[:nvars], key[nvars:]
        v = Fraction(c) * prod(factorial(k) for k in e)
        if ring.kind == "Z" and v.denominator != 1:
            raise ValueError(f"{f} is not in the divided power subring")
        terms.setdefault(tuple(e), {})[tuple(xe)] = v
    return PdElement(ring, nvars, ngens, N,
                     {e: Polynomial(ring, nvars, t) for e, t in terms.items()})


def norm_from_sym(f: Polynomial, N: int) -> PdElement:
    """Algebra map y_i -> gamma_1(y_i): y^e -> (prod e_i!) y^[e].

    ``f`` is a polynomial in the pd generators (``f.nvars`` of them) with
    scalar coefficients; the result has scalar coefficients as well.
    """
    r = f.nvars
    if f.constant_coefficient():
        raise NonzeroConstantTerm("the norm is defined on the augmentation ideal")
    if f.degree() >= N:
        raise ValueError(f"degree {f.degree()} exceeds truncation {N}")
    ring = f.ring
    terms = {}
    for e, c in f.terms.items():
        k = prod(factorial(x) for x in e)
        terms[e] = Polynomial.constant(ring, 0, ring.mul(c, ring(k)))
    return PdElement(ring, 0, r, N, terms)


def norm_matrix(r: int, n: int):
    """Integer matrix of the weight-n norm Sym^n(Z^r) -> Gamma^n(Z^r)."""
    from .linalg import Matrix
    mons = monomials_of_degree(r, n)
    z = ScalarRing.integers()
    m = Matrix(z, len(mons), len(mons))
    for i, e in enumerate(mons):
        m.data[i][i] = prod(factorial(x) for x in e)
    return m, mons


def gamma_rank(r: int, n: int) -> int:
    """Rank of Gamma^n of a free module of rank r."""
    return binomial(r + n - 1, n) if n >= 0 else 0


def exterior_rank(r: int, n: int) -> int:
    """Rank of Lambda^n of a free module of rank r (the decalage partner)."""
    return binomial(r, n)


def weight_basis(ngens: int, n: int) -> list[Exp]:
    return monomials_of_degree(ngens, n)


def random_pd_element(rng, ring: ScalarRing, nvars: int, ngens: int, N: int,
                      nterms: int = 4, min_weight: int = 1, coeff_bound: int = 4,
                      coeff_degree: int = 0) -> PdElement:
    from .poly import random_polynomial
    terms = {}
    for _ in range(nterms):
        w = rng.randint(min_weight, N - 1) if N - 1 >= min_weight else min_weight
        e = [0] * ngens
        for _ in range(w):
            e[rng.randrange(ngens)] += 1
        if coeff_degree:
            c = random_polynomial(rng, ring, nvars, coeff_degree, 2, coeff_bound)
        else:
            c = Polynomial.constant(ring, nvars, rng.randint(-coeff_bound, coeff_bound))
        e = tuple(e)
        terms[e] = terms[e] + c if e in terms else c
    return PdElement(ring, nvars, ngens, N, terms)


__all__ = [
    "PdElement", "pd_mul", "pd_gamma", "gamma_monomial", "rational_realization",
    "pd_from_rational", "norm_from_sym", "norm_matrix", "gamma_rank", "exterior_rank",
    "weight_basis", "random_pd_element", "TruncationMismatch", "NotInAugmentationIdeal",
    "NonzeroConstantTerm",
]
