"""Sparse multivariate polynomials over a :class:`ScalarRing`.

Terms are stored as ``{exponent tuple: coefficient}`` with no zero
coefficients.  Printing and iteration use graded-lex order with
``x0 > x1 > ...``; ideals are handled by :class:`IdealPresentation`, in
either triangular mode (over any ring) or Groebner mode (over fields).
"""
from __future__ import annotations

import ast
import random
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Sequence

from .scalars import RingMismatch, ScalarRing

Exp = tuple[int, ...]


class UnsupportedRing(ValueError):
    pass


class NotTriangular(ValueError):
    pass


def grlex_key(e: Exp):
    return (sum(e), e)


def monomials_of_degree(nvars: int, d: int) -> list[Exp]:
    """All exponent vectors of total degree d, descending graded-lex."""
    if nvars == 0:
        return [()] if d == 0 else []
    out = []
    for combo in combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def format_monomial(e: Exp, names: Sequence[str] | None = None) -> str:
    parts = []
    for i, k in enumerate(e):
        if k:
            v = names[i] if names else f"x{i}"
            parts.append(v if k == 1 else f"{v}^{k}")
    return "*".join(parts) if parts else "1"


class Polynomial:
    __slots__ = ("ring", "nvars", "terms", "_hash")

    def __init__(self, ring: ScalarRing, nvars: int, terms=None, *, clean: bool = False):
        self.ring = ring
        self.nvars = nvars
        if terms is None:
            self.terms = {}
        elif clean:
            self.terms = terms
        else:
            t = {}
            for e, c in terms.items():
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                c = ring(c)
                if c:
                    t[tuple(e)] = c
            self.terms = t
        self._hash = None

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring, nvars):
        return cls(ring, nvars, {}, clean=True)

    @classmethod
    def constant(cls, ring, nvars, c):
        c = ring(c)
        return cls(ring, nvars, {(0,) * nvars: c} if c else {}, clean=True)

    @classmethod
    def one(cls, ring, nvars):
        return cls.constant(ring, nvars, 1)

    @classmethod
    def var(cls, ring, nvars, i):
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range")
        e = [0] * nvars
        e[i] = 1
        return cls(ring, nvars, {tuple(e): ring.one()}, clean=True)

    @classmethod
    def monomial(cls, ring, nvars, e: Exp, c=1):
        c = ring(c)
        return cls(ring, nvars, {tuple(e): c} if c else {}, clean=True)

    def _like(self, terms) -> Polynomial:
        return Polynomial(self.ring, self.nvars, terms, clean=True)

    # basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def involves(self, i: int) -> bool:
        return any(e[i] for e in self.terms)

    def sorted_terms(self) -> list[tuple[Exp, object]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self, key: Callable = grlex_key):
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def constant_coefficient(self):
        return self.terms.get((0,) * self.nvars, self.ring.zero())

    def coefficient(self, e: Exp):
        return self.terms.get(tuple(e), self.ring.zero())

    def homogeneous_part(self, d: int) -> Polynomial:
        return self._like({e: c for e, c in self.terms.items() if sum(e) == d})

    def truncate(self, cap: int) -> Polynomial:
        """Drop terms of total degree above ``cap``."""
        return self._like({e: c for e, c in self.terms.items() if sum(e) <= cap})

    # arithmetic -------------------------------------------------------
    def _check(self, other: Polynomial):
        if self.ring != other.ring or self.nvars != other.nvars:
            raise RingMismatch(
                f"{self.ring}[{self.nvars} vars] vs {other.ring}[{other.nvars} vars]")

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.ring, self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        add = self.ring.add
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = add(t[e], c) if e in t else c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return self._like(t)

    __radd__ = __add__

    def __neg__(self):
        neg = self.ring.neg
        return self._like({e: neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> Polynomial:
        c = self.ring(c)
        if not c:
            return self._like({})
        mul = self.ring.mul
        t = {}
        for e, a in self.terms.items():
            v = mul(a, c)
            if v:
                t[e] = v
        return self._like(t)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        mod = ring.modulus
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        if mod:
            t = {e: c % mod for e, c in t.items()}
        return self._like({e: c for e, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.one(self.ring, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_monomial(self, e: Exp, c=1) -> Polynomial:
        mul = self.ring.mul
        c = self.ring(c)
        t = {}
        for e1, a in self.terms.items():
            v = mul(a, c)
            if v:
                t[tuple(x + y for x, y in zip(e1, e))] = v
        return self._like(t)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.ring, self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self.ring == other.ring and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.nvars, frozenset(self.terms.items())))
        return self._hash

    # calculus and maps -----------------------------------------------
    def partial_derivative(self, i: int) -> Polynomial:
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
        ring = self.ring
        t = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                v = ring.mul(c, ring(k))
                if v:
                    t[e[:i] + (k - 1,) + e[i + 1:]] = v
        return self._like(t)

    def substitute(self, images: Sequence[Polynomial]) -> Polynomial:
        """Ring map sending x_i to images[i] (all in one common ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        target = images[0] if images else None
        if target is None:
            raise ValueError("cannot substitute into a ring with no variables")
        ring, nv = target.ring, target.nvars
        powers: list[dict[int, Polynomial]] = [{0: Polynomial.one(ring, nv), 1: im}
                                               for im in images]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        result = Polynomial.zero(ring, nv)
        for e, c in self.terms.items():
            term = Polynomial.constant(ring, nv, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def rename(self, nvars: int, index_map: Sequence[int]) -> Polynomial:
        """Monomial substitution x_i -> x_{index_map[i]} into ``nvars`` variables."""
        t: dict = {}
        add = self.ring.add
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[index_map[i]] += k
            ne = tuple(ne)
            t[ne] = add(t[ne], c) if ne in t else c
        return Polynomial(self.ring, nvars, {e: c for e, c in t.items() if c}, clean=True)

    def change_ring(self, target: ScalarRing) -> Polynomial:
        """Coefficientwise image under the canonical map (or literal lift, see below)."""
        return Polynomial(target, self.nvars,
                          {e: self.ring.map_to(target, c) for e, c in self.terms.items()})

    def lift_literal(self, target: ScalarRing) -> Polynomial:
        """Reinterpret integer representatives as elements of ``target``."""
        return Polynomial(target, self.nvars, {e: int(c) for e, c in self.terms.items()})

    def to_rationals(self) -> Polynomial:
        if not self.ring.embeds_in_q:
            raise UnsupportedRing(f"{self.ring} does not embed in Q")
        q = ScalarRing.rationals()
        return Polynomial(q, self.nvars, {e: Fraction(c) for e, c in self.terms.items()},
                          clean=True)

    # printing ---------------------------------------------------------
    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            neg = c < 0
            a = -c if neg else c
            mono = format_monomial(e, names)
            if mono == "1":
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            pieces.append((neg, body))
        out = ("-" if pieces[0][0] else "") + pieces[0][1]
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Polynomial({self.ring}, {self.nvars}, {self.format()!r})"


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def partial_derivative(f: Polynomial, i: int) -> Polynomial:
    return f.partial_derivative(i)


def random_polynomial(rng: random.Random, ring: ScalarRing, nvars: int, max_degree: int,
                      nterms: int, coeff_bound: int = 5) -> Polynomial:
    t = {}
    for _ in range(nterms):
        d = rng.randint(0, max_degree)
        e = [0] * nvars
        for _ in range(d):
            if nvars:
                e[rng.randrange(nvars)] += 1
        c = rng.randint(-coeff_bound, coeff_bound)
        if ring.kind == "Q" and rng.random() < 0.3:
            c = Fraction(c, rng.randint(1, 4))
        t[tuple(e)] = c
    return Polynomial(ring, nvars, t)


# parsing -------------------------------------------------------------------

class PolynomialParseError(ValueError):
    pass


def parse_polynomial(text: str, ring: ScalarRing, nvars: int,
                     names: Sequence[str] | None = None) -> Polynomial:
    """Parse e.g. ``"3*x0^2*x1 - x1 + 1/2"``; names default to x0..x{m-1}."""
    names = list(names) if names else [f"x{i}" for i in range(nvars)]
    index = {n: i for i, n in enumerate(names)}
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise PolynomialParseError(f"cannot parse {text!r}: {exc.msg}") from None

    def number(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Fraction(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -number(node.operand)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
            return number(node.left) / number(node.right)
        raise PolynomialParseError(f"expected an integer constant in {text!r}")

    def walk(node) -> Polynomial:
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, int) or isinstance(node.value, bool):
                raise PolynomialParseError(f"bad constant {node.value!r}")
            return Polynomial.constant(ring, nvars, node.value)
        if isinstance(node, ast.Name):
            if node.id not in index:
                raise PolynomialParseError(f"unknown variable {node.id!r}")
            return Polynomial.var(ring, nvars, index[node.id])
        if isinstance(node, ast.UnaryOp):
            if isinstance(node.op, ast.USub):
                return -walk(node.operand)
            if isinstance(node.op, ast.UAdd):
                return walk(node.operand)
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Add):
                return walk(node.left) + walk(node.right)
            if isinstance(node.op, ast.Sub):
                return walk(node.left) - walk(node.right)
            if isinstance(node.op, ast.Mult):
                return walk(node.left) * walk(node.right)
            if isinstance(node.op, ast.Pow):
                k = number(node.right)
                if k.denominator != 1 or k < 0:
                    raise PolynomialParseError("exponents must be nonnegative integers")
                return walk(node.left) ** int(k)
            if isinstance(node.op, ast.Div):
                c = number(node.right)
                if c == 0:
                    raise PolynomialParseError("division by zero")
                return walk(node.left).scale(ring(1 / c))
        raise PolynomialParseError(f"unsupported syntax in {text!r}")

    return walk(tree.body)


# division and ideals -------------------------------------------------------

def divide(f: Polynomial, divisors: Sequence[Polynomial], key: Callable,
           leads: Sequence[Exp] | None = None,
           choose: Callable[[list[int]], int] | None = None):
    """Multivariate division; returns (quotients, remainder).

    Leading coefficients of the divisors must be units.  ``choose`` picks
    among several applicable divisors (default: the first).
    """
    ring = f.ring
    if leads is None:
        leads = [g.leading_term(key)[0] for g in divisors]
    lead_inv = [ring.inv(g.terms[lm]) for g, lm in zip(divisors, leads)]
    quotients = [dict() for _ in divisors]
    rem: dict = {}
    p = dict(f.terms)
    mul, sub = ring.mul, ring.sub
    while p:
        e = max(p, key=key)
        c = p[e]
        hits = [i for i, lm in enumerate(leads) if all(a >= b for a, b in zip(e, lm))]
        if not hits:
            rem[e] = c
            del p[e]
            continue
        i = hits[0] if choose is None or len(hits) == 1 else hits[choose(hits)]
        lm = leads[i]
        shift = tuple(a - b for a, b in zip(e, lm))
        q = mul(c, lead_inv[i])
        qi = quotients[i]
        qi[shift] = ring.add(qi[shift], q) if shift in qi else q
        if not qi[shift]:
            del qi[shift]
        for ge, gc in divisors[i].terms.items():
            te = tuple(a + b for a, b in zip(ge, shift))
            v = sub(p.get(te, 0), mul(q, gc))
            if v:
                p[te] = v
            else:
                p.pop(te, None)
        assert e not in p
    nv = f.nvars
    return ([Polynomial(ring, nv, q, clean=True) for q in quotients],
            Polynomial(ring, nv, rem, clean=True))


class IdealPresentation:
    """Generators of an ideal plus the data needed for canonical normal forms.

    Triangular mode: each generator is ``u * x_j^e - g`` with ``u`` a unit,
    ``deg_{x_j} g < e`` and the pivots eliminable in some order.  Normal forms
    are remainders under the induced lex elimination order, valid over any
    coefficient ring.  Groebner mode stores a reduced graded-lex basis.
    """

    def __init__(self, ring: ScalarRing, nvars: int, generators: Sequence[Polynomial],
                 mode: str, *, pivots: Sequence[int] | None = None,
                 basis: Sequence[Polynomial] | None = None):
        self.ring = ring
        self.nvars = nvars
        self.generators = list(generators)
        self.mode = mode
        for g in self.generators:
            if g.ring != ring or g.nvars != nvars:
                raise RingMismatch("generator lives in a different ring")
        if mode == "triangular":
            self._setup_triangular(pivots)
        elif mode == "groebner":
            if not ring.is_field:
                raise UnsupportedRing(f"Groebner mode needs a field, got {ring}")
            self.basis = list(basis) if basis is not None else _reduced_groebner(
                [g for g in self.generators if g])
            self.key = grlex_key
            self.leads = [b.leading_term(grlex_key)[0] for b in self.basis]
        else:
            raise ValueError(f"unknown ideal mode {mode!r}")

    # construction helpers ---------------------------------------------
    @classmethod
    def triangular(cls, gens, pivots=None):
        gens = list(gens)
        if not gens:
            raise ValueError("use IdealPresentation.zero for the zero ideal")
        return cls(gens[0].ring, gens[0].nvars, gens, "triangular", pivots=pivots)

    @classmethod
    def groebner(cls, gens):
        gens = list(gens)
        return cls(gens[0].ring, gens[0].nvars, gens, "groebner")

    @classmethod
    def zero(cls, ring, nvars):
        return cls(ring, nvars, [], "triangular", pivots=[])

    def _pivot_candidates(self, f: Polynomial) -> list[tuple[int, int]]:
        out = []
        for j in range(f.nvars):
            e = f.degree_in(j)
            if e < 1:
                continue
            pure = tuple(e if i == j else 0 for i in range(f.nvars))
            if pure not in f.terms or not self.ring.is_unit(f.terms[pure]):
                continue
            if sum(1 for x in f.terms if x[j] == e) == 1:
                out.append((j, e))
        return out

    def _setup_triangular(self, pivots):
        gens = self.generators
        cands = [self._pivot_candidates(g) for g in gens]
        if pivots is not None:
            chosen = []
            for g, c, j in zip(gens, cands, pivots):
                match = [x for x in c if x[0] == j]
                if not match:
                    raise NotTriangular(f"x{j} is not a pivot of {g}")
                chosen.append(match[0])
            order = self._elimination_order(chosen)
            if order is None:
                raise NotTriangular("pivot choice is not eliminable")
        else:
            chosen, order = self._search_pivots(cands)
            if chosen is None:
                raise NotTriangular("generators do not form a triangular chain: "
                                    + ", ".join(str(g) for g in gens))
        self.pivots = [j for j, _ in chosen]
        self.pivot_degrees = [e for _, e in chosen]
        self.order = order
        priority = [self.pivots[i] for i in order]
        priority += [v for v in range(self.nvars) if v not in priority]
        self.priority = priority
        self.key = lambda e, pr=tuple(priority): tuple(e[v] for v in pr)
        self.basis = gens
        self.leads = [tuple(e if v == j else 0 for v in range(self.nvars))
                      for j, e in chosen]

    def _elimination_order(self, chosen):
        r = len(chosen)
        pivs = [j for j, _ in chosen]
        if len(set(pivs)) != r:
            return None
        after: dict[int, set[int]] = {i: set() for i in range(r)}
        indeg = [0] * r
        for i, g in enumerate(self.generators):
            rest = g - Polynomial.monomial(self.ring, self.nvars, self._lead(chosen[i]),
                                           g.terms[self._lead(chosen[i])])
            for k in range(r):
                if k != i and rest.involves(pivs[k]):
                    after[i].add(k)  # i must precede k
        for i in range(r):
            for k in after[i]:
                indeg[k] += 1
        ready = sorted(i for i in range(r) if indeg[i] == 0)
        order = []
        while ready:
            i = ready.pop(0)
            order.append(i)
            for k in sorted(after[i]):
                indeg[k] -= 1
                if indeg[k] == 0:
                    ready.append(k)
            ready.sort()
        return order if len(order) == r else None

    def _lead(self, choice):
        j, e = choice
        return tuple(e if v == j else 0 for v in range(self.nvars))

    def _search_pivots(self, cands):
        r = len(cands)

        def rec(i, chosen):
            if i == r:
                order = self._elimination_order(chosen)
                return (list(chosen), order) if order is not None else None
            used = {j for j, _ in chosen}
            for c in cands[i]:
                if c[0] in used:
                    continue
                got = rec(i + 1, chosen + [c])
                if got:
                    return got
            return None

        got = rec(0, [])
        return got if got else (None, None)

    # queries -----------------------------------------------------------
    @property
    def is_zero_ideal(self) -> bool:
        return not self.basis

    def is_standard(self, e: Exp) -> bool:
        return not any(all(a >= b for a, b in zip(e, lm)) for lm in self.leads)

    def standard_monomials(self, d: int) -> list[Exp]:
        """Standard monomials of total degree d (descending graded-lex)."""
        return [e for e in monomials_of_degree(self.nvars, d) if self.is_standard(e)]

    def divide(self, f: Polynomial, choose=None):
        """Quotients with respect to ``self.generators`` and the remainder."""
        if self.is_zero_ideal:
            return [], f
        if self.mode == "triangular":
            return divide(f, self.generators, self.key, self.leads, choose)
        qs, rem = divide(f, self.basis, self.key, self.leads, choose)
        # express basis quotients through the original generators
        gq = [Polynomial.zero(self.ring, self.nvars) for _ in self.generators]
        for q, b in zip(qs, self.basis):
            if q:
                for i, c in enumerate(self._basis_in_generators(b)):
                    gq[i] = gq[i] + q * c
        return gq, rem

    def _basis_in_generators(self, b: Polynomial) -> list[Polynomial]:
        cache = self.__dict__.setdefault("_cofactors", {})
        if b not in cache:
            cache[b] = _cofactors(b, self.generators)
        return cache[b]

    def normal_form(self, f: Polynomial) -> Polynomial:
        if f.ring != self.ring or f.nvars != self.nvars:
            raise RingMismatch("polynomial and ideal live in different rings")
        if self.is_zero_ideal or not f:
            return f
        return divide(f, self.basis, self.key, self.leads)[1]

    def contains(self, f: Polynomial) -> bool:
        return not self.normal_form(f)

    def change_ring(self, target: ScalarRing, literal: bool = False) -> IdealPresentation:
        conv = (lambda g: g.lift_literal(target)) if literal else (lambda g: g.change_ring(target))
        gens = [conv(g) for g in self.generators]
        if self.mode == "triangular":
            return IdealPresentation(target, self.nvars, gens, "triangular",
                                     pivots=self.pivots)
        return IdealPresentation(target, self.nvars, gens, "groebner")

    def __repr__(self):
        return f"IdealPresentation({self.mode}, [{', '.join(map(str, self.generators))}])"


def normal_form(f: Polynomial, ideal: IdealPresentation) -> Polynomial:
    return ideal.normal_form(f)


def _s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    ef, cf = f.leading_term()
    eg, cg = g.leading_term()
    lcm = tuple(max(a, b) for a, b in zip(ef, eg))
    ring = f.ring
    a = f.mul_monomial(tuple(x - y for x, y in zip(lcm, ef)), ring.inv(cf))
    b = g.mul_monomial(tuple(x - y for x, y in zip(lcm, eg)), ring.inv(cg))
    return a - b


def _monic(f: Polynomial) -> Polynomial:
    return f.scale(f.ring.inv(f.leading_term()[1]))


def _reduced_groebner(gens: list[Polynomial]) -> list[Polynomial]:
    basis = [_monic(g) for g in gens]
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    while pairs:
        i, j = pairs.pop(0)
        ei, ej = basis[i].leading_term()[0], basis[j].leading_term()[0]
        if all(a == 0 or b == 0 for a, b in zip(ei, ej)):
            continue  # coprime leading monomials
        s = _s_polynomial(basis[i], basis[j])
        if not s:
            continue
        _, r = divide(s, basis, grlex_key)
        if r:
            basis.append(_monic(r))
            k = len(basis) - 1
            pairs.extend((m, k) for m in range(k))
    # minimalize
    leads = [b.leading_term()[0] for b in basis]
    keep = []
    for i, e in enumerate(leads):
        dominated = False
        for j, f in enumerate(leads):
            if j == i:
                continue
            if all(a >= b for a, b in zip(e, f)) and (e != f or j < i):
                dominated = True
                break
        if not dominated:
            keep.append(basis[i])
    # reduce tails
    reduced = []
    for i, b in enumerate(keep):
        others = keep[:i] + keep[i + 1:]
        e, c = b.leading_term()
        tail = b - Polynomial.monomial(b.ring, b.nvars, e, c)
        _, r = divide(tail, others, grlex_key) if others else (None, tail)
        reduced.append(Polynomial.monomial(b.ring, b.nvars, e, 1) + r)
    reduced.sort(key=lambda p: grlex_key(p.leading_term()[0]), reverse=True)
    return reduced


def _cofactors(b: Polynomial, gens: Sequence[Polynomial]) -> list[Polynomial]:
    """Express b (an element of the ideal) as a combination of gens.

    Runs Buchberger while tracking cofactors; only used when quotients with
    respect to the original generators are requested in Groebner mode.
    """
    ring, nv = b.ring, b.nvars
    r = len(gens)
    zero = Polynomial.zero(ring, nv)
    one = Polynomial.one(ring, nv)
    polys = [g for g in gens]
    cof = [[one if k == i else zero for k in range(r)] for i in range(r)]
    todo = [(i, j) for j in range(r) for i in range(j)]

    def reduce(p, pc):
        # invariant: p = base - sum(pc[i] * gens[i])
        nz = [k for k, q in enumerate(polys) if q]
        if not p or not nz:
            return p, pc
        qs, rem = divide(p, [polys[k] for k in nz], grlex_key)
        pc = list(pc)
        for q, k in zip(qs, nz):
            if q:
                pc = [a + q * c for a, c in zip(pc, cof[k])]
        return rem, pc

    while True:
        p, pc = reduce(b, [zero] * r)
        if not p:
            return pc
        if not todo:
            raise ValueError(f"{b} is not in the ideal")
        i, j = todo.pop(0)
        if not polys[i] or not polys[j]:
            continue
        ei, ci = polys[i].leading_term()
        ej, cj = polys[j].leading_term()
        lcm = tuple(max(x, y) for x, y in zip(ei, ej))
        mi = tuple(x - y for x, y in zip(lcm, ei))
        mj = tuple(x - y for x, y in zip(lcm, ej))
        a, bb = ring.inv(ci), ring.inv(cj)
        s = polys[i].mul_monomial(mi, a) - polys[j].mul_monomial(mj, bb)
        sc = [-(ci_.mul_monomial(mi, a) - cj_.mul_monomial(mj, bb))
              for ci_, cj_ in zip(cof[i], cof[j])]
        s, sc = reduce(s, sc)
        if s:
            polys.append(s)
            cof.append([-c for c in sc])
            k = len(polys) - 1
            todo.extend((m, k) for m in range(k))


def buchberger(gens: Iterable[Polynomial]) -> IdealPresentation:
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    if not gens[0].ring.is_field:
        raise UnsupportedRing(f"Buchberger needs field coefficients, got {gens[0].ring}")
    return IdealPresentation.groebner(gens)
