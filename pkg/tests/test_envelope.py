import random
from fractions import Fraction
from math import comb, factorial, prod

import pytest

from pdcohom.envelope import (EnvelopeAlgebra, RegularityProbeFailed,
                              RegularQuotientPresentation, TruncationTooSmall,
                              UnsupportedRingModeCombination, WeightOutOfRange, build_envelope,
                              envelope_graded_piece, regularity_probe, square_zero_truncation)
from pdcohom.pd_free import PdElement, random_pd_element
from pdcohom.poly import Polynomial, buchberger, parse_polynomial, random_polynomial
from pdcohom.scalars import ScalarRing

Z = ScalarRing.integers()
Q = ScalarRing.rationals()


def P(text, ring, n):
    return parse_polynomial(text, ring, n, ["x", "y", "z"][:n])


def envelope(ring, n, gens, N=5, mode="triangular"):
    pres = RegularQuotientPresentation(ring, n, [P(g, ring, n) for g in gens], mode, N)
    return build_envelope(pres)


# a spread of presentations used by the randomized checks
CASES = [
    (Z, 1, ["x"], "triangular"),
    (Z, 2, ["x - y^2", "y"], "triangular"),
    (ScalarRing.padic(5, 2), 1, ["x^2 - 2"], "triangular"),
    (ScalarRing.prime_field(3), 2, ["x - y^3", "y^2 + y"], "triangular"),
    (Q, 2, ["x^2", "y"], "groebner"),
    (Q, 2, ["x^2 + y", "x*y - 1"], "groebner"),
]


def case_envelope(case, N=5):
    ring, n, gens, mode = case
    return envelope(ring, n, gens, N, mode)


def random_env_element(rng, E, min_weight=0):
    a = random_pd_element(rng, E.ring, E.nvars, E.r, E.N, nterms=3, min_weight=min_weight,
                          coeff_degree=2)
    return E.normal_form(a)


def test_z_t_examples():
    E = envelope(Z, 1, ["x"], N=5)
    assert [E.weight_basis(n) for n in range(5)] == [[(k,)] for k in range(5)]
    t = E.from_poly(P("x", Z, 1))
    assert t == E.y(0)
    assert E.mul(t, E.y(0, 3)) == E.y(0, 4).scale(4)
    # Q oracle: t * t^3/3! = 4 * t^4/4!
    assert Fraction(1, factorial(3)) == 4 * Fraction(1, factorial(4))
    t3 = E.mul(E.mul(t, t), t)
    assert t3 == E.y(0, 3).scale(6)
    assert E.mul(t3, E.mul(t, t)).is_zero()
    with pytest.raises(WeightOutOfRange):
        E.weight_basis(5)


def test_char_zero_collapse():
    # over Q the envelope is A itself, truncated I-adically: y^[e] <-> prod f_i^e_i / e_i!
    rng = random.Random(1)
    for gens in (["x"], ["x - y^2", "y"], ["x^2", "y"]):
        n = 2 if len(gens) > 1 or "y" in gens[0] else 1
        mode = "groebner" if gens == ["x^2", "y"] else "triangular"
        N = 3
        E = envelope(Q, n, gens, N, mode)
        fs = E.generators
        powers = buchberger(_ideal_power(fs, N))

        def realize(a):
            out = Polynomial.zero(Q, n)
            for e, c in a.terms.items():
                term = c
                for f, k in zip(fs, e):
                    term = term * f ** k * Fraction(1, factorial(k))
                out = out + term
            return out

        for _ in range(40):
            a = random_polynomial(rng, Q, n, 4, 4, 5)
            b = random_polynomial(rng, Q, n, 3, 3, 5)
            A, B = E.from_poly(a), E.from_poly(b)
            assert powers.contains(realize(A) - a)
            assert powers.contains(realize(E.mul(A, B)) - a * b)
            x = random_env_element(rng, E, min_weight=1)
            k = rng.randint(1, 3)
            want = realize(x) ** k * Fraction(1, factorial(k))
            assert powers.contains(realize(E.gamma(k, x)) - want)


def _ideal_power(fs, N):
    gens = [Polynomial.one(fs[0].ring, fs[0].nvars)]
    for _ in range(N):
        gens = [g * f for g in gens for f in fs]
    return gens


def test_normal_form_confluence():
    rng = random.Random(2)
    total = 0
    for case in CASES:
        E = case_envelope(case)
        for _ in range(40):
            a = random_pd_element(rng, E.ring, E.nvars, E.r, E.N, nterms=3, min_weight=0,
                                  coeff_degree=4, coeff_bound=6)
            want = E.normal_form(a)
            assert E.is_normal(want)
            for seed in range(3):
                assert E.normal_form(a, random.Random(seed)) == want
            total += 1
    assert total >= 200


def test_filtration_multiplicative():
    rng = random.Random(3)
    for case in CASES:
        E = case_envelope(case, N=6)
        for _ in range(40):
            i, j = rng.randint(0, 3), rng.randint(0, 3)
            a = random_env_element(rng, E, i)
            b = random_env_element(rng, E, j)
            assert E.in_fil(a, i) and E.in_fil(b, j)
            assert E.in_fil(E.mul(a, b), i + j)


def test_gamma_compatible_with_filtration():
    rng = random.Random(4)
    for case in CASES:
        E = case_envelope(case, N=7)
        for _ in range(40):
            a = rng.randint(1, 3)
            x = random_env_element(rng, E, a)
            n = rng.randint(1, 3)
            assert E.in_fil(E.gamma(n, x), min(n * a, E.N))


def test_gamma_of_ideal_elements():
    # gamma_n(f) for f in I is the class of f^n / n!, computed without dividing
    rng = random.Random(5)
    E = envelope(Z, 2, ["x - y^2", "y"], N=6)
    for _ in range(50):
        c = [random_polynomial(rng, Z, 2, 2, 3, 4) for _ in range(2)]
        f = c[0] * E.generators[0] + c[1] * E.generators[1]
        n = rng.randint(1, 4)
        lhs = E.gamma(n, E.from_poly(f)).scale(factorial(n))
        assert lhs == E.from_poly(f ** n)


def test_graded_rank_law():
    for r in range(1, 5):
        gens = [Polynomial.var(Z, r, i) for i in range(r)]
        E = build_envelope(RegularQuotientPresentation(Z, r, gens, "triangular", 8))
        for n in range(8):
            piece = envelope_graded_piece(E, n)
            assert piece.rank == comb(r + n - 1, n)
            for e, img in piece.norm_images.items():
                assert img == Polynomial.constant(Z, r, prod(factorial(k) for k in e))
    assert envelope_graded_piece(envelope(Z, 3, ["x", "y", "z"], N=4), 2).rank == 6
    assert envelope_graded_piece(envelope(Z, 1, ["x"]), 0).basis == [(0,)]


def test_square_zero_examples():
    E = envelope(Z, 2, ["x", "y"], N=3)
    sq = square_zero_truncation(E)
    assert sq.ok and sq.conormal_rank == 2
    assert sq.quotient_basis == [P(s, Z, 2) for s in ("1", "x", "y")]
    E = envelope(Z, 1, ["x"], N=2)
    sq = square_zero_truncation(E)
    assert sq.ok and sq.conormal_rank == 1
    assert sq.quotient_basis == [P("1", Z, 1), P("x", Z, 1)]
    E = envelope(Q, 2, ["x^2", "y"], N=3, mode="groebner")
    sq = square_zero_truncation(E)
    assert sq.ok and sq.conormal_basis == [P("x^2", Q, 2), P("y", Q, 2)]
    # brute force: A/I^2 with I^2 = (x^4, x^2 y, y^2) has the six monomials below
    I2 = buchberger(_ideal_power(E.generators, 2))
    brute = [(a, b) for a in range(6) for b in range(3) if I2.is_standard((a, b))]
    assert len(sq.quotient_basis) == len(brute) == 6
    with pytest.raises(TruncationTooSmall):
        square_zero_truncation(envelope(Z, 1, ["x"], N=1))


def test_probe_examples():
    def probe(gens, n, D):
        pres = RegularQuotientPresentation(Q, n, [P(g, Q, n) for g in gens], "groebner", 3)
        return pres, regularity_probe(pres, D)

    _, res = probe(["x", "y"], 2, 6)
    assert res.passed
    pres, res = probe(["x", "x"], 1, 2)
    assert not res.passed
    assert res.witness == (P("1", Q, 1), P("-1", Q, 1))
    pres, res = probe(["x*y", "x"], 2, 3)
    assert not res.passed
    assert res.witness == (P("1", Q, 2), P("-y", Q, 2))
    with pytest.raises(RegularityProbeFailed):
        build_envelope(pres)


def test_probe_witnesses_are_syzygies():
    rng = random.Random(6)
    seen = 0
    for _ in range(40):
        # a common factor breaks regularity
        h = random_polynomial(rng, Q, 2, 1, 2, 3)
        if h.degree() < 1:
            continue
        gens = [h * random_polynomial(rng, Q, 2, 1, 2, 3) for _ in range(2)]
        if any(g.is_zero() or g.degree() < 1 for g in gens):
            continue
        pres = RegularQuotientPresentation(Q, 2, gens, "groebner", 3)
        res = regularity_probe(pres, 4)
        assert not res.passed
        total = sum((a * f for a, f in zip(res.witness, gens)), Polynomial.zero(Q, 2))
        assert total.is_zero()
        seen += 1
    assert seen >= 10


def test_regular_sequences_pass_probe():
    for ring, n, gens, mode in CASES:
        pres = RegularQuotientPresentation(ring, n, [P(g, ring, n) for g in gens], mode, 3)
        assert regularity_probe(pres).passed


def test_unsupported_combination():
    with pytest.raises(UnsupportedRingModeCombination):
        RegularQuotientPresentation(Z, 1, [P("x", Z, 1)], "groebner", 3)
    with pytest.raises(UnsupportedRingModeCombination):
        RegularQuotientPresentation(ScalarRing.padic(3, 2), 1,
                                    [P("x", ScalarRing.padic(3, 2), 1)], "groebner", 3)


def test_dump_is_deterministic():
    a = envelope(Z, 2, ["x", "y"], N=3).dump()
    b = envelope(Z, 2, ["x", "y"], N=3).dump()
    assert a == b
    assert "g0^[1] * g0^[1] = 2 * g0^[2]" in a
