import random

import pytest

from pdcohom.linalg import (BoundedCochainComplex, DegreeOutOfRange, Matrix, ModuleInvariants,
                            NotAComplex, base_change_complex, cohomology_at,
                            cohomology_representatives, module_cohomology_at, nullspace, rank,
                            smith_normal_form, universal_coefficients_holds)
from pdcohom.poly import Polynomial, monomials_of_degree
from pdcohom.scalars import NoCanonicalMap, ScalarRing

Z = ScalarRing.integers()
Q = ScalarRing.rationals()


def two_term(ring, a):
    return BoundedCochainComplex(ring, 0, 1, {0: 1, 1: 1}, {0: Matrix.from_rows(ring, [[a]])})


def random_unimodular(rng, ring, n, steps=12):
    """(U, U^-1) built from elementary integer operations."""
    U = Matrix.identity(ring, n)
    Ui = Matrix.identity(ring, n)
    for _ in range(steps):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-3, 3)
        E = Matrix.identity(ring, n)
        E.data[i][j] = ring(c)
        Ei = Matrix.identity(ring, n)
        Ei.data[i][j] = ring(-c)
        U, Ui = E @ U, Ui @ Ei
    return U, Ui


def random_complex(rng, ring, length=4):
    """A direct sum of elementary pieces in scrambled bases, with its known cohomology.

    Pieces are free Z in one degree, or Z --a--> Z between neighbouring degrees.
    Returns (complex, {degree: (free_rank, sorted factors)}).
    """
    dims = {n: 0 for n in range(length)}
    pieces = []
    expected = {n: [0, []] for n in range(length)}
    for _ in range(rng.randint(1, 6)):
        n = rng.randrange(length)
        if rng.random() < 0.3 or n == length - 1:
            pieces.append((n, None, dims[n]))
            dims[n] += 1
            expected[n][0] += 1
        else:
            a = rng.choice([1, -1, 2, 3, 4, 6, 9, 12])
            pieces.append((n, a, dims[n], dims[n + 1]))
            dims[n] += 1
            dims[n + 1] += 1
            if abs(a) > 1:
                expected[n + 1][1].append(abs(a))
    diffs = {}
    for n in range(length - 1):
        d = Matrix(ring, dims[n + 1], dims[n])
        for pc in pieces:
            if pc[0] == n and pc[1] is not None:
                d.data[pc[3]][pc[2]] = ring(pc[1])
        diffs[n] = d
    bases = {n: random_unimodular(rng, ring, dims[n]) for n in range(length)}
    scrambled = {n: bases[n + 1][0] @ diffs[n] @ bases[n][1] for n in diffs}
    return BoundedCochainComplex(ring, 0, length - 1, dims, scrambled), expected


def invariant_chain(factors):
    """Invariant factors from elementary pieces: the oracle uses prime-power splitting."""
    from collections import defaultdict
    powers = defaultdict(list)
    for f in factors:
        q = 2
        while f > 1:
            e = 1
            while f % q == 0:
                f //= q
                e *= q
            if e > 1:
                powers[q].append(e)
            q += 1
    for q in powers:
        powers[q].sort(reverse=True)
    width = max((len(v) for v in powers.values()), default=0)
    out = []
    for i in range(width):
        t = 1
        for v in powers.values():
            if i < len(v):
                t *= v[i]
        out.append(t)
    return sorted(out)


def test_snf_examples():
    assert smith_normal_form(Matrix.from_rows(Z, [[2, 0], [0, 3]]))[0] == [1, 6]
    assert smith_normal_form(Matrix(Z, 3, 2))[0] == []
    z27 = ScalarRing.padic(3, 3)
    assert smith_normal_form(Matrix.from_rows(z27, [[3]]))[0] == [3]


def test_snf_transforms_diagonalize():
    rng = random.Random(1)
    for _ in range(100):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        m = Matrix.from_rows(Z, [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)])
        diag, (U, V) = smith_normal_form(m, transforms=True)
        D = U @ m @ V
        for i in range(r):
            for j in range(c):
                want = diag[i] if i == j and i < len(diag) else 0
                assert abs(D[i, j]) == abs(want)
        assert all(b % a == 0 for a, b in zip(diag, diag[1:]))


def test_snf_unimodular_invariance():
    rng = random.Random(2)
    for ring in (Z, ScalarRing.padic(2, 4), ScalarRing.prime_field(7)):
        for _ in range(60):
            r, c = rng.randint(1, 5), rng.randint(1, 5)
            m = Matrix.from_rows(ring, [[rng.randint(-12, 12) for _ in range(c)] for _ in range(r)])
            U, _ = random_unimodular(rng, ring, r)
            V, _ = random_unimodular(rng, ring, c)
            assert smith_normal_form(U @ m @ V)[0] == smith_normal_form(m)[0]


def test_padic_snf_is_powers_of_p():
    rng = random.Random(3)
    ring = ScalarRing.padic(3, 3)
    for _ in range(50):
        m = Matrix.from_rows(ring, [[rng.randint(0, 26) for _ in range(4)] for _ in range(3)])
        for d in smith_normal_form(m)[0]:
            assert d in (1, 3, 9)


def test_cohomology_examples():
    C = two_term(Z, 2)
    assert cohomology_at(C, 1) == ModuleInvariants(Z, 0, (2,))
    assert cohomology_at(C, 0).is_zero()
    C = two_term(Q, 0)
    assert cohomology_at(C, 0).free_rank == 1 and cohomology_at(C, 1).free_rank == 1
    C = two_term(Z, 1)
    assert all(h.is_zero() for h in C.cohomology().values())
    with pytest.raises(DegreeOutOfRange):
        cohomology_at(C, 2)


def koszul_slice(ring):
    """Koszul complex of (x, y) with coefficient degrees 1, 2, 3."""
    m1, m2, m3 = (monomials_of_degree(2, d) for d in (1, 2, 3))
    idx2 = {e: i for i, e in enumerate(m2)}
    idx3 = {e: i for i, e in enumerate(m3)}
    x, y = Polynomial.var(ring, 2, 0), Polynomial.var(ring, 2, 1)
    d0 = Matrix(ring, 2 * len(m2), len(m1))
    for j, e in enumerate(m1):
        f = Polynomial.monomial(ring, 2, e, 1)
        for k, g in enumerate((x * f, y * f)):
            for mono, c in g.terms.items():
                d0.data[k * len(m2) + idx2[mono]][j] = c
    d1 = Matrix(ring, len(m3), 2 * len(m2))
    for k, mult in enumerate((y, -x)):
        for j, e in enumerate(m2):
            g = mult * Polynomial.monomial(ring, 2, e, 1)
            for mono, c in g.terms.items():
                d1.data[idx3[mono]][k * len(m2) + j] = ring(c)
    return BoundedCochainComplex(ring, 0, 2, {0: 2, 1: 6, 2: 4}, {0: d0, 1: d1})


def test_koszul_degree_two_slice_is_acyclic():
    C = koszul_slice(Q)
    # brute force: ker d1 has dimension 6 - rank d1, image of d0 has rank d0
    ker = nullspace(C.d(1))
    assert len(ker) == 6 - rank(C.d(1)) == rank(C.d(0)) == 2
    assert all(h.is_zero() for h in C.cohomology().values())
    assert all(h.is_zero() for h in koszul_slice(Z).cohomology().values())


def test_not_a_complex():
    a = Matrix.from_rows(Z, [[1]])
    with pytest.raises(NotAComplex):
        BoundedCochainComplex(Z, 0, 2, {0: 1, 1: 1, 2: 1}, {0: a, 1: a})


def test_base_change_examples():
    C = two_term(Z, 2).base_change(ScalarRing.prime_field(2))
    assert C.d(0).is_zero()
    z9 = ScalarRing.padic(3, 2)
    C = two_term(z9, 3).base_change(ScalarRing.prime_field(3))
    assert C.d(0).is_zero()
    rng = random.Random(4)
    f5 = ScalarRing.prime_field(5)
    for _ in range(30):
        C, _ = random_complex(rng, Z)
        D = base_change_complex(C, f5)
        for n in C.differentials:
            assert D.d(n).data == [[x % 5 for x in row] for row in C.d(n).data]
    with pytest.raises(NoCanonicalMap):
        two_term(Q, 1).base_change(f5)
    with pytest.raises(NoCanonicalMap):
        two_term(z9, 1).base_change(ScalarRing.padic(3, 3))


def test_random_complexes_known_cohomology():
    rng = random.Random(5)
    for _ in range(100):
        C, expected = random_complex(rng, Z)
        for n, (free, factors) in expected.items():
            h = cohomology_at(C, n)
            assert h.free_rank == free
            assert list(h.torsion) == invariant_chain(factors)


def test_universal_coefficients_random():
    rng = random.Random(6)
    for _ in range(100):
        C, _ = random_complex(rng, Z)
        p = rng.choice([2, 3, 5])
        for n, lhs, rhs in universal_coefficients_holds(C, p):
            assert lhs == rhs, (n, lhs, rhs)


def test_universal_coefficients_padic():
    rng = random.Random(7)
    ring = ScalarRing.padic(3, 3)
    for _ in range(50):
        C, _ = random_complex(rng, ring)
        for n, lhs, rhs in universal_coefficients_holds(C, 3):
            assert lhs == rhs


def test_module_cohomology_universal_coefficients():
    # literal H^n(C (x) Z/p^N) = H^n(C) (x) Z/p^N  +  Tor(H^{n+1}(C), Z/p^N) for integer C
    from math import gcd
    rng = random.Random(8)
    p, N = 2, 4
    q = p ** N
    ring = ScalarRing.padic(p, N)
    for _ in range(60):
        C, _ = random_complex(rng, Z)
        H = C.cohomology()
        D = base_change_complex(C, ring)
        for n in range(D.lo, D.hi + 1):
            cyclic = [q] * H[n].free_rank + [gcd(t, q) for t in H[n].torsion]
            if n + 1 <= C.hi:
                cyclic += [gcd(t, q) for t in H[n + 1].torsion]
            cyclic = sorted(c for c in cyclic if c > 1)
            h = module_cohomology_at(D, n)
            assert sorted([q] * h.free_rank + list(h.torsion)) == cyclic


def test_representatives_are_cocycles():
    rng = random.Random(9)
    for _ in range(50):
        C, expected = random_complex(rng, Z)
        for n in range(C.lo, C.hi + 1):
            reps = cohomology_representatives(C, n)
            h = cohomology_at(C, n)
            assert len(reps) == h.free_rank + len(h.torsion)
            d = C.d(n)
            for v in reps:
                col = Matrix(Z, len(v), 1, [[x] for x in v])
                assert (d @ col).is_zero()


def test_acyclic_identity_complex():
    for ring in (Z, Q, ScalarRing.padic(5, 2)):
        C = BoundedCochainComplex(ring, 0, 1, {0: 3, 1: 3}, {0: Matrix.identity(ring, 3)})
        assert all(h.is_zero() for h in C.cohomology().values())


def test_triplet_roundtrip():
    rng = random.Random(10)
    for ring in (Z, Q, ScalarRing.padic(3, 2)):
        for _ in range(20):
            m = Matrix.from_rows(ring, [[rng.choice([0, 0, 1, -2, 5]) for _ in range(4)]
                                        for _ in range(3)])
            assert Matrix.from_text(m.to_text(), ring) == m


def test_euler_characteristic_matches_cohomology():
    rng = random.Random(11)
    for _ in range(50):
        C, _ = random_complex(rng, Q)
        H = C.cohomology()
        assert C.euler_characteristic() == sum((-1) ** n * h.free_rank for n, h in H.items())


def test_module_invariants_format():
    assert ModuleInvariants(Z, 2, (2, 4)).format() == "Z^2 + Z/2 + Z/4"
    assert ModuleInvariants(Q, 0).format() == "0"
    with pytest.raises(ValueError):
        ModuleInvariants(Z, 0, (2, 3))
