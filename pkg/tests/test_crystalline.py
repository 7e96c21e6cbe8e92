import random

import pytest

from pdcohom.crystalline import (ComparisonFailed, InvalidLift, LiftSpec, crystalline_via_lift,
                                 default_lift, mod_p_comparison, random_lift, rewriting_table,
                                 lift_envelope, target_envelope)
from pdcohom.derham import derham_cohomology, derham_slice
from pdcohom.linalg import base_change_complex, cohomology_at
from pdcohom.poly import parse_polynomial
from pdcohom.scalars import ScalarRing


def P(text, ring, n=2):
    return parse_polynomial(text, ring, n, ["x", "y", "z"][:n])


def test_default_lift_examples():
    spec = default_lift(3, 1)
    assert spec.is_polynomial and spec.zpn == ScalarRing.padic(3, 2)
    F3 = ScalarRing.prime_field(3)
    spec = default_lift(3, 2, [P("y", F3)], N=3)
    assert spec.lift == [P("y", ScalarRing.padic(3, 3))]
    Z = ScalarRing.integers()
    z25 = ScalarRing.padic(5, 2)
    spec = default_lift(5, 1, [P("x^2 - 2", Z, 1)])
    assert spec.lift == [P("x^2 - 2", z25, 1)]
    assert spec.lift[0].terms[(0,)] == 23
    assert spec.target == [P("x^2 + 3", ScalarRing.prime_field(5), 1)]
    # over F_5 the literal is gone: the canonical representative 3 lifts to 3
    spec = default_lift(5, 1, [P("x^2 - 2", ScalarRing.prime_field(5), 1)])
    assert spec.lift == [P("x^2 + 3", z25, 1)]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_lift_cohomology_one_variable(p):
    spec = default_lift(p, 1, N=2)
    rows = {(r.coh_degree, r.poly_degree): r.invariants for r in crystalline_via_lift(spec, 3 * p)}
    for d in range(1, 3 * p + 1):
        h1 = rows[(1, d)]
        if d % p == 0:
            # slice d: Z/p^2 x^d -> Z/p^2 x^{d-1} dx is multiplication by d
            want = (p ** min(2, _val(d, p)),) if _val(d, p) < 2 else ()
            assert h1.torsion == want and h1.free_rank == (1 if _val(d, p) >= 2 else 0)
        else:
            assert h1.is_zero()
    assert rows[(0, 0)].free_rank == 1


def _val(d, p):
    v = 0
    while d % p == 0:
        d //= p
        v += 1
    return v


def test_no_variable_target():
    spec = default_lift(7, 0, N=3)
    rows = crystalline_via_lift(spec, 4)
    h0 = [r for r in rows if r.poly_degree == 0]
    assert len(h0) == 1 and h0[0].invariants.free_rank == 1 and not h0[0].invariants.torsion
    assert all(r.invariants.is_zero() for r in rows if r.poly_degree > 0)
    assert mod_p_comparison(spec, 4).passed


@pytest.mark.parametrize("p", [2, 3, 5])
def test_mod_p_comparison_polynomial(p):
    rep = mod_p_comparison(default_lift(p, 1, N=3), 20)
    assert rep.passed
    fp_rows = [r for r in rep.rows if r.side == "F_p" and r.n == 1]
    for r in fp_rows:
        d = int(r.slice.split("=")[1])
        assert r.dims == ("1" if d and d % p == 0 else "0")
    assert mod_p_comparison(default_lift(p, 2, N=2), 12).passed


def test_uct_against_direct_fp_complex():
    # independent path: reduce the Z/p^N slice complexes and compare with the F_p De Rham table
    for p in (2, 3):
        spec = default_lift(p, 2, N=3)
        lift = {(r.coh_degree, r.poly_degree): r.invariants for r in crystalline_via_lift(spec, 9)}
        fp = {(r.coh_degree, r.poly_degree): r.invariants.free_rank
              for r in derham_cohomology(spec.fp, 2, 9, representatives=False)}
        for (n, d), h in lift.items():
            tor = lift[(n + 1, d)].tor_fp_dim(p) if (n + 1, d) in lift else 0
            assert fp[(n, d)] == h.tensor_fp_dim(p) + tor


def test_precision_stability():
    for p in (2, 3):
        for m in (1, 2):
            for d in range(0, 10):
                hi = derham_slice(ScalarRing.padic(p, 3), m, d).complex
                lo = derham_slice(ScalarRing.padic(p, 2), m, d).complex
                red = base_change_complex(hi, ScalarRing.padic(p, 2))
                for n in range(m):
                    assert red.d(n) == lo.d(n)
                H = [cohomology_at(hi, n) for n in range(m + 1)]
                for n in range(m + 1):
                    b = cohomology_at(lo, n)
                    # a pivot p^2 vanishes mod p^2: for d_{n-1} it turns torsion of H^n
                    # into a free class, for d_n it enlarges the kernel in degree n
                    cut = sum(1 for t in H[n].torsion if t % p ** 2 == 0)
                    if n + 1 <= m:
                        cut += sum(1 for t in H[n + 1].torsion if t % p ** 2 == 0)
                    assert b.free_rank == H[n].free_rank + cut
                    assert sorted(b.torsion) == sorted(t for t in H[n].torsion if t % p ** 2)


QUOTIENTS = [
    (5, 1, ["x^2 - 2"]),
    (3, 2, ["y"]),
    (3, 2, ["x - y^3", "y^2 + y"]),
    (2, 2, ["x^2 + x*y + 1"]),
]


def quotient_spec(p, n, gens, N=2):
    Fp = ScalarRing.prime_field(p)
    return default_lift(p, n, [P(g, Fp, n) for g in gens], N=N)


@pytest.mark.parametrize("case", QUOTIENTS, ids=lambda c: ",".join(c[2]))
def test_quotient_comparison_and_lift_independence(case):
    spec = quotient_spec(*case)
    base = mod_p_comparison(spec, 6)
    assert base.passed
    rng = random.Random(hash(case[2][0]) % 1000)
    for _ in range(5):
        other = random_lift(spec, rng)
        assert mod_p_comparison(other, 6).table() == base.table()


def test_twenty_random_lift_pairs():
    rng = random.Random(1)
    spec = quotient_spec(3, 2, ["x - y^3", "y^2 + y"], N=3)
    base = mod_p_comparison(spec, 4).table()
    changed = 0
    for _ in range(20):
        a, b = random_lift(spec, rng), random_lift(spec, rng)
        changed += a.lift != spec.lift
        assert mod_p_comparison(a, 4).table() == mod_p_comparison(b, 4).table() == base
    assert changed >= 15


def test_corrupted_lift_still_passes():
    spec = quotient_spec(5, 1, ["x^2 - 2"])
    z25 = spec.zpn
    corrupted = LiftSpec(5, 2, 1, spec.target, [P("x^2 + 5*x - 7", z25, 1)])
    assert mod_p_comparison(corrupted, 6).table() == mod_p_comparison(spec, 6).table()


def test_rewriting_tables_reduce():
    spec = quotient_spec(3, 2, ["x - y^3", "y^2 + y"])
    El, Et = lift_envelope(spec), target_envelope(spec)
    for n in range(spec.weight_cap):
        for d in range(4):
            assert rewriting_table(El, n, d, spec.fp) == rewriting_table(Et, n, d, spec.fp)


def test_invalid_lifts():
    F3 = ScalarRing.prime_field(3)
    z9 = ScalarRing.padic(3, 2)
    with pytest.raises(InvalidLift):
        LiftSpec(3, 2, 1, [P("x - 1", F3, 1)], [P("x - 2", z9, 1)])
    with pytest.raises(InvalidLift):
        LiftSpec(3, 2, 1, [P("x - 1", F3, 1)], [])
    with pytest.raises(InvalidLift):
        # leading term x^2 in the lift disappears mod 3
        LiftSpec(3, 2, 1, [P("x + 1", F3, 1)], [P("3*x^2 + x + 1", z9, 1)])


def test_non_triangular_quotient_rejected():
    # triangular presentations are always regular; anything else is refused up front
    with pytest.raises(InvalidLift):
        quotient_spec(3, 2, ["x*y", "y"])


def test_comparison_failure_is_reported():
    spec = quotient_spec(3, 2, ["y"])

    def broken(job, items):
        # simulate a corrupted worker that swaps the F_p side of the first slice
        out = list(map(job, items))
        out[0][1].dims = "99"
        out[0][0].verdict = "fail"
        return out

    with pytest.raises(ComparisonFailed) as info:
        mod_p_comparison(spec, 2, map_fn=broken)
    assert info.value.slice == "w=0,d=0"
    rep = mod_p_comparison(spec, 2, map_fn=broken, raise_on_fail=False)
    assert not rep.passed
