"""Batch interface: ``pdcohom run <jobfile>`` and ``pdcohom selftest``.

Jobs are JSON objects; reports are plain text with CSV blocks and a sha256
content hash that leaves out the wall-time line.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import __version__
from .cech import CECH_HEADER, cech_compare
from .crystalline import (COMPARISON_HEADER, default_lift, crystalline_via_lift,
                          mod_p_comparison)
from .derham import CSV_HEADER, derham_cohomology
from .envelope import (RegularQuotientPresentation, build_envelope, envelope_graded_piece,
                       graded_rank_formula, regularity_probe, square_zero_truncation)
from .poly import PolynomialParseError, parse_polynomial
from .scalars import ScalarRing, is_prime

COMMANDS = ("envelope", "derham", "crystalline", "cech", "compare-modp", "compare-cech", "probe")
RINGS = ("Z", "Q", "Fp", "Zpn")

REQUIRED = {
    "envelope": ("generators", "N"),
    "derham": ("D",),
    "crystalline": ("D",),
    "compare-modp": ("D",),
    "cech": ("M", "N", "D"),
    "compare-cech": ("M", "N", "D"),
    "probe": ("generators", "D"),
}


class ParseError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class JobSpec:
    command: str
    ring: str
    p: int | None
    vars: list[str]
    generators: list[str] = field(default_factory=list)
    mode: str = "triangular"
    N: int | None = None
    M: int | None = None
    D: int | None = None
    precision: int | None = None
    weight_cap: int = 3
    seed: int = 0

    def scalar_ring(self) -> ScalarRing:
        if self.ring == "Z":
            return ScalarRing.integers()
        if self.ring == "Q":
            return ScalarRing.rationals()
        if self.ring == "Fp":
            return ScalarRing.prime_field(self.p)
        return ScalarRing.padic(self.p, self.precision)

    def polynomials(self, ring: ScalarRing | None = None):
        ring = ring or self.scalar_ring()
        return [parse_polynomial(g, ring, len(self.vars), self.vars) for g in self.generators]

    def to_dict(self) -> dict:
        d = {"command": self.command, "ring": self.ring, "vars": list(self.vars),
             "generators": list(self.generators), "mode": self.mode, "seed": self.seed,
             "weight_cap": self.weight_cap}
        for key in ("p", "N", "M", "D", "precision"):
            v = getattr(self, key)
            if v is not None:
                d[key] = v
        return d

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _positive_int(job, key, errors, minimum=1):
    v = job.get(key)
    if v is None:
        return None
    if not isinstance(v, int) or isinstance(v, bool):
        errors.append(f"field '{key}': expected an integer, got {v!r}")
        return None
    if v < minimum:
        errors.append(f"field '{key}': must be >= {minimum}, got {v}")
        return None
    return v


def parse_job(text: str) -> JobSpec:
    """Validate a JSON job; every problem is reported, not only the first."""
    try:
        job = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError([f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    if not isinstance(job, dict):
        raise ParseError(["top level: expected a JSON object"])
    errors: list[str] = []
    command = job.get("command")
    if command not in COMMANDS:
        errors.append(f"field 'command': expected one of {', '.join(COMMANDS)}, got {command!r}")
    ring = job.get("ring", "Fp" if command in ("crystalline", "compare-modp") else None)
    if ring not in RINGS:
        errors.append(f"field 'ring': expected one of {', '.join(RINGS)}, got {ring!r}")
    p = job.get("p")
    if ring in ("Fp", "Zpn") or command in ("crystalline", "compare-modp"):
        if p is None:
            errors.append(f"field 'p': required for ring {ring}")
        elif not isinstance(p, int) or isinstance(p, bool) or not is_prime(p):
            errors.append(f"field 'p': expected a prime, got {p!r}")
            p = None
    if command in ("crystalline", "compare-modp") and ring != "Fp":
        errors.append("field 'ring': crystalline jobs take an F_p target (ring 'Fp')")
    vars_ = job.get("vars", 0)
    if isinstance(vars_, int) and not isinstance(vars_, bool) and vars_ >= 0:
        names = [f"x{i}" for i in range(vars_)]
    elif isinstance(vars_, list) and all(isinstance(v, str) and v.isidentifier() for v in vars_):
        names = list(vars_)
        if len(set(names)) != len(names):
            errors.append("field 'vars': duplicate variable names")
    else:
        errors.append(f"field 'vars': expected a count or a list of names, got {vars_!r}")
        names = []
    gens = job.get("generators", [])
    if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
        errors.append("field 'generators': expected a list of polynomial strings")
        gens = []
    mode = job.get("mode", "triangular")
    if mode not in ("triangular", "groebner"):
        errors.append(f"field 'mode': expected 'triangular' or 'groebner', got {mode!r}")
    N = _positive_int(job, "N", errors)
    M = _positive_int(job, "M", errors)
    D = _positive_int(job, "D", errors, minimum=0)
    precision = _positive_int(job, "precision", errors)
    weight_cap = _positive_int(job, "weight_cap", errors)
    seed = job.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        errors.append(f"field 'seed': expected an integer, got {seed!r}")
    for key in REQUIRED.get(command, ()):
        if key not in job:
            errors.append(f"field '{key}': required for command {command}")
    if command in ("crystalline", "compare-modp") and precision is None:
        precision = N
        if precision is None and "N" not in job:
            errors.append(f"field 'precision': required for command {command} (or give 'N')")
    if ring == "Zpn" and precision is None and "precision" not in job:
        errors.append("field 'precision': required for ring Zpn")
    known = {"command", "ring", "p", "vars", "generators", "mode", "N", "M", "D",
             "precision", "weight_cap", "seed"}
    for key in sorted(set(job) - known):
        errors.append(f"field '{key}': unknown field")
    spec = None
    if not errors:
        spec = JobSpec(command, ring, p, names, list(gens), mode, N, M, D, precision,
                       weight_cap or 3, seed)
        base = spec.scalar_ring() if command not in ("crystalline", "compare-modp") \
            else ScalarRing.prime_field(p)
        for i, g in enumerate(gens):
            try:
                parse_polynomial(g, base, len(names), names)
            except (PolynomialParseError, ValueError) as exc:
                errors.append(f"field 'generators[{i}]': {exc}")
        if mode == "groebner" and not base.is_field:
            errors.append(f"field 'mode': Groebner presentations need a field, not {base}")
    if errors:
        raise ParseError(errors)
    return spec


# reports ----------------------------------------------------------------------

@dataclass
class Table:
    name: str
    header: list[str]
    rows: list[list[str]]

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()


@dataclass
class Report:
    job: str
    tables: list[Table] = field(default_factory=list)
    verdicts: list[tuple[str, bool]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.verdicts)

    def body(self) -> str:
        lines = ["pdcohom report", f"version: {self.version}", f"job: {self.job}"]
        for name, ok in self.verdicts:
            lines.append(f"verdict {name}: {'pass' if ok else 'fail'}")
        lines.append(f"overall: {'pass' if self.passed else 'fail'}")
        for n in self.notes:
            lines.append(f"note: {n}")
        for t in self.tables:
            lines.append(f"[table {t.name}]")
            lines.append(t.csv().rstrip("\n"))
        return "\n".join(lines) + "\n"

    @property
    def content_hash(self) -> str:
        return hashlib.sha256(self.body().encode()).hexdigest()

    def render(self) -> str:
        return (self.body() + f"wall_time: {self.wall_time:.3f}s\n"
                + f"content_hash: {self.content_hash}\n")


def _inv_fields(inv) -> list[str]:
    return [str(inv.free_rank), " ".join(str(t) for t in inv.torsion)]


def run_job(spec: JobSpec, map_fn: Callable = map) -> Report:
    start = time.perf_counter()
    rep = Report(spec.serialize())
    handler = _HANDLERS[spec.command]
    handler(spec, rep, map_fn)
    rep.wall_time = time.perf_counter() - start
    return rep


def _run_derham(spec, rep, map_fn):
    rows = derham_cohomology(spec.scalar_ring(), len(spec.vars), spec.D, map_fn=map_fn)
    rep.tables.append(Table("derham", CSV_HEADER, [r.csv_fields() for r in rows]))


def _presentation(spec) -> RegularQuotientPresentation:
    ring = spec.scalar_ring()
    return RegularQuotientPresentation(ring, len(spec.vars), spec.polynomials(ring), spec.mode,
                                       spec.N or 2, degree_bound=spec.D)


def _run_envelope(spec, rep, map_fn):
    E = build_envelope(_presentation(spec))
    rows = []
    ok = True
    for n in range(E.N):
        g = envelope_graded_piece(E, n)
        expected = graded_rank_formula(E.r, n)
        ok &= g.rank == expected
        rows.append([str(n), str(g.rank), str(expected),
                     " ".join(f"[{','.join(map(str, e))}]" for e in g.basis)])
    rep.tables.append(Table("graded_ranks", ["weight", "rank", "expected", "basis"], rows))
    rep.verdicts.append(("graded rank law", ok))
    if E.N >= 2:
        sz = square_zero_truncation(E)
        rep.tables.append(Table("square_zero", ["check", "result"],
                                [[name, "pass" if v else "fail"] for name, v in sz.checks]))
        rep.verdicts.append(("square-zero extension", sz.ok))
        if sz.quotient_basis is not None:
            rep.notes.append("A/I^2 basis: " + ", ".join(str(b) for b in sz.quotient_basis))
    rep.notes.append("envelope dump follows")
    rep.tables.append(Table("dump", ["line"], [[ln] for ln in E.dump().splitlines()]))


def _lift(spec):
    try:
        # integer literals lift verbatim
        gens = spec.polynomials(ScalarRing.integers())
    except ValueError:
        gens = spec.polynomials(ScalarRing.prime_field(spec.p))
    return default_lift(spec.p, len(spec.vars), gens, spec.precision,
                        weight_cap=spec.weight_cap)


def _run_crystalline(spec, rep, map_fn):
    lift = _lift(spec)
    rows = crystalline_via_lift(lift, spec.D, map_fn)
    rep.notes.append(lift.describe())
    rep.tables.append(Table("crystalline", ["coh_degree", "poly_degree", "free_rank",
                                            "invariant_factors"],
                            [r.csv_fields() for r in rows]))


def _run_compare_modp(spec, rep, map_fn):
    lift = _lift(spec)
    report = mod_p_comparison(lift, spec.D, map_fn, raise_on_fail=False)
    rep.notes.append(lift.describe())
    rep.tables.append(Table("comparison", COMPARISON_HEADER,
                            [r.csv_fields() for r in report.rows]))
    rep.verdicts.append(("mod-p comparison", report.passed))


def _cech_rows(spec, map_fn):
    return cech_compare(spec.scalar_ring(), len(spec.vars), spec.M, spec.N, spec.D, map_fn,
                        raise_on_fail=False)


def _run_cech(spec, rep, map_fn):
    rows = _cech_rows(spec, map_fn)
    rep.tables.append(Table("cech", CECH_HEADER[:6], [r.csv_fields()[:6] for r in rows]))


def _run_compare_cech(spec, rep, map_fn):
    rows = _cech_rows(spec, map_fn)
    rep.tables.append(Table("cech", CECH_HEADER, [r.csv_fields() for r in rows]))
    rep.verdicts.append(("cech comparison", all(r.passed for r in rows)))


def _run_probe(spec, rep, map_fn):
    res = regularity_probe(_presentation(spec), spec.D)
    witness = "" if res.witness is None else " ; ".join(str(w) for w in res.witness)
    rep.tables.append(Table("probe", ["result", "field", "degree", "witness"],
                            [["pass" if res.passed else "fail", str(res.field),
                              str(res.witness_degree if not res.passed else res.degree_bound),
                              witness]]))
    rep.verdicts.append(("regularity", res.passed))


_HANDLERS = {
    "derham": _run_derham, "envelope": _run_envelope, "crystalline": _run_crystalline,
    "compare-modp": _run_compare_modp, "cech": _run_cech, "compare-cech": _run_compare_cech,
    "probe": _run_probe,
}


# selftest ------------------------------------------------------------------------------

SELFTEST_JOBS = [
    {"command": "derham", "ring": "Q", "vars": 2, "D": 8},
    {"command": "derham", "ring": "Z", "vars": 1, "D": 10},
    {"command": "derham", "ring": "Fp", "p": 3, "vars": 1, "D": 12},
    {"command": "envelope", "ring": "Z", "vars": ["t"], "generators": ["t"], "N": 6},
    {"command": "envelope", "ring": "Z", "vars": ["x", "y"], "generators": ["x", "y"], "N": 3},
    {"command": "envelope", "ring": "Q", "vars": ["x", "y"], "generators": ["x^2", "y"],
     "mode": "groebner", "N": 3},
    {"command": "crystalline", "ring": "Fp", "p": 3, "vars": 1, "D": 10, "precision": 2},
    {"command": "compare-modp", "ring": "Fp", "p": 3, "vars": 1, "D": 15, "N": 2},
    {"command": "compare-modp", "ring": "Fp", "p": 2, "vars": 2, "D": 8, "precision": 3},
    {"command": "compare-modp", "ring": "Fp", "p": 5, "vars": ["x"], "generators": ["x^2 - 2"],
     "D": 4, "precision": 2},
    {"command": "compare-cech", "ring": "Q", "vars": 1, "M": 4, "N": 3, "D": 6},
    {"command": "compare-cech", "ring": "Z", "vars": 2, "M": 3, "N": 2, "D": 4},
    {"command": "probe", "ring": "Q", "vars": ["x", "y"], "generators": ["x", "y"], "D": 4},
]


def _property_checks(seed: int) -> list[tuple[str, bool]]:
    """Small seeded property suite (pd axioms, envelope confluence, d^2 = 0)."""
    from .derham import d_dR, random_form
    from .pd_free import pd_gamma, pd_mul, random_pd_element, rational_realization
    from .poly import Polynomial

    rng = random.Random(seed)
    Z = ScalarRing.integers()
    out = []
    ok = True
    for _ in range(30):
        a = random_pd_element(rng, Z, 0, 3, 6)
        b = random_pd_element(rng, Z, 0, 3, 6)
        ok &= pd_mul(a, b) == pd_mul(b, a)
        ok &= (rational_realization(pd_mul(a, b)).truncate(5)
               == (rational_realization(a) * rational_realization(b)).truncate(5))
        ok &= pd_gamma(2, a + b) == pd_gamma(2, a) + pd_mul(a, b) + pd_gamma(2, b)
    out.append(("pd algebra", ok))
    t = Polynomial.var(Z, 1, 0)
    E = build_envelope(RegularQuotientPresentation(Z, 1, [t], N=6))
    ok = True
    for _ in range(20):
        x = random_pd_element(rng, Z, 1, 1, 6, min_weight=0, coeff_degree=3)
        ok &= E.normal_form(x) == E.normal_form(x, rng)
    out.append(("envelope confluence", ok))
    ok = True
    for _ in range(30):
        w = random_form(rng, Z, 3, rng.randint(0, 2), 6)
        ok &= d_dR(d_dR(w)).is_zero()
    out.append(("d squared", ok))
    return out


def selftest(seed: int = 0, map_fn: Callable = map) -> Report:
    start = time.perf_counter()
    rep = Report(json.dumps({"command": "selftest", "seed": seed}, sort_keys=True))
    rows = []
    for job in SELFTEST_JOBS:
        spec = parse_job(json.dumps(job))
        sub = run_job(spec, map_fn)
        rows.append([spec.command, spec.serialize(), "pass" if sub.passed else "fail",
                     sub.content_hash])
        rep.verdicts.append((f"{spec.command} {spec.serialize()}", sub.passed))
    rep.tables.append(Table("jobs", ["command", "job", "verdict", "content_hash"], rows))
    props = _property_checks(seed)
    rep.tables.append(Table("properties", ["check", "result"],
                            [[n, "pass" if v else "fail"] for n, v in props]))
    rep.verdicts.extend(props)
    rep.wall_time = time.perf_counter() - start
    return rep


# entry point -------------------------------------------------------------------------------

def _write_outputs(rep: Report, out: str | None, stem: str):
    if not out:
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / f"{stem}.txt").write_text(rep.render())
    for t in rep.tables:
        (d / f"{stem}_{t.name}.csv").write_text(t.csv())


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="pdcohom",
                                 description="divided-power envelopes, De Rham and "
                                             "crystalline cohomology at desk scale")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for slices")
    ap.add_argument("--out", help="directory for the report and CSV files")
    ap.add_argument("--version", action="version", version=f"pdcohom {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="run a JSON job file")
    run.add_argument("jobfile")
    st = sub.add_parser("selftest", help="run the built-in job suite and property checks")
    st.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return 2

    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        map_fn = pool.map if args.threads > 1 else map
        if args.cmd == "selftest":
            rep = selftest(args.seed, map_fn)
            stem = "selftest"
        else:
            try:
                text = Path(args.jobfile).read_text(encoding="utf-8")
            except OSError as exc:
                print(f"error: cannot read job file: {exc}", file=sys.stderr)
                return 2
            try:
                spec = parse_job(text)
            except ParseError as exc:
                for e in exc.errors:
                    print(f"error: {e}", file=sys.stderr)
                return 2
            try:
                rep = run_job(spec, map_fn)
            except (ValueError, ArithmeticError) as exc:
                print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
                return 2
            stem = Path(args.jobfile).stem
    sys.stdout.write(rep.render())
    _write_outputs(rep, args.out, stem)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
