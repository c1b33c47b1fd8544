"""Acceptance criteria, one test each.

Every test records a PASS or FAIL line; the lines are printed in the pytest
terminal summary, or directly when this file is run as a script.
"""

import itertools
import sys
import time

import pytest

import conftest
from twistedfock.algebra import BracketChecker, bracket_cases, constants_table
from twistedfock.character import character_table, dominance_check, generating_function, hwv_search, is_lambda_l
from twistedfock.fock import FockMonomial, fock_space
from twistedfock.lattice import RootClass, check_cocycle_antisymmetry, classify_p_image, lattice
from twistedfock.scalar import Q
from twistedfock.verify import (
    suite_brackets,
    suite_cartan,
    suite_contraction,
    suite_covariance,
    suite_grading,
    suite_heisenberg,
    suite_jacobi,
    suite_parity,
    window,
)
from twistedfock.vertex import PhaseConvention

LEMMAS = [f"5.{k}" for k in range(3, 13)]
FULL, LATTICE_ONLY = PhaseConvention.FULL_EXPONENT, PhaseConvention.LATTICE_ONLY


def record(n: int, ok: bool, title: str, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:>2}: {title}" + (f"  [{detail}]" if detail else "")
    conftest.ACCEPTANCE[n] = line


class timed:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


# ---------------------------------------------------------------------------

def test_c01_cocycle_antisymmetry():
    with timed() as t:
        pairs = 0
        fails = []
        for l in range(2, 6):
            lat = lattice(l)
            roots = set(lat.finite_roots())
            pairs += sum(1 for a in roots for b in roots if tuple(x + y for x, y in zip(a, b)) in roots)
            fails += check_cocycle_antisymmetry(lat)
    ok = not fails and pairs > 0 and t.seconds < 1
    record(1, ok, "cocycle antisymmetry, l = 2..5", f"{pairs} root pairs, {t.seconds:.2f}s")
    assert ok


def test_c02_p_classification():
    with timed() as t:
        rows = [classify_p_image(lattice(l), r) for l in range(2, 6) for r in lattice(l).root_tuples()]
    bad = [r for r in rows if not r["ok"]]
    l2_literal = sum(1 for r in rows if len(r["root"]) == 2 and not r["literal"])
    ok = not bad and t.seconds < 1
    record(2, ok, "p / p0 classification, l = 2..5",
           f"{len(rows)} roots, {l2_literal} rank-2 middle roots outside the literal index range, {t.seconds:.2f}s")
    assert ok


def test_c03_heisenberg_relations():
    with timed() as t:
        reps = [suite_heisenberg(l, seed=2024, samples=100, max_k2=6) for l in (2, 3)]
    ok = all(r["ok"] for r in reps) and t.seconds < 5
    record(3, ok, "Heisenberg module relations, l = 2, 3",
           f"{sum(r['checks'] for r in reps)} checks, {t.seconds:.2f}s")
    assert ok


def test_c04_grading():
    with timed() as t:
        rep = suite_grading(2, depth=3, mode_range=2)
    ok = rep["ok"] and t.seconds < 30
    record(4, ok, "grading on the depth-3 window, l = 2", f"{rep['checks']} checks, {t.seconds:.1f}s")
    assert ok


def test_c05_long_root_parity():
    basis = window(2, 3).monomials
    rep = suite_parity(2, basis, mode_range=2)
    ok = rep["ok"] and len(basis) == 1520
    record(5, ok, "integer long-root modes vanish on the depth-3 window", f"{rep['checks']} checks")
    assert ok


def test_c06_contraction():
    rep = suite_contraction(2, seed=7, order=6)
    ok = rep["ok"] and rep["checks"] == 2 * 12 * 12
    record(6, ok, "contraction identities to order 6, l = 2", f"{rep['checks']} checks")
    assert ok


def test_c07_covariance():
    rep = suite_covariance(2, n_range=2, d_range=2)
    ok = rep["ok"]
    record(7, ok, "Heisenberg covariance |n|, |d| <= 2, l = 2", f"{rep['checks']} checks")
    assert ok


@pytest.fixture(scope="module")
def rank3_middle_rows():
    """Rows for the middle + middle = middle lemma, which first occurs at l = 3."""
    fs = fock_space(3)
    basis = fs.enumerate_basis(fs.vacuum_degree - 1, fs.vacuum_degree).monomials
    out = {}
    for conv in (FULL, LATTICE_ONLY):
        cases = [cs for cs in bracket_cases(lattice(3), 2) if cs.lemma.rstrip("'") == "5.9"]
        reps = BracketChecker(3, conv).run(cases, basis)
        out[conv] = (sum(not r.consistent for r in reps), constants_table(reps))
    return out


def test_c08_bracket_closure(rank3_middle_rows):
    results = {}
    for conv in (FULL, LATTICE_ONLY):
        with timed() as t:
            rep = suite_brackets(2, depth=3, mode_range=2, convention=conv)
        results[conv] = (rep, t.seconds)
    closed = [c for c, (rep, _) in results.items() if not rep["closure_failures"]]
    rows = {c: results[c][0]["constants"] + rank3_middle_rows[c][1] for c in results}
    # every lemma has at least one row with a fitted constant beside the stated one
    covered = {c: {r["lemma"].rstrip("'") for r in rows[c] if r["exercised"] and r["stated"]} for c in rows}
    fast = all(s < 600 for _, s in results.values())
    ok = bool(closed) and all(set(LEMMAS) <= covered[c] for c in covered) and fast \
        and all(n == 0 for n, _ in rank3_middle_rows.values())
    times = ", ".join(f"{c}: {len(rep['reports'])} cases, {len(rep['closure_failures'])} closure failures, "
                      f"{rep['stated_mismatches']} stated-constant mismatches, {s:.0f}s"
                      for c, (rep, s) in results.items())
    record(8, ok, "bracket closure on the depth-3 window, l = 2", times)
    assert ok


@pytest.mark.xfail(strict=True, reason="[e_i, f_i] is not h_i for any i: e1/f1 gives -h1, e2/f2 gives sqrt(-1) h2, "
                                       "and [e0, f0] carries central term 1/2 against 1 in h0 (see decisions ledger)")
def test_c09_cartan_relations():
    reps = {c: suite_cartan(2, depth=1, convention=c) for c in (FULL, LATTICE_ONLY)}
    ok = any(r["ok"] for r in reps.values())
    fails = sorted({f["relation"] for r in reps.values() for f in r["failures"]})
    record(9, ok, "Cartan relations with the derived GCM, l = 2", "failing: " + ", ".join(fails))
    assert ok


def test_c10_jacobi():
    reps = [suite_jacobi(2, seed=11, count=50, convention=c) for c in (FULL, LATTICE_ONLY)]
    ok = all(r["ok"] for r in reps)
    record(10, ok, "Jacobiator vanishes on 50 seeded triples", f"{sum(r['checks'] for r in reps)} checks")
    assert ok


def _minimal_vectors(l):
    lat = lattice(l)
    base = lat.form_q(lat.lam, lat.lam)
    return sum(1 for r in itertools.product(range(-3, 4), repeat=l)
               if lat.form_q(lat.shifted(r), lat.shifted(r)) == base)


def test_c11_top_slice():
    dims = {l: character_table(l, 0).slice_totals() for l in (2, 3)}
    ok = dims[2] == {0: 4} == {0: _minimal_vectors(2)} and dims[3] == {0: 8} == {0: _minimal_vectors(3)}
    record(11, ok, "top slice dimension 4 at l = 2 and 8 at l = 3", f"{dims[2][0]}, {dims[3][0]}")
    assert ok


def test_c12_character_consistency():
    with timed() as t:
        got = character_table(2, 5).slice_totals()
        expect = generating_function(2, 5)
    ok = got == expect and len(got) == 11 and t.seconds < 60
    record(12, ok, "graded dimensions match the generating function to depth 5, l = 2", f"{t.seconds:.1f}s")
    assert ok


def test_c13_hwv_uniqueness():
    rep = hwv_search(2, 2)
    lam = fock_space(2).lat.lam
    ok = (len(rep.vectors) == 1 and len(rep.vectors[0]) == 1
          and next(iter(rep.vectors[0]))[0] == FockMonomial((), (0, 0))
          and rep.weights[0] is not None and is_lambda_l(rep.weights[0]))
    w = rep.weights[0]
    record(13, ok, "unique highest weight vector at l = 2, depth 2",
           f"e^lambda with lambda = {list(map(str, lam))}, h = {[str(x) for x in w.finite]}, level {w.level}")
    assert ok


def test_c14_dominance():
    reps = [dominance_check(l, 6) for l in (2, 3)]
    ok = all(r["solutions"] == [(0,) * r["rank"]] for r in reps)
    record(14, ok, "dominance scan admits only 0 within height 6, l = 2, 3",
           ", ".join(f"l={r['rank']}: min nonzero theta pairing {r['min_theta_pairing_nonzero']}" for r in reps))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
