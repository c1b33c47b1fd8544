"""Verification suites shared by the CLI and the acceptance tests.

Every suite returns a plain dict with at least ``suite``, ``ok`` and
``checks``; failures carry a serialized witness vector.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor

from .algebra import (
    BracketChecker,
    Heisenberg,
    VertexMode,
    bracket_cases,
    check_cartan_relations,
    check_heisenberg_covariance,
    commutator,
    constants_table,
    generator_dictionary,
    jacobi_sample,
    random_triples,
)
from .fock import FockVector, fock_space
from .lattice import check_cocycle_antisymmetry, classify_p_image, lattice
from .scalar import Q, qstr
from .vertex import PhaseConvention, contraction_e, contraction_f, engine

SUITES = ("heisenberg", "grading", "contraction", "brackets", "cartan", "jacobi")


def window(l: int, depth):
    fs = fock_space(l)
    top = fs.vacuum_degree
    return fs.enumerate_basis(top - Q(depth), top)


def _unit(l, i):
    return tuple(int(i == j) for j in range(l))


# ---------------------------------------------------------------------------

def suite_lattice(l: int) -> dict:
    lat = lattice(l)
    anti = check_cocycle_antisymmetry(lat)
    p_rows = [classify_p_image(lat, r) for r in lat.finite_roots()]
    return {
        "suite": "lattice",
        "rank": l,
        "checks": len(lat.finite_roots()) ** 2 + len(p_rows),
        "antisymmetry_failures": [list(map(list, x)) for x in anti],
        "p_map_failures": [row for row in p_rows if not row["ok"]],
        "p_map_literal_range_misses": sum(1 for row in p_rows if not row["literal"]),
        "ok": not anti and all(row["ok"] for row in p_rows),
    }


def suite_heisenberg(l: int, seed: int = 0, samples: int = 100, pairs: int = 12, max_k2: int = 6) -> dict:
    """[x(m), y(n)] = delta_{m+n,0} m (x, y) on random monomials, |m|, |n| <= max_k2 / 2."""
    fs = fock_space(l)
    lat = fs.lat
    rng = random.Random(seed)
    pool = window(l, 2).monomials
    failures = []
    checks = 0
    for _ in range(samples):
        v = FockVector.monomial(rng.choice(pool))
        for _ in range(pairs):
            k1 = rng.randint(-max_k2, max_k2)
            # same sector for the partner so the pairing is defined
            k2 = rng.choice([k for k in range(-max_k2, max_k2 + 1) if (k - k1) % 2 == 0])
            x = [rng.choice((-1, 0, 1, 2)) for _ in range(l)]
            y = [rng.choice((-1, 0, 1, 2)) for _ in range(l)]
            lhs = commutator(Heisenberg(fs, k1, x), Heisenberg(fs, k2, y), v)
            if k1 + k2 == 0 and k1:
                form = lat.form_half(x, y) if k1 & 1 else lat.form_q(x, y)
                rhs = v.scale(Q(k1, 2) * form)
            else:
                rhs = FockVector()
            checks += 1
            if lhs != rhs:
                failures.append({"modes": [k1, k2], "x": x, "y": y, "vector": v.to_json()})
    return {"suite": "heisenberg", "rank": l, "seed": seed, "checks": checks,
            "failures": failures[:5], "ok": not failures}


def suite_grading(l: int, depth=3, mode_range: int = 2) -> dict:
    """[d0, a(m)] = -m a(m), deg X_d(alpha) v = deg v + d, and long-root parity, on the window."""
    fs = fock_space(l)
    eng = engine(l)
    lat = eng.lat
    basis = window(l, depth).monomials
    failures = []
    checks = 0
    for mono in basis:
        v = FockVector.monomial(mono)
        g = fs.degree_of(mono)
        for k2 in range(-2 * mode_range, 2 * mode_range + 1):
            for i in range(l):
                h = Heisenberg(fs, k2, _unit(l, i))
                lhs = fs.d0_apply(h(v)) - h(fs.d0_apply(v))
                checks += 1
                if lhs != h(v).scale(-Q(k2, 2)):
                    failures.append({"check": "d0", "k2": k2, "dir": i, "vector": v.to_json()})
        for alpha in lat.root_tuples():
            for m in range(-2 * mode_range, 2 * mode_range + 1):
                d = Q(m, 2)
                out = eng.x_mode(alpha, d, v)
                checks += 1
                if any(fs.degree_of(o) != g + d for o, _ in out):
                    failures.append({"check": "degree", "alpha": list(alpha), "d": qstr(d), "vector": v.to_json()})
    parity = suite_parity(l, basis, mode_range)
    return {"suite": "grading", "rank": l, "depth": qstr(Q(depth)), "checks": checks + parity["checks"],
            "failures": failures[:5], "parity": parity, "ok": not failures and parity["ok"]}


def suite_parity(l: int, basis, mode_range: int = 2) -> dict:
    """Integer modes of long-root vertex operators vanish on every basis vector."""
    eng = engine(l)
    failures = []
    checks = 0
    for alpha in eng.lat.root_tuples():
        if eng.lat.classify(alpha).name != "LONG":
            continue
        for d in range(-mode_range, mode_range + 1):
            for mono in basis:
                checks += 1
                if eng.x_mode(alpha, d, FockVector.monomial(mono)):
                    failures.append({"alpha": list(alpha), "d": d, "vector": FockVector.monomial(mono).to_json()})
    return {"suite": "parity", "checks": checks, "failures": failures[:5], "ok": not failures}


def suite_contraction(l: int, seed: int = 0, order: int = 6, depth=2) -> dict:
    """Both contraction identities for every root pair, to order ``order`` in w/z."""
    eng = engine(l)
    fs = eng.fock
    rng = random.Random(seed)
    basis = window(l, depth).monomials
    failures = []
    checks = 0
    roots = eng.lat.root_tuples()
    for a in roots:
        for b in roots:
            v = fs.random_vector(basis, rng, 2)
            # E identity in powers of w^2/z^2, F identity in powers of w/z
            le, re = contraction_e(eng, a, b, v, order // 2 + order % 2)
            lf, rf = contraction_f(eng, a, b, v, order)
            checks += 2
            if le != re:
                failures.append({"identity": "E", "a": list(a), "b": list(b), "vector": v.to_json()})
            if lf != rf:
                failures.append({"identity": "F", "a": list(a), "b": list(b), "vector": v.to_json()})
    return {"suite": "contraction", "rank": l, "order": order, "seed": seed, "checks": checks,
            "failures": failures[:5], "ok": not failures}


def suite_covariance(l: int, depth=Q(3, 2), n_range: int = 2, d_range: int = 2) -> dict:
    """[a(n), X_d(alpha)] = (a, alpha) X_{n+d}(alpha) for simple a, every root, |n|, |d| <= 2 (d in Z/2)."""
    basis = window(l, depth).monomials
    lat = lattice(l)
    failures = []
    checks = 0
    for i in range(l):
        for alpha in lat.root_tuples():
            for n in range(-n_range, n_range + 1):
                for m in range(-2 * d_range, 2 * d_range + 1):
                    res = check_heisenberg_covariance(l, i, alpha, n, m, basis)
                    checks += 1
                    if not res["ok"]:
                        failures.append({"a": i + 1, "alpha": list(alpha), "n": n, "m": m,
                                         "witness": res["witness"]})
    return {"suite": "covariance", "rank": l, "checks": checks, "failures": failures[:5], "ok": not failures}


def _bracket_chunk(args):
    l, convention, depth, mode_range, lo, hi = args
    checker = BracketChecker(l, convention)
    cases = bracket_cases(checker.lat, mode_range)[lo:hi]
    return checker.run(cases, window(l, depth).monomials)


def suite_brackets(l: int, depth=3, mode_range: int = 2, convention=PhaseConvention.FULL_EXPONENT,
                   jobs: int = 1, strict_paper: bool = False) -> dict:
    convention = PhaseConvention(convention)
    n = len(bracket_cases(lattice(l), mode_range))
    if jobs > 1:
        step = -(-n // (4 * jobs))
        chunks = [(l, convention.value, depth, mode_range, lo, min(n, lo + step)) for lo in range(0, n, step)]
        with ProcessPoolExecutor(jobs) as pool:
            reports = [r for part in pool.map(_bracket_chunk, chunks) for r in part]
    else:
        reports = _bracket_chunk((l, convention.value, depth, mode_range, 0, n))
    closure = [r for r in reports if not r.consistent]
    table = constants_table(reports)
    mismatches = [row for row in table if row["fitted"] and not row["match"]]
    ok = not closure and (not strict_paper or not mismatches)
    return {
        "suite": "brackets",
        "rank": l,
        "depth": qstr(Q(depth)),
        "modes": mode_range,
        "convention": str(convention),
        "checks": len(reports),
        "closure_failures": [r.to_json() for r in closure],
        "constants": table,
        "stated_mismatches": len(mismatches),
        "reports": [r.to_json() for r in reports],
        "ok": ok,
    }


def suite_cartan(l: int, depth=1, convention=PhaseConvention.FULL_EXPONENT) -> dict:
    dic = generator_dictionary(l, convention)
    res = check_cartan_relations(dic, window(l, depth).monomials)
    failed = [r for r in res["relations"] if not r["holds"]]
    return {"suite": "cartan", "rank": l, "depth": qstr(Q(depth)), "convention": str(PhaseConvention(convention)),
            "gcm": res["gcm"], "generators": dic.to_labels(), "checks": len(res["relations"]),
            "failures": failed, "relations": res["relations"], "ok": res["ok"]}


def suite_jacobi(l: int, seed: int = 0, count: int = 50, depth=1, vectors: int = 6,
                 convention=PhaseConvention.FULL_EXPONENT) -> dict:
    rng = random.Random(seed)
    basis = window(l, depth).monomials
    sample = sorted(rng.sample(range(len(basis)), min(vectors, len(basis))))
    triples = random_triples(l, count, seed, convention)
    res = jacobi_sample(triples, [basis[i] for i in sample])
    return {"suite": "jacobi", "rank": l, "seed": seed, "checks": count * len(sample),
            "failures": res["failures"], "ok": res["ok"]}


def run_suite(name: str, l: int, *, depth=3, mode_range: int = 2, convention=PhaseConvention.FULL_EXPONENT,
              seed: int = 0, jobs: int = 1, strict_paper: bool = False) -> dict:
    if name == "heisenberg":
        return suite_heisenberg(l, seed)
    if name == "grading":
        return suite_grading(l, depth, mode_range)
    if name == "contraction":
        return suite_contraction(l, seed)
    if name == "brackets":
        out = suite_brackets(l, depth, mode_range, convention, jobs, strict_paper)
        # covariance rides along on the same window, capped at depth 3/2
        out["covariance"] = suite_covariance(l, min(Q(depth), Q(3, 2)))
        out["ok"] = out["ok"] and out["covariance"]["ok"]
        return out
    if name == "cartan":
        return suite_cartan(l, min(Q(depth), 1), convention)
    if name == "jacobi":
        return suite_jacobi(l, seed, convention=convention)
    raise ValueError(f"unknown suite {name!r}")
