"""Weights, graded dimensions and highest weight vectors of V(Q)."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import VertexMode
from .fock import FockMonomial, FockVector, fock_space
from .lattice import lattice
from .linalg import nullspace, rational_inverse
from .scalar import ZERO, Q, qstr
from .vertex import PhaseConvention, engine


@dataclass(frozen=True)
class AffineWeight:
    """Eigenvalues of h_1..h_l, of d0, and of c."""

    finite: tuple
    d0: object
    level: int = 1

    def to_json(self) -> dict:
        return {"finite": [qstr(x) for x in self.finite], "d0": qstr(self.d0), "level": self.level}


def weight_of(l: int, m: FockMonomial) -> AffineWeight:
    lat = lattice(l)
    x = lat.shifted(m.exp)
    fin = []
    for i in range(l):
        unit = tuple(int(i == j) for j in range(l))
        fin.append(2 / lat.form_q(unit, unit) * lat.form_q(unit, x))
    return AffineWeight(tuple(fin), -fock_space(l).degree_of(m))


def is_lambda_l(w: AffineWeight) -> bool:
    """Finite signature (0, ..., 0, 1) at level one."""
    return w.level == 1 and list(w.finite) == [0] * (len(w.finite) - 1) + [1]


@dataclass
class CharacterTable:
    l: int
    depth: object
    top: object
    multiplicities: dict            # (finite, offset) -> count
    height: int
    complete: bool

    def slice_totals(self) -> dict:
        out: Counter = Counter()
        for (_, off), n in self.multiplicities.items():
            out[off] += n
        return dict(sorted(out.items()))

    def rows(self) -> list:
        """(finite eigenvalues, degree offset, multiplicity), offset ascending."""
        return sorted(((fin, off, n) for (fin, off), n in self.multiplicities.items()),
                      key=lambda r: (r[1], tuple(-x for x in r[0])))

    def to_json(self) -> dict:
        return {
            "rank": self.l,
            "depth": qstr(self.depth),
            "top_degree": qstr(self.top),
            "height": self.height,
            "complete": self.complete,
            "rows": [{"h": [qstr(x) for x in fin], "offset": qstr(off), "multiplicity": n}
                     for fin, off, n in self.rows()],
            "totals": {qstr(k): v for k, v in self.slice_totals().items()},
        }


def character_table(l: int, depth) -> CharacterTable:
    """Weight multiplicities down to ``depth`` below the top degree, with an automatic height."""
    fs = fock_space(l)
    top = fs.vacuum_degree
    depth = Q(depth)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    window = fs.enumerate_basis(top - depth, top)
    counts: Counter = Counter()
    for m in window:
        w = weight_of(l, m)
        counts[(w.finite, top + w.d0)] += 1
    return CharacterTable(l, depth, top, dict(counts), window.height, window.complete)


def q_character(l: int, depth) -> dict:
    """Graded dimension by offset below the top degree."""
    return character_table(l, depth).slice_totals()


# ---------------------------------------------------------------------------
# generating function oracle

def _theta_offsets(l: int, depth) -> Counter:
    """Counts of 1/2(a+lam, a+lam) - 1/2(lam, lam) <= depth over a in Q."""
    lat = lattice(l)
    lam = lat.lam
    base = lat.form_q(lam, lam) / 2
    ginv = rational_inverse(lat.int_gram)
    # |x_i| <= sqrt(2 (depth + base) ginv_ii) for x = a + lam
    bound = 2 * (Q(depth) + base)
    ranges = []
    for i in range(l):
        lim = bound * ginv[i][i]
        lo = -1
        while (lo + lam[i]) ** 2 <= lim:
            lo -= 1
        hi = 1
        while (hi + lam[i]) ** 2 <= lim:
            hi += 1
        ranges.append(range(lo, hi + 1))
    out: Counter = Counter()
    for a in itertools.product(*ranges):
        x = tuple(ai + li for ai, li in zip(a, lam))
        off = lat.form_q(x, x) / 2 - base
        if off <= depth:
            out[off] += 1
    return out


def generating_function(l: int, depth) -> dict:
    """Coefficients of prod (1-q^n)^-l (1-q^(n-1/2))^-l times the lattice theta series, up to ``depth``."""
    depth = Q(depth)
    steps = int(2 * depth)
    # oscillator part in powers of t = q^(1/2): each part size k (k >= 1) comes in l colours
    osc = [0] * (steps + 1)
    osc[0] = 1
    for k in range(1, steps + 1):
        for _ in range(l):
            for j in range(k, steps + 1):
                osc[j] += osc[j - k]
    out: Counter = Counter()
    for off, n in _theta_offsets(l, depth).items():
        for j, c in enumerate(osc):
            e = off + Q(j, 2)
            if e <= depth:
                out[e] += n * c
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# highest weight vectors

@dataclass
class HwvReport:
    l: int
    depth: object
    vectors: list
    weights: list
    complete: bool
    x1_on_vacuum: FockVector = field(default_factory=FockVector)
    pure_exponential_only: bool = False

    def to_json(self) -> dict:
        return {
            "rank": self.l,
            "depth": qstr(self.depth),
            "complete": self.complete,
            "pure_exponential_only": self.pure_exponential_only,
            "vectors": [v.to_json() for v in self.vectors],
            "weights": [w.to_json() for w in self.weights],
            "x1_theta_on_vacuum": self.x1_on_vacuum.to_json(),
        }


def raising_operators(l: int, depth, convention=PhaseConvention.FULL_EXPONENT) -> list:
    """(label, callable) pairs whose joint kernel defines highest weight vectors in the window."""
    eng = engine(l, PhaseConvention(convention))
    fs = eng.fock
    ops = []
    max_k2 = int(2 * Q(depth))
    for k2 in range(1, max_k2 + 1):
        for i in range(l):
            unit = tuple(int(i == j) for j in range(l))
            # even k2: alpha_i(k2/2); odd k2: p(alpha_i)(k2/2), i.e. alpha_i or beta
            ops.append((f"a{i + 1}({qstr(Q(k2, 2))})", lambda v, k2=k2, u=unit: fs.heisenberg(k2, u, v)))
    for i in range(l):
        unit = tuple(int(i == j) for j in range(l))
        x = VertexMode(eng, unit, 0)
        ops.append((x.label, x))
    theta = lattice(l).theta()
    x = VertexMode(eng, tuple(-2 * t for t in theta), 1)
    ops.append((x.label, x))
    return ops


def hwv_search(l: int, depth, height: int | None = None, pure_exponential_only: bool = False,
               convention=PhaseConvention.FULL_EXPONENT) -> HwvReport:
    fs = fock_space(l)
    top = fs.vacuum_degree
    depth = Q(depth)
    window = fs.enumerate_basis(top - depth, top, height)
    slices: dict = {}
    for m in window:
        if pure_exponential_only and m.osc:
            continue
        slices.setdefault(fs.degree_of(m), []).append(m)
    ops = raising_operators(l, depth, convention)
    vectors = []
    for g in sorted(slices, reverse=True):
        cols = slices[g]
        images = []
        rowkeys: dict = {}
        for m in cols:
            img = {}
            v = FockVector.monomial(m)
            for idx, (_, op) in enumerate(ops):
                for out, c in op(v):
                    key = (idx, out)
                    rowkeys.setdefault(key, len(rowkeys))
                    img[rowkeys[key]] = c
            images.append(img)
        rows = [[ZERO] * len(cols) for _ in range(len(rowkeys))]
        for j, img in enumerate(images):
            for r, c in img.items():
                rows[r][j] = c
        for sol in nullspace(rows, len(cols)):
            vectors.append(FockVector({m: c for m, c in zip(cols, sol) if c}))
    weights = []
    for v in vectors:
        ws = {weight_of(l, m) for m, _ in v}
        weights.append(ws.pop() if len(ws) == 1 else None)
    eng = engine(l, PhaseConvention(convention))
    theta = lattice(l).theta()
    x1 = eng.x_mode(tuple(-2 * t for t in theta), 1, fs.vacuum())
    return HwvReport(l, depth, vectors, weights, window.complete, x1, pure_exponential_only)


# ---------------------------------------------------------------------------
# dominance scan

def dominance_check(l: int, height: int) -> dict:
    """All a with |coefficients| <= height, (a, alpha_i) >= 0 for every i and (a, theta) <= 1/4."""
    lat = lattice(l)
    theta = lat.theta()
    units = [tuple(int(i == j) for j in range(l)) for i in range(l)]
    survivors = []
    min_nonzero = None
    witness = None
    for a in itertools.product(range(-height, height + 1), repeat=l):
        if not all(lat.form_q(a, u) >= 0 for u in units):
            continue
        t = lat.form_q(a, theta)
        if any(a) and (min_nonzero is None or t < min_nonzero):
            min_nonzero, witness = t, a
        if t <= Q(1, 4):
            survivors.append(a)
    return {"rank": l, "height": height, "solutions": survivors,
            "min_theta_pairing_nonzero": min_nonzero, "witness": witness}
