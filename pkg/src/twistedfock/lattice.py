"""Root lattice of type B_l in the normalization used for the A_{2l}^{(2)} construction.

Vectors are written over the basis (alpha_1, ..., alpha_l, beta).  The extra
direction beta carries the half-integer oscillator sector; its Gram row is
(beta, beta) = 3/2 and (beta, alpha_i) = (delta_{i,l} - delta_{i,l-1}) / 2.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .scalar import Q, qstr


class LatticeError(ValueError):
    pass


class RootClass(enum.Enum):
    LONG = "L"      # doubles of short roots, norm 2
    MIDDLE = "M"    # long roots of B_l, norm 1
    SHORT = "S"     # short roots of B_l, norm 1/2

    def __str__(self):
        return self.name.lower()


@dataclass(frozen=True)
class LatticeVector:
    """Exact coordinates over (alpha_1, ..., alpha_l, beta)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Q(c) for c in self.coeffs))

    @property
    def rank(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_q(cls, ks: Sequence[int]) -> "LatticeVector":
        """An element of Q given by its integer alpha-coefficients."""
        return cls(tuple(ks) + (0,))

    @classmethod
    def zero(cls, l: int) -> "LatticeVector":
        return cls((0,) * (l + 1))

    @classmethod
    def simple(cls, l: int, i: int) -> "LatticeVector":
        """alpha_i, 1-based."""
        ks = [0] * (l + 1)
        ks[i - 1] = 1
        return cls(ks)

    @classmethod
    def beta(cls, l: int) -> "LatticeVector":
        return cls((0,) * l + (1,))

    def _check(self, other):
        if not isinstance(other, LatticeVector):
            return NotImplemented
        if other.rank != self.rank:
            raise LatticeError(f"rank mismatch: {self.rank} vs {other.rank}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return LatticeVector(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        other = self._check(other)
        return LatticeVector(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return LatticeVector(tuple(-a for a in self.coeffs))

    def __mul__(self, k):
        return LatticeVector(tuple(a * Q(k) for a in self.coeffs))

    __rmul__ = __mul__

    def __bool__(self):
        return any(self.coeffs)

    @property
    def in_q(self) -> bool:
        """Integer alpha-coefficients and no beta component."""
        return self.coeffs[-1] == 0 and all(c.denominator == 1 for c in self.coeffs)

    @property
    def in_qm_beta(self) -> bool:
        """Integer coefficients on alpha_1..alpha_{l-1}, beta and none on alpha_l."""
        return self.coeffs[-2] == 0 and all(c.denominator == 1 for c in self.coeffs)

    def q_ints(self) -> tuple:
        if not self.in_q:
            raise LatticeError(f"{self} is not in the root lattice Q")
        return tuple(int(c) for c in self.coeffs[:-1])

    def to_strings(self) -> list[str]:
        return [qstr(c) for c in self.coeffs]

    def __str__(self):
        l = self.rank
        names = [f"a{i}" for i in range(1, l + 1)] + ["b"]
        parts = []
        for c, n in zip(self.coeffs, names):
            if not c:
                continue
            if c == 1:
                parts.append(n)
            elif c == -1:
                parts.append("-" + n)
            else:
                parts.append(f"{qstr(c)}{n}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


def sgn(k: int) -> int:
    # sgn(0) = +1
    return 1 if k >= 0 else -1


def fold(k: int) -> int:
    """sgn(k) * (k - 2*floor(k/2)), i.e. the signed parity of k."""
    return sgn(k) * (k - 2 * (k // 2))


class Lattice:
    """All lattice data for a fixed rank l >= 2."""

    def __init__(self, l: int):
        if not isinstance(l, int) or isinstance(l, bool) or l < 2:
            raise LatticeError(f"rank must be an integer >= 2, got {l!r}")
        self.l = l
        n = l + 1
        g = [[Q(0)] * n for _ in range(n)]
        for i in range(l):
            g[i][i] = Q(1, 2) if i == l - 1 else Q(1)
            if i + 1 < l:
                g[i][i + 1] = g[i + 1][i] = Q(-1, 2)
        g[l][l] = Q(3, 2)
        g[l][l - 1] = g[l - 1][l] = Q(1, 2)
        if l >= 2:
            g[l][l - 2] = g[l - 2][l] = Q(-1, 2)
        self.gram_matrix = tuple(tuple(row) for row in g)
        # Gram of the half-integer sector basis (alpha_1..alpha_{l-1}, beta)
        idx = list(range(l - 1)) + [l]
        self.half_gram = tuple(tuple(g[i][j] for j in idx) for i in idx)
        self.int_gram = tuple(tuple(g[i][j] for j in range(l)) for i in range(l))
        self.lam = tuple(Q(i, 2) for i in range(1, l + 1))

    def __repr__(self):
        return f"Lattice(l={self.l})"

    def __eq__(self, other):
        return isinstance(other, Lattice) and other.l == self.l

    def __hash__(self):
        return hash(("Lattice", self.l))

    # bilinear form ------------------------------------------------------
    def gram(self, v: LatticeVector, w: LatticeVector):
        if v.rank != self.l or w.rank != self.l:
            raise LatticeError(f"vectors of rank {v.rank}, {w.rank} used with rank {self.l}")
        g = self.gram_matrix
        total = Q(0)
        for i, a in enumerate(v.coeffs):
            if not a:
                continue
            row = g[i]
            for j, b in enumerate(w.coeffs):
                if b:
                    total += a * row[j] * b
        return total

    def form_q(self, a: Sequence, b: Sequence):
        """(a, b) for coefficient tuples over alpha_1..alpha_l (rationals allowed)."""
        g = self.int_gram
        total = Q(0)
        for i, x in enumerate(a):
            if not x:
                continue
            row = g[i]
            for j, y in enumerate(b):
                if y:
                    total += x * row[j] * y
        return total

    def form_half(self, a: Sequence, b: Sequence):
        """Form on the half-integer sector coordinates (alpha_1..alpha_{l-1}, beta)."""
        g = self.half_gram
        total = Q(0)
        for i, x in enumerate(a):
            if not x:
                continue
            row = g[i]
            for j, y in enumerate(b):
                if y:
                    total += x * row[j] * y
        return total

    def shifted(self, r: Sequence[int]) -> tuple:
        """Coordinates of r + lambda."""
        return tuple(k + c for k, c in zip(r, self.lam))

    # distinguished vectors ----------------------------------------------
    def simple(self, i: int) -> LatticeVector:
        return LatticeVector.simple(self.l, i)

    @cached_property
    def beta(self) -> LatticeVector:
        return LatticeVector.beta(self.l)

    def lambda_vector(self) -> LatticeVector:
        return LatticeVector(self.lam + (0,))

    def vec(self, ks: Sequence[int]) -> LatticeVector:
        return LatticeVector.from_q(ks)

    # roots ------------------------------------------------------------
    @cached_property
    def _roots(self) -> dict:
        short, middle = [], []
        for ks in itertools.product(range(-2, 3), repeat=self.l):
            if not any(ks):
                continue
            nrm = self.form_q(ks, ks)
            if nrm == Q(1, 2):
                short.append(ks)
            elif nrm == 1:
                middle.append(ks)
        long_ = [tuple(2 * k for k in ks) for ks in short]
        key = lambda ks: (tuple(-abs(k) for k in ks), ks)  # noqa: E731
        return {
            RootClass.SHORT: tuple(sorted(short, key=key)),
            RootClass.MIDDLE: tuple(sorted(middle, key=key)),
            RootClass.LONG: tuple(sorted(long_, key=key)),
        }

    def roots(self) -> dict:
        """RootClass -> frozenset of LatticeVector."""
        return {c: frozenset(LatticeVector.from_q(k) for k in ks) for c, ks in self._roots.items()}

    def root_tuples(self, cls: RootClass | None = None) -> tuple:
        """Roots as integer tuples, deterministic order (all classes if cls is None)."""
        if cls is not None:
            return self._roots[cls]
        return self._roots[RootClass.SHORT] + self._roots[RootClass.MIDDLE] + self._roots[RootClass.LONG]

    @cached_property
    def _class_of(self) -> dict:
        return {ks: c for c, group in self._roots.items() for ks in group}

    def classify(self, alpha) -> RootClass | None:
        ks = alpha.q_ints() if isinstance(alpha, LatticeVector) else tuple(alpha)
        return self._class_of.get(ks)

    def finite_roots(self) -> tuple:
        """The root system of B_l (short and long roots), as integer tuples."""
        return self._roots[RootClass.SHORT] + self._roots[RootClass.MIDDLE]

    # cocycle and folding maps ------------------------------------------
    def cocycle(self, a, b) -> int:
        """Bimultiplicative sign with eps(alpha_i, alpha_j) = -1 iff i = j + 1."""
        ka = a.q_ints() if isinstance(a, LatticeVector) else a
        kb = b.q_ints() if isinstance(b, LatticeVector) else b
        e = 0
        for j in range(self.l - 1):
            e += ka[j + 1] * kb[j]
        return -1 if e & 1 else 1

    def p_coords(self, ks: Sequence[int]) -> tuple:
        """p(alpha) as coordinates over the half-sector basis (alpha_1..alpha_{l-1}, beta)."""
        return tuple(fold(k) for k in ks)

    def p_map(self, alpha: LatticeVector) -> LatticeVector:
        ks = alpha.q_ints()
        folded = [fold(k) for k in ks]
        return LatticeVector(tuple(folded[:-1]) + (0, folded[-1]))

    def p0_map(self, alpha: LatticeVector) -> LatticeVector:
        ks = alpha.q_ints()
        return LatticeVector.from_q(tuple(fold(k) for k in ks))

    def p0_tuple(self, ks: Sequence[int]) -> tuple:
        return tuple(fold(k) for k in ks)

    def half_to_full(self, coords: Sequence) -> LatticeVector:
        """Half-sector coordinates (alpha_1..alpha_{l-1}, beta) as a LatticeVector."""
        return LatticeVector(tuple(coords[:-1]) + (0, coords[-1]))

    # affine data ---------------------------------------------------------
    def theta(self) -> tuple:
        """alpha_1 + ... + alpha_l."""
        return (1,) * self.l

    def cartan_matrix(self) -> list:
        """GCM over alpha_0..alpha_l with alpha_0 = delta - 2(alpha_1+...+alpha_l), (delta, Q) = 0."""
        l = self.l
        simple = [tuple(-2 for _ in range(l))] + [tuple(int(i == j) for j in range(l)) for i in range(l)]
        out = []
        for a in simple:
            na = self.form_q(a, a)
            out.append([int(2 * self.form_q(a, b) / na) for b in simple])
        return out


@lru_cache(maxsize=None)
def lattice(l: int) -> Lattice:
    return Lattice(l)


def check_cocycle_antisymmetry(lat: Lattice) -> list:
    """All (a, b) with a, b, a+b in the finite root system violating eps(a,b) = -eps(b,a)."""
    roots = lat.finite_roots()
    rootset = set(roots)
    bad = []
    for a in roots:
        for b in roots:
            s = tuple(x + y for x, y in zip(a, b))
            if s in rootset and lat.cocycle(a, b) != -lat.cocycle(b, a):
                bad.append((a, b))
    return bad


def _signed_run(coords: Sequence[int]):
    """If coords = +-(1,...,1 on a contiguous block, 0 elsewhere), return (sign, i, j) 1-based."""
    nz = [i for i, c in enumerate(coords) if c]
    if not nz:
        return None
    sign = coords[nz[0]]
    if sign not in (1, -1) or any(coords[i] != sign for i in nz):
        return None
    if nz != list(range(nz[0], nz[-1] + 1)):
        return None
    return sign, nz[0] + 1, nz[-1] + 1


def classify_p_image(lat: Lattice, ks: Sequence[int]) -> dict:
    """Check one root against the case table for p and p0.

    Returns a dict with ``ok`` (the relaxed reading, contiguous runs allowed to
    be a single term) and ``literal`` (the index ranges exactly as stated,
    1 <= i < j < l for the middle class).
    """
    l = lat.l
    cls = lat.classify(tuple(ks))
    p = lat.p_coords(ks)
    p0 = lat.p0_tuple(ks)
    info = {"root": tuple(ks), "class": cls, "p": p, "p0": p0}
    if cls is RootClass.LONG:
        ok = not any(p) and not any(p0)
        info.update(ok=ok, literal=ok)
    elif cls is RootClass.MIDDLE:
        run = _signed_run(p)
        ok = p == p0 and run is not None and run[2] < l
        info.update(ok=ok, literal=ok and run[1] < run[2])
    elif cls is RootClass.SHORT:
        run = _signed_run(p)
        ok = tuple(p0) == tuple(ks) and run is not None and run[2] == l
        info.update(ok=ok, literal=ok)
    else:
        raise LatticeError(f"{ks} is not a root")
    return info
