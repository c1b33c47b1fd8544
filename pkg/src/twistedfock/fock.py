"""The Fock space V(Q) = S(H^-) (x) C[Q] and its Heisenberg action.

Oscillators are stored as pairs ``(k2, dir)`` where ``k2`` is twice the mode
degree.  Even ``k2`` is the integer sector, whose direction ``dir`` indexes
alpha_1..alpha_l; odd ``k2`` is the half-integer sector, whose direction
indexes (alpha_1, ..., alpha_{l-1}, beta).  A monomial keeps its creation
modes as a sorted tuple (with repetition), so equal monomials compare equal.

The exponent ``exp`` of a monomial is the lattice point r; the state it
denotes is ``v (x) e^{r + lambda}``.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence

from .lattice import Lattice, LatticeVector, lattice
from .linalg import rational_inverse
from .scalar import ONE, ZERO, Cyclo8, I, Q, qstr


class FockError(ValueError):
    pass


class OscillatorMode(NamedTuple):
    """A single oscillator; ``k2`` is twice its degree."""

    k2: int
    dir: int

    @classmethod
    def of(cls, direction: int, degree) -> "OscillatorMode":
        d2 = Q(degree) * 2
        if d2.denominator != 1 or d2 == 0:
            raise FockError(f"mode degree must be a nonzero element of Z/2, got {degree}")
        return cls(int(d2), direction)

    @property
    def degree(self):
        return Q(self.k2, 2)

    @property
    def half(self) -> bool:
        return bool(self.k2 & 1)


class FockMonomial(NamedTuple):
    osc: tuple
    exp: tuple

    @classmethod
    def vacuum(cls, r: Sequence[int]) -> "FockMonomial":
        return cls((), tuple(r))

    def runs(self) -> tuple:
        """Run-length form ((dir, degree, multiplicity), ...)."""
        return tuple((m[1], Q(m[0], 2), len(list(g))) for m, g in itertools.groupby(self.osc))

    def oscillator_degree(self):
        return Q(sum(k for k, _ in self.osc), 2)


def osc_merge(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


class FockVector:
    """Sparse combination of FockMonomials with Q(zeta_8) coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for m, c in (terms.items() if isinstance(terms, dict) else terms):
                if not isinstance(c, Cyclo8):
                    c = Cyclo8.rational(c)
                if c:
                    clean[m] = clean[m] + c if m in clean else c
                    if not clean[m]:
                        del clean[m]
        self.terms = clean

    @classmethod
    def monomial(cls, m: FockMonomial, coef=ONE) -> "FockVector":
        return cls({m: coef})

    @classmethod
    def _raw(cls, terms: dict) -> "FockVector":
        out = cls.__new__(cls)
        out.terms = terms
        return out

    def __iter__(self) -> Iterator:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, FockVector):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __add__(self, other: "FockVector") -> "FockVector":
        out = dict(self.terms)
        for m, c in other.terms.items():
            if m in out:
                s = out[m] + c
                if s:
                    out[m] = s
                else:
                    del out[m]
            else:
                out[m] = c
        return FockVector._raw(out)

    def __neg__(self):
        return FockVector._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "FockVector":
        if not isinstance(s, Cyclo8):
            s = Cyclo8.rational(s)
        if not s:
            return FockVector()
        return FockVector._raw({m: c * s for m, c in self.terms.items()})

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def coefficient(self, m: FockMonomial) -> Cyclo8:
        return self.terms.get(m, ZERO)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: (t[0].exp, t[0].osc))

    def __repr__(self):
        if not self.terms:
            return "FockVector(0)"
        return "FockVector(" + ", ".join(f"{c!r}*{m}" for m, c in self.sorted_terms()[:6]) + (
            ", ..." if len(self.terms) > 6 else "") + ")"

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for m, c in self.sorted_terms():
            terms.append({
                "osc": [[d, qstr(Q(k, 2))] for k, d in m.osc],
                "exp": [str(k) for k in m.exp],
                "coef": c.to_strings(),
            })
        return {"terms": terms}

    @classmethod
    def from_json(cls, data) -> "FockVector":
        if isinstance(data, str):
            data = json.loads(data)
        terms = {}
        for t in data["terms"]:
            osc = tuple(sorted(OscillatorMode.of(int(d), Q(s)) for d, s in t["osc"]))
            exp = tuple(int(k) for k in t["exp"])
            m = FockMonomial(tuple(tuple(o) for o in osc), exp)
            terms[m] = Cyclo8.from_strings(t["coef"])
        return cls(terms)


# ---------------------------------------------------------------------------
# rational polynomial helpers on oscillator tuples (shared with the vertex kernel)

def poly_mul(p: dict, q: dict) -> dict:
    out = {}
    for a, x in p.items():
        for b, y in q.items():
            key = osc_merge(a, b)
            v = out.get(key)
            v = x * y if v is None else v + x * y
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def poly_add_into(acc: dict, p: dict, scale=1) -> None:
    for a, x in p.items():
        v = acc.get(a)
        v = x * scale if v is None else v + x * scale
        if v:
            acc[a] = v
        else:
            acc.pop(a, None)


# ---------------------------------------------------------------------------

@dataclass
class BasisWindow:
    """Result of a basis enumeration: monomials plus a completeness certificate."""

    monomials: list
    lo: object
    hi: object
    height: int
    complete: bool

    def __iter__(self):
        return iter(self.monomials)

    def __len__(self):
        return len(self.monomials)


class FockSpace:
    """Heisenberg action, grading and enumeration on V(Q) for a fixed rank."""

    def __init__(self, lat: Lattice | int):
        self.lat = lattice(lat) if isinstance(lat, int) else lat
        self.l = self.lat.l
        self._dir_gram_int = self.lat.int_gram
        self._dir_gram_half = self.lat.half_gram
        self._top: dict = {}

    # vectors ------------------------------------------------------------
    def vacuum(self, r: Sequence[int] | None = None) -> FockVector:
        r = tuple(r) if r is not None else (0,) * self.l
        if len(r) != self.l:
            raise FockError(f"exponent {r} has wrong length for rank {self.l}")
        return FockVector.monomial(FockMonomial((), r))

    def monomial(self, modes: Iterable, r: Sequence[int] | None = None) -> FockMonomial:
        """Build a monomial from (direction, degree) pairs."""
        osc = tuple(sorted(tuple(OscillatorMode.of(d, deg)) for d, deg in modes))
        for k, d in osc:
            if k >= 0:
                raise FockError("monomials contain creation modes only")
            if not 0 <= d < self.l:
                raise FockError(f"direction {d} out of range for rank {self.l}")
        return FockMonomial(osc, tuple(r) if r is not None else (0,) * self.l)

    def _check_mode(self, mode) -> tuple:
        if not isinstance(mode, tuple):
            raise FockError(f"bad mode {mode!r}")
        k2, d = mode
        if not 0 <= d < self.l:
            raise FockError(f"direction {d} out of range for rank {self.l}")
        return int(k2), int(d)

    # Heisenberg action ----------------------------------------------------
    def create(self, mode, v: FockVector) -> FockVector:
        k2, d = self._check_mode(mode)
        if k2 >= 0:
            raise FockError("create needs a mode of negative degree")
        out = {}
        for m, c in v:
            key = FockMonomial(osc_merge(m.osc, ((k2, d),)), m.exp)
            out[key] = c
        return FockVector._raw(out)

    def contraction(self, k2: int, a: Sequence, d: int):
        """[a(t), h_d(-t)] for t = k2/2 > 0, with a given in sector coordinates."""
        g = self._dir_gram_half if k2 & 1 else self._dir_gram_int
        return Q(k2, 2) * sum((x * g[i][d] for i, x in enumerate(a) if x), Q(0))

    def annihilate(self, mode, v: FockVector) -> FockVector:
        """Positive mode of a basis direction, acting as a derivation."""
        k2, d = self._check_mode(mode)
        if k2 <= 0:
            raise FockError("annihilate needs a mode of positive degree")
        coords = [0] * self.l
        coords[d] = 1
        return self.annihilate_vector(k2, coords, v)

    def annihilate_vector(self, k2: int, a: Sequence, v: FockVector) -> FockVector:
        """a(k2/2) for an arbitrary sector vector a, k2 > 0."""
        if k2 <= 0:
            raise FockError("annihilate needs a mode of positive degree")
        consts = [self.contraction(k2, a, d) for d in range(self.l)]
        acc = {}
        for m, c in v:
            osc = m.osc
            seen = set()
            for i, (k, d) in enumerate(osc):
                if k != -k2 or (k, d) in seen or not consts[d]:
                    continue
                seen.add((k, d))
                mult = osc.count((k, d))
                rest = osc[:i] + osc[i + 1:]
                key = FockMonomial(rest, m.exp)
                val = c * (consts[d] * mult)
                if key in acc:
                    s = acc[key] + val
                    if s:
                        acc[key] = s
                    else:
                        del acc[key]
                else:
                    acc[key] = val
        return FockVector._raw(acc)

    def create_vector(self, k2: int, a: Sequence, v: FockVector) -> FockVector:
        """a(k2/2) for k2 < 0 and a given in sector coordinates."""
        out = FockVector()
        for d, x in enumerate(a):
            if x:
                out = out + self.create((k2, d), v).scale(x)
        return out

    def heisenberg(self, k2: int, a: Sequence, v: FockVector) -> FockVector:
        """Any Heisenberg element a(k2/2); for k2 = 0, a is in Q-coordinates."""
        if k2 < 0:
            return self.create_vector(k2, a, v)
        if k2 > 0:
            return self.annihilate_vector(k2, a, v)
        return self.zero_mode(a, v)

    def zero_mode(self, b, v: FockVector) -> FockVector:
        if isinstance(b, LatticeVector):
            if b.coeffs[-1]:
                raise FockError("zero modes exist only for b in span{alpha_1..alpha_l}")
            b = b.coeffs[:-1]
        out = {}
        for m, c in v:
            val = self.lat.form_q(b, self.lat.shifted(m.exp))
            if val:
                out[m] = c * val
        return FockVector._raw(out)

    def central(self, v: FockVector) -> FockVector:
        return v

    # grading ------------------------------------------------------------
    def top_degree(self, r: Sequence[int]):
        r = tuple(r)
        got = self._top.get(r)
        if got is None:
            x = self.lat.shifted(r)
            got = self._top[r] = -self.lat.form_q(x, x) / 2
        return got

    def degree_of(self, m: FockMonomial):
        return m.oscillator_degree() + self.top_degree(m.exp)

    def vector_degree(self, v: FockVector):
        """Degree of a homogeneous vector (None for zero, error if mixed)."""
        degs = {self.degree_of(m) for m, _ in v}
        if len(degs) > 1:
            raise FockError("vector is not homogeneous")
        return degs.pop() if degs else None

    def d0_apply(self, v: FockVector) -> FockVector:
        out = {}
        for m, c in v:
            g = self.degree_of(m)
            if g:
                out[m] = c * (-g)
        return FockVector._raw(out)

    @property
    def vacuum_degree(self):
        return self.top_degree((0,) * self.l)

    # enumeration --------------------------------------------------------
    def height_certificate(self, lo, height: int) -> bool:
        """True if every r with some |r_i| > height has top degree < lo.

        Uses (x, x) >= x_i^2 / (G^-1)_ii for x = r + lambda.
        """
        ginv = rational_inverse(self.lat.int_gram)
        for i in range(self.l):
            lam_i = Q(i + 1, 2)
            min_abs = height + 1 - lam_i
            if min_abs <= 0:
                return False
            gii = ginv[i][i]
            if not (min_abs * min_abs / gii / 2 > -Q(lo)):
                return False
        return True

    def minimal_height(self, lo) -> int:
        h = 0
        while not self.height_certificate(lo, h):
            h += 1
        return h

    def exponents(self, lo, height: int) -> list:
        """Lattice points r in the height box whose top degree is >= lo."""
        out = []
        for r in itertools.product(range(-height, height + 1), repeat=self.l):
            if self.top_degree(r) >= lo:
                out.append(r)
        return out

    def enumerate_basis(self, lo, hi, height: int | None = None) -> BasisWindow:
        """All monomials with degree in [lo, hi], deterministically ordered."""
        lo, hi = Q(lo), Q(hi)
        if lo > hi:
            return BasisWindow([], lo, hi, height or 0, True)
        if height is None:
            height = self.minimal_height(lo)
        complete = self.height_certificate(lo, height)
        out = []
        for r in self.exponents(lo, height):
            top = self.top_degree(r)
            # oscillator degree must lie in [lo - top, hi - top], and be <= 0
            kmin = -2 * (hi - top)
            kmax = -2 * (lo - top)
            k_lo = max(0, int(-((-kmin) // 1)))  # ceil
            k_hi = int(kmax // 1)
            for k in range(k_lo, k_hi + 1):
                for osc in oscillator_multisets(self.l, k):
                    out.append(FockMonomial(osc, r))
        out.sort(key=lambda m: (-self.degree_of(m), m.exp, m.osc))
        return BasisWindow(out, lo, hi, height, complete)

    def slice_basis(self, degree, height: int | None = None) -> list:
        return self.enumerate_basis(degree, degree, height).monomials

    # random test data ---------------------------------------------------
    COEF_POOL = (ONE, -ONE, Cyclo8.rational(Q(1, 2)), Cyclo8.rational(Q(-1, 2)), I)

    def random_vector(self, basis: Sequence[FockMonomial], rng: random.Random,
                      size: int = 3, homogeneous: bool = True) -> FockVector:
        if homogeneous:
            m0 = rng.choice(basis)
            g = self.degree_of(m0)
            pool = [m for m in basis if self.degree_of(m) == g]
        else:
            pool = list(basis)
        picks = rng.sample(pool, min(size, len(pool)))
        return FockVector({m: rng.choice(self.COEF_POOL) for m in picks})


@lru_cache(maxsize=None)
def oscillator_multisets(l: int, k: int, max_key: tuple | None = None) -> tuple:
    """All sorted oscillator tuples with sum of |k2| equal to k.

    Modes are emitted in ascending (k2, dir) order; ``max_key`` bounds the
    first (smallest) key from below so the recursion yields each multiset once.
    """
    if k == 0:
        return ((),)
    out = []
    for t in range(k, 0, -1):
        for d in range(l):
            key = (-t, d)
            if max_key is not None and key < max_key:
                continue
            for rest in oscillator_multisets(l, k - t, key):
                out.append((key,) + rest)
    return tuple(out)


def fock_space(l: int) -> FockSpace:
    return _fock_space(l)


@lru_cache(maxsize=None)
def _fock_space(l: int) -> FockSpace:
    return FockSpace(lattice(l))
