"""Vertex operators E^{+-}, F^{+-}, Y, X and exact mode extraction.

Modes are indexed by half-integers: X_d(alpha) is the coefficient of
z^{-2d} in X(alpha, z).  On a state v (x) e^{r+lambda},

    X(alpha, z) v = phase * case * eps(alpha, r) * z^{(a,a) + 2(a, r+lambda)}
                    * Y(alpha, z) v (x) e^{r + alpha + lambda},

so extraction reduces to a z-coefficient of Y(alpha, z) on the oscillator
part.  The annihilation half E^+F^+ is a product of exponentials of
constant-coefficient derivations, i.e. a translation of the oscillator
variables, and the creation half E^-F^- has coefficients given by the usual
power-sum recursion.  Both are exact and finite on any given vector.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .fock import FockMonomial, FockSpace, FockVector, fock_space, osc_merge, poly_add_into, poly_mul
from .lattice import Lattice, LatticeVector, RootClass, lattice
from .scalar import ONE, Cyclo8, I, Q


class PhaseConvention(enum.Enum):
    """How (-1)^{mu} acts on v (x) e^{r+lambda}: pair mu with r+lambda or with r."""

    FULL_EXPONENT = "full-exponent"
    LATTICE_ONLY = "lattice-only"

    def __str__(self):
        return self.value


def as_q_tuple(alpha) -> tuple:
    if isinstance(alpha, LatticeVector):
        return alpha.q_ints()
    return tuple(int(k) for k in alpha)


# ---------------------------------------------------------------------------
# formal series plumbing

def binomial_series(exponent, order: int) -> list:
    """Coefficients of (1 - x)^exponent up to x^order, exact."""
    e = Q(exponent)
    out = [Q(1)]
    c = Q(1)
    for k in range(1, order + 1):
        c = c * (e - (k - 1)) / k * -1
        out.append(c)
    return out


def series_mul(a: list, b: list, order: int) -> list:
    out = [Q(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if not x:
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            out[i + j] += x * y
    return out


def laurent_add(acc: dict, key, v: FockVector) -> None:
    if not v:
        return
    cur = acc.get(key)
    s = v if cur is None else cur + v
    if s:
        acc[key] = s
    else:
        acc.pop(key, None)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexSymbol:
    alpha: tuple
    cls: RootClass | None

    @classmethod
    def of(cls, lat: Lattice, alpha) -> "VertexSymbol":
        ks = as_q_tuple(alpha)
        return cls(ks, lat.classify(ks))


class VertexEngine:
    """Exact vertex operator calculus for one rank and one phase convention."""

    def __init__(self, lat: Lattice | int, convention: PhaseConvention = PhaseConvention.FULL_EXPONENT):
        self.lat = lattice(lat) if isinstance(lat, int) else lat
        self.l = self.lat.l
        self.fock: FockSpace = fock_space(self.l)
        self.convention = PhaseConvention(convention)
        self._creation: dict = {}
        self._shift: dict = {}
        self._y: dict = {}
        self._pref: dict = {}
        self._shift_consts: dict = {}

    # per-alpha constants --------------------------------------------------
    def sector_vectors(self, ks: tuple) -> tuple:
        """(alpha in Q-coords, p(alpha) in half-sector coords) used by Y(alpha, z)."""
        if any(ks) and self.lat.classify(ks) is RootClass.LONG:
            return ks, (0,) * self.l
        return ks, self.lat.p_coords(ks)

    def _consts(self, ks: tuple) -> tuple:
        got = self._shift_consts.get(ks)
        if got is None:
            a, pa = self.sector_vectors(ks)
            lat = self.lat
            ci = tuple(-sum((x * lat.int_gram[i][d] for i, x in enumerate(a) if x), Q(0)) for d in range(self.l))
            ch = tuple(-sum((x * lat.half_gram[i][d] for i, x in enumerate(pa) if x), Q(0)) for d in range(self.l))
            got = (ci, ch)
            self._shift_consts[ks] = got
        return got

    def case_factor(self, ks: tuple) -> Cyclo8:
        """sqrt(-1) for short roots, 1 otherwise (keyed on the class of alpha)."""
        return I if self.lat.classify(ks) is RootClass.SHORT else ONE

    def phase(self, mu: tuple, r: tuple) -> Cyclo8:
        """(-1)^{-(mu, s)} for the state with lattice part r."""
        return Cyclo8.zeta_power(self.phase_exp(mu, r))

    def phase_exp(self, mu: tuple, r: tuple) -> int:
        """Exponent k with (-1)^{-(mu, s)} = zeta^k."""
        s = self.lat.shifted(r) if self.convention is PhaseConvention.FULL_EXPONENT else r
        q = -4 * self.lat.form_q(mu, s)
        if q.denominator != 1:
            raise ValueError(f"phase (-1)^{-q / 4} is not an 8th root of unity")
        return int(q) % 8

    def prefactor_exp(self, ks: tuple, r: tuple) -> int:
        """k with phase(out) * case * eps(alpha, r) = zeta^k on v (x) e^{r+lambda}."""
        key = (ks, r)
        got = self._pref.get(key)
        if got is None:
            out = tuple(a + b for a, b in zip(ks, r))
            got = self.phase_exp(self.lat.p0_tuple(ks), out)
            if self.lat.classify(ks) is RootClass.SHORT:
                got += 2
            if self.lat.cocycle(ks, r) < 0:
                got += 4
            got %= 8
            self._pref[key] = got
        return got

    def prefactor(self, ks: tuple, r: tuple) -> Cyclo8:
        """Scalar multiplying Y on v (x) e^{r+lambda}: phase(out) * case * eps(alpha, r)."""
        return Cyclo8.zeta_power(self.prefactor_exp(ks, r))

    def z_offset(self, ks: tuple, r: tuple):
        """(alpha, alpha) + 2 (alpha, r + lambda): the z-power from z^{(a,a)} e^a z^{2a}."""
        return self.lat.form_q(ks, ks) + 2 * self.lat.form_q(ks, self.lat.shifted(r))

    # creation half --------------------------------------------------------
    def creation_coeff(self, ks: tuple, k: int) -> dict:
        """Coefficient of z^k in E^-(alpha, z) F^-(p(alpha), z) as a polynomial in creation modes."""
        table = self._creation.get(ks)
        if table is None:
            table = [{(): Q(1)}]
            self._creation[ks] = table
        if k < 0:
            return {}
        if k < len(table):
            return table[k]
        a, pa = self.sector_vectors(ks)
        # generator terms: coefficient j of the exponent's z-derivative times z
        while len(table) <= k:
            n = len(table)
            acc = {}
            for j in range(1, n + 1):
                gen = self._gen_poly(a, pa, j)
                if not gen:
                    continue
                poly_add_into(acc, poly_mul(gen, table[n - j]), 2)
            inv = Q(1, n)
            table.append({m: c * inv for m, c in acc.items()})
        return table[k]

    @staticmethod
    @lru_cache(maxsize=None)
    def _gen_poly(a: tuple, pa: tuple, j: int) -> dict:
        # j even: alpha(-j/2); j odd: p(alpha)(-j/2); as linear polynomials
        vec = pa if j & 1 else a
        return {((-j, d),): Q(x) for d, x in enumerate(vec) if x}

    # annihilation half ----------------------------------------------------
    def shifted(self, ks: tuple, osc: tuple) -> dict:
        """E^+ F^+ acting on an oscillator monomial: z-exponent -> polynomial."""
        key = (ks, osc)
        got = self._shift.get(key)
        if got is not None:
            return got
        if not osc:
            got = {0: {(): Q(1)}}
        else:
            head, rest = osc[0], osc[1:]
            tail = self.shifted(ks, rest)
            k2, d = head
            ci, ch = self._consts(ks)
            c = ch[d] if k2 & 1 else ci[d]
            got = {}
            for j, poly in tail.items():
                # x * poly
                acc = got.setdefault(j, {})
                for m, v in poly.items():
                    km = osc_merge((head,), m)
                    acc[km] = acc.get(km, 0) + v
                if c:
                    acc2 = got.setdefault(j + k2, {})
                    for m, v in poly.items():
                        acc2[m] = acc2.get(m, 0) + v * c
            got = {j: {m: v for m, v in p.items() if v} for j, p in got.items()}
            got = {j: p for j, p in got.items() if p}
        self._shift[key] = got
        return got

    def y_coeff(self, ks: tuple, k: int, osc: tuple) -> dict:
        """Coefficient of z^k in Y(alpha, z) (without the sqrt(-1) case factor) on an oscillator monomial."""
        key = (ks, k, osc)
        got = self._y.get(key)
        if got is not None:
            return got
        acc = {}
        for j, poly in self.shifted(ks, osc).items():
            if k - j < 0:
                continue
            cre = self.creation_coeff(ks, k - j)
            if cre:
                poly_add_into(acc, poly_mul(cre, poly))
        self._y[key] = acc
        return acc

    def y_apply(self, ks: tuple, k: int, poly: dict) -> dict:
        """Coefficient of z^k in Y(alpha, z) applied to a rational oscillator polynomial.

        The translation E^+F^+ is applied term by term and collected per
        z-power first, so each creation coefficient is multiplied in once.
        """
        by_power: dict = {}
        for o, c in poly.items():
            for j, sp in self.shifted(ks, o).items():
                if j > k:
                    continue
                acc = by_power.get(j)
                if acc is None:
                    acc = by_power[j] = {}
                for m, x in sp.items():
                    v = acc.get(m)
                    v = x * c if v is None else v + x * c
                    if v:
                        acc[m] = v
                    else:
                        del acc[m]
        out: dict = {}
        for j, sj in by_power.items():
            if sj:
                cre = self.creation_coeff(ks, k - j)
                if cre:
                    poly_add_into(out, poly_mul(cre, sj))
        return out

    def y_compose(self, outer: tuple, k_outer: int, inner: tuple, k_inner: int, osc: tuple) -> dict:
        """Y_{k_outer}(outer) Y_{k_inner}(inner) on an oscillator monomial (rational, no prefactors)."""
        inner_poly = self.y_coeff(inner, k_inner, osc)
        if not inner_poly:
            return {}
        return self.y_apply(outer, k_outer, inner_poly)

    def y_index(self, ks: tuple, d, r: tuple):
        """The z-power k of Y(alpha, z) feeding X_d(alpha) on exponent r, or None."""
        target = -2 * Q(d) - self.z_offset(ks, r)
        if target.denominator != 1:
            return None
        return int(target)

    def clear_caches(self) -> None:
        for c in (self._creation, self._shift, self._y, self._pref):
            c.clear()

    # modes ------------------------------------------------------------------
    def x_mode_monomial(self, ks: tuple, d, m: FockMonomial) -> dict:
        """X_d(alpha) on a single monomial (coefficient 1): monomial -> Cyclo8."""
        target = -2 * Q(d) - self.z_offset(ks, m.exp)
        if target.denominator != 1:
            return {}
        poly = self.y_coeff(ks, int(target), m.osc)
        if not poly:
            return {}
        pref = self.prefactor(ks, m.exp)
        out_exp = tuple(a + b for a, b in zip(ks, m.exp))
        return {FockMonomial(o, out_exp): pref * c for o, c in poly.items()}

    def x_mode(self, alpha, d, v: FockVector) -> FockVector:
        ks = as_q_tuple(alpha)
        acc: dict = {}
        for m, c in v:
            for key, val in self.x_mode_monomial(ks, d, m).items():
                s = val * c
                cur = acc.get(key)
                s = s if cur is None else cur + s
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return FockVector._raw(acc)

    def current_mode(self, alpha, d, v: FockVector) -> FockVector:
        """J_alpha(d): alpha(d) for integer d, p(alpha)(d) for half-odd d."""
        ks = as_q_tuple(alpha)
        k2 = 2 * Q(d)
        if k2.denominator != 1:
            raise ValueError(f"mode {d} not in Z/2")
        k2 = int(k2)
        a, pa = self.sector_vectors(ks)
        return self.fock.heisenberg(k2, pa if k2 & 1 else a, v)

    def mode_support_parity(self, alpha) -> str:
        """'half' if only half-odd modes can be nonzero, 'all' otherwise (degree bookkeeping)."""
        ks = as_q_tuple(alpha)
        offs = {self.z_offset(ks, r) % 2 for r in _small_box(self.l)}
        if offs == {1}:
            return "half"
        return "all"

    # explicit exponentials (reference route) --------------------------------
    def e_plus_apply(self, alpha, v: FockVector) -> dict:
        """E^+(alpha, z) v as {z-exponent: FockVector}, by summing powers of the exponent."""
        a, _ = self.sector_vectors(as_q_tuple(alpha))
        return self._exp_annihilate(v, lambda n: (2 * n, a, -Q(1, n), -2 * n))

    def f_plus_apply(self, p_alpha, v: FockVector) -> dict:
        """F^+(p(alpha), z) v; ``p_alpha`` in half-sector coordinates (alpha_1..alpha_{l-1}, beta)."""
        pa = tuple(p_alpha)
        return self._exp_annihilate(v, lambda n: (2 * n - 1, pa, -Q(2, 2 * n - 1), -(2 * n - 1)))

    def _exp_annihilate(self, v: FockVector, term) -> dict:
        if not any(term(1)[1]) or not v:
            return {0: v} if v else {}
        depth = max((-sum(k for k, _ in m.osc) for m, _ in v), default=0)
        result = {0: v}
        power = {0: v}   # (exponent operator)^j v / j!
        j = 0
        while power:
            j += 1
            nxt: dict = {}
            for zexp, vec in power.items():
                for n in range(1, depth + 1):
                    k2, a, coef, zpow = term(n)
                    if k2 > depth:
                        break
                    w = self.fock.annihilate_vector(k2, a, vec)
                    if w:
                        laurent_add(nxt, zexp + zpow, w.scale(coef / j))
            power = nxt
            for zexp, vec in power.items():
                laurent_add(result, zexp, vec)
        return result

    def e_minus_truncated(self, alpha, budget) -> dict:
        """E^-(alpha, z) up to creation degree ``budget``: {z-exponent: polynomial}."""
        a, _ = self.sector_vectors(as_q_tuple(alpha))
        return self._exp_create(lambda j: {((-j, d),): Q(x, j // 2) for d, x in enumerate(a) if x}
                                if j % 2 == 0 else {}, budget)

    def f_minus_truncated(self, p_alpha, budget) -> dict:
        pa = tuple(p_alpha)
        return self._exp_create(lambda j: {((-j, d),): Q(2 * x, j) for d, x in enumerate(pa) if x}
                                if j % 2 == 1 else {}, budget)

    @staticmethod
    def _exp_create(gen, budget) -> dict:
        kmax = int(2 * Q(budget))
        # exp of sum_j z^j g_j by direct power expansion
        expo = {j: gen(j) for j in range(1, kmax + 1)}
        expo = {j: g for j, g in expo.items() if g}
        result = {0: {(): Q(1)}}
        power = {0: {(): Q(1)}}
        i = 0
        while power:
            i += 1
            nxt: dict = {}
            for zexp, poly in power.items():
                for j, g in expo.items():
                    if zexp + j > kmax:
                        continue
                    acc = nxt.setdefault(zexp + j, {})
                    poly_add_into(acc, poly_mul(g, poly), Q(1, i))
            power = {z: p for z, p in nxt.items() if p}
            for z, p in power.items():
                poly_add_into(result.setdefault(z, {}), p)
        return {z: p for z, p in result.items() if p}

    def apply_poly(self, poly: dict, v: FockVector) -> FockVector:
        """Multiply every monomial of v by a rational creation polynomial."""
        acc = {}
        for m, c in v:
            for o, x in poly.items():
                key = FockMonomial(osc_merge(o, m.osc), m.exp)
                s = c * x
                cur = acc.get(key)
                s = s if cur is None else cur + s
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return FockVector._raw(acc)

    def x_mode_reference(self, alpha, d, v: FockVector) -> FockVector:
        """X_d(alpha) v through the explicit E^-F^-E^+F^+ expansions (slow, independent route)."""
        ks = as_q_tuple(alpha)
        _, pa = self.sector_vectors(ks)
        acc = FockVector()
        for m, c in v:
            target = -2 * Q(d) - self.z_offset(ks, m.exp)
            if target.denominator != 1:
                continue
            target = int(target)
            after_f: dict = {}
            for z1, w in self.e_plus_apply(ks, FockVector.monomial(m, c)).items():
                for z2, u in self.f_plus_apply(pa, w).items():
                    laurent_add(after_f, z1 + z2, u)
            budget = Q(max(0, target - min(after_f, default=0)), 2)
            em = self.e_minus_truncated(ks, budget)
            fm = self.f_minus_truncated(pa, budget)
            piece = FockVector()
            for z, u in after_f.items():
                for ze, pe in em.items():
                    for zf, pf in fm.items():
                        if z + ze + zf == target:
                            piece = piece + self.apply_poly(poly_mul(pe, pf), u)
            out_exp = tuple(x + y for x, y in zip(ks, m.exp))
            pref = self.prefactor(ks, m.exp)
            acc = acc + FockVector({FockMonomial(o.osc, out_exp): cc * pref for o, cc in piece})
        return acc


def _small_box(l: int):
    import itertools
    return itertools.product(range(-1, 2), repeat=l)


@lru_cache(maxsize=None)
def engine(l: int, convention: PhaseConvention = PhaseConvention.FULL_EXPONENT) -> VertexEngine:
    return VertexEngine(lattice(l), PhaseConvention(convention))


# ---------------------------------------------------------------------------
# contraction identities and the two-point composite

def _mul_series_into(acc: dict, zexp, wexp, v: FockVector) -> None:
    laurent_add(acc, (zexp, wexp), v)


def contraction_e(eng: VertexEngine, a, b, v: FockVector, order: int) -> tuple:
    """Both sides of E+(a,z)E-(b,w) = (1 - w^2/z^2)^{(a,b)} E-(b,w)E+(a,z) on v.

    Returns two {(z-exponent, w-exponent): FockVector} maps, truncated at w^(2 order).
    """
    a, _ = eng.sector_vectors(as_q_tuple(a))
    b, _ = eng.sector_vectors(as_q_tuple(b))
    em = eng.e_minus_truncated(b, order)
    lhs: dict = {}
    for w, poly in em.items():
        for z, u in eng.e_plus_apply(a, eng.apply_poly(poly, v)).items():
            _mul_series_into(lhs, z, w, u)
    coeffs = binomial_series(eng.lat.form_q(a, b), order)
    rhs: dict = {}
    for z, u in eng.e_plus_apply(a, v).items():
        for w, poly in em.items():
            base = eng.apply_poly(poly, u)
            for k, c in enumerate(coeffs):
                if c and w + 2 * k <= 2 * order:
                    _mul_series_into(rhs, z - 2 * k, w + 2 * k, base.scale(c))
    return lhs, rhs


def contraction_f(eng: VertexEngine, a, b, v: FockVector, order: int) -> tuple:
    """Both sides of F+(pa,z)F-(pb,w) = ((z-w)/(z+w))^{(pa,pb)} F-(pb,w)F+(pa,z) on v, truncated at w^order."""
    _, pa = eng.sector_vectors(as_q_tuple(a))
    _, pb = eng.sector_vectors(as_q_tuple(b))
    fm = eng.f_minus_truncated(pb, Q(order, 2))
    lhs: dict = {}
    for w, poly in fm.items():
        for z, u in eng.f_plus_apply(pa, eng.apply_poly(poly, v)).items():
            _mul_series_into(lhs, z, w, u)
    c = eng.lat.form_half(pa, pb)
    plus = [x * (-1) ** k for k, x in enumerate(binomial_series(-c, order))]
    coeffs = series_mul(binomial_series(c, order), plus, order)
    rhs: dict = {}
    for z, u in eng.f_plus_apply(pa, v).items():
        for w, poly in fm.items():
            base = eng.apply_poly(poly, u)
            for k, x in enumerate(coeffs):
                if x and w + k <= order:
                    _mul_series_into(rhs, z - k, w + k, base.scale(x))
    return lhs, rhs


def normal_order(word: Sequence) -> tuple:
    """Normal ordering of oscillator modes (k2, dir): lower degree to the left, stable otherwise."""
    return tuple(sorted(word, key=lambda mode: mode[0]))


def two_point_composite(eng: VertexEngine, a, b, order: int, v: FockVector) -> dict:
    """Coefficients of X(a, b, z, w) v as {(z-exponent, w-exponent): FockVector}.

    The oscillator part is :Y(a,z)Y(b,w):, all creation series to the left of all
    annihilation series; creation terms are kept up to total exponent 2*order in
    each variable.  The lattice part is that of X(a+b, w) with the phase of a+b.
    """
    ka, kb = as_q_tuple(a), as_q_tuple(b)
    s = tuple(x + y for x, y in zip(ka, kb))
    _, pa = eng.sector_vectors(ka) if any(ka) else (ka, (0,) * eng.l)
    _, pb = eng.sector_vectors(kb) if any(kb) else (kb, (0,) * eng.l)
    lat = eng.lat
    out: dict = {}
    for m, c in v:
        # annihilation half: E+F+(b, w) then E+F+(a, z)
        stage: dict = {}
        for w1, u in eng.e_plus_apply(kb, FockVector.monomial(m, c)).items():
            for w2, u2 in eng.f_plus_apply(pb, u).items():
                for z1, u3 in eng.e_plus_apply(ka, u2).items():
                    for z2, u4 in eng.f_plus_apply(pa, u3).items():
                        laurent_add(stage, (z1 + z2, w1 + w2), u4)
        cre_a = _creation_table(eng, ka, pa, order)
        cre_b = _creation_table(eng, kb, pb, order)
        out_exp = tuple(x + y for x, y in zip(s, m.exp))
        pref = Cyclo8.zeta_power(eng.phase_exp(lat.p0_tuple(s), out_exp))
        for cls_root in (ka, kb):
            if any(cls_root) and lat.classify(cls_root) is RootClass.SHORT:
                pref = pref * I
        if any(s) and lat.cocycle(s, m.exp) < 0:
            pref = -pref
        woff = lat.form_q(s, s) + 2 * lat.form_q(s, lat.shifted(m.exp))
        for (zs, ws), u in stage.items():
            for za, pa_poly in cre_a.items():
                for wb, pb_poly in cre_b.items():
                    piece = eng.apply_poly(poly_mul(pa_poly, pb_poly), u)
                    if piece:
                        piece = FockVector({FockMonomial(o.osc, out_exp): x * pref for o, x in piece})
                        laurent_add(out, (zs + za, ws + wb + woff), piece)
    return out


def _creation_table(eng: VertexEngine, ks: tuple, pa: tuple, order: int) -> dict:
    em = eng.e_minus_truncated(ks, order) if any(ks) else {0: {(): Q(1)}}
    fm = eng.f_minus_truncated(pa, order) if any(pa) else {0: {(): Q(1)}}
    out: dict = {}
    for ze, pe in em.items():
        for zf, pf in fm.items():
            if ze + zf <= 2 * order:
                poly_add_into(out.setdefault(ze + zf, {}), poly_mul(pe, pf))
    return {z: p for z, p in out.items() if p}
