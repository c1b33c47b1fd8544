"""Block-matrix bracket kernel on top of FLINT rational matrices.

Y_k(alpha) sends oscillator polynomials of weight W (twice the oscillator
degree) to weight W + k, and its matrix on the monomial basis does not depend
on the lattice part of the state.  The lattice part only enters through k and
the root-of-unity prefactor, both constant on a block (r, W) of the basis.  A
bracket on a block is then a pair of rational matrix products plus a scalar
fit, which FLINT does exactly.

Matrices are filled column by column from the same y_coeff kernel used by the
single-vector route, so the two routes share nothing beyond linearity.
"""

from __future__ import annotations

import random

import flint

from .fock import FockMonomial, FockVector, oscillator_multisets
from .scalar import Cyclo8, Q


def _fq(x) -> flint.fmpq:
    x = Q(x)
    return flint.fmpq(int(x.numerator), int(x.denominator))


def _to_q(x: flint.fmpq):
    return Q(int(x.p), int(x.q))


def is_zero(m: flint.fmpq_mat) -> bool:
    return m.nrows() == 0 or m.ncols() == 0 or m == flint.fmpq_mat(m.nrows(), m.ncols())


class BlockKernel:
    """Rational matrices of Y_k(alpha) and of Heisenberg currents between weight spaces."""

    def __init__(self, eng):
        self.eng = eng
        self.l = eng.l
        self._basis: dict = {}
        self._index: dict = {}
        self._y: dict = {}
        self._cur: dict = {}
        self._probe: dict = {}
        self._eye: dict = {}

    def basis(self, w: int) -> tuple:
        got = self._basis.get(w)
        if got is None:
            got = oscillator_multisets(self.l, w) if w >= 0 else ()
            self._basis[w] = got
            self._index[w] = {o: i for i, o in enumerate(got)}
        return got

    def index(self, w: int) -> dict:
        self.basis(w)
        return self._index[w]

    def _matrix(self, w_in: int, w_out: int, column) -> flint.fmpq_mat:
        cols = self.basis(w_in)
        if w_out < 0:
            return flint.fmpq_mat(0, len(cols))
        rows = self.basis(w_out)
        index = self._index[w_out]
        n = len(cols)
        flat = [0] * (len(rows) * n)
        for j, osc in enumerate(cols):
            for o, c in column(osc).items():
                flat[index[o] * n + j] = _fq(c)
        return flint.fmpq_mat(len(rows), n, flat)

    def y(self, ks: tuple, k: int, w: int) -> flint.fmpq_mat:
        """Y_k(alpha) from weight w to weight w + k, prefactor excluded."""
        key = (ks, k, w)
        got = self._y.get(key)
        if got is None:
            got = self._matrix(w, w + k, lambda osc: self.eng.y_coeff(ks, k, osc))
            self._y[key] = got
        return got

    def current(self, ks: tuple, k2: int, w: int) -> flint.fmpq_mat:
        """2 J_alpha(k2/2) from weight w to weight w - k2, for k2 != 0."""
        key = (ks, k2, w)
        got = self._cur.get(key)
        if got is None:
            eng = self.eng
            a, pa = eng.sector_vectors(ks)
            vec = pa if k2 & 1 else a
            exp0 = (0,) * self.l

            def column(osc):
                v = FockVector.monomial(FockMonomial(osc, exp0))
                return {m.osc: c.c[0] * 2 for m, c in eng.fock.heisenberg(k2, vec, v)}

            got = self._matrix(w, w - k2, column)
            self._cur[key] = got
        return got

    def identity(self, w: int) -> flint.fmpq_mat:
        got = self._eye.get(w)
        if got is None:
            n = len(self.basis(w))
            got = flint.fmpq_mat(n, n, [int(i == j) for i in range(n) for j in range(n)])
            self._eye[w] = got
        return got

    def probes(self, rows: int, cols: int) -> tuple:
        """Fixed pseudo-random integer vectors used to read off a scalar ratio."""
        key = (rows, cols)
        got = self._probe.get(key)
        if got is None:
            rng = random.Random(rows * 7919 + cols)
            got = (flint.fmpq_mat(1, rows, [rng.randint(1, 97) for _ in range(rows)]),
                   flint.fmpq_mat(cols, 1, [rng.randint(1, 97) for _ in range(cols)]))
            self._probe[key] = got
        return got

    def ratio(self, num: flint.fmpq_mat, den: flint.fmpq_mat):
        """s with num == s * den (den nonzero), else None."""
        v, w = self.probes(den.nrows(), den.ncols())
        d = (v * den * w)[0, 0]
        if d != 0:
            s = (v * num * w)[0, 0] / d
        else:
            # probe orthogonal to den: fall back to the first nonzero entry
            i, j = next((i, j) for i in range(den.nrows()) for j in range(den.ncols()) if den[i, j] != 0)
            s = num[i, j] / den[i, j]
        return s if num == den * s else None


def fit_block(kernel: BlockKernel, p1, p2, p3, k1: int, k2: int, k3: int):
    """(ok, f) with zeta^k1 p1 - zeta^k2 p2 == f zeta^k3 p3; f is None when nothing is determined.

    p1 or p2 may be None for a composition that vanishes identically.
    """
    zero = flint.fmpq_mat(p3.nrows(), p3.ncols())
    p1 = zero if p1 is None else p1
    p2 = zero if p2 is None else p2
    target_zero = is_zero(p3)
    u_exp = (k2 - k1) % 8
    if u_exp % 4 == 0:
        diff = p1 - p2 if u_exp == 0 else p1 + p2
        if target_zero:
            return is_zero(diff), None
        s = kernel.ratio(diff, p3)
        if s is None:
            return False, None
        return True, Cyclo8.zeta_power(k1 - k3) * _to_q(s)
    if target_zero:
        return is_zero(p1) and is_zero(p2), None
    sc = []
    for p in (p1, p2):
        s = kernel.ratio(p, p3)
        if s is None:
            return False, None
        sc.append(_to_q(s))
    return True, (Cyclo8.zeta_power(k1) * sc[0] - Cyclo8.zeta_power(k2) * sc[1]) * Cyclo8.zeta_power(-k3)
