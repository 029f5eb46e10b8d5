"""Truncated multivariate Taylor ("jet") arithmetic over exact rationals.

Used by verify_equations.py to evaluate geometric quantities of a generic
metric 4-jet exactly.  A Jet stores the Taylor coefficients of a function
of (u, v, p, q) about a base point, truncated at total degree DEG, plus an
accuracy budget `acc`: coefficients of total degree <= acc are exact.
Differentiation costs one degree of accuracy; multiplication/division/sqrt
keep the minimum of the operands' budgets.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction as Fr

NVAR = 4
DEG = 3

_EXPS = [e for d in range(DEG + 1)
         for e in itertools.combinations_with_replacement(range(NVAR), d)]


def _exp_tuple(comb):
    t = [0] * NVAR
    for i in comb:
        t[i] += 1
    return tuple(t)


ALL_EXPS = sorted({_exp_tuple(c) for c in _EXPS}, key=lambda t: (sum(t), t))


class Jet:
    __slots__ = ("c", "acc")

    def __init__(self, coeffs=None, acc=DEG):
        self.c = dict(coeffs or {})
        self.acc = acc

    # -- constructors -----------------------------------------------------
    @staticmethod
    def const(x):
        x = Fr(x)
        return Jet({(0,) * NVAR: x} if x else {}, DEG)

    @staticmethod
    def var(i, base):
        e = [0] * NVAR
        e[i] = 1
        d = {tuple(e): Fr(1)}
        base = Fr(base)
        if base:
            d[(0,) * NVAR] = base
        return Jet(d, DEG)

    @staticmethod
    def random(rng, base, spread=Fr(1, 4), den=16, acc=DEG):
        """Random jet with given constant term; all higher coeffs O(spread)."""
        d = {}
        base = Fr(base)
        if base:
            d[(0,) * NVAR] = base
        for e in ALL_EXPS:
            if sum(e) == 0:
                continue
            num = rng.randint(-3, 3)
            if num:
                d[e] = Fr(num, den) * spread
        return Jet(d, acc)

    # -- ring ops ----------------------------------------------------------
    def __add__(self, o):
        if not isinstance(o, Jet):
            o = Jet.const(o)
        d = dict(self.c)
        for e, x in o.c.items():
            d[e] = d.get(e, Fr(0)) + x
            if not d[e]:
                del d[e]
        return Jet(d, min(self.acc, o.acc))

    __radd__ = __add__

    def __neg__(self):
        return Jet({e: -x for e, x in self.c.items()}, self.acc)

    def __sub__(self, o):
        if not isinstance(o, Jet):
            o = Jet.const(o)
        return self + (-o)

    def __rsub__(self, o):
        return Jet.const(o) + (-self)

    def __mul__(self, o):
        if not isinstance(o, Jet):
            x = Fr(o)
            return Jet({e: c * x for e, c in self.c.items()} if x else {}, self.acc)
        acc = min(self.acc, o.acc)
        d = {}
        for e1, x1 in self.c.items():
            s1 = sum(e1)
            for e2, x2 in o.c.items():
                s = s1 + sum(e2)
                if s > acc:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                v = d.get(e)
                d[e] = x1 * x2 if v is None else v + x1 * x2
        return Jet({e: x for e, x in d.items() if x}, acc)

    __rmul__ = __mul__

    def inv(self):
        a0 = self.c.get((0,) * NVAR, Fr(0))
        if a0 == 0:
            raise ZeroDivisionError("jet with zero constant term")
        # Newton-free: order-by-order recursion b = 1/a
        b = Jet({(0,) * NVAR: 1 / a0}, self.acc)
        rest = self - Jet({(0,) * NVAR: a0})
        # iterate b <- b*(2 - a*b); quadratic convergence in degree
        for _ in range(3 if self.acc >= 2 else self.acc + 1):
            b = b * (Jet.const(2) - self * b)
        return b

    def __truediv__(self, o):
        if not isinstance(o, Jet):
            return self * (Fr(1) / Fr(o))
        return self * o.inv()

    def __rtruediv__(self, o):
        return Jet.const(o) * self.inv()

    def sqrt(self):
        a0 = self.c.get((0,) * NVAR, Fr(0))
        r = _fr_sqrt(a0)
        if r is None:
            raise ValueError("constant term is not a rational square: %s" % a0)
        b = Jet({(0,) * NVAR: r}, self.acc)
        half = Fr(1, 2)
        for _ in range(4):
            b = (b + self / b) * half
        return b

    def diff(self, i):
        d = {}
        for e, x in self.c.items():
            if e[i] == 0:
                continue
            e2 = list(e)
            e2[i] -= 1
            d[tuple(e2)] = x * e[i]
        return Jet(d, self.acc - 1)

    def value(self):
        if self.acc < 0:
            raise ValueError("jet accuracy exhausted")
        return self.c.get((0,) * NVAR, Fr(0))

    def __repr__(self):
        return "Jet(val=%s, acc=%d, nterms=%d)" % (self.value(), self.acc, len(self.c))


def _fr_sqrt(x):
    if x < 0:
        return None
    if x == 0:
        return Fr(0)
    pn, pd = _int_sqrt(x.numerator), _int_sqrt(x.denominator)
    if pn is None or pd is None:
        return None
    return Fr(pn, pd)


def _int_sqrt(n):
    r = int(round(n ** 0.5))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand * cand == n:
            return cand
    return None


# -- small linear algebra over jets -----------------------------------------

def mat_inv(M):
    """Inverse of an n x n jet matrix by Gauss-Jordan with value pivoting."""
    n = len(M)
    A = [[M[i][j] for j in range(n)] + [Jet.const(1 if i == j else 0) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if A[r][col].value() != 0:
                piv = r
                break
        if piv is None:
            raise ZeroDivisionError("singular jet matrix")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inv()
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r == col:
                continue
            f = A[r][col]
            if f.value() == 0 and not f.c:
                continue
            A[r] = [A[r][j] - f * A[col][j] for j in range(2 * n)]
    return [[A[i][n + j] for j in range(n)] for i in range(n)]


def solve_exact(rows, rhs):
    """Solve an overdetermined exact linear system; return x or None.

    rows: list of coefficient lists (Fractions), rhs: list of Fractions.
    Requires the consistent solution to be unique on the row space.
    """
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncol = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        m[r] = [x / m[r][c] for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    # consistency: all remaining rows must be all-zero
    for i in range(r, len(m)):
        if any(x != 0 for x in m[i]):
            return None
    x = [Fr(0)] * ncol
    for i, c in enumerate(pivots):
        x[c] = m[i][ncol]
    # verify (free columns -> solution may be non-unique; caller beware)
    for row, b in zip(rows, rhs):
        if sum(a * xi for a, xi in zip(row, x)) != b:
            return None
    return x
