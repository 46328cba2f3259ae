"""Exact polynomial arithmetic layers used by the order machinery.

Three coefficient domains appear, all with dense low-degree-first tuples:

* `up_*`   -- univariate polynomials over F_q itself (tuples of element
              codes).  Used for residue factorisations and Hensel data.
* `tp_*`   -- polynomials in t over F_q, i.e. exact elements of F_q[t]
              (tuples of element codes).  These support exact resultants.
* `xp_*`   -- polynomials in X whose coefficients are `tp` tuples.  The
              defining polynomials of orders live here, exactly.

On top of those sit `SeriesPoly` (X-polynomials with truncated power
series coefficients, for Hensel lifting and series resultants) and the
integer-coefficient classes `IntPoly` / `BiPoly` used for counting
polynomials and their two-variable symbolic forms.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import PrecisionExhausted
from .series import (LaurentSeries, TruncatedSeries, ser_mul, ser_val)


# ---------------------------------------------------------------------------
# univariate polynomials over F_q (element-code tuples, low degree first)
# ---------------------------------------------------------------------------

def up_trim(a):
    a = tuple(a)
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return a[:n]

def up_deg(a):
    return len(a) - 1

def up_add(fq, a, b):
    if len(a) < len(b):
        a, b = b, a
    add = fq._add
    out = list(a)
    for i, c in enumerate(b):
        out[i] = add[out[i]][c]
    return up_trim(out)

def up_sub(fq, a, b):
    sub = fq._sub
    n = max(len(a), len(b))
    a = tuple(a) + (0,) * (n - len(a))
    b = tuple(b) + (0,) * (n - len(b))
    return up_trim(sub[x][y] for x, y in zip(a, b))

def up_neg(fq, a):
    neg = fq._neg
    return tuple(neg[c] for c in a)

def up_scale(fq, c, a):
    if c == 0:
        return ()
    row = fq._mul[c]
    return tuple(row[x] for x in a)

def up_mul(fq, a, b):
    if not a or not b:
        return ()
    add = fq._add
    mul = fq._mul
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        row = mul[ai]
        for j, bj in enumerate(b):
            if bj:
                out[i + j] = add[out[i + j]][row[bj]]
    return tuple(out)

def up_divmod(fq, a, b):
    """Euclidean division in F_q[X]; b must be nonzero."""
    b = up_trim(b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    a = list(up_trim(a))
    db, lead_inv = len(b) - 1, fq._inv[b[-1]]
    if len(a) - 1 < db:
        return (), tuple(a)
    quo = [0] * (len(a) - db)
    sub = fq._sub
    mul = fq._mul
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c == 0:
            continue
        qc = mul[c][lead_inv]
        quo[i - db] = qc
        row = mul[qc]
        for j, bj in enumerate(b):
            if bj:
                a[i - db + j] = sub[a[i - db + j]][row[bj]]
    return up_trim(quo), up_trim(a)

def up_mod(fq, a, b):
    return up_divmod(fq, a, b)[1]

def up_monic(fq, a):
    a = up_trim(a)
    if not a or a[-1] == 1:
        return a
    return up_scale(fq, fq._inv[a[-1]], a)

def up_gcd(fq, a, b):
    a, b = up_trim(a), up_trim(b)
    while b:
        a, b = b, up_mod(fq, a, b)
    return up_monic(fq, a)

def up_ext_euclid(fq, a, b):
    """(g, u, v) with u*a + v*b = g = monic gcd(a, b)."""
    r0, r1 = up_trim(a), up_trim(b)
    u0, u1 = (1,), ()
    v0, v1 = (), (1,)
    while r1:
        q, r = up_divmod(fq, r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, up_sub(fq, u0, up_mul(fq, q, u1))
        v0, v1 = v1, up_sub(fq, v0, up_mul(fq, q, v1))
    if r0 and r0[-1] != 1:
        c = fq._inv[r0[-1]]
        r0, u0, v0 = (up_scale(fq, c, r0), up_scale(fq, c, u0), up_scale(fq, c, v0))
    return r0, u0, v0

def up_eval(fq, a, x):
    acc = 0
    mul = fq._mul
    add = fq._add
    for c in reversed(a):
        acc = add[mul[acc][x]][c]
    return acc

def up_derivative(fq, a):
    p = fq.p
    out = [fq.mul(fq.from_int(i % p), a[i]) for i in range(1, len(a))]
    return up_trim(out)

def up_pow(fq, a, k):
    out = (1,)
    base = tuple(a)
    while k:
        if k & 1:
            out = up_mul(fq, out, base)
        base = up_mul(fq, base, base)
        k >>= 1
    return out

def monic_polys_over_fq(fq, degree):
    """All monic polynomials of the given degree, in a fixed counter order
    (constant coefficient is the least significant digit)."""
    q = fq.q
    for code in range(q ** degree):
        coeffs = []
        c = code
        for _ in range(degree):
            coeffs.append(c % q)
            c //= q
        coeffs.append(1)
        yield tuple(coeffs)

def up_is_irreducible(fq, a):
    a = up_trim(a)
    d = len(a) - 1
    if d <= 0:
        return False
    if d == 1:
        return True
    for deg in range(1, d // 2 + 1):
        for cand in monic_polys_over_fq(fq, deg):
            if not up_mod(fq, a, cand):
                return False
    return True

def up_factor(fq, a):
    """Factor into monic irreducibles: list of (factor, multiplicity),
    deterministic (ascending degree, then counter order).  The unit
    leading coefficient is discarded."""
    a = up_monic(fq, a)
    if not a:
        raise ZeroDivisionError("factoring the zero polynomial")
    out = []
    deg = 1
    while len(a) - 1 > 0:
        if len(a) - 1 < 2 * deg:
            # remaining part is irreducible
            out.append((a, 1))
            break
        found = False
        for cand in monic_polys_over_fq(fq, deg):
            q_, r = up_divmod(fq, a, cand)
            if not r:
                mult = 1
                a = q_
                while True:
                    q_, r = up_divmod(fq, a, cand)
                    if r:
                        break
                    mult += 1
                    a = q_
                out.append((cand, mult))
                found = True
                break
        if not found:
            deg += 1
    return out

def up_roots(fq, a):
    """Roots in F_q, ascending by element code."""
    return [x for x in range(fq.q) if up_eval(fq, a, x) == 0]


# ---------------------------------------------------------------------------
# exact F_q[t] polynomials (same tuple representation, own namespace)
# ---------------------------------------------------------------------------

tp_trim = up_trim
tp_add = up_add
tp_sub = up_sub
tp_neg = up_neg
tp_mul = up_mul
tp_scale = up_scale

def tp_val(a):
    for i, c in enumerate(a):
        if c:
            return i
    return None

def tp_divexact(fq, a, b):
    q, r = up_divmod(fq, a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q

def tp_to_series(fq, a, precision):
    return TruncatedSeries.from_poly(fq, a, precision)

def tp_text_degree(a):
    return len(up_trim(a)) - 1


# ---------------------------------------------------------------------------
# X-polynomials with exact F_q[t] coefficients
# ---------------------------------------------------------------------------

def xp_trim(f):
    f = [tp_trim(c) for c in f]
    while f and not f[-1]:
        f.pop()
    return tuple(f)

def xp_deg(f):
    return len(f) - 1

def xp_add(fq, f, g):
    n = max(len(f), len(g))
    f = list(f) + [()] * (n - len(f))
    g = list(g) + [()] * (n - len(g))
    return xp_trim([tp_add(fq, a, b) for a, b in zip(f, g)])

def xp_sub(fq, f, g):
    n = max(len(f), len(g))
    f = list(f) + [()] * (n - len(f))
    g = list(g) + [()] * (n - len(g))
    return xp_trim([tp_sub(fq, a, b) for a, b in zip(f, g)])

def xp_mul(fq, f, g):
    if not f or not g:
        return ()
    out = [()] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if not a:
            continue
        for j, b in enumerate(g):
            if b:
                out[i + j] = tp_add(fq, out[i + j], tp_mul(fq, a, b))
    return xp_trim(out)

def xp_is_monic(f):
    return bool(f) and f[-1] == (1,)

def xp_derivative(fq, f):
    p = fq.p
    out = []
    for i in range(1, len(f)):
        k = i % p
        out.append(tp_scale(fq, fq.from_int(k), f[i]) if k else ())
    return xp_trim(out)

def xp_mod_monic(fq, f, m):
    """Remainder of f modulo a monic m, staying inside F_q[t][X]."""
    if not xp_is_monic(m):
        raise ValueError("modulus must be monic in X")
    f = list(f)
    dm = len(m) - 1
    while len(f) - 1 >= dm:
        lead = f[-1]
        top = len(f) - 1
        if lead:
            for j in range(dm):
                f[top - dm + j] = tp_sub(fq, f[top - dm + j], tp_mul(fq, lead, m[j]))
        f.pop()
    return xp_trim(f)

def xp_scale_t(fq, f, k):
    """Multiply every coefficient by t^k."""
    return tuple((0,) * k + tuple(c) if c else () for c in f)

def xp_subst_x_shift(fq, f, s):
    """f(X + s) for s an exact F_q[t] polynomial."""
    out = ()
    # Horner: f(X+s) = (...((f_n)(X+s) + f_{n-1})(X+s) + ...)
    xs = ((tuple(s) if s else ()), (1,))  # the X-polynomial X + s
    for c in reversed(f):
        out = xp_mul(fq, out, xs)
        out = xp_add(fq, out, ((tuple(c),) if c else ((),)))
    return xp_trim(out)

def xp_subst_x_scale(fq, f, a):
    """f(t^a * X), coefficients gain t^(a*i)."""
    out = []
    for i, c in enumerate(f):
        out.append((0,) * (a * i) + tuple(c) if c else ())
    return xp_trim(out)

def xp_reverse_weights(f):
    """(t-valuation, X-degree) pairs of the nonzero coefficients."""
    pts = []
    for i, c in enumerate(f):
        v = tp_val(c)
        if v is not None:
            pts.append((i, v))
    return pts

def xp_to_series_poly(fq, f, precision):
    return SeriesPoly(fq, [TruncatedSeries.from_poly(fq, c, precision) for c in f])

def xp_content_tval(f):
    """Minimum t-valuation over the nonzero coefficients (None if f = 0)."""
    vals = [tp_val(c) for c in f if tp_val(c) is not None]
    return min(vals) if vals else None


def resultant_exact(fq, f, g):
    """Resultant of two X-polynomials with exact F_q[t] coefficients,
    computed fraction-free; returns an exact F_q[t] tuple."""
    f, g = xp_trim(f), xp_trim(g)
    if not f or not g:
        return ()
    m, n = len(f) - 1, len(g) - 1
    if m == 0:
        return up_pow(fq, f[0], n)
    if n == 0:
        return up_pow(fq, g[0], m)
    size = m + n
    rows = []
    for i in range(n):
        row = [()] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = tuple(c)
        rows.append(row)
    for i in range(m):
        row = [()] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = tuple(c)
        rows.append(row)
    return _det_bareiss_tp(fq, rows)

def _det_bareiss_tp(fq, mat):
    n = len(mat)
    m = [row[:] for row in mat]
    denom = (1,)
    sign = 1
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if m[i][k]), None)
        if piv is None:
            return ()
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = tp_sub(fq, tp_mul(fq, m[i][j], m[k][k]),
                             tp_mul(fq, m[i][k], m[k][j]))
                m[i][j] = tp_divexact(fq, num, denom)
            m[i][k] = ()
        denom = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else tp_neg(fq, det)


# ---------------------------------------------------------------------------
# X-polynomials with truncated series coefficients
# ---------------------------------------------------------------------------

class SeriesPoly:
    """Polynomial in X whose coefficients are truncated power series."""

    __slots__ = ("fq", "coeffs")

    def __init__(self, fq, coeffs):
        self.fq = fq
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_exact(cls, fq, xp, precision):
        return cls(fq, [TruncatedSeries.from_poly(fq, c, precision) for c in xp])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def precision(self):
        return min((c.precision for c in self.coeffs), default=0)

    def coefficient(self, i):
        return self.coeffs[i]

    def is_monic(self):
        lead = self.coeffs[-1]
        return lead.coeffs[0] == 1 and ser_val(lead.coeffs[1:]) is None

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        prec = min(self.precision, other.precision)
        zero = TruncatedSeries.zero(self.fq, prec)
        a = list(self.coeffs) + [zero] * (n - len(self.coeffs))
        b = list(other.coeffs) + [zero] * (n - len(other.coeffs))
        return SeriesPoly(self.fq, [x + y for x, y in zip(a, b)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        prec = min(self.precision, other.precision)
        zero = TruncatedSeries.zero(self.fq, prec)
        a = list(self.coeffs) + [zero] * (n - len(self.coeffs))
        b = list(other.coeffs) + [zero] * (n - len(other.coeffs))
        return SeriesPoly(self.fq, [x - y for x, y in zip(a, b)])

    def __mul__(self, other):
        prec = min(self.precision, other.precision)
        fq = self.fq
        out = [(0,) * prec for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        from .series import ser_add
        for i, a in enumerate(self.coeffs):
            at = a.coeffs[:prec]
            if ser_val(at) is None:
                continue
            for j, b in enumerate(other.coeffs):
                prod = ser_mul(fq, at, b.coeffs[:prec], prec)
                out[i + j] = ser_add(fq, out[i + j], prod)
        return SeriesPoly(fq, [TruncatedSeries(fq, c) for c in out])

    def scale(self, s):
        """Multiply by a single series coefficient."""
        return SeriesPoly(self.fq, [c * s for c in self.coeffs])

    def derivative(self):
        fq = self.fq
        p = fq.p
        out = []
        for i in range(1, len(self.coeffs)):
            k = fq.from_int(i % p)
            out.append(self.coeffs[i].scale(k))
        return SeriesPoly(fq, out or [TruncatedSeries.zero(fq, self.precision)])

    def evaluate(self, x):
        """Evaluate at a truncated series x."""
        prec = min(self.precision, x.precision)
        acc = TruncatedSeries.zero(self.fq, prec)
        for c in reversed(self.coeffs):
            acc = acc * x + c.truncate(prec)
        return acc

    def divmod_unit_lead(self, g):
        """Division with remainder; g's leading coefficient must be a unit."""
        if not g.coeffs[-1].is_unit():
            raise ZeroDivisionError("leading coefficient is not a unit series")
        fq = self.fq
        prec = min(self.precision, g.precision)
        lead_inv = g.coeffs[-1].truncate(prec).unit_inverse()
        rem = [c.truncate(prec) for c in self.coeffs]
        dg = len(g.coeffs) - 1
        if len(rem) - 1 < dg:
            return SeriesPoly(fq, [TruncatedSeries.zero(fq, prec)]), SeriesPoly(fq, rem)
        quo = [TruncatedSeries.zero(fq, prec)] * (len(rem) - dg)
        for i in range(len(rem) - 1, dg - 1, -1):
            c = rem[i] * lead_inv
            quo[i - dg] = c
            for j in range(dg + 1):
                rem[i - dg + j] = rem[i - dg + j] - c * g.coeffs[j].truncate(prec)
        rem = rem[:dg] or [TruncatedSeries.zero(fq, prec)]
        return SeriesPoly(fq, quo), SeriesPoly(fq, rem)

    def reduce_mod_t(self):
        """Image in F_q[X]: tuple of constant terms, trimmed."""
        return up_trim([c.coeffs[0] for c in self.coeffs])

    def truncate(self, prec):
        return SeriesPoly(self.fq, [c.truncate(prec) for c in self.coeffs])

    def trim(self):
        """Drop leading coefficients that are zero to stored precision."""
        cs = list(self.coeffs)
        while len(cs) > 1 and cs[-1].is_zero():
            cs.pop()
        return SeriesPoly(self.fq, cs)

    def __repr__(self):
        return f"SeriesPoly(degree={self.degree}, precision={self.precision})"


def hensel_split(f, gbar, hbar, precision):
    """Lift a coprime factorisation of f mod t to a factorisation of f.

    f is a monic SeriesPoly, gbar and hbar monic polynomials over F_q with
    f mod t = gbar * hbar and gcd(gbar, hbar) = 1.  Returns monic
    SeriesPoly factors (g, h) with f = g * h to the requested precision.
    """
    fq = f.fq
    g0, u, v = up_ext_euclid(fq, gbar, hbar)
    if g0 != (1,):
        raise ValueError("factors are not coprime modulo t")
    dg, dh = len(gbar) - 1, len(hbar) - 1
    # coefficient columns: g[i][m] is the t^m digit of the X^i coefficient
    gcols = [[0] * precision for _ in range(dg + 1)]
    hcols = [[0] * precision for _ in range(dh + 1)]
    for i, c in enumerate(gbar):
        gcols[i][0] = c
    for i, c in enumerate(hbar):
        hcols[i][0] = c
    fcols = [c.truncate(precision).coeffs for c in f.coeffs]

    def digit(cols, i, m):
        return cols[i][m] if i < len(cols) else 0

    for m in range(1, precision):
        # t^m digit of f - g*h
        err = []
        for i in range(dg + dh + 1):
            s = fcols[i][m] if i < len(fcols) else 0
            for a in range(max(0, i - dh), min(i, dg) + 1):
                for mm in range(m + 1):
                    x = digit(gcols, a, mm)
                    y = digit(hcols, i - a, m - mm)
                    if x and y:
                        s = fq.sub(s, fq.mul(x, y))
            err.append(s)
        err = up_trim(err)
        if not err:
            continue
        # solve gbar*dh_ + hbar*dg_ = err with deg dg_ < dg
        dg_ = up_mod(fq, up_mul(fq, v, err), gbar)
        dh_, r = up_divmod(fq, up_sub(fq, err, up_mul(fq, hbar, dg_)), gbar)
        if r:
            raise ArithmeticError("lift step failed to divide")
        for i, c in enumerate(dg_):
            gcols[i][m] = c
        for i, c in enumerate(dh_):
            if i > dh:
                raise ArithmeticError("lift step raised the degree")
            hcols[i][m] = c
    g = SeriesPoly(fq, [TruncatedSeries(fq, tuple(col)) for col in gcols])
    h = SeriesPoly(fq, [TruncatedSeries(fq, tuple(col)) for col in hcols])
    return g, h


def resultant_series(f, g):
    """Resultant of two series-coefficient X-polynomials, by elimination
    with valuation pivoting on the Sylvester matrix.  Raises
    PrecisionExhausted when a pivot cannot be certified nonzero."""
    fq = f.fq
    fc, gc = f.trim().coeffs, g.trim().coeffs
    m, n = len(fc) - 1, len(gc) - 1
    if m < 0 or n < 0:
        raise PrecisionExhausted("resultant of an identically-zero input")
    prec = min(f.precision, g.precision)
    if m == 0:
        out = LaurentSeries.one(fq, prec)
        base = LaurentSeries.from_series(fc[0])
        for _ in range(n):
            out = out * base
        return out
    if n == 0:
        out = LaurentSeries.one(fq, prec)
        base = LaurentSeries.from_series(gc[0])
        for _ in range(m):
            out = out * base
        return out
    size = m + n
    rows = []
    for i in range(n):
        row = [LaurentSeries.zero(fq, prec) for _ in range(size)]
        for j, c in enumerate(reversed(fc)):
            row[i + j] = LaurentSeries.from_series(c)
        rows.append(row)
    for i in range(m):
        row = [LaurentSeries.zero(fq, prec) for _ in range(size)]
        for j, c in enumerate(reversed(gc)):
            row[i + j] = LaurentSeries.from_series(c)
        rows.append(row)
    sign = 1
    pivots = []
    for k in range(size):
        best = None
        best_val = None
        for i in range(k, size):
            v = rows[i][k].valuation()
            if v is not None and (best_val is None or v < best_val):
                best, best_val = i, v
        if best is None:
            raise PrecisionExhausted(
                "resultant pivot is zero to working precision; "
                "raise the precision or use exact polynomial inputs")
        if best != k:
            rows[k], rows[best] = rows[best], rows[k]
            sign = -sign
        inv = rows[k][k].inverse()
        for i in range(k + 1, size):
            if rows[i][k].is_zero():
                continue
            factor = rows[i][k] * inv
            rows[i] = [rows[i][j] - factor * rows[k][j] for j in range(size)]
        pivots.append(rows[k][k])
    det = pivots[0]
    for piv in pivots[1:]:
        det = det * piv
    if sign < 0:
        det = -det
    return det


# ---------------------------------------------------------------------------
# integer-coefficient polynomials for the counting layer
# ---------------------------------------------------------------------------

class IntPoly:
    """Dense univariate polynomial with integer coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, k, c=1):
        return cls((0,) * k + (c,))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coefficient(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly((other,))
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPoly((other,))
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return IntPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = IntPoly((other,))
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return IntPoly(x - y for x, y in zip(a, b))

    def __rsub__(self, other):
        return IntPoly((other,)) - self

    def __neg__(self):
        return IntPoly(-c for c in self.coeffs)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(c * other for c in self.coeffs)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1) if self.coeffs and other.coeffs else []
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __call__(self, x):
        """Evaluate; works for int, Fraction, IntPoly arguments."""
        acc = x * 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, k):
        """Multiply by the variable to the k-th power."""
        return IntPoly((0,) * k + self.coeffs)

    def reversed_degree(self, n):
        """Coefficient reversal treating self as having degree n."""
        if self.degree > n:
            raise ValueError("polynomial degree exceeds the reversal degree")
        c = list(self.coeffs) + [0] * (n + 1 - len(self.coeffs))
        return IntPoly(reversed(c))

    def text(self, var="t"):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if k == 0:
                body = str(abs(c))
            else:
                mag = "" if abs(c) == 1 else f"{abs(c)}*"
                pw = var if k == 1 else f"{var}^{k}"
                body = mag + pw
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"IntPoly({self.text()})"


class BiPoly:
    """Polynomial in t whose coefficients are integer polynomials in q."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [x if isinstance(x, IntPoly) else IntPoly((x,)) for x in coeffs]
        while c and c[-1].is_zero():
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def constant(cls, q_poly):
        return cls((q_poly,))

    @property
    def t_degree(self):
        return len(self.coeffs) - 1

    def coefficient(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else IntPoly()

    def __eq__(self, other):
        return isinstance(other, BiPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [IntPoly()] * (n - len(self.coeffs))
        b = list(other.coeffs) + [IntPoly()] * (n - len(other.coeffs))
        return BiPoly(x + y for x, y in zip(a, b))

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [IntPoly()] * (n - len(self.coeffs))
        b = list(other.coeffs) + [IntPoly()] * (n - len(other.coeffs))
        return BiPoly(x - y for x, y in zip(a, b))

    def __mul__(self, other):
        if isinstance(other, (int, IntPoly)):
            o = other if isinstance(other, IntPoly) else IntPoly((other,))
            return BiPoly(c * o for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return BiPoly()
        out = [IntPoly() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if not a.is_zero():
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
        return BiPoly(out)

    __rmul__ = __mul__

    def at_q(self, q):
        """Specialise q to an integer, leaving a polynomial in t."""
        return IntPoly([c(q) for c in self.coeffs])

    def text(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            cq = c.text(var="q")
            pw = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if not pw:
                parts.append(f"({cq})" if " " in cq else cq)
            elif cq == "1":
                parts.append(pw)
            elif " " in cq or "+" in cq or "-" in cq[1:]:
                parts.append(f"({cq})*{pw}")
            else:
                parts.append(f"{cq}*{pw}")
        return " + ".join(parts)

    def __repr__(self):
        return f"BiPoly({self.text()})"
