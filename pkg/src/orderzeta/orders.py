"""Orders R = O[X]/(f) in etale algebras over F_q((t)).

For a monic squarefree f with integral coefficients this module builds
everything the counting layers need: the power-basis multiplication
table, the maximal order (multiplier-ring iteration on the radical of
t*S), primitive idempotents, a trace twist that makes the maximal order
self-dual, the dual and conductor lattices, and the numeric invariants
(the colength delta of R in the maximal order, the pairwise resultant
valuation rho, and residue and ramification data per factor).

Factor irreducibility is certified, never assumed.  The Newton polygon
must be a single segment whose residual polynomial is a power of one
irreducible; repeated residual roots are resolved by recentering (for
integral slopes) or by descent to the splitting field of the residual
factor (for repeated nonlinear residuals).  Configurations that would
need deeper ramification analysis are rejected with a request for an
explicit factorization; they cannot arise below degree eight.

The automatic splitter in auto_factor handles coprime residual pieces,
integral-slope rescalings X -> t^h Z, and recentering chains, which
covers every polynomial whose factors it can also certify.
"""

from __future__ import annotations

from .errors import (BadFactorization, InvariantViolation, NotSquarefree,
                     PrecisionExhausted, PreconditionViolated)
from .fq import Fq, FqSpec, embedding
from .lattices import (colon_lattice, element_scaled_lattice,
                       hnf_from_generators, identity_lattice,
                       laurent_matrix_inverse, product_lattice,
                       relative_length, solve_in_basis, trace_dual_lattice)
from .polynomials import (SeriesPoly, hensel_split, resultant_exact,
                          resultant_series, tp_val, up_divmod, up_factor,
                          up_pow, up_roots, up_trim, xp_derivative,
                          xp_is_monic, xp_mul, xp_subst_x_shift, xp_trim)
from .series import TruncatedSeries, ser_add, ser_mul, ser_neg, ser_sub


# ---------------------------------------------------------------------------
# small exact linear algebra over F_q
# ---------------------------------------------------------------------------

def _fq_mat_mul(fq, a_cols, b_cols, n):
    out = []
    for j in range(n):
        col = [0] * n
        for k in range(n):
            c = b_cols[j][k]
            if c:
                ak = a_cols[k]
                for i in range(n):
                    if ak[i]:
                        col[i] = fq.add(col[i], fq.mul(c, ak[i]))
        out.append(tuple(col))
    return tuple(out)


def _fq_kernel(fq, cols, n):
    """Basis of the right kernel of the matrix with the given columns."""
    rows = [[cols[j][i] for j in range(n)] for i in range(n)]
    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, n) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = fq.inv(rows[r][c])
        rows[r] = [fq.mul(inv, x) for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c]:
                fac = rows[i][c]
                rows[i] = [fq.sub(rows[i][k], fq.mul(fac, rows[r][k]))
                           for k in range(n)]
        piv_cols.append(c)
        r += 1
        if r == n:
            break
    basis = []
    for fc in range(n):
        if fc in piv_cols:
            continue
        v = [0] * n
        v[fc] = 1
        for idx, pc in enumerate(piv_cols):
            v[pc] = fq.neg(rows[idx][fc])
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# factor certification
# ---------------------------------------------------------------------------

class CertifiedFactor:
    """A monic irreducible factor with its certification data.

    coeffs holds the coefficient digit tuples; window is the number of
    exact digits per coefficient (None for exact polynomials).
    ram_index * residue_degree equals the factor degree.
    """

    __slots__ = ("coeffs", "window", "ram_index", "residue_degree")

    def __init__(self, coeffs, window, ram_index, residue_degree):
        self.coeffs = tuple(tuple(c) for c in coeffs)
        self.window = window
        self.ram_index = ram_index
        self.residue_degree = residue_degree

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def sort_key(self):
        digits = tuple(tuple(c[:12]) + (0,) * max(0, 12 - len(c))
                       for c in self.coeffs)
        return (self.degree, digits)

    def __repr__(self):
        return (f"CertifiedFactor(degree={self.degree}, "
                f"e={self.ram_index}, n={self.residue_degree})")


def _digit(c, idx):
    return c[idx] if idx < len(c) else 0


def _mod_t(coeffs):
    return up_trim([_digit(c, 0) for c in coeffs])


def _is_monic_digits(coeffs):
    lead = coeffs[-1]
    return _digit(lead, 0) == 1 and not any(lead[1:])


def _trim_digits(coeffs):
    out = list(coeffs)
    while len(out) > 1 and not any(out[-1]):
        out.pop()
    return tuple(tuple(c) for c in out)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _certify(fq, coeffs, window, work, budget):
    """(ramification index, residue degree) of a certified irreducible
    monic polynomial; raises BadFactorization when it is reducible or
    when the analysis would need an unsupported ramification depth."""
    coeffs = _trim_digits(coeffs)
    n = len(coeffs) - 1
    if n < 1:
        raise BadFactorization("constant factor")
    if not _is_monic_digits(coeffs):
        raise BadFactorization("factor is not monic in X")
    if n == 1:
        return (1, 1)
    if budget < 0:
        raise BadFactorization(
            "factor certification did not terminate; "
            "is the factorization squarefree?")
    v0 = tp_val(coeffs[0]) if coeffs[0] else None
    if v0 is None:
        if window is None:
            raise BadFactorization("factor is divisible by X")
        raise PrecisionExhausted(
            "constant coefficient vanishes to working precision")
    if window is not None and v0 >= window:
        raise PrecisionExhausted(
            "Newton polygon reaches below the stored precision")
    if v0 == 0:
        eprime, h = 1, 0
    else:
        g = _gcd(v0, n)
        eprime, h = n // g, v0 // g
        for i in range(1, n):
            vi = tp_val(coeffs[i]) if coeffs[i] else None
            if vi is not None and vi * n < v0 * (n - i):
                raise BadFactorization(
                    "factor splits along its Newton polygon")
    j_top = n // eprime
    resid = [_digit(coeffs[j * eprime], h * (j_top - j))
             for j in range(j_top + 1)]
    resid = up_trim(resid)
    parts = up_factor(fq, resid)
    if len(parts) > 1:
        raise BadFactorization(
            "factor splits along its residual polynomial")
    base, k = parts[0]
    b = len(base) - 1
    if k == 1:
        return (eprime, j_top)
    if b == 1:
        if eprime != 1:
            raise BadFactorization(
                "cannot certify: repeated residual root on a ramified "
                "segment; supply an explicit factorization")
        root = fq.neg(base[0])
        shift = (0,) * h + (root,)
        moved = xp_subst_x_shift(fq, coeffs, shift)
        if window is not None:
            moved = tuple(tuple(c[:window]) for c in moved)
        return _certify(fq, moved, window, work, budget - 1)
    if eprime != 1:
        raise BadFactorization(
            "cannot certify: repeated nonlinear residual on a ramified "
            "segment; supply an explicit factorization")
    # descend to the splitting field of the residual factor
    scaled, swin = _scale_down(fq, coeffs, window, h)
    big = Fq(FqSpec(fq.p, fq.e * b))
    table = embedding(fq, big)
    gb = tuple(tuple(table[d] for d in c) for c in scaled)
    base_big = tuple(table[d] for d in base)
    roots = up_roots(big, base_big)
    if len(roots) != b:
        raise InvariantViolation(
            "descent field does not split the residual factor")
    w2 = swin if swin is not None else work
    if w2 < 4:
        raise PrecisionExhausted("descent window is too small")
    cur = SeriesPoly(big, [TruncatedSeries.from_poly(big, c, w2) for c in gb])
    sub = []
    for idx, w in enumerate(roots):
        gbar = up_pow(big, (big.neg(w), 1), k)
        if idx == len(roots) - 1:
            part = cur
        else:
            hbar, rem = up_divmod(big, cur.reduce_mod_t(), gbar)
            if rem:
                raise InvariantViolation("residual split went inexact")
            part, cur = hensel_split(cur, gbar, hbar, w2)
        digits = tuple(c.coeffs for c in part.coeffs)
        sub.append(_certify(big, digits, w2, w2, budget))
    if len(set(sub)) != 1:
        raise InvariantViolation("conjugate factors disagree")
    e0, r0 = sub[0]
    return (e0, b * r0)


def _scale_down(fq, coeffs, window, h):
    """Coefficients of f(t^h X) / t^(h deg f); requires the polygon to
    lie on or above the slope-h line."""
    if h == 0:
        return coeffs, window
    n = len(coeffs) - 1
    out = []
    for i, c in enumerate(coeffs):
        drop = h * (n - i)
        if any(c[:drop]):
            raise InvariantViolation("slope rescaling hit a nonzero digit")
        out.append(tuple(c[drop:]))
    if window is not None:
        window = window - h * n
        if window < 4:
            raise PrecisionExhausted("rescaled window is too small")
    return tuple(out), window


def certify_factor(fq, f, precision=None, window=None):
    """Certify a monic polynomial irreducible over F_q((t)).

    f is a tuple of coefficient digit tuples; window is the exact digit
    count per coefficient (None for exact polynomial input).  Returns
    (ramification index, residue degree).
    """
    f = _trim_digits(f)
    if window is None:
        res = resultant_exact(fq, f, xp_derivative(fq, f))
        v = tp_val(res)
        budget = (v if v is not None else 0) + 3
        work = precision if precision else 4 * (budget + len(f)) + 12
    else:
        budget = window + 2
        work = min(precision or window, window)
    return _certify(fq, f, window, work, budget)


# ---------------------------------------------------------------------------
# automatic factorization
# ---------------------------------------------------------------------------

def _newton_min_slope(coeffs, v0):
    """(vertex index, vertex valuation) of the right end of the lower
    hull, excluding the terminal point (deg, 0)."""
    n = len(coeffs) - 1
    best_i, best_v = 0, v0
    for i in range(1, n):
        vi = tp_val(coeffs[i]) if coeffs[i] else None
        if vi is None:
            continue
        # smaller slope to (n, 0) wins; on ties take the leftmost point
        if vi * (n - best_i) < best_v * (n - i):
            best_i, best_v = i, vi
    return best_i, best_v


def _auto_pieces(fq, coeffs, window, work, budget):
    coeffs = _trim_digits(coeffs)
    n = len(coeffs) - 1
    if n < 1:
        raise BadFactorization("constant factor")
    if budget < 0:
        raise BadFactorization(
            "automatic factorization did not terminate; "
            "is the input squarefree?")
    if n == 1:
        return [CertifiedFactor(coeffs, window, 1, 1)]
    resid = _mod_t(coeffs)
    parts = up_factor(fq, resid)
    if len(parts) >= 2:
        gbar = up_pow(fq, parts[0][0], parts[0][1])
        hbar, rem = up_divmod(fq, resid, gbar)
        if rem:
            raise InvariantViolation("residual factor split went inexact")
        w2 = window if window is not None else work
        fsp = SeriesPoly(fq, [TruncatedSeries.from_poly(fq, c, w2)
                              for c in coeffs])
        lo, hi = hensel_split(fsp, gbar, hbar, w2)
        out = []
        for part in (lo, hi):
            digits = tuple(c.coeffs for c in part.coeffs)
            out.extend(_auto_pieces(fq, digits, w2, w2, budget))
        return out
    base, k = parts[0]
    if k == 1:
        e, r = _certify(fq, coeffs, window, work, budget)
        return [CertifiedFactor(coeffs, window, e, r)]
    if len(base) == 2 and base[0] != 0:
        # repeated residual root away from the origin: recenter, split,
        # then shift the pieces back
        root = fq.neg(base[0])
        moved = xp_subst_x_shift(fq, coeffs, (root,))
        if window is not None:
            moved = tuple(tuple(c[:window]) for c in moved)
        sub = _auto_pieces(fq, moved, window, work, budget - 1)
        out = []
        for piece in sub:
            back = xp_subst_x_shift(fq, piece.coeffs, (fq.neg(root),))
            if piece.window is not None:
                back = tuple(tuple(c[:piece.window]) for c in back)
            out.append(CertifiedFactor(back, piece.window,
                                       piece.ram_index,
                                       piece.residue_degree))
        return out
    if len(base) > 2:
        # repeated nonlinear residual: certification handles the descent
        e, r = _certify(fq, coeffs, window, work, budget)
        return [CertifiedFactor(coeffs, window, e, r)]
    # residual is X^n: positive slopes only
    v0 = tp_val(coeffs[0]) if coeffs[0] else None
    if v0 is None:
        if window is not None:
            raise PrecisionExhausted(
                "constant coefficient vanishes to working precision")
        rest = _auto_pieces(fq, coeffs[1:], window, work, budget)
        return [CertifiedFactor(((), (1,)), None, 1, 1)] + rest
    if window is not None and v0 >= window:
        raise PrecisionExhausted(
            "Newton polygon reaches below the stored precision")
    vi, vv = _newton_min_slope(coeffs, v0)
    span = n - vi
    if vv % span == 0:
        h = vv // span
        scaled, swin = _scale_down(fq, coeffs, window, h)
        sub = _auto_pieces(fq, scaled, swin, work, budget - 1)
        out = []
        for piece in sub:
            m = piece.degree
            lifted = tuple((0,) * (h * (m - i)) + tuple(c)
                           for i, c in enumerate(piece.coeffs))
            out.append(CertifiedFactor(lifted, piece.window,
                                       piece.ram_index,
                                       piece.residue_degree))
        return out
    if vi == 0:
        e, r = _certify(fq, coeffs, window, work, budget)
        return [CertifiedFactor(coeffs, window, e, r)]
    raise BadFactorization(
        "automatic factorization cannot separate a fractional-slope "
        "segment; supply an explicit factorization")


def auto_factor(fq, f, precision, window=None):
    """Monic squarefree polynomial into certified irreducible factors.

    Returns a canonically ordered tuple of CertifiedFactor.  The product
    of the pieces is checked against f to the working window.
    """
    f = _trim_digits(f)
    if not _is_monic_digits(f):
        raise BadFactorization("f must be monic in X")
    if window is None:
        res = resultant_exact(fq, f, xp_derivative(fq, f))
        v = tp_val(res)
        if v is None:
            raise NotSquarefree("discriminant vanishes")
        budget = v + 3
    else:
        budget = window + 2
    pieces = _auto_pieces(fq, f, window, precision, budget)
    pieces.sort(key=CertifiedFactor.sort_key)
    wmin = min([precision] + [p.window for p in pieces
                              if p.window is not None])
    prod = SeriesPoly(fq, [TruncatedSeries.one(fq, wmin)])
    for p in pieces:
        prod = prod * SeriesPoly(
            fq, [TruncatedSeries.from_poly(fq, c, wmin) for c in p.coeffs])
    for i in range(len(f)):
        want = TruncatedSeries.from_poly(fq, f[i], wmin)
        if not prod.coeffs[i].agrees_with(want):
            raise InvariantViolation("factor product check failed")
    return tuple(pieces)


# ---------------------------------------------------------------------------
# power-basis arithmetic
# ---------------------------------------------------------------------------

def _power_table(fs, count):
    """Coordinate vectors of X^k mod f for k = 0 .. count-1."""
    fq = fs.fq
    n = fs.degree
    w = fs.precision
    neg_f = [ser_neg(fq, fs.coeffs[i].coeffs[:w]) for i in range(n)]
    pw = []
    cur = [(1,) + (0,) * (w - 1) if i == 0 else (0,) * w for i in range(n)]
    for _ in range(count):
        pw.append(tuple(cur))
        lead = cur[n - 1]
        nxt = []
        for i in range(n):
            e = (0,) * w if i == 0 else cur[i - 1]
            if any(lead):
                e = ser_add(fq, e, ser_mul(fq, lead, neg_f[i], w))
            nxt.append(e)
        cur = nxt
    return pw


def _trace_vector(fq, pw, n, count):
    """tau[k] = trace of multiplication by X^k, for k = 0 .. count-1."""
    w = len(pw[0][0])
    out = []
    for k in range(count):
        acc = (0,) * w
        for j in range(n):
            acc = ser_add(fq, acc, pw[k + j][j])
        out.append(acc)
    return out


def _mul_vectors(fq, pw, n, v, w_vec, prec):
    """Product of two coordinate vectors in the power basis."""
    width = min(prec, len(pw[0][0]))
    conv = [(0,) * width for _ in range(2 * n - 1)]
    for i in range(n):
        a = v[i] if i < len(v) else ()
        if not any(a[:width]):
            continue
        for j in range(n):
            b = w_vec[j] if j < len(w_vec) else ()
            if not any(b[:width]):
                continue
            conv[i + j] = ser_add(fq, conv[i + j],
                                  ser_mul(fq, a[:width], b[:width], width))
    out = list(conv[:n]) + [(0,) * width] * max(0, n - len(conv))
    for k in range(n, 2 * n - 1):
        if any(conv[k]):
            for i in range(n):
                out[i] = ser_add(fq, out[i],
                                 ser_mul(fq, conv[k], pw[k][i], width))
    return tuple(out)


def _trace_of(fq, tau, vec, width):
    acc = (0,) * width
    for k in range(len(vec)):
        if any(vec[k][:width]):
            acc = ser_add(fq, acc, ser_mul(fq, vec[k][:width],
                                           tau[k][:width], width))
    return acc


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def _radical_lattice(fq, s_lat, mul, n, w):
    """The radical of t*S inside the order lattice S: the preimage of the
    nilradical of S/tS, located as the kernel of a Frobenius power."""
    cols = s_lat.columns(w)
    scale = s_lat.scale
    q = fq.q
    frob = []
    for j in range(n):
        y = cols[j]
        for _ in range(q - 1):
            y = mul(y, cols[j], w)
        coords = solve_in_basis(s_lat, y, scale * q)
        if coords is None:
            raise InvariantViolation("order lattice not closed under powers")
        frob.append(tuple(c[0] for c in coords))
    m = 1
    while q ** m < n:
        m += 1
    mat = tuple(frob)
    power = mat
    for _ in range(m - 1):
        power = _fq_mat_mul(fq, mat, power, n)
    kernel = _fq_kernel(fq, power, n)
    gens = [tuple((0,) + e[:w - 1] for e in col) for col in cols]
    for lam in kernel:
        vec = [(0,) * w for _ in range(n)]
        for j, c in enumerate(lam):
            if c:
                for i in range(n):
                    vec[i] = ser_add(fq, vec[i],
                                     tuple(fq.mul(c, d) for d in cols[j][i]))
        gens.append(tuple(vec))
    return hnf_from_generators(fq, gens, n, scale=scale, precision=w)


def _normalize(fq, mul, gram_cols, n, w, guard):
    """The maximal order containing the standard order lattice."""
    s_lat = identity_lattice(fq, n)
    for _ in range(guard):
        rad = _radical_lattice(fq, s_lat, mul, n, w)
        power = rad
        for _ in range(n - 1):
            power = product_lattice(power, rad, mul, w)
        if not s_lat.shifted(1).contains_lattice(power):
            raise InvariantViolation(
                "radical power escapes t times the order")
        bigger = colon_lattice(rad, rad, mul, gram_cols, w)
        if not bigger.contains_lattice(s_lat):
            raise InvariantViolation("multiplier ring lost the order")
        if bigger == s_lat:
            if product_lattice(s_lat, s_lat, mul, w) != s_lat:
                raise InvariantViolation(
                    "normalization result is not multiplicatively closed")
            return s_lat
        s_lat = bigger
    raise PrecisionExhausted("normalization did not stabilize")


# ---------------------------------------------------------------------------
# idempotents and the trace twist
# ---------------------------------------------------------------------------

def _unit_vector(n, w):
    return tuple((1,) + (0,) * (w - 1) if i == 0 else (0,) * w
                 for i in range(n))


def _align_vectors(items):
    """Bring (digit vector, scale) pairs to one common scale by padding
    low zero digits; returns the list of digit vectors and the scale."""
    m = min(s for _, s in items)
    out = []
    for d, s in items:
        k = s - m
        out.append(tuple((0,) * k + tuple(e) for e in d))
    return out, m


def _idempotents(fq, mul, pieces, fs, n, w):
    """Primitive idempotents, one per factor, as (digit vector, scale)
    pairs; they live in the maximal order, so the scale may be negative
    even though every idempotent is integral there."""
    if len(pieces) == 1:
        return ((_unit_vector(n, w), 0),)
    series = []
    for p in pieces:
        wp = min(w, p.window) if p.window is not None else w
        series.append(SeriesPoly(
            fq, [TruncatedSeries.from_poly(fq, c, wp) for c in p.coeffs]))
    out = []
    for i, fi in enumerate(series):
        other = None
        for j, gj in enumerate(series):
            if j == i:
                continue
            other = gj if other is None else other * gj
        di = fi.degree
        dg = n - di
        cols = []
        for mdeg in range(di):
            col = [(0,) * w] * mdeg + [c.truncate(w).coeffs
                                       for c in other.coeffs]
            col = (col + [(0,) * w] * n)[:n]
            cols.append(tuple(col))
        for mdeg in range(dg):
            col = [(0,) * w] * mdeg + [c.truncate(w).coeffs
                                       for c in fi.coeffs]
            col = (col + [(0,) * w] * n)[:n]
            cols.append(tuple(col))
        inv_cols, shift = laurent_matrix_inverse(fq, tuple(cols), w)
        sol = inv_cols[0]
        ww = min(len(e) for e in sol)
        if ww + shift < 2:
            raise PrecisionExhausted("idempotent window collapsed")
        bpoly = SeriesPoly(fq, [TruncatedSeries(fq, sol[m][:ww])
                                for m in range(di)])
        prod = bpoly * other.truncate(ww)
        _, rem = prod.divmod_unit_lead(fs.truncate(ww))
        vec = []
        for idx in range(n):
            c = rem.coeffs[idx].coeffs if idx < len(rem.coeffs) else (0,) * ww
            vec.append(tuple(c[:ww]))
        if shift > 0:
            vec = [(0,) * shift + c for c in vec]
            shift = 0
        out.append((tuple(vec), shift))
    # verify: orthogonal, squares to itself, sums to one; products are
    # only trusted to the shortest input window
    for i in range(len(out)):
        di_, si = out[i]
        wv = min(len(e) for e in di_)
        sq = mul(di_, di_, wv)
        cut = -si
        for k in range(n):
            valid = sq[k][:wv]
            if any(valid[:cut]):
                raise InvariantViolation("idempotent square escapes scale")
            a = valid[cut:]
            if a != di_[k][:len(a)]:
                raise InvariantViolation("idempotent fails e*e = e")
        for j in range(i + 1, len(out)):
            wv2 = min(wv, *(len(e) for e in out[j][0]))
            pr = mul(di_, out[j][0], wv2)
            if any(any(e[:wv2]) for e in pr):
                raise InvariantViolation("idempotents are not orthogonal")
    aligned, base = _align_vectors(list(out) + [(_unit_vector(n, w), 0)])
    unit = aligned[-1]
    total = list(aligned[0])
    for vec in aligned[1:-1]:
        total = [ser_add(fq, total[k], vec[k]) for k in range(n)]
    for k in range(n):
        m = min(len(total[k]), len(unit[k]))
        if total[k][:m] != unit[k][:m]:
            raise InvariantViolation("idempotents do not sum to one")
    return tuple(out)


def _mult_matrix(fq, mul, vec, n, w):
    cols = []
    for j in range(n):
        unit = tuple((0,) * w if i != j else (1,) + (0,) * (w - 1)
                     for i in range(n))
        cols.append(mul(vec, unit, w))
    return tuple(cols)


def _component_divides(fq, mul, o_e, idem, y, z, n, w):
    """Inside the component cut out by the idempotent, does y divide z
    within the maximal order?  All three are (digit vector, scale)
    pairs; y and z share a scale, which cancels in the quotient."""
    one = (_unit_vector(n, w), 0)
    (one_d, idem_d, y_d), base = _align_vectors([one, idem, y])
    u = tuple(ser_add(fq, ser_sub(fq, one_d[k], idem_d[k]), y_d[k])
              for k in range(n))
    wu = min(len(e) for e in u)
    u = tuple(e[:wu] for e in u)
    inv_cols, shift = laurent_matrix_inverse(
        fq, _mult_matrix(fq, mul, u, n, wu), wu)
    z_d, z_s = z
    ww = min([len(e) for col in inv_cols for e in col]
             + [len(e) for e in z_d])
    q_scale = z_s - base + shift
    if ww + q_scale < 1:
        raise PrecisionExhausted("division test window collapsed")
    out = []
    for i in range(n):
        acc = (0,) * ww
        for k in range(n):
            if any(z_d[k][:ww]):
                acc = ser_add(fq, acc,
                              ser_mul(fq, z_d[k][:ww],
                                      inv_cols[k][i][:ww], ww))
        out.append(acc)
    return o_e.contains_vector(tuple(out), q_scale)


def _choose_twist(fq, mul, idems, o_e, plain_dual, n, w):
    """A Laurent coordinate vector c with c * O_E equal to the plain
    trace dual of O_E, picked componentwise as a minimal-valuation
    projection of the dual basis; returns (digit vector, scale)."""
    cols = plain_dual.columns(w)
    scale = plain_dual.scale
    chosen = []
    for idem in idems:
        idem_d, idem_s = idem
        wv = min(w, *(len(e) for e in idem_d))
        cands = []
        for col in cols:
            y = tuple(e[:wv] for e in mul(idem_d, col, wv))
            if any(any(e) for e in y):
                cands.append((y, idem_s + scale))
        if not cands:
            raise InvariantViolation("dual lattice misses a component")
        best = cands[0]
        for z in cands[1:]:
            if not _component_divides(fq, mul, o_e, idem, best, z, n, w):
                if _component_divides(fq, mul, o_e, idem, z, best, n, w):
                    best = z
                else:
                    raise PrecisionExhausted(
                        "incomparable valuations in the twist search")
        for z in cands:
            if not _component_divides(fq, mul, o_e, idem, best, z, n, w):
                raise PrecisionExhausted(
                    "twist search failed the verification pass")
        chosen.append(best)
    aligned, base = _align_vectors(chosen)
    total = list(aligned[0])
    for vec in aligned[1:]:
        total = [ser_add(fq, total[k], vec[k]) for k in range(n)]
    wt = min(len(e) for e in total)
    twist = tuple(tuple(e[:wt]) for e in total)
    check = element_scaled_lattice(twist, base, o_e, mul, wt)
    if check != plain_dual:
        raise InvariantViolation(
            "chosen twist does not generate the dual module")
    return twist, base


def _modified_gram(fq, tau, twist, scale, n, w):
    """Columns of the Gram matrix of the twisted trace pairing on the
    power basis; entries are integral whenever R is inside its dual."""
    width = min([w] + [len(e) for e in twist])
    cols = []
    cut = max(0, -scale)
    for j in range(n):
        col = []
        for i in range(n):
            acc = (0,) * width
            for k in range(n):
                if any(twist[k][:width]):
                    acc = ser_add(fq, acc,
                                  ser_mul(fq, twist[k][:width],
                                          tau[k + i + j][:width], width))
            if cut:
                if any(acc[:cut]):
                    raise InvariantViolation(
                        "twisted pairing is not integral on the order")
                acc = acc[cut:]
            elif scale > 0:
                acc = (0,) * scale + acc[:width - scale]
            col.append(tuple(acc))
        cols.append(tuple(col))
    return tuple(cols)


# ---------------------------------------------------------------------------
# order data
# ---------------------------------------------------------------------------

class FactorData:
    """Residue and ramification data of one irreducible factor.

    d is the residue degree of the factor's order at its maximal ideal,
    r the residue extension on top of it, n = d*r the residue degree of
    the field factor, e its ramification index, and delta the length of
    the normalization quotient as a module over the factor's order.
    """

    __slots__ = ("coeffs", "window", "d", "r", "n", "e", "delta")

    def __init__(self, coeffs, window, d, r, n, e, delta):
        self.coeffs = coeffs
        self.window = window
        self.d = d
        self.r = r
        self.n = n
        self.e = e
        self.delta = delta
        if d * r != n or n * e != len(coeffs) - 1 or delta < 0:
            raise InvariantViolation("inconsistent factor data")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def summary(self):
        return {"degree": self.degree, "d": self.d, "r": self.r,
                "n": self.n, "e": self.e, "delta": self.delta}

    def __repr__(self):
        return (f"FactorData(degree={self.degree}, d={self.d}, r={self.r}, "
                f"e={self.e}, delta={self.delta})")


class OrderData:
    """Everything about one order R = O[X]/(f), immutable after build."""

    __slots__ = ("fq", "f", "f_window", "n", "precision", "build_precision",
                 "valres", "delta", "rho", "factors", "r_lattice",
                 "o_e_lattice", "dual_r_lattice", "conductor_lattice",
                 "c_inv", "c_inv_scale", "idempotents", "action_matrices",
                 "trace_gram_columns", "plain_gram_columns", "j_max", "_pw",
                 "_tau")

    def __init__(self, **kw):
        for name in self.__slots__:
            object.__setattr__(self, name, kw[name])

    def __setattr__(self, name, value):
        raise AttributeError("OrderData is immutable")

    def multiply_vectors(self, v, w_vec, prec):
        return _mul_vectors(self.fq, self._pw, self.n, v, w_vec, prec)

    def trace_of(self, vec, prec=None):
        width = min(prec or self.precision, self.precision)
        return _trace_of(self.fq, self._tau, vec, width)

    def twisted_dual_lattice(self, lattice, unit_vec):
        """Dual of a lattice under the pairing twisted by unit_vec times
        the stored twist; unit choices change the dual by a unit multiple
        and leave every colength count unchanged."""
        w = self.build_precision
        unit = tuple(tuple(e[:w]) + (0,) * max(0, w - len(e))
                     for e in unit_vec)
        twisted = self.multiply_vectors(unit, self.c_inv, w)
        cols = _modified_gram(self.fq, self._tau, twisted,
                              self.c_inv_scale, self.n, w)
        wg = min(len(e) for col in cols for e in col)
        return trace_dual_lattice(lattice, cols, wg)

    def signature(self):
        return (self.delta, self.rho, self.valres,
                tuple((fd.d, fd.r, fd.n, fd.e, fd.delta)
                      for fd in self.factors),
                self.o_e_lattice.key, self.dual_r_lattice.key,
                self.conductor_lattice.key)

    def __repr__(self):
        return (f"OrderData(n={self.n}, delta={self.delta}, "
                f"rho={self.rho}, factors={len(self.factors)})")


def _sub_colength(fq, piece, w, guard):
    """Colength of the factor's own order in its normalization."""
    wp = min(w, piece.window) if piece.window is not None else w
    fs = SeriesPoly(fq, [TruncatedSeries.from_poly(fq, c, wp)
                         for c in piece.coeffs])
    deg = fs.degree
    pw = _power_table(fs, 3 * deg - 2 if deg > 1 else 1)
    tau = _trace_vector(fq, pw, deg, 2 * deg - 1)
    tcols = tuple(tuple(tau[i + j] for i in range(deg)) for j in range(deg))

    def mul(v, z, prec):
        return _mul_vectors(fq, pw, deg, v, z, prec)

    o_e = _normalize(fq, mul, tcols, deg, wp, guard)
    return relative_length(o_e, identity_lattice(fq, deg))


def _pair_resultant_val(fq, a, b, w):
    """Valuation of the resultant of two factors, exact when both are."""
    if a.window is None and b.window is None:
        v = tp_val(resultant_exact(fq, a.coeffs, b.coeffs))
        if v is None:
            raise NotSquarefree("two factors share a root")
        return v
    wmin = min(w, *(p.window for p in (a, b) if p.window is not None))
    fa = SeriesPoly(fq, [TruncatedSeries.from_poly(fq, c, wmin)
                         for c in a.coeffs])
    fb = SeriesPoly(fq, [TruncatedSeries.from_poly(fq, c, wmin)
                         for c in b.coeffs])
    val = resultant_series(fa, fb).valuation()
    if val is None:
        raise PrecisionExhausted(
            "pairwise resultant vanishes to working precision")
    return val


def _assemble(fq, fdigits, fwindow, pieces, w, valres):
    n = len(fdigits) - 1
    weff = min(w, fwindow) if fwindow is not None else w
    fs = SeriesPoly(fq, [TruncatedSeries.from_poly(fq, c, weff)
                         for c in fdigits])
    pw = _power_table(fs, max(n + 1, 4 * n - 3))
    tau = _trace_vector(fq, pw, n, 3 * n - 2)
    tcols = tuple(tuple(tau[i + j] for i in range(n)) for j in range(n))

    def mul(v, z, prec):
        return _mul_vectors(fq, pw, n, v, z, prec)

    guard = valres + 3
    r_lat = identity_lattice(fq, n)
    o_e = _normalize(fq, mul, tcols, n, weff, guard)
    delta = relative_length(o_e, r_lat)

    factor_data = []
    sub_total = 0
    for piece in pieces:
        parts = up_factor(fq, _mod_t(piece.coeffs))
        if len(parts) != 1:
            raise InvariantViolation(
                "certified factor has a split residue ring")
        d = len(parts[0][0]) - 1
        if len(pieces) == 1:
            ell = delta
        else:
            ell = _sub_colength(fq, piece, weff, guard)
        if piece.residue_degree % d or ell % d:
            raise InvariantViolation("residue degree does not divide")
        factor_data.append(FactorData(
            piece.coeffs, piece.window, d, piece.residue_degree // d,
            piece.residue_degree, piece.ram_index, ell // d))
        sub_total += ell

    rho = 0
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            rho += _pair_resultant_val(fq, pieces[i], pieces[j], weff)
    if delta != rho + sub_total:
        raise InvariantViolation(
            "colength of the normalization disagrees with the "
            "resultant decomposition")

    idems = _idempotents(fq, mul, pieces, fs, n, weff)
    plain_dual = trace_dual_lattice(o_e, tcols, weff)
    twist, tw_scale = _choose_twist(fq, mul, idems, o_e, plain_dual, n, weff)
    gcols = _modified_gram(fq, tau, twist, tw_scale, n, weff)
    wg = min(len(e) for col in gcols for e in col)

    if trace_dual_lattice(o_e, gcols, wg) != o_e:
        raise InvariantViolation(
            "maximal order is not self-dual under the twisted pairing")
    dual_r = trace_dual_lattice(r_lat, gcols, wg)
    if relative_length(dual_r, r_lat) != 2 * delta:
        raise InvariantViolation("dual colength is not twice delta")
    if relative_length(dual_r, o_e) != delta:
        raise InvariantViolation("normalization is not midway to the dual")
    if trace_dual_lattice(dual_r, gcols, wg) != r_lat:
        raise InvariantViolation("duality failed to be an involution")

    conductor = colon_lattice(r_lat, o_e, mul, gcols, wg)
    if not r_lat.contains_lattice(conductor):
        raise InvariantViolation("conductor escapes the order")
    if product_lattice(conductor, o_e, mul, wg) != conductor:
        raise InvariantViolation("conductor is not a module over the "
                                 "maximal order")
    probe = product_lattice(conductor.shifted(-1), o_e, mul, wg)
    if r_lat.contains_lattice(probe):
        raise InvariantViolation("conductor is not maximal")

    action = []
    for j in range(n):
        if j < n - 1:
            col = tuple((0,) * weff if i != j + 1
                        else (1,) + (0,) * (weff - 1) for i in range(n))
        else:
            col = pw[n]
        action.append(col)

    j_max = 2 * delta + sum(fd.n for fd in factor_data) + 2
    return OrderData(
        fq=fq, f=fdigits, f_window=fwindow, n=n, precision=wg,
        build_precision=weff, valres=valres, delta=delta, rho=rho,
        factors=tuple(factor_data), r_lattice=r_lat, o_e_lattice=o_e,
        dual_r_lattice=dual_r, conductor_lattice=conductor, c_inv=twist,
        c_inv_scale=tw_scale, idempotents=idems,
        action_matrices=(tuple(action),), trace_gram_columns=gcols,
        plain_gram_columns=tcols, j_max=j_max, _pw=pw, _tau=tau)


def build_order(fq, f, factors=None, precision=None, verify_stability=True,
                f_window=None):
    """Build the full order data for a monic squarefree f.

    f and the optional factors are tuples of F_q[t] coefficient tuples
    (exact polynomials); f_window marks f as a truncated series with
    that many exact digits per coefficient, in which case factors must
    be omitted and are found automatically.
    """
    f = _trim_digits(f)
    if not _is_monic_digits(f):
        raise BadFactorization("f must be monic in X")
    n = len(f) - 1
    if n < 1:
        raise BadFactorization("f must have positive degree")
    if f_window is None:
        res = resultant_exact(fq, f, xp_derivative(fq, f))
        valres = tp_val(res)
        if valres is None:
            raise NotSquarefree(
                "f and its derivative share a root; the orbit is not "
                "regular semisimple")
    else:
        if factors is not None:
            raise PreconditionViolated(
                "explicit factors need an exact polynomial f")
        wser = SeriesPoly(fq, [TruncatedSeries.from_poly(fq, c, f_window)
                               for c in f])
        valres = resultant_series(wser, wser.derivative()).valuation()
        if valres is None:
            raise NotSquarefree("discriminant vanishes to precision")

    maxdeg = max(len(c) for c in f)
    if precision is not None:
        w = precision
        if f_window is None and w < maxdeg + 2:
            raise PrecisionExhausted(
                "working precision is below the coefficient degrees of f")
    else:
        w = 6 * valres + 4 * n + 16 + maxdeg
    if w < 6:
        raise PrecisionExhausted("working precision is too small")

    if factors is None:
        pieces = auto_factor(fq, f, w, window=f_window)
    else:
        supplied = [_trim_digits(g) for g in factors]
        for g in supplied:
            if not _is_monic_digits(g):
                raise BadFactorization("every factor must be monic in X")
        prod = ((1,),)
        for g in supplied:
            prod = xp_mul(fq, prod, g)
        if xp_trim(prod) != xp_trim(f):
            raise BadFactorization("product of factors does not equal f")
        pieces = []
        for g in supplied:
            e, r = certify_factor(fq, g, precision=w)
            pieces.append(CertifiedFactor(g, None, e, r))
        pieces.sort(key=CertifiedFactor.sort_key)
        pieces = tuple(pieces)

    order = _assemble(fq, f, f_window, pieces, w, valres)
    if verify_stability:
        again = _assemble(fq, f, f_window, pieces, w + 2, valres)
        if order.signature() != again.signature():
            raise PrecisionExhausted(
                "invariants changed when recomputed at higher precision")
    return order


def base_change_order(order, d, precision=None, verify_stability=True):
    """The same polynomial viewed over the unramified extension of
    degree d, refactored and rebuilt there."""
    if d == 1:
        return order
    fq = order.fq
    big = Fq(FqSpec(fq.p, fq.e * d))
    table = embedding(fq, big)
    f_big = tuple(tuple(table[c] for c in coeff) for coeff in order.f)
    return build_order(big, f_big, None, precision=precision,
                       verify_stability=verify_stability,
                       f_window=order.f_window)


# ---------------------------------------------------------------------------
# the lines family (the one non-monogenic order supported)
# ---------------------------------------------------------------------------

class NLinesOrder:
    """The order of n coordinate lines glued at one point: vectors in
    O^n whose coordinates all agree modulo t, inside split E = F^n."""

    __slots__ = ("fq", "n", "precision", "delta", "j_max", "r_lattice",
                 "o_e_lattice", "dual_r_lattice", "conductor_lattice",
                 "action_matrices", "trace_gram_columns")

    def __init__(self, fq, n, precision=None):
        if n < 1:
            raise PreconditionViolated("need at least one line")
        self.fq = fq
        self.n = n
        delta = n - 1
        w = precision if precision is not None else 2 * delta + n + 12
        self.precision = w
        self.delta = delta
        self.j_max = 2 * delta + n + 2
        self.o_e_lattice = identity_lattice(fq, n)
        self.conductor_lattice = (identity_lattice(fq, n, scale=1)
                                  if n > 1 else identity_lattice(fq, n))
        gens = [tuple((1,) + (0,) * (w - 1) for _ in range(n))]
        for i in range(n):
            gens.append(tuple((0, 1) + (0,) * (w - 2) if k == i
                              else (0,) * w for k in range(n)))
        self.r_lattice = hnf_from_generators(fq, gens, n, precision=w)
        if self.r_lattice.colength() != delta:
            raise InvariantViolation("lines lattice has the wrong index")
        mats = []
        for i in range(n):
            cols = []
            for j in range(n):
                cols.append(tuple((0, 1) + (0,) * (w - 2)
                                  if (k == i and j == i) else (0,) * w
                                  for k in range(n)))
            mats.append(tuple(cols))
        self.action_matrices = tuple(mats)
        eye = identity_lattice(fq, n).columns(w)
        self.trace_gram_columns = tuple(eye)
        self.dual_r_lattice = trace_dual_lattice(
            self.r_lattice, self.trace_gram_columns, w)
        if relative_length(self.dual_r_lattice, self.r_lattice) != 2 * delta:
            raise InvariantViolation("lines dual has the wrong colength")

    def multiply_vectors(self, v, w_vec, prec):
        fq = self.fq
        return tuple(ser_mul(fq, v[i], w_vec[i], prec)
                     for i in range(self.n))

    def __repr__(self):
        return f"NLinesOrder(n={self.n}, q={self.fq.q})"


def n_lines_order(fq, n, precision=None):
    return NLinesOrder(fq, n, precision)
