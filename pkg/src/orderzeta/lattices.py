"""Lattice calculus over F_q[[t]] in a fixed ambient coordinate frame.

A full-rank lattice is stored in canonical Hermite form: an upper
triangular basis matrix whose diagonal entries are the exact monomials
t^(a_1), ..., t^(a_n), whose entry (i, j) for i < j is a polynomial
reduced modulo t^(a_i), together with a global integer power of t (the
scale) chosen so that the matrix is primitive (some entry has a unit
coefficient, or a diagonal exponent is zero).  Equal lattices have
identical stored data, so canonical forms can be hashed and compared.

Coefficient arithmetic in F_q[t] is carry free, so working at a finite
window of t-digits computes every digit inside the window exactly; the
window sizes below are chosen so that all stored digits and all
branching decisions fall inside it whenever the inputs are exact.
Inputs of limited precision (duals and other series-derived lattices)
instead carry a validity budget, and PrecisionExhausted is raised when
a decision would depend on unknown digits.

The enumerator for stable sublattices descends colength by colength:
every maximal stable sublattice of M contains tM (the quotient is a
simple module, killed by t), so the immediate children of M are the
preimages of the proper subspaces of M/tM stable under the induced
action, and every stable sublattice of finite colength is reached by a
chain of such steps.  Candidates found along different chains merge by
canonical form.  The deterministic order of each level is: diagonal
shape compared colexicographically, then off-diagonal digits read
column by column as one little-endian number.
"""

from __future__ import annotations

import os
from itertools import combinations

from .errors import (CeilingExceeded, InvariantViolation, PrecisionExhausted,
                     RankDeficient)
from .series import (LaurentSeries, ser_add, ser_mul, ser_scale, ser_sub,
                     ser_unit_inv, ser_val)

DEFAULT_CEILING = 10 ** 8


def enumeration_ceiling(override=None):
    """Work-unit guard for the enumerators.  An explicit argument wins,
    then the ORDER_ZETA_CEILING environment variable, then the default."""
    if override is not None:
        return override
    env = os.environ.get("ORDER_ZETA_CEILING")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_CEILING


class LatticeHNF:
    """Canonical Hermite form of a full lattice; see the module docstring."""

    __slots__ = ("fq", "n", "scale", "diag", "off")

    def __init__(self, fq, scale, diag, off):
        self.fq = fq
        self.n = len(diag)
        self.scale = scale
        self.diag = tuple(diag)
        # off[j][i]: little-endian digits, exactly diag[i] of them, of the
        # entry in row i of column j (for i < j)
        self.off = tuple(tuple(tuple(e) for e in col) for col in off)

    @property
    def key(self):
        return (self.scale, self.diag, self.off)

    def colength(self):
        """Index in the standard lattice O^n (negative for overlattices)."""
        return sum(self.diag) + self.n * self.scale

    def max_exponent(self):
        return max(self.diag) if self.diag else 0

    def shifted(self, k):
        """The lattice multiplied by t^k."""
        return LatticeHNF(self.fq, self.scale + k, self.diag, self.off)

    def columns(self, precision):
        """Basis columns as raw coefficient tuples at the stated window.
        The scale is NOT applied; callers track it separately."""
        cols = []
        for j in range(self.n):
            col = []
            for i in range(self.n):
                if i == j:
                    c = [0] * precision
                    if self.diag[j] < precision:
                        c[self.diag[j]] = 1
                    col.append(tuple(c))
                elif i < j:
                    digits = self.off[j][i]
                    col.append(tuple(digits[:precision]) +
                               (0,) * max(0, precision - len(digits)))
                else:
                    col.append((0,) * precision)
            cols.append(tuple(col))
        return cols

    def sort_key(self):
        q = self.fq.q
        num = 0
        power = 1
        for j in range(self.n):
            for i in range(j):
                for d in self.off[j][i]:
                    num += d * power
                    power *= q
        return (self.scale, tuple(reversed(self.diag)), num)

    def contains_vector(self, vec, vec_scale=0):
        """Membership test for a vector with exact polynomial entries."""
        shift = vec_scale - self.scale
        maxdeg = max((len(e) for e in vec), default=0)
        need = maxdeg + sum(self.diag) + abs(shift) + 2
        v = [tuple(e[:need]) + (0,) * max(0, need - len(e)) for e in vec]
        if shift > 0:
            v = [(0,) * shift + e[:need - shift] for e in v]
        elif shift < 0:
            k = -shift
            for e in v:
                if any(e[:k]):
                    return False
            v = [e[k:] + (0,) * k for e in v]
        cols = self.columns(need)
        fq = self.fq
        for i in range(self.n - 1, -1, -1):
            a = self.diag[i]
            e = v[i]
            if any(e[:a]):
                return False
            quo = e[a:] + (0,) * a
            if any(quo):
                col = cols[i]
                for k in range(i):
                    v[k] = ser_sub(fq, v[k], ser_mul(fq, quo, col[k]))
            v[i] = (0,) * need
        return True

    def contains_lattice(self, other):
        cols = other.columns(other.max_exponent() + 1)
        return all(self.contains_vector(c, other.scale) for c in cols)

    def __eq__(self, other):
        return (isinstance(other, LatticeHNF) and self.fq is other.fq
                and self.key == other.key)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return (f"LatticeHNF(scale={self.scale}, diag={self.diag}, "
                f"off={self.off})")


def identity_lattice(fq, n, scale=0):
    off = tuple(tuple(() for _ in range(j)) for j in range(n))
    return LatticeHNF(fq, scale, (0,) * n, off)


def _canonical_scale_shift(diag, off):
    """How many powers of t divide every entry of the triangular matrix."""
    shift = min(diag) if diag else 0
    for col in off:
        if shift == 0:
            break
        for digits in col:
            v = ser_val(digits)
            if v is not None and v < shift:
                shift = v
                if shift == 0:
                    break
    return shift


def _build_canonical(fq, scale, diag, off):
    shift = _canonical_scale_shift(diag, off)
    if shift:
        diag = tuple(a - shift for a in diag)
        off = tuple(tuple(digits[shift:] for digits in col) for col in off)
        scale += shift
    return LatticeHNF(fq, scale, diag, off)


# ---------------------------------------------------------------------------
# construction from generators
# ---------------------------------------------------------------------------

def hnf_from_generators(fq, vectors, n, scale=0, precision=None, exact=False):
    """Canonical Hermite form of the span of the given column vectors.

    Vectors are tuples of raw coefficient tuples.  With exact=True the
    entries are taken as exact polynomials and the working window grows
    so no decision can be precision limited; otherwise the given window
    bounds what is known and PrecisionExhausted is raised when a pivot
    or a reduction cannot be certified.
    """
    vecs = []
    for v in vectors:
        entries = [tuple(e) for e in v]
        if any(any(e) for e in entries):
            vecs.append(entries)
    if len(vecs) < n:
        raise RankDeficient(
            f"need {n} independent generators, got {len(vecs)} nonzero")
    if exact:
        maxdeg = max(len(e) for v in vecs for e in v)
        window = (n + 1) * maxdeg + 4
    else:
        window = min(min(len(e) for e in v) for v in vecs)
        if precision is not None:
            window = min(window, precision)
        if window < 1:
            raise PrecisionExhausted("no working precision at all")
    work = []
    for v in vecs:
        work.append([tuple(e[:window]) + (0,) * max(0, window - len(e))
                     for e in v])
    valid = [window] * len(work)

    pivots = [None] * n
    pivot_valid = [0] * n
    for row in range(n - 1, -1, -1):
        best = None
        for idx in range(len(work)):
            v = ser_val(work[idx][row][:valid[idx]])
            if v is not None and (best is None or v < best[0]):
                best = (v, idx)
        if best is None:
            if exact:
                raise RankDeficient(f"generators do not span row {row}")
            raise PrecisionExhausted(
                f"no certifiable pivot in row {row}; raise the precision")
        a, idx = best
        piv = work.pop(idx)
        pval = valid.pop(idx) - a
        unit = piv[row][a:] + (0,) * a
        uinv = ser_unit_inv(fq, unit)
        piv = [ser_mul(fq, e, uinv) for e in piv]
        for pos in range(len(work)):
            v = work[pos]
            e = v[row]
            if any(e[:valid[pos]]):
                quo = e[a:] + (0,) * a
                for k in range(row):
                    v[k] = ser_sub(fq, v[k], ser_mul(fq, quo, piv[k]))
                valid[pos] = min(valid[pos] - a, pval)
                if valid[pos] < 1 and not exact:
                    raise PrecisionExhausted(
                        "elimination consumed the precision")
            v[row] = (0,) * window
        pivots[row] = piv
        pivot_valid[row] = pval

    diag = [ser_val(pivots[i][i]) for i in range(n)]

    # reduce off-diagonal entries against lower pivot rows
    for j in range(n):
        col = pivots[j]
        cval = pivot_valid[j]
        for i in range(j - 1, -1, -1):
            a = diag[i]
            e = col[i]
            hi = e[a:] + (0,) * a
            if any(hi[:max(0, cval - a)]):
                for k in range(i + 1):
                    col[k] = ser_sub(fq, col[k],
                                     ser_mul(fq, hi, pivots[i][k]))
                cval = min(cval, a + pivot_valid[i])
        pivot_valid[j] = cval
        needed = max([diag[i] for i in range(j)] + [1])
        if cval < needed and not exact:
            raise PrecisionExhausted("reduction consumed the precision")

    off = []
    for j in range(n):
        entries = []
        for i in range(j):
            entries.append(tuple(pivots[j][i][:diag[i]]))
        off.append(tuple(entries))
    return _build_canonical(fq, scale, tuple(diag), tuple(off))


def relative_length(m1, m2):
    """[M1 : M2]: positive when M2 is (relatively) smaller than M1."""
    return m2.colength() - m1.colength()


def solve_in_basis(base, vec, vec_scale=0):
    """Coordinates of a polynomial vector in the basis of `base`, or None
    when the vector is not in the lattice.  The coordinates are for the
    integral part (the base scale is already accounted for)."""
    fq = base.fq
    n = base.n
    shift = vec_scale - base.scale
    maxdeg = max((len(e) for e in vec), default=0)
    need = maxdeg + sum(base.diag) + abs(shift) + 2
    v = [tuple(e[:need]) + (0,) * max(0, need - len(e)) for e in vec]
    if shift > 0:
        v = [(0,) * shift + e[:need - shift] for e in v]
    elif shift < 0:
        k = -shift
        for e in v:
            if any(e[:k]):
                return None
        v = [e[k:] + (0,) * k for e in v]
    cols = base.columns(need)
    y = [None] * n
    for i in range(n - 1, -1, -1):
        a = base.diag[i]
        e = v[i]
        if any(e[:a]):
            return None
        quo = e[a:] + (0,) * a
        y[i] = quo
        if any(quo):
            col = cols[i]
            for k in range(i):
                v[k] = ser_sub(fq, v[k], ser_mul(fq, quo, col[k]))
        v[i] = (0,) * need
    return tuple(y)


def relative_to(base, other):
    """Canonical form of `other` written in the basis coordinates of
    `base` (the identity lattice then stands for `base` itself)."""
    prec = other.max_exponent() + 1
    cols = other.columns(prec)
    solved = []
    for c in cols:
        y = solve_in_basis(base, c, other.scale)
        if y is None:
            raise ValueError("lattice is not contained in the base lattice")
        solved.append(y)
    return hnf_from_generators(base.fq, solved, base.n, exact=True)


def compose_lattice(base, rel):
    """The lattice whose coordinates relative to `base` are `rel`."""
    fq = base.fq
    n = base.n
    window = (base.max_exponent() + rel.max_exponent()
              + sum(base.diag) + sum(rel.diag) + 4)
    bcols = base.columns(window)
    ccols = []
    diag = []
    for j in range(n):
        acc = [(0,) * window for _ in range(n)]
        rcol_entries = []
        e = [0] * window
        if rel.diag[j] < window:
            e[rel.diag[j]] = 1
        rcol_entries.append((j, tuple(e)))
        for i in range(j):
            digits = rel.off[j][i]
            if any(digits):
                rcol_entries.append(
                    (i, tuple(digits) + (0,) * (window - len(digits))))
        for i, entry in rcol_entries:
            src = bcols[i]
            for k in range(i + 1):
                acc[k] = ser_add(fq, acc[k], ser_mul(fq, entry, src[k]))
        ccols.append(acc)
        diag.append(base.diag[j] + rel.diag[j])
    _reduce_upper(fq, ccols, diag)
    off = []
    for j in range(n):
        off.append(tuple(tuple(ccols[j][i][:diag[i]]) for i in range(j)))
    return _build_canonical(fq, base.scale + rel.scale, tuple(diag),
                            tuple(off))


def _reduce_upper(fq, cols, diag):
    """In-place off-diagonal reduction of an upper triangular basis whose
    diagonal entries are the exact monomials t^diag[i]."""
    n = len(cols)
    for j in range(n):
        col = cols[j]
        for i in range(j - 1, -1, -1):
            a = diag[i]
            e = col[i]
            hi = e[a:] + (0,) * a
            if any(hi):
                src = cols[i]
                for k in range(i + 1):
                    col[k] = ser_sub(fq, col[k], ser_mul(fq, hi, src[k]))


# ---------------------------------------------------------------------------
# matrix helpers (matrices are tuples of columns of raw coefficient tuples)
# ---------------------------------------------------------------------------

def mat_vec(fq, cols, vec, precision):
    out = [(0,) * precision for _ in range(len(cols[0]))]
    for j, x in enumerate(vec):
        if not any(x):
            continue
        col = cols[j]
        for i in range(len(col)):
            if any(col[i]):
                out[i] = ser_add(fq, out[i], ser_mul(fq, x, col[i], precision))
    return tuple(out)


def mat_mul(fq, a_cols, b_cols, precision):
    return tuple(mat_vec(fq, a_cols, b, precision) for b in b_cols)


def laurent_matrix_inverse(fq, cols, precision):
    """Inverse of a square matrix of raw series columns.

    Returns (inv_cols, shift): the true inverse is t^shift times the
    returned integral columns at their stored window.

    Common t powers are factored out of every column and row first;
    keeping the Gaussian pivots near valuation zero preserves the
    working window when the matrix has large elementary divisors.
    """
    n = len(cols)
    col_v = []
    red = []
    for j in range(n):
        vs = [v for v in (ser_val(e) for e in cols[j]) if v is not None]
        v = min(vs) if vs else 0
        col_v.append(v)
        red.append([e[v:] for e in cols[j]])
    row_v = []
    for i in range(n):
        vs = [v for v in (ser_val(red[j][i]) for j in range(n))
              if v is not None]
        row_v.append(min(vs) if vs else 0)
    grid = [[LaurentSeries(fq, 0, red[j][i][row_v[i]:]) for j in range(n)]
            for i in range(n)]
    inv = [[LaurentSeries.one(fq, precision) if i == j
            else LaurentSeries.zero(fq, precision) for j in range(n)]
           for i in range(n)]
    for k in range(n):
        best = None
        for i in range(k, n):
            v = grid[i][k].valuation()
            if v is not None and (best is None or v < best[0]):
                best = (v, i)
        if best is None:
            raise PrecisionExhausted(
                "matrix pivot is zero to working precision")
        _, piv = best
        if piv != k:
            grid[k], grid[piv] = grid[piv], grid[k]
            inv[k], inv[piv] = inv[piv], inv[k]
        pinv = grid[k][k].inverse()
        grid[k] = [e * pinv for e in grid[k]]
        inv[k] = [e * pinv for e in inv[k]]
        for i in range(n):
            if i == k:
                continue
            f = grid[i][k]
            if f.is_zero():
                continue
            grid[i] = [grid[i][j] - f * grid[k][j] for j in range(n)]
            inv[i] = [inv[i][j] - f * inv[k][j] for j in range(n)]
    # undo the row and column scalings: with M = Dr M' Dc we have
    # M^-1[i][j] = t^(-col_v[i] - row_v[j]) M'^-1[i][j]
    for i in range(n):
        for j in range(n):
            inv[i][j] = inv[i][j].shifted(-col_v[i] - row_v[j])
    shift = 0
    for i in range(n):
        for j in range(n):
            e = inv[i][j].normalized()
            inv[i][j] = e
            v = e.valuation()
            if v is not None:
                shift = min(shift, v)
    out_prec = min(e.abs_prec for row in inv for e in row) - shift
    if out_prec < 1:
        raise PrecisionExhausted("matrix inverse lost all precision")
    out_cols = []
    for j in range(n):
        col = []
        for i in range(n):
            col.append(inv[i][j].shifted(-shift).to_truncated(out_prec).coeffs)
        out_cols.append(tuple(col))
    return tuple(out_cols), shift


# ---------------------------------------------------------------------------
# products, duals, colon lattices
# ---------------------------------------------------------------------------

def element_scaled_lattice(x, x_scale, h, mul, precision):
    """The lattice x * H for an ambient algebra element x given by its
    integral coordinate vector and a t-power scale."""
    cols = h.columns(precision)
    gens = [mul(x, c, precision) for c in cols]
    return hnf_from_generators(h.fq, gens, h.n, scale=h.scale + x_scale,
                               precision=precision)


def product_lattice(h1, h2, mul, precision):
    """Lattice generated by all pairwise products of basis vectors; mul is
    the bilinear coordinate multiplication of the ambient algebra."""
    c1 = h1.columns(precision)
    c2 = h2.columns(precision)
    gens = [mul(v, w, precision) for v in c1 for w in c2]
    return hnf_from_generators(h1.fq, gens, h1.n,
                               scale=h1.scale + h2.scale,
                               precision=precision)


def trace_dual_lattice(h, gram_cols, precision):
    """Dual with respect to the pairing whose Gram matrix (on the ambient
    basis) has the given columns: {y : <y, M> integral}."""
    fq = h.fq
    n = h.n
    cols = h.columns(precision)
    prod = mat_mul(fq, gram_cols, cols, precision)       # T * C
    # the dual basis matrix is the transpose of (T C)^{-1}: T is
    # symmetric and the dual of t^s C O^n is t^{-s} (C^T T)^{-1} O^n
    inv_cols, shift = laurent_matrix_inverse(fq, prod, precision)
    tcols = [tuple(inv_cols[i][j] for i in range(n)) for j in range(n)]
    prec = min(len(e) for col in tcols for e in col)
    return hnf_from_generators(fq, tcols, n, scale=-h.scale + shift,
                               precision=prec)


def colon_lattice(a, b, mul, gram_cols, precision):
    """(A : B) = {x in the ambient algebra : x*B inside A}."""
    da = trace_dual_lattice(a, gram_cols, precision)
    prod = product_lattice(b, da, mul, precision)
    return trace_dual_lattice(prod, gram_cols, precision)


# ---------------------------------------------------------------------------
# stable subspaces of the mod-t fiber
# ---------------------------------------------------------------------------

def _matvec_fq(fq, rows, v):
    out = []
    add = fq._add
    mul = fq._mul
    for row in rows:
        acc = 0
        for c, x in zip(row, v):
            if c and x:
                acc = add[acc][mul[c][x]]
        out.append(acc)
    return out


def _subspace_is_stable(fq, mats_rows, basis, pivot_rows):
    sub = fq._sub
    mul = fq._mul
    for rows in mats_rows:
        for v in basis:
            w = _matvec_fq(fq, rows, v)
            for bk, rk in zip(basis, pivot_rows):
                c = w[rk]
                if c:
                    row = mul[c]
                    for i in range(rk + 1):
                        if bk[i]:
                            w[i] = sub[w[i]][row[bk[i]]]
                    w[rk] = 0
            if any(w):
                return False
    return True


def stable_subspaces_mod_t(fq, mats_rows, n, dim):
    """All dimension-`dim` subspaces of F_q^n stable under every matrix
    (given as row tuples), as (pivot_rows, basis) pairs in bottom-pivot
    reduced echelon form, in a fixed deterministic order."""
    q = fq.q
    out = []
    for pivot_rows in combinations(range(n), dim):
        free_pos = []
        for k, rk in enumerate(pivot_rows):
            for i in range(rk):
                if i not in pivot_rows:
                    free_pos.append((k, i))
        for counter in range(q ** len(free_pos)):
            basis = [[0] * n for _ in range(dim)]
            for k, rk in enumerate(pivot_rows):
                basis[k][rk] = 1
            c = counter
            for (k, i) in free_pos:
                basis[k][i] = c % q
                c //= q
            if _subspace_is_stable(fq, mats_rows, basis, pivot_rows):
                out.append((pivot_rows, tuple(tuple(b) for b in basis)))
    return out


# ---------------------------------------------------------------------------
# stable sublattice enumeration
# ---------------------------------------------------------------------------

class _Node:
    __slots__ = ("diag", "off", "mats")

    def __init__(self, diag, off, mats):
        self.diag = diag      # diagonal exponents relative to the base
        self.off = off        # off-diagonal digit tuples, off[j][i]
        self.mats = mats      # action matrices in node coordinates


def _action_on_lattice(fq, lattice, ambient_mats, precision):
    """Action matrices rewritten in the lattice's own basis coordinates;
    raises when the lattice is not stable under them."""
    cols = lattice.columns(precision)
    out = []
    for amat in ambient_mats:
        ycols = []
        for c in cols:
            image = mat_vec(fq, amat, c, precision)
            y = _solve_upper(fq, lattice.diag, cols, list(image))
            if y is None:
                raise InvariantViolation(
                    "action does not stabilize the base lattice")
            ycols.append(tuple(y))
        out.append(tuple(ycols))
    return tuple(out)


def _solve_upper(fq, diag, cols, b):
    """Solve (upper triangular basis) * y = b; None when b is outside the
    span over O to working precision."""
    n = len(diag)
    width = len(b[0])
    y = [None] * n
    for i in range(n - 1, -1, -1):
        a = diag[i]
        e = b[i]
        if any(e[:a]):
            return None
        quo = e[a:] + (0,) * a
        y[i] = quo
        if any(quo):
            col = cols[i]
            for k in range(i):
                b[k] = ser_sub(fq, b[k], ser_mul(fq, quo, col[k]))
        b[i] = (0,) * width
    return y


def _compose_and_reduce(fq, node, pivot_rows, basis, n):
    """Canonical form, relative to the enumeration base, of the child
    lattice: the node composed with the preimage of the given stable
    subspace of its mod-t fiber."""
    pdiag, poff = node.diag, node.off
    width = max(pdiag) + 3
    pcols = []
    for j in range(n):
        col = []
        for i in range(n):
            if i == j:
                c = [0] * width
                c[pdiag[j]] = 1
                col.append(tuple(c))
            elif i < j:
                digits = poff[j][i]
                col.append(tuple(digits) + (0,) * (width - len(digits)))
            else:
                col.append((0,) * width)
        pcols.append(col)

    # child basis in node coordinates: pivot rows carry the subspace
    # basis vectors (constant entries), other rows carry t * e_row;
    # that matrix is already canonical, so the child's diagonal is
    # immediate and only the composed off-diagonal needs reduction
    in_pivot = {r: k for k, r in enumerate(pivot_rows)}
    ccols = []
    cdiag = []
    for j in range(n):
        if j in in_pivot:
            v = basis[in_pivot[j]]
            col = [(0,) * width for _ in range(n)]
            for i in range(j + 1):
                if v[i]:
                    src = pcols[i]
                    for k in range(i + 1):
                        col[k] = ser_add(fq, col[k],
                                         ser_scale(fq, v[i], src[k]))
            col = [tuple(e) for e in col]
            cdiag.append(pdiag[j])
        else:
            col = [(0,) + tuple(pcols[j][k][:width - 1]) for k in range(n)]
            cdiag.append(pdiag[j] + 1)
        ccols.append(col)
    _reduce_upper(fq, ccols, cdiag)
    off = []
    for j in range(n):
        off.append(tuple(tuple(ccols[j][i][:cdiag[i]]) for i in range(j)))
    return tuple(cdiag), tuple(off)


def _relative_action(fq, root_mats, diag, off, n, digits):
    """Action matrices rewritten in the canonical basis (diag, off)
    relative to the enumeration base, truncated to `digits` t-digits.

    The node key is a reduced Hermite form, so the matrices must be
    expressed in that exact basis: conjugating incrementally through
    the unreduced child step would drift away from the stored key.
    The triangular solve consumes at most sum(diag) digits of the root
    matrices, which the caller budgets for.
    """
    width = min(len(e) for mat in root_mats for col in mat for e in col)
    cols = []
    for j in range(n):
        col = []
        for i in range(n):
            if i == j:
                c = [0] * width
                if diag[j] < width:
                    c[diag[j]] = 1
                col.append(tuple(c))
            elif i < j:
                d = off[j][i]
                col.append(tuple(d[:width]) + (0,) * max(0, width - len(d)))
            else:
                col.append((0,) * width)
        cols.append(tuple(col))
    out = []
    for amat in root_mats:
        ycols = []
        for c in cols:
            image = mat_vec(fq, amat, c, width)
            y = _solve_upper(fq, diag, cols, list(image))
            if y is None:
                raise InvariantViolation(
                    "unstable candidate escaped the subspace filter")
            ycols.append(tuple(e[:digits] for e in y))
        out.append(tuple(ycols))
    return tuple(out)


def stable_sublattice_levels(base, jmax, ambient_mats, precision=None,
                             ceiling=None, containing=None):
    """For each colength 0..jmax, the stable sublattices of `base`.

    The returned lattices are canonical forms RELATIVE to the basis of
    `base` (use compose_lattice to place them in ambient coordinates);
    each level is sorted in the documented deterministic order.

    `ambient_mats` is a sequence of multiplication matrices (columns of
    raw coefficient tuples, in ambient coordinates) which together with
    scalars generate the acting ring; an empty sequence means no
    constraint.  `containing`, if given, is a lattice relative to
    `base`; the enumeration is pruned to sublattices containing it.
    """
    fq = base.fq
    n = base.n
    cap = enumeration_ceiling(ceiling)
    if ambient_mats:
        if precision is None:
            precision = min(min(len(e) for col in m for e in col)
                            for m in ambient_mats)
        root_digits = jmax + 2
        need = sum(base.diag) + root_digits + 1
        if precision < need:
            raise PrecisionExhausted(
                f"need {need} digits of the action matrices, have "
                f"{precision}")
        root_mats = []
        for mat in _action_on_lattice(fq, base, ambient_mats, precision):
            root_mats.append(tuple(tuple(tuple(e[:root_digits]) for e in col)
                                   for col in mat))
        root_mats = tuple(root_mats)
    else:
        root_mats = ()

    root = _Node((0,) * n, tuple(tuple(() for _ in range(j))
                                 for j in range(n)), root_mats)
    levels = [{(root.diag, root.off): root}]
    work = 0
    memo = {}
    for level in range(jmax):
        while len(levels) <= level:
            levels.append({})
        for node in list(levels[level].values()):
            if node.mats:
                mats_mod_t = tuple(
                    tuple(tuple(node.mats[g][j][i][0] for j in range(n))
                          for i in range(n))
                    for g in range(len(node.mats)))
            else:
                mats_mod_t = ()
            for c in range(1, n + 1):
                tgt = level + c
                if tgt > jmax:
                    break
                mkey = (mats_mod_t, n - c)
                subs = memo.get(mkey)
                if subs is None:
                    subs = stable_subspaces_mod_t(fq, mats_mod_t, n, n - c)
                    memo[mkey] = subs
                work += max(1, len(subs))
                if work > cap:
                    raise CeilingExceeded(
                        f"enumeration exceeded the work ceiling {cap}")
                if not subs:
                    continue
                while len(levels) <= tgt:
                    levels.append({})
                bucket = levels[tgt]
                for pivot_rows, basis in subs:
                    cdiag, coff = _compose_and_reduce(fq, node, pivot_rows,
                                                      basis, n)
                    key = (cdiag, coff)
                    if key in bucket:
                        continue
                    if containing is not None:
                        child = LatticeHNF(fq, 0, cdiag, coff)
                        if not child.contains_lattice(containing):
                            continue
                    if node.mats:
                        mats = _relative_action(fq, root_mats, cdiag, coff,
                                                n, max(2, jmax - tgt + 1))
                    else:
                        mats = ()
                    bucket[key] = _Node(cdiag, coff, mats)
    while len(levels) <= jmax:
        levels.append({})

    out = []
    for level in range(jmax + 1):
        lats = [_build_canonical(fq, 0, diag, off)
                for (diag, off) in levels[level].keys()]
        lats.sort(key=LatticeHNF.sort_key)
        out.append(lats)
    return out


def stable_sublattices(base, j, ambient_mats, precision=None, ceiling=None):
    """Stable sublattices of `base` of colength exactly j, composed into
    ambient coordinates, canonical and deterministically ordered."""
    levels = stable_sublattice_levels(base, j, ambient_mats,
                                      precision=precision, ceiling=ceiling)
    lats = [compose_lattice(base, rel) for rel in levels[j]]
    lats.sort(key=LatticeHNF.sort_key)
    return lats


# ---------------------------------------------------------------------------
# class counting, homothety, multiplier rings (duck-typed on the order)
# ---------------------------------------------------------------------------

def sandwich_representatives(order, ceiling=None):
    """Choice-free class representatives: the stable lattices M with
    conductor <= M <= maximal order whose maximal-order span is the
    whole maximal order, in ambient coordinates, sorted.

    Every class of stable lattices modulo scaling by units of E and
    powers of t contains exactly one such M, so these represent the
    classes counted by class_count_mod_lambda.
    """
    o_e = order.o_e_lattice
    cond = order.conductor_lattice
    cond_rel = relative_to(o_e, cond)
    depth = relative_length(o_e, cond)
    levels = stable_sublattice_levels(o_e, depth, order.action_matrices,
                                      precision=order.precision,
                                      ceiling=ceiling, containing=cond_rel)
    out = []
    for level in levels:
        for rel in level:
            m = compose_lattice(o_e, rel)
            prod = product_lattice(o_e, m, order.multiply_vectors,
                                   order.precision)
            if prod == o_e:
                out.append(m)
    out.sort(key=LatticeHNF.sort_key)
    return out


def class_count_mod_lambda(order, ceiling=None):
    """Number of stable-lattice classes modulo scaling (the count of the
    sandwich representatives)."""
    return len(sandwich_representatives(order, ceiling=ceiling))


def multiplier_ring(m, order):
    """End(M) = (M : M), a ring between the order and its normalization."""
    return colon_lattice(m, m, order.multiply_vectors,
                         order.trace_gram_columns, order.precision)


def is_homothetic(m1, m2, order):
    """A witness element x with x*M1 = M2, or None.

    Any witness lies in the colon lattice C = (M2 : M1), and an element
    x of C satisfies [M1 : x*M1] >= [M1 : M2] with equality exactly when
    x*M1 = M2, so witnesses are the minimal-norm elements of C and none
    lies in t*C.  If x is a witness and y = x + t*c with c in C, then
    y = x*(1 + t*(c/x)) and c/x multiplies M2 into itself, making the
    second factor a unit of End(M2): y is again a witness.  Each residue
    class of C/tC is therefore all witnesses or none, and scanning the
    q^n - 1 nonzero classes is a complete search.

    The witness is returned as (coords, scale): the element is t^scale
    times the vector with the given ambient coordinates.
    """
    fq = order.fq
    n = m1.n
    if n != m2.n:
        raise ValueError("mismatched ranks")
    prec = order.precision
    colon = colon_lattice(m2, m1, order.multiply_vectors,
                          order.trace_gram_columns, prec)
    ccols = colon.columns(prec)
    c1 = m1.columns(prec)
    q = fq.q
    target = m2.key
    for counter in range(1, q ** n):
        coords = []
        c = counter
        for _ in range(n):
            coords.append(c % q)
            c //= q
        x = [(0,) * prec for _ in range(n)]
        for j in range(n):
            if coords[j]:
                for i in range(n):
                    x[i] = ser_add(fq, x[i],
                                   ser_scale(fq, coords[j], ccols[j][i]))
        x = tuple(x)
        gens = [order.multiply_vectors(x, v, prec) for v in c1]
        try:
            cand = hnf_from_generators(fq, gens, n,
                                       scale=colon.scale + m1.scale,
                                       precision=prec)
        except (RankDeficient, PrecisionExhausted):
            continue
        if cand.key == target:
            return x, colon.scale
    return None
