"""Counting polynomial of an order and its exact identities.

The sublattices of the duality envelope that are stable under the order
are tallied by colength, and the tally series times the factor periods
product collapses to a polynomial with integer coefficients.  The
polynomial has constant term 1 and degree twice the normalization
colength, its coefficients obey the exact symmetry c[2d-k] =
q^(d-k)*c[k], and its value at 1 equals the number of stable lattice
classes modulo scaling.  The same assembly applied to a lattice other
than the duality envelope keeps only the value identity.  For the
coordinate-lines congruence orders a closed form with coefficients
polynomial in q is available.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import (InvariantViolation, NonIntegralSpecialValue,
                     PreconditionViolated, TruncationFailure)
from .lattices import (compose_lattice, is_homothetic, product_lattice,
                       relative_length, sandwich_representatives,
                       stable_sublattice_levels, trace_dual_lattice)
from .polynomials import BiPoly, IntPoly


def factor_periods(order):
    """Residue degree of each field factor; the tally series of a
    maximal order is the product of geometric series in t^period."""
    factors = getattr(order, "factors", None)
    if factors is not None:
        return tuple(fd.n for fd in factors)
    return (1,) * order.n


class ZetaPolynomial:
    """Counting polynomial together with its verification record.

    quot_counts[j] is the number of stable sublattices of colength j in
    the reference lattice; poly is the collapsed polynomial; checks
    records which exact identities were confirmed.  class_count is
    filled when the assembly had to compare against the number of
    lattice classes (the variant path), otherwise None.
    """

    __slots__ = ("poly", "q", "delta", "periods", "quot_counts", "checks",
                 "class_count")

    def __init__(self, poly, q, delta, periods, quot_counts, checks,
                 class_count=None):
        if poly.coefficient(0) != 1:
            raise InvariantViolation(
                "counting polynomial must have constant term 1, got "
                f"{poly.coefficient(0)}")
        self.poly = poly
        self.q = q
        self.delta = delta
        self.periods = tuple(periods)
        self.quot_counts = tuple(quot_counts)
        self.checks = checks
        self.class_count = class_count

    def all_checks_pass(self):
        return all(self.checks.values())

    def __repr__(self):
        return (f"ZetaPolynomial({self.poly.text()}, q={self.q}, "
                f"delta={self.delta})")


def _collapse(counts, periods):
    """Multiply the tally series by prod (1 - t^period).  The result is
    exact out to the window of the input counts."""
    numer = list(counts)
    for p in periods:
        for k in range(len(numer) - 1, p - 1, -1):
            numer[k] -= numer[k - p]
    return numer


def quot_series(order, j_max=None, ceiling=None):
    """Number of stable sublattices of the duality lattice, by colength
    0..j_max.  The count of colength-j sublattices that are stable
    under the order's action matrices equals the number of fractional
    ideals of that colength inside the duality lattice."""
    if j_max is None:
        j_max = order.j_max
    floor = 2 * order.delta + max(factor_periods(order))
    if j_max < floor:
        raise PreconditionViolated(
            f"need at least {floor} tally terms to certify the tail, "
            f"got {j_max}")
    levels = stable_sublattice_levels(order.dual_r_lattice, j_max,
                                      order.action_matrices,
                                      ceiling=ceiling)
    return tuple(len(level) for level in levels)


def zeta_polynomial(order, j_max=None, ceiling=None):
    """Assemble and verify the counting polynomial of an order.

    The tally series is collapsed by the periods product; every
    coefficient beyond degree 2*delta must vanish within the computed
    window (TruncationFailure otherwise).  The degree, symmetry, and
    value identities are recorded as booleans in the checks field.  An
    explicit j_max below the certification window is raised to it.
    """
    periods = factor_periods(order)
    need = 2 * order.delta + sum(periods) + 2
    j_max = max(j_max if j_max is not None else 0, need, order.j_max)
    counts = quot_series(order, j_max, ceiling=ceiling)
    numer = _collapse(counts, periods)
    top = 2 * order.delta
    bad = [k for k in range(top + 1, len(numer)) if numer[k]]
    if bad:
        raise TruncationFailure(
            f"nonzero collapsed coefficients at degrees {bad}, beyond "
            f"the expected degree {top}")
    poly = IntPoly(numer[:top + 1])
    checks = {"truncation_ok": True}
    z = ZetaPolynomial(poly, order.fq.q, order.delta, periods, counts,
                       checks)
    checks["degree_ok"] = poly.degree == top
    checks["fe_ok"] = check_functional_equation(z)
    try:
        p_at_one, reflected = special_values(z)
        checks["sv_ok"] = p_at_one == reflected
    except NonIntegralSpecialValue:
        checks["sv_ok"] = False
    return z


def check_functional_equation(z):
    """Exact coefficient symmetry c[2d-k] = q^(d-k)*c[k] for all k;
    false whenever the degree exceeds 2d."""
    d, q, poly = z.delta, z.q, z.poly
    if poly.degree > 2 * d:
        return False
    return all(
        poly.coefficient(2 * d - k) == q ** (d - k) * poly.coefficient(k)
        for k in range(d + 1))


def special_values(z):
    """The pair (P(1), q^delta * P(1/q)), exactly.  The second value is
    asserted to be an integer; for the duality-lattice polynomial the
    two are equal and count the lattice classes modulo scaling."""
    p_at_one = z.poly(1)
    reflected = Fraction(z.q) ** z.delta * z.poly(Fraction(1, z.q))
    if reflected.denominator != 1:
        raise NonIntegralSpecialValue(
            f"q^delta * P(1/q) = {reflected} is not an integer")
    return p_at_one, int(reflected)


def variant_zeta(order, lattice, j_max=None, ceiling=None):
    """Counting polynomial assembled from the stable sublattices of an
    arbitrary stable lattice instead of the duality lattice.

    The tally is invariant under scaling the lattice by powers of t, so
    the lattice is first scaled to sit inside the duality lattice with
    the smallest colength gap.  Only the value identity P(1) = number
    of lattice classes is enforced; the degree and symmetry flags are
    reported but usually fail.  The collapsed series must still show a
    zero tail as wide as the periods margin (TruncationFailure
    otherwise; rerun with a larger j_max).
    """
    if lattice.n != order.n:
        raise PreconditionViolated("lattice rank differs from the order")
    spanned = product_lattice(order.r_lattice, lattice,
                              order.multiply_vectors, order.precision)
    if spanned != lattice:
        raise PreconditionViolated(
            "the lattice is not stable under the order")
    dual = order.dual_r_lattice
    shift = 0
    while not dual.contains_lattice(lattice.shifted(shift)):
        shift += 1
        if shift > 4 * order.precision:
            raise InvariantViolation("could not scale into the duality "
                                     "lattice")
    while dual.contains_lattice(lattice.shifted(shift - 1)):
        shift -= 1
        if shift < -4 * order.precision:
            raise InvariantViolation("unbounded overlattice")
    base = lattice.shifted(shift)
    gap = relative_length(dual, base)
    periods = factor_periods(order)
    margin = sum(periods) + 2
    need = 2 * order.delta + gap + margin
    j_max = max(j_max if j_max is not None else 0, need)
    levels = stable_sublattice_levels(base, j_max, order.action_matrices,
                                      ceiling=ceiling)
    counts = tuple(len(level) for level in levels)
    numer = _collapse(counts, periods)
    degree = max((k for k, c in enumerate(numer) if c), default=0)
    if len(numer) - 1 - degree < margin:
        raise TruncationFailure(
            f"no certified zero tail after degree {degree}; rerun with "
            "a larger j_max")
    poly = IntPoly(numer[:degree + 1])
    count = len(sandwich_representatives(order, ceiling=ceiling))
    checks = {"truncation_ok": True}
    z = ZetaPolynomial(poly, order.fq.q, order.delta, periods, counts,
                       checks, class_count=count)
    checks["degree_ok"] = poly.degree == 2 * order.delta
    checks["fe_ok"] = check_functional_equation(z)
    checks["sv_ok"] = poly(1) == count
    if not checks["sv_ok"]:
        raise InvariantViolation(
            f"variant value P(1) = {poly(1)} differs from the class "
            f"count {count}")
    return z


class ClassRefinement:
    """Partition of the colength tallies by lattice class.

    labels are deterministic ('c0', 'c1', ... in canonical lattice
    order); counts maps a label to its tally row; contributions maps a
    label to its collapsed share of the counting polynomial;
    class_sizes gives the number of scale-normalized representatives in
    each class; dual_pairs maps each label to the label of the class of
    its dual lattice; pairing_ok records the paired coefficient
    symmetry across dual classes.
    """

    __slots__ = ("labels", "representatives", "class_sizes", "counts",
                 "contributions", "dual_pairs", "pairing_ok")

    def __init__(self, labels, representatives, class_sizes, counts,
                 contributions, dual_pairs, pairing_ok):
        self.labels = labels
        self.representatives = representatives
        self.class_sizes = class_sizes
        self.counts = counts
        self.contributions = contributions
        self.dual_pairs = dual_pairs
        self.pairing_ok = pairing_ok

    def __repr__(self):
        pairs = ", ".join(f"{a}->{b}" for a, b in self.dual_pairs.items())
        return (f"ClassRefinement(classes={len(self.labels)}, "
                f"pairs=[{pairs}], pairing_ok={self.pairing_ok})")


def _class_index(lattice, canonicals, order):
    for idx, rep in enumerate(canonicals):
        if is_homothetic(rep, lattice, order) is not None:
            return idx
    raise InvariantViolation(
        "a stable lattice matched no class representative")


def per_class_refinement(order, j_max=None, ceiling=None):
    """Split the colength tallies by lattice class and verify the paired
    coefficient symmetry between each class and the class of its dual.

    The scale-normalized representatives are grouped into classes under
    multiplication by invertible elements; the canonical representative
    of a class is the first member in the deterministic lattice order.
    Every enumerated sublattice of the duality lattice is assigned to
    exactly one class, each class share must collapse to a polynomial
    of degree at most 2*delta, and the share of a class at coefficient
    2*delta-k must equal q^(delta-k) times the share of its dual class
    at coefficient k.
    """
    if j_max is None:
        j_max = order.j_max
    reps = sandwich_representatives(order, ceiling=ceiling)
    canonicals = []
    sizes = []
    for rep in reps:
        for idx, canon in enumerate(canonicals):
            if is_homothetic(canon, rep, order) is not None:
                sizes[idx] += 1
                break
        else:
            canonicals.append(rep)
            sizes.append(1)
    labels = tuple(f"c{i}" for i in range(len(canonicals)))
    dual = order.dual_r_lattice
    levels = stable_sublattice_levels(dual, j_max, order.action_matrices,
                                      ceiling=ceiling)
    table = [[0] * (j_max + 1) for _ in canonicals]
    for j, level in enumerate(levels):
        for rel in level:
            lattice = compose_lattice(dual, rel)
            table[_class_index(lattice, canonicals, order)][j] += 1
    for j, level in enumerate(levels):
        if sum(row[j] for row in table) != len(level):
            raise InvariantViolation("class tallies do not add up")

    periods = factor_periods(order)
    top = 2 * order.delta
    contributions = []
    for row in table:
        numer = _collapse(row, periods)
        bad = [k for k in range(top + 1, len(numer)) if numer[k]]
        if bad:
            raise TruncationFailure(
                f"a class share has nonzero coefficients at {bad}, "
                f"beyond degree {top}")
        contributions.append(IntPoly(numer[:top + 1]))

    pair = []
    for canon in canonicals:
        flipped = trace_dual_lattice(canon, order.trace_gram_columns,
                                     order.precision)
        pair.append(_class_index(flipped, canonicals, order))
    pairing_ok = all(pair[pair[i]] == i for i in range(len(pair)))
    q, d = order.fq.q, order.delta
    for i, j in enumerate(pair):
        for k in range(top + 1):
            left = contributions[i].coefficient(top - k)
            right = contributions[j].coefficient(k)
            if k <= d:
                balanced = left == q ** (d - k) * right
            else:
                balanced = q ** (k - d) * left == right
            if not balanced:
                pairing_ok = False
    return ClassRefinement(
        labels, dict(zip(labels, canonicals)), dict(zip(labels, sizes)),
        {lab: tuple(row) for lab, row in zip(labels, table)},
        dict(zip(labels, contributions)),
        {labels[i]: labels[j] for i, j in enumerate(pair)}, pairing_ok)


def _corner_coefficient(binom_power, geom_top, degree):
    """Coefficient of t^degree in (1-t)^binom_power divided by the
    product of (1 - q^j t) for j = 0..geom_top, as a polynomial in q,
    by truncated series multiplication."""
    coeffs = [IntPoly((1,))] + [IntPoly() for _ in range(degree)]
    for _ in range(binom_power):
        for k in range(degree, 0, -1):
            coeffs[k] = coeffs[k] - coeffs[k - 1]
    for j in range(geom_top + 1):
        q_power = IntPoly.monomial(j)
        for k in range(1, degree + 1):
            coeffs[k] = coeffs[k] + q_power * coeffs[k - 1]
    return coeffs[degree]


def nlines_closed_form(n):
    """Counting polynomial of the order of n coordinate lines through a
    common point, as a polynomial in t with coefficients in Z[q].

    The assembly sums, over the number r of coordinates where an ideal
    generator is a unit, a binomial term times a corner coefficient of
    a truncated geometric product; the product depth grows by one when
    r = 0.  Guarded to n <= 8 to keep the symbolic size modest.
    """
    if not 2 <= n <= 8:
        raise PreconditionViolated("supported range is 2 <= n <= 8")
    one = IntPoly((1,))
    one_minus_t = BiPoly((one, IntPoly((-1,))))
    total = BiPoly()
    for r in range(n + 1):
        extra = 0 if r > 0 else 1
        inner = BiPoly()
        for c in range(n):
            coeff = _corner_coefficient(n - r, c + extra, n - c - 1)
            inner = inner + BiPoly((IntPoly(),) * c + (coeff,))
        term = BiPoly((IntPoly(),) * (n - r) + (one,))
        for _ in range(r):
            term = term * one_minus_t
        total = total + comb(n, r) * (term * inner)
    return total
