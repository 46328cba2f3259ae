"""Arithmetic in finite fields F_q, q = p^e, with an explicit modulus.

Elements are encoded as integers in [0, q): the base-p digits of the code
are the coefficients of the residue polynomial in the generator u, so the
prime subfield occupies codes 0..p-1 and the generator itself is code p.
An `Fq` context precomputes full operation tables, which keeps the series
and lattice layers free of per-element object overhead.
"""

from __future__ import annotations

from .errors import ParseError, PreconditionViolated

# Fields bigger than this would need q^2-entry tables; everything in scope
# is tiny (q <= 81 after base change).
_TABLE_CAP = 4096

# Conventional moduli for the prime powers the battery uses.
_DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),        # u^2 + u + 1
    (2, 3): (1, 1, 0, 1),     # u^3 + u + 1
    (3, 2): (1, 0, 1),        # u^2 + 1
}


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# dense polynomial helpers over F_p (coefficient tuples, low degree first)
# ---------------------------------------------------------------------------

def _pp_trim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _pp_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pp_trim(out)


def _pp_mod(a, m, p):
    """Remainder of a modulo the monic polynomial m, over F_p."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and any(a):
        lead = a[-1]
        if lead == 0:
            a.pop()
            continue
        shift = len(a) - 1 - dm
        for i in range(dm + 1):
            a[shift + i] = (a[shift + i] - lead * m[i]) % p
        a.pop()
    return _pp_trim(a)


def _pp_is_irreducible(m, p):
    """Exhaustive divisor search; fine for the tiny degrees used here."""
    deg = len(m) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        # all monic polynomials of degree d over F_p
        for code in range(p ** d):
            cand = []
            c = code
            for _ in range(d):
                cand.append(c % p)
                c //= p
            cand.append(1)
            if not _pp_mod(m, tuple(cand), p):
                return False
    return True


def find_irreducible(p, deg):
    """Lexicographically smallest monic irreducible of given degree over F_p."""
    if deg == 1:
        return (0, 1)
    for code in range(p ** deg):
        cand = []
        c = code
        for _ in range(deg):
            cand.append(c % p)
            c //= p
        cand.append(1)
        cand = tuple(cand)
        if _pp_is_irreducible(cand, p):
            return cand
    raise PreconditionViolated(f"no irreducible of degree {deg} over F_{p} found")


class FqSpec:
    """Description of a finite field: characteristic, degree, modulus.

    The modulus is a monic polynomial over F_p stored as a coefficient
    tuple (low degree first, length e+1).  For e = 1 it is (0, 1), i.e. u.
    """

    __slots__ = ("p", "e", "modulus")

    def __init__(self, p, e=1, modulus=None):
        if not _is_prime(p):
            raise PreconditionViolated(f"characteristic {p} is not prime")
        if e < 1:
            raise PreconditionViolated(f"extension degree {e} must be >= 1")
        if modulus is None:
            if e == 1:
                modulus = (0, 1)
            elif (p, e) in _DEFAULT_MODULI:
                modulus = _DEFAULT_MODULI[(p, e)]
            else:
                modulus = find_irreducible(p, e)
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise PreconditionViolated("modulus must be monic of degree e")
        if e > 1 and not _pp_is_irreducible(modulus, p):
            raise PreconditionViolated("modulus is reducible over F_p")
        self.p = p
        self.e = e
        self.modulus = modulus

    @property
    def q(self):
        return self.p ** self.e

    def __eq__(self, other):
        return (isinstance(other, FqSpec)
                and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus))

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    def __repr__(self):
        return f"FqSpec({self.to_text()!r})"

    def to_text(self):
        """Canonical text form: "p" for prime fields, "p^e:modulus" otherwise."""
        if self.e == 1:
            return str(self.p)
        terms = []
        for i in range(self.e, -1, -1):
            c = self.modulus[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                head = "" if c == 1 else f"{c}*"
                terms.append(f"{head}u" if i == 1 else f"{head}u^{i}")
        return f"{self.p}^{self.e}:" + "+".join(terms)

    @classmethod
    def parse(cls, text):
        """Inverse of to_text; also accepts a bare prime power like "9"."""
        text = text.strip()
        if ":" in text:
            head, modtext = text.split(":", 1)
            if "^" not in head:
                raise ParseError(f"bad field spec {text!r}: expected p^e before ':'")
            ptext, etext = head.split("^", 1)
            try:
                p, e = int(ptext), int(etext)
            except ValueError:
                raise ParseError(f"bad field spec {text!r}") from None
            coeffs = _parse_u_poly(modtext, p)
            return cls(p, e, coeffs)
        if "^" in text:
            ptext, etext = text.split("^", 1)
            try:
                return cls(int(ptext), int(etext))
            except ValueError:
                raise ParseError(f"bad field spec {text!r}") from None
        try:
            n = int(text)
        except ValueError:
            raise ParseError(f"bad field spec {text!r}") from None
        if _is_prime(n):
            return cls(n)
        # bare prime power: factor it
        for p in range(2, n + 1):
            if n % p == 0:
                if not _is_prime(p):
                    break
                e = 0
                m = n
                while m % p == 0:
                    m //= p
                    e += 1
                if m == 1:
                    return cls(p, e)
                break
        raise ParseError(f"{text!r} is not a prime power")


def _parse_u_poly(text, p):
    """Parse a sum of c*u^i terms into a dense coefficient tuple over F_p."""
    text = text.replace(" ", "")
    if not text:
        raise ParseError("empty modulus")
    # normalize leading sign and split on +/-
    terms = []
    cur = ""
    sign = 1
    for ch in text:
        if ch in "+-" and cur:
            terms.append((sign, cur))
            sign = 1 if ch == "+" else -1
            cur = ""
        elif ch in "+-" and not cur:
            sign = sign if ch == "+" else -sign
        else:
            cur += ch
    if cur:
        terms.append((sign, cur))
    coeffs = {}
    for sign, term in terms:
        c = 1
        deg = 0
        for factor in term.split("*"):
            if not factor:
                raise ParseError(f"bad modulus term {term!r}")
            if factor.startswith("u"):
                if factor == "u":
                    deg += 1
                elif factor.startswith("u^"):
                    try:
                        deg += int(factor[2:])
                    except ValueError:
                        raise ParseError(f"bad modulus term {term!r}") from None
                else:
                    raise ParseError(f"bad modulus term {term!r}")
            else:
                try:
                    c *= int(factor)
                except ValueError:
                    raise ParseError(f"bad modulus term {term!r}") from None
        coeffs[deg] = (coeffs.get(deg, 0) + sign * c) % p
    top = max(coeffs)
    return tuple(coeffs.get(i, 0) for i in range(top + 1))


class Fq:
    """Operation-table context for one finite field.

    Codes are ints in [0, q).  All the series/lattice arithmetic funnels
    through `add`/`sub`/`mul`/`neg`/`inv` lookups on this object.
    """

    _cache = {}

    def __new__(cls, spec):
        inst = cls._cache.get(spec)
        if inst is not None:
            return inst
        inst = super().__new__(cls)
        inst._init(spec)
        cls._cache[spec] = inst
        return inst

    def _init(self, spec):
        p, e, q = spec.p, spec.e, spec.q
        if q > _TABLE_CAP:
            raise PreconditionViolated(
                f"field size {q} exceeds the desk-scale table cap {_TABLE_CAP}")
        self.spec = spec
        self.p = p
        self.e = e
        self.q = q
        self.zero = 0
        self.one = 1
        self.gen = p if e > 1 else 1  # class of u, or just 1 in a prime field

        def decode(code):
            digits = []
            for _ in range(e):
                digits.append(code % p)
                code //= p
            return tuple(digits)

        def encode(digits):
            code = 0
            for d in reversed(digits):
                code = code * p + (d % p)
            return code

        self._decode = decode
        self._encode = encode

        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        neg = [0] * q
        for a in range(q):
            da = decode(a)
            neg[a] = encode(tuple((-x) % p for x in da))
            for b in range(a, q):
                db = decode(b)
                s = encode(tuple((x + y) % p for x, y in zip(da, db)))
                add[a][b] = s
                add[b][a] = s
                prod = _pp_mod(_pp_mul(_pp_trim(da), _pp_trim(db), p), spec.modulus, p)
                prod = prod + (0,) * (e - len(prod))
                m = encode(prod)
                mul[a][b] = m
                mul[b][a] = m
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
        self._add = add
        self._mul = mul
        self._neg = neg
        self._inv = inv
        self._sub = [[add[a][neg[b]] for b in range(q)] for a in range(q)]

    # -- scalar operations ------------------------------------------------

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._sub[a][b]

    def mul(self, a, b):
        return self._mul[a][b]

    def neg(self, a):
        return self._neg[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self._inv[a]

    def pow(self, a, k):
        if k < 0:
            a, k = self.inv(a), -k
        out = 1
        while k:
            if k & 1:
                out = self._mul[out][a]
            a = self._mul[a][a]
            k >>= 1
        return out

    def from_int(self, n):
        """Image of the rational integer n in the prime subfield."""
        return n % self.p

    def elements(self):
        return range(self.q)

    def decode(self, code):
        """Base-p digit tuple (coefficients of the residue polynomial)."""
        return self._decode(code)

    def element_text(self, code):
        """Canonical text for one element: an integer or a u-polynomial."""
        if self.e == 1 or code < self.p:
            return str(code)
        digits = self._decode(code)
        terms = []
        for i in range(self.e - 1, -1, -1):
            c = digits[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append("u" if c == 1 else f"{c}*u")
            else:
                terms.append(f"u^{i}" if c == 1 else f"{c}*u^{i}")
        return "+".join(terms) if terms else "0"

    def __repr__(self):
        return f"Fq({self.spec.to_text()})"


class FqElement:
    """Boxed field element for API-level code (parsing, display, tests)."""

    __slots__ = ("fq", "code")

    def __init__(self, fq, code):
        self.fq = fq
        self.code = code % fq.q if code >= 0 else fq.neg((-code) % fq.q)

    def _coerce(self, other):
        if isinstance(other, FqElement):
            if other.fq is not self.fq:
                raise ValueError("elements from different fields")
            return other.code
        if isinstance(other, int):
            return self.fq.from_int(other)
        return NotImplemented

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FqElement(self.fq, self.fq.add(self.code, c))

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FqElement(self.fq, self.fq.sub(self.code, c))

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FqElement(self.fq, self.fq.sub(c, self.code))

    def __mul__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FqElement(self.fq, self.fq.mul(self.code, c))

    __rmul__ = __mul__

    def __neg__(self):
        return FqElement(self.fq, self.fq.neg(self.code))

    def __pow__(self, k):
        return FqElement(self.fq, self.fq.pow(self.code, k))

    def inverse(self):
        return FqElement(self.fq, self.fq.inv(self.code))

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FqElement(self.fq, self.fq.mul(self.code, self.fq.inv(c)))

    def __eq__(self, other):
        if isinstance(other, FqElement):
            return self.fq is other.fq and self.code == other.code
        if isinstance(other, int):
            return self.code == self.fq.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((id(self.fq), self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return f"FqElement({self.fq.spec.to_text()}, {self.fq.element_text(self.code)})"


def embedding(small, big):
    """Map of element codes F_q -> F_{q^d} for compatible fields.

    `small` and `big` are Fq contexts with the same characteristic and
    small.e dividing big.e.  The generator of `small` is sent to the
    lexicographically smallest root of its modulus in `big`, which fixes a
    deterministic embedding.  Returns a list: table[code_small] = code_big.
    """
    if small.p != big.p or big.e % small.e != 0:
        raise PreconditionViolated("no embedding between these fields")
    p = small.p
    if small.e == 1:
        return list(range(p)) if big.e >= 1 else None
    root = None
    for cand in range(big.q):
        # evaluate small's modulus at cand inside big
        acc = 0
        power = 1
        for c in small.spec.modulus:
            acc = big.add(acc, big.mul(c % p, power))
            power = big.mul(power, cand)
        if acc == 0:
            root = cand
            break
    if root is None:
        raise PreconditionViolated("modulus has no root in the target field")
    table = [0] * small.q
    for code in range(small.q):
        digits = small.decode(code)
        acc = 0
        power = 1
        for d in digits:
            acc = big.add(acc, big.mul(d, power))
            power = big.mul(power, root)
        table[code] = acc
    return table
