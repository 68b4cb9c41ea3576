"""Coefficient rings.

The closed set of rings the exact layer supports: the integers, the
rationals, prime fields F_p and the quotient rings Z/m for composite m.
Ring elements are plain python objects (int, Fraction); a ring instance
only knows how to normalize and combine them, so matrices stay cheap.
"""

from fractions import Fraction
from math import gcd

from .errors import FieldRequired, SchemaError

_KINDS = ("Z", "Q", "F", "Zm")


class CoefficientRing:
    __slots__ = ("kind", "modulus")

    def __init__(self, kind, modulus=0):
        if kind not in _KINDS:
            raise ValueError("unknown ring kind %r" % (kind,))
        if kind == "F":
            if modulus < 2 or not _is_prime(modulus):
                raise SchemaError("F_p needs a prime p, got %r" % (modulus,))
        if kind == "Zm" and modulus < 2:
            raise SchemaError("Z/m needs m >= 2, got %r" % (modulus,))
        self.kind = kind
        self.modulus = modulus

    @property
    def name(self):
        if self.kind == "Z":
            return "Z"
        if self.kind == "Q":
            return "Q"
        if self.kind == "F":
            return "F%d" % self.modulus
        return "Z/%d" % self.modulus

    @property
    def is_field(self):
        return self.kind in ("Q", "F")

    @property
    def is_exact_domain(self):
        return self.kind in ("Z", "Q", "F")

    def coerce(self, x):
        """Normalize x to the canonical representative in this ring."""
        if self.kind == "Z":
            if isinstance(x, bool):
                return int(x)
            if isinstance(x, int):
                return x
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError("%r is not an integer" % (x,))
            return int(f)
        if self.kind == "Q":
            return Fraction(x)
        # F_p and Z/m share representatives 0..m-1
        if isinstance(x, Fraction):
            if x.denominator == 1:
                x = x.numerator
            elif self.kind == "F":
                return (x.numerator * pow(x.denominator, -1, self.modulus)) % self.modulus
            else:
                raise ValueError("%r has no canonical image in %s" % (x, self.name))
        return int(x) % self.modulus

    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def add(self, a, b):
        c = a + b
        if self.kind in ("F", "Zm"):
            c %= self.modulus
        return c

    def sub(self, a, b):
        c = a - b
        if self.kind in ("F", "Zm"):
            c %= self.modulus
        return c

    def mul(self, a, b):
        c = a * b
        if self.kind in ("F", "Zm"):
            c %= self.modulus
        return c

    def neg(self, a):
        c = -a
        if self.kind in ("F", "Zm"):
            c %= self.modulus
        return c

    def inv(self, a):
        if self.kind == "Q":
            return 1 / Fraction(a)
        if self.kind == "F":
            return pow(a, -1, self.modulus)
        raise FieldRequired("no inverses in %s" % self.name)

    def is_unit(self, a):
        if self.kind == "Z":
            return a in (1, -1)
        if self.kind == "Zm":
            return gcd(a, self.modulus) == 1
        return a != 0

    def __eq__(self, other):
        return (
            isinstance(other, CoefficientRing)
            and self.kind == other.kind
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.kind, self.modulus))

    def __repr__(self):
        return "CoefficientRing(%s)" % self.name


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


ZZ = CoefficientRing("Z")
QQ = CoefficientRing("Q")


def GF(p):
    return CoefficientRing("F", p)


def Zmod(m):
    return CoefficientRing("Zm", m)


def parse_ring(name):
    """Parse 'Z', 'Q', 'F2', 'F3', ... or 'Z/4' into a ring instance."""
    s = name.strip()
    if s == "Z":
        return ZZ
    if s == "Q":
        return QQ
    if s.startswith("F") and s[1:].isdigit():
        return GF(int(s[1:]))
    if s.startswith("Z/") and s[2:].isdigit():
        m = int(s[2:])
        return GF(m) if _is_prime(m) else Zmod(m)
    raise SchemaError("unknown coefficient ring %r" % (name,))


def factorize(n):
    """Prime factorization of n >= 1 as a dict prime -> exponent."""
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def canonical_divisors(divs):
    """Invariant factor form of a list of cyclic orders.

    Input entries are integers >= 2 (order of a cyclic summand, in any
    order); the result is the unique tuple (d_1, ..., d_r) with
    d_1 | d_2 | ... | d_r describing the same finite group.
    """
    per_prime = {}
    for d in divs:
        if d < 2:
            raise ValueError("cyclic order must be >= 2, got %r" % (d,))
        for p, e in factorize(d).items():
            per_prime.setdefault(p, []).append(e)
    if not per_prime:
        return ()
    depth = max(len(v) for v in per_prime.values())
    for v in per_prime.values():
        v.sort(reverse=True)
    out = []
    for j in range(depth):
        d = 1
        for p, exps in per_prime.items():
            if j < len(exps):
                d *= p ** exps[j]
        out.append(d)
    out.reverse()
    return tuple(out)


def parse_abelian(spec):
    """Parse a finitely generated abelian group like 'Z^2+Z/2+Z/4'.

    Returns (rank, divisors) with divisors in invariant factor form.
    '0' denotes the trivial group.
    """
    s = spec.replace(" ", "")
    if s in ("0", ""):
        return (0, ())
    rank = 0
    divs = []
    for part in s.split("+"):
        if part == "Z":
            rank += 1
        elif part.startswith("Z^"):
            k = part[2:]
            if not k.isdigit() or int(k) < 1:
                raise SchemaError("bad free part %r" % (part,))
            rank += int(k)
        elif part.startswith("Z/"):
            m = part[2:]
            if not m.isdigit() or int(m) < 2:
                raise SchemaError("bad torsion part %r" % (part,))
            divs.append(int(m))
        else:
            raise SchemaError("cannot parse group summand %r" % (part,))
    return (rank, canonical_divisors(divs))


def format_abelian(rank, divisors):
    parts = []
    if rank == 1:
        parts.append("Z")
    elif rank > 1:
        parts.append("Z^%d" % rank)
    parts.extend("Z/%d" % d for d in divisors)
    return " + ".join(parts) if parts else "0"
