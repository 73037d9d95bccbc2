"""Finite fields GF(p^m) with elements encoded as integers.

An element ``sum(c_i x^i)`` is stored as the integer ``sum(c_i p^i)``.  All
arithmetic helpers on :class:`FieldSpec` take and return these integers;
:class:`FieldElement` is a thin operator-overloading wrapper on top.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

MAX_ORDER = 1 << 20


class FieldError(ValueError):
    pass


class NotPrime(FieldError):
    pass


class ReducibleModulus(FieldError):
    pass


class NoIrreducibleFound(FieldError):
    pass


class FieldMismatch(FieldError):
    pass


class NoSuchSubgroup(FieldError):
    pass


class IncompatibleTower(FieldError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, int(n ** 0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


# -- polynomial helpers over GF(p); coefficient lists are ascending ----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    b = _trim(list(b))
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _trim(a)
    return a


def _is_irreducible(poly: Sequence[int], p: int) -> bool:
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        # every monic divisor candidate of degree d
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def _monic_candidates(p: int, m: int) -> Iterable[list[int]]:
    for code in range(p ** m):
        coeffs = []
        for _ in range(m):
            code, c = divmod(code, p)
            coeffs.append(c)
        yield coeffs + [1]


def smallest_irreducible(p: int, m: int) -> list[int]:
    """Monic irreducible of degree ``m`` with the smallest integer encoding."""
    for poly in _monic_candidates(p, m):
        if _is_irreducible(poly, p):
            return poly
    raise NoIrreducibleFound(f"no irreducible of degree {m} over GF({p})")


class FieldSpec:
    """GF(p^m) defined by a monic irreducible ``modulus`` (ascending coefficients).

    Multiplication is backed by exp/log tables over a primitive element; the
    tables themselves are built from schoolbook polynomial products
    (:meth:`mul_reference`).  Addition in proper extensions of odd
    characteristic goes through Zech logarithms.
    """

    def __init__(self, p: int, m: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if m < 1:
            raise FieldError("extension degree must be >= 1")
        if p ** m > MAX_ORDER:
            raise FieldError(f"q = {p}^{m} exceeds the supported order {MAX_ORDER}")
        if m == 1:
            if modulus is not None and (len(modulus) != 2 or modulus[-1] != 1):
                raise ReducibleModulus("degree-1 modulus must be monic linear")
            modulus = (0, 1)
        elif modulus is None:
            modulus = smallest_irreducible(p, m)
        else:
            modulus = [int(c) % p for c in modulus]
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise FieldError(f"modulus must be monic of degree {m}")
            if not _is_irreducible(modulus, p):
                raise ReducibleModulus(f"{modulus} is reducible over GF({p})")
        self.p = p
        self.m = m
        self.modulus = tuple(modulus)
        self.q = p ** m
        self._build_tables()

    # -- construction ------------------------------------------------------

    def _build_tables(self) -> None:
        q = self.q
        self.primitive = self._find_primitive()
        exp = [0] * (2 * (q - 1))
        log = [0] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self.mul_reference(x, self.primitive)
        exp[q - 1:] = exp[: q - 1]
        self._exp = exp
        self._log = log
        self._half = (q - 1) // 2
        self._zech = None
        if self.m > 1 and self.p != 2:
            # zech[k] = log(1 + g^k), or -1 when 1 + g^k = 0
            zech = [0] * (q - 1)
            for k in range(q - 1):
                s = self._add_digits(1, exp[k])
                zech[k] = log[s] if s else -1
            self._zech = zech

    def _find_primitive(self) -> int:
        if self.q == 2:
            return 1
        order = self.q - 1
        factors = prime_factors(order)
        for g in range(2, self.q):
            if all(self.pow_reference(g, order // f) != 1 for f in factors):
                return g
        raise FieldError("no primitive element found")  # pragma: no cover

    # -- encoding ----------------------------------------------------------

    def to_coeffs(self, a: int) -> list[int]:
        out = []
        for _ in range(self.m):
            a, c = divmod(a, self.p)
            out.append(c)
        return out

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        v = 0
        for c in reversed(list(coeffs)):
            v = v * self.p + (c % self.p)
        return v

    def _add_digits(self, a: int, b: int, sign: int = 1) -> int:
        p = self.p
        v, mult = 0, 1
        while a or b:
            a, ca = divmod(a, p)
            b, cb = divmod(b, p)
            v += ((ca + sign * cb) % p) * mult
            mult *= p
        return v

    # -- reference (schoolbook) arithmetic -----------------------------------

    def mul_reference(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        if m == 1:
            return a * b % p
        ca, cb = self.to_coeffs(a), self.to_coeffs(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % p
        return self.from_coeffs(_poly_mod(prod, self.modulus, p))

    def pow_reference(self, a: int, k: int) -> int:
        result = 1
        while k:
            if k & 1:
                result = self.mul_reference(result, a)
            a = self.mul_reference(a, a)
            k >>= 1
        return result

    # -- fast arithmetic on integer encodings --------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if a == 0:
            return b
        if b == 0:
            return a
        la = self._log[a]
        z = self._zech[(self._log[b] - la) % (self.q - 1)]
        return 0 if z < 0 else self._exp[la + z]

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        if self.p == 2 or a == 0:
            return a
        return self._exp[self._log[a] + self._half]

    def sub(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.m == 1:
            return a * b % self.p
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise DivisionByZero("division by zero")
        if a == 0:
            return 0
        return self._exp[(self._log[a] - self._log[b]) % (self.q - 1)]

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise DivisionByZero("zero to a negative power")
            return 1 if k == 0 else 0
        return self._exp[(self._log[a] * k) % (self.q - 1)]

    def log(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("log of zero")
        return self._log[a]

    def exp(self, k: int) -> int:
        return self._exp[k % (self.q - 1)]

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        n = self.q - 1
        for f in prime_factors(n):
            while n % f == 0 and self.pow(a, n // f) == 1:
                n //= f
        return n

    def axpy(self, dst: list[int], src: Sequence[int], f: int, start: int = 0) -> None:
        """In place ``dst[j] -= f * src[j]`` for ``j >= start``."""
        if f == 0:
            return
        n = len(dst)
        if self.m == 1:
            p = self.p
            for j in range(start, n):
                y = src[j]
                if y:
                    dst[j] = (dst[j] - f * y) % p
            return
        exp, log = self._exp, self._log
        if self.p == 2:
            lf = log[f]
            for j in range(start, n):
                y = src[j]
                if y:
                    dst[j] ^= exp[lf + log[y]]
            return
        zech, qm1 = self._zech, self.q - 1
        lf = (log[f] + self._half) % qm1  # log of -f
        for j in range(start, n):
            y = src[j]
            if not y:
                continue
            lt = lf + log[y]  # log of -f*y, possibly >= q-1
            x = dst[j]
            if x == 0:
                dst[j] = exp[lt]
            else:
                lx = log[x]
                z = zech[(lt - lx) % qm1]
                dst[j] = 0 if z < 0 else exp[lx + z]

    def scale(self, row: Sequence[int], f: int) -> list[int]:
        if f == 0:
            return [0] * len(row)
        if self.m == 1:
            p = self.p
            return [x * f % p for x in row]
        exp, log = self._exp, self._log
        lf = log[f]
        return [exp[lf + log[x]] if x else 0 for x in row]

    def sum(self, values: Iterable[int]) -> int:
        acc = 0
        for v in values:
            acc = self.add(acc, v)
        return acc

    def dot(self, xs: Sequence[int], ys: Sequence[int]) -> int:
        acc = 0
        for x, y in zip(xs, ys):
            if x and y:
                acc = self.add(acc, self.mul(x, y))
        return acc

    def validate(self, a: int) -> int:
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise FieldError(f"{a!r} is not an element of GF({self.q})")
        return a

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self.validate(value), self)

    # -- identity / serialisation -------------------------------------------

    def _key(self):
        return (self.p, self.m, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}, modulus={list(self.modulus)})"

    def to_dict(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    @classmethod
    def from_dict(cls, d: dict) -> "FieldSpec":
        return field_new(int(d["p"]), int(d["m"]), d.get("modulus"))


_FIELD_CACHE: dict[tuple, FieldSpec] = {}


def field_new(p: int, m: int = 1, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Build (or fetch a cached) GF(p^m)."""
    key = (p, m, tuple(modulus) if modulus is not None and m > 1 else None)
    f = _FIELD_CACHE.get(key)
    if f is None:
        f = FieldSpec(p, m, modulus)
        _FIELD_CACHE[key] = f
    return f


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: FieldSpec = dc_field(compare=False, repr=False)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.value
        if isinstance(other, int):
            return self.field.validate(other % self.field.q if self.field.m == 1 else other)
        return NotImplemented

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(v, self.field)

    def __add__(self, other):
        return self._wrap(self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return self._wrap(self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return self._wrap(self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return self._wrap(self.field.div(self._other(other), self.value))

    def __pow__(self, k: int):
        return self._wrap(self.field.pow(self.value, k))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def inv(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value}@{self.field!r}"


# -- multiplicative subgroups -------------------------------------------------

@dataclass(frozen=True)
class SubgroupSpec:
    field: FieldSpec
    generator: int
    order: int
    coset_reps: tuple[int, ...]

    def elements(self) -> list[int]:
        """Subgroup members as ``generator**k`` for ``k = 0 .. order-1``."""
        out, x = [], 1
        for _ in range(self.order):
            out.append(x)
            x = self.field.mul(x, self.generator)
        return out

    def contains(self, a: int) -> bool:
        return a != 0 and self.field.pow(a, self.order) == 1

    def same_coset(self, a: int, b: int) -> bool:
        return self.contains(self.field.div(a, b))

    def check(self) -> None:
        F = self.field
        if (F.q - 1) % self.order:
            raise NoSuchSubgroup("subgroup order must divide q-1")
        if F.pow(self.generator, self.order) != 1 or any(
            F.pow(self.generator, k) == 1 for k in range(1, self.order)
        ):
            raise NoSuchSubgroup("generator does not have the stated order")
        for i, j in itertools.combinations(range(len(self.coset_reps)), 2):
            if self.same_coset(self.coset_reps[i], self.coset_reps[j]):
                raise NoSuchSubgroup("coset representatives share a coset")


def find_subgroup(field: FieldSpec, min_order: int, min_cosets: int) -> SubgroupSpec:
    """Smallest subgroup of order >= ``min_order`` with >= ``min_cosets`` cosets.

    The generator is canonicalised to the numerically smallest element that
    generates the subgroup; coset representatives are ``g^0, g^1, ...`` for
    the field's primitive element ``g``.
    """
    n = field.q - 1
    for d in divisors(n):
        if d >= min_order and n // d >= min_cosets:
            base = field.pow(field.primitive, n // d)
            gens = [field.pow(base, k) for k in range(1, d + 1) if _gcd(k, d) == 1]
            reps = tuple(field.pow(field.primitive, k) for k in range(min_cosets))
            return SubgroupSpec(field, min(gens), d, reps)
    raise NoSuchSubgroup(
        f"GF({field.q}) has no subgroup of order >= {min_order} with >= {min_cosets} cosets"
    )


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# -- subfield towers ----------------------------------------------------------

@dataclass(frozen=True)
class Embedding:
    """Ring homomorphism GF(small) -> GF(big), fixed by the image of ``x``."""

    small: FieldSpec
    big: FieldSpec
    root: int

    def __call__(self, a: int) -> int:
        if self.small.m == 1:
            return a
        big = self.big
        acc, power = 0, 1
        for c in self.small.to_coeffs(a):
            if c:
                acc = big.add(acc, big.mul(c, power))
            power = big.mul(power, self.root)
        return acc

    def image(self) -> list[int]:
        return [self(a) for a in range(self.small.q)]


def embedding(small: FieldSpec, big: FieldSpec) -> Embedding:
    if small.p != big.p or big.m % small.m:
        raise IncompatibleTower(f"{small} does not embed in {big}")
    if small.m == 1:
        return Embedding(small, big, 0)
    # root of the small modulus inside the big field; brute force at desk scale
    for cand in range(big.q):
        acc, power = 0, 1
        for c in small.modulus:
            if c:
                acc = big.add(acc, big.mul(c, power))
            power = big.mul(power, cand)
        if acc == 0:
            return Embedding(small, big, cand)
    raise IncompatibleTower("small modulus has no root in the big field")  # pragma: no cover


def independent_over_subfield(values: Sequence[int], emb: Embedding) -> bool:
    """True when ``values`` are linearly independent over the embedded subfield.

    Reduces to a GF(p)-rank computation: the spans agree with the GF(p)-span
    of ``embed(x^k) * v`` for ``k < small.m``.
    """
    from .matrix import rank_rows

    big, small = emb.big, emb.small
    if any(v == 0 for v in values):
        return False
    prime = field_new(big.p)
    basis = [emb(small.from_coeffs([0] * k + [1])) for k in range(small.m)]
    rows = [big.to_coeffs(big.mul(b, v)) for v in values for b in basis]
    return rank_rows(rows, prime) == len(rows)


def subfield_basis(big: FieldSpec, small: FieldSpec) -> tuple[Embedding, tuple[int, int, int]]:
    """Embedding of ``small`` in its cubic extension ``big`` and a basis (1, y, y^2)."""
    if big.m != 3 * small.m:
        raise IncompatibleTower(f"{big} is not a cubic extension of {small}")
    emb = embedding(small, big)
    y = big.p  # encoding of the polynomial x
    basis = (1, y, big.mul(y, y))
    if not independent_over_subfield(basis, emb):
        raise IncompatibleTower("1, y, y^2 are dependent over the subfield")  # pragma: no cover
    return emb, basis


def three_wise_independent(values: Sequence[int], emb: Embedding) -> bool:
    """Every subset of size <= 3 is linearly independent over the subfield."""
    for t in (1, 2, 3):
        for combo in itertools.combinations(values, t):
            if not independent_over_subfield(combo, emb):
                return False
    return True

