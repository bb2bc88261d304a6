"""Exact Gaussian-rational scalars and sparse multivariate polynomials.

A :class:`Poly` lives over a :class:`VarTable`, which fixes the variable order,
each variable's kind (holomorphic, antiholomorphic or real parameter) and the
conjugation involution.  Terms are stored as ``{exponent tuple: GaussScalar}``
with zero coefficients dropped, so equal polynomials compare equal as dicts.

Monomials are ordered graded-lexicographically over the table order.  Tables
built with :meth:`VarTable.sphere` list ``z0, z0~, z1, z1~, ...`` first, which
makes ``z0 z0~`` the leading term of ``sigma - 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence, Union

HOLO = "holomorphic"
ANTI = "antiholomorphic"
REAL = "real"

Exponent = tuple[int, ...]
Number = Union[int, Fraction, "GaussScalar"]


class AlgebraError(ValueError):
    pass


# ---------------------------------------------------------------------------
# scalars


class GaussScalar:
    """Exact element of Q(i), stored as ``(a + b i) / d`` in lowest terms."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        self._set(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def _set(self, a: int, b: int, d: int) -> None:
        if d != 1:
            g = gcd(gcd(a, b), d)
            if g != 1:
                a //= g
                b //= g
                d //= g
        self._a, self._b, self._d = a, b, d

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> GaussScalar:
        out = cls.__new__(cls)
        if d < 0:
            a, b, d = -a, -b, -d
        out._set(a, b, d)
        return out

    @classmethod
    def coerce(cls, x: Number | complex) -> GaussScalar:
        if isinstance(x, GaussScalar):
            return x
        if isinstance(x, int):
            return cls._raw(x, 0, 1)
        if isinstance(x, Fraction):
            return cls._raw(x.numerator, 0, x.denominator)
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        raise TypeError(f"cannot convert {type(x).__name__} to GaussScalar")

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_real(self) -> bool:
        return self._b == 0

    def conjugate(self) -> GaussScalar:
        return GaussScalar._raw(self._a, -self._b, self._d)

    def norm2(self) -> Fraction:
        """``|x|^2`` as an exact rational."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def __add__(self, other):
        if not isinstance(other, GaussScalar):
            try:
                other = GaussScalar.coerce(other)
            except TypeError:
                return NotImplemented
        if self._d == other._d:
            return GaussScalar._raw(self._a + other._a, self._b + other._b, self._d)
        d1, d2 = self._d, other._d
        return GaussScalar._raw(self._a * d2 + other._a * d1, self._b * d2 + other._b * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        out = GaussScalar.__new__(GaussScalar)
        out._a, out._b, out._d = -self._a, -self._b, self._d
        return out

    def __sub__(self, other):
        if not isinstance(other, GaussScalar):
            try:
                other = GaussScalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return GaussScalar.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GaussScalar):
            try:
                other = GaussScalar.coerce(other)
            except TypeError:
                return NotImplemented
        a1, b1, a2, b2 = self._a, self._b, other._a, other._b
        return GaussScalar._raw(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, self._d * other._d)

    __rmul__ = __mul__

    def inverse(self) -> GaussScalar:
        n = self._a * self._a + self._b * self._b
        if n == 0:
            raise ZeroDivisionError("GaussScalar division by zero")
        # (a+bi)/d inverse = d (a - bi) / (a^2 + b^2)
        return GaussScalar._raw(self._d * self._a, -self._d * self._b, n)

    def __truediv__(self, other):
        if not isinstance(other, GaussScalar):
            try:
                other = GaussScalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussScalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, GaussScalar):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and Fraction(self._a, self._d) == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self._a, self._b, self._d))

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        return complex(self._a / self._d, self._b / self._d)

    def __repr__(self):
        return f"GaussScalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


ZERO = GaussScalar._raw(0, 0, 1)
ONE = GaussScalar._raw(1, 0, 1)
I = GaussScalar._raw(0, 1, 1)


def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x: GaussScalar) -> str:
    """Render as ``p/q``, ``r/si`` or ``p/q+r/si`` without spaces."""
    re_, im = x.re, x.im
    if im == 0:
        return _fmt_q(re_)
    if abs(im) == 1:
        ipart = "i" if im > 0 else "-i"
    else:
        ipart = _fmt_q(im) + "i"
    if re_ == 0:
        return ipart
    sign = "" if ipart.startswith("-") else "+"
    return f"{_fmt_q(re_)}{sign}{ipart}"


_Q = r"\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?P<re>[+-]?{_Q})?(?:(?P<isign>[+-])?(?P<im>{_Q})?(?P<unit>i))?$"
)


def parse_scalar(text: str) -> GaussScalar:
    """Parse ``p``, ``p/q``, ``r/si``, ``p/q+r/si`` (also ``i``, ``-i``)."""
    t = text.strip()
    m = _SCALAR_RE.match(t)
    if not t or m is None:
        raise AlgebraError(f"bad scalar {text!r}")
    has_re, has_im = m.group("re") is not None, m.group("unit") is not None
    if not has_re and not has_im:
        raise AlgebraError(f"bad scalar {text!r}")
    if has_re and has_im and m.group("isign") is None:
        # "3i" matched as re="3" + "i": reinterpret as a pure imaginary
        if m.group("im") is None:
            return GaussScalar(0, Fraction(m.group("re")))
        raise AlgebraError(f"bad scalar {text!r}")
    re_ = Fraction(m.group("re")) if has_re else Fraction(0)
    im = Fraction(0)
    if has_im:
        im = Fraction(m.group("im")) if m.group("im") else Fraction(1)
        if m.group("isign") == "-":
            im = -im
    return GaussScalar(re_, im)


# ---------------------------------------------------------------------------
# variable tables


@dataclass(frozen=True)
class VarTable:
    """Ordered variables with kinds and the conjugation involution."""

    names: tuple[str, ...]
    kinds: tuple[str, ...]
    partners: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.names) == len(self.kinds) == len(self.partners)):
            raise AlgebraError("VarTable fields have different lengths")
        if len(set(self.names)) != len(self.names):
            raise AlgebraError("duplicate variable names")
        for k, (kind, p) in enumerate(zip(self.kinds, self.partners)):
            if kind == REAL:
                if p != k:
                    raise AlgebraError(f"real variable {self.names[k]} must be self-paired")
            elif kind in (HOLO, ANTI):
                if p == k or self.partners[p] != k:
                    raise AlgebraError(f"{self.names[k]} has no proper conjugate partner")
                want = ANTI if kind == HOLO else HOLO
                if self.kinds[p] != want:
                    raise AlgebraError(f"{self.names[k]} paired with a variable of the same kind")
            else:
                raise AlgebraError(f"unknown kind {kind!r}")

    @classmethod
    def build(
        cls,
        complex_vars: Iterable[str | tuple[str, str]] = (),
        real_vars: Iterable[str] = (),
    ) -> VarTable:
        """Holomorphic variables (each followed by its partner), then reals.

        A complex entry is either a name (partner ``name~``) or an explicit
        ``(name, partner)`` pair.
        """
        names: list[str] = []
        kinds: list[str] = []
        partners: list[int] = []
        for entry in complex_vars:
            z, zb = (entry, entry + "~") if isinstance(entry, str) else entry
            k = len(names)
            names += [z, zb]
            kinds += [HOLO, ANTI]
            partners += [k + 1, k]
        for r in real_vars:
            partners.append(len(names))
            names.append(r)
            kinds.append(REAL)
        return cls(tuple(names), tuple(kinds), tuple(partners))

    @classmethod
    def sphere(cls, n: int, params: Iterable[str] = ()) -> VarTable:
        """``z0..zn`` with partners, followed by real parameters."""
        return cls.build([f"z{k}" for k in range(n + 1)], params)

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlgebraError(f"unknown variable {name!r}") from None

    @property
    def _index(self) -> dict[str, int]:
        cache = self.__dict__.get("_idx")
        if cache is None:
            cache = {nm: k for k, nm in enumerate(self.names)}
            object.__setattr__(self, "_idx", cache)
        return cache

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def conj_perm(self) -> tuple[int, ...]:
        return self.partners

    def extend(self, real_vars: Iterable[str]) -> VarTable:
        extra = [r for r in real_vars if r not in self]
        if not extra:
            return self
        n0 = len(self.names)
        return VarTable(
            self.names + tuple(extra),
            self.kinds + (REAL,) * len(extra),
            self.partners + tuple(range(n0, n0 + len(extra))),
        )


# ---------------------------------------------------------------------------
# polynomials


def _order_key(e: Exponent):
    return (sum(e), e)


def _add_into(acc: dict, mono: Exponent, c: GaussScalar) -> None:
    old = acc.get(mono)
    if old is None:
        acc[mono] = c
    else:
        s = old + c
        if s.is_zero():
            del acc[mono]
        else:
            acc[mono] = s


class Poly:
    """Sparse polynomial with exact Gaussian-rational coefficients.

    Instances are treated as immutable; every operation returns a new Poly.
    """

    __slots__ = ("vt", "terms")

    def __init__(self, vt: VarTable, terms: Mapping[Exponent, GaussScalar] | None = None):
        self.vt = vt
        self.terms: dict[Exponent, GaussScalar] = (
            {m: c for m, c in terms.items() if not c.is_zero()} if terms else {}
        )

    @classmethod
    def _wrap(cls, vt: VarTable, terms: dict) -> Poly:
        out = cls.__new__(cls)
        out.vt = vt
        out.terms = terms
        return out

    # constructors

    @classmethod
    def zero(cls, vt: VarTable) -> Poly:
        return cls._wrap(vt, {})

    @classmethod
    def const(cls, vt: VarTable, c: Number) -> Poly:
        c = GaussScalar.coerce(c)
        return cls._wrap(vt, {} if c.is_zero() else {(0,) * len(vt): c})

    @classmethod
    def var(cls, vt: VarTable, name: str, power: int = 1) -> Poly:
        e = [0] * len(vt)
        e[vt.index(name)] = power
        return cls._wrap(vt, {tuple(e): ONE})

    @classmethod
    def monomial(cls, vt: VarTable, exps: Mapping[str, int], c: Number = 1) -> Poly:
        e = [0] * len(vt)
        for nm, k in exps.items():
            e[vt.index(nm)] += k
        c = GaussScalar.coerce(c)
        return cls._wrap(vt, {} if c.is_zero() else {tuple(e): c})

    @classmethod
    def parse(cls, text: str, vt: VarTable) -> Poly:
        return parse_poly(text, vt)

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def constant_term(self) -> GaussScalar:
        return self.terms.get((0,) * len(self.vt), ZERO)

    def is_constant(self) -> bool:
        z = (0,) * len(self.vt)
        return all(m == z for m in self.terms)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def variables(self) -> set[str]:
        used = set()
        for m in self.terms:
            for k, e in enumerate(m):
                if e:
                    used.add(self.vt.names[k])
        return used

    def sorted_terms(self) -> list[tuple[Exponent, GaussScalar]]:
        """Terms from leading to trailing in graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: _order_key(t[0]), reverse=True)

    def leading(self) -> tuple[Exponent, GaussScalar]:
        if not self.terms:
            raise AlgebraError("zero polynomial has no leading term")
        m = max(self.terms, key=_order_key)
        return m, self.terms[m]

    def bidegrees(self) -> set[tuple[int, int]]:
        """(holomorphic degree, antiholomorphic degree) of each term."""
        hk = [k for k, kind in enumerate(self.vt.kinds) if kind == HOLO]
        ak = [k for k, kind in enumerate(self.vt.kinds) if kind == ANTI]
        return {(sum(m[k] for k in hk), sum(m[k] for k in ak)) for m in self.terms}

    # arithmetic

    def _check(self, other: Poly) -> None:
        if other.vt is not self.vt and other.vt != self.vt:
            raise AlgebraError("polynomials over different variable tables")

    def _lift(self, other) -> Poly | None:
        if isinstance(other, Poly):
            self._check(other)
            return other
        try:
            return Poly.const(self.vt, GaussScalar.coerce(other))
        except TypeError:
            return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        acc = dict(big)
        for m, c in small.items():
            _add_into(acc, m, c)
        return Poly._wrap(self.vt, acc)

    __radd__ = __add__

    def __neg__(self):
        return Poly._wrap(self.vt, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(acc, m, -c)
        return Poly._wrap(self.vt, acc)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                c = GaussScalar.coerce(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        self._check(other)
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                _add_into(acc, tuple(a + b for a, b in zip(m1, m2)), c1 * c2)
        return Poly._wrap(self.vt, acc)

    __rmul__ = __mul__

    def scale(self, c: Number) -> Poly:
        c = GaussScalar.coerce(c)
        if c.is_zero():
            return Poly.zero(self.vt)
        if c == ONE:
            return self
        return Poly._wrap(self.vt, {m: v * c for m, v in self.terms.items()})

    def mul_monomial(self, mono: Exponent, c: GaussScalar) -> Poly:
        return Poly._wrap(
            self.vt, {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in self.terms.items()}
        )

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise AlgebraError("negative power of a polynomial")
        out = Poly.const(self.vt, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.vt == other.vt and self.terms == other.terms
        try:
            c = GaussScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({} if c.is_zero() else {(0,) * len(self.vt): c})

    def __hash__(self):
        return hash((self.vt.names, frozenset(self.terms.items())))

    # structure maps

    def conj(self) -> Poly:
        """Conjugate coefficients and swap each variable with its partner."""
        perm = self.vt.partners
        out = {}
        for m, c in self.terms.items():
            out[tuple(m[perm[k]] for k in range(len(m)))] = c.conjugate()
        return Poly._wrap(self.vt, out)

    def is_hermitian_real(self) -> bool:
        return self.conj() == self

    def diff(self, name: str) -> Poly:
        k = self.vt.index(name)
        out = {}
        for m, c in self.terms.items():
            e = m[k]
            if e:
                mm = list(m)
                mm[k] = e - 1
                out[tuple(mm)] = c * e
        return Poly._wrap(self.vt, out)

    def subs(self, mapping: Mapping[str, Poly]) -> Poly:
        """Simultaneous substitution of variables by polynomials."""
        idx = {self.vt.index(nm): p for nm, p in mapping.items()}
        for p in idx.values():
            self._check(p)
        powers: dict[tuple[int, int], Poly] = {}

        def power(k: int, e: int) -> Poly:
            key = (k, e)
            if key not in powers:
                powers[key] = idx[k] if e == 1 else power(k, e - 1) * idx[k]
            return powers[key]

        acc: dict = {}
        for m, c in self.terms.items():
            rest = tuple(0 if k in idx else e for k, e in enumerate(m))
            piece = Poly._wrap(self.vt, {rest: c})
            for k, e in enumerate(m):
                if e and k in idx:
                    piece = piece * power(k, e)
            for mm, cc in piece.terms.items():
                _add_into(acc, mm, cc)
        return Poly._wrap(self.vt, acc)

    def evaluate(self, values: Mapping[str, Number | complex]):
        """Evaluate at a point; values may be exact scalars or Python complex."""
        vals = [values[nm] if nm in values else None for nm in self.vt.names]
        total = 0
        for m, c in self.terms.items():
            t = c if not any(isinstance(v, (complex, float)) for v in vals if v is not None) else complex(c)
            for k, e in enumerate(m):
                if e:
                    v = vals[k]
                    if v is None:
                        raise AlgebraError(f"no value for variable {self.vt.names[k]!r}")
                    t = t * v**e
            total = total + t
        return total

    def with_table(self, vt: VarTable) -> Poly:
        """Re-express over a table containing all variables used here."""
        if vt == self.vt:
            return self
        pos = [vt.index(nm) for nm in self.vt.names]
        out = {}
        for m, c in self.terms.items():
            e = [0] * len(vt)
            for k, x in enumerate(m):
                if x:
                    e[pos[k]] = x
                elif self.vt.names[k] not in vt:
                    pass
            out[tuple(e)] = c
        return Poly._wrap(vt, out)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def sphere_sigma(vt: VarTable, n: int) -> Poly:
    """``sigma = sum_{A=0}^{n} z^A conj(z^A)`` over ``vt``."""
    terms = {}
    for a in range(n + 1):
        e = [0] * len(vt)
        e[vt.index(f"z{a}")] = 1
        e[vt.index(f"z{a}~")] = 1
        terms[tuple(e)] = ONE
    return Poly._wrap(vt, terms)


def divide(p: Poly, g: Poly) -> tuple[Poly, Poly]:
    """Multivariate division of ``p`` by a single divisor in graded-lex order.

    Returns ``(q, r)`` with ``p = q g + r`` and no term of ``r`` divisible by
    the leading monomial of ``g``.  For one divisor this remainder is zero
    exactly when ``g`` divides ``p``.
    """
    p._check(g)
    lm, lc = g.leading()
    inv = lc.inverse()
    rest = {m: c for m, c in g.terms.items() if m != lm}
    work = dict(p.terms)
    q: dict = {}
    r: dict = {}
    while work:
        m = max(work, key=_order_key)
        c = work.pop(m)
        if all(a >= b for a, b in zip(m, lm)):
            shift = tuple(a - b for a, b in zip(m, lm))
            f = c * inv
            _add_into(q, shift, f)
            for gm, gc in rest.items():
                _add_into(work, tuple(a + b for a, b in zip(gm, shift)), -(f * gc))
        else:
            r[m] = c
    return Poly._wrap(p.vt, q), Poly._wrap(p.vt, r)


def divide_by_sphere(p: Poly, n: int) -> tuple[Poly, Poly]:
    """Divide by ``sigma - 1`` where sigma runs over ``z0..zn``."""
    return divide(p, sphere_sigma(p.vt, n) - 1)


# ---------------------------------------------------------------------------
# substitution chains


class SubstitutionChain:
    """Ordered, triangular list of ``variable -> Poly`` replacements.

    Step ``t`` may mention variables replaced at later steps but never one
    replaced at step ``t`` or earlier, so sequential application terminates.
    """

    def __init__(self, steps: Iterable[tuple[str, Poly]] = ()):
        self.steps: list[tuple[str, Poly]] = list(steps)
        self.validate()

    def validate(self) -> None:
        done: set[str] = set()
        for name, rep in self.steps:
            if name in done:
                raise AlgebraError(f"variable {name!r} replaced twice")
            done.add(name)
            bad = rep.variables() & done
            if bad:
                raise AlgebraError(
                    f"non-triangular chain: replacement for {name!r} mentions {sorted(bad)}"
                )

    def __len__(self):
        return len(self.steps)

    def __iter__(self) -> Iterator[tuple[str, Poly]]:
        return iter(self.steps)

    def __eq__(self, other):
        return isinstance(other, SubstitutionChain) and self.steps == other.steps

    def replaced(self) -> list[str]:
        return [nm for nm, _ in self.steps]

    def apply(self, p: Poly) -> Poly:
        for name, rep in self.steps:
            if name in p.vt and p.terms:
                k = p.vt.index(name)
                if any(m[k] for m in p.terms):
                    p = p.subs({name: rep.with_table(p.vt)})
        return p

    def with_table(self, vt: VarTable) -> SubstitutionChain:
        return SubstitutionChain((nm, rep.with_table(vt)) for nm, rep in self.steps)


def substitute(p: Poly, chain: SubstitutionChain) -> Poly:
    return chain.apply(p)


# ---------------------------------------------------------------------------
# text syntax

_VAR_RE = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*~?)(?:\^(?P<exp>\d+))?$")


def format_poly(p: Poly) -> str:
    """Terms as ``coeff var^e var^e`` in ascending monomial order, ``0`` for zero."""
    if not p.terms:
        return "0"
    out = []
    for m, c in reversed(p.sorted_terms()):
        factors = []
        for k, e in enumerate(m):
            if e:
                factors.append(p.vt.names[k] if e == 1 else f"{p.vt.names[k]}^{e}")
        sign = "+"
        if (c.is_real() and c.re < 0) or (c.re == 0 and c.im < 0):
            sign, c = "-", -c
        if factors:
            body = " ".join(factors) if c == ONE else f"{format_scalar(c)} " + " ".join(factors)
        else:
            body = format_scalar(c)
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def parse_poly(text: str, vt: VarTable) -> Poly:
    """Inverse of :func:`format_poly`; also accepts ``*`` between factors."""
    tokens = text.replace("*", " ").split()
    if not tokens:
        raise AlgebraError("empty polynomial text")
    acc: dict = {}
    sign = 1
    coeff = ONE
    exps = [0] * len(vt)
    started = False

    for tok in tokens + ["+"]:
        if tok in ("+", "-"):
            if started:
                c = coeff * sign
                if not c.is_zero():
                    _add_into(acc, tuple(exps), c)
                sign, coeff, exps, started = 1, ONE, [0] * len(vt), False
            if tok == "-":
                sign = -sign
            continue
        try:
            coeff = coeff * parse_scalar(tok)
            started = True
            continue
        except AlgebraError:
            pass
        body = tok
        if tok[0] in "+-" and not started:
            sign = -sign if tok[0] == "-" else sign
            body = tok[1:]
        m = _VAR_RE.match(body)
        if m is None:
            raise AlgebraError(f"cannot parse token {tok!r} in {text!r}")
        name = m.group("name")
        if name not in vt:
            raise AlgebraError(f"unknown variable {name!r} in {text!r}")
        exps[vt.index(name)] += int(m.group("exp") or 1)
        started = True
    if sign != 1:
        raise AlgebraError(f"dangling sign in {text!r}")
    return Poly._wrap(vt, acc)


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise AlgebraError(f"unknown operation {op!r}")


def polys_from_strings(texts: Sequence[str], vt: VarTable) -> list[Poly]:
    return [parse_poly(t, vt) for t in texts]
