"""Exterior forms with polynomial coefficients in function symbols."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..algebra import ONE, ZERO, AlgebraError, GaussScalar, Poly, VarTable

Mono = tuple[int, ...]


class EdsError(ValueError):
    pass


@dataclass(frozen=True)
class SymbolTable:
    """1-form generators and function symbols with their conjugations.

    ``forms`` fixes the wedge order; ``form_conj[k]`` is the index of the
    conjugate generator (``k`` itself for a real form).  Functions live in
    a :class:`VarTable`.  ``defs`` maps defined function symbols to
    polynomials in the others; they are eliminated whenever a form is
    normalized.
    """

    forms: tuple[str, ...]
    form_conj: tuple[int, ...]
    fvt: VarTable
    defs: Mapping[str, Poly] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.forms)) != len(self.forms):
            raise EdsError("duplicate form names")
        if set(self.forms) & set(self.fvt.names):
            raise EdsError("a name is declared both as form and function")
        for k, p in enumerate(self.form_conj):
            if not 0 <= p < len(self.forms) or self.form_conj[p] != k:
                raise EdsError(f"conjugation of {self.forms[k]} is not an involution")
        for name, val in self.defs.items():
            if name not in self.fvt:
                raise EdsError(f"definition for undeclared function {name!r}")
            if val.vt != self.fvt:
                raise EdsError(f"definition of {name!r} uses another table")
            if val.variables() & set(self.defs):
                raise EdsError(f"definition of {name!r} refers to a defined symbol")

    @classmethod
    def create(
        cls,
        forms: Sequence[tuple[str, str]],
        functions: Sequence[tuple[str, str]] = (),
        defs: Mapping[str, str | Poly] | None = None,
    ) -> SymbolTable:
        """Forms and functions as ``(name, conjugate)`` pairs, ``conjugate == name`` for real ones.

        Each pair is listed once; the conjugate of a complex form is
        appended right after it unless it appears elsewhere in ``forms``.
        """
        names: list[str] = []
        conj: dict[str, str] = {}
        for a, b in forms:
            conj[a] = b
            conj[b] = a
        listed = {a for a, _ in forms}
        for a, b in forms:
            if a not in names:
                names.append(a)
            if b not in listed and b not in names:
                names.append(b)
        idx = {nm: k for k, nm in enumerate(names)}
        form_conj = tuple(idx[conj[nm]] for nm in names)
        complex_fns = []
        real_fns = []
        seen = set()
        for a, b in functions:
            if a in seen:
                continue
            seen.update((a, b))
            if a == b:
                real_fns.append(a)
            else:
                complex_fns.append((a, b))
        fvt = VarTable.build(complex_fns, real_fns)
        d = {}
        for k, v in (defs or {}).items():
            d[k] = v if isinstance(v, Poly) else Poly.parse(v, fvt)
        return cls(tuple(names), form_conj, fvt, d)

    def with_defs(self, defs: Mapping[str, Poly]) -> SymbolTable:
        return SymbolTable(self.forms, self.form_conj, self.fvt, dict(defs))

    @property
    def form_index(self) -> dict[str, int]:
        cache = self.__dict__.get("_fidx")
        if cache is None:
            cache = {nm: k for k, nm in enumerate(self.forms)}
            object.__setattr__(self, "_fidx", cache)
        return cache

    def is_form(self, name: str) -> bool:
        return name in self.form_index

    def is_function(self, name: str) -> bool:
        return name in self.fvt

    def conj_name(self, name: str) -> str:
        if self.is_form(name):
            return self.forms[self.form_conj[self.form_index[name]]]
        return self.fvt.names[self.fvt.partners[self.fvt.index(name)]]

    def is_real(self, name: str) -> bool:
        return self.conj_name(name) == name

    def __eq__(self, other):
        if not isinstance(other, SymbolTable):
            return NotImplemented
        return (
            self.forms == other.forms
            and self.form_conj == other.form_conj
            and self.fvt == other.fvt
            and dict(self.defs) == dict(other.defs)
        )

    def __hash__(self):
        return hash((self.forms, self.form_conj, self.fvt))


def _sort_sign(mono: Iterable[int]) -> tuple[Mono | None, int]:
    """Sort generator indices; ``None`` if one repeats, else the permutation sign."""
    m = list(mono)
    sign = 1
    for i in range(1, len(m)):
        j = i
        while j > 0 and m[j - 1] > m[j]:
            m[j - 1], m[j] = m[j], m[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and m[j - 1] == m[j]:
            return None, 0
    return tuple(m), sign


def _merge_sign(a: Mono, b: Mono) -> tuple[Mono | None, int]:
    """Wedge of two sorted monomials."""
    if not a:
        return b, 1
    if not b:
        return a, 1
    out = []
    inversions = 0
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        elif a[i] > b[j]:
            out.append(b[j])
            inversions += len(a) - i
            j += 1
        else:
            return None, 0
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), -1 if inversions & 1 else 1


class ExtForm:
    """Sum of ``coefficient * g_1 ^ ... ^ g_k`` with increasing generator indices."""

    __slots__ = ("st", "terms")

    def __init__(self, st: SymbolTable, terms: Mapping[Mono, Poly] | None = None):
        self.st = st
        self.terms: dict[Mono, Poly] = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def _wrap(cls, st: SymbolTable, terms: dict) -> ExtForm:
        out = cls.__new__(cls)
        out.st = st
        out.terms = terms
        return out

    # constructors

    @classmethod
    def zero(cls, st: SymbolTable) -> ExtForm:
        return cls._wrap(st, {})

    @classmethod
    def scalar(cls, st: SymbolTable, c) -> ExtForm:
        if isinstance(c, Poly):
            return cls._wrap(st, {(): c} if c else {})
        return cls.scalar(st, Poly.const(st.fvt, c))

    @classmethod
    def function(cls, st: SymbolTable, name: str) -> ExtForm:
        p = Poly.var(st.fvt, name)
        return cls.scalar(st, p).normalized()

    @classmethod
    def gen(cls, st: SymbolTable, name: str, c=ONE) -> ExtForm:
        try:
            k = st.form_index[name]
        except KeyError:
            raise EdsError(f"unknown form {name!r}") from None
        return cls._wrap(st, {(k,): Poly.const(st.fvt, c)}) if not GaussScalar.coerce(c).is_zero() else cls.zero(st)

    @classmethod
    def symbol(cls, st: SymbolTable, name: str) -> ExtForm:
        if st.is_form(name):
            return cls.gen(st, name)
        if st.is_function(name):
            return cls.function(st, name)
        raise EdsError(f"undeclared symbol {name!r}")

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degrees(self) -> set[int]:
        return {len(m) for m in self.terms}

    def degree(self) -> int | None:
        """Common degree of all terms; ``None`` for zero or mixed forms."""
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def coefficient(self, *names: str) -> Poly:
        mono, sign = _sort_sign(self.st.form_index[nm] for nm in names)
        if mono is None:
            return Poly.zero(self.st.fvt)
        c = self.terms.get(mono)
        if c is None:
            return Poly.zero(self.st.fvt)
        return c if sign == 1 else -c

    def functions(self) -> set[str]:
        out: set[str] = set()
        for c in self.terms.values():
            out |= c.variables()
        return out

    def generators(self) -> set[str]:
        return {self.st.forms[g] for m in self.terms for g in m}

    # arithmetic

    def _check(self, other: ExtForm) -> None:
        if other.st is not self.st and other.st != self.st:
            raise EdsError("forms over different symbol tables")

    def _coerce(self, other) -> ExtForm:
        if isinstance(other, ExtForm):
            self._check(other)
            return other
        if isinstance(other, Poly):
            return ExtForm.scalar(self.st, other)
        try:
            return ExtForm.scalar(self.st, GaussScalar.coerce(other))
        except (TypeError, AlgebraError):
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return ExtForm._wrap(self.st, out)

    __radd__ = __add__

    def __neg__(self):
        return ExtForm._wrap(self.st, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> ExtForm:
        """Multiply by a function polynomial or scalar."""
        if not isinstance(c, Poly):
            c = GaussScalar.coerce(c)
            if c.is_zero():
                return ExtForm.zero(self.st)
            return ExtForm._wrap(self.st, {m: v.scale(c) for m, v in self.terms.items()})
        out = {}
        for m, v in self.terms.items():
            p = v * c
            if p:
                out[m] = p
        return ExtForm._wrap(self.st, out)

    def wedge(self, other: ExtForm) -> ExtForm:
        other = self._coerce(other)
        acc: dict[Mono, Poly] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m, sign = _merge_sign(ma, mb)
                if m is None:
                    continue
                p = ca * cb
                if sign < 0:
                    p = -p
                s = acc.get(m)
                acc[m] = p if s is None else s + p
        return ExtForm._wrap(self.st, {m: c for m, c in acc.items() if c})

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.wedge(other)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other.wedge(self)

    __xor__ = __mul__

    # structure maps

    def normalized(self) -> ExtForm:
        """Eliminate defined function symbols."""
        defs = self.st.defs
        if not defs:
            return self
        names = set(defs)
        out = {}
        for m, c in self.terms.items():
            if c.variables() & names:
                c = c.subs(defs)
            if c:
                out[m] = c
        return ExtForm._wrap(self.st, out)

    def conj(self) -> ExtForm:
        perm = self.st.form_conj
        acc: dict[Mono, Poly] = {}
        for m, c in self.terms.items():
            mm, sign = _sort_sign(perm[g] for g in m)
            cc = c.conj()
            if sign < 0:
                cc = -cc
            s = acc.get(mm)
            acc[mm] = cc if s is None else s + cc
        return ExtForm._wrap(self.st, {m: c for m, c in acc.items() if c}).normalized()

    def subs_functions(self, mapping: Mapping[str, Poly]) -> ExtForm:
        out = {}
        for m, c in self.terms.items():
            c = c.subs(mapping)
            if c:
                out[m] = c
        return ExtForm._wrap(self.st, out)

    def __eq__(self, other):
        if not isinstance(other, ExtForm):
            other = self._coerce(other) if not isinstance(other, ExtForm) else other
            if other is NotImplemented:
                return NotImplemented
        return self.st == other.st and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((m, hash(c)) for m, c in self.terms.items()))

    def __repr__(self):
        return f"ExtForm({format_form(self)})"

    def __str__(self):
        return format_form(self)


def _fmt_q(q) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_scalar_factor(c: GaussScalar) -> tuple[str, str]:
    """Sign and unsigned text of a scalar factor; empty text for 1."""
    if c.is_real():
        r = c.re
        return ("-" if r < 0 else "+"), ("" if abs(r) == 1 else _fmt_q(abs(r)))
    if c.re == 0:
        m = c.im
        return ("-" if m < 0 else "+"), ("i" if abs(m) == 1 else f"{_fmt_q(abs(m))}*i")
    im = c.im
    body = f"{_fmt_q(c.re)} {'-' if im < 0 else '+'} " + ("i" if abs(im) == 1 else f"{_fmt_q(abs(im))}*i")
    return "+", f"({body})"


def format_form(x: ExtForm) -> str:
    """Fully expanded text such as ``i*eta1^eta1~ - 2*u*u~*theta``.

    Products of functions are repeated factors, so the output reparses
    with the DSL expression grammar.
    """
    if not x.terms:
        return "0"
    names = x.st.fvt.names
    parts = []
    for m in sorted(x.terms, key=lambda m: (len(m), m)):
        c = x.terms[m]
        wedge = "^".join(x.st.forms[g] for g in m)
        for fm, s in c.sorted_terms():
            sign, scal = _fmt_scalar_factor(s)
            factors = [scal] if scal else []
            for k, e in enumerate(fm):
                factors += [names[k]] * e
            if wedge:
                factors.append(wedge)
            body = "*".join(factors) if factors else "1"
            parts.append((sign, body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def zero_poly(st: SymbolTable) -> Poly:
    return Poly.zero(st.fvt)


__all__ = ["EdsError", "SymbolTable", "ExtForm", "format_form", "ZERO"]
