"""Structure-equation systems, exterior derivative and the d^2 closure check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..algebra import Poly
from .forms import EdsError, ExtForm, SymbolTable, format_form


class EdsSystem:
    """Symbols, rules for ``d`` and an optional Maurer-Cartan matrix.

    ``rules`` gives ``d`` of generators (2-forms) and functions (1-forms).
    A symbol without a rule whose conjugate has one gets the conjugated
    rule.  Defined function symbols never need a rule: they are eliminated
    before ``d`` sees them.  ``matrix`` (with ``labels`` naming the rows)
    is a square array of 1-forms for which ``d pi = -pi ^ pi`` is claimed.
    """

    def __init__(
        self,
        name: str,
        st: SymbolTable,
        rules: Mapping[str, ExtForm],
        matrix: Sequence[Sequence[ExtForm]] | None = None,
        labels: Sequence[str] | None = None,
    ):
        self.name = name
        self.st = st
        self.rules: dict[str, ExtForm] = {}
        for sym, form in rules.items():
            if not (st.is_form(sym) or st.is_function(sym)):
                raise EdsError(f"rule for undeclared symbol {sym!r}")
            if sym in st.defs:
                raise EdsError(f"{sym!r} is defined; it cannot also carry a rule")
            want = 2 if st.is_form(sym) else 1
            if form.st != st:
                raise EdsError(f"rule for {sym!r} uses another symbol table")
            form = form.normalized()
            if form and form.degree() != want:
                raise EdsError(f"rule d {sym} must be a {want}-form, got degrees {sorted(form.degrees())}")
            self.rules[sym] = form
        self.matrix = [list(row) for row in matrix] if matrix is not None else None
        if self.matrix is not None:
            size = len(self.matrix)
            if any(len(row) != size for row in self.matrix):
                raise EdsError("structure matrix must be square")
            for r, row in enumerate(self.matrix):
                for c, e in enumerate(row):
                    if e.st != st:
                        raise EdsError(f"matrix entry ({r}, {c}) uses another symbol table")
                    if e and e.degree() != 1:
                        raise EdsError(f"matrix entry ({r}, {c}) is not a 1-form")
            self.labels = list(labels) if labels is not None else [str(k) for k in range(size)]
            if len(self.labels) != size:
                raise EdsError("one label per matrix row expected")
        else:
            self.labels = list(labels or [])
        self._full = self._complete_rules()

    def _complete_rules(self) -> dict[str, ExtForm]:
        st = self.st
        full = dict(self.rules)
        for sym in list(st.forms) + list(st.fvt.names):
            if sym in full or sym in st.defs:
                continue
            partner = st.conj_name(sym)
            if partner in self.rules:
                full[sym] = self.rules[partner].conj()
        return full

    # rules

    def rule(self, sym: str) -> ExtForm:
        try:
            return self._full[sym]
        except KeyError:
            raise EdsError(f"no rule for d {sym}") from None

    def explicit_rule(self, sym: str) -> ExtForm | None:
        return self.rules.get(sym)

    def missing_rules(self) -> list[str]:
        st = self.st
        return [s for s in list(st.forms) + list(st.fvt.names) if s not in self._full and s not in st.defs]

    # exterior derivative

    def d(self, x: ExtForm) -> ExtForm:
        """Exterior derivative by the graded Leibniz rule."""
        st = self.st
        x = x.normalized()
        acc = ExtForm.zero(st)
        fnames = st.fvt.names
        one = Poly.const(st.fvt, 1)
        for mono, c in x.terms.items():
            body = ExtForm._wrap(st, {mono: one})
            # d(coefficient) ^ monomial
            for k in sorted({k for m in c.terms for k, e in enumerate(m) if e}):
                dc = c.diff(fnames[k])
                if dc:
                    acc = acc + self.rule(fnames[k]).scale(dc).wedge(body)
            # coefficient * d(monomial)
            for j, g in enumerate(mono):
                dg = self.rule(st.forms[g])
                if not dg:
                    continue
                left = ExtForm._wrap(st, {mono[:j]: c})
                right = ExtForm._wrap(st, {mono[j + 1:]: one})
                term = left.wedge(dg).wedge(right)
                acc = acc + (term if j % 2 == 0 else -term)
        return acc.normalized()

    def mc_product(self, r: int, c: int) -> ExtForm:
        """``(pi ^ pi)`` at row ``r``, column ``c``."""
        m = self.matrix
        if m is None:
            raise EdsError("system has no structure matrix")
        acc = ExtForm.zero(self.st)
        for k in range(len(m)):
            if m[r][k] and m[k][c]:
                acc = acc + m[r][k].wedge(m[k][c])
        return acc.normalized()

    def conj_form(self, x: ExtForm) -> ExtForm:
        return x.conj()

    def __eq__(self, other):
        if not isinstance(other, EdsSystem):
            return NotImplemented
        return (
            self.name == other.name
            and self.st == other.st
            and self.rules == other.rules
            and self.matrix == other.matrix
            and (self.matrix is None or self.labels == other.labels)
        )


def d(x: ExtForm, sys: EdsSystem) -> ExtForm:
    return sys.d(x)


def conj_form(x: ExtForm) -> ExtForm:
    return x.conj()


@dataclass
class ResidualReport:
    """Residual of every checked identity; the check passes iff all vanish."""

    residuals: dict[str, ExtForm] = field(default_factory=dict)

    @property
    def all_zero(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def nonzero(self) -> dict[str, ExtForm]:
        return {k: v for k, v in self.residuals.items() if not v.is_zero()}

    def to_dict(self) -> dict:
        bad = self.nonzero()
        return {
            "all_zero": not bad,
            "checked": len(self.residuals),
            "nonzero": {k: format_form(v) for k, v in bad.items()},
        }


def check_closure(sys: EdsSystem) -> ResidualReport:
    """Residuals whose vanishing means the system is compatible with d^2 = 0.

    * ``d pi[r,c] + (pi ^ pi)[r,c]`` for every matrix entry;
    * ``d(d s)`` for every generator and function with a rule;
    * ``d(value) - d s`` for each defined function symbol ``s``, where
      ``d s`` is conjugated from its partner's rule;
    * ``conj(d s) - d(conj s)`` whenever both rules are given explicitly,
      including real symbols.
    """
    st = sys.st
    missing = sys.missing_rules()
    if missing:
        raise EdsError(f"no rule for d {missing[0]}")
    rep = ResidualReport()
    if sys.matrix is not None:
        lab = sys.labels
        for r, row in enumerate(sys.matrix):
            for c, e in enumerate(row):
                rep.residuals[f"pi[{lab[r]},{lab[c]}]"] = sys.d(e) + sys.mc_product(r, c)
    for sym in list(st.forms) + list(st.fvt.names):
        if sym in st.defs:
            continue
        rep.residuals[f"dd {sym}"] = sys.d(sys.rule(sym))
    for sym, val in st.defs.items():
        partner = st.conj_name(sym)
        if partner != sym and partner in sys._full:
            rep.residuals[f"def {sym}"] = sys.d(ExtForm.scalar(st, val)) - sys.rule(partner).conj()
    for sym, rule in sys.rules.items():
        partner = st.conj_name(sym)
        if partner == sym or (partner in sys.rules and sym < partner):
            other = sys.rules[partner]
            rep.residuals[f"conj {sym}"] = rule.conj() - other
    return rep
