"""Polynomial maps between unit balls and their exact properness checks.

A :class:`BallMap` holds holomorphic components in ``z0..zn``.  Real
coefficients that are only known through their squares (``c`` with
``c^2 + s^2 = 1``, the Whitney-type recursion ``x_A^2 = y_A^2 + x_{A+1}^2``)
appear as real parameters; ``squares`` names the squared parameter standing
for each of them, and ``relations`` is a triangular substitution chain over
the squared names.  Squared norms are expressed in squared parameters only,
so every identity stays inside Q(i)[z, z~, params].
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .algebra import (
    ANTI,
    REAL,
    AlgebraError,
    GaussScalar,
    Poly,
    SubstitutionChain,
    VarTable,
    divide_by_sphere,
    format_poly,
    parse_poly,
)
from .linalg import is_unitary, nullspace

FAMILIES = ("linear", "whitney", "dangelo_c", "generalized")


class BallMapError(ValueError):
    pass


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    q = Fraction(q)
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def _table(n: int, params: Sequence[str], squares: dict[str, str], extra: Sequence[str] = ()) -> VarTable:
    plain = sorted(set(params))
    sq = sorted({squares[p] for p in plain if p in squares} | set(extra))
    return VarTable.sphere(n, plain + [s for s in sq if s not in plain])


@dataclass(eq=False)
class BallMap:
    n: int
    components: tuple[Poly, ...]
    relations: SubstitutionChain = field(default_factory=SubstitutionChain)
    squares: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.components = tuple(self.components)
        if self.n < 1:
            raise BallMapError("source dimension n must be >= 1")
        if not self.components:
            raise BallMapError("a ball map needs at least one component")
        vt = self.components[0].vt
        for f in self.components:
            if f.vt != vt:
                raise BallMapError("components over different variable tables")
            for m in f.terms:
                for k, e in enumerate(m):
                    if e and vt.kinds[k] == ANTI:
                        raise BallMapError(f"component {f} is not holomorphic")
        if all(f.is_zero() for f in self.components):
            raise BallMapError("all components vanish")
        for k in range(self.n + 1):
            if f"z{k}" not in vt:
                raise BallMapError(f"variable table lacks z{k}")

    @property
    def vt(self) -> VarTable:
        return self.components[0].vt

    @property
    def N(self) -> int:
        return len(self.components) - 1

    def params(self) -> list[str]:
        return [nm for nm, kind in zip(self.vt.names, self.vt.kinds) if kind == REAL]

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "N": self.N,
            "components": [format_poly(f) for f in self.components],
            "relations": [{"var": v, "replacement": format_poly(r)} for v, r in self.relations],
        }
        if self.squares:
            out["squares"] = dict(sorted(self.squares.items()))
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def __eq__(self, other):
        return isinstance(other, BallMap) and self.to_dict() == other.to_dict()

    @classmethod
    def from_dict(cls, data: dict) -> BallMap:
        try:
            n = int(data["n"])
            comps = list(data["components"])
            rels = list(data.get("relations", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise BallMapError(f"malformed map description: {exc}") from None
        if "N" in data and int(data["N"]) != len(comps) - 1:
            raise BallMapError(f"N={data['N']} but {len(comps)} components given")
        ident = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
        zvar = re.compile(r"z\d+$")

        def names(text: str) -> list[str]:
            return [t for t in ident.findall(text) if not zvar.match(t) and t != "i"]

        comp_params = sorted({p for c in comps for p in names(c)})
        rel_names = sorted({r["var"] for r in rels} | {p for r in rels for p in names(r["replacement"])})
        squares = data.get("squares")
        if squares is None:
            squares = {p: p.upper() for p in comp_params if p.upper() != p}
        vt = _table(n, comp_params, squares, [x for x in rel_names if x not in comp_params])
        try:
            polys = [parse_poly(c, vt) for c in comps]
            chain = SubstitutionChain((r["var"], parse_poly(r["replacement"], vt)) for r in rels)
        except (AlgebraError, KeyError) as exc:
            raise BallMapError(f"malformed map description: {exc}") from None
        return cls(n, tuple(polys), chain, dict(squares))

    @classmethod
    def from_json(cls, text: str) -> BallMap:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BallMapError(f"map file is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise BallMapError("map file must hold a JSON object")
        return cls.from_dict(data)


# ---------------------------------------------------------------------------
# exact checks


def _square_params(p: Poly, squares: dict[str, str]) -> Poly:
    """Rewrite even powers ``c^(2k)`` of a squared parameter as ``C^k``."""
    vt = p.vt
    pairs = [(vt.index(a), vt.index(b)) for a, b in squares.items() if a in vt]
    if not pairs:
        return p
    out: dict = {}
    for m, c in p.terms.items():
        e = list(m)
        for a, b in pairs:
            if e[a] % 2:
                raise BallMapError(
                    f"odd power of {vt.names[a]} in squared norm; not expressible in {vt.names[b]}"
                )
            e[b] += e[a] // 2
            e[a] = 0
        key = tuple(e)
        out[key] = out[key] + c if key in out else c
    return Poly(vt, out)


def squared_norm(F: BallMap) -> Poly:
    """``sum_A F^A conj(F^A)`` in squared parameters, relations applied."""
    total = Poly.zero(F.vt)
    for f in F.components:
        total = total + f * f.conj()
    return F.relations.apply(_square_params(total, F.squares))


def is_proper(F: BallMap) -> tuple[bool, Poly | None]:
    """Exact test that ``|F|^2 - 1`` lies in the ideal of ``sigma - 1``."""
    q, r = divide_by_sphere(squared_norm(F) - 1, F.n)
    if r.is_zero():
        return True, q
    return False, None


def is_linearly_full(F: BallMap) -> tuple[bool, tuple[list[GaussScalar], GaussScalar] | None]:
    """Whether ``1, F^0, ..., F^N`` are linearly independent.

    On failure returns ``(a, b)`` with ``sum_A a_A F^A = b`` identically and
    ``a`` normalized so its first nonzero entry is 1.
    """
    if F.params() and any(f.variables() & set(F.params()) for f in F.components):
        raise BallMapError("linear fullness needs numeric coefficients; instantiate parameters first")
    monos = sorted({m for f in F.components for m in f.terms} | {(0,) * len(F.vt)})
    cols = [f.terms for f in F.components] + [{(0,) * len(F.vt): GaussScalar(1)}]
    zero = GaussScalar(0)
    mat = [[col.get(m, zero) for col in cols] for m in monos]
    null = nullspace(mat)
    if not null:
        return True, None
    v = null[0]
    a, c = v[:-1], v[-1]
    lead = next((x for x in v if not x.is_zero()))
    a = [x / lead for x in a]
    return False, (a, -c / lead)


def compose_unitary(F: BallMap, u_src, u_tgt) -> BallMap:
    """``U_tgt o F o U_src`` for exactly unitary matrices over Q(i)."""
    us = [[GaussScalar.coerce(x) for x in row] for row in u_src]
    ut = [[GaussScalar.coerce(x) for x in row] for row in u_tgt]
    if len(us) != F.n + 1 or not is_unitary(us):
        raise BallMapError("source matrix is not an exact unitary of size n+1")
    if len(ut) != F.N + 1 or not is_unitary(ut):
        raise BallMapError("target matrix is not an exact unitary of size N+1")
    vt = F.vt
    z = [Poly.var(vt, f"z{k}") for k in range(F.n + 1)]
    new_z = {}
    for k in range(F.n + 1):
        acc = Poly.zero(vt)
        for j in range(F.n + 1):
            acc = acc + z[j] * us[k][j]
        new_z[f"z{k}"] = acc
    pulled = [f.subs(new_z) for f in F.components]
    comps = []
    for a in range(F.N + 1):
        acc = Poly.zero(vt)
        for b in range(F.N + 1):
            if not ut[a][b].is_zero():
                acc = acc + pulled[b] * ut[a][b]
        comps.append(acc)
    return BallMap(F.n, tuple(comps), F.relations, dict(F.squares))


# ---------------------------------------------------------------------------
# families


def _build(n: int, layout: list[tuple[GaussScalar | str, dict[str, int]]], chain_steps, squares) -> BallMap:
    params = sorted({c for c, _ in layout if isinstance(c, str)})
    extra = sorted({nm for nm, _ in chain_steps} | {v for _, r in chain_steps for v in _names(r)})
    vt = _table(n, params, squares, [x for x in extra if x not in params])
    comps = []
    for c, mono in layout:
        if isinstance(c, str):
            comps.append(Poly.monomial(vt, {c: 1, **mono}))
        else:
            comps.append(Poly.monomial(vt, mono, c))
    chain = SubstitutionChain((nm, _lin(vt, r)) for nm, r in chain_steps)
    used = {c for c, _ in layout if isinstance(c, str)}
    return BallMap(n, tuple(comps), chain, {p: squares[p] for p in sorted(used)})


def _names(r: dict) -> list[str]:
    return [k for k in r if k != 1]


def _lin(vt: VarTable, r: dict) -> Poly:
    """Affine combination ``{name: coeff, 1: const}`` as a Poly."""
    out = Poly.zero(vt)
    for k, c in r.items():
        out = out + (Poly.const(vt, c) if k == 1 else Poly.var(vt, k) * c)
    return out


def family(
    kind: str,
    n: int,
    N: int | None = None,
    mu: int | None = None,
    y: Sequence[Fraction] | None = None,
    s: Fraction | None = None,
) -> BallMap:
    """Members of the built-in families.

    ``linear`` embeds into ``C^{N+1}`` (default ``N = n``); ``whitney`` is
    ``(z^i, z^i z^0, (z^0)^2)``; ``dangelo_c`` is
    ``(z^i, c z^0, s z^i z^0, s (z^0)^2)`` with ``c^2 = 1 - s^2``;
    ``generalized`` is the Whitney-type family of level ``mu`` with optional
    rational values ``y`` for ``Y_2..Y_mu`` (or all of ``Y_1..Y_mu``).
    """
    if n < 1:
        raise BallMapError("n must be >= 1")
    ONE_ = GaussScalar(1)
    zi = [f"z{k}" for k in range(1, n + 1)]
    if kind == "linear":
        N = n if N is None else N
        if N < n:
            raise BallMapError("linear embedding needs N >= n")
        layout = [(ONE_, {z: 1}) for z in zi] + [(ONE_, {"z0": 1})]
        layout += [(GaussScalar(0), {})] * (N - n)
        return _build(n, layout, [], {})
    if kind == "whitney":
        layout = [(ONE_, {z: 1}) for z in zi] + [(ONE_, {z: 1, "z0": 1}) for z in zi]
        layout.append((ONE_, {"z0": 2}))
        return _build(n, layout, [], {})
    if kind == "dangelo_c":
        if s is None:
            cc, ss = "c", "s"
            chain = [("C", {1: 1, "S": -1})]
        else:
            s = Fraction(s)
            if not 0 <= s <= 1:
                raise BallMapError("s must lie in [0, 1]")
            c = rational_sqrt(1 - s * s)
            ss = GaussScalar(s)
            cc = GaussScalar(c) if c is not None else "c"
            chain = [] if c is not None else [("C", {1: 1 - s * s})]
        layout = [(ONE_, {z: 1}) for z in zi] + [(cc, {"z0": 1})]
        layout += [(ss, {z: 1, "z0": 1}) for z in zi] + [(ss, {"z0": 2})]
        return _build(n, layout, chain, {"c": "C", "s": "S"})
    if kind == "generalized":
        return _generalized(n, mu, y)
    raise BallMapError(f"unknown family {kind!r}; expected one of {FAMILIES}")


def _generalized(n: int, mu: int | None, y: Sequence[Fraction] | None) -> BallMap:
    if mu is None or mu < 1:
        raise BallMapError("generalized family needs mu >= 1")
    squares = {f"x{a}": f"X{a}" for a in range(2, mu + 1)}
    squares.update({f"y{a}": f"Y{a}" for a in range(1, mu + 1)})
    values: dict[str, Fraction] = {}
    if y is not None:
        y = [Fraction(v) for v in y]
        if len(y) == mu - 1:
            y = [1 - sum(y, Fraction(0))] + y
        if len(y) != mu:
            raise BallMapError(f"expected {mu - 1} or {mu} Y-values, got {len(y)}")
        if any(v < 0 for v in y) or sum(y) != 1:
            raise BallMapError("Y-values must be non-negative and sum to 1")
        for a in range(1, mu + 1):
            values[f"Y{a}"] = y[a - 1]
            values[f"X{a}"] = sum(y[a - 1:], Fraction(0))
    elif mu == 1:
        values["Y1"] = Fraction(1)

    def coeff(param: str):
        sq = squares[param]
        if sq in values:
            r = rational_sqrt(values[sq])
            if r is not None:
                return GaussScalar(r)
        return param

    layout = []
    for a in range(1, mu + 1):
        x = GaussScalar(1) if a == 1 else coeff(f"x{a}")
        layout += [(x, {f"z{k}": 1, "z0": a - 1}) for k in range(1, n + 1)]
    for a in range(1, mu + 1):
        layout.append((coeff(f"y{a}"), {"z0": a}))
    used_sq = {squares[c] for c, _ in layout if isinstance(c, str)}
    chain: list[tuple[str, dict]] = []
    if y is not None:
        chain = [(nm, {1: values[nm]}) for nm in sorted(used_sq)]
    else:
        for a in range(2, mu + 1):
            chain.append((f"X{a}", {f"Y{a}": 1, f"X{a + 1}": 1} if a < mu else {f"Y{a}": 1}))
        if mu > 1:
            chain.append(("Y1", {1: 1, **{f"Y{a}": -1 for a in range(2, mu + 1)}}))
    return _build(n, layout, chain, squares)
