"""Line-oriented text format for structure-equation systems.

::

    system NAME
    let n = INT
    form NAME [real | conj NAME]
    forms NAME[lo..hi] [real | conj NAME[lo..hi]]
    fn NAME [real | conj NAME]
    fns NAME[lo..hi] [real | conj NAME[lo..hi]]
    def NAME = EXPR              # defined function symbol (degree 0)
    rule d SYMBOL = EXPR         # SYMBOL may be NAME[k]: one rule per k
    matrix SIZE                  # optional Maurer-Cartan matrix
    labels L0 L1 ...
    entry ROW COL = EXPR

Expressions use ``+ - *``, ``^`` for the wedge product (``*`` wedges as
well), ``i``, rationals ``p/q``, parentheses, ``NAME[idx]`` for family
members, a trailing ``~`` for the automatic conjugate partner, and
``sum(k, EXPR)`` over ``k = 1..n`` or ``sum(k=lo..hi, EXPR)``.  ``#``
starts a comment.  Unqualified ``form``/``fn`` declarations are complex
with partner ``NAME~``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..algebra import I, GaussScalar, Poly
from .forms import EdsError, ExtForm, SymbolTable, format_form
from .system import EdsSystem


class ParseError(EdsError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*~?)|(?P<dots>\.\.)|(?P<op>[-+*^/()\[\],=~]))"
)
_RESERVED = {"i", "sum"}


@dataclass
class Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, offset: int = 0) -> list[Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            col = pos + 1 + offset + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", line, col)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(Tok(kind, m.group(kind), start + 1 + offset))
        pos = m.end()
    toks.append(Tok("end", "", len(text) + 1 + offset))
    return toks


# ---------------------------------------------------------------------------
# expression trees


@dataclass
class Num:
    value: GaussScalar


@dataclass
class Sym:
    name: str
    index: object | None
    bar: bool
    col: int


@dataclass
class Bin:
    op: str
    a: object
    b: object


@dataclass
class Neg:
    a: object


@dataclass
class Sum:
    var: str
    lo: object
    hi: object
    body: object


@dataclass
class IVar:
    name: str
    col: int


class _Parser:
    def __init__(self, toks: list[Tok], line: int):
        self.toks = toks
        self.k = 0
        self.line = line

    @property
    def cur(self) -> Tok:
        return self.toks[self.k]

    def err(self, msg: str, tok: Tok | None = None):
        tok = tok or self.cur
        raise ParseError(msg, self.line, tok.col)

    def take(self, text: str | None = None, kind: str | None = None) -> Tok:
        t = self.cur
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text is not None else kind
            got = repr(t.text) if t.kind != "end" else "end of line"
            self.err(f"expected {want}, got {got}")
        self.k += 1
        return t

    def at(self, text: str) -> bool:
        return self.cur.text == text and self.cur.kind != "end"

    def done(self):
        if self.cur.kind != "end":
            self.err(f"unexpected {self.cur.text!r}")

    # integer index expressions

    def index_expr(self):
        node = self.index_atom()
        while self.at("+") or self.at("-") or self.at("*"):
            op = self.take().text
            node = Bin(op, node, self.index_atom())
        return node

    def index_atom(self):
        t = self.cur
        if t.kind == "num":
            self.k += 1
            return int(t.text)
        if t.kind == "name" and not t.text.endswith("~"):
            self.k += 1
            return IVar(t.text, t.col)
        if self.at("("):
            self.take("(")
            node = self.index_expr()
            self.take(")")
            return node
        self.err("expected an index")

    # form expressions

    def expr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.take().text
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at("*") or self.at("^"):
            self.take()
            node = Bin("^", node, self.unary())
        return node

    def unary(self):
        if self.at("-"):
            self.take("-")
            return Neg(self.unary())
        if self.at("+"):
            self.take("+")
            return self.unary()
        return self.atom()

    def atom(self):
        t = self.cur
        if t.kind == "num":
            self.k += 1
            num = Fraction(int(t.text))
            if self.at("/"):
                self.take("/")
                den = self.take(kind="num")
                if int(den.text) == 0:
                    self.err("division by zero", den)
                num = num / int(den.text)
            return Num(GaussScalar(num))
        if self.at("("):
            self.take("(")
            node = self.expr()
            self.take(")")
            return node
        if t.kind == "name":
            if t.text == "i":
                self.k += 1
                return Num(I)
            if t.text == "sum":
                return self.sum_expr()
            self.k += 1
            name = t.text
            bar = False
            index = None
            if name.endswith("~"):
                name, bar = name[:-1], True
            if self.at("["):
                if bar:
                    self.err("write the conjugation mark after the index")
                self.take("[")
                index = self.index_expr()
                self.take("]")
                if self.at("~"):
                    self.take("~")
                    bar = True
            return Sym(name, index, bar, t.col)
        got = repr(t.text) if t.kind != "end" else "end of line"
        self.err(f"expected a term, got {got}")

    def sum_expr(self):
        self.take("sum")
        self.take("(")
        var = self.take(kind="name")
        lo: object = 1
        hi: object = IVar("n", var.col)
        if self.at("="):
            self.take("=")
            lo = self.index_expr()
            self.take(kind="dots")
            hi = self.index_expr()
        self.take(",")
        body = self.expr()
        self.take(")")
        return Sum(var.text, lo, hi, body)


# ---------------------------------------------------------------------------
# evaluation


class _Ctx:
    def __init__(self, lets: dict[str, int], line: int):
        self.lets = lets
        self.line = line

    def ival(self, node, env: dict[str, int]) -> int:
        if isinstance(node, int):
            return node
        if isinstance(node, IVar):
            if node.name in env:
                return env[node.name]
            if node.name in self.lets:
                return self.lets[node.name]
            raise ParseError(f"unknown index variable {node.name!r}", self.line, node.col)
        if isinstance(node, Bin):
            a, b = self.ival(node.a, env), self.ival(node.b, env)
            return a + b if node.op == "+" else a - b if node.op == "-" else a * b
        raise TypeError(node)


def _member(name: str, idx: int) -> str:
    return f"{name}{idx}"


def _eval(node, st: SymbolTable, ctx: _Ctx, env: dict[str, int]) -> ExtForm:
    if isinstance(node, Num):
        return ExtForm.scalar(st, node.value)
    if isinstance(node, Neg):
        return -_eval(node.a, st, ctx, env)
    if isinstance(node, Bin):
        a = _eval(node.a, st, ctx, env)
        b = _eval(node.b, st, ctx, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        return a.wedge(b)
    if isinstance(node, Sum):
        lo, hi = ctx.ival(node.lo, env), ctx.ival(node.hi, env)
        acc = ExtForm.zero(st)
        for k in range(lo, hi + 1):
            acc = acc + _eval(node.body, st, ctx, {**env, node.var: k})
        return acc
    if isinstance(node, Sym):
        name = node.name
        if node.index is not None:
            name = _member(name, ctx.ival(node.index, env))
        if node.bar:
            if st.is_form(name + "~") or st.is_function(name + "~"):
                name = name + "~"
            elif st.is_form(name) or st.is_function(name):
                name = st.conj_name(name)
            else:
                raise ParseError(f"undeclared symbol {name + '~'!r}", ctx.line, node.col)
        if not (st.is_form(name) or st.is_function(name)):
            raise ParseError(f"undeclared symbol {name!r}", ctx.line, node.col)
        return ExtForm.symbol(st, name)
    raise TypeError(node)


# ---------------------------------------------------------------------------
# statements


_HEAD = re.compile(r"^\s*(?P<kw>[A-Za-z]+)\b")


def _strip_comment(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


def _declaration(p: _Parser, kind: str, family: bool, lets: dict[str, int], line: int) -> list[tuple[str, str, int]]:
    ctx = _Ctx(lets, line)
    name_tok = p.take(kind="name")
    name = name_tok.text
    if name in _RESERVED:
        p.err(f"{name!r} cannot be declared", name_tok)
    members: list[str]
    if family:
        p.take("[")
        lo = ctx.ival(p.index_expr(), {})
        p.take(kind="dots")
        hi = ctx.ival(p.index_expr(), {})
        p.take("]")
        if hi < lo:
            p.err("empty index range", name_tok)
        idx = list(range(lo, hi + 1))
        members = [_member(name, k) for k in idx]
    else:
        members = [name]
    if p.at("real"):
        p.take("real")
        p.done()
        return [(m, m, name_tok.col) for m in members]
    if p.at("conj"):
        p.take("conj")
        other_tok = p.take(kind="name")
        other = other_tok.text
        if family:
            p.take("[")
            lo2 = ctx.ival(p.index_expr(), {})
            p.take(kind="dots")
            hi2 = ctx.ival(p.index_expr(), {})
            p.take("]")
            if (lo2, hi2) != (idx[0], idx[-1]):
                p.err("conjugate family must have the same index range", other_tok)
            partners = [_member(other, k) for k in idx]
        else:
            partners = [other]
        p.done()
        if other in _RESERVED:
            p.err(f"{other!r} cannot be declared", other_tok)
    else:
        p.done()
        partners = [m + "~" for m in members]
    pairs = [(m, q, name_tok.col) for m, q in zip(members, partners)]
    if family:
        # conjugates follow the whole family
        pairs += [(q, m, name_tok.col) for m, q in zip(members, partners)]
    return pairs


def parse_system(text: str) -> EdsSystem:
    """Parse DSL text into an :class:`EdsSystem`; errors carry line and column."""
    lets: dict[str, int] = {}
    name = "system"
    forms: list[tuple[str, str]] = []
    fns: list[tuple[str, str]] = []
    declared: dict[str, str] = {}
    primary: set[str] = set()
    later: list[tuple[str, int, list[Tok]]] = []
    matrix_size: int | None = None
    labels: list[str] | None = None
    saw_system = False

    def declare(pairs, target, line):
        for a, b, col in pairs:
            if a in primary:
                raise ParseError(f"{a!r} declared twice", line, col)
            if a.endswith("~") and a not in declared:
                # NAME~ only names the automatic partner of NAME
                raise ParseError(f"{a!r} is not the partner of a declared symbol", line, col)
            if a in declared and declared[a] != b:
                raise ParseError(f"{a!r} already paired with {declared[a]!r}", line, col)
            if b in declared and declared[b] != a:
                raise ParseError(f"{b!r} already paired with {declared[b]!r}", line, col)
            other_list = fns if target is forms else forms
            if any(a in pr or b in pr for pr in other_list):
                raise ParseError(f"{a!r} declared both as form and function", line, col)
            declared[a] = b
            declared[b] = a
            primary.add(a)
            target.append((a, b))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        m = _HEAD.match(body)
        if m is None:
            col = len(body) - len(body.lstrip()) + 1
            raise ParseError("expected a keyword", lineno, col)
        kw = m.group("kw")
        if kw == "labels":
            labels = body.split()[1:]
            continue
        if kw == "system":
            words = body.split()
            if saw_system:
                raise ParseError("second system header", lineno, m.start("kw") + 1)
            if len(words) != 2:
                raise ParseError("expected 'system NAME'", lineno, m.end("kw") + 1)
            name = words[1]
            saw_system = True
            continue
        toks = _tokenize(body, lineno)
        p = _Parser(toks, lineno)
        p.take(kind="name")
        if kw == "let":
            var = p.take(kind="name")
            p.take("=")
            val = _Ctx(lets, lineno).ival(p.index_expr(), {})
            p.done()
            lets[var.text] = val
        elif kw in ("form", "forms"):
            declare(_declaration(p, "form", kw == "forms", lets, lineno), forms, lineno)
        elif kw in ("fn", "fns"):
            declare(_declaration(p, "fn", kw == "fns", lets, lineno), fns, lineno)
        elif kw == "matrix":
            if matrix_size is not None:
                raise ParseError("second matrix declaration", lineno, toks[0].col)
            matrix_size = _Ctx(lets, lineno).ival(p.index_expr(), {})
            p.done()
            if matrix_size < 1:
                raise ParseError("matrix size must be positive", lineno, toks[1].col)
        elif kw in ("def", "rule", "entry"):
            later.append((kw, lineno, toks))
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno, toks[0].col)

    try:
        st0 = SymbolTable.create(forms, fns)
    except EdsError as exc:
        raise ParseError(str(exc), 1, 1) from None

    # definitions first, against the table without definitions
    defs: dict[str, Poly] = {}
    for kw, lineno, toks in later:
        if kw != "def":
            continue
        p = _Parser(toks, lineno)
        p.take("def")
        target = p.take(kind="name")
        if not st0.is_function(target.text):
            raise ParseError(f"def target {target.text!r} is not a declared function", lineno, target.col)
        p.take("=")
        node = p.expr()
        p.done()
        val = _eval(node, st0, _Ctx(lets, lineno), {})
        if val and val.degree() != 0:
            raise ParseError(f"definition of {target.text!r} must have degree 0", lineno, target.col)
        if target.text in defs:
            raise ParseError(f"{target.text!r} defined twice", lineno, target.col)
        defs[target.text] = val.terms.get((), Poly.zero(st0.fvt))
    try:
        st = st0.with_defs(defs) if defs else st0
    except EdsError as exc:
        raise ParseError(str(exc), 1, 1) from None

    rules: dict[str, ExtForm] = {}
    entries: dict[tuple[int, int], ExtForm] = {}
    for kw, lineno, toks in later:
        ctx = _Ctx(lets, lineno)
        p = _Parser(toks, lineno)
        p.take(kind="name")
        if kw == "rule":
            p.take("d")
            sym_tok = p.take(kind="name")
            base = sym_tok.text
            index_node = None
            if p.at("["):
                p.take("[")
                index_node = p.index_expr()
                p.take("]")
            p.take("=")
            node = p.expr()
            p.done()
            envs: list[tuple[str, dict[str, int]]]
            if index_node is None:
                envs = [(base, {})]
            elif isinstance(index_node, IVar) and index_node.name not in lets:
                members = sorted(
                    (int(s[len(base):]), s)
                    for s in list(st.forms) + list(st.fvt.names)
                    if s.startswith(base) and s[len(base):].isdigit()
                )
                if not members:
                    raise ParseError(f"no declared family {base!r}", lineno, sym_tok.col)
                envs = [(s, {index_node.name: k}) for k, s in members]
            else:
                envs = [(_member(base, ctx.ival(index_node, {})), {})]
            for sym, env in envs:
                if not (st.is_form(sym) or st.is_function(sym)):
                    raise ParseError(f"rule for undeclared symbol {sym!r}", lineno, sym_tok.col)
                if sym in st.defs:
                    raise ParseError(f"{sym!r} is defined and cannot carry a rule", lineno, sym_tok.col)
                if sym in rules:
                    raise ParseError(f"second rule for {sym!r}", lineno, sym_tok.col)
                val = _eval(node, st, ctx, env).normalized()
                want = 2 if st.is_form(sym) else 1
                if val and val.degree() != want:
                    raise ParseError(
                        f"d {sym} must be a {want}-form, got degree {sorted(val.degrees())}", lineno, sym_tok.col
                    )
                rules[sym] = val
        elif kw == "entry":
            if matrix_size is None:
                raise ParseError("entry before matrix declaration", lineno, toks[0].col)
            r_tok = p.cur
            r = ctx.ival(p.index_expr(), {})
            c = ctx.ival(p.index_expr(), {})
            p.take("=")
            node = p.expr()
            p.done()
            if not (0 <= r < matrix_size and 0 <= c < matrix_size):
                raise ParseError(f"entry ({r}, {c}) outside the matrix", lineno, r_tok.col)
            if (r, c) in entries:
                raise ParseError(f"entry ({r}, {c}) given twice", lineno, r_tok.col)
            val = _eval(node, st, ctx, {}).normalized()
            if val and val.degree() != 1:
                raise ParseError("matrix entries must be 1-forms", lineno, r_tok.col)
            entries[(r, c)] = val

    matrix = None
    if matrix_size is not None:
        matrix = [[entries.get((r, c), ExtForm.zero(st)) for c in range(matrix_size)] for r in range(matrix_size)]
        if labels is not None and len(labels) != matrix_size:
            raise ParseError(f"expected {matrix_size} labels, got {len(labels)}", 1, 1)
    try:
        return EdsSystem(name, st, rules, matrix, labels)
    except EdsError as exc:
        raise ParseError(str(exc), 1, 1) from None


def serialize_system(sys: EdsSystem) -> str:
    """Fully expanded DSL text; :func:`parse_system` reads it back to an equal system."""
    st = sys.st
    out = [f"system {sys.name}"]
    emitted: set[str] = set()
    forms = st.forms
    for k, nm in enumerate(forms):
        if nm in emitted:
            continue
        partner = forms[st.form_conj[k]]
        out.append(f"form {nm} real" if partner == nm else f"form {nm} conj {partner}")
        emitted.add(nm)
        # a partner right after its form is placed there implicitly
        if k + 1 < len(forms) and forms[k + 1] == partner:
            emitted.add(partner)
    fvt = st.fvt
    done: set[str] = set()
    for k, nm in enumerate(fvt.names):
        if nm in done:
            continue
        partner = fvt.names[fvt.partners[k]]
        out.append(f"fn {nm} real" if partner == nm else f"fn {nm} conj {partner}")
        done.update((nm, partner))
    for nm, val in st.defs.items():
        out.append(f"def {nm} = {format_form(ExtForm.scalar(st.with_defs({}), val))}")
    if sys.matrix is not None:
        out.append(f"matrix {len(sys.matrix)}")
        out.append("labels " + " ".join(sys.labels))
        for r, row in enumerate(sys.matrix):
            for c, e in enumerate(row):
                if e:
                    out.append(f"entry {r} {c} = {format_form(e)}")
    for sym, rule in sys.rules.items():
        out.append(f"rule d {sym} = {format_form(rule)}")
    return "\n".join(out) + "\n"
