from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crgap.algebra import GaussScalar, I, Poly
from crgap.eds import (
    SABOTAGE,
    EdsError,
    EdsSystem,
    ExtForm,
    SymbolTable,
    check_closure,
    conj_form,
    d,
    format_form,
    parse_system,
    rank1_system,
    su_maurer_cartan,
)

from conftest import scalars


def scenario(name):
    return parse_system(resources.files("crgap.eds").joinpath("scenarios", name).read_text())


CONTACT = scenario("contact-functions.eds")
ST = CONTACT.st


@st.composite
def coefficients(draw):
    vt = ST.fvt
    acc = Poly.zero(vt)
    for _ in range(draw(st.integers(0, 2))):
        mono = tuple(draw(st.integers(0, 1)) for _ in vt.names)
        acc = acc + Poly(vt, {mono: draw(scalars)})
    return acc


@st.composite
def forms(draw, degree):
    gens = ST.forms
    acc = ExtForm.zero(ST)
    for _ in range(draw(st.integers(0, 3))):
        term = ExtForm.scalar(ST, draw(coefficients()))
        for name in draw(st.lists(st.sampled_from(gens), min_size=degree, max_size=degree)):
            term = term.wedge(ExtForm.gen(ST, name))
        acc = acc + term
    return acc


# exterior algebra


def test_basic_wedge_rules():
    th, e1 = ExtForm.gen(ST, "theta"), ExtForm.gen(ST, "eta1")
    assert th.wedge(th).is_zero()
    assert th.wedge(e1) == -e1.wedge(th)
    assert (th ^ e1).degree() == 2
    assert ExtForm.zero(ST).degree() is None


@given(forms(1), forms(1), forms(2))
def test_associative_and_graded_commutative(a, b, c):
    assert a.wedge(b).wedge(c) == a.wedge(b.wedge(c))
    assert a.wedge(b) == -b.wedge(a)
    assert a.wedge(c) == c.wedge(a)
    assert a.wedge(a).is_zero()


@given(forms(1), forms(2))
def test_conj_is_involutive_and_multiplicative(a, b):
    assert a.conj().conj() == a
    assert conj_form(a.wedge(b)) == a.conj().wedge(b.conj())


@given(st.sampled_from([0, 1, 2]), st.sampled_from([0, 1, 2]), st.data())
def test_leibniz(p, q, data):
    a, b = data.draw(forms(p)), data.draw(forms(q))
    lhs = d(a.wedge(b), CONTACT)
    sign = -1 if p % 2 else 1
    rhs = d(a, CONTACT).wedge(b) + a.wedge(d(b, CONTACT)).scale(GaussScalar(sign))
    assert lhs == rhs


@given(st.sampled_from([0, 1, 2]), st.data())
def test_d_squared_vanishes_on_closed_system(p, data):
    a = data.draw(forms(p))
    assert d(d(a, CONTACT), CONTACT).is_zero()


def test_d_of_function_and_real_generator():
    w = ExtForm.function(ST, "w")
    assert format_form(d(w, CONTACT)) == format_form(CONTACT.rule("w"))
    theta = ExtForm.gen(ST, "theta")
    assert d(theta, CONTACT).conj() == d(theta, CONTACT)


def test_symbol_table_partners():
    st_ = SymbolTable.create([("theta", "theta"), ("eta", "etab")], [("u", "u~"), ("r", "r")])
    assert st_.forms == ("theta", "eta", "etab")
    assert st_.conj_name("etab") == "eta" and st_.is_real("theta") and st_.is_real("r")
    assert ExtForm.gen(st_, "eta").conj() == ExtForm.gen(st_, "etab")
    with pytest.raises(EdsError):
        ExtForm.gen(st_, "zeta")


def test_mixed_tables_rejected():
    other = SymbolTable.create([("theta", "theta")])
    with pytest.raises(EdsError):
        ExtForm.gen(ST, "theta") + ExtForm.gen(other, "theta")


def test_rule_degree_validated():
    st_ = SymbolTable.create([("theta", "theta")], [("f", "f")])
    th = ExtForm.gen(st_, "theta")
    with pytest.raises(EdsError):
        EdsSystem("x", st_, {"theta": th})
    with pytest.raises(EdsError):
        EdsSystem("x", st_, {"f": ExtForm.scalar(st_, 1)})
    with pytest.raises(EdsError):
        EdsSystem("x", st_, {"nope": th})


def test_missing_rule_reported():
    st_ = SymbolTable.create([("theta", "theta"), ("eta", "etab")])
    sysm = EdsSystem("x", st_, {"theta": ExtForm.zero(st_)})
    with pytest.raises(EdsError):
        check_closure(sysm)


# built-in systems


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_su_maurer_cartan_closes(N):
    rep = check_closure(su_maurer_cartan(N))
    assert rep.all_zero
    assert rep.to_dict()["checked"] >= (N + 2) ** 2


def test_su_theta_rule_has_levi_form():
    s = su_maurer_cartan(2)
    dtheta = s.rule("theta")
    for k in (1, 2):
        assert dtheta.coefficient(f"eta{k}", f"eta{k}~") == Poly.const(s.st.fvt, -I)


@pytest.mark.parametrize("n,r", [(4, 1), (4, 2), (5, 3)])
def test_rank1_system_closes(n, r):
    rep = check_closure(rank1_system(n, r))
    assert rep.all_zero, rep.to_dict()["nonzero"]


@pytest.mark.parametrize("sabotage", SABOTAGE)
def test_sabotage_detected(sabotage):
    rep = check_closure(rank1_system(4, 1, sabotage))
    assert not rep.all_zero
    assert rep.to_dict()["nonzero"]


def test_rank1_entries():
    s = rank1_system(4, 1)
    L, M = s.labels, s.matrix
    fvt = s.st.fvt
    assert M[L.index("n'")][L.index("N+1")] == ExtForm.gen(s.st, "eta4").scale(Poly.var(fvt, "u"))
    assert format_form(M[L.index("a1")][L.index("n'")]) == "-i*u~*ua1*theta - i*ua1*eta4~"
    assert s.rule("theta").coefficient("eta1", "eta1~") == Poly.const(fvt, -I)


def test_rank1_argument_errors():
    with pytest.raises(EdsError):
        rank1_system(3, 1)
    with pytest.raises(EdsError):
        rank1_system(4, -1)
    with pytest.raises(EdsError):
        rank1_system(4, 1, "nothing")


def test_residual_report_shape():
    rep = check_closure(scenario("bad-system.eds"))
    doc = rep.to_dict()
    assert not doc["all_zero"] and set(doc["nonzero"]) >= {"dd theta"}
    assert all(isinstance(v, str) for v in doc["nonzero"].values())
