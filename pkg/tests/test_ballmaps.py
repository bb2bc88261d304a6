import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crgap.algebra import GaussScalar, I, Poly, parse_poly
from crgap.ballmaps import (
    BallMap,
    BallMapError,
    compose_unitary,
    family,
    is_linearly_full,
    is_proper,
    rational_sqrt,
    squared_norm,
)


def scaled(F: BallMap, idx: int, lam) -> BallMap:
    comps = list(F.components)
    comps[idx] = comps[idx] * GaussScalar.coerce(lam)
    return BallMap(F.n, tuple(comps), F.relations, dict(F.squares))


def signed_permutation(size: int, perm, signs):
    zero, one = GaussScalar(0), GaussScalar(1)
    rows = [[zero] * size for _ in range(size)]
    units = [one, -one, I, -I]
    for r, c in enumerate(perm):
        rows[r][c] = units[signs[r] % 4]
    return rows


def all_families(n):
    yield family("linear", n)
    yield family("linear", n, N=n + 2)
    yield family("whitney", n)
    yield family("dangelo_c", n)
    yield family("dangelo_c", n, s=Fraction(3, 5))
    yield family("dangelo_c", n, s=Fraction(1, 2))
    for mu in range(1, 5):
        yield family("generalized", n, mu=mu)


@pytest.mark.parametrize("n", range(1, 7))
def test_every_family_member_is_proper(n):
    for F in all_families(n):
        ok, q = is_proper(F)
        assert ok, F.to_dict()
        assert q is not None


@pytest.mark.parametrize("n", range(1, 7))
def test_whitney_quotient(n):
    F = family("whitney", n)
    ok, q = is_proper(F)
    assert ok and q == parse_poly("1 + z0 z0~", F.vt)


def test_whitney_squared_norm_n1():
    F = family("whitney", 1)
    assert squared_norm(F) == parse_poly("z1 z1~ + z1 z1~ z0 z0~ + z0^2 z0~^2", F.vt)


def test_linear_squared_norm_is_sigma():
    F = family("linear", 2, N=4)
    assert squared_norm(F) == parse_poly("z0 z0~ + z1 z1~ + z2 z2~", F.vt)


def test_symbolic_c_squared_norm_has_no_c():
    F = family("dangelo_c", 2)
    norm = squared_norm(F)
    assert "C" not in norm.variables() and "c" not in norm.variables()
    assert norm.is_hermitian_real()


def test_dimensions():
    for n in range(1, 5):
        assert family("whitney", n).N == 2 * n
        assert family("dangelo_c", n).N == 2 * n + 1
        assert family("generalized", n, mu=1) == family("linear", n)


def test_generalized_mu2_matches_map_c():
    s2 = Fraction(9, 25)
    G = family("generalized", 3, mu=2, y=[s2])
    C = family("dangelo_c", 3, s=Fraction(3, 5))
    assert sorted(map(str, squared_norm(G).sorted_terms())) == sorted(map(str, squared_norm(C).sorted_terms()))
    assert is_proper(G)[0]


def test_generalized_numeric_y():
    F = family("generalized", 1, mu=3, y=[Fraction(1, 4), Fraction(1, 4)])
    ok, q = is_proper(F)
    assert ok and q == parse_poly("1 + 1/2 z0 z0~ + 1/4 z0^2 z0~^2", F.vt)


def test_family_errors():
    with pytest.raises(BallMapError):
        family("whitney", 0)
    with pytest.raises(BallMapError):
        family("generalized", 2)
    with pytest.raises(BallMapError):
        family("linear", 3, N=1)
    with pytest.raises(BallMapError):
        family("nope", 2)


def test_scaled_coordinate_is_not_proper():
    F = family("linear", 2)
    G = scaled(F, 2, 2)  # the z0 slot
    assert is_proper(G) == (False, None)


@pytest.mark.parametrize("kind", ["linear", "whitney", "dangelo_c"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_perturbing_any_component_breaks_properness(kind, n):
    F = family(kind, n, s=Fraction(3, 5)) if kind == "dangelo_c" else family(kind, n)
    for idx, comp in enumerate(F.components):
        if comp.is_zero():
            continue
        for lam in (2, Fraction(1, 2), GaussScalar(1, 1)):
            assert not is_proper(scaled(F, idx, lam))[0]


def test_unit_scaling_keeps_properness():
    F = family("whitney", 2)
    assert is_proper(scaled(F, 1, I))[0]
    assert is_proper(scaled(F, 0, GaussScalar(Fraction(3, 5), Fraction(4, 5))))[0]


def test_linear_fullness():
    assert is_linearly_full(family("whitney", 2)) == (True, None)
    F = family("whitney", 1)
    dup = BallMap(1, (F.components[0], F.components[0]) + F.components[1:])
    full, (a, b) = is_linearly_full(dup)
    assert not full and a[:2] == [GaussScalar(1), GaussScalar(-1)] and all(x.is_zero() for x in a[2:]) and b.is_zero()
    padded = family("linear", 2, N=3)
    full, (a, b) = is_linearly_full(padded)
    assert not full and [x.is_zero() for x in a] == [True, True, True, False] and b.is_zero()


def test_linear_fullness_needs_numbers():
    with pytest.raises(BallMapError):
        is_linearly_full(family("dangelo_c", 2))


def test_compose_identity_and_swaps():
    F = family("whitney", 2)
    ident = lambda k: signed_permutation(k, list(range(k)), [0] * k)
    assert compose_unitary(F, ident(3), ident(5)) == F
    swap_src = signed_permutation(3, [0, 2, 1], [0] * 3)
    rev_tgt = signed_permutation(5, [4, 3, 2, 1, 0], [0] * 5)
    for G in (compose_unitary(F, swap_src, ident(5)), compose_unitary(F, ident(3), rev_tgt)):
        ok, q = is_proper(G)
        assert ok and q == parse_poly("1 + z0 z0~", F.vt)


def test_compose_rejects_non_unitary():
    F = family("whitney", 1)
    bad = [[GaussScalar(2), GaussScalar(0)], [GaussScalar(0), GaussScalar(1)]]
    with pytest.raises(BallMapError):
        compose_unitary(F, bad, signed_permutation(3, [0, 1, 2], [0] * 3))


@given(st.data())
def test_unitary_invariance_of_squared_norm(data):
    kind = data.draw(st.sampled_from(["whitney", "dangelo_c", "linear"]))
    n = data.draw(st.integers(1, 3))
    F = family(kind, n, s=Fraction(3, 5)) if kind == "dangelo_c" else family(kind, n)
    ps = data.draw(st.permutations(range(n + 1)))
    pt = data.draw(st.permutations(range(F.N + 1)))
    ss = data.draw(st.lists(st.integers(0, 3), min_size=n + 1, max_size=n + 1))
    stt = data.draw(st.lists(st.integers(0, 3), min_size=F.N + 1, max_size=F.N + 1))
    G = compose_unitary(F, signed_permutation(n + 1, ps, ss), signed_permutation(F.N + 1, pt, stt))
    assert is_proper(G)[0]
    full_f = is_linearly_full(F)[0]
    assert is_linearly_full(G)[0] == full_f
    if list(ps) == list(range(n + 1)):
        assert squared_norm(G) == squared_norm(F)


def test_json_round_trip():
    for F in (family("whitney", 2), family("dangelo_c", 2), family("generalized", 2, mu=3)):
        assert BallMap.from_json(F.to_json()) == F
        assert is_proper(BallMap.from_json(F.to_json()))[0]


def test_json_without_squares_key():
    text = json.dumps({"n": 1, "N": 3, "components": ["z1", "c z0", "s z1 z0", "s z0^2"],
                       "relations": [{"var": "C", "replacement": "1 - S"}]})
    assert is_proper(BallMap.from_json(text))[0]


@pytest.mark.parametrize("text", ["[]", "{", '{"n": 1}', '{"n": 1, "N": 2, "components": ["z0"]}',
                                  '{"n": 1, "components": ["z0~"]}'])
def test_malformed_maps(text):
    with pytest.raises(BallMapError):
        BallMap.from_json(text)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(16, 25)) == Fraction(4, 5)
    assert rational_sqrt(Fraction(2)) is None
    assert rational_sqrt(Fraction(-1)) is None
