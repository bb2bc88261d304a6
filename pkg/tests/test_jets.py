from fractions import Fraction

import numpy as np
import pytest

from crgap.algebra import GaussScalar, I
from crgap.ballmaps import BallMap, family
from crgap.jets import JetError, on_sphere, random_sphere_point, sff_by_differences, sff_from_map
from crgap.sff import numeric_rank

TOL = 1e-8
SEEDS = range(5)


def points(n, count=5):
    return [random_sphere_point(n, np.random.default_rng(seed)) for seed in range(count)]


def gamma_float(H):
    A = np.asarray(H.H, dtype=complex)
    return np.einsum("aij,akl->ijkl", A, A.conj())


def test_random_points_are_exactly_on_sphere():
    for n in (1, 2, 3, 5):
        for p in points(n, 8):
            assert on_sphere(p)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_linear_embedding_is_totally_geodesic(n):
    F = family("linear", n, N=n + 2)
    for p in points(n):
        res = sff_from_map(F, p)
        assert np.linalg.norm(np.asarray(res.H.H, dtype=complex)) < 1e-9
        assert numeric_rank(res.H, TOL).rank == 0


@pytest.mark.parametrize("n", [2, 3])
def test_whitney_has_rank_one(n):
    F = family("whitney", n)
    for p in points(n):
        nr = numeric_rank(sff_from_map(F, p).H, TOL)
        assert nr.rank == 1
        assert nr.flat_defect < 1e-9


def test_map_c_has_rank_one():
    F = family("dangelo_c", 3, s=Fraction(3, 5))
    for p in points(3):
        nr = numeric_rank(sff_from_map(F, p).H, TOL)
        assert nr.rank == 1 and nr.flat_defect < 1e-9


def test_generalized_numeric_instance_has_rank_one():
    F = family("generalized", 2, mu=2, y=[Fraction(1, 2)])
    for p in points(2, 3):
        assert numeric_rank(sff_from_map(F, p).H, TOL).rank == 1


@pytest.mark.parametrize(
    "F",
    [family("whitney", 2), family("whitney", 3), family("dangelo_c", 3, s=Fraction(3, 5))],
    ids=["whitney2", "whitney3", "mapC3"],
)
def test_cross_check_against_contour_differences(F):
    # H itself depends on the choice of normal frame; gamma does not.
    for p in points(F.n, 2):
        a = gamma_float(sff_from_map(F, p).H)
        b = gamma_float(sff_by_differences(F, p))
        assert np.linalg.norm(a - b) <= 1e-6 * np.linalg.norm(b)


def test_gamma_frame_independent_at_a_point():
    F = family("whitney", 2)
    p = points(2, 1)[0]
    G = gamma_float(sff_from_map(F, p).H)
    assert np.allclose(G, np.conjugate(np.transpose(G, (2, 3, 0, 1))))


def test_point_on_axis():
    F = family("whitney", 2)
    p = [GaussScalar(0), I, GaussScalar(0)]
    assert numeric_rank(sff_from_map(F, p).H, TOL).rank == 1
    p = ["0", "3/5", "4/5i"]
    assert numeric_rank(sff_from_map(F, p).H, TOL).rank == 1


def test_errors():
    F = family("whitney", 2)
    with pytest.raises(JetError):
        sff_from_map(F, [GaussScalar(1), GaussScalar(1), GaussScalar(0)])
    with pytest.raises(JetError):
        sff_from_map(F, [GaussScalar(1), GaussScalar(0)])
    comps = list(F.components)
    comps[0] = comps[0] * GaussScalar(2)
    with pytest.raises(JetError):
        sff_from_map(BallMap(2, tuple(comps)), points(2, 1)[0])
