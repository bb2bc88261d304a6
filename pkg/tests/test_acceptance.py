"""Acceptance criteria 1-10, one pass/fail line each.

Run standalone with ``python3 tests/test_acceptance.py``; under pytest the
lines are also printed in the terminal summary.
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from crgap.algebra import GaussScalar, parse_poly
from crgap.ballmaps import BallMap, family, is_proper
from crgap.eds import SABOTAGE, ParseError, check_closure, parse_system, rank1_system, serialize_system, su_maurer_cartan
from crgap.jets import random_sphere_point, sff_by_differences, sff_from_map
from crgap.sff import (
    SffTensor,
    bochner_flat,
    contract,
    hermitian_poly,
    quartic_from_poly,
    rank1_model,
    rank_report,
    sigma_poly,
    vtable,
)
from crgap.sff import numeric_rank

# pinned thresholds
PROPER_BUDGET_S = 5.0
IWATANI_BUDGET_S = 1.0
MC_BUDGET_S = 10.0
RANK1_BUDGET_S = 60.0
LINEAR_NORM_TOL = 1e-9
RANK_TOL = 1e-8
CROSS_REL_TOL = 1e-6
JET_POINTS = 5
CROSS_POINTS = 2
CONTRACTION_SAMPLES = 50

RESULTS: dict[int, tuple[bool, str]] = {}


def record(num: int, ok: bool, detail: str) -> bool:
    RESULTS[num] = (ok, detail)
    return ok


def line(num: int) -> str:
    ok, detail = RESULTS[num]
    return f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


# 1


def _properness_suite():
    for n in range(1, 7):
        yield f"linear n={n}", family("linear", n)
        yield f"whitney n={n}", family("whitney", n)
        yield f"dangelo_c n={n}", family("dangelo_c", n)
        for mu in range(1, 5):
            yield f"generalized n={n} mu={mu}", family("generalized", n, mu=mu)


def criterion_1() -> bool:
    t0 = time.perf_counter()
    failed = [label for label, F in _properness_suite() if not is_proper(F)[0]]
    quotients_ok = all(
        is_proper(F)[1] == parse_poly("1 + z0 z0~", F.vt) for F in (family("whitney", n) for n in range(1, 7))
    )
    dt = time.perf_counter() - t0
    ok = not failed and quotients_ok and dt < PROPER_BUDGET_S
    return record(1, ok, f"properness of A/B/C and generalized mu=1..4, n=1..6; whitney quotient exact: {quotients_ok}; "
                         f"failures: {failed or 'none'}; {dt:.2f}s (< {PROPER_BUDGET_S}s)")


# 2


def _scaled(F: BallMap, idx: int) -> BallMap:
    comps = list(F.components)
    comps[idx] = comps[idx] * GaussScalar(2)
    return BallMap(F.n, tuple(comps), F.relations, dict(F.squares))


def criterion_2() -> bool:
    survivors = []
    count = 0
    for label, F in _properness_suite():
        if F.n > 3:
            continue
        for idx, comp in enumerate(F.components):
            if comp.is_zero():
                continue
            count += 1
            if is_proper(_scaled(F, idx))[0]:
                survivors.append(f"{label}[{idx}]")
    return record(2, not survivors, f"{count} single-component doublings, still proper: {survivors or 'none'}")


# 3


def criterion_3() -> bool:
    t0 = time.perf_counter()
    bad = []
    for n in range(2, 7):
        rep = rank_report(rank1_model(n, 1))
        h_ok = rep.bochner_flat and all(
            rep.h[p, q] == (GaussScalar(4) if p == q == n - 1 else GaussScalar(0)) for p in range(n) for q in range(n)
        )
        k = rep.k
        equality = rep.m == n and 2 * rep.m == k * (2 * n - k + 1)
        if not (h_ok and len(rep.asymptotic_basis) == n - 1 and k == 1 and rep.bound_ok and equality):
            bad.append(n)
    dt = time.perf_counter() - t0
    ok = not bad and dt < IWATANI_BUDGET_S
    return record(3, ok, f"rank-1 model n=2..6: h = 4 e_n e_n*, kernel n-1, k=1, bound equality; "
                         f"bad n: {bad or 'none'}; {dt:.3f}s (< {IWATANI_BUDGET_S}s)")


# 4


def criterion_4() -> bool:
    H = SffTensor.from_entries(2, 1, [(1, 1, 1, 1)])
    flat = bochner_flat(H) is not None
    rep = rank_report(H)
    ok = not flat and not rep.bochner_flat
    return record(4, ok, f"n=2, H^1_11=1 reported flat: {flat}")


# 5


def _random_hermitian(rng, n):
    h = np.empty((n, n), dtype=object)
    rat = lambda: Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
    for p in range(n):
        h[p, p] = GaussScalar(rat())
        for q in range(p + 1, n):
            x = GaussScalar(rat(), rat())
            h[p, q], h[q, p] = x, x.conjugate()
    return h


def criterion_5() -> bool:
    rng = np.random.default_rng(20240501)
    misses = 0
    for t in range(CONTRACTION_SAMPLES):
        n = (2, 3, 4)[t % 3]
        h = _random_hermitian(rng, n)
        vt = vtable(n)
        G = quartic_from_poly(sigma_poly(vt, n) * hermitian_poly(h, vt), n)
        if not np.all(contract(G) == h):
            misses += 1
    return record(5, misses == 0, f"{CONTRACTION_SAMPLES} random Hermitian h (n=2,3,4) recovered exactly; misses: {misses}")


# 6


def criterion_6() -> bool:
    t0 = time.perf_counter()
    bad = [N for N in (2, 3, 4) if not check_closure(su_maurer_cartan(N)).all_zero]
    dt = time.perf_counter() - t0
    ok = not bad and dt < MC_BUDGET_S
    return record(6, ok, f"su(N+1,1) Maurer-Cartan closure N=2,3,4; nonzero at: {bad or 'none'}; {dt:.2f}s (< {MC_BUDGET_S}s)")


# 7


def criterion_7() -> bool:
    parts = []
    ok = True
    for n, r in ((4, 1), (4, 2), (5, 3)):
        t0 = time.perf_counter()
        rep = check_closure(rank1_system(n, r))
        dt = time.perf_counter() - t0
        good = rep.all_zero and dt < RANK1_BUDGET_S
        ok &= good
        parts.append(f"(n,r)=({n},{r}) {'zero' if rep.all_zero else 'NONZERO'} {dt:.2f}s")
    return record(7, ok, "rank-1 system closure: " + ", ".join(parts)
                  + f" (< {RANK1_BUDGET_S}s each; general n not verified symbolically)")


# 8


def criterion_8() -> bool:
    counts = {s: len(check_closure(rank1_system(4, 1, s)).nonzero()) for s in SABOTAGE}
    ok = all(c > 0 for c in counts.values())
    return record(8, ok, "nonzero residuals per sabotaged rule: " + ", ".join(f"{k}={v}" for k, v in counts.items()))


# 9


def _gamma(H):
    A = np.asarray(H.H, dtype=complex)
    return np.einsum("aij,akl->ijkl", A, A.conj())


def criterion_9() -> bool:
    pts = lambda n: [random_sphere_point(n, np.random.default_rng(seed)) for seed in range(JET_POINTS)]
    lin = family("linear", 3, N=5)
    lin_max = max(np.linalg.norm(np.asarray(sff_from_map(lin, p).H.H, dtype=complex)) for p in pts(3))
    cases = [("whitney n=2", family("whitney", 2)), ("whitney n=3", family("whitney", 3)),
             ("map C s=3/5 n=3", family("dangelo_c", 3, s=Fraction(3, 5)))]
    ranks = {label: [numeric_rank(sff_from_map(F, p).H, RANK_TOL).rank for p in pts(F.n)] for label, F in cases}
    worst = 0.0
    for _, F in cases:
        for p in pts(F.n)[:CROSS_POINTS]:
            a, b = _gamma(sff_from_map(F, p).H), _gamma(sff_by_differences(F, p))
            worst = max(worst, float(np.linalg.norm(a - b) / np.linalg.norm(b)))
    ok = lin_max < LINEAR_NORM_TOL and all(r == [1] * JET_POINTS for r in ranks.values()) and worst < CROSS_REL_TOL
    return record(9, ok, f"linear max|H|={lin_max:.1e} (< {LINEAR_NORM_TOL}); ranks {ranks}; "
                         f"cross-check worst relative gamma error {worst:.1e} (< {CROSS_REL_TOL})")


# 10


MALFORMED = [
    "system x\nform theta real\nrule d theta = theta ^\n",
    "system x\nform theta real\nrule d theta = zeta^theta\n",
    "system x\nform theta real\nrule d theta = theta\n",
    "system x\nlet n = two\n",
    "system x\nform theta real\nnot a statement\n",
]


def criterion_10() -> bool:
    root = resources.files("crgap.eds").joinpath("scenarios")
    names = sorted(p.name for p in root.iterdir() if p.name.endswith(".eds"))
    bad_trip = []
    for name in names:
        first = parse_system(root.joinpath(name).read_text())
        if parse_system(serialize_system(first)) != first:
            bad_trip.append(name)
    unpositioned = 0
    for text in MALFORMED:
        try:
            parse_system(text)
            unpositioned += 1
        except ParseError as exc:
            if not (exc.line >= 1 and exc.col >= 1):
                unpositioned += 1
    ok = not bad_trip and unpositioned == 0 and len(names) > 0
    return record(10, ok, f"round-trip on {len(names)} shipped scenarios, failures: {bad_trip or 'none'}; "
                          f"{len(MALFORMED) - unpositioned}/{len(MALFORMED)} malformed inputs with line/col")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("num", range(1, 11))
def test_acceptance_criterion(num):
    ok = CRITERIA[num - 1]()
    print(line(num))
    assert ok, line(num)


def main() -> int:
    for num, fn in enumerate(CRITERIA, 1):
        fn()
        print(line(num))
    return 0 if all(ok for ok, _ in RESULTS.values()) else 1


if __name__ == "__main__":
    raise SystemExit(main())
