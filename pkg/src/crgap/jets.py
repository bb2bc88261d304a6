"""Second fundamental form of the boundary CR map of a ball map at a point.

Pipeline for ``F`` at ``p`` on the unit sphere:

1. unitaries ``U_s``, ``U_t`` with ``U_s e_0 = p`` and ``U_t F(p) = e_0``;
2. Cayley transforms sending the Heisenberg origin to ``e_0`` on both sides,
   so ``G = cayley^-1 o U_t o F o U_s o cayley`` fixes the origin;
3. a unitary ``V`` on the target ``z``-coordinates rotating ``dG(T_0)`` onto
   the first ``n`` axes;
4. ``H^alpha_ij`` read off the quadratic part of the normal components of
   ``G(z, 0)``, after the dilation that makes the tangential differential an
   isometry.

Derivatives of ``F`` come from exact symbolic differentiation evaluated at
``p``; the frame steps need square roots and run in floating point.  Only
the rank and the flatness of the result are meaningful; the overall unitary
normalization of ``H`` is a convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import GaussScalar, Poly
from .ballmaps import BallMap, is_proper, rational_sqrt
from .sff import SffTensor


class JetError(ValueError):
    pass


# ---------------------------------------------------------------------------
# truncated holomorphic 2-jets at the origin of C^n


@dataclass
class Jet2:
    """Value, gradient and Hessian of vector-valued holomorphic functions.

    Shapes ``(d,)``, ``(d, n)`` and ``(d, n, n)``.
    """

    v: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    def __getitem__(self, idx) -> Jet2:
        return Jet2(self.v[idx], self.d1[idx], self.d2[idx])

    def linear(self, M: np.ndarray) -> Jet2:
        return Jet2(M @ self.v, M @ self.d1, np.einsum("ab,bij->aij", M, self.d2))

    def shift(self, c) -> Jet2:
        return Jet2(self.v + c, self.d1, self.d2)

    def times_scalar_jet(self, s: Jet2) -> Jet2:
        """Product with a scalar jet ``s`` (shapes ``(1,)``, ``(1, n)``, ``(1, n, n)``)."""
        a0, a1, a2 = self.v, self.d1, self.d2
        b0, b1, b2 = s.v[0], s.d1[0], s.d2[0]
        d2 = a2 * b0 + a0[:, None, None] * b2 + np.einsum("ai,j->aij", a1, b1) + np.einsum("aj,i->aij", a1, b1)
        return Jet2(a0 * b0, a1 * b0 + a0[:, None] * b1, d2)

    def reciprocal(self) -> Jet2:
        """``1 / s`` for a scalar jet with nonzero value."""
        b0, b1, b2 = self.v[0], self.d1[0], self.d2[0]
        if abs(b0) < 1e-14:
            raise JetError("reciprocal of a jet vanishing at the origin")
        r0 = 1 / b0
        r1 = -b1 / b0**2
        r2 = -b2 / b0**2 + 2 * np.outer(b1, b1) / b0**3
        return Jet2(np.array([r0]), r1[None, :], r2[None, :, :])


def _apply_poly_map(DF: np.ndarray, D2F: np.ndarray, Fp: np.ndarray, z: Jet2) -> Jet2:
    """Chain rule for ``F o z`` given ``F(z0)``, ``DF(z0)``, ``D2F(z0)``."""
    d1 = DF @ z.d1
    d2 = np.einsum("akl,ki,lj->aij", D2F, z.d1, z.d1) + np.einsum("ak,kij->aij", DF, z.d2)
    return Jet2(Fp.copy(), d1, d2)


# ---------------------------------------------------------------------------
# exact derivatives and frames


def numeric_params(F: BallMap) -> dict[str, GaussScalar | float]:
    """Values of real parameters forced by the relation chain."""
    out: dict[str, GaussScalar | float] = {}
    vt = F.vt
    for plain, sq in F.squares.items():
        if plain not in vt:
            continue
        val = F.relations.apply(Poly.var(vt, sq))
        if not val.is_constant():
            raise JetError(f"parameter {plain!r} is symbolic ({sq} = {val}); instantiate it first")
        c = val.constant_term()
        if not c.is_real() or c.re < 0:
            raise JetError(f"{sq} = {c} is not a non-negative real")
        r = rational_sqrt(c.re)
        out[plain] = GaussScalar(r) if r is not None else float(c.re) ** 0.5
        # squared names may also appear in components
        out[sq] = c
    return out


def map_derivatives(F: BallMap, p: Sequence[GaussScalar]):
    """``F(p)``, ``DF(p)`` and ``D2F(p)`` from symbolic derivatives.

    Entries are exact GaussScalars when every coefficient is rational, else
    complex floats.
    """
    vals: dict = {f"z{k}": GaussScalar.coerce(p[k]) for k in range(F.n + 1)}
    vals.update(numeric_params(F))
    exact = all(isinstance(v, GaussScalar) for v in vals.values())
    if not exact:
        vals = {k: complex(v) for k, v in vals.items()}
    zs = [f"z{k}" for k in range(F.n + 1)]
    Fp = [f.evaluate(vals) for f in F.components]
    DF = [[f.diff(a).evaluate(vals) for a in zs] for f in F.components]
    D2F = [[[f.diff(a).diff(b).evaluate(vals) for b in zs] for a in zs] for f in F.components]
    return Fp, DF, D2F, exact


def _to_c(x) -> np.ndarray:
    return np.array(x, dtype=complex) if not isinstance(x, np.ndarray) else x.astype(complex)


def unitary_with_first_column(v: np.ndarray) -> np.ndarray:
    """Unitary ``U`` with ``U[:, 0] = v`` for a unit vector ``v``."""
    d = v.shape[0]
    M = np.column_stack([v, np.eye(d, dtype=complex)])
    Q, R = np.linalg.qr(M)
    Q = Q[:, :d]
    Q[:, 0] *= np.vdot(Q[:, 0], v) / abs(np.vdot(Q[:, 0], v))
    return Q


def on_sphere(p: Sequence[GaussScalar]) -> bool:
    return sum((GaussScalar.coerce(x).norm2() for x in p), Fraction(0)) == 1


@dataclass
class SffResult:
    H: SffTensor
    lam: float
    frames: dict
    exact_derivatives: bool


def _frames(F: BallMap, p: Sequence[GaussScalar]):
    if len(p) != F.n + 1:
        raise JetError(f"point needs {F.n + 1} coordinates")
    if not on_sphere(p):
        raise JetError("point is not on the unit sphere")
    Fp, DF, D2F, exact = map_derivatives(F, p)
    pc = _to_c([complex(GaussScalar.coerce(x)) for x in p])
    Fpc = _to_c([complex(x) for x in Fp])
    if abs(np.linalg.norm(Fpc) - 1) > 1e-12:
        raise JetError("F(p) is not on the target sphere")
    return (
        unitary_with_first_column(pc),
        unitary_with_first_column(Fpc),
        Fpc,
        _to_c([[complex(x) for x in row] for row in DF]),
        _to_c([[[complex(x) for x in r] for r in m] for m in D2F]),
        exact,
    )


def heisenberg_jet(F: BallMap, p: Sequence[GaussScalar]) -> tuple[Jet2, Jet2, dict]:
    """2-jets of ``z*`` and ``w*`` of the Heisenberg-normalized map on ``w = 0``."""
    Us, Ut, Fp, DF, D2F, exact = _frames(F, p)
    n = F.n
    # source: cayley(zeta, 0) = (1, 2 zeta) in (special, rest) order
    src = Jet2(
        np.concatenate([[1.0 + 0j], np.zeros(n, complex)]),
        np.vstack([np.zeros((1, n), complex), 2 * np.eye(n, dtype=complex)]),
        np.zeros((n + 1, n, n), complex),
    ).linear(Us)
    Y = _apply_poly_map(DF, D2F, Fp, src).linear(Ut.conj().T)
    denom = Y[0:1].shift(1.0).reciprocal()
    zstar = Y[1:].times_scalar_jet(denom)
    wnum = Y[0:1].shift(-1.0)
    wnum = Jet2(-1j * wnum.v, -1j * wnum.d1, -1j * wnum.d2)
    wstar = wnum.times_scalar_jet(denom)
    return zstar, wstar, {"U_src": Us, "U_tgt": Ut, "exact": exact}


def adapted_frame(J: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Unitary ``V`` with ``V J`` supported on the first ``n`` rows; ``J*J = lam I``."""
    N, n = J.shape
    JJ = J.conj().T @ J
    lam = float(np.real(np.trace(JJ)) / n)
    if lam < tol:
        raise JetError("degenerate differential at p")
    if np.max(np.abs(JJ - lam * np.eye(n))) > 1e-8 * max(1.0, lam):
        raise JetError("differential is not conformal on the holomorphic tangent space")
    Q, _ = np.linalg.qr(np.column_stack([J, np.eye(N, dtype=complex)]))
    return Q[:, :N].conj().T, lam


def sff_from_map(F: BallMap, p: Sequence, tolerance: float = 1e-9, check_proper: bool = True) -> SffResult:
    """Second fundamental form of ``F`` at boundary point ``p`` (floating entries)."""
    p = [GaussScalar.coerce(x) if not isinstance(x, str) else _parse(x) for x in p]
    if check_proper and not is_proper(F)[0]:
        raise JetError("map is not proper")
    zstar, wstar, info = heisenberg_jet(F, p)
    if max(np.max(np.abs(wstar.v)), np.max(np.abs(wstar.d1)), np.max(np.abs(wstar.d2))) > 1e-8:
        raise JetError("normalized map does not fix the Heisenberg origin to second order")
    V, lam = adapted_frame(zstar.d1)
    n = F.n
    phi = zstar.linear(V)
    H = 0.5 * phi.d2[n:] / np.sqrt(lam)
    info.update({"V": V})
    return SffResult(SffTensor(H), lam, info, info["exact"])


def _parse(x: str) -> GaussScalar:
    from .algebra import parse_scalar

    return parse_scalar(x)


# ---------------------------------------------------------------------------
# independent oracle: contour finite differences of the composed map


def composed_map(F: BallMap, p: Sequence[GaussScalar], Us: np.ndarray, Ut: np.ndarray):
    """Plain numeric ``zeta -> z*`` along ``w = 0``, no derivative information."""
    vals = {k: complex(v) for k, v in numeric_params(F).items()}
    comps = F.components

    def G(zeta: np.ndarray) -> np.ndarray:
        z = Us @ np.concatenate([[1.0 + 0j], 2 * zeta])
        point = dict(vals)
        point.update({f"z{k}": complex(z[k]) for k in range(F.n + 1)})
        Y = Ut.conj().T @ np.array([complex(f.evaluate(point)) for f in comps])
        return Y[1:] / (1 + Y[0])

    return G


def contour_jets(G, n: int, radius: float = 0.05, samples: int = 32):
    """First and second derivatives of a holomorphic map at 0 by Cauchy sums.

    Along a direction ``v`` the Taylor coefficients of ``t -> G(t v)`` are
    trapezoidal averages over the circle ``|t| = radius``; mixed second
    derivatives follow by polarization.
    """
    w = np.exp(2j * np.pi * np.arange(samples) / samples)

    def coeffs(v):
        vals = np.array([G(radius * wk * v) for wk in w])
        c1 = (vals * w[:, None] ** -1).mean(axis=0) / radius
        c2 = (vals * w[:, None] ** -2).mean(axis=0) / radius**2
        return c1, c2

    e = np.eye(n, dtype=complex)
    first = []
    quad = {}
    for i in range(n):
        c1, c2 = coeffs(e[i])
        first.append(c1)
        quad[(i, i)] = c2
    for i in range(n):
        for j in range(i + 1, n):
            _, c2 = coeffs(e[i] + e[j])
            quad[(i, j)] = c2 - quad[(i, i)] - quad[(j, j)]
    J = np.column_stack(first)
    d = J.shape[0]
    D2 = np.zeros((d, n, n), complex)
    for (i, j), c in quad.items():
        if i == j:
            D2[:, i, i] = 2 * c
        else:
            D2[:, i, j] = D2[:, j, i] = c
    return J, D2


def sff_by_differences(F: BallMap, p: Sequence, radius: float = 0.05, samples: int = 32) -> SffTensor:
    """Second fundamental form from contour differences of the composed map."""
    p = [GaussScalar.coerce(x) for x in p]
    Us, Ut, *_ = _frames(F, p)
    G = composed_map(F, p, Us, Ut)
    J, D2 = contour_jets(G, F.n, radius, samples)
    V, lam = adapted_frame(J)
    D2v = np.einsum("ab,bij->aij", V, D2)
    return SffTensor(0.5 * D2v[F.n:] / np.sqrt(lam))


def random_sphere_point(n: int, rng: np.random.Generator, scale: int = 7) -> list[GaussScalar]:
    """Rational point of the unit sphere in ``C^{n+1}``.

    Inverse stereographic projection of a random rational vector of
    ``R^{2n+1}`` lands on ``S^{2n+1}`` with rational coordinates.
    """
    t = [Fraction(int(rng.integers(-scale, scale + 1)), int(rng.integers(1, scale + 1))) for _ in range(2 * n + 1)]
    s = sum((x * x for x in t), Fraction(0))
    x = [2 * ti / (s + 1) for ti in t] + [(s - 1) / (s + 1)]
    return [GaussScalar(x[2 * k], x[2 * k + 1]) for k in range(n + 1)]
