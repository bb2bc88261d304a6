"""Second fundamental form algebra: gamma(H, H), Bochner-flatness and rank.

Tensors are numpy arrays.  Exact tensors use ``dtype=object`` holding
:class:`GaussScalar`; tensors extracted from maps by :mod:`crgap.jets` are
``complex128``.  Index conventions (0-based): ``H[alpha, i, j]``,
``G[i, j, k, l] = sum_alpha H[alpha, i, j] * conj(H[alpha, k, l])`` and
``h[p, q]`` for the Hermitian factor, so that as polynomial functions

    gamma(v, conj v) = (sum_k v_k conj v_k) * (sum_pq h[p, q] v_p conj v_q).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np

from .algebra import ONE, ZERO, GaussScalar, Poly, VarTable, parse_scalar, format_scalar
from .ballmaps import rational_sqrt
from .linalg import hermitian_psd, nullspace, rank


class SffError(ValueError):
    pass


def _zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out[...] = ZERO
    return out


@dataclass
class SffTensor:
    """``H[alpha, i, j]``, symmetric in ``(i, j)``; shape ``(m, n, n)``."""

    H: np.ndarray

    def __post_init__(self):
        if self.H.ndim != 3 or self.H.shape[1] != self.H.shape[2]:
            raise SffError(f"expected shape (m, n, n), got {self.H.shape}")
        if not np.all(self.H == np.swapaxes(self.H, 1, 2)) and self.exact:
            raise SffError("H is not symmetric in (i, j)")

    @property
    def m(self) -> int:
        return self.H.shape[0]

    @property
    def n(self) -> int:
        return self.H.shape[1]

    @property
    def exact(self) -> bool:
        return self.H.dtype == object

    @classmethod
    def zeros(cls, n: int, m: int) -> SffTensor:
        return cls(_zeros((m, n, n)))

    @classmethod
    def from_entries(cls, n: int, m: int, entries) -> SffTensor:
        """Build from 1-based ``(alpha, i, j, value)``; symmetry auto-completed."""
        H = _zeros((m, n, n))
        for a, i, j, v in entries:
            if not (1 <= a <= m and 1 <= i <= n and 1 <= j <= n):
                raise SffError(f"entry index out of range: {(a, i, j)}")
            v = GaussScalar.coerce(v)
            for (x, y) in ((i, j), (j, i)):
                old = H[a - 1, x - 1, y - 1]
                if not old.is_zero() and old != v:
                    raise SffError(f"conflicting values for H^{a}_{{{i}{j}}}")
                H[a - 1, x - 1, y - 1] = v
        return cls(H)

    def to_dict(self) -> dict:
        if not self.exact:
            entries = [
                {"alpha": a + 1, "i": i + 1, "j": j + 1, "value": [float(z.real), float(z.imag)]}
                for a in range(self.m)
                for i in range(self.n)
                for j in range(i, self.n)
                if self.H[a, i, j] != 0
            ]
        else:
            entries = [
                {"alpha": a + 1, "i": i + 1, "j": j + 1, "value": format_scalar(self.H[a, i, j])}
                for a in range(self.m)
                for i in range(self.n)
                for j in range(i, self.n)
                if not self.H[a, i, j].is_zero()
            ]
        return {"n": self.n, "m": self.m, "entries": entries}

    @classmethod
    def from_dict(cls, data: dict) -> SffTensor:
        try:
            n, m = int(data["n"]), int(data["m"])
            raw = data.get("entries", [])
            entries = [(int(e["alpha"]), int(e["i"]), int(e["j"]), parse_scalar(str(e["value"]))) for e in raw]
        except (KeyError, TypeError, ValueError) as exc:
            raise SffError(f"malformed tensor description: {exc}") from None
        if n < 1 or m < 0:
            raise SffError("tensor needs n >= 1 and m >= 0")
        return cls.from_entries(n, m, entries)

    @classmethod
    def from_json(cls, text: str) -> SffTensor:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SffError(f"tensor file is not valid JSON: {exc}") from None


def gamma(H: SffTensor) -> np.ndarray:
    """Quartic tensor ``G[i,j,k,l] = sum_a H[a,i,j] conj(H[a,k,l])``."""
    if H.m == 0:
        return _zeros((H.n,) * 4) if H.exact else np.zeros((H.n,) * 4, complex)
    return np.einsum("aij,akl->ijkl", H.H, np.conjugate(H.H))


def contract(G: np.ndarray) -> np.ndarray:
    """Candidate ``h`` with ``gamma = sigma * h``, by index contraction.

    If the symmetric tensor of ``sigma * h`` is
    ``T[i,j,k,l] = (d_ik h_jl + d_il h_jk + d_jk h_il + d_jl h_ik) / 4``, then
    ``C[j,l] = sum_i T[i,j,i,l] = ((n + 2) h[j,l] + d_jl tr h) / 4`` and
    ``sum_j C[j,j] = (n + 1) tr h / 2``.  Inverting those two gives ``h``.
    """
    n = G.shape[0]
    C = np.einsum("ijil->jl", G)
    tr_c = sum(C[j, j] for j in range(n))
    exact = G.dtype == object
    if exact:
        tr_h = tr_c * GaussScalar(Fraction(2, n + 1))
        h = _zeros((n, n))
        for j in range(n):
            for l in range(n):
                v = C[j, l] * 4 - (tr_h if j == l else ZERO)
                h[j, l] = v * GaussScalar(Fraction(1, n + 2))
        return h
    tr_h = 2 * tr_c / (n + 1)
    return (4 * C - tr_h * np.eye(n)) / (n + 2)


# ---------------------------------------------------------------------------
# polynomial expansions (the defining identity lives at this level)


def vtable(n: int) -> VarTable:
    return VarTable.build([f"v{k}" for k in range(1, n + 1)])


def quartic_poly(G: np.ndarray, vt: VarTable | None = None) -> Poly:
    n = G.shape[0]
    vt = vt or vtable(n)
    v = [vt.index(f"v{k}") for k in range(1, n + 1)]
    vb = [vt.index(f"v{k}~") for k in range(1, n + 1)]
    terms: dict = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    c = G[i, j, k, l]
                    if c.is_zero():
                        continue
                    e = [0] * len(vt)
                    e[v[i]] += 1
                    e[v[j]] += 1
                    e[vb[k]] += 1
                    e[vb[l]] += 1
                    key = tuple(e)
                    terms[key] = terms[key] + c if key in terms else c
    return Poly(vt, terms)


def hermitian_poly(h: np.ndarray, vt: VarTable | None = None) -> Poly:
    n = h.shape[0]
    vt = vt or vtable(n)
    out = Poly.zero(vt)
    for p in range(n):
        for q in range(n):
            if not h[p, q].is_zero():
                out = out + Poly.monomial(vt, {f"v{p + 1}": 1, f"v{q + 1}~": 1}, h[p, q])
    return out


def sigma_poly(vt: VarTable, n: int) -> Poly:
    return sum((Poly.monomial(vt, {f"v{k}": 1, f"v{k}~": 1}) for k in range(1, n + 1)), Poly.zero(vt))


def quartic_from_poly(P: Poly, n: int) -> np.ndarray:
    """Symmetric tensor of a bidegree (2,2) polynomial in ``v, conj v``.

    The coefficient of ``v_a v_b conj(v_c) conj(v_d)`` (``a <= b``, ``c <= d``)
    collects ``mult(a,b) * mult(c,d)`` equal entries of the tensor.
    """
    vt = P.vt
    G = _zeros((n,) * 4)
    v = [vt.index(f"v{k}") for k in range(1, n + 1)]
    vb = [vt.index(f"v{k}~") for k in range(1, n + 1)]
    for m, c in P.terms.items():
        hol = [k for k in range(n) for _ in range(m[v[k]])]
        anti = [k for k in range(n) for _ in range(m[vb[k]])]
        if len(hol) != 2 or len(anti) != 2:
            raise SffError("polynomial is not of bidegree (2, 2)")
        a, b = hol
        cc, d = anti
        mult = (1 if a == b else 2) * (1 if cc == d else 2)
        val = c * GaussScalar(Fraction(1, mult))
        for (i, j) in {(a, b), (b, a)}:
            for (k, l) in {(cc, d), (d, cc)}:
                G[i, j, k, l] = val
    return G


def bochner_flat(H: SffTensor) -> np.ndarray | None:
    """Exact ``h`` with ``gamma(H, H) = sigma h``, or None when not flat.

    The contraction supplies the candidate; acceptance is decided by
    expanding both sides as polynomials in ``v, conj v``.
    """
    if not H.exact:
        raise SffError("bochner_flat needs an exact tensor; use numeric_rank for floats")
    G = gamma(H)
    h = contract(G)
    vt = vtable(H.n)
    if quartic_poly(G, vt) == sigma_poly(vt, H.n) * hermitian_poly(h, vt):
        return h
    return None


# ---------------------------------------------------------------------------
# rank analysis


@dataclass
class RankReport:
    bochner_flat: bool
    h: np.ndarray | None = None
    asymptotic_basis: list[list[GaussScalar]] = field(default_factory=list)
    k: int | None = None
    m: int = 0
    n: int = 0
    bound_ok: bool | None = None
    lambda_sq: Fraction | None = None

    def to_dict(self) -> dict:
        if not self.bochner_flat:
            return {"flat": False, "n": self.n, "m": self.m}
        return {
            "flat": True,
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "bound": str(Fraction(self.k * (2 * self.n - self.k + 1), 2)),
            "bound_ok": self.bound_ok,
            "h": [[format_scalar(x) for x in row] for row in self.h],
            "asymptotic_basis": [[format_scalar(x) for x in v] for v in self.asymptotic_basis],
            "lambda_sq": None if self.lambda_sq is None else str(self.lambda_sq),
        }


def iwatani_bound_ok(m: int, n: int, k: int) -> bool:
    """``m >= k (2n - k + 1) / 2``."""
    return 2 * m >= k * (2 * n - k + 1)


def _bilinear(H: np.ndarray, v: Sequence[GaussScalar], w: Sequence[GaussScalar]) -> list[GaussScalar]:
    m, n, _ = H.shape
    out = []
    for a in range(m):
        s = ZERO
        for i in range(n):
            if v[i].is_zero():
                continue
            for j in range(n):
                if not w[j].is_zero() and not H[a, i, j].is_zero():
                    s = s + H[a, i, j] * v[i] * w[j]
        out.append(s)
    return out


def rank_report(H: SffTensor) -> RankReport:
    h = bochner_flat(H)
    if h is None:
        return RankReport(False, m=H.m, n=H.n)
    rows = [list(r) for r in h]
    if not hermitian_psd(rows):
        raise SffError("h from gamma(H, H) is not positive semidefinite")
    basis = nullspace(rows)
    for v in basis:
        for w in basis:
            if any(not x.is_zero() for x in _bilinear(H.H, v, w)):
                raise SffError("asymptotic kernel of h is not isotropic for H")
    k = rank(rows)
    assert k == H.n - len(basis)
    lam = None
    if k == 0:
        lam = Fraction(0)
    elif k == 1:
        lam = sum((h[p, p] for p in range(H.n)), ZERO).re / 4
    return RankReport(True, h, basis, k, H.m, H.n, iwatani_bound_ok(H.m, H.n, k), lam)


def rank1_model(n: int, lambda_sq: Fraction | int = 1) -> SffTensor:
    """``H^i_{in} = H^i_{ni} = lam`` for ``i < n`` and ``H^n_{nn} = 2 lam``; ``m = n``."""
    lambda_sq = Fraction(lambda_sq)
    if lambda_sq < 0:
        raise SffError("lambda_sq must be non-negative")
    lam = rational_sqrt(lambda_sq)
    if lam is None:
        raise SffError("lambda_sq must be a rational square; rescale to lambda_sq = 1")
    lam = GaussScalar(lam)
    H = _zeros((n, n, n))
    for i in range(n - 1):
        H[i, i, n - 1] = H[i, n - 1, i] = lam
    H[n - 1, n - 1, n - 1] = lam * 2
    return SffTensor(H)


# ---------------------------------------------------------------------------
# floating-point counterparts for tensors extracted from maps


@dataclass
class NumericRank:
    rank: int
    eigenvalues: np.ndarray
    flat_defect: float
    norm: float

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "flat_defect": self.flat_defect,
            "norm": self.norm,
        }


def sym_sigma_h(h: np.ndarray) -> np.ndarray:
    """Symmetric quartic tensor of ``sigma * h``."""
    n = h.shape[0]
    d = np.eye(n)
    T = (
        np.einsum("ik,jl->ijkl", d, h)
        + np.einsum("il,jk->ijkl", d, h)
        + np.einsum("jk,il->ijkl", d, h)
        + np.einsum("jl,ik->ijkl", d, h)
    )
    return T / 4


def numeric_rank(H: SffTensor, tolerance: float = 1e-9) -> NumericRank:
    """Rank of ``h`` for a floating ``H``: eigenvalues above ``tol * max(1, |eig|max)``."""
    A = np.asarray(H.H, dtype=complex)
    G = np.einsum("aij,akl->ijkl", A, A.conj())
    h = contract(G)
    defect = float(np.max(np.abs(G - sym_sigma_h(h)))) if G.size else 0.0
    eig = np.linalg.eigvalsh((h + h.conj().T) / 2)
    scale = max(1.0, float(np.max(np.abs(eig))) if eig.size else 0.0)
    r = int(np.sum(eig > tolerance * scale))
    return NumericRank(r, eig, defect, float(np.linalg.norm(A)))
