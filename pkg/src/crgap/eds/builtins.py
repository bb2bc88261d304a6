"""Built-in structure-equation systems on su(N+1,1).

Both builders fill a Maurer-Cartan matrix ``pi`` indexed ``0, 1..N, N+1``
for the Hermitian form with ``<Z_0, Z_{N+1}> = -i``.  Its Lie-algebra
relations are enforced by construction::

    pi[N+1][N+1] = -conj(pi[0][0])
    pi[0][A]     =  i conj(pi[A][N+1])
    pi[N+1][A]   = -i conj(pi[A][0])
    pi[B][A]     = -conj(pi[A][B])        (1 <= A, B <= N)

together with reality of ``pi[N+1][0]``, ``pi[0][N+1]`` and ``tr pi = 0``.
"""

from __future__ import annotations

from fractions import Fraction

from ..algebra import I, ONE, GaussScalar, Poly
from .forms import EdsError, ExtForm, SymbolTable
from .system import EdsSystem

SABOTAGE = ("u0", "A_imag", "h_an")


def _complete(M: list[list[ExtForm | None]], size: int) -> None:
    """Fill entries implied by the su(N+1,1) relations; ``M`` is edited in place."""
    last = size - 1
    for A in range(1, last):
        if M[0][A] is None and M[A][last] is not None:
            M[0][A] = M[A][last].conj().scale(I)
        if M[last][A] is None and M[A][0] is not None:
            M[last][A] = M[A][0].conj().scale(-I)
        for B in range(1, last):
            if M[B][A] is None and M[A][B] is not None:
                M[B][A] = -M[A][B].conj()
    if M[last][last] is None and M[0][0] is not None:
        M[last][last] = -M[0][0].conj()
    missing = [(r, c) for r in range(size) for c in range(size) if M[r][c] is None]
    if missing:
        raise EdsError(f"matrix entries left undetermined: {missing[:5]}")


def _mc_rules(sys_rules: dict, M, st: SymbolTable, free: dict[str, tuple[int, int, GaussScalar]]):
    """``d g = -(1/c) (pi ^ pi)[r][c]`` for free entries ``pi[r][c] = c g``."""
    size = len(M)

    def prod(r, c):
        acc = ExtForm.zero(st)
        for k in range(size):
            if M[r][k] and M[k][c]:
                acc = acc + M[r][k].wedge(M[k][c])
        return acc.normalized()

    for name, (r, c, coef) in free.items():
        sys_rules[name] = prod(r, c).scale(-coef.inverse())


def su_maurer_cartan(N: int) -> EdsSystem:
    """Maurer-Cartan system of su(N+1,1) with the linear relations eliminated.

    Free generators: ``theta = pi[N+1][0]`` and ``phi = pi[0][N+1]`` (real),
    ``eta_A = pi[A][0]``, ``zeta_A = pi[A][N+1]``, ``rho = Re pi[0][0]``,
    ``t_A = -i pi[A][A]`` (real) and ``g_A_B = pi[A][B]`` for ``A < B``.
    """
    if N < 1:
        raise EdsError("N must be >= 1")
    size = N + 2
    last = N + 1
    forms: list[tuple[str, str]] = [("theta", "theta")]
    forms += [(f"eta{A}", f"eta{A}~") for A in range(1, N + 1)]
    forms += [(f"zeta{A}", f"zeta{A}~") for A in range(1, N + 1)]
    forms += [("phi", "phi"), ("rho", "rho")]
    forms += [(f"t{A}", f"t{A}") for A in range(1, N + 1)]
    forms += [(f"g{A}_{B}", f"g{A}_{B}~") for A in range(1, N + 1) for B in range(A + 1, N + 1)]
    st = SymbolTable.create(forms)
    g = lambda nm: ExtForm.gen(st, nm)  # noqa: E731

    M: list[list[ExtForm | None]] = [[None] * size for _ in range(size)]
    free: dict[str, tuple[int, int, GaussScalar]] = {}
    M[last][0] = g("theta")
    free["theta"] = (last, 0, ONE)
    M[0][last] = g("phi")
    free["phi"] = (0, last, ONE)
    for A in range(1, N + 1):
        M[A][0] = g(f"eta{A}")
        free[f"eta{A}"] = (A, 0, ONE)
        M[A][last] = g(f"zeta{A}")
        free[f"zeta{A}"] = (A, last, ONE)
        M[A][A] = g(f"t{A}").scale(I)
        free[f"t{A}"] = (A, A, I)
        for B in range(A + 1, N + 1):
            M[A][B] = g(f"g{A}_{B}")
            free[f"g{A}_{B}"] = (A, B, ONE)
    # tr pi = 0 fixes Im pi[0][0] = -(1/2) sum t_A
    tsum = ExtForm.zero(st)
    for A in range(1, N + 1):
        tsum = tsum + g(f"t{A}")
    M[0][0] = g("rho") + tsum.scale(GaussScalar(0, Fraction(-1, 2)))
    _complete(M, size)

    rules: dict[str, ExtForm] = {}
    _mc_rules(rules, M, st, free)
    # d rho: real part of -(pi ^ pi)[0][0] with the t-contribution removed
    mc00 = ExtForm.zero(st)
    for k in range(size):
        if M[0][k] and M[k][0]:
            mc00 = mc00 + M[0][k].wedge(M[k][0])
    dt_sum = ExtForm.zero(st)
    for A in range(1, N + 1):
        dt_sum = dt_sum + rules[f"t{A}"]
    rules["rho"] = -mc00 - dt_sum.scale(GaussScalar(0, Fraction(-1, 2)))
    labels = ["0"] + [str(A) for A in range(1, N + 1)] + ["N+1"]
    return EdsSystem(f"su{N}", st, rules, M, labels)


def rank1_system(n: int, r: int, sabotage: str | None = None) -> EdsSystem:
    """Reduced structure equations of a CR immersion with rank-one second fundamental form.

    Index blocks ``0 | p = 1..n-1 | n | p' = n+p | n' = 2n | a = 2n+1..2n+r | N+1``.
    Coefficient functions are ``u``, ``ua_k`` (``k = 1..r``) and ``A``; the
    conjugate ``A~`` is defined by ``A - A~ = i(u u~ + sum ua ua~ - 1)``.
    Free generators: ``theta``, ``eta_i``, ``phi = pi[0][N+1]``, the
    imaginary diagonals ``i t_p``, ``i t_n``, ``i ta_k`` and the off-diagonal
    ``g_p_q``, ``ga_k_l`` of the ``p`` and ``a`` blocks.

    ``sabotage`` replaces one relation by zero for mutation testing:
    ``"u0"`` drops the ``theta``-coefficient ``-2uA`` of ``du``, ``"A_imag"``
    imposes ``A = A~`` and ``"h_an"`` drops ``-i ua u~`` from
    ``pi[a][n']`` and from ``d ua``.
    """
    if n < 4:
        raise EdsError("rank1_system needs n >= 4 (n = 3 is not supported)")
    if r < 0:
        raise EdsError("r must be >= 0")
    if sabotage is not None and sabotage not in SABOTAGE:
        raise EdsError(f"unknown sabotage {sabotage!r}; expected one of {SABOTAGE}")
    N = 2 * n + r
    size = N + 2
    last = N + 1
    P = range(1, n)
    Ar = range(1, r + 1)
    ix_p = {p: p for p in P}
    ix_n = n
    ix_pp = {p: n + p for p in P}
    ix_nn = 2 * n
    ix_a = {k: 2 * n + k for k in Ar}

    forms: list[tuple[str, str]] = [("theta", "theta")]
    forms += [(f"eta{i}", f"eta{i}~") for i in range(1, n + 1)]
    forms += [(f"eta{i}~", f"eta{i}") for i in range(1, n + 1)]
    forms += [("phi", "phi")]
    for p in P:
        forms.append((f"t{p}", f"t{p}"))
        forms += [(f"g{p}_{q}", f"g{p}_{q}~") for q in P if q > p]
    forms.append((f"t{n}", f"t{n}"))
    for k in Ar:
        forms.append((f"ta{k}", f"ta{k}"))
        forms += [(f"ga{k}_{l}", f"ga{k}_{l}~") for l in Ar if l > k]
    functions = [("u", "u~")] + [(f"ua{k}", f"ua{k}~") for k in Ar] + [("A", "A~")]
    st0 = SymbolTable.create(forms, functions)
    fvt = st0.fvt
    F = lambda nm: Poly.var(fvt, nm)  # noqa: E731
    C = lambda c: Poly.const(fvt, c)  # noqa: E731
    u, ub, A = F("u"), F("u~"), F("A")
    ua = {k: F(f"ua{k}") for k in Ar}
    uab = {k: F(f"ua{k}~") for k in Ar}
    norm2 = u * ub
    for k in Ar:
        norm2 = norm2 + ua[k] * uab[k]
    Abar = A if sabotage == "A_imag" else A - (norm2 - C(1)).scale(I)
    st = st0.with_defs({"A~": Abar})
    Abar = F("A~")  # stays symbolic in expressions; normalized away by the defs

    g = lambda nm: ExtForm.gen(st, nm)  # noqa: E731
    theta = g("theta")
    eta = {i: g(f"eta{i}") for i in range(1, n + 1)}
    etab = {i: g(f"eta{i}~") for i in range(1, n + 1)}
    zero = ExtForm.zero(st)
    h_an_coef = {k: C(0) if sabotage == "h_an" else (ua[k] * ub).scale(-I) for k in Ar}
    u0 = C(0) if sabotage == "u0" else (u * A).scale(-2)
    ua0 = {k: (ua[k] * A).scale(-2) for k in Ar}

    M: list[list[ExtForm | None]] = [[None] * size for _ in range(size)]
    free: dict[str, tuple[int, int, GaussScalar]] = {}

    # column 0 and row N+1 to the left of the diagonal
    for i in range(1, n + 1):
        M[i][0] = eta[i]
        free[f"eta{i}"] = (i, 0, ONE)
    for p in P:
        M[ix_pp[p]][0] = zero
    M[ix_nn][0] = zero
    for k in Ar:
        M[ix_a[k]][0] = zero
    M[last][0] = theta
    free["theta"] = (last, 0, ONE)

    # column N+1
    M[0][last] = g("phi")
    free["phi"] = (0, last, ONE)
    for p in P:
        M[p][last] = eta[p].scale(Abar - C(I))
        M[ix_pp[p]][last] = zero
    M[ix_n][last] = eta[n].scale(A)
    M[ix_nn][last] = eta[n].scale(u)
    for k in Ar:
        M[ix_a[k]][last] = eta[n].scale(ua[k])

    # free blocks
    for p in P:
        M[p][p] = g(f"t{p}").scale(I)
        free[f"t{p}"] = (p, p, I)
        for q in P:
            if q > p:
                M[p][q] = g(f"g{p}_{q}")
                free[f"g{p}_{q}"] = (p, q, ONE)
    M[n][n] = g(f"t{n}").scale(I)
    free[f"t{n}"] = (n, n, I)
    for k in Ar:
        M[ix_a[k]][ix_a[k]] = g(f"ta{k}").scale(I)
        free[f"ta{k}"] = (ix_a[k], ix_a[k], I)
        for l in Ar:
            if l > k:
                M[ix_a[k]][ix_a[l]] = g(f"ga{k}_{l}")
                free[f"ga{k}_{l}"] = (ix_a[k], ix_a[l], ONE)

    # rank-one normalization and the reduced structure equations
    for q in P:
        M[n][q] = zero
        for p in P:
            M[ix_pp[p]][q] = eta[n] if p == q else zero
        M[ix_nn][q] = zero
        for k in Ar:
            M[ix_a[k]][q] = zero
    for p in P:
        M[ix_pp[p]][n] = eta[p]
    M[ix_nn][n] = eta[n].scale(2) + theta.scale(u)
    for k in Ar:
        M[ix_a[k]][n] = theta.scale(ua[k])
    for q in P:
        M[ix_nn][ix_pp[q]] = etab[q].scale(u.scale(-I))
        for k in Ar:
            M[ix_a[k]][ix_pp[q]] = etab[q].scale(ua[k].scale(-I))
        for p in P:
            if p != q:
                M[ix_pp[p]][ix_pp[q]] = M[p][q]
    for k in Ar:
        M[ix_a[k]][ix_nn] = etab[n].scale(ua[k].scale(-I)) + theta.scale(h_an_coef[k])

    # diagonal: Re pi[0][0] from the conjugate-sum relation, the Delta
    # relations for the primed blocks, Im pi[0][0] from tr pi = 0
    half = GaussScalar(Fraction(1, 2))
    rho = (etab[n].scale(u) - eta[n].scale(ub)).scale(I) - theta.scale((A + Abar).scale(half))
    delta_t = eta[n].scale(ub.scale(-2 * I)) - theta.scale(A)
    A_n = A + (u * ub - C(1)).scale(I)
    delta_n = eta[n].scale(ub.scale(-3 * I)) - etab[n].scale(u.scale(I)) - theta.scale(A_n)
    pnn = M[n][n]
    tr_rest = pnn.scale(n + 2) + delta_t.scale(n - 1) + delta_n - rho.scale(n)
    for p in P:
        tr_rest = tr_rest + M[p][p].scale(2)
    for k in Ar:
        tr_rest = tr_rest + M[ix_a[k]][ix_a[k]]
    # tr pi = (2 - n) i sigma + tr_rest = 0
    i_sigma = tr_rest.scale(GaussScalar(Fraction(1, n - 2)))
    p00 = (rho + i_sigma).normalized()
    M[0][0] = p00
    for p in P:
        M[ix_pp[p]][ix_pp[p]] = delta_t + M[p][p] - p00 + pnn
    M[ix_nn][ix_nn] = delta_n + pnn.scale(2) - p00

    _complete(M, size)
    M = [[e.normalized() for e in row] for row in M]

    rules: dict[str, ExtForm] = {}
    _mc_rules(rules, M, st, free)

    pNN = M[last][last]
    nn = M[ix_nn]
    du = (pNN - p00 + pnn - M[ix_nn][ix_nn]).scale(u) + eta[n].scale((u * ub - C(1)).scale(-2 * I))
    for k in Ar:
        du = du - nn[ix_a[k]].scale(ua[k])
    du = du + theta.scale(u0)
    rules["u"] = du
    for k in Ar:
        a = ix_a[k]
        dua = (pNN - p00 + pnn).scale(ua[k]) - M[a][ix_nn].scale(u)
        for l in Ar:
            dua = dua - M[a][ix_a[l]].scale(ua[l])
        dua = dua + eta[n].scale(h_an_coef[k].scale(2)) + theta.scale(ua0[k])
        rules[f"ua{k}"] = dua
    rules["A"] = (
        (pNN - p00).scale(A)
        + M[0][last]
        + (etab[n].scale(u) - eta[n].scale(ub)).scale(2)
        + theta.scale(norm2 - A * A)
    )

    labels = ["0"] + [str(p) for p in P] + ["n"] + [f"{p}'" for p in P] + ["n'"]
    labels += [f"a{k}" for k in Ar] + ["N+1"]
    name = f"rank1_n{n}_r{r}" + (f"_{sabotage}" if sabotage else "")
    return EdsSystem(name, st, rules, M, labels)
