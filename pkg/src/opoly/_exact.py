"""Exact-rational engine behind the brute-force orthogonality oracle.

Every float is a dyadic rational, so converting recurrence data and
combination coefficients to :class:`fractions.Fraction` makes the whole
pipeline exact: basis polynomials, the canonical completion of the
low-degree combination polynomials, the annihilating moment sequence, and
the full Gram matrix.  Denominators stay powers of two throughout, so the
arithmetic is cheap, and the oracle cannot be fooled by cancellation at the
tiny norm scales (``prod gamma ~ 4^-n``) where a floating-point Gram test
loses its footing.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DegeneracyError

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _add(p, q):
    n = max(len(p), len(q))
    return [
        (p[i] if i < len(p) else _ZERO) + (q[i] if i < len(q) else _ZERO)
        for i in range(n)
    ]


def _scale(p, c):
    return [c * v for v in p]


def _mul(p, q):
    out = [_ZERO] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j, qj in enumerate(q):
            out[i + j] += pi * qj
    return out


def _trim(p):
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _basis_polys(beta, gamma, n_max):
    """Monic basis polynomials ``P_0..P_n_max`` as Fraction coefficient lists."""
    polys = [[_ONE]]
    if n_max >= 1:
        polys.append([-beta[0], _ONE])
    for n in range(1, n_max):
        xp = [_ZERO] + polys[n]
        t = _add(xp, _scale(polys[n], -beta[n]))
        t = _add(t, _scale(polys[n - 1], -gamma[n]))
        polys.append(t)
    return polys


def _downward(q_next, q_cur):
    """One exact downward three-term step; fails on an exact degree drop."""
    m = len(q_cur) - 1
    r = _trim(_add([_ZERO] + q_cur, _scale(q_next, -_ONE)))
    b = r[m] if len(r) > m else _ZERO
    s = _trim(_add(r, _scale(q_cur, -b)))
    g = s[m - 1] if len(s) > m - 1 else _ZERO
    if g == 0:
        raise DegeneracyError(
            f"exact completion: tilde gamma at degree {m} is zero"
        )
    prev = [v / g for v in s[: m]]
    return b, g, prev


def exact_combination_polys(beta_f, gamma_f, a_f, n_max):
    """``Q_0..Q_n_max`` as exact Fraction coefficient lists.

    ``beta_f`` and ``gamma_f`` are the recurrence arrays (``gamma_f[0]``
    unused), ``a_f`` the combination constants; all are converted exactly.
    Raises :class:`~opoly.errors.DegeneracyError` when the completion does
    not exist (zero denominator or an exact downward degeneracy).
    """
    k = len(a_f)
    beta = [Fraction(float(b)) for b in beta_f]
    gamma = [_ZERO] + [Fraction(float(g)) for g in gamma_f[1:]]
    a = [_ZERO] + [Fraction(float(v)) for v in a_f]
    p = _basis_polys(beta, gamma, n_max)

    def direct(n):
        q = p[n]
        for j in range(1, k + 1):
            q = _add(q, _scale(p[n - j], a[j]))
        return q

    denom = gamma[k + 1] + a[1] * (beta[k] - beta[k + 1])
    if denom == 0:
        raise DegeneracyError("exact completion: denominator is zero")
    fourier = [_ZERO] * (k + 1)
    for j in range(1, k):
        fourier[j] = (a[j] * gamma[k - j + 1] + a[j + 1] * (beta[k - j] - beta[k + 1])) / denom
    fourier[k] = a[k] * gamma[1] / denom

    q_k = p[k]
    for j in range(1, k + 1):
        q_k = _add(q_k, _scale(p[k - j], fourier[j]))
    qs = {k: q_k, k + 1: direct(k + 1)}
    hi, lo = qs[k + 1], qs[k]
    for m in range(k, 0, -1):
        _, _, prev = _downward(hi, lo)
        qs[m - 1] = prev
        hi, lo = lo, prev
    for n in range(k + 2, n_max + 1):
        qs[n] = direct(n)
    return [qs[n] for n in range(n_max + 1)]


def exact_annihilator_moments(polys):
    """Moments of the unique unit functional annihilating each given monic poly."""
    vals = [_ONE]
    for m, q in enumerate(polys, start=1):
        assert len(q) == m + 1 and q[-1] == 1
        vals.append(-sum(q[i] * vals[i] for i in range(m)))
    return vals


def exact_gram(beta_f, gamma_f, a_f, degree):
    """Exact Gram matrix of ``Q_0..Q_degree`` under the annihilating functional."""
    qs = exact_combination_polys(beta_f, gamma_f, a_f, 2 * degree)
    moments = exact_annihilator_moments(qs[1:])
    gram = [[_ZERO] * (degree + 1) for _ in range(degree + 1)]
    for i in range(degree + 1):
        for j in range(i, degree + 1):
            prod = _mul(qs[i], qs[j])
            val = sum(c * moments[t] for t, c in enumerate(prod) if c != 0)
            gram[i][j] = gram[j][i] = val
    return gram
