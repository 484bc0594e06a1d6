"""Truncated Jacobi-matrix algebra for combination families.

The multiplication-by-x operator in the monic ``P``-basis is the tridiagonal
matrix with unit superdiagonal, ``beta_n`` on the diagonal and ``gamma_n``
below; its ``m x m`` truncation has characteristic polynomial ``P_m``.  The
banded change of basis ``Q = M P`` intertwines the two operators
(``M J_P = J_Q M``), and the ``m x m`` truncation of ``J_P`` minus the
single-row perturbation ``L`` (last row carrying ``a_k .. a_1``, with ``a_1``
in the last column) has characteristic polynomial ``Q_m`` -- so zeros of the
combination polynomials are ordinary eigenvalues.

On top of that sits the functional link ``u = h_k v``: with norm diagonals
``D_P = diag <u, P_n^2>`` and ``D_Q = diag <v, Q_n^2>``, the degree-``k``
polynomial ``h_k`` satisfies ``h_k(J_P) = D_P M^T D_Q^{-1} M``, which is a
small overdetermined linear system for its ``k + 1`` coefficients.  In the
orthonormal normalisation the same identity reads
``h_k(J_sym) = Mt^T Mt`` with ``Mt = D_Q^{-1/2} M D_P^{1/2}``.

Truncation convention: matrix identities are checked on interior rows
``0 .. m-k-2`` only, and any product or power that can leak across the
truncation edge is computed at size ``m + k`` and cut back, so every compared
entry is an exact entry of the corresponding infinite operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, HorizonError, NumericError, StateError
from .lincomb import CombCoeffs, ConditionReport, q_poly, tilde_recurrence
from .moments import MomentFunctional, apply_functional, moments_from_recurrence
from .recurrence import Poly, RecurrencePair


@dataclass(frozen=True)
class TriDiag:
    """Monic Jacobi truncation: unit superdiagonal, ``diag`` betas, ``sub`` gammas."""

    diag: np.ndarray
    sub: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float)
        s = np.array(self.sub, dtype=float)
        if d.ndim != 1 or s.ndim != 1 or s.size != d.size - 1:
            raise ValueError("need m diagonal entries and m-1 subdiagonal entries")
        d.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "sub", s)

    @property
    def dim(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        m = self.dim
        out = np.diag(self.diag)
        if m > 1:
            out += np.diag(np.ones(m - 1), 1)
            out += np.diag(self.sub, -1)
        return out


@dataclass(frozen=True)
class BandMatrix:
    """Unit lower-triangular change of basis with ``k`` subdiagonal bands."""

    array: np.ndarray
    k: int

    def __post_init__(self):
        arr = np.array(self.array, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("array must be square")
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)

    @property
    def dim(self) -> int:
        return self.array.shape[0]

    def to_dense(self) -> np.ndarray:
        return self.array.copy()


@dataclass(frozen=True)
class HkSolution:
    """The connecting polynomial ``h_k`` with its fit residual and the fitted
    proportionality constant between the two normalised functionals."""

    poly: Poly
    residual: float
    scale: float

    @property
    def coeffs(self) -> tuple[float, ...]:
        return self.poly.coeffs


def jacobi_truncation(rec: RecurrencePair, m: int) -> TriDiag:
    """``m x m`` truncation of the multiplication operator in the P-basis;
    its characteristic polynomial is ``P_m``."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > rec.horizon + 1:
        raise HorizonError(f"m = {m} exceeds horizon + 1 = {rec.horizon + 1}")
    return TriDiag(rec.beta[:m].copy(), rec.gamma[1:m].copy())


def change_basis_matrix(comb: CombCoeffs, report: ConditionReport, m: int) -> BandMatrix:
    """Rows give the P-basis coefficients of ``Q_0..Q_{m-1}``.

    Rows above ``k`` carry the constant bands ``(a_k, ..., a_1, 1)``; rows
    ``0..k`` come from the report's completed polynomials.
    """
    if not report.verdict:
        raise StateError("change of basis requires a passing condition report")
    if m < 1:
        raise ValueError("m must be positive")
    k = comb.k
    M = np.eye(m)
    for n in range(m):
        if n <= k:
            row = report.low_rows[n]
            M[n, : n + 1] = row
        else:
            for j, aj in enumerate(comb.a, start=1):
                M[n, n - j] = aj
    return BandMatrix(M, k)


def perturbation_L(comb: CombCoeffs, m: int) -> np.ndarray:
    """Single-row perturbation: last row holds ``a_k .. a_1`` ending in the last
    column, so that ``(J_P)_m - L_m`` has characteristic polynomial ``Q_m``."""
    k = comb.k
    if m < k + 1:
        raise ValueError(f"m must be at least k + 1 = {k + 1}")
    L = np.zeros((m, m))
    for j, aj in enumerate(comb.a, start=1):
        L[m - 1, m - j] = aj
    return L


def multiset_distance(a, b) -> float:
    """Greedy matching distance between two equal-size complex multisets."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ValueError("multisets must have equal size")
    remaining = list(b)
    worst = 0.0
    for z in sorted(a, key=lambda t: (t.real, t.imag)):
        dists = [abs(z - w) for w in remaining]
        i = int(np.argmin(dists))
        worst = max(worst, dists[i])
        remaining.pop(i)
    return worst


def zeros_q(
    rec: RecurrencePair, comb: CombCoeffs, m: int, cross_tol: float = 1e-8
) -> np.ndarray:
    """Zeros of ``Q_m`` as eigenvalues of the perturbed Jacobi truncation.

    The eigenvalues of ``(J_P)_m - L_m`` are cross-validated against the roots
    of the explicit coefficient vector of ``Q_m`` (companion-matrix route);
    disagreement beyond ``cross_tol`` raises
    :class:`~opoly.errors.NumericError`.  Returned sorted by real part, then
    imaginary part.
    """
    if m < comb.k + 1:
        raise ValueError(f"m must be at least k + 1 = {comb.k + 1}")
    A = jacobi_truncation(rec, m).to_dense() - perturbation_L(comb, m)
    try:
        eigs = np.linalg.eigvals(A).astype(complex)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(f"eigenvalue iteration failed: {exc}") from exc
    q = q_poly(rec, comb, m)
    roots = np.roots(q.as_array()[::-1]).astype(complex)
    dist = multiset_distance(eigs, roots)
    if dist > cross_tol:
        raise NumericError(
            f"eigenvalue/root cross-check mismatch: multiset distance {dist:.3e}"
        )
    order = np.lexsort((eigs.imag, eigs.real))
    return eigs[order]


def norm_diagonal(rec: RecurrencePair, m: int, u0: float = 1.0) -> np.ndarray:
    """``D[n] = u0 * gamma_1 ... gamma_n`` for ``n = 0..m-1`` (the squared norms
    ``<u, P_n^2>``)."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > rec.horizon + 1:
        raise HorizonError(f"m = {m} needs gamma up to {m - 1}, horizon {rec.horizon}")
    out = np.empty(m)
    out[0] = u0
    if m > 1:
        out[1:] = u0 * np.cumprod(rec.gamma[1:m])
    return out


@dataclass(frozen=True)
class IntertwiningReport:
    ok: bool
    residual: float


def verify_intertwining(
    rec: RecurrencePair,
    comb: CombCoeffs,
    report: ConditionReport,
    m: int,
    tol: float = 1e-12,
) -> IntertwiningReport:
    """Max-norm residual of ``M J_P - J_Q M`` over interior rows ``0..m-k-2``
    (the trailing rows differ from the infinite operator by truncation)."""
    k = comb.k
    if m < k + 3:
        raise ValueError(f"m must be at least k + 3 = {k + 3}")
    tilde = tilde_recurrence(rec, comb, m - 1, report=report)
    JP = jacobi_truncation(rec, m).to_dense()
    JQ = jacobi_truncation(tilde, m).to_dense()
    M = change_basis_matrix(comb, report, m).array
    resid_rows = (M @ JP - JQ @ M)[: m - k - 1]
    residual = float(np.max(np.abs(resid_rows)))
    return IntertwiningReport(residual <= tol, residual)


def _interior_equations(mats_lhs, rhs, m, k):
    """Assemble the banded linear system ``sum_i c_i lhs_i[r, c] = rhs[r, c]``
    over interior rows and the (2k+1)-band where the entries can be nonzero."""
    rows = []
    target = []
    for r in range(0, m - k - 1):
        for c in range(max(0, r - k), min(m, r + k + 1)):
            rows.append([mat[r, c] for mat in mats_lhs])
            target.append(rhs[r, c])
    return np.array(rows), np.array(target)


def solve_hk(
    rec: RecurrencePair,
    comb: CombCoeffs,
    report: ConditionReport,
    m: int,
    tol: float = 1e-8,
) -> HkSolution:
    """Coefficients of ``h_k`` from ``h_k(J_P) = D_P M^T D_Q^{-1} M``.

    Both sides are assembled at truncation ``m + k`` and cut back to ``m`` so
    the compared entries are exact operator entries; the ``k + 1`` coefficients
    are then the least-squares solution of the interior-row system.  A fit
    residual above ``tol * max(1, |rhs|)`` means the functional relation
    ``u = h_k v`` cannot hold and raises :class:`~opoly.errors.NumericError`.

    The reported ``scale`` is the proportionality constant making
    ``u = scale * h_k v`` exact at degree zero under the ``u_0 = v_0 = 1``
    normalisation (equal to 1 when the normalised identity is consistent).
    """
    k = comb.k
    if m < 3 * k + 3:
        raise ValueError(f"m must be at least 3k + 3 = {3 * k + 3}")
    mm = m + k
    if mm > rec.horizon + 1:
        raise HorizonError(
            f"solve_hk at m = {m} needs horizon >= {mm - 1}, have {rec.horizon}"
        )
    tilde = tilde_recurrence(rec, comb, mm - 1, report=report)
    M = change_basis_matrix(comb, report, mm).array
    DP = norm_diagonal(rec, mm)
    DQ = norm_diagonal(tilde, mm)
    R = (DP[:, None] * M.T) @ (M / DQ[:, None])
    JP = jacobi_truncation(rec, mm).to_dense()
    powers = [np.eye(mm)]
    for _ in range(k):
        powers.append(powers[-1] @ JP)
    A, b = _interior_equations([p[:m, :m] for p in powers], R[:m, :m], m, k)
    coeffs, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.linalg.norm(A @ coeffs - b))
    if residual > tol * max(1.0, float(np.linalg.norm(b))):
        raise NumericError(
            f"functional relation inconsistent: h_k fit residual {residual:.3e}"
        )
    if abs(coeffs[-1]) <= 1e-12 * max(1.0, float(np.max(np.abs(coeffs)))):
        raise DegeneracyError("leading coefficient of h_k is numerically zero")
    h = Poly(tuple(coeffs))
    v_low = moments_from_recurrence(tilde, k)
    pairing = apply_functional(v_low, h)
    if pairing == 0.0:
        raise DegeneracyError("<v, h_k> vanished; scale undefined")
    return HkSolution(h, residual, 1.0 / pairing)


@dataclass(frozen=True)
class RelationReport:
    ok: bool
    scale: float
    max_residual: float


def verify_functional_relation(
    u: MomentFunctional,
    v: MomentFunctional,
    h: Poly,
    tol: float = 1e-8,
) -> RelationReport:
    """Check ``u_m = s * <v, h x^m>`` for every available ``m``, with ``s``
    fitted from ``m = 0``.  Residuals are relative with floor 1."""
    max_m = min(u.count, v.count - h.degree)
    if max_m < 0:
        raise HorizonError("not enough moments to compare the functionals")
    base = apply_functional(v, h)
    if base == 0.0:
        raise DegeneracyError("<v, h> vanished; scale cannot be fitted")
    s = u.moments[0] / base
    worst = 0.0
    for mdeg in range(max_m + 1):
        predicted = s * apply_functional(v, h * Poly.monomial(mdeg))
        worst = max(worst, abs(u.moments[mdeg] - predicted) / (1.0 + abs(u.moments[mdeg])))
    return RelationReport(worst <= tol, float(s), float(worst))


@dataclass(frozen=True)
class OrthonormalReport:
    ok: bool
    residual: float


def orthonormal_identity_check(
    rec: RecurrencePair,
    comb: CombCoeffs,
    report: ConditionReport,
    m: int,
    tol: float = 1e-9,
) -> OrthonormalReport:
    """Check ``h_k(J_sym) = Mt^T Mt`` in the orthonormal normalisation.

    ``J_sym`` is the symmetric Jacobi matrix (off-diagonal ``sqrt(gamma)``)
    and ``Mt = D_Q^{-1/2} M D_P^{1/2}``; the identity only makes sense in the
    positive-definite case, so any non-positive ``gamma`` or ``tilde gamma``
    raises :class:`ValueError`.
    """
    k = comb.k
    mm = m + k
    if mm > rec.horizon + 1:
        raise HorizonError(
            f"m = {m} needs horizon >= {mm - 1}, have {rec.horizon}"
        )
    tilde = tilde_recurrence(rec, comb, mm - 1, report=report)
    g_p = rec.gamma[1:mm]
    g_q = tilde.gamma[1:mm]
    if np.any(g_p <= 0.0):
        raise ValueError("orthonormal identity needs all gamma_n > 0")
    if np.any(g_q <= 0.0):
        raise ValueError("orthonormal identity needs all tilde gamma_n > 0")
    hk = solve_hk(rec, comb, report, m)
    M = change_basis_matrix(comb, report, mm).array
    DP = norm_diagonal(rec, mm)
    DQ = norm_diagonal(tilde, mm)
    Mt = (M / np.sqrt(DQ)[:, None]) * np.sqrt(DP)[None, :]
    Jsym = np.diag(rec.beta[:mm]).astype(float)
    off = np.sqrt(rec.gamma[1:mm])
    Jsym += np.diag(off, 1) + np.diag(off, -1)
    lhs = np.zeros((mm, mm))
    power = np.eye(mm)
    for c in hk.poly.coeffs:
        lhs += c * power
        power = power @ Jsym
    rhs = Mt.T @ Mt
    cut = m - k - 1
    residual = float(np.max(np.abs(lhs[:cut, :cut] - rhs[:cut, :cut])))
    return OrthonormalReport(residual <= tol, residual)
