"""Decoupling analysis of a centered Gaussian vector with covariance C.

The library bounds E prod f_i(X_i) by Q * prod ||f_i(X_i)||_p for two
different constants Q:

* ``q_old`` -- the classical constant, available once the exponent clears
  the threshold beta_bar * p(X), where p(X) is the largest variance-relative
  absolute row sum of C and beta_bar > 1 also dominates the variance ratio.

* ``q_new`` -- a sharper constant defined on a (generally disconnected)
  subset of (1, inf).  It is driven by the coefficients xi_j of a
  simultaneous diagonalization: an invertible R with R^T C R = I and
  R^T diag(gamma) R = diag(xi), built as R = U D V from two symmetric
  eigendecompositions.  The reciprocals 1/xi_j are exactly the eigenvalues
  of the correlation-scaled matrix diag(1/sigma) C diag(1/sigma), which the
  independent oracle below exploits.

The admissible set for ``q_new`` excludes the breakpoints 1/xi_j and keeps
the exponents p for which the count of breakpoints above p is even; this is
precisely the sign condition making det(p*diag(gamma) - C) positive, by the
exact identity

    det(p*diag(gamma) - C) = p^n * prod(gamma_i) * prod(1 - 1/(p*xi_i)),

which holds for every p > 0 and is re-checked numerically by
``det_identity_residual``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import matcore
from .errors import (
    DegenerateBeta,
    InvalidParameter,
    NonPositiveVariance,
    NotAdmissibleClassical,
    NotInRegion,
    NotPositiveDefinite,
)

# Minimal strict gap enforced for beta_bar > 1 when optimizing it.
EPS_BETA = 1e-6
# p counts as inside the region only if farther than this (times max(1, p))
# from every breakpoint; the constant diverges at breakpoints.
REGION_MARGIN_COEFF = 1e-9
# Breakpoints closer than this (relative) are reported as one excluded point
# with multiplicity; the membership margin above always covers the gap.
BREAKPOINT_COLLAPSE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GaussianVector:
    """A centered Gaussian vector, represented by its covariance matrix.

    ``c`` is stored exactly symmetric and certified positive definite;
    ``gamma`` holds the variances diag(C) and ``sigma`` their square roots.
    Instances are immutable; derived factorizations are cached.
    """

    c: np.ndarray
    gamma: np.ndarray
    sigma: np.ndarray

    @property
    def n(self) -> int:
        return self.c.shape[0]

    @cached_property
    def cholesky_factor(self) -> np.ndarray:
        return matcore.cholesky(self.c)

    @cached_property
    def _simdiag(self) -> "SimDiag":
        return _build_simdiag(self)

    @cached_property
    def _region(self) -> "AdmissibleRegion":
        return admissible_region(self._simdiag.xi)


def from_covariance(c) -> GaussianVector:
    """Validate a covariance matrix and wrap it as a GaussianVector.

    Raises NotSymmetric for an asymmetric input, NonPositiveVariance when a
    diagonal entry is not strictly positive, and NotPositiveDefinite when the
    Cholesky test fails.  No silent regularization is applied.
    """
    m = matcore.symmetrize(c)
    gamma = np.diag(m).copy()
    if np.any(gamma <= 0.0):
        bad = int(np.argmin(gamma))
        raise NonPositiveVariance(f"variance at index {bad} is {gamma[bad]:.6e}")
    matcore.cholesky(m)
    sigma = np.sqrt(gamma)
    for arr in (m, gamma, sigma):
        arr.setflags(write=False)
    return GaussianVector(c=m, gamma=gamma, sigma=sigma)


def decoupling_coefficient(x: GaussianVector) -> float:
    """max_i of sum_j |C_ij| / C_ii (the j-sum includes j = i).

    Always >= 1, with equality exactly when C is diagonal.
    """
    rowsums = np.sum(np.abs(x.c), axis=1) / x.gamma
    return float(np.max(rowsums))


def variance_ratio(x: GaussianVector) -> float:
    return float(np.max(x.gamma) / np.min(x.gamma))


def beta_bar(x: GaussianVector, beta: float) -> float:
    """max(variance ratio, beta); must come out strictly above 1."""
    if not beta >= 1.0:
        raise InvalidParameter(f"beta must be >= 1, got {beta}")
    bb = max(variance_ratio(x), float(beta))
    if bb <= 1.0:
        raise DegenerateBeta(
            "variance ratio and beta are both 1; the classical constant needs beta_bar > 1"
        )
    return bb


def optimal_beta_bar(x: GaussianVector, p: float) -> float:
    """The beta_bar minimizing the classical constant at exponent p.

    The constant decreases in beta_bar while the hypothesis caps it at
    p / p(X), so the cap is optimal whenever it clears both the variance
    ratio and the strict gap 1 + EPS_BETA; otherwise no valid choice exists.
    """
    if not p > 1.0:
        raise InvalidParameter(f"p must exceed 1, got {p}")
    px = decoupling_coefficient(x)
    floor = max(variance_ratio(x), 1.0 + EPS_BETA)
    cap = p / px
    while cap * px > p:  # keep p >= cap * p(X) exactly, despite rounding
        cap = math.nextafter(cap, 1.0)
    if cap < floor:
        raise NotAdmissibleClassical(
            f"p={p} is below the classical threshold {floor * px:.12g} (= {floor:.6g} * p(X))"
        )
    return cap


def q_old(x: GaussianVector, p: float, beta_bar_value: float) -> float:
    """Classical decoupling constant at exponent p.

    Q = (prod sigma_i)^(1/p) / [ (1 - 1/beta_bar)^((n/2)(1-1/p)) det(C)^(1/(2p)) ],
    valid under p >= beta_bar * p(X) with beta_bar > 1.
    """
    if beta_bar_value <= 1.0:
        raise DegenerateBeta(f"beta_bar must exceed 1, got {beta_bar_value}")
    px = decoupling_coefficient(x)
    if p < beta_bar_value * px:
        raise NotAdmissibleClassical(
            f"p={p} is below beta_bar * p(X) = {beta_bar_value * px:.12g}"
        )
    n = x.n
    det_c = matcore.lu_det(x.c)
    denom = (1.0 - 1.0 / beta_bar_value) ** ((n / 2.0) * (1.0 - 1.0 / p))
    return float(np.prod(x.sigma) ** (1.0 / p) / (denom * det_c ** (1.0 / (2.0 * p))))


@dataclass(frozen=True, eq=False)
class SimDiag:
    """Simultaneous diagonalization of the pencil (C, diag(gamma)).

    ``r`` = U D V satisfies R^T C R = I and R^T diag(gamma) R = diag(xi),
    where U diagonalizes C (eigenvalues ``mu``), D = diag(mu^(-1/2)), and V
    diagonalizes ``h`` = D (U^T diag(gamma) U) D.  The coefficients ``xi``
    are the per-column quadratic-form ratios
    <diag(gamma) r_j, r_j> / <C r_j, r_j>, stored ascending so that the
    breakpoints 1/xi are descending.
    """

    u: np.ndarray
    mu: np.ndarray
    d: np.ndarray
    h: np.ndarray
    v: np.ndarray
    r: np.ndarray
    xi: np.ndarray


def _build_simdiag(x: GaussianVector) -> SimDiag:
    spec_c = matcore.sym_eigen(x.c)
    mu = spec_c.eigenvalues
    if mu[0] <= 0.0:
        raise NotPositiveDefinite("covariance eigenvalues are not all positive")
    u = spec_c.eigenvectors
    dvec = 1.0 / np.sqrt(mu)
    w = u * dvec[np.newaxis, :]  # U D without forming D
    h = w.T @ (x.gamma[:, np.newaxis] * w)
    h = (h + h.T) / 2.0
    spec_h = matcore.sym_eigen(h)
    v = spec_h.eigenvectors
    r = w @ v
    num = np.einsum("ij,ij->j", r, x.gamma[:, np.newaxis] * r)
    den = np.einsum("ij,ij->j", r, x.c @ r)
    xi = num / den
    order = np.argsort(xi, kind="stable")
    v = v[:, order].copy()
    r = r[:, order].copy()
    xi = xi[order].copy()
    d = np.diag(dvec)
    for arr in (u, mu, d, h, v, r, xi):
        arr.setflags(write=False)
    return SimDiag(u=u, mu=mu, d=d, h=h, v=v, r=r, xi=xi)


def simultaneous_diagonalization(x: GaussianVector) -> SimDiag:
    """The cached R = U D V construction for this vector."""
    return x._simdiag


def correlation_eigs_oracle(x: GaussianVector) -> np.ndarray:
    """Eigenvalues of diag(1/sigma) C diag(1/sigma), descending.

    Computed with the Jacobi solver and without touching the U D V
    construction, so it is an independent check on the multiset {1/xi_j}.
    """
    k = x.c / np.outer(x.sigma, x.sigma)
    spec = matcore.jacobi_eigen(k)
    out = spec.eigenvalues[::-1].copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi) of exponents; hi may be math.inf."""

    lo: float
    hi: float
    admissible: bool


@dataclass(frozen=True, eq=False)
class AdmissibleRegion:
    """The admissible subset of (1, inf) for the region constant.

    ``breakpoints`` is the raw multiset {1/xi_j}, descending.  ``intervals``
    partition (1, inf) minus the breakpoints, in ascending order; an interval
    is admissible iff the number of breakpoints strictly above it is even
    (counting multiplicity), so the topmost interval is always admissible.
    ``collapsed`` lists the distinct excluded points above 1 with their
    multiplicities (near-coincident values merged).
    """

    breakpoints: tuple[float, ...]
    intervals: tuple[Interval, ...]
    collapsed: tuple[tuple[float, int], ...]

    def margin(self, p: float) -> float:
        return REGION_MARGIN_COEFF * max(1.0, float(p))

    def breakpoint_distance(self, p: float) -> float:
        return min(abs(float(p) - b) for b in self.breakpoints)

    def contains(self, p: float) -> bool:
        """Membership with safety margin: p must be > 1, farther than
        margin(p) from every breakpoint, and have an even count of
        breakpoints above it."""
        p = float(p)
        if not math.isfinite(p) or p <= 1.0:
            return False
        if self.breakpoint_distance(p) <= self.margin(p):
            return False
        above = sum(1 for b in self.breakpoints if b > p)
        return above % 2 == 0

    def classify(self, p: float) -> str:
        """'admissible', 'excluded', or 'breakpoint' (within margin)."""
        p = float(p)
        if not math.isfinite(p) or p <= 1.0:
            return "excluded"
        if self.breakpoint_distance(p) <= self.margin(p):
            return "breakpoint"
        above = sum(1 for b in self.breakpoints if b > p)
        return "admissible" if above % 2 == 0 else "excluded"

    def to_json_dict(self) -> dict:
        return {
            "breakpoints": [float(b) for b in self.breakpoints],
            "intervals": [
                {
                    "lo": iv.lo,
                    "hi": "inf" if math.isinf(iv.hi) else iv.hi,
                    "admissible": iv.admissible,
                }
                for iv in self.intervals
            ],
        }


def admissible_region(xi) -> AdmissibleRegion:
    """Build the admissible region from the coefficients xi (all > 0)."""
    arr = np.asarray(xi, dtype=float).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise InvalidParameter("xi must be a nonempty list of positive finite reals")
    bps = np.sort(1.0 / arr)[::-1]

    groups: list[list] = []
    for b in bps:
        if groups and groups[-1][0] - b <= BREAKPOINT_COLLAPSE_TOL * max(1.0, groups[-1][0]):
            groups[-1][1] += 1
        else:
            groups.append([float(b), 1])
    above1 = [(val, mult) for val, mult in groups if val > 1.0]

    descending: list[Interval] = []
    cum = 0
    upper = math.inf
    for val, mult in above1:
        descending.append(Interval(lo=val, hi=upper, admissible=(cum % 2 == 0)))
        cum += mult
        upper = val
    descending.append(Interval(lo=1.0, hi=upper, admissible=(cum % 2 == 0)))

    return AdmissibleRegion(
        breakpoints=tuple(float(b) for b in bps),
        intervals=tuple(reversed(descending)),
        collapsed=tuple((val, mult) for val, mult in above1),
    )


def region_of(x: GaussianVector) -> AdmissibleRegion:
    """The cached admissible region of this vector."""
    return x._region


def q_new(x: GaussianVector, p: float) -> float:
    """Region-based decoupling constant at exponent p.

    Q = (prod sigma_i)^(1/p) * det(C)^(-1/(2p))
        * (prod_j |1 - 1/(p xi_j)|)^(-(1/2)(1-1/p)).

    Raises NotInRegion when p is excluded or within the safety margin of a
    breakpoint (the constant diverges there).
    """
    region = x._region
    if not region.contains(p):
        raise NotInRegion(f"p={p} is not in the admissible region with margin")
    xi = x._simdiag.xi
    det_c = matcore.lu_det(x.c)
    prod_factor = float(np.prod(np.abs(1.0 - 1.0 / (p * xi))))
    return float(
        np.prod(x.sigma) ** (1.0 / p)
        * det_c ** (-1.0 / (2.0 * p))
        * prod_factor ** (-0.5 * (1.0 - 1.0 / p))
    )


def shifted_matrix(x: GaussianVector, p: float) -> np.ndarray:
    """p * diag(gamma) - C."""
    return np.diag(p * x.gamma) - x.c


def det_identity_residual(x: GaussianVector, p: float) -> float:
    """Relative gap between det(p*diag(gamma) - C) computed by pivoted LU and
    the closed form p^n * prod(gamma_i) * prod(1 - 1/(p xi_i)).

    The identity holds for every p > 0, admissible or not; on well-conditioned
    inputs the residual stays below 1e-8.
    """
    if not p > 0.0:
        raise InvalidParameter(f"p must be positive, got {p}")
    lhs = matcore.lu_det(shifted_matrix(x, p))
    xi = x._simdiag.xi
    rhs = float(p ** x.n * np.prod(x.gamma) * np.prod(1.0 - 1.0 / (p * xi)))
    denom = max(abs(lhs), abs(rhs))
    return 0.0 if denom == 0.0 else abs(lhs - rhs) / denom


def b_matrix(x: GaussianVector, p: float) -> np.ndarray:
    """The shifted precision matrix C^{-1} - (1/p) diag(1/gamma).

    Its determinant equals det(p*diag(gamma) - C) / (p^n det(C) prod gamma_j),
    which the tests verify against the pivoted-LU route.
    """
    if not p > 0.0:
        raise InvalidParameter(f"p must be positive, got {p}")
    low = x.cholesky_factor
    eye = np.eye(x.n)
    cinv = matcore.solve_upper(low.T, matcore.solve_lower(low, eye))
    b = cinv - np.diag(1.0 / (p * x.gamma))
    return (b + b.T) / 2.0


@dataclass(frozen=True)
class DecouplingReport:
    """Aggregate of both constants and the identity self-check at one p.

    ``q_new`` is present iff ``in_region``; ``q_old`` is present iff a valid
    beta_bar exists and p >= beta_bar * p(X).  ``b_positive_definite`` records
    whether all p*xi_j > 1, i.e. whether the shifted precision matrix is
    positive definite rather than merely of positive determinant.
    """

    p: float
    p_of_X: float
    beta_bar: float | None
    in_region: bool
    q_new: float | None
    q_old: float | None
    b_positive_definite: bool
    identity_residual: float

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "p_of_X": self.p_of_X,
            "beta_bar": self.beta_bar,
            "in_region": self.in_region,
            "q_new": self.q_new,
            "q_old": self.q_old,
            "b_positive_definite": self.b_positive_definite,
            "identity_residual": self.identity_residual,
        }


def analyze(
    x: GaussianVector,
    p: float,
    beta: float = 1.0,
    use_optimal_beta: bool = False,
) -> DecouplingReport:
    """One-stop report at exponent p: region membership, both constants when
    their hypotheses hold, and the determinant-identity residual.

    Inadmissibility never raises here; the corresponding fields are None.
    With ``use_optimal_beta`` the classical route uses the constant-minimizing
    beta_bar instead of max(variance ratio, beta).
    """
    if not p > 1.0:
        raise InvalidParameter(f"p must exceed 1, got {p}")
    if not beta >= 1.0:
        raise InvalidParameter(f"beta must be >= 1, got {beta}")
    px = decoupling_coefficient(x)
    xi = x._simdiag.xi
    in_region = x._region.contains(p)
    qn = q_new(x, p) if in_region else None

    bb: float | None
    if use_optimal_beta:
        try:
            bb = optimal_beta_bar(x, p)
        except NotAdmissibleClassical:
            bb = None
    else:
        try:
            bb = beta_bar(x, beta)
        except DegenerateBeta:
            bb = None
    qo = q_old(x, p, bb) if bb is not None and p >= bb * px else None

    return DecouplingReport(
        p=float(p),
        p_of_X=px,
        beta_bar=bb,
        in_region=in_region,
        q_new=qn,
        q_old=qo,
        b_positive_definite=bool(np.all(p * xi > 1.0)),
        identity_residual=det_identity_residual(x, p),
    )
