"""Deterministic covariance-matrix generators for tests, sweeps and examples.

Every family generates a matrix that passes ``decouple.from_covariance``;
invalid parameters raise InvalidParameter instead of producing a non-SPD
matrix.  Generation is pure: the same family instance always yields the
identical matrix, bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import matcore
from .errors import InvalidParameter, NonPositiveVariance, NotPositiveDefinite, NotSymmetric


@dataclass(frozen=True)
class AR1:
    """C_ij = rho^|i-j| with |rho| < 1."""

    n: int
    rho: float


@dataclass(frozen=True)
class Equicorrelated:
    """Unit diagonal, rho everywhere else; needs -1/(n-1) < rho < 1."""

    n: int
    rho: float


@dataclass(frozen=True)
class Toeplitz:
    """Symmetric Toeplitz matrix from its first row (must come out SPD)."""

    first_row: tuple[float, ...]


@dataclass(frozen=True)
class RandomSPD:
    """G^T G + eps*I for standard normal G, spectrum shifted to hit the
    target condition number exactly; deterministic in ``seed``."""

    n: int
    seed: int
    cond: float = 10.0


@dataclass(frozen=True)
class Diagonal:
    """diag(gamma) with strictly positive entries."""

    gamma: tuple[float, ...]


@dataclass(frozen=True)
class Scaled:
    """Conjugation of a base family by diag(sqrt(variances))."""

    base: "CovFamily"
    variances: tuple[float, ...]


CovFamily = Union[AR1, Equicorrelated, Toeplitz, RandomSPD, Diagonal, Scaled]

_RANDOM_SPD_EPS = 1e-8


def generate(fam: CovFamily) -> np.ndarray:
    """Generate the covariance matrix of a family descriptor."""
    if isinstance(fam, AR1):
        return _gen_ar1(fam)
    if isinstance(fam, Equicorrelated):
        return _gen_equicorrelated(fam)
    if isinstance(fam, Toeplitz):
        return _gen_toeplitz(fam)
    if isinstance(fam, RandomSPD):
        return _gen_random_spd(fam)
    if isinstance(fam, Diagonal):
        return _gen_diagonal(fam)
    if isinstance(fam, Scaled):
        return _gen_scaled(fam)
    raise InvalidParameter(f"unknown covariance family {fam!r}")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise InvalidParameter(message)


def _gen_ar1(fam: AR1) -> np.ndarray:
    _require(fam.n >= 1, f"n must be >= 1, got {fam.n}")
    _require(abs(fam.rho) < 1.0, f"ar1 needs |rho| < 1, got {fam.rho}")
    idx = np.arange(fam.n)
    return np.power(float(fam.rho), np.abs(idx[:, None] - idx[None, :]))


def _gen_equicorrelated(fam: Equicorrelated) -> np.ndarray:
    _require(fam.n >= 1, f"n must be >= 1, got {fam.n}")
    _require(abs(fam.rho) < 1.0, f"equicorrelated needs |rho| < 1, got {fam.rho}")
    if fam.n > 1:
        _require(
            fam.rho > -1.0 / (fam.n - 1),
            f"equicorrelated needs rho > -1/(n-1) = {-1.0 / (fam.n - 1):.6g}, got {fam.rho}",
        )
    m = np.full((fam.n, fam.n), float(fam.rho))
    np.fill_diagonal(m, 1.0)
    return m


def _check_spd(m: np.ndarray, what: str) -> np.ndarray:
    try:
        matcore.cholesky(m)
    except (NotPositiveDefinite, NotSymmetric, NonPositiveVariance) as exc:
        raise InvalidParameter(f"{what} does not define an SPD matrix: {exc}") from exc
    return m


def _gen_toeplitz(fam: Toeplitz) -> np.ndarray:
    row = np.asarray(fam.first_row, dtype=float).ravel()
    _require(row.size >= 1 and bool(np.all(np.isfinite(row))), "first_row must be finite and nonempty")
    idx = np.arange(row.size)
    m = row[np.abs(idx[:, None] - idx[None, :])]
    return _check_spd(m, "toeplitz first_row")


def _gen_random_spd(fam: RandomSPD) -> np.ndarray:
    _require(fam.n >= 2, f"randomspd needs n >= 2, got {fam.n}")
    _require(fam.cond > 1.0 and np.isfinite(fam.cond), f"randomspd needs cond > 1, got {fam.cond}")
    rng = np.random.default_rng(fam.seed)
    g = rng.standard_normal((fam.n, fam.n))
    base = g.T @ g
    base += _RANDOM_SPD_EPS * matcore.max_abs(base) * np.eye(fam.n)
    base = (base + base.T) / 2.0
    eigs = matcore.sym_eigen(base).eigenvalues
    lmin, lmax = float(eigs[0]), float(eigs[-1])
    _require(lmax > lmin, "randomspd spectrum is degenerate; try another seed")
    # Affine spectral shift: cond((A + c I)) = target exactly.
    shift = (lmax - fam.cond * lmin) / (fam.cond - 1.0)
    m = base + shift * np.eye(fam.n)
    return _check_spd((m + m.T) / 2.0, "randomspd")


def _gen_diagonal(fam: Diagonal) -> np.ndarray:
    gamma = np.asarray(fam.gamma, dtype=float).ravel()
    _require(
        gamma.size >= 1 and bool(np.all(np.isfinite(gamma))) and bool(np.all(gamma > 0.0)),
        "diagonal needs strictly positive finite variances",
    )
    return np.diag(gamma)


def _gen_scaled(fam: Scaled) -> np.ndarray:
    v = np.asarray(fam.variances, dtype=float).ravel()
    _require(
        v.size >= 1 and bool(np.all(np.isfinite(v))) and bool(np.all(v > 0.0)),
        "scaled needs strictly positive finite variances",
    )
    base = generate(fam.base)
    _require(v.size == base.shape[0], "variances length must match the base family dimension")
    root = np.sqrt(v)
    return root[:, None] * base * root[None, :]


def family_to_json(fam: CovFamily) -> dict:
    if isinstance(fam, AR1):
        return {"kind": "ar1", "n": fam.n, "rho": fam.rho}
    if isinstance(fam, Equicorrelated):
        return {"kind": "equicorrelated", "n": fam.n, "rho": fam.rho}
    if isinstance(fam, Toeplitz):
        return {"kind": "toeplitz", "first_row": list(fam.first_row)}
    if isinstance(fam, RandomSPD):
        return {"kind": "randomspd", "n": fam.n, "seed": fam.seed, "cond": fam.cond}
    if isinstance(fam, Diagonal):
        return {"kind": "diagonal", "gamma": list(fam.gamma)}
    if isinstance(fam, Scaled):
        return {
            "kind": "scaled",
            "base": family_to_json(fam.base),
            "variances": list(fam.variances),
        }
    raise InvalidParameter(f"unknown covariance family {fam!r}")


def family_from_json(doc: dict) -> CovFamily:
    """Parse a family descriptor; raises InvalidParameter on malformed input."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InvalidParameter(f"family descriptor must be an object with a 'kind': {doc!r}")
    kind = str(doc["kind"]).lower()
    try:
        if kind == "ar1":
            return AR1(n=int(doc["n"]), rho=float(doc["rho"]))
        if kind == "equicorrelated":
            return Equicorrelated(n=int(doc["n"]), rho=float(doc["rho"]))
        if kind == "toeplitz":
            return Toeplitz(first_row=tuple(float(v) for v in doc["first_row"]))
        if kind == "randomspd":
            return RandomSPD(
                n=int(doc["n"]), seed=int(doc["seed"]), cond=float(doc.get("cond", 10.0))
            )
        if kind == "diagonal":
            return Diagonal(gamma=tuple(float(v) for v in doc["gamma"]))
        if kind == "scaled":
            return Scaled(
                base=family_from_json(doc["base"]),
                variances=tuple(float(v) for v in doc["variances"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameter(f"malformed family descriptor {doc!r}: {exc}") from exc
    raise InvalidParameter(f"unknown family kind {doc['kind']!r}")
