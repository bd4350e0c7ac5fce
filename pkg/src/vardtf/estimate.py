"""Simulation and data-driven cross-checks for VAR models.

This module is the empirical oracle for the exact computations elsewhere:
trajectories simulated from a known model should reproduce its moments and
spectra, least-squares fits should recover its coefficients, and residuals
of a correctly specified fit should pass whiteness diagnostics.

Simulation uses a counter-based generator (Philox) so trajectories are
reproducible across platforms for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from .exceptions import RankDeficientRegressors, ShapeMismatch
from .model import VarModel, make_var
from .moments import AutocovSequence

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        return decorator


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Simulated sample path with its provenance.

    ``samples`` is a (length, dim) array, one row per time point.
    """

    dim: int
    length: int
    samples: np.ndarray
    seed: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.shape != (self.length, self.dim):
            raise ShapeMismatch(
                f"samples shape {samples.shape} inconsistent with "
                f"length {self.length}, dim {self.dim}"
            )
        if not np.all(np.isfinite(samples)):
            raise ShapeMismatch("trajectory contains non-finite values")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)


@dataclass(frozen=True, eq=False)
class FitResult:
    """Least-squares VAR fit: model, per-coefficient standard errors, residuals.

    ``stderr[u-1, j, k]`` is the standard error of the lag-u coefficient of
    channel k in channel j's equation. ``resid_acorr[l-1]`` is the lag-l
    residual autocorrelation matrix.
    """

    model: VarModel
    stderr: np.ndarray
    residuals: np.ndarray
    resid_acorr: np.ndarray
    nobs: int


@dataclass(frozen=True, eq=False)
class WhitenessReport:
    """Residual cross-correlation diagnostics and a portmanteau statistic.

    ``lag_corr[l-1]`` is the lag-l correlation matrix of the residuals;
    ``lag_norms[l-1]`` its largest absolute entry. The statistic is the
    small-sample multivariate portmanteau aggregate, chi-square with ``df``
    degrees of freedom under whiteness.
    """

    lag_corr: np.ndarray
    lag_norms: np.ndarray
    statistic: float
    df: int
    p_value: float


@njit(cache=False)
def _recurse(coeffs, eps, p):  # pragma: no cover - numba-compiled
    n, d = eps.shape
    out = np.zeros((n, d))
    for t in range(n):
        for j in range(d):
            acc = eps[t, j]
            for u in range(p):
                if t - 1 - u >= 0:
                    for k in range(d):
                        acc += coeffs[u, j, k] * out[t - 1 - u, k]
            out[t, j] = acc
    return out


def _recurse_numpy(coeffs, eps, p):
    n, d = eps.shape
    out = np.zeros((n, d))
    for t in range(n):
        acc = eps[t].copy()
        for u in range(min(p, t)):
            acc += coeffs[u] @ out[t - 1 - u]
        out[t] = acc
    return out


def _innovation_factor(sigma: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        # PSD but singular: factor through the eigendecomposition.
        w, u = np.linalg.eigh(sigma)
        return u * np.sqrt(np.clip(w, 0.0, None))


def simulate(
    model: VarModel, length: int, seed: int, burn_in: int = 1000
) -> Trajectory:
    """Simulate a trajectory with Gaussian innovations.

    Starts from zero initial conditions, runs ``burn_in`` extra steps to
    wash out the start, and keeps the last ``length`` samples. Deterministic
    for a given seed.
    """
    if length < 1:
        raise ShapeMismatch("length must be positive")
    if burn_in < 10 * model.order:
        raise ShapeMismatch(
            f"burn_in {burn_in} below 10 * order = {10 * model.order}"
        )
    rng = np.random.Generator(np.random.Philox(seed))
    total = burn_in + length
    eps = rng.standard_normal((total, model.dim)) @ _innovation_factor(model.sigma).T
    if model.order == 0:
        samples = eps[burn_in:]
    else:
        coeffs = np.stack(model.coeffs)
        kernel = _recurse if HAS_NUMBA else _recurse_numpy
        samples = kernel(coeffs, eps, model.order)[burn_in:]
    return Trajectory(dim=model.dim, length=length, samples=samples, seed=seed)


def sample_autocov(samples: np.ndarray, maxlag: int) -> AutocovSequence:
    """Sample autocovariances Gamma_hat(0..maxlag) of a (T, d) array."""
    samples = np.asarray(samples, dtype=float)
    t_len, d = samples.shape
    if maxlag >= t_len:
        raise ShapeMismatch("maxlag must be below the sample length")
    centered = samples - samples.mean(axis=0)
    gammas = np.empty((maxlag + 1, d, d))
    for h in range(maxlag + 1):
        gammas[h] = centered[h:].T @ centered[: t_len - h] / t_len
    return AutocovSequence(dim=d, maxlag=maxlag, gammas=gammas)


def _lag_matrix(samples: np.ndarray, order: int) -> np.ndarray:
    t_len, d = samples.shape
    cols = [samples[order - u : t_len - u] for u in range(1, order + 1)]
    return np.concatenate(cols, axis=1)


def fit_var(traj: Trajectory, order: int, diag_lags: int = 12) -> FitResult:
    """Ordinary least squares fit of a VAR(order), one regression per equation.

    All equations share the lagged-regressor matrix, so a single
    decomposition serves every channel. Standard errors come from the
    regression information matrix with degrees-of-freedom-corrected residual
    covariance.

    Raises
    ------
    RankDeficientRegressors
        The lag matrix does not have full column rank.
    """
    if order < 1:
        raise ShapeMismatch("fit order must be at least 1")
    samples = traj.samples
    t_len, d = samples.shape
    ncoef = d * order
    if t_len - order <= ncoef:
        raise ShapeMismatch(
            f"trajectory too short ({t_len}) for order {order} fit"
        )
    design = _lag_matrix(samples, order)
    response = samples[order:]
    gram = design.T @ design
    try:
        chol = linalg.cho_factor(gram)
    except np.linalg.LinAlgError:
        raise RankDeficientRegressors(
            f"lag matrix gram ({ncoef} columns) is not positive definite"
        ) from None
    coef = linalg.cho_solve(chol, design.T @ response)
    residuals = response - design @ coef
    nobs = response.shape[0]
    dof = nobs - ncoef
    sigma = residuals.T @ residuals / dof

    gram_inv = linalg.cho_solve(chol, np.eye(ncoef))
    # coef[(u-1)*d + k, j] is the lag-u weight of channel k in equation j.
    coeffs = [coef[(u - 1) * d : u * d, :].T for u in range(1, order + 1)]
    stderr = np.empty((order, d, d))
    diag_gram = np.diag(gram_inv)
    for u in range(order):
        for k in range(d):
            stderr[u, :, k] = np.sqrt(sigma.diagonal() * diag_gram[u * d + k])

    fitted = make_var(coeffs, sigma)
    acorr = _lag_correlations(residuals, min(diag_lags, nobs - 1))
    return FitResult(
        model=fitted,
        stderr=stderr,
        residuals=residuals,
        resid_acorr=acorr,
        nobs=nobs,
    )


def _lag_correlations(residuals: np.ndarray, maxlag: int) -> np.ndarray:
    t_len, d = residuals.shape
    centered = residuals - residuals.mean(axis=0)
    c0 = centered.T @ centered / t_len
    scale = np.sqrt(np.outer(np.diag(c0), np.diag(c0)))
    corr = np.empty((maxlag, d, d))
    for lag in range(1, maxlag + 1):
        c = centered[lag:].T @ centered[: t_len - lag] / t_len
        corr[lag - 1] = c / scale
    return corr


def whiteness_stats(
    residuals: np.ndarray, maxlag: int, df_model: int = 0
) -> WhitenessReport:
    """Portmanteau whiteness diagnostics of a residual array.

    ``df_model`` is the fitted VAR order; it reduces the chi-square degrees
    of freedom to d^2 (maxlag - df_model). Correct white residuals give each
    lag correlation entries of size O(1/sqrt(T)).
    """
    residuals = np.asarray(residuals, dtype=float)
    t_len, d = residuals.shape
    if maxlag >= t_len:
        raise ShapeMismatch("maxlag must be below the residual length")
    centered = residuals - residuals.mean(axis=0)
    c0 = centered.T @ centered / t_len
    c0_inv = np.linalg.inv(c0)
    corr = _lag_correlations(residuals, maxlag)
    statistic = 0.0
    for lag in range(1, maxlag + 1):
        c = centered[lag:].T @ centered[: t_len - lag] / t_len
        term = c.T @ c0_inv @ c @ c0_inv
        statistic += float(np.trace(term)) / (t_len - lag)
    statistic *= t_len * t_len
    df = d * d * max(maxlag - df_model, 1)
    p_value = float(stats.chi2.sf(statistic, df))
    return WhitenessReport(
        lag_corr=corr,
        lag_norms=np.max(np.abs(corr), axis=(1, 2)),
        statistic=statistic,
        df=df,
        p_value=p_value,
    )


def residual_whiteness(fit: FitResult, maxlag: int) -> WhitenessReport:
    """Whiteness diagnostics of a fit's residuals (see ``whiteness_stats``)."""
    return whiteness_stats(fit.residuals, maxlag, df_model=fit.model.order)


def write_trajectory(traj: Trajectory, fh) -> None:
    """Write a trajectory as CSV with header ``t,ch1..chd``."""
    header = ["t"] + [f"ch{j}" for j in range(1, traj.dim + 1)]
    fh.write(",".join(header) + "\n")
    for t in range(traj.length):
        cells = [str(t)] + [format(x, ".17g") for x in traj.samples[t]]
        fh.write(",".join(cells) + "\n")


def read_trajectory(fh, seed: int = 0) -> Trajectory:
    """Read a trajectory from the CSV format written by ``write_trajectory``."""
    header = fh.readline().strip().split(",")
    if not header or header[0] != "t":
        raise ShapeMismatch("trajectory CSV must start with a 't' column")
    dim = len(header) - 1
    if dim < 1:
        raise ShapeMismatch("trajectory CSV has no channel columns")
    rows = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != dim + 1:
            raise ShapeMismatch(
                f"trajectory row has {len(cells)} cells, expected {dim + 1}"
            )
        rows.append([float(c) for c in cells[1:]])
    samples = np.asarray(rows)
    return Trajectory(dim=dim, length=samples.shape[0], samples=samples, seed=seed)
