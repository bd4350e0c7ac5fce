"""Exact second-order moments of a stable VAR process.

The autocovariance sequence Gamma(h) = E[X(t) X(t-h)'] is obtained from the
companion-form state covariance, which solves the discrete Lyapunov equation
P = C P C' + S, and is then extended to higher lags with the Yule-Walker
recursion Gamma(h) = sum_u A(u) Gamma(h-u).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoConvergence, ShapeMismatch
from .model import ChannelPair, VarModel, companion_matrix

#: Above this companion dimension the Lyapunov equation is solved by squaring
#: (doubling) instead of the vectorized dense linear system.
DIRECT_SOLVE_LIMIT = 64

#: Acceptable relative residual of the Lyapunov solve.
LYAPUNOV_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AutocovSequence:
    """Autocovariances Gamma(0..maxlag), with Gamma(-h) = Gamma(h)' implied.

    ``gammas[h]`` is the real d-by-d matrix E[X(t) X(t-h)'].
    """

    dim: int
    maxlag: int
    gammas: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        if g.shape != (self.maxlag + 1, self.dim, self.dim):
            raise ShapeMismatch(
                f"gammas shape {g.shape} inconsistent with dim {self.dim}, "
                f"maxlag {self.maxlag}"
            )
        g.setflags(write=False)
        object.__setattr__(self, "gammas", g)

    def gamma(self, h: int) -> np.ndarray:
        """Gamma(h) for any integer lag, using Gamma(-h) = Gamma(h)'."""
        if abs(h) > self.maxlag:
            raise ShapeMismatch(f"lag {h} beyond stored maxlag {self.maxlag}")
        return self.gammas[h] if h >= 0 else self.gammas[-h].T


def _solve_lyapunov_direct(comp: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = comp.shape[0]
    lhs = np.eye(n * n) - np.kron(comp, comp)
    return np.linalg.solve(lhs, rhs.reshape(-1)).reshape(n, n)


def _solve_lyapunov_doubling(comp: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    # P = sum_k C^k S C'^k, accumulated with squaring: quadratic convergence
    # for strictly stable C.
    p = rhs.copy()
    m = comp.copy()
    for _ in range(200):
        p = p + m @ p @ m.T
        m = m @ m
        if np.linalg.norm(m, "fro") ** 2 * np.linalg.norm(p, "fro") < 1e-16 * (
            1.0 + np.linalg.norm(p, "fro")
        ):
            return p
    raise NoConvergence("doubling iteration for the Lyapunov equation stalled")


def autocov(model: VarModel, maxlag: int | None = None) -> AutocovSequence:
    """Autocovariance sequence Gamma(0..maxlag) of a stable model.

    ``maxlag`` defaults to max(2 * order, 50), a generous tail for the
    downstream predictor recursion.

    Raises
    ------
    NoConvergence
        The iterative Lyapunov solve stalled or its residual exceeded
        1e-10 relative to the state covariance.
    """
    if maxlag is None:
        maxlag = max(2 * model.order, 50)
    if maxlag < 0:
        raise ShapeMismatch("maxlag must be non-negative")
    d, p = model.dim, model.order

    gammas = np.zeros((maxlag + 1, d, d))
    if p == 0:
        gammas[0] = model.sigma
        return AutocovSequence(dim=d, maxlag=maxlag, gammas=gammas)

    comp = companion_matrix(model)
    rhs = np.zeros_like(comp)
    rhs[:d, :d] = model.sigma
    if comp.shape[0] <= DIRECT_SOLVE_LIMIT:
        state_cov = _solve_lyapunov_direct(comp, rhs)
    else:
        state_cov = _solve_lyapunov_doubling(comp, rhs)
    state_cov = 0.5 * (state_cov + state_cov.T)

    residual = np.linalg.norm(comp @ state_cov @ comp.T + rhs - state_cov, "fro")
    if residual >= LYAPUNOV_RESIDUAL_TOL * max(1.0, np.linalg.norm(state_cov, "fro")):
        raise NoConvergence(
            f"Lyapunov residual {residual:.3g} exceeds tolerance"
        )

    # Companion state is (X(t), .., X(t-p+1)): its covariance holds
    # Gamma(0..p-1) in the top block row.
    for h in range(min(p, maxlag + 1)):
        gammas[h] = state_cov[:d, h * d : (h + 1) * d]
    for h in range(p, maxlag + 1):
        acc = np.zeros((d, d))
        for u in range(1, p + 1):
            acc += model.coeffs[u - 1] @ gammas[h - u]
        gammas[h] = acc
    return AutocovSequence(dim=d, maxlag=maxlag, gammas=gammas)


def subprocess_autocov(seq: AutocovSequence, pair) -> AutocovSequence:
    """Marginal autocovariances of a channel subset.

    ``pair`` may be a ChannelPair (retained order: target first, then
    source) or any sequence of distinct channel indices. Selecting channels
    from Gamma(h) is exact: the subprocess moments need no new solve.
    """
    channels = pair.channels if isinstance(pair, ChannelPair) else tuple(pair)
    if len(set(channels)) != len(channels):
        raise ShapeMismatch("subprocess channels must be distinct")
    for ch in channels:
        if not 0 <= ch < seq.dim:
            raise ShapeMismatch(f"channel {ch} out of range for dim {seq.dim}")
    sel = np.ix_(channels, channels)
    gammas = np.stack([g[sel] for g in seq.gammas])
    return AutocovSequence(dim=len(channels), maxlag=seq.maxlag, gammas=gammas)


def block_toeplitz(seq: AutocovSequence, nblocks: int | None = None) -> np.ndarray:
    """Block-Toeplitz covariance of the stacked vector (X(t), .., X(t-n+1)).

    Block (a, b) is Gamma(b - a). This matrix is the Gram matrix of the
    predictor problem; it is PSD for every valid autocovariance sequence.
    """
    n = seq.maxlag + 1 if nblocks is None else nblocks
    if n - 1 > seq.maxlag:
        raise ShapeMismatch(f"need lags up to {n - 1}, have {seq.maxlag}")
    d = seq.dim
    out = np.zeros((n * d, n * d))
    for a in range(n):
        for b in range(n):
            out[a * d : (a + 1) * d, b * d : (b + 1) * d] = seq.gamma(b - a)
    return out
