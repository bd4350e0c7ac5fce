"""Directed-influence verdicts per ordered channel pair.

Three population-level notions are evaluated side by side for each ordered
pair (target <- source):

* DTF nullity: the transfer-function entry H[target, source] vanishes on
  the whole grid.
* Multivariate Granger causality: some full-model lag coefficient
  A[target, source](u) is nonzero (exact structural check).
* Bivariate Granger causality: the pair's exact marginal representation has
  a nonzero coefficient of the source in the target's equation.

These can disagree: a pair may have identically zero DTF while the source
bivariately Granger-causes the target, and a nonzero DTF does not require a
multivariate causal link. Such pairs carry a contradiction flag. All
verdicts are computed from the known model, never from data, because the
question is about the measures themselves rather than estimation error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import VardtfError
from .marginal import DEFAULT_Q_MAX, DEFAULT_TOL, marginal_representation
from .model import ChannelPair, VarModel
from .spectral import FrequencyGrid, default_grid, dtf

#: Absolute threshold on normalized DTF below which a pair's DTF is "zero";
#: structural zeros compute to machine epsilon, orders of magnitude lower.
DTF_ZERO_TOL = 1e-10

#: Marginal coefficients count as nonzero when they exceed this times the
#: square root of the innovation-covariance norm; separates structural zeros
#: from truncation residue.
GC_REL_THRESHOLD = 1e-6


@dataclass(frozen=True)
class PairVerdict:
    """All verdicts for a single ordered pair, with supporting magnitudes.

    ``contradiction`` is set when DTF is zero yet the source bivariately
    Granger-causes the target, or when DTF is nonzero without a
    multivariate causal link. ``error`` carries a message when the
    bivariate verdict could not be computed; the remaining fields are still
    filled.
    """

    target: int
    source: int
    dtf_zero: bool
    bivariate_gc: bool | None
    multivariate_gc: bool
    contradiction: bool
    max_dtf: float
    max_phi: float | None
    max_coeff: float
    error: str | None = None


@dataclass(frozen=True)
class CausalityReport:
    """Per-pair verdicts for every ordered channel pair, sorted by (target, source)."""

    dim: int
    pairs: tuple

    @property
    def contradictions(self) -> tuple:
        return tuple(p for p in self.pairs if p.contradiction)


def multivariate_gc(model: VarModel, pair: ChannelPair) -> tuple:
    """Does the source channel Granger-cause the target within the full model?

    Exact structural check: true iff some lag coefficient
    A[target, source](u) is nonzero. Coefficients are user-specified, so no
    tolerance is applied. Returns (flag, max absolute coefficient).
    """
    pair.check_dim(model.dim)
    top = 0.0
    for a in model.coeffs:
        top = max(top, float(abs(a[pair.target, pair.source])))
    return top != 0.0, top


def bivariate_gc(
    model: VarModel,
    pair: ChannelPair,
    q_max: int = DEFAULT_Q_MAX,
    tol: float = DEFAULT_TOL,
) -> tuple:
    """Does the source Granger-cause the target in the pair's own representation?

    Runs the exact marginal representation of the pair and tests the
    (target, source) coefficient entries against the significance
    threshold. Returns (flag, max absolute coefficient entry).
    """
    rep = marginal_representation(model, pair, q_max=q_max, tol=tol)
    top = 0.0
    if rep.order_used > 0:
        top = float(np.max(np.abs(rep.phis[:, 0, 1])))
    threshold = GC_REL_THRESHOLD * np.sqrt(
        max(np.linalg.norm(rep.innov_cov, "fro"), np.finfo(float).tiny)
    )
    return bool(top > threshold), top


def full_report(
    model: VarModel,
    grid: FrequencyGrid | None = None,
    q_max: int = DEFAULT_Q_MAX,
    tol: float = DEFAULT_TOL,
) -> CausalityReport:
    """All three verdicts for every ordered pair of distinct channels.

    Per-pair numerical failures (e.g. a non-converged marginalization) are
    recorded in that pair's ``error`` field without aborting the remaining
    pairs.
    """
    if grid is None:
        grid = default_grid()
    dtf_vals = dtf(model, grid, normalized=True)
    verdicts = []
    for target in range(model.dim):
        for source in range(model.dim):
            if source == target:
                continue
            pair = ChannelPair(source=source, target=target)
            max_dtf = float(np.max(dtf_vals[:, target, source]))
            dtf_zero = max_dtf < DTF_ZERO_TOL
            mv_flag, max_coeff = multivariate_gc(model, pair)
            try:
                bi_flag, max_phi = bivariate_gc(model, pair, q_max=q_max, tol=tol)
                error = None
            except VardtfError as exc:
                bi_flag, max_phi, error = None, None, str(exc)
            contradiction = bool(
                (dtf_zero and bi_flag is True)
                or (not dtf_zero and not mv_flag)
            )
            verdicts.append(
                PairVerdict(
                    target=target,
                    source=source,
                    dtf_zero=dtf_zero,
                    bivariate_gc=bi_flag,
                    multivariate_gc=mv_flag,
                    contradiction=contradiction,
                    max_dtf=max_dtf,
                    max_phi=max_phi,
                    max_coeff=max_coeff,
                    error=error,
                )
            )
    verdicts.sort(key=lambda v: (v.target, v.source))
    return CausalityReport(dim=model.dim, pairs=tuple(verdicts))
