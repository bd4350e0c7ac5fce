"""Frequency-domain machinery for stationary VAR processes.

Everything here is sampled on a grid of angular frequencies lambda in
[0, pi] (radians per sample). The central objects are the characteristic
matrix polynomial

    A(lambda) = I - sum_u A(u) exp(-i u lambda),

its inverse H(lambda) (the transfer function), the spectral density
f(lambda) = H(lambda) Sigma H(lambda)* / (2 pi), and the directed transfer
function built from |H_jk|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateRow, ShapeMismatch, SingularAtFrequency
from .model import VarModel

#: Number of grid points used when no grid is given: odd, so the midpoint
#: pi/2 is on the grid, and dense enough for the whiteness metrics.
DEFAULT_GRID_COUNT = 257

#: Frobenius residual of H(lambda) A(lambda) - I beyond which the inversion
#: is reported as singular.
INVERSION_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Strictly increasing frequencies in [0, pi], radians per sample."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ShapeMismatch("grid needs at least two frequency points")
        if np.any(np.diff(pts) <= 0):
            raise ShapeMismatch("grid points must be strictly increasing")
        if pts[0] < 0.0 or pts[-1] > np.pi + 1e-12:
            raise ShapeMismatch("grid points must lie in [0, pi]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size


def default_grid(count: int = DEFAULT_GRID_COUNT) -> FrequencyGrid:
    """Equally spaced grid on [0, pi] inclusive."""
    return FrequencyGrid(np.linspace(0.0, np.pi, count))


@dataclass(frozen=True, eq=False)
class FrequencyMatrix:
    """Complex matrix-valued function sampled on a frequency grid.

    ``values[m]`` is the matrix at ``grid.points[m]``. Blocks cut out of a
    square matrix are supported, so values may be rectangular.
    """

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 3:
            raise ShapeMismatch("values must be a (points, rows, cols) array")
        if vals.shape[0] != len(self.grid):
            raise ShapeMismatch(
                f"{vals.shape[0]} matrices for {len(self.grid)} grid points"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        rows, cols = self.values.shape[1:]
        if rows != cols:
            raise ShapeMismatch("dim is only defined for square values")
        return rows


def char_polynomial(model: VarModel, grid: FrequencyGrid) -> FrequencyMatrix:
    """Characteristic matrix polynomial A(lambda) sampled on the grid.

    A(0) equals I minus the sum of all lag matrices; a white-noise model
    yields the identity at every frequency.
    """
    lams = grid.points
    values = np.broadcast_to(
        np.eye(model.dim, dtype=complex), (lams.size, model.dim, model.dim)
    ).copy()
    if model.order > 0:
        coeffs = np.stack(model.coeffs)  # (p, d, d)
        lags = np.arange(1, model.order + 1)
        phases = np.exp(-1j * np.outer(lams, lags))  # (n, p)
        values -= np.einsum("np,pjk->njk", phases, coeffs)
    return FrequencyMatrix(grid=grid, values=values)


def transfer_function(model: VarModel, grid: FrequencyGrid) -> FrequencyMatrix:
    """Transfer function H(lambda) = A(lambda)^-1 on the grid.

    Inversion is pivoted-LU per frequency point, with a residual check
    ||H A - I||_F < 1e-10 at every point.

    Raises
    ------
    SingularAtFrequency
        If A(lambda) is singular or the inversion residual exceeds the
        tolerance; this signals a model numerically too close to the unit
        circle.
    """
    a = char_polynomial(model, grid)
    h = _invert_pointwise(a)
    return h


def _invert_pointwise(fm: FrequencyMatrix, detail: str = "") -> FrequencyMatrix:
    values = fm.values
    n, d = values.shape[0], values.shape[1]
    eye = np.eye(d)
    try:
        inv = np.linalg.inv(values)
    except np.linalg.LinAlgError:
        inv = np.empty_like(values)
        for m in range(n):
            try:
                inv[m] = np.linalg.inv(values[m])
            except np.linalg.LinAlgError:
                raise SingularAtFrequency(fm.grid.points[m], detail) from None
    residual = np.linalg.norm(inv @ values - eye, axis=(1, 2))
    bad = np.nonzero(residual >= INVERSION_RESIDUAL_TOL)[0]
    if bad.size:
        raise SingularAtFrequency(
            fm.grid.points[bad[0]],
            detail or f"inversion residual {residual[bad[0]]:.3g}",
        )
    return FrequencyMatrix(grid=fm.grid, values=inv)


def spectral_density(model: VarModel, grid: FrequencyGrid) -> FrequencyMatrix:
    """Spectral density matrix f(lambda) = H Sigma H* / (2 pi).

    Values are exactly Hermitian (enforced by symmetrization) and positive
    semi-definite up to rounding. For a white-noise model this is the
    constant Sigma / (2 pi).
    """
    h = transfer_function(model, grid)
    hv = h.values
    f = hv @ model.sigma @ hv.conj().transpose(0, 2, 1)
    f = 0.5 * (f + f.conj().transpose(0, 2, 1)) / (2.0 * np.pi)
    return FrequencyMatrix(grid=grid, values=f)


def dtf(model: VarModel, grid: FrequencyGrid, normalized: bool = True) -> np.ndarray:
    """Directed transfer function on the grid.

    Returns a real array of shape ``(len(grid), d, d)`` whose ``[m, j, k]``
    entry is the influence of channel ``k`` on channel ``j`` at frequency
    ``grid.points[m]``: the squared transfer-function modulus |H_jk|^2, or,
    when ``normalized``, that quantity divided by the row sum
    sum_m |H_jm|^2 so values lie in [0, 1].

    Normalization never moves a zero: an entry vanishes exactly when
    H_jk(lambda) does.

    Raises
    ------
    DegenerateRow
        If a whole row of H vanishes at some frequency, so the row cannot
        be normalized.
    """
    return dtf_from_transfer(transfer_function(model, grid), normalized)


def dtf_from_transfer(h: FrequencyMatrix, normalized: bool = True) -> np.ndarray:
    """Directed transfer function of an already-computed transfer function."""
    power = np.abs(h.values) ** 2
    if not normalized:
        return power
    row_power = power.sum(axis=2, keepdims=True)
    degenerate = np.nonzero(row_power[:, :, 0] <= 0.0)
    if degenerate[0].size:
        m, j = degenerate[0][0], degenerate[1][0]
        raise DegenerateRow(
            f"row {j + 1} of H vanishes at frequency {h.grid.points[m]:.6g}"
        )
    return power / row_power


def frequency_matrix_to_csv(fm: FrequencyMatrix, fh) -> None:
    """Write a FrequencyMatrix as CSV.

    Header: ``lambda`` followed by ``re_j_k,im_j_k`` for every entry in
    row-major order, channel indices 1-based.
    """
    rows, cols = fm.values.shape[1:]
    header = ["lambda"]
    for j in range(1, rows + 1):
        for k in range(1, cols + 1):
            header += [f"re_{j}_{k}", f"im_{j}_{k}"]
    fh.write(",".join(header) + "\n")
    for m, lam in enumerate(fm.grid.points):
        cells = [format(lam, ".17g")]
        for j in range(rows):
            for k in range(cols):
                z = fm.values[m, j, k]
                cells += [format(z.real, ".17g"), format(z.imag, ".17g")]
        fh.write(",".join(cells) + "\n")
