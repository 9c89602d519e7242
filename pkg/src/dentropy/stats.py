"""Window statistics, the equilibration bound, and chaos diagnostics.

Covers the summary side of a quench study: time-window mean/variance of
the entropy trace, the universal localization curve, assembled
equilibration reports, spectral unfolding, and Brody / Kolmogorov-Smirnov
spacing diagnostics.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import quench
from .quench import TimeWindow  # noqa: F401  (window type is part of this surface)

__all__ = [
    "EULER_GAMMA",
    "TimeWindow",
    "EquilibrationReport",
    "SpacingStats",
    "window_stats",
    "universal_curve",
    "equilibration_report",
    "report_from_overlap",
    "unfold_spectrum",
    "brody_fit",
    "spacing_stats",
    "ks_distance",
]

EULER_GAMMA = 0.5772156649015329
# gap = s_dec - s_mean may dip below zero only by rounding noise
JENSEN_TOL = 1e-9
# unfolding defaults: degree-6 fit after trimming 10% of levels per edge
UNFOLD_DEGREE = 6
UNFOLD_TRIM = 0.10
MIN_UNFOLD_LEVELS = 100
MIN_BRODY_SPACINGS = 100
BRODY_Q_MAX = 1.2


@dataclass(frozen=True)
class EquilibrationReport:
    """One row of a quench sweep: localization, entropies, and their
    window statistics, plus provenance columns."""

    model: str
    lambda0: float
    delta_lambda: float
    n0: int
    dim: int
    xi: float
    s_dec: float
    s_mean: float
    s_var: float

    def __post_init__(self):
        if self.xi < 1.0:
            raise ValueError(f"xi={self.xi} below 1")
        if self.gap < -JENSEN_TOL:
            raise ValueError(
                f"s_dec - s_mean = {self.gap:.3e} violates concavity beyond "
                f"{JENSEN_TOL:.1e}"
            )

    @property
    def gap(self):
        return self.s_dec - self.s_mean

    @property
    def fluct(self):
        if self.s_mean == 0.0:
            return 0.0
        return math.sqrt(self.s_var) / self.s_mean


def window_stats(trace):
    """Arithmetic mean and population variance of the entropy samples.

    Variance is mean-of-squares minus squared-mean, floored at zero.
    """
    samples = trace.samples if isinstance(trace, quench.EntropyTrace) else np.asarray(trace)
    if samples.size == 0:
        raise ValueError("empty entropy trace")
    mean = float(np.mean(samples))
    var = float(np.mean(samples * samples) - mean * mean)
    return mean, max(var, 0.0)


def universal_curve(xi):
    """Localization-equilibration curve (1 - gamma) (xi - 1) / (xi + 1)."""
    if xi < 1.0:
        raise ValueError(f"xi must be >= 1, got {xi}")
    return (1.0 - EULER_GAMMA) * (xi - 1.0) / (xi + 1.0)


def report_from_overlap(overlap, n0, window, *, model, lambda0, delta_lambda):
    """Assemble an EquilibrationReport from a precomputed overlap matrix."""
    xi = quench.ipr(overlap, n0)
    s_dec = quench.diagonal_entropy(quench.diagonal_ensemble(overlap, n0))
    trace = quench.entropy_trace(overlap, n0, window)
    s_mean, s_var = window_stats(trace)
    return EquilibrationReport(
        model=model,
        lambda0=lambda0,
        delta_lambda=delta_lambda,
        n0=n0,
        dim=overlap.dim,
        xi=xi,
        s_dec=s_dec,
        s_mean=s_mean,
        s_var=s_var,
    )


def equilibration_report(setup, dec_a, dec_b, window):
    """Full pipeline for one QuenchSetup given both eigendecompositions."""
    overlap = quench.overlap_matrix(dec_a, dec_b)
    model = setup.params.label() if hasattr(setup.params, "label") else str(setup.params)
    return report_from_overlap(
        overlap,
        setup.n0,
        window,
        model=model,
        lambda0=setup.lambda0,
        delta_lambda=setup.delta_lambda,
    )


def unfold_spectrum(eigenvalues, poly_degree=UNFOLD_DEGREE, trim_fraction=UNFOLD_TRIM):
    """Unfolded nearest-neighbor spacings, rescaled to unit mean.

    The cumulative level count is fitted with a degree-poly_degree
    polynomial after discarding trim_fraction of the levels at each
    spectral edge; spacings are differences of the fitted count.
    """
    levels = np.sort(np.asarray(eigenvalues, dtype=np.float64))
    if not 0.0 <= trim_fraction < 0.5:
        raise ValueError("trim_fraction must lie in [0, 0.5)")
    n = levels.shape[0]
    k = int(n * trim_fraction)
    kept = levels[k : n - k]
    if kept.shape[0] < MIN_UNFOLD_LEVELS:
        raise ValueError(
            f"only {kept.shape[0]} levels left after trimming; need at least "
            f"{MIN_UNFOLD_LEVELS}"
        )
    counts = np.arange(k, n - k, dtype=np.float64) + 0.5
    fit = np.polynomial.Polynomial.fit(kept, counts, deg=poly_degree)
    smooth = fit(kept)
    spacings = np.diff(smooth)
    if np.any(spacings <= 0.0):
        raise ValueError(
            "unfolding produced non-positive spacings; the fitted level "
            "count is not monotone on this spectrum"
        )
    return spacings / spacings.mean()


def _brody_b(q):
    return math.gamma((q + 2.0) / (q + 1.0)) ** (q + 1.0)


def _brody_loglik(q, log_s, s):
    b = _brody_b(q)
    n = s.shape[0]
    return (
        n * math.log(q + 1.0)
        + n * math.log(b)
        + q * float(np.sum(log_s))
        - b * float(np.sum(s ** (q + 1.0)))
    )


def brody_fit(spacings):
    """Maximum-likelihood Brody parameter on [0, 1.2] (golden section).

    q = 0 is Poisson, q = 1 the Wigner surmise.  Degenerate (all-equal)
    spacing sets are rejected.
    """
    s = np.asarray(spacings, dtype=np.float64)
    if s.shape[0] < MIN_BRODY_SPACINGS:
        raise ValueError(f"need at least {MIN_BRODY_SPACINGS} spacings")
    if np.any(s <= 0.0):
        raise ValueError("spacings must be positive")
    mean = float(s.mean())
    if float(s.max() - s.min()) <= 1e-9 * mean:
        raise ValueError("degenerate spacing set: all spacings equal")
    s = s / mean  # the Brody normalization fixes the scale at unit mean
    log_s = np.log(s)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = 0.0, BRODY_Q_MAX
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1 = _brody_loglik(x1, log_s, s)
    f2 = _brody_loglik(x2, log_s, s)
    while hi - lo > 1e-7:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = _brody_loglik(x2, log_s, s)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = _brody_loglik(x1, log_s, s)
    return 0.5 * (lo + hi)


def poisson_cdf(s):
    return 1.0 - np.exp(-s)


def wigner_cdf(s):
    return 1.0 - np.exp(-0.25 * math.pi * s * s)


def ks_distance(spacings, cdf):
    """Kolmogorov-Smirnov distance between the empirical spacing CDF and
    a reference CDF."""
    s = np.sort(np.asarray(spacings, dtype=np.float64))
    n = s.shape[0]
    if n == 0:
        raise ValueError("no spacings")
    ref = cdf(s)
    grid = np.arange(1, n + 1, dtype=np.float64) / n
    return float(np.max(np.maximum(grid - ref, ref - (grid - 1.0 / n))))


@dataclass(frozen=True)
class SpacingStats:
    """Unfolded spacings with their histogram and chaos diagnostics."""

    spacings: np.ndarray
    hist_counts: np.ndarray
    hist_edges: np.ndarray
    brody_q: float
    ks_poisson: float
    ks_wigner: float

    def __post_init__(self):
        if abs(float(self.spacings.mean()) - 1.0) > 1e-6:
            raise ValueError("unfolded spacings must have unit mean")
        if not 0.0 <= self.brody_q <= BRODY_Q_MAX:
            raise ValueError(f"brody_q={self.brody_q} outside [0, {BRODY_Q_MAX}]")


def spacing_stats(eigenvalues, poly_degree=UNFOLD_DEGREE, trim_fraction=UNFOLD_TRIM,
                  bins=50):
    """Unfold a spectrum and bundle all spacing diagnostics."""
    s = unfold_spectrum(eigenvalues, poly_degree, trim_fraction)
    counts, edges = np.histogram(s, bins=bins, range=(0.0, float(s.max())))
    return SpacingStats(
        spacings=s,
        hist_counts=counts,
        hist_edges=edges,
        brody_q=brody_fit(s),
        ks_poisson=ks_distance(s, poisson_cdf),
        ks_wigner=ks_distance(s, wigner_cdf),
    )
