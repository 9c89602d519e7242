"""Cyclic quench protocol and per-configuration observables.

The initial state is the n0-th eigenstate (1-based, ascending energy) of
the pre-quench Hamiltonian; it evolves under the post-quench Hamiltonian
for a time tau and is then measured in the original eigenbasis.  All
observables reduce to the overlap matrix between the two eigenbases and
the post-quench spectrum.
"""

from dataclasses import dataclass, field

import numpy as np

from .backends import kernels

__all__ = [
    "QuenchSetup",
    "OverlapMatrix",
    "DistributionOverBasis",
    "TimeWindow",
    "EntropyTrace",
    "overlap_matrix",
    "survival_distribution",
    "diagonal_entropy",
    "diagonal_ensemble",
    "ipr",
    "entropy_trace",
]

# max |O^T O - I| (and |O O^T - I|) tolerated in an overlap matrix
OVERLAP_ORTHO_TOL = 1e-9
# distribution sanity: clamp floor and normalization tolerance
PROB_CLAMP = -1e-14
NORM_TOL = 1e-10
# p below this contributes 0 to -p ln p
ENTROPY_FLOOR = 1e-300
# eigenvalues closer than this fraction of the spectral span dephase
# coherently in the diagonal ensemble
DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class QuenchSetup:
    """One quench configuration: model at lambda0, amplitude delta_lambda,
    and the 1-based initial eigenstate index n0."""

    params: object
    lambda0: float
    delta_lambda: float
    n0: int

    def __post_init__(self):
        if self.delta_lambda < 0:
            raise ValueError("delta_lambda must be non-negative")
        if self.n0 < 1:
            raise ValueError("n0 is a 1-based eigenstate index")

    @property
    def lambda_quenched(self):
        return self.lambda0 + self.delta_lambda


@dataclass(frozen=True)
class TimeWindow:
    """Sampling window [tau0, tau0 + span] with n_steps equally spaced
    samples (inclusive endpoints)."""

    tau0: float = 1e7
    span: float = 250.0
    n_steps: int = 1000

    def __post_init__(self):
        if self.tau0 < 0:
            raise ValueError("tau0 must be non-negative")
        if self.span <= 0:
            raise ValueError("span must be positive")
        if self.n_steps < 2:
            raise ValueError("n_steps must be at least 2")

    def times(self):
        step = self.span / (self.n_steps - 1)
        return self.tau0 + step * np.arange(self.n_steps, dtype=np.float64)


class OverlapMatrix:
    """O[m, n] = <m(perturbed) | n(unperturbed)> with the perturbed
    eigenvalues attached; both index sets are energy-ordered."""

    __slots__ = ("o", "eprime", "ortho_defect")

    def __init__(self, o, eprime):
        o = np.ascontiguousarray(o, dtype=np.float64)
        eprime = np.ascontiguousarray(eprime, dtype=np.float64)
        if o.ndim != 2 or o.shape[0] != o.shape[1]:
            raise ValueError(f"overlap matrix must be square, got {o.shape}")
        if eprime.shape != (o.shape[0],):
            raise ValueError("perturbed eigenvalue vector has wrong length")
        eye = np.eye(o.shape[0])
        defect = max(
            float(np.max(np.abs(o.T @ o - eye))),
            float(np.max(np.abs(o @ o.T - eye))),
        )
        if defect > OVERLAP_ORTHO_TOL:
            raise ValueError(
                f"overlap matrix orthogonality defect {defect:.3e} exceeds "
                f"{OVERLAP_ORTHO_TOL:.1e}"
            )
        o.setflags(write=False)
        eprime.setflags(write=False)
        self.o = o
        self.eprime = eprime
        self.ortho_defect = defect

    @property
    def dim(self):
        return self.o.shape[0]

    def column(self, n0):
        """Amplitudes of the 1-based unperturbed state n0 over the
        perturbed basis."""
        if not 1 <= n0 <= self.dim:
            raise IndexError(f"n0={n0} outside 1..{self.dim}")
        return self.o[:, n0 - 1]


class DistributionOverBasis:
    """Probability vector over the unperturbed eigenbasis.

    Entries in [-1e-14, 0) are clamped to zero; anything more negative or
    a normalization defect beyond 1e-10 is rejected.
    """

    __slots__ = ("p",)

    def __init__(self, p):
        p = np.array(p, dtype=np.float64, copy=True)
        if p.ndim != 1:
            raise ValueError("distribution must be a vector")
        low = float(p.min(initial=0.0))
        if low < PROB_CLAMP:
            raise ValueError(f"probability {low:.3e} below the clamp floor")
        np.clip(p, 0.0, None, out=p)
        total = float(p.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"distribution sums to {total!r}, not 1")
        p.setflags(write=False)
        self.p = p

    def __len__(self):
        return self.p.shape[0]


def overlap_matrix(dec_a, dec_b):
    """Overlaps between the unperturbed basis (dec_a) and the perturbed
    basis (dec_b): O = V_B^T V_A, with E' taken from dec_b."""
    if dec_a.dim != dec_b.dim:
        raise ValueError(
            f"dimension mismatch: {dec_a.dim} (unperturbed) vs {dec_b.dim} "
            "(perturbed)"
        )
    o = dec_b.eigenvectors.T @ dec_a.eigenvectors
    return OverlapMatrix(o, dec_b.eigenvalues)


def survival_distribution(overlap, n0, tau):
    """C_n(tau) = |<n| exp(-i H' tau) |n0>|^2 over the unperturbed basis.

    Negative tau is accepted; for real overlaps C is even in tau.
    """
    a0 = np.ascontiguousarray(overlap.column(n0))
    c = kernels.survival_distribution(overlap.o, overlap.eprime, a0, float(tau))
    return DistributionOverBasis(c)


def diagonal_entropy(dist):
    """Shannon entropy -sum p ln p (natural log, 0 ln 0 = 0)."""
    p = dist.p if isinstance(dist, DistributionOverBasis) else np.asarray(dist)
    q = p[p >= ENTROPY_FLOOR]
    return float(-np.sum(q * np.log(q)))


def _degeneracy_classes(eprime):
    # boundaries where the gap between consecutive (ascending) perturbed
    # eigenvalues exceeds DEGENERACY_RTOL of the spectral span
    span = float(eprime[-1] - eprime[0])
    if span <= 0.0:
        return np.array([0], dtype=np.intp)
    tol = DEGENERACY_RTOL * span
    gaps = np.diff(eprime)
    starts = np.flatnonzero(gaps > tol) + 1
    return np.concatenate(([0], starts)).astype(np.intp)


def diagonal_ensemble(overlap, n0):
    """Infinite-time average mu_n of the survival distribution.

    Non-degenerate spectra dephase term by term; eigenvalues closer than
    1e-10 of the spectral span are merged into one class whose amplitudes
    sum coherently before squaring.
    """
    a0 = overlap.column(n0)
    starts = _degeneracy_classes(overlap.eprime)
    if starts.shape[0] == overlap.dim:
        w = overlap.o * a0[:, np.newaxis]
        mu = np.einsum("mn,mn->n", w, w)
    else:
        w = overlap.o * a0[:, np.newaxis]
        class_sums = np.add.reduceat(w, starts, axis=0)
        mu = np.einsum("cn,cn->n", class_sums, class_sums)
    return DistributionOverBasis(mu)


def ipr(overlap, n0):
    """Inverse participation ratio of |n0> over the perturbed basis,
    clamped to [1, dim] against rounding noise."""
    return ipr_of_amplitudes(overlap.column(n0))


def ipr_of_amplitudes(a0):
    a0 = np.asarray(a0, dtype=np.float64)
    p2 = a0 * a0
    xi = 1.0 / float(np.sum(p2 * p2))
    return min(max(xi, 1.0), float(a0.shape[0]))


@dataclass(frozen=True)
class EntropyTrace:
    """S_D(tau) sampled over a TimeWindow, with the largest normalization
    defect met along the trace."""

    window: TimeWindow
    samples: np.ndarray
    max_norm_dev: float = field(compare=False, default=0.0)

    def __post_init__(self):
        self.samples.setflags(write=False)
        if self.max_norm_dev > NORM_TOL:
            raise ValueError(
                f"survival distribution normalization drifted to "
                f"{self.max_norm_dev:.3e} during the trace"
            )

    @property
    def mean(self):
        return float(np.mean(self.samples))

    @property
    def variance(self):
        m = self.mean
        return max(float(np.mean(self.samples * self.samples) - m * m), 0.0)


def entropy_trace(overlap, n0, window):
    """Diagonal entropy of the survival distribution on the window grid."""
    a0 = np.ascontiguousarray(overlap.column(n0))
    taus = window.times()
    samples, max_dev = kernels.entropy_trace(overlap.o, overlap.eprime, a0, taus)
    return EntropyTrace(window=window, samples=samples, max_norm_dev=max_dev)
