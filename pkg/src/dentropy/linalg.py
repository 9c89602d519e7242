"""Dense real-symmetric eigendecomposition with explicit accuracy contracts.

Everything downstream (model spectra, overlap matrices, quench traces)
relies on the residual and orthonormality guarantees enforced here, so
they are checked at construction time rather than left to the caller.
"""

from dataclasses import dataclass, field

import numpy as np

from .backends import kernels
from .errors import EigenConvergenceError

__all__ = [
    "SymmetricMatrix",
    "SpectralDecomposition",
    "eigh",
    "matvec",
    "jacobi_eigh",
    "ORTHONORMALITY_TOL",
    "RESIDUAL_TOL_FACTOR",
]

# max |V^T V - I| allowed in a decomposition
ORTHONORMALITY_TOL = 1e-10
# ||H v - E v||_2 <= RESIDUAL_TOL_FACTOR * max|H| * dim, per eigenpair
RESIDUAL_TOL_FACTOR = 1e-9
# implicit-QL iteration cap per eigenvalue
MAX_QL_ITER = 50
# jacobi_eigh is a small-matrix reference implementation only
JACOBI_MAX_DIM = 64


class SymmetricMatrix:
    """Dense real symmetric matrix (dimensionless energy units, hbar = 1).

    Construction rejects non-square, non-finite, or not exactly symmetric
    input; the stored array is read-only so instances can be shared freely
    across threads.
    """

    __slots__ = ("entries", "basis")

    def __init__(self, entries, basis=None):
        arr = np.array(entries, dtype=np.float64, order="C", copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("symmetric matrix has non-finite entries")
        if not np.array_equal(arr, arr.T):
            raise ValueError("matrix entries are not exactly symmetric")
        arr.setflags(write=False)
        self.entries = arr
        self.basis = basis

    @property
    def dim(self):
        return self.entries.shape[0]

    def max_abs(self):
        return float(np.max(np.abs(self.entries)))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors (column k <-> E_k).

    The sign convention (largest-magnitude entry of each eigenvector is
    positive) makes the output deterministic; orthonormality is validated
    at construction.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    ortho_defect: float = field(default=0.0, compare=False)

    def __post_init__(self):
        w, v = self.eigenvalues, self.eigenvectors
        if np.any(np.diff(w) < 0):
            raise ValueError("eigenvalues are not ascending")
        gram = v.T @ v
        defect = float(np.max(np.abs(gram - np.eye(v.shape[1]))))
        if defect > ORTHONORMALITY_TOL:
            raise ValueError(
                f"eigenvector orthonormality defect {defect:.3e} exceeds "
                f"{ORTHONORMALITY_TOL:.1e}"
            )
        object.__setattr__(self, "ortho_defect", defect)
        w.setflags(write=False)
        v.setflags(write=False)

    @property
    def dim(self):
        return self.eigenvalues.shape[0]


def _fix_signs(zt):
    # Make the largest-magnitude entry of each eigenvector (rows of zt)
    # positive; ties resolved by the first maximal index, so the output
    # is deterministic.
    n = zt.shape[0]
    lead = np.argmax(np.abs(zt), axis=1)
    flip = zt[np.arange(n), lead] < 0.0
    zt[flip] *= -1.0
    return zt


def _finalize(w, zt, h):
    order = np.argsort(w, kind="stable")
    w = np.ascontiguousarray(w[order])
    zt = np.ascontiguousarray(zt[order])
    v = np.ascontiguousarray(_fix_signs(zt).T)
    dec = SpectralDecomposition(eigenvalues=w, eigenvectors=v)
    residual = h.entries @ v - v * w[np.newaxis, :]
    res_norms = np.sqrt(np.sum(residual * residual, axis=0))
    tol = RESIDUAL_TOL_FACTOR * h.max_abs() * h.dim
    worst = float(np.max(res_norms))
    if worst > tol and tol > 0.0:
        raise EigenConvergenceError(h.dim, MAX_QL_ITER)
    return dec


def eigh(h):
    """Full eigendecomposition of a SymmetricMatrix.

    Deterministic: two calls on the same matrix produce bit-identical
    output.  Raises EigenConvergenceError if the QL iteration cap is hit
    or the residual contract cannot be met.
    """
    if not isinstance(h, SymmetricMatrix):
        h = SymmetricMatrix(h)
    a = np.array(h.entries, dtype=np.float64, order="C", copy=True)
    w, zt = kernels.sym_eigh(a, MAX_QL_ITER)
    return _finalize(w, zt, h)


def matvec(h, v):
    """Dense product H @ v with a dimension check."""
    if not isinstance(h, SymmetricMatrix):
        h = SymmetricMatrix(h)
    vec = np.asarray(v, dtype=np.float64)
    if vec.shape != (h.dim,):
        raise ValueError(f"vector shape {vec.shape} does not match dim {h.dim}")
    return h.entries @ vec


def jacobi_eigh(h, max_sweeps=60):
    """Cyclic-Jacobi eigensolver for dim <= 64.

    Independent of the Householder/QL route on purpose: it serves as the
    small-matrix oracle in the test suite.
    """
    if not isinstance(h, SymmetricMatrix):
        h = SymmetricMatrix(h)
    n = h.dim
    if n > JACOBI_MAX_DIM:
        raise ValueError(f"jacobi_eigh is limited to dim <= {JACOBI_MAX_DIM}")
    a = np.array(h.entries, dtype=np.float64, copy=True)
    v = np.eye(n)
    if n == 1:
        return _finalize(np.diag(a).copy(), v, h)
    scale = h.max_abs()
    thresh = 1e-14 * scale if scale > 0.0 else 0.0
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off = max(off, abs(a[p, q]))
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = np.diag(a).copy()
    return _finalize(w, np.ascontiguousarray(v.T), h)
