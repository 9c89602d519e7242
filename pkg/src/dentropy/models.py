"""Model builders: Dicke Hamiltonian and the NN/NNN spin-1/2 chain.

Both are constructed directly inside one symmetry sector.  The Dicke
model lives in the even-parity subspace of the truncated Fock (x) spin
basis; the chain lives in the fixed-magnetization, even-reflection
subspace of the open-boundary bit-string basis.  Builders are pure
functions returning immutable SymmetricMatrix objects with the sector
basis attached.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import SymmetricMatrix, eigh

__all__ = [
    "DickeParams",
    "SpinChainParams",
    "SectorBasis",
    "TruncationReport",
    "build_dicke",
    "build_dicke_product_space",
    "build_spin_chain",
    "build_hamiltonian",
    "truncation_check",
]

# relative eigenvalue shift (vs. lowest-k spectral range) below which a
# Fock truncation counts as converged
TRUNCATION_RTOL = 1e-6
# enlargement factor for the comparison basis
TRUNCATION_GROWTH = 1.2


@dataclass(frozen=True)
class DickeParams:
    """Pseudospin length j = N/2, field frequency, level splitting,
    coupling, and Fock truncation."""

    j: float
    omega: float = 1.0
    omega0: float = 1.0
    lam: float = 0.0
    n_max: int = 120

    def __post_init__(self):
        two_j = 2.0 * self.j
        if self.j <= 0 or abs(two_j - round(two_j)) > 1e-12:
            raise ValueError(f"j must be a positive half-integer, got {self.j}")
        if self.omega <= 0 or self.omega0 <= 0:
            raise ValueError("omega and omega0 must be positive")
        if self.lam < 0:
            raise ValueError("coupling must be non-negative")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")

    @property
    def lambda_c(self):
        """Critical coupling sqrt(omega0 * omega) / 2."""
        return math.sqrt(self.omega0 * self.omega) / 2.0

    def with_coupling(self, lam):
        return DickeParams(self.j, self.omega, self.omega0, lam, self.n_max)

    def label(self):
        return f"dicke(j={self.j:g},n_max={self.n_max})"


@dataclass(frozen=True)
class SpinChainParams:
    """Open chain of L spins-1/2: NN exchange J with anisotropy mu, NNN
    exchange scaled by lam, in the sector with n_up up spins."""

    L: int
    n_up: int
    mu: float = 0.5
    lam: float = 0.0
    J: float = 1.0

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("chain needs at least 2 sites")
        if not (1 <= self.n_up <= self.L - 1):
            raise ValueError(f"n_up must be in [1, L-1], got {self.n_up}")
        if self.mu < 0 or self.lam < 0:
            raise ValueError("mu and lam must be non-negative")

    def with_coupling(self, lam):
        return SpinChainParams(self.L, self.n_up, self.mu, lam, self.J)

    def label(self):
        return f"spin_chain(L={self.L},n_up={self.n_up},mu={self.mu:g})"


@dataclass(frozen=True)
class SectorBasis:
    """Ordered labels of the symmetry-sector basis states.

    Dicke: (n, m) pairs with n + m + j even, n-major then m ascending.
    Spin chain: even-reflection orbit representatives as integers
    ascending (representative = smaller of the bit string and its
    reflection).
    """

    labels: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "dim", len(self.labels))


def _dicke_sector_labels(p):
    # (n, two_m) with (n + m + j) even; two_m runs -2j..2j in steps of 2
    two_j = int(round(2.0 * p.j))
    labels = []
    for n in range(p.n_max + 1):
        for two_m in range(-two_j, two_j + 1, 2):
            if (n + (two_m + two_j) // 2) % 2 == 0:
                labels.append((n, two_m))
    return labels


def _jp_factor(two_j, two_m):
    # <j, m+1| J_+ |j, m> = sqrt(j(j+1) - m(m+1)), exact in quarters
    jj = two_j * (two_j + 2)
    mm = two_m * (two_m + 2)
    return math.sqrt((jj - mm) / 4.0)


def build_dicke(p):
    """Even-parity Dicke Hamiltonian in the (n, m) product basis.

    Diagonal omega*n + omega0*m; the coupling connects |n, m> to
    |n +/- 1, m +/- 1> with bosonic factors sqrt(n+1), sqrt(n) and the
    usual ladder factors, scaled by lam / sqrt(2j).
    """
    labels = _dicke_sector_labels(p)
    index = {lab: i for i, lab in enumerate(labels)}
    dim = len(labels)
    two_j = int(round(2.0 * p.j))
    g = p.lam / math.sqrt(two_j)
    h = np.zeros((dim, dim))
    for i, (n, two_m) in enumerate(labels):
        h[i, i] = p.omega * n + p.omega0 * (two_m / 2.0)
        if g == 0.0:
            continue
        # enumerate couplings upward in n only; mirror assignment keeps
        # the matrix exactly symmetric
        boson = math.sqrt(n + 1.0)
        for two_m2 in (two_m + 2, two_m - 2):
            if not -two_j <= two_m2 <= two_j:
                continue
            target = (n + 1, two_m2)
            k = index.get(target)
            if k is None:
                continue
            spin = _jp_factor(two_j, min(two_m, two_m2))
            val = g * boson * spin
            h[i, k] = val
            h[k, i] = val
    return SymmetricMatrix(h, basis=SectorBasis(tuple(labels)))


def build_dicke_product_space(p):
    """Full (unprojected) Dicke Hamiltonian plus the parity signs
    (-1)^(n + m + j) over the same basis ordering.

    Used for parity-commutation checks and truncation studies; the
    production path is the sector builder above.
    """
    two_j = int(round(2.0 * p.j))
    labels = [
        (n, two_m)
        for n in range(p.n_max + 1)
        for two_m in range(-two_j, two_j + 1, 2)
    ]
    index = {lab: i for i, lab in enumerate(labels)}
    dim = len(labels)
    g = p.lam / math.sqrt(two_j)
    h = np.zeros((dim, dim))
    parity = np.empty(dim)
    for i, (n, two_m) in enumerate(labels):
        h[i, i] = p.omega * n + p.omega0 * (two_m / 2.0)
        parity[i] = -1.0 if (n + (two_m + two_j) // 2) % 2 else 1.0
        boson = math.sqrt(n + 1.0)
        for two_m2 in (two_m + 2, two_m - 2):
            if not -two_j <= two_m2 <= two_j:
                continue
            k = index.get((n + 1, two_m2))
            if k is None:
                continue
            val = g * boson * _jp_factor(two_j, min(two_m, two_m2))
            h[i, k] = val
            h[k, i] = val
    return SymmetricMatrix(h, basis=SectorBasis(tuple(labels))), parity


def _reflect(bits, L):
    out = 0
    for k in range(L):
        if bits >> k & 1:
            out |= 1 << (L - 1 - k)
    return out


def _chain_bonds(p):
    # open boundaries: L-1 NN bonds and L-2 NNN bonds, site i paired with
    # i+1 resp. i+2; bit k holds site k+1
    bonds = [(k, k + 1, p.J) for k in range(p.L - 1)]
    bonds += [(k, k + 2, p.lam * p.J) for k in range(p.L - 2)]
    return bonds


def spin_chain_sector_states(L, n_up):
    """Even-reflection orbit representatives with n_up set bits,
    ascending, plus the palindrome flags."""
    reps = []
    palin = []
    for b in range(1 << L):
        if bin(b).count("1") != n_up:
            continue
        r = _reflect(b, L)
        if b > r:
            continue
        reps.append(b)
        palin.append(b == r)
    return reps, palin


def build_spin_chain(p):
    """NN/NNN chain in the even-reflection, fixed-magnetization sector.

    Bit-string rules per bond (i, k, Jb): diagonal mu * Jb * s_i * s_k
    with s = +/-1/2, and off-diagonal Jb / 2 between states differing by
    a swap of an anti-aligned pair.  States are symmetrized with weight
    1/sqrt(2) per orbit member (1 for palindromes).
    """
    reps, palin = spin_chain_sector_states(p.L, p.n_up)
    index = {b: i for i, b in enumerate(reps)}
    dim = len(reps)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    weight = [1.0 if pal else inv_sqrt2 for pal in palin]
    bonds = _chain_bonds(p)
    h = np.zeros((dim, dim))
    for col, rep in enumerate(reps):
        members = (rep,) if palin[col] else (rep, _reflect(rep, p.L))
        w_col = weight[col]
        for x in members:
            for (i, k, jb) in bonds:
                if jb == 0.0:
                    continue
                bi = x >> i & 1
                bk = x >> k & 1
                si = 0.5 if bi else -0.5
                sk = 0.5 if bk else -0.5
                # Ising part (diagonal in the bit basis)
                amp = p.mu * jb * si * sk
                if amp != 0.0:
                    h[col, col] += amp * w_col * w_col
                # flip-flop part
                if bi != bk:
                    y = x ^ ((1 << i) | (1 << k))
                    y_rep = min(y, _reflect(y, p.L))
                    row = index[y_rep]
                    if row < col:
                        continue  # mirrored by that column's own pass
                    contrib = 0.5 * jb * w_col * weight[row]
                    if row == col:
                        h[col, col] += contrib
                    else:
                        h[row, col] += contrib
                        h[col, row] += contrib
    return SymmetricMatrix(h, basis=SectorBasis(tuple(reps)))


def build_hamiltonian(params):
    """Dispatch to the sector builder matching the parameter type."""
    if isinstance(params, DickeParams):
        return build_dicke(params)
    if isinstance(params, SpinChainParams):
        return build_spin_chain(params)
    raise TypeError(f"unsupported model parameters: {type(params).__name__}")


@dataclass(frozen=True)
class TruncationReport:
    """Outcome of re-diagonalizing with an enlarged Fock basis."""

    n_max: int
    n_max_enlarged: int
    k_states: int
    max_shift: float
    tol: float
    converged: bool


def truncation_check(p, k_states):
    """Compare the lowest k_states eigenvalues at n_max against a basis
    enlarged to ceil(1.2 * n_max).

    k_states is clamped to the sector dimension.  Converged iff the
    largest eigenvalue shift stays below 1e-6 of the lowest-k spectral
    range.
    """
    if not isinstance(p, DickeParams):
        raise ValueError("truncation_check applies to DickeParams only")
    if k_states < 1:
        raise ValueError("k_states must be positive")
    n_big = math.ceil(TRUNCATION_GROWTH * p.n_max)
    p_big = DickeParams(p.j, p.omega, p.omega0, p.lam, n_big)
    w_small = eigh(build_dicke(p)).eigenvalues
    w_big = eigh(build_dicke(p_big)).eigenvalues
    k = min(k_states, w_small.shape[0])
    max_shift = float(np.max(np.abs(w_small[:k] - w_big[:k])))
    spread = float(w_small[k - 1] - w_small[0])
    tol = TRUNCATION_RTOL * spread
    converged = max_shift <= tol if spread > 0.0 else max_shift == 0.0
    return TruncationReport(
        n_max=p.n_max,
        n_max_enlarged=n_big,
        k_states=k,
        max_shift=max_shift,
        tol=tol,
        converged=converged,
    )
