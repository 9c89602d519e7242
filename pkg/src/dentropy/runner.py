"""Sweep engine: schedules quench grids, caches decompositions, and
writes one CSV (plus a metadata sidecar) per run.

Work unit = one (lambda0, delta_lambda, n0) triple.  Decompositions are
shared read-only across worker threads and computed exactly once per
coupling value; results are gathered and written in canonical key order
so the output bytes do not depend on the worker count.
"""

import csv
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, quench, stats
from .backends import BACKEND
from .errors import ConfigError
from .linalg import eigh
from .models import DickeParams, build_hamiltonian, truncation_check

__all__ = [
    "DecompositionCache",
    "run_fig1_sweep",
    "run_fig23_sweep",
    "run_fig4_sweep",
    "run_spacing_diag",
    "run_check",
]

FIG1_COLUMNS = (
    "model", "lambda0", "delta_lambda", "n0", "dim", "xi",
    "s_dec", "s_mean", "s_var", "gap", "fluct",
    "code_version", "config_hash",
)
FIG23_COLUMNS = (
    "model", "lambda0", "delta_lambda", "n0", "dim", "xi",
    "s_dec", "s_mean", "s_var", "gap", "fluct", "f_xi",
    "code_version", "config_hash",
)
FIG4_COLUMNS = (
    "model", "lambda0", "delta_lambda", "n0", "dim", "xi",
    "code_version", "config_hash",
)
SPACING_COLUMNS = (
    "model", "lam", "dim", "n_levels_used", "brody_q",
    "ks_poisson", "ks_wigner", "code_version", "config_hash",
)


class DecompositionCache:
    """Thread-safe map coupling -> SpectralDecomposition.

    Each coupling is diagonalized exactly once per run; `count` is the
    instrumentation counter asserted by the invariant suite.
    """

    def __init__(self, params):
        self.params = params
        self._entries = {}
        self._locks = {}
        self._guard = threading.Lock()
        self.count = 0

    def _lock_for(self, lam):
        with self._guard:
            return self._locks.setdefault(lam, threading.Lock())

    def get(self, lam):
        entry = self._entries.get(lam)
        if entry is not None:
            return entry
        with self._lock_for(lam):
            entry = self._entries.get(lam)
            if entry is None:
                entry = eigh(build_hamiltonian(self.params.with_coupling(lam)))
                self._entries[lam] = entry
                with self._guard:
                    self.count += 1
        return entry


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_csv(path, columns, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def _write_sidecar(path, cfg, elapsed, extra=""):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dentropy {__version__} (backend={BACKEND})\n")
        fh.write(f"wall_clock_seconds = {elapsed:.3f}\n")
        fh.write(f"config_hash = {cfg.config_hash}\n")
        if extra:
            fh.write(extra.rstrip() + "\n")
        fh.write("\n# --- config echo ---\n")
        fh.write(cfg.raw_text)
    return path


def _validate_n0(cfg, dim):
    bad = [n for n in cfg.n0 if n > dim]
    if bad:
        raise ConfigError(
            [f"n0 = {n} exceeds the sector dimension {dim}" for n in bad]
        )


def _model_label(cfg):
    return cfg.params.label()


def _map_units(cfg, units, worker):
    """Evaluate `worker` over units with cfg.workers threads; results are
    keyed by unit and reassembled in canonical order."""
    results = {}
    if cfg.workers == 1:
        for unit in units:
            results[unit] = worker(unit)
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for unit, value in zip(units, pool.map(worker, units)):
                results[unit] = value
    return [results[u] for u in sorted(units)]


def _prewarm(cfg, cache):
    """Diagonalize every coupling the sweep will touch, in parallel.

    The kernels release the GIL, so distinct couplings overlap on
    multiple workers; results land in the cache and are identical to the
    lazy path."""
    needed = set()
    for lam0 in cfg.lambda0:
        for dlam in cfg.delta_lambda:
            if dlam > 0.0:
                needed.add(lam0)
                needed.add(lam0 + dlam)
    lams = sorted(needed)
    if cfg.workers == 1 or len(lams) <= 1:
        return
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        list(pool.map(cache.get, lams))


def _equilibration_rows(cfg, with_f_xi):
    cache = DecompositionCache(cfg.params)
    model = _model_label(cfg)
    dim = build_hamiltonian(cfg.params).dim
    _validate_n0(cfg, dim)
    overlaps = {}
    overlap_guard = threading.Lock()

    def get_overlap(lam0, dlam):
        key = (lam0, dlam)
        ov = overlaps.get(key)
        if ov is not None:
            return ov
        dec_a = cache.get(lam0)
        dec_b = cache.get(lam0 + dlam)
        with overlap_guard:
            ov = overlaps.get(key)
            if ov is None:
                ov = quench.overlap_matrix(dec_a, dec_b)
                overlaps[key] = ov
        return ov

    units = [
        (lam0, dlam, n0)
        for lam0 in cfg.lambda0
        for dlam in cfg.delta_lambda
        for n0 in cfg.n0
    ]

    def worker(unit):
        lam0, dlam, n0 = unit
        if dlam == 0.0:
            # identity quench: C_n(tau) = delta exactly for all tau
            row = [model, lam0, dlam, n0, dim, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        else:
            ov = get_overlap(lam0, dlam)
            rep = stats.report_from_overlap(
                ov, n0, cfg.window, model=model, lambda0=lam0, delta_lambda=dlam
            )
            row = [
                rep.model, rep.lambda0, rep.delta_lambda, rep.n0, rep.dim,
                rep.xi, rep.s_dec, rep.s_mean, rep.s_var, rep.gap, rep.fluct,
            ]
        if with_f_xi:
            row.append(stats.universal_curve(row[5]))
        row += [__version__, cfg.config_hash]
        return row

    _prewarm(cfg, cache)
    rows = _map_units(cfg, units, worker)
    return rows, cache


def _run_equilibration_sweep(cfg, name, columns, with_f_xi):
    started = time.perf_counter()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows, cache = _equilibration_rows(cfg, with_f_xi)
    csv_path = _write_csv(out_dir / f"{name}.csv", columns, rows)
    _write_sidecar(
        out_dir / f"{name}.meta.txt",
        cfg,
        time.perf_counter() - started,
        extra=f"decompositions_computed = {cache.count}",
    )
    return csv_path


def run_fig1_sweep(cfg):
    """Equilibration gap and fluctuations on the (lambda0, n0) grid."""
    return _run_equilibration_sweep(cfg, "fig1", FIG1_COLUMNS, with_f_xi=False)


def run_fig23_sweep(cfg):
    """Same grid as fig1 plus the universal-curve column f(xi)."""
    return _run_equilibration_sweep(cfg, "fig23", FIG23_COLUMNS, with_f_xi=True)


def run_fig4_sweep(cfg):
    """IPR versus quench amplitude; only xi is computed per unit, via the
    single overlap column of the initial state."""
    started = time.perf_counter()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache = DecompositionCache(cfg.params)
    model = _model_label(cfg)
    dim = build_hamiltonian(cfg.params).dim
    _validate_n0(cfg, dim)

    units = [
        (lam0, dlam, n0)
        for lam0 in cfg.lambda0
        for dlam in cfg.delta_lambda
        for n0 in cfg.n0
    ]

    def worker(unit):
        lam0, dlam, n0 = unit
        if dlam == 0.0:
            xi = 1.0  # identity quench, fully localized by definition
        else:
            dec_a = cache.get(lam0)
            dec_b = cache.get(lam0 + dlam)
            a0 = dec_b.eigenvectors.T @ dec_a.eigenvectors[:, n0 - 1]
            xi = quench.ipr_of_amplitudes(a0)
        return [model, lam0, dlam, n0, dim, xi, __version__, cfg.config_hash]

    _prewarm(cfg, cache)
    rows = _map_units(cfg, units, worker)
    csv_path = _write_csv(out_dir / "fig4.csv", FIG4_COLUMNS, rows)
    _write_sidecar(
        out_dir / "fig4.meta.txt",
        cfg,
        time.perf_counter() - started,
        extra=f"decompositions_computed = {cache.count}",
    )
    return csv_path


def run_spacing_diag(cfg):
    """Brody and Kolmogorov-Smirnov spacing diagnostics per coupling in
    the lambda0 list."""
    started = time.perf_counter()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache = DecompositionCache(cfg.params)
    model = _model_label(cfg)

    def worker(lam):
        dec = cache.get(lam)
        st = stats.spacing_stats(
            dec.eigenvalues, cfg.poly_degree, cfg.trim_fraction
        )
        return [
            model, lam, dec.dim, st.spacings.shape[0] + 1,
            st.brody_q, st.ks_poisson, st.ks_wigner,
            __version__, cfg.config_hash,
        ]

    rows = _map_units(cfg, list(cfg.lambda0), worker)
    csv_path = _write_csv(out_dir / "spacing.csv", SPACING_COLUMNS, rows)
    _write_sidecar(
        out_dir / "spacing.meta.txt", cfg, time.perf_counter() - started
    )
    return csv_path


def run_check(cfg, report=print):
    """Truncation check plus the runtime invariant suite.

    Returns True when every check passes; diagnostics go through
    `report` one line at a time.
    """
    ok = True

    def judge(name, passed, detail=""):
        nonlocal ok
        ok = ok and passed
        status = "PASS" if passed else "FAIL"
        report(f"[{status}] {name}" + (f" ({detail})" if detail else ""))

    lam_max = max(cfg.lambda0) + max(cfg.delta_lambda)
    if isinstance(cfg.params, DickeParams):
        tr = truncation_check(cfg.params.with_coupling(lam_max), cfg.truncation_k)
        judge(
            f"truncation at lambda={lam_max:g}, k={tr.k_states}",
            tr.converged,
            f"max shift {tr.max_shift:.3e} vs tol {tr.tol:.3e}",
        )
    else:
        report("[SKIP] truncation check (finite spin-chain basis)")

    h = build_hamiltonian(cfg.params.with_coupling(min(cfg.lambda0)))
    _validate_n0(cfg, h.dim)
    judge("builder emits an exactly symmetric matrix",
          np.array_equal(h.entries, h.entries.T))

    dec = eigh(h)
    judge("eigenvector orthonormality within 1e-10",
          dec.ortho_defect <= 1e-10, f"defect {dec.ortho_defect:.3e}")
    scale = h.max_abs() * h.dim
    resid = h.entries @ dec.eigenvectors - dec.eigenvectors * dec.eigenvalues
    worst = float(np.max(np.sqrt((resid * resid).sum(axis=0))))
    judge("eigen residuals within 1e-9 * max|H| * dim",
          worst <= 1e-9 * scale, f"worst {worst:.3e}")
    trace_gap = abs(float(np.sum(dec.eigenvalues)) - float(np.trace(h.entries)))
    judge("eigenvalue sum matches trace within 1e-8 * dim * max|H|",
          trace_gap <= 1e-8 * scale, f"gap {trace_gap:.3e}")

    lam0 = min(cfg.lambda0)
    dlam = min(d for d in cfg.delta_lambda if d > 0) if any(cfg.delta_lambda) else 0.0
    dec_b = eigh(build_hamiltonian(cfg.params.with_coupling(lam0 + dlam)))
    ov = quench.overlap_matrix(dec, dec_b)
    n0 = min(cfg.n0)
    c0 = quench.survival_distribution(ov, n0, 0.0)
    judge("C(0) is the delta distribution at n0",
          abs(c0.p[n0 - 1] - 1.0) <= 1e-12)
    tau_probe = 1.7
    c_fwd = quench.survival_distribution(ov, n0, tau_probe)
    c_bwd = quench.survival_distribution(ov, n0, -tau_probe)
    judge("time-reversal symmetry C(tau) = C(-tau)",
          float(np.max(np.abs(c_fwd.p - c_bwd.p))) <= 1e-12)
    mu = quench.diagonal_ensemble(ov, n0)
    judge("diagonal ensemble normalized within 1e-10",
          abs(float(mu.p.sum()) - 1.0) <= 1e-10)
    xi = quench.ipr(ov, n0)
    judge("IPR within [1, dim]", 1.0 <= xi <= ov.dim, f"xi {xi:.3f}")
    probe_window = quench.TimeWindow(
        tau0=cfg.window.tau0, span=cfg.window.span,
        n_steps=min(cfg.window.n_steps, 200),
    )
    rep = stats.report_from_overlap(
        ov, n0, probe_window, model=_model_label(cfg),
        lambda0=lam0, delta_lambda=dlam,
    )
    judge("Jensen gap s_dec - s_mean >= -1e-9", rep.gap >= -1e-9,
          f"gap {rep.gap:.3e}")
    return ok
