"""Time evolution of ladder states under a constant banded Hamiltonian.

Two independent integration paths are provided on purpose:

* "dense": diagonalize the Hermitian matrix once (scipy.linalg.eigh) and
  apply exp(-i H t / hbar) exactly at every sample time.  Exact up to
  eigensolver roundoff; cost grows with the matrix dimension cubed.
* "banded": classical fixed-step RK4 using only the three bands.  The step
  starts at step_safety * hbar / (Gershgorin bound) and the whole run is
  repeated with doubled substep counts until two successive refinements
  agree below step_tolerance in max-abs amplitude.  Deterministic by
  construction: no adaptive controller state, no randomness.

Norm drift is measured and asserted against norm_drift_limit, never hidden
by renormalization; the drift series rides along in the Spectrogram.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .constants import HBAR
from .errors import IntegrationError, ResourceLimitError, ValidationError
from .ladder import LadderHamiltonian, LadderState

DENSE_ORACLE_MAX_DIM = 1025
MAX_REFINEMENTS = 24


@dataclass(frozen=True)
class PropagationConfig:
    """How to run one propagation.

    t_end is the duration measured from the state's own time.  method is
    "dense", "banded", or "auto" (dense while the matrix stays within the
    oracle dimension, banded above).
    """

    t_end: float
    sample_interval: float
    method: str = "auto"
    step_tolerance: float = 1e-9
    norm_drift_limit: float = 1e-8
    step_safety: float = 0.5

    def __post_init__(self) -> None:
        if self.t_end <= 0 or self.sample_interval <= 0:
            raise ValidationError("t_end and sample_interval must be positive")
        if self.step_tolerance <= 0 or self.norm_drift_limit <= 0:
            raise ValidationError("tolerances must be positive")
        if self.method not in ("dense", "banded", "auto"):
            raise ValidationError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class Spectrogram:
    """Sampled population history P_n(t) with its quality record."""

    times: np.ndarray             # fs, length T
    populations: np.ndarray       # T x (2N+1)
    norm_drift_series: np.ndarray # |row sum - 1| per sample
    n_max: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for a in (self.times, self.populations, self.norm_drift_series):
            a.setflags(write=False)

    @property
    def sideband_indices(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def row_at(self, time: float) -> np.ndarray:
        """Population row at the sample closest to `time`."""
        i = int(np.argmin(np.abs(self.times - time)))
        return self.populations[i]


def _sample_times(t0: float, cfg: PropagationConfig) -> np.ndarray:
    n_whole = int(np.floor(cfg.t_end / cfg.sample_interval + 1e-9))
    times = t0 + cfg.sample_interval * np.arange(n_whole + 1)
    t_final = t0 + cfg.t_end
    if times[-1] < t_final - 1e-9 * cfg.sample_interval:
        times = np.append(times, t_final)
    return times


def _evolve_dense(h: LadderHamiltonian, a0: np.ndarray, times: np.ndarray) -> np.ndarray:
    energies, modes = eigh(h.to_dense())
    weights = modes.conj().T @ a0
    spans = times - times[0]
    phases = np.exp(-1j * np.outer(energies, spans) / HBAR)
    return (modes @ (phases * weights[:, None])).T


def _rk4_span(
    h: LadderHamiltonian, a: np.ndarray, dt: float, steps: int
) -> np.ndarray:
    k1 = np.empty_like(a)
    k2 = np.empty_like(a)
    k3 = np.empty_like(a)
    k4 = np.empty_like(a)
    c = -1j / HBAR
    for _ in range(steps):
        h.apply(a, k1)
        k1 *= c
        h.apply(a + (0.5 * dt) * k1, k2)
        k2 *= c
        h.apply(a + (0.5 * dt) * k2, k3)
        k3 *= c
        h.apply(a + dt * k3, k4)
        k4 *= c
        a = a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return a


def _evolve_banded(
    h: LadderHamiltonian, a0: np.ndarray, times: np.ndarray, cfg: PropagationConfig
) -> tuple[np.ndarray, float, int]:
    """Fixed-step RK4 with whole-run Richardson refinement.

    Returns (amplitude history, refinement error estimate, total steps).
    """
    spans = np.diff(times)
    dt0 = cfg.step_safety * HBAR / max(h.spectral_bound(), 1e-300)
    substeps = np.maximum(1, np.ceil(spans / dt0).astype(np.int64))
    previous = None
    total = 0
    for _ in range(MAX_REFINEMENTS):
        history = np.empty((len(times), len(a0)), dtype=complex)
        history[0] = a0
        a = a0.copy()
        for i, (span, k) in enumerate(zip(spans, substeps)):
            a = _rk4_span(h, a, span / k, int(k))
            history[i + 1] = a
        total += int(substeps.sum())
        if previous is not None:
            err = float(np.abs(history - previous).max())
            if err < cfg.step_tolerance:
                return history, err, total
        previous = history
        substeps = substeps * 2
    raise IntegrationError(
        "step refinement did not converge below "
        f"{cfg.step_tolerance} within {MAX_REFINEMENTS} doublings"
    )


def propagate(
    h: LadderHamiltonian,
    s0: LadderState,
    cfg: PropagationConfig,
    metadata: dict | None = None,
) -> Spectrogram:
    """Evolve s0 under h and sample populations on a uniform grid.

    The grid starts at the state's own time, steps by sample_interval, and
    always includes the final time.  Raises IntegrationError when the norm
    drifts beyond cfg.norm_drift_limit.
    """
    if s0.amplitudes.shape[0] != h.dim:
        raise ValidationError(
            f"state dimension {s0.amplitudes.shape[0]} does not match "
            f"Hamiltonian dimension {h.dim}"
        )
    times = _sample_times(s0.time, cfg)
    method = cfg.method
    if method == "auto":
        method = "dense" if h.dim <= DENSE_ORACLE_MAX_DIM else "banded"

    quality: dict = {"method": method}
    if method == "dense":
        amplitudes = _evolve_dense(h, s0.amplitudes, times)
    else:
        amplitudes, refine_err, steps = _evolve_banded(h, s0.amplitudes, times, cfg)
        quality["refinement_error"] = refine_err
        quality["rk4_steps"] = steps

    populations = np.abs(amplitudes) ** 2
    drift = np.abs(populations.sum(axis=1) - 1.0)
    worst = float(drift.max())
    if worst > cfg.norm_drift_limit:
        raise IntegrationError(
            f"norm drift {worst:.3e} exceeds the limit {cfg.norm_drift_limit:.1e}"
        )

    meta = {
        "n_max": h.n_max,
        "t_end": cfg.t_end,
        "sample_interval": cfg.sample_interval,
        "step_tolerance": cfg.step_tolerance,
        "norm_drift_limit": cfg.norm_drift_limit,
        "max_norm_drift": worst,
    }
    meta.update(quality)
    if metadata:
        meta.update(metadata)
    return Spectrogram(
        times=times,
        populations=populations,
        norm_drift_series=drift,
        n_max=h.n_max,
        metadata=meta,
    )


def final_amplitudes(
    h: LadderHamiltonian, s0: LadderState, t_end: float, cfg: PropagationConfig
) -> LadderState:
    """Evolve and return only the state at s0.time + t_end."""
    spec_cfg = PropagationConfig(
        t_end=t_end,
        sample_interval=t_end,
        method=cfg.method,
        step_tolerance=cfg.step_tolerance,
        norm_drift_limit=cfg.norm_drift_limit,
        step_safety=cfg.step_safety,
    )
    times = _sample_times(s0.time, spec_cfg)
    method = spec_cfg.method
    if method == "auto":
        method = "dense" if h.dim <= DENSE_ORACLE_MAX_DIM else "banded"
    if method == "dense":
        amps = _evolve_dense(h, s0.amplitudes, times)
    else:
        amps, _, _ = _evolve_banded(h, s0.amplitudes, times, spec_cfg)
    final = amps[-1]
    return LadderState(final / np.linalg.norm(final), float(times[-1]), h.n_max)


def dense_oracle_compare(
    h: LadderHamiltonian, s0: LadderState, t: float,
    cfg: PropagationConfig | None = None,
) -> float:
    """Max-abs population discrepancy between the banded stepper and the
    dense eigendecomposition at time t.

    The dense path is only feasible for small matrices; dimensions above
    DENSE_ORACLE_MAX_DIM raise ResourceLimitError.
    """
    if h.dim > DENSE_ORACLE_MAX_DIM:
        raise ResourceLimitError(
            f"dense oracle capped at dimension {DENSE_ORACLE_MAX_DIM}, "
            f"got {h.dim}"
        )
    if t <= 0:
        raise ValidationError("comparison time must be positive")
    base = cfg or PropagationConfig(t_end=t, sample_interval=t)
    times = np.array([s0.time, s0.time + t])
    banded, _, _ = _evolve_banded(h, s0.amplitudes, times, base)
    dense = _evolve_dense(h, s0.amplitudes, times)
    p_banded = np.abs(banded[-1]) ** 2
    p_dense = np.abs(dense[-1]) ** 2
    return float(np.abs(p_banded - p_dense).max())


@dataclass(frozen=True)
class MomentSeries:
    """First and second moments of the sideband distribution over time."""

    times: np.ndarray
    centroid: np.ndarray
    variance: np.ndarray
    n_low: np.ndarray
    n_high: np.ndarray

    def __post_init__(self) -> None:
        for a in (self.times, self.centroid, self.variance, self.n_low, self.n_high):
            a.setflags(write=False)


def centroid_and_spread(spec: Spectrogram, threshold: float = 1e-3) -> MomentSeries:
    """Per-sample centroid <n>, variance <n^2>-<n>^2, and the extreme
    sideband indices whose population reaches `threshold` (falling back to
    the argmax when nothing does)."""
    n = spec.sideband_indices.astype(float)
    p = spec.populations
    centroid = p @ n
    variance = p @ n**2 - centroid**2
    above = p >= threshold
    n_low = np.empty(len(p), dtype=int)
    n_high = np.empty(len(p), dtype=int)
    for i, row in enumerate(above):
        hits = np.nonzero(row)[0]
        if hits.size:
            n_low[i] = int(n[hits[0]])
            n_high[i] = int(n[hits[-1]])
        else:
            j = int(np.argmax(p[i]))
            n_low[i] = n_high[i] = int(n[j])
    return MomentSeries(
        times=spec.times.copy(),
        centroid=centroid,
        variance=variance,
        n_low=n_low,
        n_high=n_high,
    )
