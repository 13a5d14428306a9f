"""Sampling grids, the two integration routes, and moment extraction."""
import numpy as np
import pytest

from eladder import (
    IntegrationError,
    ModelVariant,
    ResourceLimitError,
    ValidationError,
    build_hamiltonian,
    electron_from_energy,
    initial_plane_wave,
    matched_field,
)
from eladder.ladder import LadderState
from eladder.propagate import (
    DENSE_ORACLE_MAX_DIM,
    MomentSeries,
    PropagationConfig,
    Spectrogram,
    centroid_and_spread,
    dense_oracle_compare,
    final_amplitudes,
    propagate,
)


@pytest.fixture(scope="module")
def small_h(trap_electron, trap_field):
    return build_hamiltonian(trap_electron, trap_field, ModelVariant.full(), 8)


@pytest.fixture(scope="module")
def small_state():
    return initial_plane_wave(8)


def null_hamiltonian(n_max):
    """All bands zero: evolution is the identity, any dimension is cheap."""
    e = electron_from_energy(100.0)
    f = matched_field(e, 0.0, photon_energy=1.54)
    variant = ModelVariant.simplified(detuning_override=0.0, quadratic_scale=0.0)
    return build_hamiltonian(e, f, variant, n_max)


class TestSampleGrid:
    def test_divisible_span_has_no_extra_point(self, small_h, small_state):
        cfg = PropagationConfig(t_end=6.0, sample_interval=0.5, method="dense")
        spec = propagate(small_h, small_state, cfg)
        assert len(spec.times) == 13
        assert spec.times[0] == 0.0
        assert spec.times[-1] == 6.0
        assert np.allclose(np.diff(spec.times), 0.5, atol=1e-12)

    def test_remainder_appends_exact_final_time(self, small_h, small_state):
        cfg = PropagationConfig(t_end=1.0, sample_interval=0.3, method="dense")
        spec = propagate(small_h, small_state, cfg)
        assert np.allclose(spec.times[:4], [0.0, 0.3, 0.6, 0.9])
        assert spec.times[-1] == 1.0

    def test_grid_starts_at_state_time(self, small_h, small_state):
        shifted = LadderState(small_state.amplitudes.copy(), 2.5, 8)
        cfg = PropagationConfig(t_end=0.9, sample_interval=0.3, method="dense")
        spec = propagate(small_h, shifted, cfg)
        assert spec.times[0] == 2.5
        assert np.isclose(spec.times[-1], 3.4)

    def test_arrays_are_read_only(self, small_h, small_state):
        cfg = PropagationConfig(t_end=1.0, sample_interval=0.5, method="dense")
        spec = propagate(small_h, small_state, cfg)
        with pytest.raises(ValueError):
            spec.times[0] = -1.0
        with pytest.raises(ValueError):
            spec.populations[0, 0] = 2.0


class TestRoutes:
    def test_dense_and_banded_agree_everywhere(self, small_h, small_state):
        kw = dict(t_end=6.0, sample_interval=0.5)
        dense = propagate(small_h, small_state, PropagationConfig(method="dense", **kw))
        banded = propagate(small_h, small_state, PropagationConfig(method="banded", **kw))
        assert np.abs(dense.populations - banded.populations).max() < 1e-9

    def test_dense_oracle_compare(self, small_h, small_state):
        assert dense_oracle_compare(small_h, small_state, 6.0) < 1e-9

    def test_auto_picks_dense_below_cap(self, small_h, small_state):
        cfg = PropagationConfig(t_end=1.0, sample_interval=0.5)
        spec = propagate(small_h, small_state, cfg)
        assert spec.metadata["method"] == "dense"

    def test_auto_picks_banded_above_cap(self):
        n_max = (DENSE_ORACLE_MAX_DIM - 1) // 2 + 1
        h = null_hamiltonian(n_max)
        assert h.dim > DENSE_ORACLE_MAX_DIM
        spec = propagate(h, initial_plane_wave(n_max),
                         PropagationConfig(t_end=1.0, sample_interval=0.5))
        assert spec.metadata["method"] == "banded"
        assert spec.metadata["max_norm_drift"] == 0.0

    def test_oracle_refuses_large_matrices(self):
        n_max = (DENSE_ORACLE_MAX_DIM - 1) // 2 + 1
        h = null_hamiltonian(n_max)
        with pytest.raises(ResourceLimitError):
            dense_oracle_compare(h, initial_plane_wave(n_max), 1.0)

    def test_oracle_rejects_nonpositive_time(self, small_h, small_state):
        with pytest.raises(ValidationError):
            dense_oracle_compare(small_h, small_state, 0.0)


class TestQualityRecord:
    BASE_KEYS = {"n_max", "t_end", "sample_interval", "step_tolerance",
                 "norm_drift_limit", "max_norm_drift", "method"}

    def test_dense_metadata(self, small_h, small_state):
        cfg = PropagationConfig(t_end=1.0, sample_interval=0.5, method="dense")
        spec = propagate(small_h, small_state, cfg)
        assert self.BASE_KEYS <= set(spec.metadata)
        assert "rk4_steps" not in spec.metadata
        assert spec.metadata["n_max"] == 8
        assert spec.metadata["t_end"] == 1.0

    def test_banded_metadata_reports_refinement(self, small_h, small_state):
        cfg = PropagationConfig(t_end=6.0, sample_interval=0.5, method="banded")
        spec = propagate(small_h, small_state, cfg)
        assert spec.metadata["refinement_error"] < cfg.step_tolerance
        assert spec.metadata["rk4_steps"] > 0

    def test_caller_metadata_is_merged(self, small_h, small_state):
        cfg = PropagationConfig(t_end=1.0, sample_interval=0.5, method="dense")
        spec = propagate(small_h, small_state, cfg, metadata={"tag": "x"})
        assert spec.metadata["tag"] == "x"
        assert self.BASE_KEYS <= set(spec.metadata)


class TestGuards:
    @pytest.mark.parametrize("kw", [
        dict(t_end=0.0, sample_interval=0.5),
        dict(t_end=1.0, sample_interval=-0.5),
        dict(t_end=1.0, sample_interval=0.5, step_tolerance=0.0),
        dict(t_end=1.0, sample_interval=0.5, norm_drift_limit=-1e-8),
        dict(t_end=1.0, sample_interval=0.5, method="magic"),
    ])
    def test_config_validation(self, kw):
        with pytest.raises(ValidationError):
            PropagationConfig(**kw)

    def test_state_dimension_must_match(self, small_h):
        with pytest.raises(ValidationError):
            propagate(small_h, initial_plane_wave(7),
                      PropagationConfig(t_end=1.0, sample_interval=0.5))

    def test_norm_drift_is_asserted_not_repaired(self, small_h, small_state):
        # A state norm just inside the construction tolerance still trips a
        # tighter drift limit; nothing renormalizes it away.
        off = small_state.amplitudes * (1.0 + 5e-9)
        state = LadderState(off, 0.0, 8)
        cfg = PropagationConfig(t_end=1.0, sample_interval=0.5,
                                method="dense", norm_drift_limit=1e-12)
        with pytest.raises(IntegrationError, match="norm drift"):
            propagate(small_h, state, cfg)


class TestFinalState:
    def test_matches_full_history_endpoint(self, small_h, small_state):
        cfg = PropagationConfig(t_end=6.0, sample_interval=0.5, method="dense")
        spec = propagate(small_h, small_state, cfg)
        fin = final_amplitudes(small_h, small_state, 6.0, cfg)
        assert fin.time == 6.0
        assert np.isclose(np.linalg.norm(fin.amplitudes), 1.0, atol=1e-12)
        assert np.abs(np.abs(fin.amplitudes) ** 2 - spec.populations[-1]).max() < 1e-9


def handmade_spectrogram():
    times = np.array([0.0, 1.0, 2.0])
    pops = np.array([
        [0.0, 0.25, 0.5, 0.25, 0.0],
        [0.0, 0.0, 1e-4, 0.9999, 0.0],
        [1e-4, 6e-4, 2e-4, 1e-4, 0.0],   # everything below threshold
    ])
    drift = np.abs(pops.sum(axis=1) - 1.0)
    return Spectrogram(times=times, populations=pops,
                       norm_drift_series=drift, n_max=2)


class TestMoments:
    def test_centroid_variance_and_edges(self):
        spec = handmade_spectrogram()
        m = centroid_and_spread(spec, threshold=1e-3)
        n = np.arange(-2, 3, dtype=float)
        for i in range(3):
            assert np.isclose(m.centroid[i], spec.populations[i] @ n, rtol=1e-12)
            expected_var = spec.populations[i] @ n**2 - (spec.populations[i] @ n) ** 2
            assert np.isclose(m.variance[i], expected_var, rtol=1e-12)
        assert (m.n_low[0], m.n_high[0]) == (-1, 1)
        assert (m.n_low[1], m.n_high[1]) == (1, 1)

    def test_edge_fallback_uses_argmax(self):
        m = centroid_and_spread(handmade_spectrogram(), threshold=1e-3)
        assert m.n_low[2] == m.n_high[2] == -1

    def test_moment_arrays_read_only(self):
        m = centroid_and_spread(handmade_spectrogram())
        with pytest.raises(ValueError):
            m.centroid[0] = 9.0
        assert isinstance(m, MomentSeries)

    def test_row_at_picks_nearest_sample(self):
        spec = handmade_spectrogram()
        assert np.array_equal(spec.row_at(0.9), spec.populations[1])
        assert np.array_equal(spec.row_at(0.4), spec.populations[0])

    def test_sideband_indices(self):
        spec = handmade_spectrogram()
        assert np.array_equal(spec.sideband_indices, [-2, -1, 0, 1, 2])
