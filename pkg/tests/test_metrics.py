import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eadf.array import ArrayModel, Mode
from eadf.errors import UndefinedAtZero
from eadf.geometry import SPEED_OF_LIGHT, AngularGrid
from eadf.metrics import (
    CDF_BINS_DB,
    RemReport,
    build_mask,
    central_power_fraction,
    eadf_power_spectrum,
    empirical_cdf,
    lower_median,
    rem,
    rem_array,
    rem_map,
    summarize,
    to_db,
)
from eadf.pattern import RadiationPattern
from eadf.phase_center import characterize_element
from eadf.synth import ChamberSpec, ElementSpec, PatternModel, simulate
from eadf.transform import Eadf, forward

finite = st.floats(-1e3, 1e3, allow_nan=False)
nonzero = st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False)


def test_rem_examples():
    assert rem(2 + 1j, 2 + 1j) == 0.0
    assert rem(3 - 4j, 0) == 1.0
    assert float(to_db(1.0)) == 0.0
    assert float(to_db(rem(1.0, 1.056))) == pytest.approx(-25.04, abs=0.01)
    with pytest.raises(UndefinedAtZero):
        rem(0, 1)
    assert np.isnan(rem_array([0, 1], [1, 1])[0])


@given(nonzero, nonzero, nonzero)
def test_rem_scale_covariant(t, e, c):
    # |c(t-e)|/|ct| equals |t-e|/|t| up to the rounding of the products
    assert rem(c * t, c * e) == pytest.approx(rem(t, e), rel=1e-12, abs=1e-15)


def test_rem_scale_covariant_exact_for_powers_of_two():
    rng = np.random.default_rng(0)
    t = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
    e = t + 0.01 * rng.standard_normal(1000)
    for c in (2.0, -0.5, 1j, -4j):
        assert np.array_equal(rem_array(c * t, c * e), rem_array(t, e))


def test_db_floor():
    assert float(to_db(0.0)) == -300.0


def test_lower_median():
    assert lower_median([3, 1, 2]) == 2
    assert lower_median([4, 1, 3, 2]) == 2
    assert np.isnan(lower_median([]))


@given(st.lists(finite, min_size=1, max_size=50), st.randoms())
def test_cdf_order_invariant(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert empirical_cdf(values) == empirical_cdf(shuffled)
    assert lower_median(values) == lower_median(shuffled)


@given(st.lists(finite, min_size=1, max_size=50))
def test_median_is_lower_midpoint_percentile(values):
    v = np.asarray(values)
    assert lower_median(v) == np.percentile(v, 50, method="lower")


def test_cdf_bins():
    assert CDF_BINS_DB[0] == -120 and CDF_BINS_DB[-1] == 20
    assert np.allclose(np.diff(CDF_BINS_DB), 0.5)
    cdf = dict(empirical_cdf([-200.0, -10.0, 5.0, 50.0]))
    assert cdf[-120.0] == 0.25 and cdf[-10.0] == 0.5 and cdf[20.0] == 0.75


def test_build_mask():
    m = build_mask(AngularGrid(6, 4), AngularGrid(3, 2))
    assert m.sum() == 4 * 4
    assert m[0, 0] and m[2, 2] and not m[1, 0]


def _model_on(pset, factors, phase_center=None, mode=Mode.CONVENTIONAL):
    el = characterize_element(pset, 0, pset.center_frequency, phase_center, factors)
    return ArrayModel(pset.grid.subgrid(*factors), pset.center_frequency, mode, [el])


def test_full_grid_band_limited_is_exact():
    spec = ElementSpec(model=PatternModel.BANDLIMITED, k_theta=6, k_phi=6, seed=1)
    pset = simulate(ChamberSpec((spec,), AngularGrid(12, 12), [28.5e9]))
    truth = pset.pattern(0, 28.5e9)
    report = rem_map(truth, _model_on(pset, (1, 1)), region=np.ones(truth.grid.shape, bool))
    assert report.mask.all()
    assert np.nanmax(report.rem) <= 1e-10


DIAGONAL = np.ones(3) / np.sqrt(3)


@pytest.fixture(scope="module")
def offset_omni():
    lam = SPEED_OF_LIGHT / 28.5e9
    d = 38 * lam * DIAGONAL
    spec = ElementSpec(position=tuple(d))
    return simulate(ChamberSpec((spec,), AngularGrid(120, 120), [28.5e9])), d


@pytest.mark.parametrize("factor", [2, 4])
def test_conventional_fails_on_offset_omni(offset_omni, factor):
    pset, d = offset_omni
    truth = pset.pattern(0, 28.5e9)
    conv = rem_map(truth, _model_on(pset, (factor, factor)))
    assert conv.median_db > -3
    enh = rem_map(truth, _model_on(pset, (factor, factor), d, Mode.ENHANCED))
    assert enh.median_db < -60
    assert enh.summary()["n_directions"] == enh.mask.sum()


def test_axial_offset_alias_coincidence():
    # a 38 wavelength offset along z advances the phase by ~1.99 turns per 3 deg
    # step near the horizon, so the aliased interpolant nearly matches the truth
    lam = SPEED_OF_LIGHT / 28.5e9
    pset = simulate(ChamberSpec((ElementSpec(position=(0, 0, 38 * lam)),), AngularGrid(120, 120), [28.5e9]))
    truth = pset.pattern(0, 28.5e9)
    assert rem_map(truth, _model_on(pset, (2, 2))).median_db < -10
    assert rem_map(truth, _model_on(pset, (4, 4))).median_db > -6


def test_spectrum_examples(offset_omni):
    grid = AngularGrid(3, 3)
    data = np.zeros(grid.extended_shape, dtype=complex)
    data[3, 3] = 1
    spec = eadf_power_spectrum(Eadf.full(grid, data))
    assert spec[3, 3] == 0 and np.all(np.delete(spec.ravel(), 3 * 6 + 3) == -300)

    pset, _ = offset_omni
    q = forward(pset.pattern(0, 28.5e9))
    db = eadf_power_spectrum(q)
    strong_rows = np.mean(db.max(axis=1) >= -30)
    assert strong_rows > 0.10


def test_compensated_patch_spectrum_concentrated():
    lam = SPEED_OF_LIGHT / 28.5e9
    d = (0.0, 0.003, 0.2)
    spec = ElementSpec(position=d, model=PatternModel.PATCH)
    pset = simulate(ChamberSpec((spec,), AngularGrid(120, 120), [28.5e9]))
    comp = characterize_element(pset, 0, 28.5e9, d).eadfs[pset.polarizations[0]]
    raw = forward(pset.pattern(0, 28.5e9))
    assert central_power_fraction(comp) >= 0.99
    assert central_power_fraction(raw) < 0.99


def test_summarize_pools_elements():
    grid = AngularGrid(2, 2)
    r1 = RemReport(grid, np.full(grid.shape, 0.1), np.ones(grid.shape, bool), 0)
    r2 = RemReport(grid, np.full(grid.shape, 0.01), np.ones(grid.shape, bool), 1)
    s = summarize([r1, r2], "x")
    assert s["n_directions"] == 24
    assert s["elements"] == [0, 1]
    assert s["median_db"] == pytest.approx(-40)


def test_rem_map_checks_frequency():
    grid = AngularGrid(2, 2)
    pset = simulate(ChamberSpec((ElementSpec(),), grid, [1e9, 2e9, 3e9]))
    model = _model_on(pset, (1, 1))
    with pytest.raises(ValueError):
        rem_map(RadiationPattern(grid, np.ones(grid.shape), 1e9), model)
