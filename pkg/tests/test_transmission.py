import numpy as np
import pytest

from hyperlat.spectra import SpectrumResult, build_loop_state, diagonalize
from hyperlat.tightbinding import ModelParams, assemble_full_wave
from hyperlat.transmission import (DEVICE_PARAMS, MeasurementFormatError, PortConfig, TransmissionConfig,
                                   band_window, default_ports, device_spectrum, ensemble,
                                   estimate_background, ingest_measurement, mode_overlaps, s21)

from conftest import lattice

CLEAN = DEVICE_PARAMS.replace(onsite_sigma=0.0, hop_sigma=0.0, ring_offsets={})


@pytest.fixture(scope="module")
def device():
    lat = lattice(7, 2)
    return lat, default_ports(lat)


@pytest.fixture(scope="module")
def members(device):
    lat, ports = device
    return ensemble(TransmissionConfig(n_freq=801), lat=lat, ports=ports)


def test_default_ports_on_outer_ring(device):
    lat, ports = device
    assert len(set(ports.sites)) == 4
    assert all(lat.site_shell[s] == 2 for s in ports.sites)
    angles = np.angle(lat.coords[list(ports.sites)], deg=True)
    for k, a in enumerate(angles):
        assert abs((a - (45 + 90 * k) + 180) % 360 - 180) < 30


def test_port_config_validation():
    with pytest.raises(ValueError):
        PortConfig((1, 2), (0.1,))
    with pytest.raises(ValueError):
        PortConfig((1, 2), (0.1, 0.0))
    with pytest.raises(ValueError):
        PortConfig((1, 2), (0.1, 0.1), input_port=0, output_port=3)
    with pytest.raises(ValueError, match="not in a lattice"):
        PortConfig((1, 500), (0.1, 0.1), 0, 1).check(140)


def test_transmission_config_validation():
    with pytest.raises(ValueError):
        TransmissionConfig(kappa0=0.0)
    with pytest.raises(ValueError):
        TransmissionConfig(freq_start=16.5, freq_stop=16.0)
    lo, hi = TransmissionConfig().frequency_range()
    assert lo < 16 - 2 * 0.1362 and hi > 16 + 4 * 0.1362


def test_zero_mode_has_zero_overlap():
    vec = np.zeros((5, 1))
    vec[4, 0] = 1.0
    spec = SpectrumResult(np.array([1.0]), vec)
    ports = PortConfig((0, 1, 2, 3), (0.3,) * 4)
    assert np.all(mode_overlaps(spec, ports) == 0)


def test_top_mode_reaches_every_port(device):
    lat, ports = device
    spec = diagonalize(assemble_full_wave(lat, CLEAN))
    top = mode_overlaps(spec, ports)[-1]
    assert np.all(np.abs(top) > 1e-3)
    # uniform phase: all components share a sign
    assert np.all(np.sign(top) == np.sign(top[0]))


def test_loop_state_decoupled_from_ports(device):
    lat, ports = device
    psi = build_loop_state(lat, (0, 1)).amplitudes
    spec = SpectrumResult(np.array([CLEAN.flat_energy]), psi[:, None])
    assert np.all(mode_overlaps(spec, ports) == 0.0)


def test_single_mode_peak_height():
    vec = np.array([[0.6], [0.8]])
    spec = SpectrumResult(np.array([16.0]), vec)
    ports = PortConfig((0, 1), (0.2, 0.3), 0, 1)
    cfg = TransmissionConfig(kappa0=0.002, kappa_ext=0.5)
    r = s21(spec, ports, cfg, freqs=np.array([15.9, 16.0, 16.1]))
    a_in, a_out = 0.2 * 0.6, 0.3 * 0.8
    kappa = 0.002 + 0.5 * (a_in**2 + a_out**2)
    assert r.mode_kappa[0] == pytest.approx(kappa)
    assert abs(r.s21[1]) == pytest.approx(a_in * a_out / kappa, rel=1e-12)
    # half-width: |S21| falls by sqrt(2) at f_m +- kappa
    r2 = s21(spec, ports, cfg, freqs=np.array([16.0 - kappa, 16.0, 16.0 + kappa]))
    np.testing.assert_allclose(np.abs(r2.s21[[0, 2]]), abs(r2.s21[1]) / np.sqrt(2), rtol=1e-12)


def test_reciprocity(device):
    lat, ports = device
    spec, _ = device_spectrum(lat, DEVICE_PARAMS, 7)
    cfg = TransmissionConfig(n_freq=501)
    a = s21(spec, ports, cfg).s21
    b = s21(spec, ports.swapped(), cfg).s21
    np.testing.assert_array_equal(a, b)


def test_sum_rule_far_from_band(device):
    lat, ports = device
    spec, _ = device_spectrum(lat, DEVICE_PARAMS, 3)
    t = abs(DEVICE_PARAMS.t)
    cfg = TransmissionConfig(freq_start=16 - 40 * t, freq_stop=16 + 40 * t, n_freq=2001)
    r = s21(spec, ports, cfg)
    strength = np.abs(r.overlaps[:, 0] * r.overlaps[:, 2]).sum()
    for f, val in ((r.freqs[0], r.s21[0]), (r.freqs[-1], r.s21[-1])):
        dist = np.abs(f - spec.eigenvalues).min()
        assert dist >= 20 * t - 0.05
        assert abs(val) <= strength / dist
    mid = np.abs(r.s21[np.abs(r.freqs - 16.2) < 0.3]).max()
    assert abs(r.s21[0]) < 0.02 * mid and abs(r.s21[-1]) < 0.02 * mid


def test_background_added_to_field():
    spec = SpectrumResult(np.array([16.0]), np.array([[1.0], [0.0]]))
    ports = PortConfig((0, 1), (0.1, 0.1), 0, 1)
    f = np.linspace(15.9, 16.1, 11)
    bg = np.full(11, 0.25)
    base = s21(spec, ports, TransmissionConfig(), freqs=f).s21
    np.testing.assert_allclose(s21(spec, ports, TransmissionConfig(), freqs=f, background=bg).s21, base + 0.25)
    with pytest.raises(ValueError):
        s21(spec, ports, TransmissionConfig(), freqs=f, background=bg[:5])
    with pytest.raises(ValueError):
        s21(spec, ports, TransmissionConfig(), freqs=f[::-1])


def test_peaks_inside_band_window(members):
    for m in members:
        lo, hi = band_window(DEVICE_PARAMS, m.mode_kappa.max(), m.perturbation_norm)
        assert lo <= m.mode_freqs.min() and m.mode_freqs.max() <= hi
        assert np.all(np.isfinite(m.s21))
        assert len(m.mode_freqs) == 140


def test_linewidth_follows_port_overlap(members):
    for m in members:
        order = np.argsort(m.port_weight, kind="stable")
        assert np.all(np.diff(m.mode_kappa[order]) >= 0)
        assert np.array_equal(np.argsort(m.port_weight, kind="stable"), np.argsort(m.mode_kappa, kind="stable"))


def test_broadest_modes_near_16_2_ghz(members):
    for m in members:
        top = np.argsort(m.port_weight)[-3:]
        assert np.all(np.abs(m.mode_freqs[top] - 16.21) < 0.05)
        assert m.mode_kappa[top].min() > 2 * np.median(m.mode_kappa)


def test_ensemble_is_seed_deterministic(device):
    lat, ports = device
    cfg = TransmissionConfig(n_freq=201)
    a = ensemble(cfg, n=3, seed=11, lat=lat, ports=ports)
    b = ensemble(cfg, n=3, seed=11, lat=lat, ports=ports)
    c = ensemble(cfg, n=3, seed=12, lat=lat, ports=ports)
    for x, y in zip(a, b):
        assert x.seed == y.seed
        assert np.array_equal(x.s21, y.s21) and np.array_equal(x.mode_freqs, y.mode_freqs)
    assert not np.array_equal(a[0].s21, c[0].s21)
    assert len({m.seed for m in a}) == 3


def test_clean_single_member_matches_direct(device):
    lat, ports = device
    cfg = TransmissionConfig(params=CLEAN, n_freq=301)
    (member,) = ensemble(cfg, n=1, seed=0, lat=lat, ports=ports)
    direct = s21(diagonalize(assemble_full_wave(lat, CLEAN)), ports, cfg)
    np.testing.assert_array_equal(member.s21, direct.s21)
    assert member.perturbation_norm == 0.0


def test_ensemble_spread_is_disorder_sized(members):
    freqs = np.array([m.mode_freqs for m in members])
    spread = freqs.std(axis=0)
    assert 1e-4 < np.median(spread) < 0.01
    # band edges persist across members
    assert np.ptp(freqs[:, -1]) < 0.02
    assert np.all(np.abs(freqs[:, 0] - CLEAN.flat_energy) < 0.05)


def test_ensemble_rejects_empty():
    with pytest.raises(ValueError):
        ensemble(TransmissionConfig(n_freq=11), n=0)


# --------------------------------------------------------------------------
# background estimate

def test_background_constant_and_zero():
    f = np.linspace(15, 17, 2001)
    np.testing.assert_allclose(estimate_background(f, np.full_like(f, 0.3)), 0.3, rtol=1e-12)
    assert np.all(estimate_background(f, np.zeros_like(f)) == 0)


def test_background_recovers_sinusoid_under_lorentzian_comb():
    f = np.linspace(15.0, 17.0, 20001)
    inner = (f > 15.3) & (f < 16.7)
    slow = 1 + 0.3 * np.sin(2 * np.pi * f / 0.5)
    rng = np.random.default_rng(1)
    base = np.arange(15.2, 16.8, 0.1)
    centres = base + rng.uniform(-0.02, 0.02, len(base))
    comb = sum(0.5 / (1 + ((f - c) / 0.0014) ** 2) for c in centres)
    est = estimate_background(f, slow + comb)
    peaks_in = np.abs(comb)[inner].max()
    peaks_out = np.abs(est - estimate_background(f, slow))[inner].max()
    assert 20 * np.log10(peaks_in / peaks_out) >= 20
    # the sinusoid itself survives: fitted amplitude and phase
    x = 2 * np.pi * f[inner] / 0.5
    basis = np.column_stack([np.ones_like(x), np.sin(x), np.cos(x)])
    c0, cs, cc = np.linalg.lstsq(basis, est[inner], rcond=None)[0]
    assert np.hypot(cs, cc) == pytest.approx(0.3, rel=0.1)
    assert abs(np.arctan2(cc, cs)) < 0.05
    assert np.corrcoef(est[inner], slow[inner])[0, 1] > 0.99


def test_background_grid_handling():
    f = np.linspace(15, 17, 401)
    mag = np.ones_like(f)
    other = np.linspace(15.1, 16.9, 300)
    with pytest.raises(ValueError, match="regrid"):
        estimate_background(f, mag, grid=other)
    np.testing.assert_allclose(estimate_background(f, mag, grid=other, regrid=True), 1.0)
    np.testing.assert_allclose(estimate_background(f, mag, grid=f), 1.0)
    with pytest.raises(ValueError):
        estimate_background(f[::-1], mag)
    with pytest.raises(ValueError):
        estimate_background(f, mag, filter_width=0)


def test_background_nonuniform_input():
    f = np.sort(np.random.default_rng(2).uniform(15, 17, 800))
    est = estimate_background(f, np.full_like(f, 2.0))
    np.testing.assert_allclose(est, 2.0, rtol=1e-9)


# --------------------------------------------------------------------------
# measured data files

def write(tmp_path, text):
    p = tmp_path / "meas.csv"
    p.write_text(text)
    return p


def test_ingest_cartesian(tmp_path):
    m = ingest_measurement(write(tmp_path, "# sweep\nfreq_ghz,re,im\n15.9,0.1,0.0\n16.0,0.0,0.2\n16.1,-0.3,0.4\n"))
    assert len(m.freqs) == 3
    np.testing.assert_allclose(m.magnitude, [0.1, 0.2, 0.5])


def test_ingest_polar_db(tmp_path):
    m = ingest_measurement(write(tmp_path, "freq_ghz,mag_db,phase_rad\n1.0,-20,0\n2.0,0,3.141592653589793\n"))
    np.testing.assert_allclose(m.magnitude, [0.1, 1.0])
    assert m.s21[1].real == pytest.approx(-1.0)


@pytest.mark.parametrize("text, pattern", [
    ("freq_ghz,re,im\n16.0,0,0\n15.9,0,0\n", r":3: frequency 15.9 does not increase"),
    ("freq,re,im\n16.0,0,0\n", r":1: header"),
    ("freq_ghz,re,im\n16.0,0,abc\n", r":2: non-numeric"),
    ("freq_ghz,re,im\n16.0,0\n", r":2: expected 3 columns"),
    ("freq_ghz,re,im\n16.0,nan,0\n", r":2: non-finite"),
    ("freq_ghz,re,im\n", "no data"),
    ("", "empty"),
])
def test_ingest_errors_name_the_line(tmp_path, text, pattern):
    with pytest.raises(MeasurementFormatError, match=pattern):
        ingest_measurement(write(tmp_path, text))
