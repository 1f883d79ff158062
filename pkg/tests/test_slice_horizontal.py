import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from sklearn.base import clone

from silhouvol.boundary import BoundaryProfile, extract_profile
from silhouvol.exceptions import InsufficientCoverageError, NegativeAreaError
from silhouvol.geometry_synth import FrameSequenceMeta, SolidSpec, render_silhouette
from silhouvol.slice_horizontal import (
    HorizontalSliceEstimator,
    angle_window_samples,
    calibrate,
    estimate_horizontal,
    fold_angles,
    resample_widths,
    slice_area,
    slice_positions,
    width_matrix,
)

from conftest import rendered

META = FrameSequenceMeta(fps=30, rotation_period=20, n_frames=600)


def ellipse_widths(p, q, n):
    s = np.arange(n) * math.pi / n
    return 2 * np.sqrt((p * np.cos(s)) ** 2 + (q * np.sin(s)) ** 2)


def fake_profile(height, width=3):
    y = np.arange(height)
    return BoundaryProfile(y=y, x_left=np.zeros(height, int), x_right=np.full(height, width - 1),
                           m=(1.0, 0), M=(1.0, height - 1))


@pytest.mark.parametrize("n", [8, 31, 180])
def test_constant_width_exact(n):
    for sign in ("minus", "plus"):
        assert slice_area(np.full(n, 2.0), sign) == pytest.approx(math.pi, rel=1e-12)
        assert slice_area(np.full(n, 7.0), sign, smooth_window=5) == pytest.approx(
            math.pi / 4 * 49, rel=1e-12)


def test_minus_form_recovers_ellipse_area():
    assert slice_area(ellipse_widths(3, 1, 180), "minus") == pytest.approx(3 * math.pi, rel=0.005)


def test_plus_form_overestimates_by_derivative_energy():
    L = ellipse_widths(3, 1, 180)
    plus = slice_area(L, "plus")
    minus = slice_area(L, "minus")
    assert plus > 3 * math.pi

    def dL2(s):
        u = 9 * math.cos(s) ** 2 + math.sin(s) ** 2
        return (-8 * math.sin(2 * s) / math.sqrt(u)) ** 2

    half_energy = 0.5 * integrate.quad(dL2, 0, math.pi)[0]
    assert plus - minus == pytest.approx(half_energy, rel=0.01)


@pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (5, 3)])
def test_minus_form_on_several_bodies(p, q):
    assert slice_area(ellipse_widths(p, q, 360)) == pytest.approx(math.pi * p * q, rel=1e-3)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(1.0, 3.0), min_size=8, max_size=60), st.integers(0, 59))
def test_cyclic_shift_invariance(widths, shift):
    L = np.array(widths)
    a = slice_area(L, "plus")
    b = slice_area(np.roll(L, shift), "plus")
    assert a == pytest.approx(b, rel=1e-12)


def test_slice_area_errors():
    with pytest.raises(ValueError):
        slice_area(np.ones(7))
    spike = np.array([1.0, 1, 1, 10, 1, 1, 1, 1])
    with pytest.raises(NegativeAreaError):
        slice_area(spike, "minus")


def test_smoothed_derivative_matches_raw_on_smooth_input():
    L = ellipse_widths(3, 1, 300)
    assert slice_area(L, smooth_window=29) == pytest.approx(3 * math.pi, rel=0.005)


def test_angle_window_samples():
    assert angle_window_samples(0, 0.01, 300) == 1
    assert angle_window_samples(0.3, math.pi / 300, 300) == 29
    assert angle_window_samples(10.0, math.pi / 300, 300) == 299


def test_calibrate_min_mean_max():
    cal = calibrate([fake_profile(h) for h in (100, 120, 140)], "average")
    assert (cal.H_short, cal.H_avg, cal.H_long) == (100, 120, 140)
    assert cal.H_target == 120


def test_calibrate_equal_heights():
    profiles = [fake_profile(50)] * 4
    for mode in ("short", "average", "long"):
        cal = calibrate(profiles, mode)
        assert cal.H_target == 50
        assert [s for _, s in cal.per_frame_scale] == [1.0] * 4


def test_calibrate_average_scales():
    cal = calibrate([fake_profile(90), fake_profile(110)], "average")
    assert cal.H_avg == 100
    assert [s for _, s in cal.per_frame_scale] == pytest.approx([10 / 9, 10 / 11])


def test_identity_resample():
    np.testing.assert_array_equal(resample_widths([1, 3, 1], 1.0, 3), [1, 3, 1])


def test_resample_scales_widths_and_rows():
    out = resample_widths(np.full(10, 4.0), 2.0, 20)
    np.testing.assert_allclose(out, 8.0)


def test_fold_angles():
    bins, n = fold_angles(600, math.pi / 300)
    assert n == 300
    np.testing.assert_array_equal(bins[:300], np.arange(300))
    np.testing.assert_array_equal(bins[300:], np.arange(300))
    with pytest.raises(InsufficientCoverageError):
        fold_angles(299, math.pi / 300)


def test_width_matrix_sphere_uniform(sphere_frames):
    profiles = [extract_profile(m) for m in sphere_frames]
    wm = width_matrix(profiles, calibrate(profiles), META)
    assert wm.L.shape == (300, 200)
    assert np.all(wm.L == wm.L[0])
    assert wm.delta_s == pytest.approx(math.pi / 300)
    assert np.all(np.diff(wm.angles) > 0)


def test_width_matrix_tracks_projected_width(ellipsoid_h_frames):
    profiles = [extract_profile(m) for m in ellipsoid_h_frames]
    wm = width_matrix(profiles, calibrate(profiles), META)
    center = wm.at(wm.n_slices / 2)
    s = wm.angles
    truth = 2 * np.sqrt((150 * np.cos(s)) ** 2 + (50 * np.sin(s)) ** 2)
    assert np.max(np.abs(center - truth)) <= 1.5
    # the center slice is the 150 x 50 ellipse
    assert slice_area(center, smooth_window=29) == pytest.approx(math.pi * 150 * 50, rel=0.01)


def test_slice_positions():
    c, t = slice_positions(10, 1)
    np.testing.assert_allclose(c, np.arange(10) + 0.5)
    c, t = slice_positions(10, 4)
    np.testing.assert_allclose(c, [2, 6, 9])
    np.testing.assert_allclose(t, [4, 4, 2])
    c, t = slice_positions(10, 10)
    assert list(c) == [5.0] and list(t) == [10.0]


def test_sphere_volume(sphere_frames):
    est = estimate_horizontal(sphere_frames, META)
    truth = 4 / 3 * math.pi * 100**3
    assert est.volume == pytest.approx(truth, rel=0.02)
    vols = list(est.volumes.values())
    assert max(vols) / min(vols) - 1 < 0.005


def test_ellipsoid_volume(ellipsoid_h_frames):
    est = estimate_horizontal(ellipsoid_h_frames, META)
    assert est.volume == pytest.approx(math.pi / 6 * 300 * 200 * 100, rel=0.03)


def test_thickness_matters(sphere_frames):
    fine = estimate_horizontal(sphere_frames, META, thickness=1).volume
    single = estimate_horizontal(sphere_frames, META, thickness=200).volume
    assert abs(single - fine) / fine > 0.05
    mid = estimate_horizontal(sphere_frames, META, thickness=10).volume
    assert abs(mid - fine) < abs(single - fine)


def test_varying_heights_give_three_volumes():
    # a sphere whose apparent size breathes with the turntable angle
    frames = []
    angles = META.angles()[:300]
    for t in angles:
        d = 180 + 40 * math.sin(t) ** 2
        frames.append(render_silhouette(SolidSpec(full_axes=(d, d, d)), 0.0, (300, 300)))
    meta = FrameSequenceMeta(30, 20, 300)
    est = estimate_horizontal(frames, meta)
    cal = est.calibration
    assert cal.H_short < cal.H_avg < cal.H_long
    v = est.volumes
    assert v["short"] < v["average"] < v["long"]
    # each calibrated set is a sphere of diameter H_target
    for mode, h in (("short", cal.H_short), ("average", cal.H_avg), ("long", cal.H_long)):
        assert v[mode] == pytest.approx(math.pi / 6 * h**3, rel=0.03)


def test_doubling_frames_converges():
    axes = (300, 200, 100)
    coarse = estimate_horizontal(rendered(axes, "horizontal-long-axis"), META).volume
    fine_frames = rendered(axes, "horizontal-long-axis", fps=60, n_frames=1200)
    fine = estimate_horizontal(fine_frames, FrameSequenceMeta(60, 20, 1200)).volume
    assert abs(fine - coarse) / coarse < 0.005


def test_estimator_api(sphere_frames):
    est = HorizontalSliceEstimator(cm_per_pixel=0.5)
    params = est.get_params()
    assert params["mode"] == "average" and params["eq45_sign"] == "minus"
    other = clone(est).set_params(mode="long")
    assert other.mode == "long"
    frames = sphere_frames[:300]
    est.fit(frames)
    assert set(est.volumes_) == {"short", "average", "long"}
    assert est.volume_cm3_ == pytest.approx(est.volume_ * 0.125)
    report = est.report()
    assert len(report["slices"]) == 200
    assert est.predict([frames]).tolist() == [est.volume_]


def test_plus_sign_inflates(ellipsoid_h_frames):
    minus = estimate_horizontal(ellipsoid_h_frames[:300], META).volume
    plus = estimate_horizontal(ellipsoid_h_frames[:300], META, sign="plus").volume
    assert plus > minus * 1.1
