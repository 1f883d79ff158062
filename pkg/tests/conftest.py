import functools

import numpy as np
import pytest

from silhouvol.geometry_synth import FrameSequenceMeta, SolidSpec, render_rotation_sequence

DIMS = (512, 512)


@functools.lru_cache(maxsize=None)
def _sequence(axes, orientation, fps, period, n_frames, dims):
    spec = SolidSpec(full_axes=axes, orientation=orientation)
    meta = FrameSequenceMeta(fps=fps, rotation_period=period, n_frames=n_frames)
    return tuple(render_rotation_sequence(spec, meta, dims))


def rendered(axes, orientation="vertical-long-axis", fps=30.0, period=20.0, n_frames=600,
             dims=DIMS):
    """Cached rendered sequence; callers must not mutate the masks."""
    return list(_sequence(tuple(axes), orientation, fps, period, n_frames, tuple(dims)))


@pytest.fixture(scope="session")
def sphere_frames():
    return rendered((200, 200, 200))


@pytest.fixture(scope="session")
def spheroid_frames():
    return rendered((300, 200, 200))


@pytest.fixture(scope="session")
def ellipsoid_h_frames():
    return rendered((300, 200, 100), "horizontal-long-axis")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def record_criterion(label, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
