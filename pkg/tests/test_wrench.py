import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from hapticsmooth.wrench import (
    TRACE_HEADER,
    Orientation,
    TimedWrench,
    Trace,
    Vec3,
    Wrench,
    rotation_vector_between,
    wrench_linear_combine,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
quat_components = st.tuples(finite, finite, finite, finite).filter(lambda q: sum(c * c for c in q) > 1e-6)


def unit(q):
    return Orientation(*q)


def logm_oracle(a: Orientation, b: Orientation) -> np.ndarray:
    """Rotation vector of b⁻¹∘a from the matrix logarithm of R_bᵀ R_a."""
    rel = b.to_matrix().T @ a.to_matrix()
    L = np.real(scipy.linalg.logm(rel))
    return np.array([L[2, 1], L[0, 2], L[1, 0]])


def test_identity_rotation_vector_is_zero():
    v = rotation_vector_between(Orientation.identity(), Orientation.identity())
    assert (v.x, v.y, v.z) == (0.0, 0.0, 0.0)


def test_quarter_turn_about_z():
    a = Orientation.from_axis_angle((0, 0, 1), math.pi / 2)
    v = rotation_vector_between(a, Orientation.identity())
    assert np.allclose(v.to_array(), [0.0, 0.0, math.pi / 2], atol=1e-15)


def test_matches_matrix_log_oracle():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a = Orientation(*rng.normal(size=4))
        b = Orientation(*rng.normal(size=4))
        v = rotation_vector_between(a, b).to_array()
        if np.linalg.norm(v) > math.pi - 1e-3:
            continue  # logm branch is ambiguous at pi
        assert np.allclose(v, logm_oracle(a, b), atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(quat_components)
def test_self_rotation_is_zero(q):
    a = unit(q)
    assert rotation_vector_between(a, a).norm() < 1e-12


@settings(max_examples=200, deadline=None)
@given(quat_components, quat_components)
def test_antisymmetric(qa, qb):
    a, b = unit(qa), unit(qb)
    v1 = rotation_vector_between(a, b).to_array()
    v2 = rotation_vector_between(b, a).to_array()
    if abs(np.linalg.norm(v1) - math.pi) < 1e-6:
        return  # axis sign is arbitrary at exactly pi
    assert np.allclose(v1, -v2, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(quat_components)
def test_normalization_idempotent(q):
    a = unit(q)
    b = Orientation(*a.as_tuple())
    assert a.as_tuple() == b.as_tuple()
    assert abs(sum(c * c for c in a.as_tuple()) - 1.0) < 1e-12
    assert a.w >= 0.0


def test_rotvec_roundtrip():
    v = np.array([0.3, -0.2, 0.5])
    assert np.allclose(Orientation.from_rotvec(v).log().to_array(), v, atol=1e-14)


def test_rejects_bad_values():
    with pytest.raises(ValueError):
        Vec3(float("nan"), 0.0, 0.0)
    with pytest.raises(ValueError):
        Orientation(0.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        TimedWrench(-1.0, Wrench())


def test_linear_combine_examples():
    w = Wrench(Vec3(1.0, -2.0, 3.0), Vec3(0.1, 0.2, 0.3))
    assert wrench_linear_combine([1.0], [w]) == w
    assert np.allclose(wrench_linear_combine([0.5, 0.5], [w, w]).to_array(), w.to_array())
    out = wrench_linear_combine([2.0, -1.0], [Wrench(Vec3(1.0, 0, 0)), Wrench(Vec3(0.5, 0, 0))])
    assert out.force == Vec3(1.5, 0.0, 0.0)
    with pytest.raises(ValueError):
        wrench_linear_combine([1.0, 2.0], [w])
    with pytest.raises(ValueError):
        wrench_linear_combine([], [])


def test_trace_csv_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(3)
    t = np.cumsum(rng.uniform(0.1, 20.0, 50))
    tr = Trace(t, rng.normal(size=(50, 6)) * 10.0 ** rng.integers(-12, 4, size=(50, 6)))
    path = tmp_path / "t.csv"
    tr.write_csv(path)
    data = path.read_bytes()
    assert data.startswith((",".join(TRACE_HEADER) + "\n").encode())
    assert b"\r" not in data
    back = Trace.read_csv(path)
    assert np.array_equal(back.t, tr.t) and np.array_equal(back.values, tr.values)


def test_trace_rejects_unordered_timestamps():
    with pytest.raises(ValueError):
        Trace([0.0, 2.0, 1.0], np.zeros((3, 6)))
    with pytest.raises(ValueError):
        Trace([0.0, 0.0], np.zeros((2, 6)))


def test_trace_window_and_zoh():
    tr = Trace([0.0, 10.0, 20.0], np.arange(18.0).reshape(3, 6))
    assert len(tr.window(5.0, 20.0)) == 1
    z = tr.resample_zoh(np.arange(25.0))
    assert np.array_equal(z.values[9], tr.values[0]) and np.array_equal(z.values[10], tr.values[1])
