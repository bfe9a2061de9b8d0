import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import neurochaos as nc
from neurochaos.chaos import _CLAMP_MAX


def oracle_features(values, b):
    """Plain-Python re-computation of the four trace statistics."""
    import math

    n = len(values)
    ones = sum(1 for v in values if v >= b)
    energy = 0.0
    for v in values:
        energy += float(v) * float(v)
    p1 = ones / n
    p0 = (n - ones) / n
    ent = 0.0
    for p in (p0, p1):
        if p > 0:
            ent -= p * math.log2(p)
    return n - 1, p1, energy, ent


unit_open = st.floats(min_value=1e-6, max_value=1 - 1e-6)


# ---------------------------------------------------------------------------
# gls_step
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "x,b,expected",
    [(0.25, 0.5, 0.5), (0.0, 0.47, 0.0), (0.9, 0.75, 0.4)],
)
def test_gls_step_values(x, b, expected):
    assert nc.gls_step(x, b) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("x,b", [(1.0, 0.5), (-0.1, 0.5), (0.5, 0.0), (0.5, 1.0), (float("nan"), 0.5), (0.5, float("nan"))])
def test_gls_step_domain_errors(x, b):
    with pytest.raises(ValueError):
        nc.gls_step(x, b)


def test_gls_step_singularity_clamped():
    # x == b maps to exactly 1.0 before the clamp
    assert nc.gls_step(0.3, 0.3) == _CLAMP_MAX
    assert nc.gls_step(0.3, 0.3) < 1.0


@given(x=st.floats(min_value=0, max_value=1, exclude_max=True), b=unit_open)
def test_gls_step_range_preserved(x, b):
    y = nc.gls_step(x, b)
    assert 0.0 <= y < 1.0


# ---------------------------------------------------------------------------
# generate_trace
# ---------------------------------------------------------------------------

def test_trace_immediate_recognition():
    t = nc.generate_trace(0.3, nc.GlsParams(q=0.3, b=0.5, epsilon=0.1))
    assert t.fired
    assert len(t) == 1  # zero iterations
    np.testing.assert_array_equal(t.values, [0.3])


def test_trace_hand_iteration():
    # 0.1 -> 0.2 -> 0.4; |0.4 - 0.35| = 0.05 < 0.06
    t = nc.generate_trace(0.35, nc.GlsParams(q=0.1, b=0.5, epsilon=0.06))
    assert t.fired
    np.testing.assert_allclose(t.values, [0.1, 0.2, 0.4], rtol=1e-12)


def test_trace_truncated_when_never_recognized():
    # from q=0.4 with b=0.5 the early orbit stays near the {0.4, 0.8}
    # cycle, far from the window around 0.99
    t = nc.generate_trace(0.99, nc.GlsParams(q=0.4, b=0.5, epsilon=0.01, max_iters=20))
    assert not t.fired
    assert len(t) == 21
    assert t.values.max() < 0.99 - 0.01


def test_trace_long_run_escapes_cycle():
    # in double precision rounding breaks the exact {0.4, 0.8} cycle and
    # the orbit reaches the clamp, which lies inside the window around
    # 0.99; frozen regression for the IEEE behavior
    t = nc.generate_trace(0.99, nc.GlsParams(q=0.4, b=0.5, epsilon=0.01, max_iters=5000))
    assert t.fired
    assert len(t) == 54
    assert t.values[-1] == _CLAMP_MAX


def test_trace_stimulus_one_admitted():
    t = nc.generate_trace(1.0, nc.GlsParams(q=0.995, b=0.5, epsilon=0.01))
    assert t.fired and len(t) == 1


@pytest.mark.parametrize("stimulus", [-0.01, 1.01, float("nan")])
def test_trace_stimulus_domain(stimulus):
    with pytest.raises(ValueError):
        nc.generate_trace(stimulus, nc.GlsParams(0.5, 0.5, 0.1))


@pytest.mark.parametrize(
    "kwargs",
    [dict(q=0.0), dict(q=1.0), dict(b=0.0), dict(b=1.0), dict(epsilon=0.0), dict(epsilon=1.0), dict(max_iters=0)],
)
def test_params_validation(kwargs):
    base = dict(q=0.5, b=0.5, epsilon=0.1, max_iters=100)
    base.update(kwargs)
    with pytest.raises(ValueError):
        nc.GlsParams(**base)


@settings(max_examples=200, deadline=None)
@given(stimulus=st.floats(min_value=0, max_value=1), q=unit_open, b=unit_open, eps=unit_open)
def test_trace_invariants(stimulus, q, b, eps):
    params = nc.GlsParams(q, b, eps, max_iters=300)
    t = nc.generate_trace(stimulus, params)
    assert 1 <= len(t) <= params.max_iters + 1
    assert np.all((t.values >= 0.0) & (t.values < 1.0))
    if t.fired:
        assert abs(t.values[-1] - stimulus) < eps
    else:
        assert len(t) == params.max_iters + 1


def test_trace_deterministic():
    params = nc.GlsParams(0.41, 0.63, 0.004, 2000)
    a = nc.generate_trace(0.77, params)
    b = nc.generate_trace(0.77, params)
    np.testing.assert_array_equal(a.values, b.values)
    assert a.fired == b.fired


# ---------------------------------------------------------------------------
# trace_features
# ---------------------------------------------------------------------------

def test_features_hand_computed():
    f = nc.trace_features(np.array([0.1, 0.2, 0.4]), b=0.5)
    assert f.firing_time == 2
    assert f.firing_rate == 0.0
    assert f.energy == pytest.approx(0.21, rel=1e-12)
    assert f.entropy == 0.0


def test_features_single_sample():
    f = nc.trace_features(np.array([0.3]), b=0.5)
    assert (f.firing_time, f.firing_rate) == (0, 0.0)
    assert f.energy == pytest.approx(0.09, rel=1e-12)
    assert f.entropy == 0.0


def test_features_balanced_symbols():
    f = nc.trace_features(np.array([0.6, 0.2]), b=0.5)
    assert f.firing_rate == 0.5
    assert f.energy == pytest.approx(0.40, rel=1e-12)
    assert f.entropy == 1.0


def test_features_accept_trace_object():
    t = nc.generate_trace(0.35, nc.GlsParams(q=0.1, b=0.5, epsilon=0.06))
    assert nc.trace_features(t, 0.5) == nc.trace_features(t.values, 0.5)


def test_features_empty_trace_rejected():
    with pytest.raises(ValueError):
        nc.trace_features(np.array([]), b=0.5)


def test_features_match_oracle_randomized():
    rng = np.random.default_rng(31)
    for _ in range(300):
        q, b, eps = rng.uniform(0.01, 0.99, 3)
        t = nc.generate_trace(rng.uniform(0, 1), nc.GlsParams(q, b, eps, 500))
        f = nc.trace_features(t, b)
        ft, rate, energy, ent = oracle_features(t.values, b)
        assert f.firing_time == ft
        assert abs(f.firing_rate - rate) <= 1e-12
        assert abs(f.energy - energy) <= 1e-12
        assert abs(f.entropy - ent) <= 1e-12
        assert 0.0 <= f.firing_rate <= 1.0
        assert 0.0 <= f.entropy <= 1.0
        assert 0.0 <= f.energy < len(t)


# ---------------------------------------------------------------------------
# transform_matrix / ChaosFex
# ---------------------------------------------------------------------------

def test_transform_shape_1x1():
    out = nc.transform_matrix(np.array([[0.37]]), nc.GlsParams(0.2, 0.6, 0.05, 200))
    assert out.shape == (1, 4)


def test_transform_cora_width():
    # 1,433 input features expand to 4 * 1433 = 5,732 columns
    rng = np.random.default_rng(0)
    X = rng.uniform(0, 1, (3, 1433))
    out = nc.transform_matrix(X, nc.GlsParams(0.52, 0.75, 0.1, max_iters=60))
    assert out.shape == (3, 5732)


def test_transform_duplicate_rows_identical():
    rng = np.random.default_rng(1)
    row = rng.uniform(0, 1, 6)
    X = np.vstack([row, row, rng.uniform(0, 1, 6)])
    out = nc.transform_matrix(X, nc.GlsParams(0.3, 0.55, 0.02, 400))
    np.testing.assert_array_equal(out[0], out[1])


def test_transform_matches_scalar_path_bitwise():
    rng = np.random.default_rng(7)
    params = nc.GlsParams(0.44, 0.68, 0.013, 350)
    X = rng.uniform(0, 1, (5, 4))
    X[0, 0], X[1, 1], X[2, 2] = 0.0, 1.0, params.q
    out = nc.transform_matrix(X, params)
    for i in range(X.shape[0]):
        for j in range(X.shape[1]):
            f = nc.trace_features(nc.generate_trace(X[i, j], params), params.b)
            np.testing.assert_array_equal(out[i, 4 * j : 4 * j + 4], f.as_array())


def test_transform_out_of_range_names_cell():
    X = np.array([[0.2, 0.3], [0.4, 1.5]])
    with pytest.raises(ValueError, match=r"row 1, column 1"):
        nc.transform_matrix(X, nc.GlsParams(0.5, 0.5, 0.1))
    X[1, 1] = float("nan")
    with pytest.raises(ValueError, match=r"row 1, column 1"):
        nc.transform_matrix(X, nc.GlsParams(0.5, 0.5, 0.1))


def test_transform_row_permutation_equivariance():
    rng = np.random.default_rng(5)
    X = rng.uniform(0, 1, (8, 3))
    perm = rng.permutation(8)
    params = nc.GlsParams(0.21, 0.47, 0.03, 250)
    np.testing.assert_array_equal(
        nc.transform_matrix(X, params)[perm], nc.transform_matrix(X[perm], params)
    )


def test_sensitivity_to_distinct_stimuli():
    # stimuli separated by more than 2*eps should generically produce
    # different firing times; statistical, not universal
    params = nc.GlsParams(0.37, 0.61, 0.01, 2000)
    rng = np.random.default_rng(99)
    diff = total = 0
    while total < 200:
        s1, s2 = rng.uniform(0, 1, 2)
        if abs(s1 - s2) <= 2 * params.epsilon:
            continue
        t1 = nc.generate_trace(s1, params)
        t2 = nc.generate_trace(s2, params)
        diff += len(t1) != len(t2)
        total += 1
    assert diff / total >= 0.9


def test_chaosfex_estimator_api():
    rng = np.random.default_rng(3)
    X = rng.uniform(0, 1, (6, 2))
    fex = nc.ChaosFex(q=0.3, b=0.6, epsilon=0.05, max_iters=300)
    out = fex.fit(X).transform(X)
    np.testing.assert_array_equal(out, nc.transform_matrix(X, nc.GlsParams(0.3, 0.6, 0.05, 300)))
    assert fex.get_params()["epsilon"] == 0.05
    with pytest.raises(ValueError):
        nc.ChaosFex(q=1.5).fit(X)
