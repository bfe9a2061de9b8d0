"""GLS chaotic neuron: map iteration, stimulus-driven traces, and the
four-feature chaotic transform.

A neuron iterates the piecewise-linear GLS map from its initial activity
``q`` until the trajectory enters the recognition window of the input
stimulus (``|x - stimulus| < epsilon``) or an iteration cap is reached.
The visited trajectory, the *neural trace*, is summarized by four
statistics: firing time, firing rate, energy, and entropy. Transforming a
feature matrix replaces each scalar input with one four-feature block.

The trajectory from ``q`` does not depend on the stimulus; only the
stopping time does. ``transform_matrix`` exploits this by generating the
orbit once per parameter set and resolving per-stimulus firing times
against it, which is exactly equivalent to (and bit-identical with)
running ``generate_trace`` per scalar.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

# Map outputs are clamped just below 1 so the trajectory stays inside
# [0, 1) even when an iterate lands exactly on the threshold b.
_CLAMP_MAX = 1.0 - 1e-12

#: Number of features emitted per input dimension.
N_FEATURES_PER_INPUT = 4


@dataclass(frozen=True)
class GlsParams:
    """Configuration of a GLS chaotic neuron.

    q : initial neural activity, in (0, 1)
    b : discrimination threshold of the map, in (0, 1)
    epsilon : stimulus-recognition radius, in (0, 1)
    max_iters : cap on map applications per trace, >= 1
    """

    q: float
    b: float
    epsilon: float
    max_iters: int = 5000

    def __post_init__(self):
        for name in ("q", "b", "epsilon"):
            value = getattr(self, name)
            if not (0.0 < float(value) < 1.0):  # also rejects NaN
                raise ValueError(f"{name} must lie in the open interval (0, 1), got {value!r}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters!r}")


@dataclass
class NeuralTrace:
    """Activity time series of one neuron responding to one stimulus.

    ``values`` holds every visited activity sample (element 0 is the
    initial activity q); ``fired`` records whether the recognition
    condition was met within the iteration cap.
    """

    values: np.ndarray
    fired: bool

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ChaosFeatures:
    """The four summary statistics of a neural trace."""

    firing_time: int
    firing_rate: float
    energy: float
    entropy: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [float(self.firing_time), self.firing_rate, self.energy, self.entropy]
        )


def gls_step(x: float, b: float) -> float:
    """Apply one iteration of the GLS map with threshold ``b``.

    Returns ``x/b`` for ``x < b`` and ``(1-x)/(1-b)`` otherwise, clamped
    into [0, 1) so that the fixed point of the ``x == b`` singularity
    cannot escape the domain.
    """
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x must lie in [0, 1), got {x!r}")
    if not 0.0 < b < 1.0:
        raise ValueError(f"b must lie in (0, 1), got {b!r}")
    y = x / b if x < b else (1.0 - x) / (1.0 - b)
    return y if y < _CLAMP_MAX else _CLAMP_MAX


def generate_trace(stimulus: float, params: GlsParams) -> NeuralTrace:
    """Iterate the map from ``params.q`` until ``stimulus`` is recognized.

    The trace starts at q and stops at the first sample within
    ``params.epsilon`` of the stimulus (``fired=True``) or after
    ``params.max_iters`` map applications (``fired=False``). Stimuli equal
    to 1.0 are admitted; the trace itself stays in [0, 1).
    """
    if not 0.0 <= stimulus <= 1.0:
        raise ValueError(f"stimulus must lie in [0, 1], got {stimulus!r}")
    b = params.b
    eps = params.epsilon
    values = np.empty(params.max_iters + 1)
    x = float(params.q)
    values[0] = x
    n = 1
    fired = abs(x - stimulus) < eps
    while not fired and n <= params.max_iters:
        x = x / b if x < b else (1.0 - x) / (1.0 - b)
        if x >= _CLAMP_MAX:
            x = _CLAMP_MAX
        values[n] = x
        n += 1
        fired = abs(x - stimulus) < eps
    return NeuralTrace(values=values[:n].copy(), fired=fired)


def _entropy_bits(n_ones: int, n: int) -> float:
    """Shannon entropy (bits) of a binary sequence with ``n_ones`` ones."""
    p1 = n_ones / n
    p0 = (n - n_ones) / n
    h = 0.0
    if p0 > 0.0:
        h -= p0 * float(np.log2(p0))
    if p1 > 0.0:
        h -= p1 * float(np.log2(p1))
    return h


def trace_features(trace: NeuralTrace | np.ndarray, b: float) -> ChaosFeatures:
    """Extract firing time, firing rate, energy, and entropy from a trace.

    All samples, including the initial activity at index 0, enter the
    statistics. The symbolization for firing rate and entropy is
    ``1 if x >= b else 0``.
    """
    values = trace.values if isinstance(trace, NeuralTrace) else np.asarray(trace, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("trace must be a nonempty 1-D sequence of activity samples")
    if not 0.0 < b < 1.0:
        raise ValueError(f"b must lie in (0, 1), got {b!r}")
    n = values.size
    n_ones = int(np.count_nonzero(values >= b))
    # cumsum accumulates sequentially, keeping parity with the orbit kernel
    energy = float(np.cumsum(values * values)[-1])
    return ChaosFeatures(
        firing_time=n - 1,
        firing_rate=n_ones / n,
        energy=energy,
        entropy=_entropy_bits(n_ones, n),
    )


# ---------------------------------------------------------------------------
# Orbit kernel
# ---------------------------------------------------------------------------

def _gls_orbit(q: float, b: float, n_steps: int) -> np.ndarray:
    """Full stimulus-independent trajectory x_0=q, ..., x_{n_steps}."""
    out = np.empty(n_steps + 1)
    x = float(q)
    out[0] = x
    for t in range(1, n_steps + 1):
        x = x / b if x < b else (1.0 - x) / (1.0 - b)
        if x >= _CLAMP_MAX:
            x = _CLAMP_MAX
        out[t] = x
    return out


@dataclass
class _HitIndex:
    """Running-minimum records of ``|orbit[t] - s|`` per stimulus.

    For each stimulus the flat arrays hold the strictly decreasing record
    values of the distance to the orbit together with the step at which
    each record occurred. The first step at which the distance drops below
    any radius ``eps >= eps_floor`` is always one of these records, so
    firing times for a whole sweep of radii can be answered from one scan.
    """

    rec_values: np.ndarray  # flat float64, decreasing runs per stimulus
    rec_times: np.ndarray   # flat int64, increasing runs per stimulus
    offsets: np.ndarray     # (U + 1,) segment boundaries
    counts: np.ndarray      # (U,) records per stimulus, >= 1
    eps_floor: float
    max_iters: int

    def first_hit(self, epsilon: float) -> tuple[np.ndarray, np.ndarray]:
        """First step with distance < ``epsilon`` per stimulus.

        Returns ``(times, fired)``; stimuli that never fire get
        ``times == max_iters`` (the truncated trace end).
        """
        if epsilon < self.eps_floor:
            raise ValueError(
                f"epsilon {epsilon!r} below the indexed floor {self.eps_floor!r}"
            )
        ge = (self.rec_values >= epsilon).astype(np.int64)
        j = np.add.reduceat(ge, self.offsets[:-1])
        fired = j < self.counts
        pos = self.offsets[:-1] + np.where(fired, j, 0)
        times = np.where(fired, self.rec_times[pos], self.max_iters)
        return times.astype(np.int64), fired


def _build_hit_index(
    orbit: np.ndarray,
    stimuli: np.ndarray,
    eps_floor: float,
    *,
    block: int = 4096,
    chunk: int = 512,
) -> _HitIndex:
    """Scan the orbit once, collecting distance records per stimulus.

    Stimuli whose running minimum falls below ``eps_floor`` are dropped
    from subsequent chunks: every radius of interest has already fired for
    them, and the firing step is necessarily a collected record.
    """
    n_points = orbit.size
    total = stimuli.size
    rows_parts: list[np.ndarray] = []
    times_parts: list[np.ndarray] = []
    vals_parts: list[np.ndarray] = []
    for b0 in range(0, total, block):
        s = stimuli[b0 : b0 + block]
        ids = np.arange(b0, b0 + s.size, dtype=np.int64)
        cur = np.full(s.size, np.inf)
        t0 = 0
        while t0 < n_points and s.size:
            seg = orbit[t0 : t0 + chunk]
            d = np.abs(seg[None, :] - s[:, None])
            m = np.minimum.accumulate(
                np.concatenate([cur[:, None], d], axis=1), axis=1
            )
            is_rec = m[:, 1:] < m[:, :-1]
            r, c = np.nonzero(is_rec)
            rows_parts.append(ids[r])
            times_parts.append((t0 + c).astype(np.int64))
            vals_parts.append(m[r, c + 1])
            cur = m[:, -1]
            alive = cur >= eps_floor
            if not alive.all():
                s = s[alive]
                ids = ids[alive]
                cur = cur[alive]
            t0 += seg.size
    rows = np.concatenate(rows_parts) if rows_parts else np.empty(0, np.int64)
    times = np.concatenate(times_parts) if times_parts else np.empty(0, np.int64)
    vals = np.concatenate(vals_parts) if vals_parts else np.empty(0)
    order = np.argsort(rows, kind="stable")  # keeps per-row time order
    counts = np.bincount(rows, minlength=total).astype(np.int64)
    offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    return _HitIndex(
        rec_values=vals[order],
        rec_times=times[order],
        offsets=offsets,
        counts=counts,
        eps_floor=eps_floor,
        max_iters=n_points - 1,
    )


def _features_from_hits(
    times: np.ndarray, count_prefix: np.ndarray, energy_prefix: np.ndarray
) -> np.ndarray:
    """Assemble the (U, 4) feature block from firing steps and orbit prefixes."""
    length = times + 1
    ones = count_prefix[times]
    p1 = ones / length
    p0 = (length - ones) / length
    entropy = np.zeros(times.shape)
    m = p1 > 0.0
    entropy[m] -= p1[m] * np.log2(p1[m])
    m = p0 > 0.0
    entropy[m] -= p0[m] * np.log2(p0[m])
    return np.column_stack(
        [times.astype(np.float64), p1, energy_prefix[times], entropy]
    )


def transform_matrix(samples: np.ndarray, params: GlsParams) -> np.ndarray:
    """Chaos-transform an (n, d) matrix of normalized values into (n, 4d).

    Every entry must lie in [0, 1]. Output columns come in blocks of
    [firing_time, firing_rate, energy, entropy] per input feature, in
    input-feature order. Rows are independent and the result is
    deterministic for fixed inputs.
    """
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] == 0:
        raise ValueError(f"samples must be a 2-D matrix with at least one column, got shape {X.shape}")
    bad = ~((X >= 0.0) & (X <= 1.0))
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ValueError(
            f"input value out of [0, 1] at row {i}, column {j}: {X[i, j]!r}"
        )
    n, d = X.shape
    if n == 0:
        return np.empty((0, N_FEATURES_PER_INPUT * d))
    uniq, inv = np.unique(X.ravel(), return_inverse=True)
    orbit = _gls_orbit(params.q, params.b, params.max_iters)
    hits = _build_hit_index(orbit, uniq, eps_floor=params.epsilon)
    times, _ = hits.first_hit(params.epsilon)
    count_prefix = np.cumsum(orbit >= params.b)
    energy_prefix = np.cumsum(orbit * orbit)
    feats = _features_from_hits(times, count_prefix, energy_prefix)
    return feats[inv.ravel()].reshape(n, N_FEATURES_PER_INPUT * d)


class ChaosFex(TransformerMixin, BaseEstimator):
    """Stateless chaotic feature transformer with the estimator interface.

    ``transform`` maps an (n, d) matrix of values in [0, 1] to the
    (n, 4d) matrix of per-feature chaos statistics. ``fit`` only validates
    parameters; there is nothing to learn.
    """

    def __init__(self, q=0.52, b=0.75, epsilon=0.1, max_iters=5000):
        self.q = q
        self.b = b
        self.epsilon = epsilon
        self.max_iters = max_iters

    def _gls_params(self) -> GlsParams:
        return GlsParams(self.q, self.b, self.epsilon, self.max_iters)

    def fit(self, X, y=None):
        self._gls_params()
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("X must be a 2-D matrix")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        return transform_matrix(X, self._gls_params())
