"""Streaming, vectorized path ensembles.

These drivers advance per-path state step by step without materializing
full path matrices, drawing increments in chunks from the experiment's
Philox stream and delegating the inner loops to the compiled kernels.
Snapshots of the state are taken at the requested checkpoint steps.

Paths fan out across workers by splitting an ensemble into fixed chunks,
each owning its private sub-stream; results merge by concatenation in
chunk order, so outputs are identical for any worker count.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels as K
from .errors import ConfigError
from .rng import as_generator

__all__ = [
    "bm_max_ensemble",
    "ladder_ensemble",
    "levy_ensemble",
    "taboo_ensemble",
    "bessel_hit_ensemble",
]

_CHUNK_ELEMS = 4_000_000  # per increment array, keeps chunks ~30 MB


def _chunk_steps(n_paths: int) -> int:
    return max(1, _CHUNK_ELEMS // max(n_paths, 1))


def _seed_kernel_rng(g: np.random.Generator):
    K.seed_inkernel(np.uint32(g.integers(2**32)))


def _segments(checkpoints):
    checkpoints = sorted(int(c) for c in checkpoints)
    if checkpoints and checkpoints[0] < 0:
        raise ConfigError("checkpoint steps must be nonnegative")
    return checkpoints


def bm_max_ensemble(n, x0, drift, dt, checkpoints, rng):
    """Brownian ensemble with exact-in-law running maximum (bridge maxima).

    Returns one dict per checkpoint with keys ``t, X, S, S_grid``."""
    g = as_generator(rng)
    X = np.full(n, float(x0))
    S = np.full(n, float(x0))
    Sgrid = np.full(n, float(x0))
    chunk = _chunk_steps(n)
    out = []
    prev = 0
    for cp in _segments(checkpoints):
        steps = cp - prev
        while steps > 0:
            m = min(chunk, steps)
            Z = g.standard_normal((m, n))
            U = g.random((m, n))
            K.bm_bridge_max_kernel(Z, U, X, S, Sgrid, float(drift), float(dt))
            steps -= m
        out.append({"t": cp * dt, "X": X.copy(), "S": S.copy(), "S_grid": Sgrid.copy()})
        prev = cp
    return out


def ladder_ensemble(n, x0, dt, checkpoints, a, b, rng, drift=0.0):
    """Down-crossing ladder ensemble with bridge-corrected threshold
    detection.  Snapshot keys: ``t, X, D, phase, S`` (S is the grid running
    maximum, kept for event batteries)."""
    if a >= b:
        raise ConfigError(f"need a < b, got a={a}, b={b}")
    g = as_generator(rng)
    X = np.full(n, float(x0))
    D = np.zeros(n, dtype=np.int64)
    phase = np.full(n, 1 if x0 > b else 0, dtype=np.int8)
    runmax = np.full(n, float(x0))
    chunk = _chunk_steps(n)
    out = []
    prev = 0
    for cp in _segments(checkpoints):
        steps = cp - prev
        while steps > 0:
            m = min(chunk, steps)
            Z = g.standard_normal((m, n))
            U = g.random((m, n))
            K.ladder_kernel(Z, U, X, D, phase, runmax, float(a), float(b), float(dt), float(drift))
            steps -= m
        out.append(
            {"t": cp * dt, "X": X.copy(), "D": D.copy(), "phase": phase.copy(), "S": runmax.copy()}
        )
        prev = cp
    return out


def levy_ensemble(n, dt, checkpoints, rng, pos_levels=(), neg_levels=(), signs=True):
    """Signed reflected-path ensemble started at 0 carrying exact-in-law
    (|X|, local time), per-excursion signs, grid running max/min of the
    signed path, and bridge-corrected survival flags against the given
    positive/negative excursion levels.

    Snapshot keys: ``t, absX, L, sign, X, S, I, alive_pos, alive_neg``."""
    g = as_generator(rng)
    _seed_kernel_rng(g)
    B = np.zeros(n)
    S = np.zeros(n)
    sign = np.ones(n)
    runmax = np.zeros(n)
    runmin = np.zeros(n)
    pos = np.asarray(pos_levels, dtype=float)
    neg = np.asarray(neg_levels, dtype=float)
    alive_pos = np.ones((n, len(pos)), dtype=np.bool_)
    alive_neg = np.ones((n, len(neg)), dtype=np.bool_)
    chunk = _chunk_steps(n)
    out = []
    prev = 0
    for cp in _segments(checkpoints):
        steps = cp - prev
        while steps > 0:
            m = min(chunk, steps)
            Z = g.standard_normal((m, n))
            U = g.random((m, n))
            K.levy_kernel(
                Z, U, B, S, sign, runmax, runmin, alive_pos, alive_neg, pos, neg, float(dt), signs
            )
            steps -= m
        absx = S - B
        out.append(
            {
                "t": cp * dt,
                "absX": absx,
                "L": S.copy(),
                "sign": sign.copy(),
                "X": sign * absx,
                "S": runmax.copy(),
                "I": np.maximum(-runmin, 0.0),
                "alive_pos": alive_pos.copy(),
                "alive_neg": alive_neg.copy(),
            }
        )
        prev = cp
    return out


def taboo_ensemble(
    n,
    s,
    i,
    dt,
    checkpoints,
    rng,
    y0=0.0,
    record_from=None,
    hist_bins=None,
    delta=None,
):
    """Two-sided taboo diffusion on (-i, s) with exact radial boundary-layer
    steps.  Snapshot keys: ``t, Y, S, I``.

    When ``record_from`` is given, the occupation histogram over
    ``hist_bins`` equal bins of (-i, s) and the per-path time average of
    1/((s - Y+)(i - Y-)) accumulate from that step on; they are returned in
    the final snapshot as ``hist`` (normalized density) and ``f_avg``."""
    if s <= 0 or i <= 0:
        raise ConfigError("taboo levels must be positive")
    g = as_generator(rng)
    _seed_kernel_rng(g)
    if delta is None:
        delta = 10.0 * math.sqrt(dt)
    delta = min(delta, s / 2.0, i / 2.0)
    Y = np.full(n, float(y0))
    runmax = np.full(n, float(y0))
    runmin = np.full(n, float(y0))
    nb = int(hist_bins) if hist_bins else 1
    hist = np.zeros(nb, dtype=np.int64)
    facc = np.zeros(n)
    hist_lo = -float(i)
    hist_dx = (s + i) / nb
    chunk = _chunk_steps(n)
    out = []
    prev = 0
    recorded_steps = 0
    for cp in _segments(checkpoints):
        steps_left = cp - prev
        pos = prev
        while steps_left > 0:
            m = min(chunk, steps_left)
            if record_from is not None and pos < record_from < pos + m:
                m = record_from - pos  # split the chunk at the recording start
            record = record_from is not None and pos >= record_from
            Z = g.standard_normal((m, n))
            K.taboo_kernel(
                Z, Y, runmax, runmin, float(s), float(i), float(dt), float(delta),
                record, hist, hist_lo, hist_dx, facc,
            )
            if record:
                recorded_steps += m
            steps_left -= m
            pos += m
        snap = {"t": cp * dt, "Y": Y.copy(), "S": runmax.copy(), "I": np.maximum(-runmin, 0.0)}
        out.append(snap)
        prev = cp
    if record_from is not None and recorded_steps > 0:
        total = recorded_steps * n
        out[-1]["hist"] = hist / (total * hist_dx)
        out[-1]["hist_edges"] = hist_lo + hist_dx * np.arange(nb + 1)
        out[-1]["f_avg"] = facc / recorded_steps
    return out


def bessel_hit_ensemble(n, r0, level, dt, n_steps, rng, coarse_dt=None, coarse_steps=0):
    """Bessel(3) ensemble from ``r0`` with first-hit detection of ``level``.

    Radial moves are exact (3-D Gaussian norms); crossings inside a step use
    the bridge probability.  An optional coarse continuation extends the
    horizon cheaply for tail coverage.  Returns ``hit`` flags, continuous
    ``hit_time`` (nan if none), and the final radius."""
    if r0 < 0:
        raise ConfigError("r0 must be nonnegative")
    g = as_generator(rng)
    _seed_kernel_rng(g)
    hit_time = np.full(n, np.nan)
    R_final = np.full(n, float(r0))

    def _phase(act_idx, R_act, step_dt, steps, t_offset):
        """Advance active paths, compacting out absorbed ones between
        chunks; returns the surviving index set and radii."""
        done = 0
        while done < steps and len(act_idx):
            chunk = _chunk_steps(len(act_idx))
            m = min(chunk, steps - done)
            n_act = len(act_idx)
            Z = g.standard_normal((m, n_act))
            U = g.random((m, n_act))
            hit_act = np.zeros(n_act, dtype=np.bool_)
            hit_step = np.full(n_act, -1, dtype=np.int64)
            K.bessel_hit_kernel(Z, U, R_act, hit_act, hit_step, float(step_dt), float(level), done)
            if hit_act.any():
                idx = act_idx[hit_act]
                hit_time[idx] = t_offset + hit_step[hit_act] * step_dt
                R_final[idx] = level
                keep = ~hit_act
                act_idx = act_idx[keep]
                R_act = R_act[keep]
            done += m
        return act_idx, R_act

    act_idx = np.arange(n)
    R_act = np.full(n, float(r0))
    act_idx, R_act = _phase(act_idx, R_act, dt, int(n_steps), 0.0)
    if coarse_steps:
        act_idx, R_act = _phase(act_idx, R_act, coarse_dt, int(coarse_steps), n_steps * dt)
    R_final[act_idx] = R_act
    return {"hit": ~np.isnan(hit_time), "hit_time": hit_time, "R": R_final}
