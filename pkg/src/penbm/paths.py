"""Discretized Brownian paths and their running functionals.

Single-path operations live here: Brownian and Bessel(3) generation, the
running maximum/minimum/bilateral maximum, occupation-band and exact-in-law
local time, the alternating down-crossing ladder, and hitting times with an
optional Brownian-bridge correction for crossings between grid points.

Ensemble (vectorized, streaming) counterparts used by the verification
suites are in :mod:`penbm.ensembles`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigError
from .rng import as_generator

__all__ = [
    "TimeGrid",
    "BrownPath",
    "RunningFunctionals",
    "LevyPath",
    "gen_bm",
    "track_functionals",
    "estimate_local_time",
    "gen_levy_local_time",
    "hitting_time",
    "gen_bessel3",
    "bridge_max_sample",
    "bridge_crossing_prob",
]

UP_LEG = 0  # waiting for the next excess of the upper level b
DOWN_LEG = 1  # upper level reached; waiting for the return below a


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t0 + k*dt, k = 0..n_steps."""

    t0: float
    dt: float
    n_steps: int

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 0:
            raise ConfigError(f"n_steps must be >= 0, got {self.n_steps}")
        if self.t0 < 0:
            raise ConfigError(f"t0 must be >= 0, got {self.t0}")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)

    @property
    def horizon(self) -> float:
        return self.t0 + self.dt * self.n_steps


@dataclass(frozen=True)
class BrownPath:
    """One trajectory on a grid, with its origin and drift metadata."""

    grid: TimeGrid
    values: np.ndarray
    x0: float
    drift: float = 0.0

    def __post_init__(self):
        if len(self.values) != self.grid.n_steps + 1:
            raise ConfigError("values length must be n_steps + 1")
        if self.values[0] != self.x0:
            raise ConfigError("values[0] must equal x0")


@dataclass
class RunningFunctionals:
    """Per-grid-point running values of the path functionals.

    ``S`` is the running maximum, ``I`` the running maximum of the negative
    part, ``Xstar = max(S, I)`` the bilateral maximum, ``L`` the estimated
    local time at 0, ``D`` the completed down-crossing count, ``sigma`` the
    detected ladder times and ``phase`` the per-point leg flag (UP_LEG while
    the upper level has not been re-reached since the last completed
    crossing, DOWN_LEG afterwards)."""

    S: np.ndarray
    I: np.ndarray
    Xstar: np.ndarray
    L: np.ndarray
    D: np.ndarray
    sigma: list = field(default_factory=list)
    phase: np.ndarray | None = None


class LevyPath(NamedTuple):
    """Reflected-path construction carrying an exact-in-law local time."""

    abs_values: np.ndarray
    local_time: np.ndarray
    signed_values: Optional[np.ndarray]


# ---------------------------------------------------------------------------
# Brownian-bridge helpers (exact conditional laws within one grid interval)
# ---------------------------------------------------------------------------

def bridge_max_sample(x0, x1, dt, u):
    """Draw of the interval maximum of a Brownian bridge from x0 to x1 over
    one step of length dt, via inverse CDF with uniform u."""
    d = x1 - x0
    return 0.5 * (x0 + x1 + np.sqrt(d * d - 2.0 * dt * np.log(u)))


def bridge_crossing_prob(x0, x1, level, dt):
    """Probability that the bridge from x0 to x1 crosses ``level`` inside the
    interval when both endpoints are on the same side."""
    return np.exp(-2.0 * (level - x0) * (level - x1) / dt)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def gen_bm(x0: float, drift: float, grid: TimeGrid, rng) -> BrownPath:
    """Brownian motion with drift on the grid: exact Gaussian increments."""
    g = as_generator(rng)
    values = np.empty(grid.n_steps + 1)
    values[0] = x0
    if grid.n_steps:
        incr = drift * grid.dt + math.sqrt(grid.dt) * g.standard_normal(grid.n_steps)
        np.cumsum(incr, out=values[1:])
        values[1:] += x0
    return BrownPath(grid, values, x0, drift)


def gen_bessel3(r0: float, grid: TimeGrid, rng) -> BrownPath:
    """Bessel(3) path: the norm of a 3-D Brownian motion started at
    (r0, 0, 0).  Exact in law at grid points; never touches the singular
    drift at 0."""
    if r0 < 0:
        raise ConfigError(f"r0 must be >= 0, got {r0}")
    g = as_generator(rng)
    w = math.sqrt(grid.dt) * g.standard_normal((grid.n_steps, 3))
    coords = np.vstack([[r0, 0.0, 0.0], w]).cumsum(axis=0)
    values = np.linalg.norm(coords, axis=1)
    values[0] = r0
    return BrownPath(grid, values, r0, 0.0)


# ---------------------------------------------------------------------------
# Local time
# ---------------------------------------------------------------------------

def estimate_local_time(path: BrownPath, eps: float) -> np.ndarray:
    """Occupation-band estimator: L[k] = (dt / 2 eps) * #{j <= k : |X_j| < eps}.

    Bias is O(sqrt(dt)) with the default eps = sqrt(dt); the exact-in-law
    reference is :func:`gen_levy_local_time`."""
    if eps <= 0:
        raise ConfigError(f"eps must be positive, got {eps}")
    inside = np.abs(path.values) < eps
    return (path.grid.dt / (2.0 * eps)) * np.cumsum(inside)


def gen_levy_local_time(grid: TimeGrid, rng, sign_flips: bool = True) -> LevyPath:
    """Exact-in-law (|X|, L) via the reflection identity: for an auxiliary
    Brownian motion B with running maximum S, the pair (S - B, S) has the
    law of (|X|, L).  S accumulates per-interval bridge maxima so that the
    grid skeleton of (|X|, L) is exact, not just the grid max of B.

    With ``sign_flips`` set, excursion intervals (maximal grid runs between
    increases of S, i.e. between returns of |X| to 0) receive i.i.d. fair
    signs, giving a signed path whose sign-symmetric functionals keep the
    exact joint law."""
    g = as_generator(rng)
    n = grid.n_steps
    b = np.empty(n + 1)
    b[0] = 0.0
    if n:
        np.cumsum(math.sqrt(grid.dt) * g.standard_normal(n), out=b[1:])
    s = np.empty(n + 1)
    s[0] = 0.0
    if n:
        m = bridge_max_sample(b[:-1], b[1:], grid.dt, g.random(n))
        np.maximum.accumulate(np.maximum(m, 0.0), out=s[1:])
        s[1:] = np.maximum(s[1:], 0.0)
    abs_vals = s - b
    local = s.copy()
    signed = None
    if sign_flips:
        # new excursion wherever S increased within the preceding interval
        renew = np.empty(n + 1, dtype=bool)
        renew[0] = True
        renew[1:] = s[1:] > s[:-1]
        flips = np.where(renew, g.choice([-1.0, 1.0], size=n + 1), 1.0)
        signs = np.where(renew, flips, 1.0)
        # carry the last renewed sign forward
        idx = np.maximum.accumulate(np.where(renew, np.arange(n + 1), 0))
        signed = signs[idx] * abs_vals
    return LevyPath(abs_vals, local, signed)


# ---------------------------------------------------------------------------
# Hitting times
# ---------------------------------------------------------------------------

def hitting_time(path: BrownPath, level: float, bridge: bool = False, rng=None):
    """First grid time with a detected crossing of ``level``; None if absent.

    Endpoint sign changes always count.  With ``bridge`` set, intervals with
    both endpoints on one side additionally declare a crossing with the
    Brownian-bridge probability exp(-2 d0 d1 / dt); this removes the
    O(sqrt(dt)) systematic under-count."""
    v = path.values
    if v[0] == level:
        return path.grid.times[0]
    d = v - level
    crossed = d[:-1] * d[1:] <= 0.0
    if bridge:
        if rng is None:
            raise ConfigError("bridge crossing detection needs an rng")
        g = as_generator(rng)
        same_side = ~crossed
        p = bridge_crossing_prob(v[:-1][same_side], v[1:][same_side], level, path.grid.dt)
        crossed[same_side] = g.random(same_side.sum()) < p
    hits = np.flatnonzero(crossed)
    if len(hits) == 0:
        return None
    return path.grid.times[hits[0] + 1]


# ---------------------------------------------------------------------------
# Running functionals and the down-crossing ladder
# ---------------------------------------------------------------------------

def track_functionals(
    path: BrownPath,
    a: float | None = None,
    b: float | None = None,
    lt_eps: float | None = None,
    bridge: bool = False,
    rng=None,
) -> RunningFunctionals:
    """Compute all running functionals along a path.

    Down-crossing tracking (the alternating ladder: first excess of b, then
    first return below a, and so on) is performed when levels ``a < b`` are
    given.  ``lt_eps`` defaults to sqrt(dt).  With ``bridge`` set, ladder
    crossings between grid points are detected with the bridge probability
    (requires ``rng``)."""
    v = path.values
    dt = path.grid.dt
    S = np.maximum.accumulate(v)
    I = np.maximum.accumulate(np.maximum(-v, 0.0))
    Xstar = np.maximum(S, I)
    L = estimate_local_time(path, math.sqrt(dt) if lt_eps is None else lt_eps)
    n = path.grid.n_steps
    D = np.zeros(n + 1, dtype=np.int64)
    sigma: list = []
    phase = None

    if (a is None) != (b is None):
        raise ConfigError("down-crossing tracking needs both levels a and b")
    if a is not None:
        if a >= b:
            raise ConfigError(f"down-crossing levels need a < b, got a={a}, b={b}")
        if bridge and rng is None:
            raise ConfigError("bridge crossing detection needs an rng")
        g = as_generator(rng) if bridge else None
        phase = np.zeros(n + 1, dtype=np.int8)
        leg = DOWN_LEG if v[0] > b else UP_LEG
        phase[0] = leg
        d = 0
        times = path.grid.times
        for k in range(n):
            x0, x1 = v[k], v[k + 1]
            if leg == UP_LEG:
                hit = x1 > b
                if not hit and bridge and x0 < b:
                    hit = g.random() < bridge_crossing_prob(x0, x1, b, dt)
                if hit:
                    leg = DOWN_LEG
                    sigma.append(times[k + 1])
            else:
                hit = x1 < a
                if not hit and bridge and x0 > a:
                    hit = g.random() < bridge_crossing_prob(x0, x1, a, dt)
                if hit:
                    leg = UP_LEG
                    d += 1
                    sigma.append(times[k + 1])
            D[k + 1] = d
            phase[k + 1] = leg

    return RunningFunctionals(S=S, I=I, Xstar=Xstar, L=L, D=D, sigma=sigma, phase=phase)
