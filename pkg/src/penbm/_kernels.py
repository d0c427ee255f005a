"""Compiled inner loops for the streaming path ensembles.

Each kernel advances per-path state over a chunk of steps whose Gaussian
increments (``Z``) and bridge uniforms (``U``) are pre-drawn from the
experiment's Philox stream.  Rare-event branches (excursion sign renewals,
exact radial steps inside boundary layers) draw from numba's internal
generator, seeded once per simulation via :func:`seed_inkernel`, so runs
stay bit-reproducible for a fixed (seed, stream_id).
"""

import math

import numpy as np
from numba import njit

__all__ = [
    "seed_inkernel",
    "bm_bridge_max_kernel",
    "ladder_kernel",
    "levy_kernel",
    "taboo_kernel",
    "bessel_hit_kernel",
]


@njit(cache=True)
def seed_inkernel(seed):
    np.random.seed(seed)


@njit(cache=True, fastmath=True)
def bm_bridge_max_kernel(Z, U, X, S, Sgrid, drift, dt):
    """Brownian step plus per-interval bridge-maximum accumulation, so the
    running maximum S is exact in law jointly with the endpoint skeleton.
    Sgrid keeps the plain grid running maximum for estimators that must
    stay comparable across simulation routes."""
    m_steps, n = Z.shape
    sq = math.sqrt(dt)
    for k in range(m_steps):
        for p in range(n):
            x0 = X[p]
            x1 = x0 + drift * dt + sq * Z[k, p]
            d = x1 - x0
            top = 0.5 * (x0 + x1 + math.sqrt(d * d - 2.0 * dt * math.log(U[k, p])))
            if top > S[p]:
                S[p] = top
            if x1 > Sgrid[p]:
                Sgrid[p] = x1
            X[p] = x1


@njit(cache=True, fastmath=True)
def ladder_kernel(Z, U, X, D, phase, runmax, a, b, dt, drift):
    """Alternating down-crossing ladder with bridge-corrected detection of
    both thresholds.  phase 0 = waiting for an excess of b, 1 = waiting for
    the return below a (each completed return increments D)."""
    m_steps, n = Z.shape
    sq = math.sqrt(dt)
    for k in range(m_steps):
        for p in range(n):
            x0 = X[p]
            x1 = x0 + drift * dt + sq * Z[k, p]
            if phase[p] == 0:
                crossed = x1 > b
                if (not crossed) and x0 < b:
                    crossed = U[k, p] < math.exp(-2.0 * (b - x0) * (b - x1) / dt)
                if crossed:
                    phase[p] = 1
            else:
                crossed = x1 < a
                if (not crossed) and x0 > a:
                    crossed = U[k, p] < math.exp(-2.0 * (x0 - a) * (x1 - a) / dt)
                if crossed:
                    phase[p] = 0
                    D[p] += 1
            X[p] = x1
            if x1 > runmax[p]:
                runmax[p] = x1


@njit(cache=True, fastmath=True)
def levy_kernel(
    Z,
    U,
    B,
    S,
    sign,
    runmax,
    runmin,
    alive_pos,
    alive_neg,
    levels_pos,
    levels_neg,
    dt,
    use_signs,
):
    """Reflected-path construction: auxiliary Brownian motion B with
    bridge-maximum S; (S - B, S) is exact in law as (|X|, local time).

    Excursion signs renew (fair coin) whenever S increases within an
    interval, i.e. whenever |X| returned to 0.  Level crossings of |X| are
    detected with the bridge probability and booked against the side given
    by the current excursion sign; renewal intervals skip the check since
    |X| reaching a level away from 0 within one dt of a zero is negligible.
    """
    m_steps, n = Z.shape
    sq = math.sqrt(dt)
    kp = len(levels_pos)
    kn = len(levels_neg)
    for k in range(m_steps):
        for p in range(n):
            b0 = B[p]
            b1 = b0 + sq * Z[k, p]
            d = b1 - b0
            top = 0.5 * (b0 + b1 + math.sqrt(d * d - 2.0 * dt * math.log(U[k, p])))
            s_old = S[p]
            v0 = s_old - b0
            renew = top > s_old
            s_new = top if renew else s_old
            v1 = s_new - b1
            if renew:
                if use_signs and np.random.random() < 0.5:
                    sign[p] = -sign[p]
            else:
                sg = sign[p]
                if sg > 0:
                    for j in range(kp):
                        if alive_pos[p, j]:
                            lvl = levels_pos[j]
                            dead = v1 >= lvl
                            if (not dead) and v0 < lvl:
                                dead = np.random.random() < math.exp(
                                    -2.0 * (lvl - v0) * (lvl - v1) / dt
                                )
                            if dead:
                                alive_pos[p, j] = False
                else:
                    for j in range(kn):
                        if alive_neg[p, j]:
                            lvl = levels_neg[j]
                            dead = v1 >= lvl
                            if (not dead) and v0 < lvl:
                                dead = np.random.random() < math.exp(
                                    -2.0 * (lvl - v0) * (lvl - v1) / dt
                                )
                            if dead:
                                alive_neg[p, j] = False
            B[p] = b1
            S[p] = s_new
            sv = sign[p] * v1
            if sv > runmax[p]:
                runmax[p] = sv
            if sv < runmin[p]:
                runmin[p] = sv


@njit(cache=True, fastmath=True)
def taboo_kernel(Z, Y, runmax, runmin, s, i, dt, delta, record, hist, hist_lo, hist_dx, facc):
    """Euler step for the two-sided taboo diffusion confined to (-i, s),
    with exact radial (3-D norm) steps inside boundary layers of width
    ``delta`` where the distance to the wall is a Bessel(3) process.

    When ``record`` is set, accumulates the occupation histogram of Y and
    the per-path running sum of 1 / ((s - Y+)(i - Y-))."""
    m_steps, n = Z.shape
    sq = math.sqrt(dt)
    nb = len(hist)
    for k in range(m_steps):
        for p in range(n):
            y = Y[p]
            r_hi = s - y
            r_lo = y + i
            if r_hi < delta:
                # exact radial step; the two transverse squares are 2*Exp(1)*dt
                e2 = -2.0 * math.log(np.random.random())
                a1 = r_hi + sq * Z[k, p]
                y = s - math.sqrt(a1 * a1 + dt * e2)
            elif r_lo < delta:
                e2 = -2.0 * math.log(np.random.random())
                a1 = r_lo + sq * Z[k, p]
                y = math.sqrt(a1 * a1 + dt * e2) - i
            else:
                if y > 0.0:
                    dr = -1.0 / r_hi
                elif y < 0.0:
                    dr = 1.0 / r_lo
                else:
                    dr = 0.0
                y = y + dr * dt + sq * Z[k, p]
                if y >= s:
                    y = s - 1e-9
                elif y <= -i:
                    y = -i + 1e-9
            Y[p] = y
            if y > runmax[p]:
                runmax[p] = y
            if y < runmin[p]:
                runmin[p] = y
            if record:
                idx = int((y - hist_lo) / hist_dx)
                if 0 <= idx < nb:
                    hist[idx] += 1
                yp = y if y > 0.0 else 0.0
                ym = -y if y < 0.0 else 0.0
                facc[p] += 1.0 / ((s - yp) * (i - ym))


@njit(cache=True, fastmath=True)
def bessel_hit_kernel(Z, U, R, hit, hit_step, dt, level, step0):
    """Exact radial steps (norm of a 3-D Gaussian move) for a Bessel(3)
    path, with bridge-corrected first-hit detection of ``level`` from above.
    Hit paths are absorbed at the level."""
    m_steps, n = Z.shape
    sq = math.sqrt(dt)
    for k in range(m_steps):
        for p in range(n):
            if hit[p]:
                continue
            r = R[p]
            e2 = -2.0 * math.log(np.random.random())
            a1 = r + sq * Z[k, p]
            r1 = math.sqrt(a1 * a1 + dt * e2)
            crossed = r1 <= level
            if (not crossed) and r > level:
                crossed = U[k, p] < math.exp(-2.0 * (r - level) * (r1 - level) / dt)
            if crossed:
                hit[p] = True
                hit_step[p] = step0 + k + 1
                R[p] = level
            else:
                R[p] = r1
