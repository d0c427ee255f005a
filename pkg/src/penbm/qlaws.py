"""Samplers for the limiting laws of the five penalized families.

Three independent routes produce samples of the limit law for each family:

* route A (``direct``)   — explicit path-decomposition constructions: a
  drawn terminal value, a conditioned pre-segment (Brownian motion up to a
  hitting / inverse-local-time / ladder time), and a transient escape
  segment built from exact Bessel(3) radial moves (or the coth-drift
  process for the exponential family, and the two-sided taboo diffusion
  for the atomic family);
* route B (``sde``)      — Euler simulation of dX = dW + J dt with the
  family's exponential-martingale drift J, functionals tracked on the fly;
* route C (``weighted``) — plain Wiener paths reweighted by M_t / M_0 with
  self-normalized averaging.

Vectorized ensemble versions (``mc_route_a/b/c``) back the verification
suites; the ``sample_q_*`` functions wrap them for single-sample use and
return full :class:`QSample` trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ensembles import bm_max_ensemble, ladder_ensemble, levy_ensemble, taboo_ensemble
from .errors import ConfigError
from .martingales import (
    m_downcross,
    m_kennedy,
    m_nu,
    m_phi,
    m_signed_local,
    m0_downcross,
    j_downcross,
    j_kennedy,
    j_phi,
    j_signed_local,
)
from .paths import UP_LEG, DOWN_LEG
from .rng import as_generator
from .weights import AtomMeasure, DensityPhi, GSequence, KennedyPsi, SignWeights

__all__ = [
    "TabooParams",
    "Terminals",
    "QSample",
    "sample_q_phi_direct",
    "sample_q_kennedy_direct",
    "sample_q_signed_direct",
    "sample_q_taboo",
    "sample_q_downcross_direct",
    "sample_q_sde",
    "sample_weighted",
    "terminal_law_oracle",
    "mc_route_a",
    "mc_route_b",
    "mc_route_c",
    "FAMILIES",
]

FAMILIES = ("phi", "kennedy", "signs", "nu", "downcross")

_M_FLOOR = 1e-12  # numerical-absorption guard for the SDE route


@dataclass(frozen=True)
class TabooParams:
    """Confinement levels of the two-sided taboo diffusion."""

    s: float
    i: float

    def __post_init__(self):
        if self.s <= 0 or self.i <= 0:
            raise ConfigError("taboo levels must be positive")


@dataclass
class Terminals:
    """Terminal record of a limit-law sample; None marks a quantity that is
    not applicable for the family, inf one that is genuinely infinite."""

    s_inf: Optional[float] = None
    i_inf: Optional[float] = None
    xstar_inf: Optional[float] = None
    l_inf: Optional[float] = None
    d_inf: Optional[int] = None
    g: Optional[float] = None
    g_bar: Optional[float] = None


@dataclass
class QSample:
    """One limit-law trajectory with its terminal record."""

    times: np.ndarray
    values: np.ndarray
    terminals: Terminals = field(default_factory=Terminals)
    route: str = "direct"
    weight: float = 1.0
    valid: bool = True
    family: str = ""


# ---------------------------------------------------------------------------
# Vectorized route A constructions
# ---------------------------------------------------------------------------

def _bridge_cross(x0, x1, level, dt, u):
    """Vectorized crossing indicator for per-path levels."""
    below = (level - x0 > 0) & (level - x1 > 0)
    p = np.where(below, np.exp(-2.0 * np.maximum(level - x0, 0) * np.maximum(level - x1, 0) / dt), 1.0)
    return (x1 >= level) | (u < p)


def _bessel_step(r, z, e2, dt):
    """Exact Bessel(3) radial move: |r e + sqrt(dt) N_3| with the transverse
    squares drawn as 2 dt Exp(1)."""
    a = r + math.sqrt(dt) * z
    return np.sqrt(a * a + dt * e2)


def _route_a_phi(n, phi: DensityPhi, x0, dt, checkpoints, rng, record_path=False):
    g = as_generator(rng)
    y = phi.sample_max_terminal(n, x0, g)
    X = np.full(n, float(x0))
    S = np.full(n, float(x0))
    R = np.zeros(n)
    post = np.zeros(n, dtype=bool)
    g_time = np.full(n, np.nan)
    sq = math.sqrt(dt)
    cps = sorted(int(c) for c in checkpoints)
    last = cps[-1] if cps else 0
    snaps = []
    path = np.empty((n, last + 1)) if record_path else None
    if record_path:
        path[:, 0] = X
    for k in range(last):
        z = g.standard_normal(n)
        pre = ~post
        hot = post.copy()  # paths already past the hit move on the arc
        if pre.any():
            x1 = X[pre] + sq * z[pre]
            u = g.random(pre.sum())
            crossed = _bridge_cross(X[pre], x1, y[pre], dt, u)
            X[pre] = np.where(crossed, y[pre], x1)
            idx = np.flatnonzero(pre)[crossed]
            post[idx] = True
            R[idx] = 0.0
            g_time[idx] = (k + 1) * dt
        if hot.any():
            e2 = -2.0 * np.log(g.random(hot.sum()))
            R[hot] = _bessel_step(R[hot], z[hot], e2, dt)
            X[hot] = y[hot] - R[hot]
        np.maximum(S, X, out=S)
        if record_path:
            path[:, k + 1] = X
        if (k + 1) in cps:
            snaps.append({"t": (k + 1) * dt, "X": X.copy(), "S": S.copy()})
    terminals = {"s_inf": y, "g": g_time}
    return snaps, terminals, path


def _route_a_kennedy(n, ken: KennedyPsi, dt, checkpoints, rng, record_path=False):
    g = as_generator(rng)
    lam = ken.lam
    y = ken.sample_max_terminal(n, g)
    X = np.zeros(n)
    S = np.zeros(n)
    R = np.zeros(n)
    post = np.zeros(n, dtype=bool)
    g_time = np.full(n, np.nan)
    sq = math.sqrt(dt)
    delta = 10.0 * sq
    cps = sorted(int(c) for c in checkpoints)
    last = cps[-1] if cps else 0
    snaps = []
    path = np.empty((n, last + 1)) if record_path else None
    if record_path:
        path[:, 0] = X
    for k in range(last):
        z = g.standard_normal(n)
        pre = ~post
        hot = post.copy()
        if pre.any():
            x1 = X[pre] + lam * dt + sq * z[pre]
            u = g.random(pre.sum())
            crossed = _bridge_cross(X[pre], x1, y[pre], dt, u)
            X[pre] = np.where(crossed, y[pre], x1)
            idx = np.flatnonzero(pre)[crossed]
            post[idx] = True
            R[idx] = 0.0
            g_time[idx] = (k + 1) * dt
        if hot.any():
            r = R[hot]
            zh = z[hot]
            lay = r < delta
            r1 = np.empty_like(r)
            if lay.any():
                e2 = -2.0 * np.log(g.random(lay.sum()))
                r1[lay] = _bessel_step(r[lay], zh[lay], e2, dt)
            if (~lay).any():
                rr = r[~lay]
                r1[~lay] = rr + lam / np.tanh(lam * rr) * dt + sq * zh[~lay]
            R[hot] = r1
            X[hot] = y[hot] - r1
        np.maximum(S, X, out=S)
        if record_path:
            path[:, k + 1] = X
        if (k + 1) in cps:
            snaps.append({"t": (k + 1) * dt, "X": X.copy(), "S": S.copy()})
    return snaps, {"s_inf": y, "g": g_time}, path


def _route_a_signed(n, w: SignWeights, dt, checkpoints, rng, record_path=False):
    g = as_generator(rng)
    l_target = w.sample_local_time_terminal(n, g)
    final_sign = np.where(g.random(n) < w.sign_probability_plus(l_target), 1.0, -1.0)
    B = np.zeros(n)
    SB = np.zeros(n)
    sign = np.ones(n)
    X = np.zeros(n)
    S = np.zeros(n)
    R = np.zeros(n)
    post = np.zeros(n, dtype=bool)
    g_time = np.full(n, np.nan)
    sq = math.sqrt(dt)
    cps = sorted(int(c) for c in checkpoints)
    last = cps[-1] if cps else 0
    snaps = []
    path = np.empty((n, last + 1)) if record_path else None
    if record_path:
        path[:, 0] = X
    for k in range(last):
        z = g.standard_normal(n)
        pre = ~post
        hot = post.copy()
        if pre.any():
            b0 = B[pre]
            b1 = b0 + sq * z[pre]
            u = g.random(pre.sum())
            d = b1 - b0
            top = 0.5 * (b0 + b1 + np.sqrt(d * d - 2.0 * dt * np.log(u)))
            s_old = SB[pre]
            renew = top > s_old
            s_new = np.where(renew, top, s_old)
            # renewal = |X| returned to 0; flip a fair coin for the new leg
            coin = np.where(g.random(pre.sum()) < 0.5, -1.0, 1.0)
            sign[pre] = np.where(renew, sign[pre] * coin, sign[pre])
            B[pre] = b1
            SB[pre] = s_new
            X[pre] = sign[pre] * (s_new - b1)
            done = s_new >= l_target[pre]
            idx = np.flatnonzero(pre)[done]
            post[idx] = True
            X[idx] = 0.0
            R[idx] = 0.0
            g_time[idx] = (k + 1) * dt
        if hot.any():
            e2 = -2.0 * np.log(g.random(hot.sum()))
            R[hot] = _bessel_step(R[hot], z[hot], e2, dt)
            X[hot] = final_sign[hot] * R[hot]
        np.maximum(S, X, out=S)
        if record_path:
            path[:, k + 1] = X
        if (k + 1) in cps:
            snaps.append({"t": (k + 1) * dt, "X": X.copy(), "S": S.copy()})
    return snaps, {"l_inf": l_target, "g": g_time, "final_sign": final_sign}, path


def _route_a_nu(n, nu: AtomMeasure, dt, checkpoints, rng, record_path=False):
    """Atomic-family limit law as the taboo mixture: draw an atom, run the
    taboo diffusion confined to (-b_j, a_j)."""
    g = as_generator(rng)
    which = nu.sample_index(n, g)
    cps = sorted(int(c) for c in checkpoints)
    last = cps[-1] if cps else 0
    snaps = [{"t": c * dt, "X": np.empty(n), "S": np.empty(n)} for c in cps]
    path = np.empty((n, last + 1)) if record_path else None
    for j in range(nu.n_atoms):
        sel = np.flatnonzero(which == j)
        if not len(sel):
            continue
        sub = taboo_ensemble(len(sel), nu.a[j], nu.b[j], dt, cps, g)
        for snap, out in zip(sub, snaps):
            out["X"][sel] = snap["Y"]
            out["S"][sel] = snap["S"]
        if record_path:
            # per-sample paths re-simulated only on request (small n)
            raise ConfigError("record_path is not supported for the atomic mixture route")
    terminals = {"s_inf": nu.a[which], "i_inf": nu.b[which], "l_inf": np.full(n, np.inf)}
    return snaps, terminals, path


def _route_a_downcross(
    n, G: GSequence, a, b, dt, checkpoints, rng, record_path=False, resolve_gbar_horizon=0.0
):
    g = as_generator(rng)
    n_target = G.sample(n, g)
    X = np.zeros(n)
    S = np.zeros(n)
    D = np.zeros(n, dtype=np.int64)
    armed_b = np.ones(n, dtype=bool)  # ladder state on the pre-g segment
    stage = np.zeros(n, dtype=np.int8)  # 0 = ladder, 1 = receding arc, 2 = escape
    R = np.zeros(n)
    g_time = np.full(n, np.nan)
    gbar_time = np.full(n, np.nan)
    # paths with zero target crossings start the receding arc immediately
    start_now = n_target == 0
    stage[start_now] = 1
    R[start_now] = 2 * b - a - 0.0
    g_time[start_now] = 0.0
    sq = math.sqrt(dt)
    level = b - a
    cps = sorted(int(c) for c in checkpoints)
    last = cps[-1] if cps else 0
    snaps = []
    path = np.empty((n, last + 1)) if record_path else None
    if record_path:
        path[:, 0] = X
    for k in range(last):
        z = g.standard_normal(n)
        u = g.random(n)
        esc = stage == 2  # escape paths present before this step
        arc = stage == 1
        lad = stage == 0
        if lad.any():
            x0 = X[lad]
            x1 = x0 + sq * z[lad]
            ub = u[lad]
            armed = armed_b[lad]
            cross_b = armed & _bridge_cross(x0, x1, np.full(x0.shape, float(b)), dt, ub)
            cross_a = (~armed) & _bridge_cross(-x0, -x1, np.full(x0.shape, float(-a)), dt, ub)
            armed_new = np.where(cross_b, False, np.where(cross_a, True, armed))
            d_new = D[lad] + cross_a
            X[lad] = x1
            D[lad] = d_new
            armed_b[lad] = armed_new
            finish = cross_a & (d_new == n_target[lad])
            idx = np.flatnonzero(lad)[finish]
            if len(idx):
                stage[idx] = 1
                X[idx] = a
                R[idx] = 2 * (b - a)
                g_time[idx] = (k + 1) * dt
        if arc.any():
            e2 = -2.0 * np.log(g.random(arc.sum()))
            r0 = R[arc]
            r1 = _bessel_step(r0, z[arc], e2, dt)
            hit = (r1 <= level) | (
                u[arc] < np.exp(-2.0 * np.maximum(r0 - level, 0) * np.maximum(r1 - level, 0) / dt)
            )
            r1 = np.where(hit, level, r1)
            R[arc] = r1
            X[arc] = 2 * b - a - r1
            idx = np.flatnonzero(arc)[hit]
            if len(idx):
                stage[idx] = 2
                X[idx] = b
                gbar_time[idx] = (k + 1) * dt
        if esc.any():
            e2 = -2.0 * np.log(g.random(esc.sum()))
            R[esc] = _bessel_step(R[esc], z[esc], e2, dt)
            X[esc] = a + R[esc]
        np.maximum(S, X, out=S)
        if record_path:
            path[:, k + 1] = X
        if (k + 1) in cps:
            snaps.append(
                {"t": (k + 1) * dt, "X": X.copy(), "S": S.copy(), "D": D.copy(), "stage": stage.copy()}
            )
    if resolve_gbar_horizon and last * dt < resolve_gbar_horizon:
        # continue undecided receding arcs with coarse exact radial steps
        arc_idx = np.flatnonzero(stage == 1)
        if len(arc_idx):
            r = R[arc_idx].copy()
            cdt = 2 ** -3
            steps = int((resolve_gbar_horizon - last * dt) / cdt)
            alive = np.ones(len(arc_idx), dtype=bool)
            for kk in range(steps):
                if not alive.any():
                    break
                m = alive.sum()
                z = g.standard_normal(m)
                e2 = -2.0 * np.log(g.random(m))
                r0 = r[alive]
                r1 = _bessel_step(r0, z, e2, cdt)
                pcr = np.exp(-2.0 * np.maximum(r0 - level, 0) * np.maximum(r1 - level, 0) / cdt)
                hit = (r1 <= level) | (g.random(m) < pcr)
                sub = np.flatnonzero(alive)
                gbar_time[arc_idx[sub[hit]]] = last * dt + (kk + 1) * cdt
                r[alive] = r1
                alive[sub[hit]] = False
    terminals = {"d_inf": n_target, "g": g_time, "g_bar": gbar_time}
    return snaps, terminals, path


def mc_route_a(family, spec, n, dt, checkpoints, rng, x0=0.0, a=0.0, b=1.0, record_path=False, **kw):
    """Vectorized direct-construction ensemble; returns (snapshots,
    terminals, paths-or-None).  Snapshot keys always include X and the grid
    running maximum S."""
    if family == "phi":
        return _route_a_phi(n, spec, x0, dt, checkpoints, rng, record_path)
    if family == "kennedy":
        return _route_a_kennedy(n, spec, dt, checkpoints, rng, record_path)
    if family == "signs":
        return _route_a_signed(n, spec, dt, checkpoints, rng, record_path)
    if family == "nu":
        return _route_a_nu(n, spec, dt, checkpoints, rng, record_path)
    if family == "downcross":
        return _route_a_downcross(n, spec, a, b, dt, checkpoints, rng, record_path, **kw)
    raise ConfigError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# Route B: Euler SDE with the Girsanov drift
# ---------------------------------------------------------------------------

def mc_route_b(family, spec, n, dt, checkpoints, rng, x0=0.0, a=0.0, b=1.0):
    """Euler ensemble of dX = dW + J dt with the family's drift, running
    functionals tracked on the fly (occupation-band local time, grid
    extrema, bridged ladder).  Returns (snapshots, absorbed mask)."""
    g = as_generator(rng)
    sq = math.sqrt(dt)
    eps = sq  # local-time band
    X = np.full(n, float(x0))
    S = np.full(n, float(x0))
    I = np.full(n, max(-x0, 0.0))
    L = np.zeros(n)
    D = np.zeros(n, dtype=np.int64)
    phase = np.full(n, DOWN_LEG if x0 > b else UP_LEG, dtype=np.int8)
    absorbed = np.zeros(n, dtype=bool)
    drift_cap = 0.2 / sq
    cps = sorted(int(c) for c in checkpoints)
    last = cps[-1] if cps else 0
    snaps = []
    for k in range(last):
        if family == "phi":
            J = j_phi(np.maximum(S, X), X, spec)
        elif family == "kennedy":
            J = j_kennedy(np.maximum(S, X), X, spec)
        elif family == "signs":
            J = j_signed_local(X, L, spec)
        elif family == "nu":
            J = _j_nu_masked(X, S, I, L, spec)
        elif family == "downcross":
            J = j_downcross(X, D, phase, spec, a, b)
        else:
            raise ConfigError(f"unknown family {family!r}")
        J = np.clip(J, -drift_cap, drift_cap)
        z = g.standard_normal(n)
        x_new = X + J * dt + sq * z
        if family == "nu":
            # exact radial move inside the boundary layer of the binding atom
            x_new = _nu_boundary_fix(X, x_new, z, S, I, L, spec, dt, g)
        x_new = np.where(absorbed, X, x_new)
        if family == "downcross":
            u = g.random(n)
            up = phase == UP_LEG
            cb = up & _bridge_cross(X, x_new, np.full(n, float(b)), dt, u)
            ca = (~up) & _bridge_cross(-X, -x_new, np.full(n, float(-a)), dt, u)
            phase = np.where(cb, DOWN_LEG, np.where(ca, UP_LEG, phase)).astype(np.int8)
            D = D + ca
        X = x_new
        np.maximum(S, X, out=S)
        np.maximum(I, -X, out=I)
        L = L + (np.abs(X) < eps) * (dt / (2 * eps))
        if family == "nu":
            m_now = m_nu(S, I, np.maximum(X, 0), np.maximum(-X, 0), L, spec)
            newly = (~absorbed) & (m_now < _M_FLOOR)
            absorbed |= newly
        if (k + 1) in cps:
            snaps.append(
                {
                    "t": (k + 1) * dt,
                    "X": X.copy(),
                    "S": S.copy(),
                    "I": I.copy(),
                    "L": L.copy(),
                    "D": D.copy(),
                    "phase": phase.copy(),
                    "absorbed": absorbed.copy(),
                }
            )
    return snaps, absorbed


def _j_nu_masked(X, S, I, L, nu: AtomMeasure):
    """Atomic drift with dead atoms dropped; absorbed states get drift 0
    (they are frozen by the caller)."""
    Xp = np.maximum(X, 0)
    Xm = np.maximum(-X, 0)
    num = np.zeros_like(X)
    den = np.zeros_like(X)
    for j in range(nu.n_atoms):
        alive = (S <= nu.a[j]) & (I <= nu.b[j])
        e = np.exp(nu.c[j] * L) * alive
        den += nu.w[j] * (1.0 - Xp / nu.a[j]) * (1.0 - Xm / nu.b[j]) * e
        num += nu.w[j] * (-np.where(X > 0, 1.0 / nu.a[j], 0.0) + np.where(X < 0, 1.0 / nu.b[j], 0.0)) * e
    return np.divide(num, den, out=np.zeros_like(num), where=den > _M_FLOOR)


def _nu_boundary_fix(X, x_new, z, S, I, L, nu: AtomMeasure, dt, g):
    """Within 10 sqrt(dt) of the binding alive boundary the gap to it is a
    Bessel(3) process; replace the Euler move by the exact radial step."""
    delta = 10.0 * math.sqrt(dt)
    out = x_new.copy()
    # positive side: binding level = smallest alive a_j
    a_bind = np.full_like(X, np.inf)
    for j in range(nu.n_atoms):
        alive = (S <= nu.a[j]) & (I <= nu.b[j])
        a_bind = np.where(alive & (nu.a[j] < a_bind), nu.a[j], a_bind)
    sel = (X > 0) & np.isfinite(a_bind) & (a_bind - X < delta)
    if sel.any():
        e2 = -2.0 * np.log(g.random(sel.sum()))
        out[sel] = a_bind[sel] - _bessel_step(a_bind[sel] - X[sel], -z[sel], e2, dt)
    b_bind = np.full_like(X, np.inf)
    for j in range(nu.n_atoms):
        alive = (S <= nu.a[j]) & (I <= nu.b[j])
        b_bind = np.where(alive & (nu.b[j] < b_bind), nu.b[j], b_bind)
    sel = (X < 0) & np.isfinite(b_bind) & (b_bind + X < delta)
    if sel.any():
        e2 = -2.0 * np.log(g.random(sel.sum()))
        out[sel] = _bessel_step(b_bind[sel] + X[sel], z[sel], e2, dt) - b_bind[sel]
    return out


# ---------------------------------------------------------------------------
# Route C: reweighted Wiener paths
# ---------------------------------------------------------------------------

def mc_route_c(family, spec, n, dt, checkpoints, rng, x0=0.0, a=0.0, b=1.0):
    """Wiener-measure ensembles with the exact-functional martingale weight
    M_t / M_0 attached at every checkpoint.  Snapshot keys: X, S (grid max,
    route-comparable), weight."""
    if family in ("phi", "kennedy"):
        raw = bm_max_ensemble(n, x0, 0.0, dt, checkpoints, rng)
        out = []
        for s in raw:
            if family == "phi":
                m0 = float(spec.tail(x0))
                wgt = m_phi(s["S"], s["X"], spec) / m0
            else:
                m0 = spec.m0(x0)
                wgt = m_kennedy(s["S"], s["X"], s["t"], spec) / m0
            out.append({"t": s["t"], "X": s["X"], "S": s["S_grid"], "weight": wgt})
        return out
    if family in ("signs", "nu"):
        pos = list(np.unique(spec.a)) if family == "nu" else []
        neg = list(np.unique(spec.b)) if family == "nu" else []
        raw = levy_ensemble(n, dt, checkpoints, rng, pos_levels=pos, neg_levels=neg)
        out = []
        for s in raw:
            X = s["X"]
            if family == "signs":
                wgt = m_signed_local(np.maximum(X, 0), np.maximum(-X, 0), s["L"], spec)
            else:
                wgt = np.zeros(n)
                for j in range(spec.n_atoms):
                    ai = pos.index(spec.a[j])
                    bi = neg.index(spec.b[j])
                    alive = s["alive_pos"][:, ai] & s["alive_neg"][:, bi]
                    wgt += (
                        spec.w[j]
                        * (1.0 - np.maximum(X, 0) / spec.a[j])
                        * (1.0 - np.maximum(-X, 0) / spec.b[j])
                        * np.exp(spec.c[j] * s["L"])
                        * alive
                    )
            out.append({"t": s["t"], "X": X, "S": s["S"], "L": s["L"], "weight": wgt})
        return out
    if family == "downcross":
        m0 = m0_downcross(x0, spec, a, b)
        raw = ladder_ensemble(n, x0, dt, checkpoints, a, b, rng)
        return [
            {
                "t": s["t"],
                "X": s["X"],
                "S": s["S"],
                "D": s["D"],
                "weight": m_downcross(s["X"], s["D"], s["phase"], spec, a, b) / m0,
            }
            for s in raw
        ]
    raise ConfigError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# Per-sample wrappers
# ---------------------------------------------------------------------------

def _times(dt, steps):
    return dt * np.arange(steps + 1)


def sample_q_phi_direct(phi: DensityPhi, x0: float, dt: float, horizon: float, rng) -> QSample:
    steps = int(round(horizon / dt))
    _, term, path = _route_a_phi(1, phi, x0, dt, [steps], rng, record_path=True)
    return QSample(
        times=_times(dt, steps),
        values=path[0],
        terminals=Terminals(s_inf=float(term["s_inf"][0]), g=float(term["g"][0])),
        route="direct",
        family="phi",
    )


def sample_q_kennedy_direct(ken: KennedyPsi, dt: float, horizon: float, rng) -> QSample:
    steps = int(round(horizon / dt))
    _, term, path = _route_a_kennedy(1, ken, dt, [steps], rng, record_path=True)
    return QSample(
        times=_times(dt, steps),
        values=path[0],
        terminals=Terminals(s_inf=float(term["s_inf"][0]), g=float(term["g"][0])),
        route="direct",
        family="kennedy",
    )


def sample_q_signed_direct(w: SignWeights, dt: float, horizon: float, rng) -> QSample:
    steps = int(round(horizon / dt))
    _, term, path = _route_a_signed(1, w, dt, [steps], rng, record_path=True)
    return QSample(
        times=_times(dt, steps),
        values=path[0],
        terminals=Terminals(l_inf=float(term["l_inf"][0]), g=float(term["g"][0])),
        route="direct",
        family="signs",
    )


def sample_q_taboo(params: TabooParams, horizon: float, rng, dt: float = 2 ** -10) -> QSample:
    steps = int(round(horizon / dt))
    cps = list(range(1, steps + 1))
    snaps = taboo_ensemble(1, params.s, params.i, dt, cps, rng)
    values = np.concatenate([[0.0], [s["Y"][0] for s in snaps]])
    return QSample(
        times=_times(dt, steps),
        values=values,
        terminals=Terminals(s_inf=params.s, i_inf=params.i, l_inf=math.inf),
        route="direct",
        family="nu",
    )


def sample_q_downcross_direct(
    G: GSequence, a: float, b: float, dt: float, horizon: float, rng, gbar_horizon: float = 4096.0
) -> QSample:
    if a >= b:
        raise ConfigError("need a < b")
    steps = int(round(horizon / dt))
    _, term, path = _route_a_downcross(
        1, G, a, b, dt, [steps], rng, record_path=True, resolve_gbar_horizon=gbar_horizon
    )
    gbar = term["g_bar"][0]
    return QSample(
        times=_times(dt, steps),
        values=path[0],
        terminals=Terminals(
            d_inf=int(term["d_inf"][0]),
            g=float(term["g"][0]),
            g_bar=float(gbar) if np.isfinite(gbar) else math.inf,
        ),
        route="direct",
        family="downcross",
    )


def sample_q_sde(family, spec, x0: float, horizon: float, rng, dt: float = 2 ** -10, a=0.0, b=1.0) -> QSample:
    steps = int(round(horizon / dt))
    cps = list(range(1, steps + 1))
    snaps, absorbed = mc_route_b(family, spec, 1, dt, cps, rng, x0=x0, a=a, b=b)
    values = np.concatenate([[x0], [s["X"][0] for s in snaps]])
    return QSample(
        times=_times(dt, steps),
        values=values,
        route="sde",
        valid=not bool(absorbed[0]),
        family=family,
    )


def sample_weighted(family, spec, t: float, rng, dt: float = 2 ** -10, x0=0.0, a=0.0, b=1.0) -> QSample:
    steps = int(round(t / dt))
    snaps = mc_route_c(family, spec, 1, dt, [steps], rng, x0=x0, a=a, b=b)
    s = snaps[-1]
    return QSample(
        times=np.array([0.0, t]),
        values=np.array([x0, s["X"][0]]),
        route="weighted",
        weight=float(s["weight"][0]),
        family=family,
    )


# ---------------------------------------------------------------------------
# Terminal-law oracles
# ---------------------------------------------------------------------------

class TerminalLawOracle:
    """Exact CDF/pmf and inverse-CDF sampling of the family's terminal law."""

    def __init__(self, family, spec, x0=0.0):
        self.family = family
        self.spec = spec
        self.x0 = x0
        if family in ("phi", "kennedy", "signs"):
            self.kind = "continuous"
        elif family in ("nu", "downcross"):
            self.kind = "discrete"
        else:
            raise ConfigError(f"unknown family {family!r}")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == "phi":
            base = self.spec.cdf(self.x0)
            return np.clip((self.spec.cdf(np.maximum(x, self.x0)) - base) / (1.0 - base), 0.0, 1.0)
        if self.family == "kennedy":
            t0 = self.spec.normalizer
            return np.clip(1.0 - self.spec.tail_integral(np.maximum(x, 0.0)) / t0, 0.0, 1.0) * (x >= 0)
        if self.family == "signs":
            return np.clip(self.spec.H(np.maximum(x, 0.0)), 0.0, 1.0) * (x >= 0)
        raise ConfigError("cdf defined for continuous terminals only")

    def pmf(self):
        if self.family == "downcross":
            n_max = 64 if self.spec.ratio is not None else len(self.spec.values)
            return self.spec.dG(np.arange(n_max))
        if self.family == "nu":
            return self.spec.w.copy()
        raise ConfigError("pmf defined for discrete terminals only")

    def sample(self, n, rng):
        if self.family == "phi":
            return self.spec.sample_max_terminal(n, self.x0, rng)
        if self.family == "kennedy":
            return self.spec.sample_max_terminal(n, rng)
        if self.family == "signs":
            return self.spec.sample_local_time_terminal(n, rng)
        if self.family == "downcross":
            return self.spec.sample(n, rng)
        if self.family == "nu":
            return self.spec.sample_index(n, rng)
        raise ConfigError(f"unknown family {self.family!r}")

    def minimum_transform(self, s_inf):
        """For the running-maximum family: (1 - Phi(S_inf)) / (1 - Phi(x0)),
        uniform on [0, 1] under the limit law."""
        if self.family != "phi":
            raise ConfigError("minimum transform applies to the phi family")
        return self.spec.tail(np.asarray(s_inf, dtype=float)) / float(self.spec.tail(self.x0))


def terminal_law_oracle(family, spec, x0=0.0) -> TerminalLawOracle:
    return TerminalLawOracle(family, spec, x0)
