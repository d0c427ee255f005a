"""The five penalization martingale families and their Girsanov drifts.

Closed-form evaluators along a path, vectorized over grid points or
ensemble members:

* ``m_phi``          — running-maximum family (S - X) phi(S) + 1 - Phi(S)
* ``m_kennedy``      — exponential family with the sinh/tail form, which is
  manifestly positive and cancellation-free for large lam (S - X)
* ``m_signed_local`` — 1 - H(L) + X+ h+(L) + X- h-(L)
* ``m_nu``           — atomic max/min/local-time family (with ``m_nu_star``
  for diagonal measures)
* ``m_downcross``    — the two-leg down-crossing family, continuous across
  ladder times

Each family's exponential-martingale drift J (the SDE drift of the path
under the penalized limit law) is exposed via ``drift_J`` and per-family
``j_*`` functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AbsorbedStateError, ConfigError
from .paths import UP_LEG, BrownPath, RunningFunctionals
from .weights import AtomMeasure, DensityPhi, GSequence, KennedyPsi, SignWeights

__all__ = [
    "MartingaleSeries",
    "m_phi",
    "m_kennedy",
    "m_signed_local",
    "m_nu",
    "m_nu_star",
    "m_downcross",
    "m0_downcross",
    "j_phi",
    "j_kennedy",
    "j_signed_local",
    "j_nu",
    "j_nu_star",
    "j_downcross",
    "drift_J",
    "evaluate_series",
]

_STATE_TOL = 1e-9


@dataclass
class MartingaleSeries:
    """Martingale values along a grid plus the running minimum."""

    M: np.ndarray
    running_min: np.ndarray
    family: str
    M0: float
    absorbed_at: Optional[int] = None  # first index with M = 0 (atomic family)


def _check_max_consistency(S, X):
    if np.any(np.asarray(S) < np.asarray(X) - _STATE_TOL):
        raise ValueError("running maximum below current value (S < X)")


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------

def m_phi(S, X, phi: DensityPhi):
    """(S - X) phi(S) + 1 - Phi(S); strictly positive for a normalized phi."""
    _check_max_consistency(S, X)
    S = np.asarray(S, dtype=float)
    X = np.asarray(X, dtype=float)
    return (S - X) * phi.phi(S) + phi.tail(S)


def m_kennedy(S, X, t, k: KennedyPsi):
    """{psi(S) sinh(lam (S-X)) / lam + e^{lam X} T(S)} e^{-lam^2 t / 2}."""
    _check_max_consistency(S, X)
    S = np.asarray(S, dtype=float)
    X = np.asarray(X, dtype=float)
    lam = k.lam
    body = k.psi(S) * np.sinh(lam * (S - X)) / lam + np.exp(lam * X) * k.tail_integral(S)
    return body * np.exp(-0.5 * lam * lam * np.asarray(t, dtype=float))


def m_signed_local(Xp, Xm, L, w: SignWeights):
    """1 - H(L) + X+ h+(L) + X- h-(L)."""
    Xp = np.asarray(Xp, dtype=float)
    Xm = np.asarray(Xm, dtype=float)
    L = np.asarray(L, dtype=float)
    if np.any(Xp < 0) or np.any(Xm < 0) or np.any(L < 0):
        raise ValueError("signed-local state must be nonnegative")
    if np.any(Xp * Xm > _STATE_TOL):
        raise ValueError("X+ and X- cannot both be positive")
    return 1.0 - w.H(L) + Xp * w.h_plus(L) + Xm * w.h_minus(L)


def m_nu(S, I, Xp, Xm, L, nu: AtomMeasure):
    """sum_j w_j (1 - X+/a_j)(1 - X-/b_j) e^{c_j L} 1{S <= a_j, I <= b_j}.

    Zero once every atom's indicator has died; the series is then treated
    as absorbed rather than feeding zeros into the drift."""
    S = np.asarray(S, dtype=float)
    I = np.asarray(I, dtype=float)
    Xp = np.asarray(Xp, dtype=float)
    Xm = np.asarray(Xm, dtype=float)
    L = np.asarray(L, dtype=float)
    _check_max_consistency(S, Xp)
    _check_max_consistency(I, Xm)
    if np.any(L < 0):
        raise ValueError("local time must be nonnegative")
    out = np.zeros(np.broadcast(S, I, Xp, Xm, L).shape)
    for j in range(nu.n_atoms):
        alive = (S <= nu.a[j]) & (I <= nu.b[j])
        out = out + nu.w[j] * (1.0 - Xp / nu.a[j]) * (1.0 - Xm / nu.b[j]) * np.exp(nu.c[j] * L) * alive
    return out if out.ndim else float(out)


def m_nu_star(Xabs, Xstar, L, nu: AtomMeasure):
    """Diagonal variant: sum_j w_j (1 - |X|/a_j) e^{L/a_j} 1{Xstar <= a_j}."""
    if not nu.is_diagonal:
        raise ConfigError("m_nu_star needs a diagonal atom measure")
    Xabs = np.asarray(Xabs, dtype=float)
    Xstar = np.asarray(Xstar, dtype=float)
    L = np.asarray(L, dtype=float)
    _check_max_consistency(Xstar, Xabs)
    out = np.zeros(np.broadcast(Xabs, Xstar, L).shape)
    for j in range(nu.n_atoms):
        alive = Xstar <= nu.a[j]
        out = out + nu.w[j] * (1.0 - Xabs / nu.a[j]) * np.exp(L / nu.a[j]) * alive
    return out if out.ndim else float(out)


def m_downcross(X, D, phase, G: GSequence, a: float, b: float):
    """Two-leg formula, selected by the leg flag; continuous across the
    ladder times and positive for admissible G."""
    if a >= b:
        raise ConfigError(f"need a < b, got a={a}, b={b}")
    X = np.asarray(X, dtype=float)
    D = np.asarray(D)
    phase = np.asarray(phase)
    gn = G.G(D)
    gn1 = G.G(D + 1)
    up = 0.5 * gn * (1.0 + (b - X) / (b - a)) + 0.5 * gn1 * (X - a) / (b - a)
    down = 0.5 * gn1 * (1.0 + (b - X) / (b - a)) + 0.5 * gn * (X - a) / (b - a)
    out = np.where(phase == UP_LEG, up, down)
    return out if out.ndim else float(out)


def m0_downcross(x0: float, G: GSequence, a: float, b: float) -> float:
    """Initial value: (G(0)(2b-a-x) + G(1)(x-a)) / (2(b-a)) for x <= b and
    the mirrored form above b."""
    g0 = float(G.G(0))
    g1 = float(G.G(1))
    if x0 <= b:
        return (g0 * (2 * b - a - x0) + g1 * (x0 - a)) / (2.0 * (b - a))
    return (g0 * (x0 - a) + g1 * (2 * b - a - x0)) / (2.0 * (b - a))


# ---------------------------------------------------------------------------
# Girsanov drifts
# ---------------------------------------------------------------------------

def j_phi(S, X, phi: DensityPhi):
    """-phi(S) / M."""
    return -phi.phi(np.asarray(S, dtype=float)) / m_phi(S, X, phi)


def j_kennedy(S, X, k: KennedyPsi):
    """-lam (psi(S) cosh(u) - lam e^{lam X} T(S)) /
    (psi(S) sinh(u) + lam e^{lam X} T(S)), u = lam (S - X)."""
    S = np.asarray(S, dtype=float)
    X = np.asarray(X, dtype=float)
    lam = k.lam
    u = lam * (S - X)
    tail = lam * np.exp(lam * X) * k.tail_integral(S)
    return -lam * (k.psi(S) * np.cosh(u) - tail) / (k.psi(S) * np.sinh(u) + tail)


def j_signed_local(X, L, w: SignWeights):
    """(1{X>0} h+(L) - 1{X<0} h-(L)) / M."""
    X = np.asarray(X, dtype=float)
    L = np.asarray(L, dtype=float)
    num = np.where(X > 0, w.h_plus(L), 0.0) - np.where(X < 0, w.h_minus(L), 0.0)
    m = m_signed_local(np.maximum(X, 0.0), np.maximum(-X, 0.0), L, w)
    return num / m


def j_nu(S, I, Xp, Xm, L, nu: AtomMeasure):
    """(1/M) sum_j w_j (-(1/a_j) 1{X>0} + (1/b_j) 1{X<0}) e^{c_j L} 1{alive_j}."""
    m = m_nu(S, I, Xp, Xm, L, nu)
    if np.any(np.asarray(m) <= 0):
        raise AbsorbedStateError("drift requested at an absorbed state (M = 0)")
    S = np.asarray(S, dtype=float)
    I = np.asarray(I, dtype=float)
    Xp = np.asarray(Xp, dtype=float)
    Xm = np.asarray(Xm, dtype=float)
    L = np.asarray(L, dtype=float)
    num = np.zeros(np.broadcast(S, I, Xp, Xm, L).shape)
    for j in range(nu.n_atoms):
        alive = (S <= nu.a[j]) & (I <= nu.b[j])
        sgn_term = -np.where(Xp > 0, 1.0 / nu.a[j], 0.0) + np.where(Xm > 0, 1.0 / nu.b[j], 0.0)
        num = num + nu.w[j] * sgn_term * np.exp(nu.c[j] * L) * alive
    return num / m


def j_nu_star(X, Xstar, L, nu: AtomMeasure):
    """-sgn(X)/M * sum_{a_j > Xstar} w_j (1/a_j) e^{L/a_j}."""
    Xabs = np.abs(np.asarray(X, dtype=float))
    m = m_nu_star(Xabs, Xstar, L, nu)
    if np.any(np.asarray(m) <= 0):
        raise AbsorbedStateError("drift requested at an absorbed state (M = 0)")
    Xstar = np.asarray(Xstar, dtype=float)
    L = np.asarray(L, dtype=float)
    acc = np.zeros(np.broadcast(Xabs, Xstar, L).shape)
    for j in range(nu.n_atoms):
        alive = Xstar <= nu.a[j]
        acc = acc + nu.w[j] * (1.0 / nu.a[j]) * np.exp(L / nu.a[j]) * alive
    return -np.sign(np.asarray(X, dtype=float)) * acc / m


def j_downcross(X, D, phase, G: GSequence, a: float, b: float):
    """(G(D+1) - G(D)) times the leg-dependent reciprocal of the positive
    linear form in X; negative drift on the waiting-for-b leg."""
    X = np.asarray(X, dtype=float)
    D = np.asarray(D)
    phase = np.asarray(phase)
    gn = G.G(D)
    gn1 = G.G(D + 1)
    dg = gn1 - gn
    up = dg / (gn * (2 * b - X - a) + gn1 * (X - a))
    down = -dg / (gn1 * (2 * b - X - a) + gn * (X - a))
    out = np.where(phase == UP_LEG, up, down)
    return out if out.ndim else float(out)


def drift_J(family: str, spec, state: dict):
    """Dispatch to the family's drift.  ``state`` carries the running
    functionals the family needs (same field names as RunningFunctionals,
    plus X)."""
    if family == "phi":
        return j_phi(state["S"], state["X"], spec)
    if family == "kennedy":
        return j_kennedy(state["S"], state["X"], spec)
    if family == "signs":
        return j_signed_local(state["X"], state["L"], spec)
    if family == "nu":
        x = np.asarray(state["X"], dtype=float)
        return j_nu(state["S"], state["I"], np.maximum(x, 0), np.maximum(-x, 0), state["L"], spec)
    if family == "nu_star":
        return j_nu_star(state["X"], state["Xstar"], state["L"], spec)
    if family == "downcross":
        return j_downcross(state["X"], state["D"], state["phase"], spec, state["a"], state["b"])
    raise ConfigError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# Series evaluation along one path
# ---------------------------------------------------------------------------

def evaluate_series(
    path: BrownPath, funcs: RunningFunctionals, family: str, spec, a: float = 0.0, b: float = 1.0
) -> MartingaleSeries:
    """Evaluate a family along a tracked path and record the running
    minimum.  For the atomic family the first index where every indicator
    has died is reported as ``absorbed_at``."""
    x = path.values
    t = path.grid.times
    absorbed_at = None
    if family == "phi":
        m = m_phi(funcs.S, x, spec)
        m0 = float(spec.tail(path.x0))
    elif family == "kennedy":
        m = m_kennedy(funcs.S, x, t, spec)
        m0 = spec.m0(path.x0)
    elif family == "signs":
        m = m_signed_local(np.maximum(x, 0.0), np.maximum(-x, 0.0), funcs.L, spec)
        m0 = 1.0
    elif family == "nu":
        m = m_nu(funcs.S, funcs.I, np.maximum(x, 0.0), np.maximum(-x, 0.0), funcs.L, spec)
        m0 = float(m[0])
        dead = np.flatnonzero(m <= 0.0)
        if dead.size:
            absorbed_at = int(dead[0])
    elif family == "downcross":
        if funcs.phase is None:
            raise ConfigError("down-crossing family needs ladder tracking")
        m = m_downcross(x, funcs.D, funcs.phase, spec, a, b)
        m0 = m0_downcross(path.x0, spec, a, b)
    else:
        raise ConfigError(f"unknown family {family!r}")
    return MartingaleSeries(
        M=np.asarray(m),
        running_min=np.minimum.accumulate(np.asarray(m)),
        family=family,
        M0=m0,
        absorbed_at=absorbed_at,
    )
