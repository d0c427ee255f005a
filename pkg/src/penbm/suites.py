"""Named verification suites.

Each suite is a list of independent tasks; a task owns a private random
stream (derived from the experiment seed and its position in the suite) and
returns :class:`TestReport` rows.  Tasks can fan out across worker
processes; reports merge in task order, so results are identical for any
worker count.

Suites
------
* ``paths``        — path-engine laws: scaling of the maximum, the joint
  (maximum, endpoint) density, the crossing-count law, local-time estimator
  consistency, hitting-time CDF with and without the bridge correction,
  radial-process moments, bit-reproducibility.
* ``martingale``   — E[M_t] = M_0 for the five families at t in
  {0.25, 1, 4} with exact-functional evaluation.
* ``lemmas``       — the five asymptotic-rate checkers with quadrature or
  exact-law Monte Carlo oracles, including the 3/2 constant.
* ``qlaws``        — terminal laws, the uniform-minimum law, route
  equivalence (direct / SDE / weighted), crossing-structure and radial
  hit probabilities, the taboo invariant density, SDE absorption rate.
* ``penalization`` — finite-horizon reweighting ratios against their
  limits, with monotone decay across horizons.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy import stats as sstats

from . import qlaws
from .ensembles import bessel_hit_ensemble, bm_max_ensemble, ladder_ensemble, levy_ensemble, taboo_ensemble
from .errors import ConfigError
from .martingales import m_downcross, m_kennedy, m_phi, m_signed_local, m0_downcross
from .rng import RngStream
from .stats import McEstimate, TestReport, chi2_test, ks_test, mc_mean
from .verify import EventSpec, lemma_ldo1_check, lemma_lloc1_check, lemma_lmil1_check, lemma_losm1_check, lemma_losm2_check, limit_side_multi, penalization_curve
from .weights import (
    AtomMeasure,
    DensityPhi,
    GSequence,
    KennedyPsi,
    SignWeights,
    constant_fn,
    expdecay_fn,
    exponential_density,
)

__all__ = ["SUITES", "list_suites", "describe", "run_suite", "canonical_specs"]

_SND = sstats.norm

DEFAULT_DT = 2.0**-10


def canonical_specs():
    """The standard verification battery: one spec per family."""
    return {
        "phi": DensityPhi(exponential_density(1.0)),
        "kennedy": KennedyPsi(1.0, constant_fn(2.0)),
        "signs": SignWeights(expdecay_fn(1.0, 1.0), expdecay_fn(1.0, 1.0)),
        "nu": AtomMeasure([(1.0, 1.0, 1.0)]),
        "downcross": GSequence(ratio=0.5),
    }


def _multi_atom_spec():
    return AtomMeasure([(1.0, 1.0, 0.6), (2.0, 1.5, 0.4)])


def _battery_events():
    return [
        EventSpec(0.5, {"S": (-math.inf, 0.8)}),
        EventSpec(0.5, {"X": (0.0, math.inf)}),
        EventSpec(0.5, {"X": (-0.25, 0.25), "S": (-math.inf, 1.0)}),
    ]


def _m0(family, spec, x0=0.0, a=0.0, b=1.0):
    if family == "phi":
        return float(spec.tail(x0))
    if family == "kennedy":
        return spec.m0(x0)
    if family == "downcross":
        return m0_downcross(x0, spec, a, b)
    return 1.0


# ---------------------------------------------------------------------------
# martingale suite
# ---------------------------------------------------------------------------

def _task_martingale_bm(stream: RngStream, n, dt, times):
    """Shared ensemble for the two maximum families."""
    specs = canonical_specs()
    cps = [int(round(t / dt)) for t in times]
    snaps = bm_max_ensemble(n, 0.0, 0.0, dt, cps, stream.generator())
    reports = []
    for fam in ("phi", "kennedy"):
        spec = specs[fam]
        m0 = _m0(fam, spec)
        for snap in snaps:
            m = m_phi(snap["S"], snap["X"], spec) if fam == "phi" else m_kennedy(
                snap["S"], snap["X"], snap["t"], spec
            )
            est = mc_mean(m)
            gap = abs(est.mean - m0)
            reports.append(
                TestReport(
                    name=f"martingale/{fam}",
                    passed=gap <= 3.0 * est.std_error,
                    statistic=gap / est.std_error if est.std_error else 0.0,
                    margin=3.0 * est.std_error - gap,
                    t=snap["t"],
                    estimate=est.mean,
                    se=est.std_error,
                    target=m0,
                    seed=stream.seed,
                )
            )
    return reports


def _task_martingale_levy(stream: RngStream, n, dt, times):
    """Shared reflected-path ensemble for the local-time families."""
    specs = canonical_specs()
    w, nu = specs["signs"], specs["nu"]
    cps = [int(round(t / dt)) for t in times]
    snaps = levy_ensemble(n, dt, cps, stream.generator(), pos_levels=[1.0], neg_levels=[1.0])
    reports = []
    for snap in snaps:
        x = snap["X"]
        m2 = m_signed_local(np.maximum(x, 0), np.maximum(-x, 0), snap["L"], w)
        alive = snap["alive_pos"][:, 0] & snap["alive_neg"][:, 0]
        m3 = (1.0 - snap["absX"]) * np.exp(snap["L"]) * alive
        for fam, m in (("signs", m2), ("nu", m3)):
            est = mc_mean(m)
            gap = abs(est.mean - 1.0)
            reports.append(
                TestReport(
                    name=f"martingale/{fam}",
                    passed=gap <= 3.0 * est.std_error,
                    statistic=gap / est.std_error if est.std_error else 0.0,
                    margin=3.0 * est.std_error - gap,
                    t=snap["t"],
                    estimate=est.mean,
                    se=est.std_error,
                    target=1.0,
                    seed=stream.seed,
                )
            )
    return reports


def _task_martingale_ladder(stream: RngStream, n, dt, times):
    G = canonical_specs()["downcross"]
    cps = [int(round(t / dt)) for t in times]
    snaps = ladder_ensemble(n, 0.0, dt, cps, 0.0, 1.0, stream.generator())
    m0 = m0_downcross(0.0, G, 0.0, 1.0)
    reports = []
    for snap in snaps:
        m = m_downcross(snap["X"], snap["D"], snap["phase"], G, 0.0, 1.0)
        est = mc_mean(m)
        gap = abs(est.mean - m0)
        reports.append(
            TestReport(
                name="martingale/downcross",
                passed=gap <= 3.0 * est.std_error,
                statistic=gap / est.std_error if est.std_error else 0.0,
                margin=3.0 * est.std_error - gap,
                t=snap["t"],
                estimate=est.mean,
                se=est.std_error,
                target=m0,
                seed=stream.seed,
            )
        )
    return reports


def suite_martingale(params):
    n = int(params.get("n_paths", 200_000))
    dt = float(params.get("dt", DEFAULT_DT))
    times = params.get("times", (0.25, 1.0, 4.0))
    return [
        ("bm", _task_martingale_bm, {"n": n, "dt": dt, "times": times}),
        ("levy", _task_martingale_levy, {"n": n, "dt": dt, "times": times}),
        ("ladder", _task_martingale_ladder, {"n": n, "dt": dt, "times": times}),
    ]


# ---------------------------------------------------------------------------
# paths suite
# ---------------------------------------------------------------------------

def _task_paths_scaling(stream: RngStream, n, dt):
    snaps = bm_max_ensemble(n, 0.0, 0.0, dt, [int(round(1.0 / dt))], stream.generator())
    rep = ks_test(
        snaps[0]["S"],
        lambda x: 2.0 * _SND.cdf(x) - 1.0,
        name="paths/max_scaling_ks",
        alpha=0.01,
        seed=stream.seed,
    )
    rep.t = 1.0
    return [rep]


def _joint_max_endpoint_box(beta0, beta1, alpha0, alpha1, t):
    """Exact P(max in (beta0, beta1], endpoint in (alpha0, alpha1]) from the
    reflection-principle joint CDF."""

    def cdf(beta, alpha):
        if beta <= 0:
            return 0.0
        if math.isinf(beta):
            return float(_SND.cdf(alpha / math.sqrt(t))) if math.isfinite(alpha) else 1.0
        al = min(alpha, beta)
        return _SND.cdf(al / math.sqrt(t)) - _SND.sf((2 * beta - al) / math.sqrt(t))

    return cdf(beta1, alpha1) - cdf(beta0, alpha1) - cdf(beta1, alpha0) + cdf(beta0, alpha0)


def _task_paths_joint(stream: RngStream, n, dt):
    snaps = bm_max_ensemble(n, 0.0, 0.0, dt, [int(round(1.0 / dt))], stream.generator())
    s, x = snaps[0]["S"], snaps[0]["X"]
    b_edges = np.array([0.0, 0.4, 0.8, 1.2, 1.8, np.inf])
    a_edges = np.array([-np.inf, -1.0, -0.3, 0.3, 0.9, np.inf])
    counts = []
    probs = []
    for i in range(len(b_edges) - 1):
        for j in range(len(a_edges) - 1):
            m = (s > b_edges[i]) & (s <= b_edges[i + 1]) & (x > a_edges[j]) & (x <= a_edges[j + 1])
            p = _joint_max_endpoint_box(b_edges[i], b_edges[i + 1], a_edges[j], a_edges[j + 1], 1.0)
            if p > 5.0 / n:
                counts.append(m.sum())
                probs.append(p)
    counts = np.array(counts, dtype=float)
    probs = np.array(probs) / np.sum(probs)
    leftover = n - counts.sum()
    counts = np.append(counts, leftover)
    probs = np.append(probs * (1 - leftover / n), leftover / n if leftover else 1e-12)
    stat, p = sstats.chisquare(counts, f_exp=probs / probs.sum() * counts.sum())
    rep = TestReport(
        name="paths/joint_max_endpoint_chi2",
        passed=bool(p > 0.01),
        statistic=float(stat),
        p_value=float(p),
        t=1.0,
        seed=stream.seed,
    )
    return [rep]


def _crossing_count_tail(n_cross, t, x=0.0, a=0.0, b=1.0):
    """Exact P(D_t >= n) by reflection and scaling."""
    q = (2 * n_cross * (b - a) - (b - a) + abs(b - x)) / math.sqrt(t)
    return 2.0 * _SND.sf(q)


def _task_paths_downcross_law(stream: RngStream, n, dt):
    ts = (1.0, 4.0, 16.0)
    cps = [int(round(t / dt)) for t in ts]
    snaps = ladder_ensemble(n, 0.0, dt, cps, 0.0, 1.0, stream.generator())
    reports = []
    for snap in snaps:
        worst = 0.0
        ok = True
        for k in range(1, 6):
            emp = float((snap["D"] >= k).mean())
            tgt = _crossing_count_tail(k, snap["t"])
            se = math.sqrt(max(tgt * (1 - tgt), 1e-12) / n)
            worst = max(worst, abs(emp - tgt) / max(se, 1e-12))
            ok &= abs(emp - tgt) <= 3.5 * se
        reports.append(
            TestReport(
                name="paths/downcross_tail_law",
                passed=ok,
                statistic=worst,
                t=snap["t"],
                seed=stream.seed,
            )
        )
    return reports


def _euler_band_local_time(n, dt, t, g):
    """Occupation-band local-time estimator on a plain Euler path."""
    steps = int(round(t / dt))
    eps = math.sqrt(dt)
    x = np.zeros(n)
    lhat = np.zeros(n)
    sq = math.sqrt(dt)
    lhat += (np.abs(x) < eps) * (dt / (2 * eps))
    for _ in range(steps):
        x += sq * g.standard_normal(n)
        lhat += (np.abs(x) < eps) * (dt / (2 * eps))
    return lhat


def _task_paths_lt_consistency(stream: RngStream, n, dts):
    g = stream.generator()
    cdf = lambda x: 2.0 * _SND.cdf(x) - 1.0  # exact law of L_1
    dists = []
    reports = []
    for dt in dts:
        lhat = _euler_band_local_time(n, dt, 1.0, g)
        dists.append(float(sstats.kstest(lhat, cdf).statistic))
    ok = all(d1 >= d2 * 0.9 for d1, d2 in zip(dists, dists[1:])) and dists[-1] <= 0.05
    reports.append(
        TestReport(
            name="paths/band_estimator_consistency",
            passed=ok,
            statistic=dists[-1],
            margin=0.05 - dists[-1],
            target=0.05,
            seed=stream.seed,
            extra={"ks_by_dt": dict(zip(map(str, dts), dists))},
        )
    )
    return reports


def _hitting_cdf_estimate(n, dt, g, bridge):
    """Empirical P(first hit of 1 by t=1) for unit-level crossing."""
    steps = int(round(1.0 / dt))
    sq = math.sqrt(dt)
    x = np.zeros(n)
    hit = np.zeros(n, dtype=bool)
    for _ in range(steps):
        x1 = x + sq * g.standard_normal(n)
        crossed = x1 >= 1.0
        if bridge:
            u = g.random(n)
            both = (x < 1.0) & (x1 < 1.0)
            crossed |= both & (u < np.exp(-2.0 * (1.0 - x) * (1.0 - x1) / dt))
        hit |= crossed
        x = x1
    return float(hit.mean())


def _task_paths_hitting(stream: RngStream, n):
    g = stream.generator()
    target = 2.0 * _SND.sf(1.0)  # reflection-principle value of P(T_1 <= 1)
    dt = 2.0**-6
    with_bridge = _hitting_cdf_estimate(n, dt, g, True)
    without = _hitting_cdf_estimate(n, dt, g, False)
    se = math.sqrt(target * (1 - target) / n)
    fine = _hitting_cdf_estimate(n, DEFAULT_DT, g, True)
    reports = [
        TestReport(
            name="paths/hitting_cdf_bridge",
            passed=abs(fine - target) <= 3.5 * se,
            statistic=abs(fine - target) / se,
            t=1.0,
            estimate=fine,
            se=se,
            target=target,
            seed=stream.seed,
        ),
        TestReport(
            name="paths/bridge_beats_plain",
            passed=abs(with_bridge - target) < abs(without - target),
            statistic=abs(without - target) - abs(with_bridge - target),
            estimate=with_bridge,
            target=target,
            seed=stream.seed,
            extra={"plain": without},
        ),
    ]
    return reports


def _task_paths_bessel(stream: RngStream, n):
    g = stream.generator()
    z = g.standard_normal((n, 3))
    r1 = np.linalg.norm(z, axis=1)  # radial value at t=1 from 0, exact
    mean_target = 2.0 * math.sqrt(2.0 / math.pi)
    est = mc_mean(r1)
    est2 = mc_mean(r1**2)
    return [
        TestReport(
            name="paths/bessel_mean",
            passed=abs(est.mean - mean_target) <= 3.5 * est.std_error,
            statistic=abs(est.mean - mean_target) / est.std_error,
            estimate=est.mean,
            se=est.std_error,
            target=mean_target,
            seed=stream.seed,
        ),
        TestReport(
            name="paths/bessel_second_moment",
            passed=abs(est2.mean - 3.0) <= 3.5 * est2.std_error,
            statistic=abs(est2.mean - 3.0) / est2.std_error,
            estimate=est2.mean,
            se=est2.std_error,
            target=3.0,
            seed=stream.seed,
        ),
    ]


def _task_paths_reproducibility(stream: RngStream, n, dt):
    a = bm_max_ensemble(n, 0.0, 0.0, dt, [64], stream.generator())
    b = bm_max_ensemble(n, 0.0, 0.0, dt, [64], stream.generator())
    same = bool(np.array_equal(a[0]["X"], b[0]["X"]) and np.array_equal(a[0]["S"], b[0]["S"]))
    return [
        TestReport(name="paths/reproducibility", passed=same, statistic=float(not same), seed=stream.seed)
    ]


def suite_paths(params):
    n = int(params.get("n_paths", 20_000))
    dt = float(params.get("dt", DEFAULT_DT))
    return [
        ("scaling", _task_paths_scaling, {"n": n, "dt": dt}),
        ("joint", _task_paths_joint, {"n": n, "dt": dt}),
        ("downcross_law", _task_paths_downcross_law, {"n": n, "dt": dt}),
        ("lt_consistency", _task_paths_lt_consistency, {"n": min(n, 10_000), "dts": (2.0**-6, 2.0**-8, dt)}),
        ("hitting", _task_paths_hitting, {"n": n}),
        ("bessel", _task_paths_bessel, {"n": max(n, 100_000)}),
        ("repro", _task_paths_reproducibility, {"n": 1000, "dt": dt}),
    ]


# ---------------------------------------------------------------------------
# lemmas suite
# ---------------------------------------------------------------------------

def _task_lemma_losm1(stream: RngStream, u):
    out = lemma_losm1_check(exponential_density(1.0), 0.0, 0.0, u)
    bounds_ok = all(bd["upper_ok"] and bd["lower_ok"] for bd in out["bounds"])
    gap = abs(out["ratio"] - 1.0)
    return [
        TestReport(
            name="lemmas/maximum_growth",
            passed=gap <= 0.01 and bounds_ok,
            statistic=out["ratio"],
            margin=0.01 - gap,
            t=u,
            estimate=out["lhs"],
            target=out["rhs"],
            seed=stream.seed,
            extra={"bounds_ok": bounds_ok},
        )
    ]


def _task_lemma_losm2(stream: RngStream, t):
    ken = KennedyPsi(1.0, constant_fn(2.0))
    out = lemma_losm2_check(ken, 0.0, 0.0, t)
    bounds_ok = all(bd["upper_ok"] and bd["lower_ok"] for bd in out["bounds"])
    gap = abs(out["ratio"] - 1.0)
    return [
        TestReport(
            name="lemmas/tilted_maximum_growth",
            passed=gap <= 0.02 and bounds_ok,
            statistic=out["ratio"],
            margin=0.02 - gap,
            t=t,
            estimate=out["lhs"],
            target=out["rhs"],
            seed=stream.seed,
            extra={"bounds_ok": bounds_ok},
        )
    ]


def _task_lemma_lloc1(stream: RngStream, t, n):
    f = exponential_density(1.0)
    out0 = lemma_lloc1_check(f, 0.0, 0.0, t, n, stream.generator())
    out1 = lemma_lloc1_check(f, 0.0, 1.0, t, n, stream.generator())
    reports = []
    for tag, out in (("x0", out0), ("x1", out1)):
        gap = abs(out["ratio"] - 1.0)
        reports.append(
            TestReport(
                name=f"lemmas/local_time_decay_{tag}",
                passed=gap <= 0.02,
                statistic=out["ratio"],
                margin=0.02 - gap,
                t=t,
                estimate=out["lhs"],
                se=out["se"] * out["rhs"],
                target=out["rhs"],
                seed=stream.seed,
            )
        )
    return reports


def _task_lemma_lmil1(stream: RngStream, t, n, dt):
    out = lemma_lmil1_check(1.0, 1.0, t, n, stream.generator(), dt=dt)
    gap = abs(out["estimate"] - 1.5)
    return [
        TestReport(
            name="lemmas/exit_weight_constant",
            passed=gap <= 0.05,
            statistic=out["estimate"],
            margin=0.05 - gap,
            t=t,
            estimate=out["estimate"],
            se=out["se"],
            target=1.5,
            seed=stream.seed,
            extra={"sup_estimate": out["sup_estimate"]},
        )
    ]


def _task_lemma_ldo1(stream: RngStream, t):
    out = lemma_ldo1_check(0.5 ** np.arange(64), 0.0, 0.0, 1.0, t)
    gap = abs(out["ratio"] - 1.0)
    return [
        TestReport(
            name="lemmas/crossing_count_decay",
            passed=gap <= 0.01 and out["error_decreasing"],
            statistic=out["ratio"],
            margin=0.01 - gap,
            t=t,
            estimate=out["lhs"],
            target=out["rhs"],
            seed=stream.seed,
            extra={"error_decreasing": out["error_decreasing"]},
        )
    ]


def suite_lemmas(params):
    n = int(params.get("n_paths", 1_000_000))
    n_taboo = int(params.get("n_taboo", 100_000))
    dt = float(params.get("dt", DEFAULT_DT))
    return [
        ("losm1", _task_lemma_losm1, {"u": float(params.get("u", 1e4))}),
        ("losm2", _task_lemma_losm2, {"t": float(params.get("u", 1e4))}),
        ("lloc1", _task_lemma_lloc1, {"t": float(params.get("u", 1e4)), "n": n}),
        ("lmil1", _task_lemma_lmil1, {"t": float(params.get("t_exit", 50.0)), "n": n_taboo, "dt": dt}),
        ("ldo1", _task_lemma_ldo1, {"t": float(params.get("t_count", 1e6))}),
    ]


# ---------------------------------------------------------------------------
# qlaws suite
# ---------------------------------------------------------------------------

def _task_qlaws_terminals(stream: RngStream, n):
    g = stream.generator()
    specs = canonical_specs()
    reports = []
    # (i) running-maximum terminal vs its exact CDF
    oracle = qlaws.terminal_law_oracle("phi", specs["phi"])
    s_inf = oracle.sample(n, g)
    rep = ks_test(s_inf, oracle.cdf, name="qlaws/terminal_max", max_stat=0.03, seed=stream.seed)
    reports.append(rep)
    # (vi in the same batch) uniform-minimum law
    u = oracle.minimum_transform(s_inf)
    reports.append(
        ks_test(u, lambda x: np.clip(x, 0, 1), name="qlaws/uniform_minimum", max_stat=0.03, seed=stream.seed)
    )
    # (ii) terminal local time + branch frequency
    ow = qlaws.terminal_law_oracle("signs", specs["signs"])
    l_inf = ow.sample(n, g)
    reports.append(ks_test(l_inf, ow.cdf, name="qlaws/terminal_local_time", max_stat=0.03, seed=stream.seed))
    plus = (g.random(n) < specs["signs"].sign_probability_plus(l_inf)).mean()
    gap = abs(plus - 0.5)
    reports.append(
        TestReport(
            name="qlaws/positive_branch",
            passed=gap <= 0.02,
            statistic=float(plus),
            margin=0.02 - gap,
            estimate=float(plus),
            target=0.5,
            seed=stream.seed,
        )
    )
    # (iii) crossing-count terminal pmf
    og = qlaws.terminal_law_oracle("downcross", specs["downcross"])
    d_inf = og.sample(n, g)
    counts = np.bincount(d_inf, minlength=20)[:20]
    reports.append(
        chi2_test(counts, og.pmf()[:20], name="qlaws/terminal_count", alpha=0.01, seed=stream.seed)
    )
    # (iv) atomic terminal frequencies
    nu = _multi_atom_spec()
    onu = qlaws.terminal_law_oracle("nu", nu)
    idx = onu.sample(n, g)
    freq = np.bincount(idx, minlength=nu.n_atoms) / n
    gap = float(np.max(np.abs(freq - nu.w)))
    reports.append(
        TestReport(
            name="qlaws/terminal_atoms",
            passed=gap <= 0.02,
            statistic=gap,
            margin=0.02 - gap,
            seed=stream.seed,
            extra={"freq": freq.tolist(), "weights": nu.w.tolist()},
        )
    )
    return reports


def _battery_values(snaps_mid, snaps_end, weights=None):
    """(estimate battery) -> list of McEstimate for
    [P(S_.5 <= .8), P(X_1 > 0), E[arctan X_1]]."""
    out = []
    ind = (snaps_mid["S"] <= 0.8).astype(float)
    out.append(mc_mean(ind, weights))
    out.append(mc_mean((snaps_end["X"] > 0).astype(float), weights))
    out.append(mc_mean(np.arctan(snaps_end["X"]), weights))
    return out


def _task_qlaws_routes(stream: RngStream, family, n, dt):
    specs = canonical_specs()
    spec = _multi_atom_spec() if family == "nu" else specs[family]
    cps = [int(round(0.5 / dt)), int(round(1.0 / dt))]
    half = {"phi": 0, "kennedy": 1, "signs": 2, "nu": 3, "downcross": 4}[family]
    g_a = RngStream(stream.seed, stream.stream_id * 10 + 1).generator()
    g_b = RngStream(stream.seed, stream.stream_id * 10 + 2).generator()
    g_c = RngStream(stream.seed, stream.stream_id * 10 + 3).generator()
    snaps_a, _, _ = qlaws.mc_route_a(family, spec, n, dt, cps, g_a)
    est_a = _battery_values(snaps_a[0], snaps_a[1])
    snaps_b, absorbed = qlaws.mc_route_b(family, spec, n, dt, cps, g_b)
    est_b = _battery_values(snaps_b[0], snaps_b[1])
    snaps_c = qlaws.mc_route_c(family, spec, n, dt, cps, g_c)
    wts = snaps_c[1]["weight"]
    est_c = [
        mc_mean((snaps_c[0]["S"] <= 0.8).astype(float), wts),
        mc_mean((snaps_c[1]["X"] > 0).astype(float), wts),
        mc_mean(np.arctan(snaps_c[1]["X"]), wts),
    ]
    names = ["P(S_.5<=.8)", "P(X_1>0)", "E[atan X_1]"]
    reports = []
    for i, nm in enumerate(names):
        for tag, e1, e2 in (("AB", est_a[i], est_b[i]), ("AC", est_a[i], est_c[i]), ("BC", est_b[i], est_c[i])):
            diff = abs(e1.mean - e2.mean)
            band = 3.0 * math.sqrt(e1.std_error**2 + e2.std_error**2)
            reports.append(
                TestReport(
                    name=f"qlaws/routes_{family}_{tag}_{i}",
                    passed=diff <= band,
                    statistic=diff / (band / 3.0) if band else 0.0,
                    margin=band - diff,
                    estimate=e1.mean,
                    target=e2.mean,
                    se=band / 3.0,
                    seed=stream.seed,
                    extra={"battery": nm},
                )
            )
    if family == "nu":
        rate = float(absorbed.mean())
        reports.append(
            TestReport(
                name="qlaws/sde_absorption_rate",
                passed=rate < 0.001,
                statistic=rate,
                margin=0.001 - rate,
                estimate=rate,
                target=0.0,
                seed=stream.seed,
            )
        )
    return reports


def _task_qlaws_eps_bias(stream: RngStream, n, dt):
    g = stream.generator()
    lhat = _euler_band_local_time(n, dt, 1.0, g)
    rep = ks_test(
        lhat,
        lambda x: 2.0 * _SND.cdf(x) - 1.0,
        name="qlaws/band_estimator_bias",
        max_stat=0.05,
        seed=stream.seed,
    )
    rep.t = 1.0
    return [rep]


def _task_qlaws_gbar(stream: RngStream, n, dt):
    g = stream.generator()
    reports = []
    for tag, r0 in (("crossing_escape", 2.0), ("radial_cross_check", 2.0)):
        out = bessel_hit_ensemble(
            n, r0, 1.0, dt, int(round(64.0 / dt)), g, coarse_dt=2.0**-3, coarse_steps=int((8192 - 64) * 2**3)
        )
        p = float(out["hit"].mean())
        gap = abs(p - 0.5)
        reports.append(
            TestReport(
                name=f"qlaws/{tag}",
                passed=gap <= 0.02,
                statistic=p,
                margin=0.02 - gap,
                estimate=p,
                se=math.sqrt(0.25 / n),
                target=0.5,
                seed=stream.seed,
            )
        )
    return reports


def _task_qlaws_taboo(stream: RngStream, n_paths, horizon, dt):
    steps = int(round(horizon / dt))
    burn = int(round(16.0 / dt))
    snaps = taboo_ensemble(
        n_paths, 1.0, 1.0, dt, [steps], stream.generator(), record_from=burn, hist_bins=40
    )
    last = snaps[-1]
    edges = last["hist_edges"]
    mids = 0.5 * (edges[:-1] + edges[1:])
    target = 1.5 * (1.0 - np.abs(mids)) ** 2
    l1 = float(np.sum(np.abs(last["hist"] - target)) * (edges[1] - edges[0]))
    favg = mc_mean(last["f_avg"])
    gap = abs(favg.mean - 1.5)
    return [
        TestReport(
            name="qlaws/taboo_invariant_density",
            passed=l1 <= 0.05,
            statistic=l1,
            margin=0.05 - l1,
            t=horizon,
            estimate=l1,
            target=0.05,
            seed=stream.seed,
        ),
        TestReport(
            name="qlaws/taboo_time_average",
            passed=gap <= 0.05,
            statistic=favg.mean,
            margin=0.05 - gap,
            t=horizon,
            estimate=favg.mean,
            se=favg.std_error,
            target=1.5,
            seed=stream.seed,
        ),
    ]


def suite_qlaws(params):
    n = int(params.get("n_paths", 10_000))
    n_routes = int(params.get("n_routes", 30_000))
    dt = float(params.get("dt", DEFAULT_DT))
    tasks = [
        ("terminals", _task_qlaws_terminals, {"n": n}),
        ("eps_bias", _task_qlaws_eps_bias, {"n": min(n_routes, 20_000), "dt": dt}),
        ("gbar", _task_qlaws_gbar, {"n": n, "dt": dt}),
        ("taboo", _task_qlaws_taboo, {"n_paths": 32, "horizon": float(params.get("taboo_horizon", 1e3)), "dt": dt}),
    ]
    for fam in qlaws.FAMILIES:
        tasks.append((f"routes_{fam}", _task_qlaws_routes, {"family": fam, "n": n_routes, "dt": dt}))
    return tasks


# ---------------------------------------------------------------------------
# penalization suite
# ---------------------------------------------------------------------------

def _task_penalization(stream: RngStream, family, n, dt):
    spec = canonical_specs()[family]
    events = _battery_events()
    ts = [4.0, 16.0, 64.0] + ([1e4] if family == "downcross" else [])
    g_ratio = RngStream(stream.seed, stream.stream_id * 10 + 1).generator()
    g_limit = RngStream(stream.seed, stream.stream_id * 10 + 2).generator()
    curve = penalization_curve(family, spec, events, ts, n, g_ratio, dt=dt)
    limits = limit_side_multi(family, spec, events, n, g_limit, dt=dt)
    reports = []
    t_final = ts[-1]
    for ie, ev in enumerate(events):
        lim = limits[ie]
        diffs = []
        for tv in ts:
            est = curve[(ie, tv)]
            diffs.append((tv, abs(est.mean - lim.mean), est.std_error))
        tv, gap, se = diffs[-1]
        band = max(0.02, 3.0 * math.sqrt(se**2 + lim.std_error**2))
        reports.append(
            TestReport(
                name=f"penalization/{family}_event{ie}",
                passed=gap <= band,
                statistic=gap,
                margin=band - gap,
                t=t_final,
                estimate=curve[(ie, t_final)].mean,
                se=se,
                target=lim.mean,
                seed=stream.seed,
                extra={"event": ev.describe(), "limit_se": lim.std_error},
            )
        )
        # monotone decay within noise bands across the first three horizons
        ok = True
        for (t1, d1, s1), (t2, d2, s2) in zip(diffs[:3], diffs[1:3]):
            noise = 3.0 * math.sqrt(s1**2 + s2**2 + 2 * lim.std_error**2)
            ok &= d2 <= d1 + noise
        reports.append(
            TestReport(
                name=f"penalization/{family}_event{ie}_decay",
                passed=ok,
                statistic=diffs[-1][1],
                seed=stream.seed,
                extra={"diffs": [(tv, d) for tv, d, _ in diffs]},
            )
        )
    return reports


def suite_penalization(params):
    n = int(params.get("n_paths", 40_000))
    dt = float(params.get("dt", DEFAULT_DT))
    return [
        (f"pen_{fam}", _task_penalization, {"family": fam, "n": n if fam != "nu" else min(n, 20_000), "dt": dt})
        for fam in qlaws.FAMILIES
    ]


# ---------------------------------------------------------------------------
# registry and runner
# ---------------------------------------------------------------------------

SUITES = {
    "martingale": {
        "build": suite_martingale,
        "doc": "E[M_t] = M_0 for the five families (phi density, exponential-"
        "rate, signed local-time, single atom, crossing sequence) at "
        "t in {0.25, 1, 4}; exact-functional ensembles, 3 SE gate.",
        "params": "n_paths (default 200000), dt, times",
    },
    "penalization": {
        "build": suite_penalization,
        "doc": "Finite-horizon reweighting ratio vs its limit on the event "
        "battery, horizons {4, 16, 64} (1e4 for the crossing family), "
        "gate max(0.02, 3 combined SE) plus monotone decay.",
        "params": "n_paths (default 40000), dt",
    },
    "qlaws": {
        "build": suite_qlaws,
        "doc": "Limit-law checks: terminal laws, uniform minimum, route "
        "equivalence across routes A (direct construction), B (drift "
        "SDE), C (weighted Wiener paths), band-estimator bias, "
        "crossing-structure/radial hit probabilities, taboo density.",
        "params": "n_paths (default 10000), n_routes (default 30000), dt, taboo_horizon",
    },
    "lemmas": {
        "build": suite_lemmas,
        "doc": "Asymptotic-rate checkers: maximum growth, tilted maximum "
        "growth, local-time decay, the 3/2 exit-weight constant, "
        "crossing-count decay; quadrature or exact-law MC oracles.",
        "params": "n_paths (default 1e6), n_taboo (default 1e5), u, t_exit, t_count, dt",
    },
    "paths": {
        "build": suite_paths,
        "doc": "Path-engine laws: maximum scaling, joint (max, endpoint) "
        "density, crossing-count law, local-time estimator consistency, "
        "hitting CDF with/without bridge correction, radial moments, "
        "bit-reproducibility.",
        "params": "n_paths (default 20000), dt",
    },
}


def list_suites():
    return sorted(SUITES)


def describe(name: str) -> str:
    if name not in SUITES:
        import difflib

        hint = difflib.get_close_matches(name, SUITES, n=1)
        suffix = f"; did you mean {hint[0]!r}?" if hint else ""
        raise ConfigError(f"unknown suite {name!r}{suffix}")
    info = SUITES[name]
    return f"suite {name}\n  {info['doc']}\n  parameters: {info['params']}"


def _run_task(args):
    name, fn, kwargs, seed, stream_id = args
    stream = RngStream(seed, stream_id)
    t0 = time.monotonic()
    reports = fn(stream, **kwargs)
    wall = int((time.monotonic() - t0) * 1000)
    for r in reports:
        r.wall_ms = wall
        r.seed = seed
    return reports


def run_suite(name: str, seed: int, params=None, workers: int = 1):
    """Execute a suite; returns the ordered list of TestReports."""
    if name not in SUITES:
        describe(name)  # raises with a suggestion
    params = params or {}
    tasks = SUITES[name]["build"](params)
    jobs = [
        (task_name, fn, kwargs, seed, idx) for idx, (task_name, fn, kwargs) in enumerate(tasks)
    ]
    if workers <= 1 or len(jobs) <= 1:
        batches = [_run_task(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_task, jobs))
    reports = [r for batch in batches for r in batch]
    return reports
