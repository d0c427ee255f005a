"""Penalization weight families and their derived closed-form functions.

Five families parameterize the martingales in :mod:`penbm.martingales`:

* ``DensityPhi`` — a probability density ``phi`` of the running maximum,
  with primitive ``Phi`` and tail ``1 - Phi``.
* ``KennedyPsi`` — the exponential family driven by a nonnegative ``psi``
  and a rate ``lam``; the tail integral ``T(y) = int_y^inf psi(z) e^{-lam z} dz``
  generates ``Phi = 1 - e^{lam y} T(y)`` and ``phi = psi - lam e^{lam y} T(y)``.
* ``SignWeights`` — bounded ``h_plus, h_minus`` on the half line with
  ``H(l) = (1/2) int_0^l (h_plus + h_minus)``.
* ``AtomMeasure`` — a finite list of atoms ``(a_j, b_j, w_j)`` bounded away
  from zero, with the weight function ``A_nu``.
* ``GSequence`` — a decreasing sequence ``G(0)=1 -> 0`` driving the
  down-crossing martingale, with increments ``dG(n) = G(n) - G(n+1)``.

Weight functions are restricted to piecewise exponential-polynomial form
(sums of ``c * x^p * e^{q x}`` on intervals) so that every primitive,
tail integral and inverse CDF used inside the Monte Carlo loops is exact;
quadrature is used only as an independent cross-check in the test suite.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import AdmissibilityError

__all__ = [
    "Term",
    "Piece",
    "PiecewiseExpPoly",
    "DensityPhi",
    "KennedyPsi",
    "SignWeights",
    "AtomMeasure",
    "GSequence",
    "eval_A_nu",
    "build_kennedy",
    "validate_family",
    "family_from_config",
    "uniform_density",
    "exponential_density",
    "constant_fn",
    "expdecay_fn",
]

_TOL_NORM = 1e-9  # normalization checks, per module contract
_NEG_TOL = -1e-12


# ---------------------------------------------------------------------------
# Exact integrals of x^p e^{qx}
# ---------------------------------------------------------------------------

def _antideriv_power_exp(p: int, q: float, x) :
    """Antiderivative of x^p e^{qx} at finite x (q != 0); vectorized."""
    # e^{qx} * sum_{k=0}^{p} (-1)^k p!/(p-k)! x^{p-k} / q^{k+1}
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    fact = 1.0
    for k in range(p + 1):
        acc += ((-1.0) ** k) * fact * x ** (p - k) / q ** (k + 1)
        fact *= p - k
    out = np.exp(q * x) * acc
    return out if out.ndim else float(out)


def _int_power_exp(p: int, q: float, a: float, b: float) -> float:
    """Exact integral of x^p e^{qx} over [a, b]; limits may be infinite."""
    if a == b:
        return 0.0
    if q == 0.0:
        if not (math.isfinite(a) and math.isfinite(b)):
            raise AdmissibilityError("tail integral divergent", f"x^{p} over infinite interval")
        return (b ** (p + 1) - a ** (p + 1)) / (p + 1)
    if b == math.inf:
        if q >= 0.0:
            raise AdmissibilityError("tail integral divergent", f"rate {q} >= 0 at +inf")
        upper = 0.0
    else:
        upper = _antideriv_power_exp(p, q, b)
    if a == -math.inf:
        if q <= 0.0:
            raise AdmissibilityError("tail integral divergent", f"rate {q} <= 0 at -inf")
        lower = 0.0
    else:
        lower = _antideriv_power_exp(p, q, a)
    return upper - lower


@dataclass(frozen=True)
class Term:
    coef: float
    power: int
    rate: float

    def __post_init__(self):
        if self.power < 0 or self.power != int(self.power):
            raise ValueError("term power must be a nonnegative integer")


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    terms: tuple

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("piece must have lo < hi")


class PiecewiseExpPoly:
    """f(x) = sum_j c_j x^{p_j} e^{q_j x} on each of a few ordered intervals,
    zero elsewhere.  Supports exact definite integrals (including to +-inf
    when convergent), exponential tilting, and inverse-CDF sampling of the
    measure f(x) dx."""

    def __init__(self, pieces):
        pieces = sorted(pieces, key=lambda p: p.lo)
        for left, right in zip(pieces, pieces[1:]):
            if left.hi > right.lo + 1e-15:
                raise ValueError("pieces must not overlap")
        self.pieces = tuple(pieces)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for pc in self.pieces:
            m = (x >= pc.lo) & (x < pc.hi)
            if not m.any():
                continue
            xm = x[m]
            val = np.zeros_like(xm)
            for t in pc.terms:
                val += t.coef * xm ** t.power * np.exp(t.rate * xm)
            out[m] = val
        return out if out.ndim else float(out)

    # -- exact integrals ----------------------------------------------------

    def piece_integral(self, pc: Piece, a: float, b: float) -> float:
        a = max(a, pc.lo)
        b = min(b, pc.hi)
        if a >= b:
            return 0.0
        return sum(t.coef * _int_power_exp(t.power, t.rate, a, b) for t in pc.terms)

    def integral(self, a: float, b: float) -> float:
        return sum(self.piece_integral(pc, a, b) for pc in self.pieces)

    def _piece_int_to(self, pc: Piece, x: np.ndarray) -> np.ndarray:
        """Vectorized ∫_{lo}^{clip(x)} over one piece (finite x)."""
        xa = np.clip(x, pc.lo, pc.hi)
        out = np.zeros_like(xa)
        for t in pc.terms:
            if t.coef == 0.0:
                continue
            if t.rate == 0.0:
                if pc.lo == -math.inf:
                    raise AdmissibilityError("tail integral divergent", f"x^{t.power} at -inf")
                lower = pc.lo ** (t.power + 1) / (t.power + 1)
                out += t.coef * (xa ** (t.power + 1) / (t.power + 1) - lower)
                continue
            if pc.lo == -math.inf:
                if t.rate <= 0.0:
                    raise AdmissibilityError("tail integral divergent", f"rate {t.rate} at -inf")
                lower = 0.0
            else:
                lower = _antideriv_power_exp(t.power, t.rate, pc.lo)
            out += t.coef * (_antideriv_power_exp(t.power, t.rate, xa) - lower)
        return out

    def _piece_int_from(self, pc: Piece, x: np.ndarray) -> np.ndarray:
        """Vectorized ∫_{clip(x)}^{hi} over one piece (finite x)."""
        xa = np.clip(x, pc.lo, pc.hi)
        out = np.zeros_like(xa)
        for t in pc.terms:
            if t.coef == 0.0:
                continue
            if t.rate == 0.0:
                if pc.hi == math.inf:
                    raise AdmissibilityError("tail integral divergent", f"x^{t.power} at +inf")
                upper = pc.hi ** (t.power + 1) / (t.power + 1)
                out += t.coef * (upper - xa ** (t.power + 1) / (t.power + 1))
                continue
            if pc.hi == math.inf:
                if t.rate >= 0.0:
                    raise AdmissibilityError("tail integral divergent", f"rate {t.rate} at +inf")
                upper = 0.0
            else:
                upper = _antideriv_power_exp(t.power, t.rate, pc.hi)
            out += t.coef * (upper - _antideriv_power_exp(t.power, t.rate, xa))
        return out

    def cumulative(self, x):
        """Vectorized ∫_{-inf}^x f; requires the left tail to converge."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        for pc in self.pieces:
            out += self._piece_int_to(pc, x)
        return out if out.shape != (1,) else float(out[0])

    def tail(self, x):
        """Vectorized ∫_x^inf f; requires the right tail to converge."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        for pc in self.pieces:
            out += self._piece_int_from(pc, x)
        return out if out.shape != (1,) else float(out[0])

    # -- transforms ---------------------------------------------------------

    def tilted(self, delta: float) -> "PiecewiseExpPoly":
        """Return the function x -> f(x) e^{delta x}."""
        return PiecewiseExpPoly(
            [
                Piece(pc.lo, pc.hi, tuple(Term(t.coef, t.power, t.rate + delta) for t in pc.terms))
                for pc in self.pieces
            ]
        )

    def scaled(self, c: float) -> "PiecewiseExpPoly":
        return PiecewiseExpPoly(
            [
                Piece(pc.lo, pc.hi, tuple(Term(t.coef * c, t.power, t.rate) for t in pc.terms))
                for pc in self.pieces
            ]
        )

    def plus(self, other: "PiecewiseExpPoly") -> "PiecewiseExpPoly":
        """Pointwise sum; piece boundaries are refined to a common grid."""
        cuts = sorted(
            {pc.lo for pc in self.pieces}
            | {pc.hi for pc in self.pieces}
            | {pc.lo for pc in other.pieces}
            | {pc.hi for pc in other.pieces}
        )
        pieces = []
        for lo, hi in zip(cuts, cuts[1:]):
            terms = []
            for f in (self, other):
                for pc in f.pieces:
                    if pc.lo <= lo and hi <= pc.hi:
                        terms.extend(pc.terms)
            if terms:
                pieces.append(Piece(lo, hi, tuple(terms)))
        return PiecewiseExpPoly(pieces)

    # -- structure ----------------------------------------------------------

    @property
    def support_sup(self) -> float:
        return max(pc.hi for pc in self.pieces)

    @property
    def support_inf(self) -> float:
        return min(pc.lo for pc in self.pieces)

    def check_nonnegative(self, name: str, n_grid: int = 512):
        for pc in self.pieces:
            lo = pc.lo if math.isfinite(pc.lo) else min(pc.hi - 1.0, -50.0)
            hi = pc.hi if math.isfinite(pc.hi) else max(pc.lo + 1.0, 50.0) + 50.0
            xs = np.linspace(lo, hi - 1e-12, n_grid)
            if np.min(self(xs)) < _NEG_TOL:
                raise AdmissibilityError(f"{name} negative", f"on piece [{pc.lo}, {pc.hi})")

    # -- sampling ------------------------------------------------------------

    def ppf_measure(self, q, lo: float = -math.inf):
        """Inverse CDF of the probability measure proportional to f(x) dx
        restricted to [lo, inf).  ``q`` may be an array in [0, 1)."""
        total = self.integral(lo, math.inf)
        if not (total > 0 and math.isfinite(total)):
            raise AdmissibilityError("measure not normalizable", f"mass on [{lo}, inf) = {total}")
        q = np.atleast_1d(np.asarray(q, dtype=float))
        targets = q * total
        # cumulative masses of the clipped pieces
        clipped = [
            (max(pc.lo, lo), pc.hi, pc)
            for pc in self.pieces
            if pc.hi > lo
        ]
        masses = np.array([self.piece_integral(pc, a, b) for a, b, pc in clipped])
        cum = np.concatenate([[0.0], np.cumsum(masses)])
        idx = np.searchsorted(cum[1:], targets, side="left")
        idx = np.minimum(idx, len(clipped) - 1)
        out = np.empty_like(targets)
        for i, (a, b, pc) in enumerate(clipped):
            m = idx == i
            if not m.any():
                continue
            local = targets[m] - cum[i]
            out[m] = _invert_piece_mass(pc, a, b, local)
        return out if out.shape != (1,) else float(out[0])


def _invert_piece_mass(pc: Piece, a: float, b: float, mass: np.ndarray) -> np.ndarray:
    """Solve ∫_a^x f = mass within one piece, elementwise."""
    if len(pc.terms) == 1 and pc.terms[0].power == 0:
        c, q = pc.terms[0].coef, pc.terms[0].rate
        if q == 0.0:
            return a + mass / c
        # ∫_a^x c e^{qu} du = c (e^{qx} - e^{qa}) / q
        return np.log(np.exp(q * a) + mass * q / c) / q
    out = np.empty_like(mass)
    hi = b if math.isfinite(b) else max(a + 1.0, 1.0)
    for j, mval in enumerate(mass):
        f = lambda x: sum(t.coef * _int_power_exp(t.power, t.rate, a, x) for t in pc.terms) - mval
        ub = hi
        while f(ub) < 0:  # expand bracket toward an infinite endpoint
            ub = a + 2 * (ub - a) + 1.0
        out[j] = brentq(f, a, ub, xtol=1e-13)
    return out


# ---------------------------------------------------------------------------
# Named constructors
# ---------------------------------------------------------------------------

def uniform_density(lo: float, hi: float) -> PiecewiseExpPoly:
    """Density 1/(hi-lo) on [lo, hi)."""
    return PiecewiseExpPoly([Piece(lo, hi, (Term(1.0 / (hi - lo), 0, 0.0),))])


def exponential_density(rate: float, lo: float = 0.0) -> PiecewiseExpPoly:
    """Density rate * e^{-rate (x - lo)} on [lo, inf)."""
    c = rate * math.exp(rate * lo)
    return PiecewiseExpPoly([Piece(lo, math.inf, (Term(c, 0, -rate),))])


def constant_fn(value: float, lo: float = -math.inf, hi: float = math.inf) -> PiecewiseExpPoly:
    return PiecewiseExpPoly([Piece(lo, hi, (Term(value, 0, 0.0),))])


def expdecay_fn(coef: float, rate: float, lo: float = 0.0) -> PiecewiseExpPoly:
    """coef * e^{-rate (x - lo)} on [lo, inf)."""
    return PiecewiseExpPoly([Piece(lo, math.inf, (Term(coef * math.exp(rate * lo), 0, -rate),))])


# ---------------------------------------------------------------------------
# Family: density of the running maximum
# ---------------------------------------------------------------------------

class DensityPhi:
    """Validated probability density ``phi`` with primitive ``Phi`` and tail.

    Admissibility: ``phi >= 0`` and ``int phi = 1`` (within 1e-9)."""

    kind = "phi"

    def __init__(self, phi: PiecewiseExpPoly, form=None):
        phi.check_nonnegative("phi")
        total = phi.integral(-math.inf, math.inf)
        if abs(total - 1.0) > _TOL_NORM:
            raise AdmissibilityError("phi not normalized", f"integral = {total!r}")
        self.fn = phi
        self._form = form

    def phi(self, x):
        return self.fn(x)

    def cdf(self, x):
        return self.fn.cumulative(x)

    def tail(self, x):
        return self.fn.tail(x)

    def ppf(self, q, lo: float = -math.inf):
        """Inverse CDF of phi conditioned on [lo, inf)."""
        return self.fn.ppf_measure(q, lo=lo)

    def sample_max_terminal(self, n: int, x0: float, rng) -> np.ndarray:
        """Draws from the terminal running-maximum law
        phi(y) 1_{y >= x0} / (1 - Phi(x0))."""
        from .rng import as_generator

        g = as_generator(rng)
        return np.asarray(self.fn.ppf_measure(g.random(n), lo=x0), dtype=float).reshape(n)

    def to_config(self) -> str:
        return _render_config("family", _form_dict(self))


# ---------------------------------------------------------------------------
# Family: Kennedy exponential weights
# ---------------------------------------------------------------------------

class KennedyPsi:
    """Kennedy-type weight: rate ``lam > 0`` and nonnegative ``psi`` whose
    exponentially tilted tail ``T(y) = int_y^inf psi(z) e^{-lam z} dz`` is
    finite for every y.  Derived functions::

        Phi(y) = 1 - e^{lam y} T(y)
        phi(y) = psi(y) - lam e^{lam y} T(y)

    ``T(0)`` plays the role of the normalizer ``1 - Phi(0)`` when sampling
    terminal maxima started from zero."""

    kind = "kennedy"

    def __init__(self, lam: float, psi: PiecewiseExpPoly, form=None):
        if lam <= 0:
            raise AdmissibilityError("lambda not positive", f"lam = {lam}")
        psi.check_nonnegative("psi")
        self.lam = float(lam)
        self.psi_fn = psi
        self._tilted = psi.tilted(-lam)
        # divergence check: every unbounded-right piece must decay after tilting
        for pc in self._tilted.pieces:
            if pc.hi == math.inf and any(t.rate >= 0 and t.coef != 0 for t in pc.terms):
                raise AdmissibilityError(
                    "tail integral divergent", f"psi grows at least like e^{{{lam} z}}"
                )
        self._form = form

    def psi(self, x):
        return self.psi_fn(x)

    def tail_integral(self, y):
        """T(y) = int_y^inf psi(z) e^{-lam z} dz, exact."""
        return self._tilted.tail(y)

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        return 1.0 - np.exp(self.lam * y) * self.tail_integral(y)

    def phi(self, y):
        y = np.asarray(y, dtype=float)
        return self.psi_fn(y) - self.lam * np.exp(self.lam * y) * self.tail_integral(y)

    def m0(self, x: float) -> float:
        """Initial martingale value 1 - Phi(x) = e^{lam x} T(x)."""
        return float(np.exp(self.lam * x) * self.tail_integral(x))

    @property
    def normalizer(self) -> float:
        """T(0); equals 1 for specs normalized for direct limit sampling."""
        return float(self.tail_integral(0.0))

    def sample_max_terminal(self, n: int, rng) -> np.ndarray:
        """Terminal maximum draws with density e^{-lam y} psi(y) / T(0) on
        [0, inf)."""
        from .rng import as_generator

        g = as_generator(rng)
        return np.asarray(self._tilted.ppf_measure(g.random(n), lo=0.0), dtype=float).reshape(n)

    def to_config(self) -> str:
        return _render_config("family", _form_dict(self))


def build_kennedy(lam: float, psi_spec) -> KennedyPsi:
    """Entry point per the module contract: accepts a ``PiecewiseExpPoly``
    or a named-form dict and returns a validated Kennedy weight."""
    if isinstance(psi_spec, PiecewiseExpPoly):
        return KennedyPsi(lam, psi_spec)
    if isinstance(psi_spec, dict):
        return KennedyPsi(lam, _exppoly_from_form(psi_spec), form=dict(psi_spec))
    raise TypeError("psi_spec must be a PiecewiseExpPoly or a named-form dict")


# ---------------------------------------------------------------------------
# Family: signed local-time weights
# ---------------------------------------------------------------------------

class SignWeights:
    """Bounded nonnegative ``h_plus, h_minus`` on the half line with
    ``H(l) = (1/2) int_0^l (h_plus + h_minus)``.

    Admissibility: ``H(inf) = 1`` (within 1e-9) and ``H(l) < 1`` for every
    finite ``l`` — families whose combined support is bounded are rejected."""

    kind = "signs"

    def __init__(self, h_plus: PiecewiseExpPoly, h_minus: PiecewiseExpPoly, form=None):
        h_plus.check_nonnegative("h_plus")
        h_minus.check_nonnegative("h_minus")
        if h_plus.support_inf < 0 or h_minus.support_inf < 0:
            raise AdmissibilityError("h support outside R_+")
        self.h_plus_fn = h_plus
        self.h_minus_fn = h_minus
        self._half_sum = h_plus.plus(h_minus).scaled(0.5)
        total = self._half_sum.integral(0.0, math.inf)
        if abs(total - 1.0) > _TOL_NORM:
            raise AdmissibilityError("H(inf) != 1", f"H(inf) = {total!r}")
        if math.isfinite(self._half_sum.support_sup):
            raise AdmissibilityError(
                "H(l)=1 at finite l", f"combined support ends at {self._half_sum.support_sup}"
            )
        self._form = form

    def h_plus(self, l):
        return self.h_plus_fn(l)

    def h_minus(self, l):
        return self.h_minus_fn(l)

    def H(self, l):
        l = np.asarray(l, dtype=float)
        return self._half_sum.cumulative(l)

    def plus_branch_probability(self) -> float:
        """(1/2) int_0^inf h_plus — the chance the limit path escapes upward."""
        return 0.5 * self.h_plus_fn.integral(0.0, math.inf)

    def sample_local_time_terminal(self, n: int, rng) -> np.ndarray:
        """Terminal local-time draws with density (h_plus + h_minus)/2."""
        from .rng import as_generator

        g = as_generator(rng)
        return np.asarray(self._half_sum.ppf_measure(g.random(n), lo=0.0), dtype=float).reshape(n)

    def sign_probability_plus(self, l):
        """Conditional probability of the positive final branch given the
        terminal local time; reconstruction h+/(h+ + h-), validated against
        the weighted route."""
        hp = np.asarray(self.h_plus(l), dtype=float)
        hm = np.asarray(self.h_minus(l), dtype=float)
        return np.divide(hp, hp + hm, out=np.full_like(hp, 0.5), where=(hp + hm) > 0)

    def to_config(self) -> str:
        return _render_config("family", _form_dict(self))


# ---------------------------------------------------------------------------
# Family: atomic measures on maxima pairs
# ---------------------------------------------------------------------------

class AtomMeasure:
    """Finite atomic probability measure ``{(a_j, b_j): w_j}`` with all atom
    coordinates >= alpha > 0 and weights summing to one."""

    kind = "atoms"

    def __init__(self, atoms):
        atoms = [(float(a), float(b), float(w)) for a, b, w in atoms]
        if not atoms:
            raise AdmissibilityError("empty atom list")
        self.a = np.array([a for a, _, _ in atoms])
        self.b = np.array([b for _, b, _ in atoms])
        self.w = np.array([w for _, _, w in atoms])
        self.alpha = float(min(self.a.min(), self.b.min()))
        if self.alpha <= 0:
            raise AdmissibilityError("atom support not bounded away from 0", f"alpha = {self.alpha}")
        if np.any(self.w <= 0):
            raise AdmissibilityError("nonpositive atom weight")
        if abs(self.w.sum() - 1.0) > _TOL_NORM:
            raise AdmissibilityError("weights not normalized", f"sum = {self.w.sum()!r}")
        # exponent (1/a + 1/b)/2 attached to the local time per atom
        self.c = 0.5 * (1.0 / self.a + 1.0 / self.b)

    @property
    def n_atoms(self) -> int:
        return len(self.w)

    @property
    def is_diagonal(self) -> bool:
        return bool(np.all(self.a == self.b))

    def sample_index(self, n: int, rng) -> np.ndarray:
        from .rng import as_generator

        g = as_generator(rng)
        return g.choice(self.n_atoms, size=n, p=self.w)

    def to_config(self) -> str:
        return _render_config("family", _form_dict(self))


def eval_A_nu(nu: AtomMeasure, s, i, l):
    """Weight function sum_j w_j e^{(1/a_j + 1/b_j) l / 2} 1{s <= a_j, i <= b_j}.

    Arguments may be scalars or broadcastable arrays; all must be >= 0."""
    s = np.asarray(s, dtype=float)
    i = np.asarray(i, dtype=float)
    l = np.asarray(l, dtype=float)
    if np.any(s < 0) or np.any(i < 0) or np.any(l < 0):
        raise ValueError("eval_A_nu arguments must be nonnegative")
    out = np.zeros(np.broadcast(s, i, l).shape)
    for j in range(nu.n_atoms):
        alive = (s <= nu.a[j]) & (i <= nu.b[j])
        out = out + nu.w[j] * np.exp(nu.c[j] * l) * alive
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Family: down-crossing sequences
# ---------------------------------------------------------------------------

class GSequence:
    """Decreasing positive sequence with G(0) = 1 and limit 0.

    Two representations: geometric ``G(n) = ratio^n`` or an explicit finite
    list that must end exactly at 0 (the increment sequence then has finite
    support)."""

    kind = "gseq"

    def __init__(self, ratio: float | None = None, values=None):
        if (ratio is None) == (values is None):
            raise AdmissibilityError("G sequence needs exactly one of ratio/values")
        self.ratio = None
        self.values = None
        if ratio is not None:
            if not 0.0 < ratio < 1.0:
                raise AdmissibilityError("G not decreasing to 0", f"ratio = {ratio}")
            self.ratio = float(ratio)
        else:
            v = np.asarray(values, dtype=float)
            if v[0] != 1.0:
                raise AdmissibilityError("G(0) != 1", f"G(0) = {v[0]}")
            if v[-1] != 0.0:
                raise AdmissibilityError("G not decreasing to 0", "explicit list must end at 0")
            if np.any(np.diff(v) >= 0):
                raise AdmissibilityError("G not strictly decreasing")
            self.values = v

    def G(self, n):
        n = np.asarray(n)
        if self.ratio is not None:
            return self.ratio ** n
        n = np.minimum(n, len(self.values) - 1)
        return self.values[n]

    def dG(self, n):
        return self.G(n) - self.G(np.asarray(n) + 1)

    def sample(self, n: int, rng) -> np.ndarray:
        """Draws of the terminal crossing count with pmf dG."""
        from .rng import as_generator

        g = as_generator(rng)
        if self.ratio is not None:
            return g.geometric(1.0 - self.ratio, size=n) - 1
        pmf = -np.diff(self.values)
        return g.choice(len(pmf), size=n, p=pmf)

    def to_config(self) -> str:
        return _render_config("family", _form_dict(self))


# ---------------------------------------------------------------------------
# Named-form plumbing and plain-text serialization
# ---------------------------------------------------------------------------

def _parse_literal(s):
    """literal_eval that also accepts inf/-inf in numeric positions."""
    if not isinstance(s, str):
        return s
    return ast.literal_eval(s.replace("inf", "2e308"))  # 2e308 overflows to float inf


def _exppoly_from_form(form: dict) -> PiecewiseExpPoly:
    kind = form["form"]
    if kind == "uniform":
        return uniform_density(float(form["lo"]), float(form["hi"]))
    if kind == "exponential":
        return exponential_density(float(form["rate"]), float(form.get("lo", 0.0)))
    if kind == "constant":
        return constant_fn(
            float(form["value"]),
            float(form.get("lo", -math.inf)),
            float(form.get("hi", math.inf)),
        )
    if kind == "expdecay":
        return expdecay_fn(float(form["coef"]), float(form["rate"]), float(form.get("lo", 0.0)))
    if kind == "exppoly":
        pieces = form["pieces"]
        pieces = _parse_literal(pieces)
        return PiecewiseExpPoly(
            [Piece(lo, hi, tuple(Term(c, p, q) for c, p, q in terms)) for lo, hi, terms in pieces]
        )
    raise AdmissibilityError("unknown function form", str(kind))


def _form_dict(obj) -> dict:
    if isinstance(obj, DensityPhi):
        d = {"kind": "phi"}
        d.update(obj._form or {"form": "exppoly", "pieces": _pieces_literal(obj.fn)})
        return d
    if isinstance(obj, KennedyPsi):
        d = {"kind": "kennedy", "lam": obj.lam}
        d.update(
            {f"psi_{k}": v for k, v in (obj._form or {"form": "exppoly", "pieces": _pieces_literal(obj.psi_fn)}).items()}
        )
        return d
    if isinstance(obj, SignWeights):
        d = {"kind": "signs"}
        forms = obj._form or {
            "h_plus": {"form": "exppoly", "pieces": _pieces_literal(obj.h_plus_fn)},
            "h_minus": {"form": "exppoly", "pieces": _pieces_literal(obj.h_minus_fn)},
        }
        for side in ("h_plus", "h_minus"):
            d.update({f"{side}_{k}": v for k, v in forms[side].items()})
        return d
    if isinstance(obj, AtomMeasure):
        atoms = [(float(a), float(b), float(w)) for a, b, w in zip(obj.a, obj.b, obj.w)]
        return {"kind": "atoms", "atoms": repr(atoms)}
    if isinstance(obj, GSequence):
        if obj.ratio is not None:
            return {"kind": "gseq", "form": "geometric", "ratio": obj.ratio}
        return {"kind": "gseq", "form": "explicit", "values": repr([float(v) for v in obj.values])}
    raise TypeError(f"not a weight family: {type(obj)!r}")


def _pieces_literal(fn: PiecewiseExpPoly) -> str:
    return repr(
        [
            (pc.lo, pc.hi, [(t.coef, t.power, t.rate) for t in pc.terms])
            for pc in fn.pieces
        ]
    )


def _render_config(section: str, d: dict) -> str:
    lines = [f"[{section}]"]
    lines += [f"{k} = {v}" for k, v in d.items()]
    return "\n".join(lines) + "\n"


def validate_family(spec: dict):
    """Single validation entry point.  ``spec`` carries ``kind`` plus the
    family's named parameters; returns the validated spec object or raises
    :class:`AdmissibilityError` naming the violated condition."""
    kind = spec.get("kind")
    if kind == "phi":
        form = {k: v for k, v in spec.items() if k != "kind"}
        return DensityPhi(_exppoly_from_form(form), form=form)
    if kind == "kennedy":
        psi_form = {k[4:]: v for k, v in spec.items() if k.startswith("psi_")}
        return KennedyPsi(float(spec["lam"]), _exppoly_from_form(psi_form), form=psi_form)
    if kind == "signs":
        hp = {k[len("h_plus_"):]: v for k, v in spec.items() if k.startswith("h_plus_")}
        hm = {k[len("h_minus_"):]: v for k, v in spec.items() if k.startswith("h_minus_")}
        return SignWeights(
            _exppoly_from_form(hp), _exppoly_from_form(hm), form={"h_plus": hp, "h_minus": hm}
        )
    if kind == "atoms":
        atoms = spec["atoms"]
        atoms = _parse_literal(atoms)
        return AtomMeasure(atoms)
    if kind == "gseq":
        if spec.get("form", "geometric") == "geometric":
            return GSequence(ratio=float(spec["ratio"]))
        values = spec["values"]
        values = _parse_literal(values)
        return GSequence(values=values)
    raise AdmissibilityError("unknown family kind", str(kind))


def family_from_config(text: str):
    """Parse a ``[family]`` block rendered by ``to_config`` back into a
    validated family object."""
    import configparser

    cp = configparser.ConfigParser()
    cp.read_string(text)
    if "family" not in cp:
        raise AdmissibilityError("missing [family] section")
    return validate_family(dict(cp["family"]))
