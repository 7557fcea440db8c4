"""Scalar search over the epigraph variable shared by both centralized solvers.

Both relaxations reduce to maximizing R(tau) = 0.5*log2(tau + H(tau)) over
tau in [tau_min, 1], where each H(tau) evaluation is one conic solve.  R is
concave (log of a concave positive function), so a comparison bisection plus
a shrinking local grid pins the maximizer to high accuracy with a few dozen
evaluations.  All evaluations are memoized; callers reuse the cache to grab
the solution bundle at the winning tau or to probe extra points for free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conic import SolverFailure


@dataclass(frozen=True)
class SolveOpts:
    """Tolerances and iteration caps for the centralized solvers."""

    solver_tol: float = 1e-8          # conic interior-point tolerance
    bisection_rel_tol: float = 1e-4   # stop on relative rate change
    bisection_max_iter: int = 50
    probe_step_scale: float = 1e-4    # comparison offset, scaled by 1 - tau_min
    refine_tol: float = 1e-7          # stop local grid once gains drop below
    refine_rounds: int = 8
    polish_rounds: int = 3            # re-solves at the recovered kink point
    outer_rel_tol: float = 1e-3       # alternating-optimization stop
    outer_max_iter: int = 20


def rate_bound(tau: float, h: float) -> float:
    """0.5*log2(tau + H(tau)); the secrecy-rate value of an epigraph point."""
    v = tau + h
    if v <= 0.0:
        return -math.inf
    return 0.5 * math.log2(v)


@dataclass
class TauSearchResult:
    tau: float
    value: float           # H at the winning tau
    bundle: object         # whatever evaluate() attached to that solve
    rate: float            # rate_bound(tau, value)
    iterations: int        # comparison-bisection steps taken
    evaluations: int
    cache: dict = field(repr=False, default_factory=dict)

    def eval_cached(self, evaluate, tau: float):
        """Memoized evaluation; failed points are cached as (-inf, None)."""
        tau = float(tau)
        if tau not in self.cache:
            try:
                self.cache[tau] = evaluate(tau)
            except SolverFailure:
                self.cache[tau] = (-math.inf, None)
            self.evaluations += 1
        return self.cache[tau]


def maximize_rate(evaluate, tau_lo: float, opts: SolveOpts,
                  hint: float | None = None) -> TauSearchResult:
    """Maximize rate_bound(tau, H(tau)) for tau in [tau_lo, 1].

    evaluate(tau) -> (H, bundle).  Comparison bisection: at midpoint tau the
    sign of R(tau) - R(tau - dtau) says on which side of the peak we are.
    Afterwards a 5-point grid inside the final bracket shrinks 4x per round
    until the best value stops improving.

    hint, when given, narrows the initial bracket to +-15% of the usable
    interval around a previously found maximizer.  If the narrowed search
    ends pinned at an artificial bracket edge the full bracket is searched
    again (cached points are reused), so a stale hint costs evaluations
    but never accuracy.

    A point where the backend fails (typically the degenerate tau = 1
    endpoint, where the eavesdropper caps collapse onto a zero-trace face)
    scores -inf and drops out of contention; only an all-points failure
    raises.
    """
    tau_lo = float(tau_lo)
    if not 0.0 < tau_lo <= 1.0:
        raise ValueError("tau_lo must lie in (0, 1]")
    cache: dict[float, tuple] = {}

    def rate_at(tau: float) -> float:
        tau = float(tau)
        if tau not in cache:
            try:
                cache[tau] = evaluate(tau)
            except SolverFailure:
                cache[tau] = (-math.inf, None)
        return rate_bound(tau, cache[tau][0])

    def best_point():
        tau = max(cache, key=lambda t: rate_bound(t, cache[t][0]))
        return tau, rate_bound(tau, cache[tau][0])

    iters = 0

    def run_search(lo, hi):
        nonlocal iters
        rate_at(hi)
        if hi - lo > 1e-14:
            rate_at(lo)
            dtau = opts.probe_step_scale * (1.0 - tau_lo)
            r_prev = None
            steps = 0
            while steps < opts.bisection_max_iter:
                mid = 0.5 * (lo + hi)
                probe = max(mid - dtau, tau_lo)
                r_mid = rate_at(mid)
                r_probe = rate_at(probe)
                steps += 1
                if r_mid <= r_probe:
                    hi = mid
                else:
                    lo = mid
                if r_prev is not None and abs(r_mid - r_prev) <= opts.bisection_rel_tol * max(r_prev, 1e-9):
                    break
                r_prev = r_mid
            iters += steps
        best_tau, best_rate = best_point()
        width = max(hi - lo, 1e-12)
        for _ in range(opts.refine_rounds):
            a = max(tau_lo, best_tau - 0.5 * width)
            b = min(1.0, best_tau + 0.5 * width)
            for t in np.linspace(a, b, 5):
                rate_at(float(t))
            new_tau, new_rate = best_point()
            gain = new_rate - best_rate
            best_tau, best_rate = new_tau, new_rate
            width *= 0.25
            if gain <= opts.refine_tol or width < 1e-12:
                break
        return best_tau, best_rate

    lo, hi = tau_lo, 1.0
    if hint is not None and tau_lo < hint < 1.0:
        w = 0.15 * (1.0 - tau_lo)
        lo = max(tau_lo, hint - w)
        hi = min(1.0, hint + w)
    best_tau, best_rate = run_search(lo, hi)
    if lo > tau_lo or hi < 1.0:
        # a best point at (or refined slightly past) an artificial bracket
        # edge means the hint was stale; redo over the full interval
        edge = 0.02 * (hi - lo)
        stale = (lo > tau_lo and best_tau <= lo + edge) or \
                (hi < 1.0 and best_tau >= hi - edge)
        if stale:
            best_tau, best_rate = run_search(tau_lo, 1.0)

    h_best, bundle = cache[best_tau]
    if not math.isfinite(h_best):
        raise SolverFailure("every tau evaluation failed; instance is numerically intractable")
    return TauSearchResult(tau=best_tau, value=h_best, bundle=bundle,
                           rate=best_rate, iterations=iters,
                           evaluations=len(cache), cache=cache)
