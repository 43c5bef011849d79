"""Heuristic convergence classification for positive series tails.

Shared by the Dini-continuity report (integral increments over shrinking
scales) and the dyadic log-series regularity test.  The rules are
deliberately conservative: a series is called convergent only when the tail
is dominated by a geometric c*rho^j (fitted rho < 1) or a power c/j^p with
fitted p > 1.1, and divergent only when the tail stays bounded below by
c/(j log j).  Everything else is inconclusive -- numerical series
convergence is undecidable in general and we never overstate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

CONVERGENT = "convergent"
DIVERGENT = "divergent"
INCONCLUSIVE = "inconclusive"

# Fit thresholds.  The divergence floor is checked before the power rule:
# terms like 1/(j log j) fit a power exponent slightly above 1 on any finite
# window, so the floor test must get the first look.  The power guard keeps
# clearly summable tails (p well above 1.35) away from the floor test.
_POWER_CONVERGENT = 1.1
_POWER_DIVERGENT_GUARD = 1.35
_GEOMETRIC_RHO = 0.97
_FLOOR_DECAY = 0.85


@dataclass
class TailFit:
    """Least-squares diagnostics for a positive tail."""

    classification: str
    power_exponent: float        # fitted p in t_j ~ c / j^p
    geometric_ratio: float       # fitted rho in t_j ~ c * rho^j
    floor_ratio: float           # decay of t_j * j * log j across the tail
    notes: str = ""


def _lsq_slope(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm = x - x.mean()
    return float(np.dot(xm, y) / np.dot(xm, xm))


def fit_tail(terms, first_index=1):
    """Classify the tail of a positive series.

    Parameters
    ----------
    terms : sequence of float
        Consecutive series terms, all strictly positive and finite.
    first_index : int
        The j-value of ``terms[0]`` (terms are indexed j, j+1, ...).

    Returns
    -------
    TailFit
    """
    t = np.asarray(terms, dtype=float)
    if t.ndim != 1 or len(t) < 8:
        raise InputError("tail classification needs at least 8 terms")
    if not np.all(np.isfinite(t)) or np.any(t <= 0):
        raise InputError("tail classification needs positive finite terms")

    j = np.arange(first_index, first_index + len(t), dtype=float)
    cut = len(t) // 2
    jt, tt = j[cut:], t[cut:]

    log_t = np.log(tt)
    p_hat = -_lsq_slope(np.log(jt), log_t)
    rho_hat = float(np.exp(_lsq_slope(jt, log_t)))

    # Floor test against c/(j log j): v_j constant or growing means the tail
    # is not summable by the Abel-Dini comparison scale.
    v = tt * jt * np.log(np.maximum(jt, 2.0))
    k = max(2, len(v) // 4)
    floor_ratio = float(np.mean(v[-k:]) / np.mean(v[:k]))

    if p_hat <= _POWER_DIVERGENT_GUARD and floor_ratio >= _FLOOR_DECAY:
        return TailFit(DIVERGENT, p_hat, rho_hat, floor_ratio,
                       "bounded below by c/(j log j) on the sampled tail")
    if p_hat > _POWER_CONVERGENT:
        return TailFit(CONVERGENT, p_hat, rho_hat, floor_ratio,
                       f"dominated by c/j^p with p ~ {p_hat:.3g}")
    if rho_hat <= _GEOMETRIC_RHO:
        # Guard against power tails masquerading as geometric: a genuine
        # geometric tail keeps a steady step-to-step ratio.
        ratios = tt[1:] / tt[:-1]
        if np.max(ratios) <= _GEOMETRIC_RHO:
            return TailFit(CONVERGENT, p_hat, rho_hat, floor_ratio,
                           f"dominated by c*rho^j with rho ~ {rho_hat:.3g}")
    return TailFit(INCONCLUSIVE, p_hat, rho_hat, floor_ratio,
                   "no rule matched; refusing to guess")
