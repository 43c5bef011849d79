"""Boundary-approach probes: sample a solution along paths shrinking into
the singular tip, estimate the attainable limit set, and run the
non-locality experiment (a far-away boundary bump keeps the solution away
from zero arbitrarily close to the tip).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import wos as wos_mod
from .contour import log_radius_at
from .errors import DomainError, InputError
from .fem import BoundaryData, BumpData, ConstantData

REGULAR_LIKE = "regular-like"
SEMIREGULAR_LIKE = "semiregular-like"
STRONGLY_IRREGULAR_LIKE = "strongly-irregular-like"

DEFAULT_STATIONS = 10
DEFAULT_FACTOR = 0.5


@dataclass
class ProbePath:
    """Samples along a path approaching the tip (0, 0).

    Stations carry log-space radii: a level-curve path for c well above
    V(0,0) dives below the representable radius range long before the
    distances become small.
    """

    kind: str
    stations: np.ndarray          # (n, 2) rows (r, z); r may underflow to 0
    log_r: np.ndarray
    distances: np.ndarray
    values: np.ndarray
    stderrs: np.ndarray = dataclass_field(default=None)

    @property
    def limit_estimate(self):
        return float(self.values[-1])

    @property
    def spread(self):
        tail = self.values[-3:]
        return float(tail.max() - tail.min())


def _level_curve_stations(field, c, n, start, factor):
    zs = start * factor ** np.arange(n)
    ts = np.array([log_radius_at(field, c, z) for z in zs])
    return zs, ts


def _path_points(field, spec, n_stations, start, factor):
    """(kind, z array, log-r array) for a path spec.

    Specs: ("level-curve", c) with c in (V(0,0), B); ("axis-below",) for
    r = 0, z -> 0-; ("ray", dr, dz) for a straight approach with direction
    into the region below/beside the tip.
    """
    kind = spec[0]
    if kind == "level-curve":
        c = float(spec[1])
        if not c > field.v00:
            raise InputError("level-curve probes need a level above V(0,0)")
        zs, ts = _level_curve_stations(field, c, n_stations, start, factor)
        return kind, zs, ts
    if kind == "axis-below":
        zs = -start * factor ** np.arange(n_stations)
        return kind, zs, np.full(n_stations, -math.inf)
    if kind == "ray":
        dr, dz = float(spec[1]), float(spec[2])
        norm = math.hypot(dr, dz)
        dists = start * factor ** np.arange(n_stations)
        zs = dists * dz / norm
        rs = dists * dr / norm
        return kind, zs, np.log(np.maximum(rs, 1e-300))
    raise InputError(f"unknown path kind {kind!r}")


def sample_path(source, field, A, B, alpha, beta, path_spec,
                n_stations=DEFAULT_STATIONS, start=0.2,
                factor=DEFAULT_FACTOR, **source_options):
    """Evaluate a solution source along a tip-approach path.

    source is "oracle" (the exact two-constant affine image of the
    potential), "fem" (a SolutionField passed as fem_field, refused inside
    the truncation zone z < 2 z_cut), or "wos" (Monte Carlo, needs
    cross_section/walks/eps/seed options).
    """
    kind, zs, ts = _path_points(field, path_spec, n_stations, start, factor)
    rs = np.exp(ts)
    dists = np.hypot(rs, zs)
    if np.any(np.diff(dists) >= 0):
        raise InputError("path stations must approach the tip strictly")

    stderrs = None
    if source == "oracle":
        levels = np.array([field.value_log_r(t, z) for t, z in zip(ts, zs)])
        outside = (levels <= A) | (levels >= B)
        if np.any(outside):
            k = int(np.argmax(outside))
            raise DomainError(f"station (r={rs[k]}, z={zs[k]}) lies outside "
                              f"the region (V = {levels[k]})")
        vals = alpha + (beta - alpha) * (levels - A) / (B - A)
    elif source == "fem":
        sol = source_options["fem_field"]
        bad = zs < 2.0 * sol.mesh.z_cut
        if np.any(bad):
            raise DomainError(
                f"fem source refused at z={zs[bad][0]}: inside the "
                f"truncation zone z < {2.0 * sol.mesh.z_cut}")
        vals = np.array([sol(r, z) for r, z in zip(rs, zs)])
    elif source == "wos":
        cs = source_options["cross_section"]
        data = source_options["data"]
        walks = source_options.get("walks", 10_000)
        eps = source_options.get("eps", 1e-4)
        seed = source_options.get("seed", 0)
        ests = [wos_mod.estimate(cs, data, (r, 0.0, z), walks=walks,
                                 eps=eps, seed=seed + 1000 * k)
                for k, (r, z) in enumerate(zip(rs, zs))]
        vals = np.array([e.mean for e in ests])
        stderrs = np.array([e.stderr for e in ests])
    else:
        raise InputError(f"unknown source {source!r}")

    return ProbePath(kind=kind, stations=np.column_stack([rs, zs]),
                     log_r=ts, distances=dists, values=vals, stderrs=stderrs)


@dataclass
class LimitSetEstimate:
    lo: float
    hi: float
    classification: str
    per_path: list


def limit_set_estimate(paths, datum_at_tip, tolerance=0.02):
    """Interval of per-path limit estimates and a boundary-behaviour verdict.

    regular-like: all limits agree (within tolerance) with the datum at the
    tip; semiregular-like: limits agree with each other but not with the
    datum; strongly-irregular-like: the limits genuinely spread out.
    """
    if len(paths) < 3:
        raise InputError("need at least 3 paths")
    limits = [p.limit_estimate for p in paths]
    lo, hi = min(limits), max(limits)
    if hi - lo <= tolerance:
        mid = 0.5 * (lo + hi)
        cls = REGULAR_LIKE if abs(mid - datum_at_tip) <= tolerance \
            else SEMIREGULAR_LIKE
    else:
        cls = STRONGLY_IRREGULAR_LIKE
    return LimitSetEstimate(lo=lo, hi=hi, classification=cls,
                            per_path=limits)


@dataclass
class NonlocalityReport:
    bump: BumpData
    levels: list
    stations: list                # per level: (z, value, stderr) triples
    floor: float
    verdict: str


def nonlocality_experiment(field, cs, bump, probe_levels, walks=20_000,
                           eps=1e-4, seed=0, z_stations=None):
    """Non-locality of the singular tip, checked by Monte Carlo.

    Boundary data = a positive bump on the outer component, zero elsewhere.
    The solution is sampled along level curves approaching the tip; the
    verdict is "non-vanishing" when every last-station value stays above
    3 standard errors away from zero, which evidences that the solution
    does not converge to 0 at the tip.
    """
    if bump.amplitude < 0:
        raise InputError("bump amplitude must be nonnegative")
    if z_stations is None:
        z_stations = [0.32, 0.16, 0.08, 0.04, 0.02]
    data = BoundaryData(bump, ConstantData(0.0))
    all_stations, last = [], []
    for c in probe_levels:
        rows = []
        for k, z in enumerate(z_stations):
            t = log_radius_at(field, c, z)
            r = math.exp(t)
            if bump.amplitude == 0.0:
                mean, err = 0.0, 0.0
            else:
                est = wos_mod.estimate(cs, data, (r, 0.0, z), walks=walks,
                                       eps=eps,
                                       seed=seed + 7919 * k + 104729 * int(100 * c))
                mean, err = est.mean, est.stderr
            rows.append((z, mean, err))
        all_stations.append((c, rows))
        last.append(rows[-1])
    floor = min(v - 3.0 * e for _, v, e in last)
    verdict = "non-vanishing" if floor > 0 else "vanishing"
    return NonlocalityReport(bump=bump, levels=list(probe_levels),
                             stations=all_stations, floor=floor,
                             verdict=verdict)
