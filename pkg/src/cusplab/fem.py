"""Axisymmetric P1 finite elements for the Dirichlet problem on the
meridian cross-section.

The weak form is the weighted Dirichlet form  integral r grad(u).grad(w),
discretized with linear triangles and one-point quadrature of the weight at
the element centroid.  Dirichlet values are eliminated (not penalized), the
reduced system is solved by Jacobi-preconditioned conjugate gradients, and
the stored energy is the full 2 pi weighted discrete Dirichlet integral.

Axis nodes carry no essential condition: the weight r vanishes there, so
the discrete problem needs none.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg

from .errors import ConvergenceError, DomainError, InputError, MeshError
from .mesh import CAP, ESSENTIAL_TAGS, INNER, OUTER


@dataclass(frozen=True)
class ConstantData:
    value: float

    def __call__(self, s):
        return self.value + 0.0 * np.asarray(s, dtype=float)


@dataclass(frozen=True)
class BumpData:
    """Smooth compactly supported bump in normalized arc length:
    amplitude * exp(1 - 1/(1 - x^2)) for x = (s - center)/width inside
    |x| < 1, zero outside."""

    center: float
    width: float
    amplitude: float

    def __post_init__(self):
        if not math.isfinite(self.amplitude):
            raise InputError("bump amplitude must be finite")
        if self.width <= 0:
            raise InputError("bump width must be positive")

    def __call__(self, s):
        x = (np.asarray(s, dtype=float) - self.center) / self.width
        out = np.zeros_like(x)
        inside = np.abs(x) < 1.0
        out[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
        return out


@dataclass(frozen=True)
class TabulatedData:
    values: tuple

    def __call__(self, s):
        raise InputError("tabulated data has no arc-length form; it binds "
                         "to boundary nodes directly")


class BoundaryData:
    """Per-tag boundary data for the essential tags.

    The cusp cap defaults to the inner-level datum (the continuous datum is
    B on the whole inner component including the tip), except that a bump on
    the inner component evaluates to 0 on the cap.
    """

    def __init__(self, outer, inner, cap=None):
        self.spec = {OUTER: outer, INNER: inner}
        if cap is not None:
            self.spec[CAP] = cap
        elif isinstance(inner, BumpData):
            self.spec[CAP] = ConstantData(0.0)
        else:
            self.spec[CAP] = inner

    @classmethod
    def constants(cls, outer_value, inner_value, cap_value=None):
        cap = None if cap_value is None else ConstantData(cap_value)
        return cls(ConstantData(outer_value), ConstantData(inner_value), cap)

    def node_values(self, mesh):
        """Values at every constrained node of the mesh, keyed by node id."""
        out = {}
        for tag, spec in self.spec.items():
            arc = mesh.component_arcs.get(tag)
            ids = [i for i, t in enumerate(mesh.node_tags) if t == tag]
            if not ids:
                continue
            if isinstance(spec, TabulatedData):
                if arc:
                    ids = sorted(ids, key=lambda i: arc.get(i, 0.0))
                if len(spec.values) != len(ids):
                    raise InputError(
                        f"tabulated data for {tag} has {len(spec.values)} "
                        f"values for {len(ids)} tagged nodes")
                for i, v in zip(ids, spec.values):
                    out[i] = float(v)
            else:
                for i in ids:
                    s = arc.get(i, 0.0) if arc else 0.0
                    out[i] = float(spec(s))
        return out

    def extremes(self):
        lo, hi = math.inf, -math.inf
        for spec in self.spec.values():
            if isinstance(spec, ConstantData):
                vals = [spec.value]
            elif isinstance(spec, BumpData):
                vals = [0.0, spec.amplitude]
            else:
                vals = list(spec.values)
            lo = min(lo, min(vals))
            hi = max(hi, max(vals))
        return lo, hi


def assemble(mesh):
    """Weighted stiffness matrix: K[i,j] = sum_e r_bar_e area_e b_i.b_j."""
    pts = mesh.nodes
    tris = mesh.triangles
    rows, cols, vals = [], [], []
    for tri in tris:
        p = pts[tri]
        r_bar = p[:, 0].mean()
        x, y = p[:, 0], p[:, 1]
        area2 = ((x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]))
        if area2 <= 0:
            raise MeshError(f"degenerate or flipped element {tri}")
        area = 0.5 * area2
        bx = np.array([y[1] - y[2], y[2] - y[0], y[0] - y[1]]) / area2
        by = np.array([x[2] - x[1], x[0] - x[2], x[1] - x[0]]) / area2
        ke = r_bar * area * (np.outer(bx, bx) + np.outer(by, by))
        for a in range(3):
            for b in range(3):
                rows.append(tri[a])
                cols.append(tri[b])
                vals.append(ke[a, b])
    n = len(pts)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


@dataclass
class SolutionField:
    """Nodal solution with its weighted Dirichlet energy and solver stats."""

    mesh: object
    values: np.ndarray
    dirichlet_energy: float
    iterations: int
    residual: float
    boundary_values: dict = dataclass_field(repr=False, default_factory=dict)

    def __call__(self, r, z):
        """Barycentric interpolation at a point inside the mesh."""
        tri = _locate(self.mesh, r, z)
        if tri is None:
            raise DomainError(f"point (r={r}, z={z}) lies outside the mesh")
        idx, lam = tri
        return float(np.dot(lam, self.values[idx]))

    def max_principle_margins(self):
        lo, hi = min(self.boundary_values.values()), max(self.boundary_values.values())
        return (float(self.values.min() - lo), float(hi - self.values.max()))


def _locate(mesh, r, z, tol=1e-12):
    p = np.array([r, z])
    pts = mesh.nodes
    for k, tri in enumerate(mesh.triangles):
        a, b, c = pts[tri]
        m = np.column_stack([b - a, c - a])
        try:
            lam12 = np.linalg.solve(m, p - a)
        except np.linalg.LinAlgError:
            continue
        lam = np.array([1.0 - lam12.sum(), lam12[0], lam12[1]])
        if np.all(lam >= -tol):
            return tri, lam
    return None


def solve_dirichlet(mesh, data, tol=1e-10, maxiter=None):
    """Solve the discrete Dirichlet problem by energy minimization.

    Boundary values are eliminated; the reduced SPD system is solved with
    Jacobi-preconditioned CG to the given relative residual.
    """
    K = assemble(mesh)
    n = K.shape[0]
    bc = data.node_values(mesh) if isinstance(data, BoundaryData) else dict(data)
    for tag in ESSENTIAL_TAGS:
        tagged = [i for i, t in enumerate(mesh.node_tags) if t == tag]
        missing = [i for i in tagged if i not in bc]
        if missing:
            raise InputError(f"boundary data missing for tag {tag!r}")

    fixed = np.array(sorted(bc), dtype=int)
    free = np.array([i for i in range(n) if i not in bc], dtype=int)
    u = np.zeros(n)
    u[fixed] = [bc[i] for i in fixed]

    K_ff = K[free][:, free].tocsr()
    rhs = -K[free][:, fixed] @ u[fixed]

    diag = K_ff.diagonal()
    if np.any(diag <= 0):
        raise MeshError("stiffness diagonal must be positive on free nodes")
    M = sparse.diags(1.0 / diag)

    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    if maxiter is None:
        maxiter = int(20 * math.sqrt(len(free)) + 1000)
    x, info = cg(K_ff, rhs, rtol=tol, atol=0.0, maxiter=maxiter, M=M,
                 callback=count)
    rhs_norm = np.linalg.norm(rhs)
    residual = float(np.linalg.norm(rhs - K_ff @ x) / rhs_norm) \
        if rhs_norm > 0 else 0.0
    if info > 0:
        raise ConvergenceError(
            f"CG hit the iteration cap {maxiter} at residual {residual:.2e}",
            stats={"iterations": iterations, "residual": residual})
    u[free] = x
    energy = 2.0 * math.pi * float(u @ (K @ u))
    return SolutionField(mesh=mesh, values=u, dirichlet_energy=energy,
                         iterations=iterations, residual=residual,
                         boundary_values=bc)


def energy(field):
    return field.dirichlet_energy


def two_constant_oracle(field, A, B, alpha, beta, points):
    """Exact solution for data constant on each boundary component:
    alpha + (beta - alpha) (V - A)/(B - A), the harmonic affine image of V
    with the right boundary limits quasi-everywhere."""
    out = []
    for r, z in points:
        v = field.value(r, z)
        if not A < v < B:
            raise DomainError(f"point (r={r}, z={z}) lies outside the region "
                              f"(V = {v})")
        out.append(alpha + (beta - alpha) * (v - A) / (B - A))
    return out
