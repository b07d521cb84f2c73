"""Numeric polynomial systems, the line-fiber solver, and path tracking.

The single heavy computation of the package is following the lines
through a moving base point around closed loops.  Everything here works
in plain double-precision complex arithmetic: exact input polynomials
are flattened to coefficient/exponent arrays, fibers are solved by a
Sylvester resultant of the restricted quadric and cubic, and tracking
uses an extrapolation predictor with a Newton corrector and adaptive
steps.  No certification — consistency is checked by loop closure and
step-halving agreement in the tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_CONFIG, ExperimentConfig
from .errors import (
    NoConvergence,
    NonIsolated,
    NotOnCubic,
    PathCrossing,
    PathFailure,
    SingularJacobian,
    SingularPoint,
)
from .multipoly import MultiPoly


# ---------------------------------------------------------------------------
# flattened complex polynomials


class ComplexPoly:
    """A polynomial over C stored as exponent rows and a coefficient vector."""

    def __init__(self, n_vars: int, exps: np.ndarray, coeffs: np.ndarray):
        self.n_vars = n_vars
        self.exps = np.asarray(exps, dtype=np.int64).reshape(-1, n_vars)
        self.coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
        self._partials: List[Optional["ComplexPoly"]] = [None] * n_vars

    @classmethod
    def from_exact(cls, f: MultiPoly) -> "ComplexPoly":
        exps = []
        coeffs = []
        for e, c in sorted(f.terms.items()):
            exps.append(e)
            coeffs.append(c.to_complex())
        if not exps:
            exps = [(0,) * f.n_vars]
            coeffs = [0j]
        return cls(f.n_vars, np.array(exps), np.array(coeffs))

    @classmethod
    def from_terms(cls, n_vars: int, terms: dict) -> "ComplexPoly":
        exps = list(terms.keys()) or [(0,) * n_vars]
        coeffs = [terms[e] for e in terms] or [0j]
        return cls(n_vars, np.array(exps), np.array(coeffs))

    def evaluate(self, z: np.ndarray) -> complex:
        return complex(np.prod(z[None, :] ** self.exps, axis=1) @ self.coeffs)

    def partial(self, k: int) -> "ComplexPoly":
        if self._partials[k] is None:
            keep = self.exps[:, k] > 0
            if not np.any(keep):
                self._partials[k] = ComplexPoly(
                    self.n_vars,
                    np.zeros((1, self.n_vars), dtype=np.int64),
                    np.zeros(1, dtype=complex),
                )
            else:
                exps = self.exps[keep].copy()
                coeffs = self.coeffs[keep] * exps[:, k]
                exps[:, k] -= 1
                self._partials[k] = ComplexPoly(self.n_vars, exps, coeffs)
        return self._partials[k]

    def gradient_at(self, z: np.ndarray) -> np.ndarray:
        return np.array([self.partial(k).evaluate(z) for k in range(self.n_vars)])


class ComplexSystem:
    """A square-ish list of ComplexPoly equations with batch eval/Jacobian."""

    def __init__(self, polys: Sequence[ComplexPoly]):
        if not polys:
            raise ValueError("a system needs at least one equation")
        self.polys = list(polys)
        self.n_vars = polys[0].n_vars
        for p in polys:
            if p.n_vars != self.n_vars:
                raise ValueError("equations must share a variable count")

    @classmethod
    def from_exact(cls, polys: Sequence[MultiPoly]) -> "ComplexSystem":
        return cls([ComplexPoly.from_exact(p) for p in polys])

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        return np.array([p.evaluate(z) for p in self.polys])

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        return np.array([p.gradient_at(z) for p in self.polys])


# ---------------------------------------------------------------------------
# Newton correction


@dataclass
class NumericSolution:
    """One point of a numeric fiber, with its residual and cluster size."""

    coordinates: np.ndarray
    residual: float
    cluster_size: int = 1

    @property
    def is_simple(self) -> bool:
        return self.cluster_size == 1

    def to_json(self) -> dict:
        return {
            "coordinates": [
                {"re": float(c.real), "im": float(c.imag)} for c in self.coordinates
            ],
            "residual": self.residual,
            "cluster_size": self.cluster_size,
        }


def newton_correct(
    system, z0: np.ndarray, cfg: ExperimentConfig = DEFAULT_CONFIG
) -> NumericSolution:
    """Plain Newton iteration to tol_newton; loud failure otherwise."""
    z = np.array(z0, dtype=complex)
    for _ in range(cfg.max_newton_iters):
        fval = system.evaluate(z)
        if np.max(np.abs(fval)) < cfg.tol_newton:
            return NumericSolution(z, float(np.max(np.abs(fval))))
        jac = system.jacobian(z)
        try:
            step = np.linalg.solve(jac, fval)
        except np.linalg.LinAlgError:
            raise SingularJacobian("Newton hit a singular Jacobian")
        if not np.all(np.isfinite(step)) or np.max(np.abs(step)) > 1e8:
            raise SingularJacobian("Newton step blew up")
        z = z - step
    fval = system.evaluate(z)
    if np.max(np.abs(fval)) < cfg.tol_newton:
        return NumericSolution(z, float(np.max(np.abs(fval))))
    raise NoConvergence("Newton did not reach tolerance")


def _newton_light(evaluate, jacobian, z0, tol, max_iters):
    """Corrector used inside tracking; reports iterations instead of raising."""
    z = np.array(z0, dtype=complex)
    for it in range(1, max_iters + 1):
        fval = evaluate(z)
        if np.max(np.abs(fval)) < tol:
            return z, it, True
        try:
            step = np.linalg.solve(jacobian(z), fval)
        except np.linalg.LinAlgError:
            return z, it, False
        if not np.all(np.isfinite(step)) or np.max(np.abs(step)) > 1e6:
            return z, it, False
        z = z - step
    return z, max_iters + 1, np.max(np.abs(evaluate(z))) < tol


# ---------------------------------------------------------------------------
# the 6-line fiber by elimination


def _roots_with_infinity(coeffs_ascending: np.ndarray, expected: int, rel: float = 1e-9):
    coeffs = np.asarray(coeffs_ascending, dtype=complex)
    scale = float(np.max(np.abs(coeffs)))
    roots: List[complex] = []
    top = expected
    while top >= 0 and abs(coeffs[top]) < rel * scale:
        roots.append(np.inf)
        top -= 1
    finite = np.roots(coeffs[: top + 1][::-1]) if top >= 1 else np.array([])
    roots.extend(finite.tolist())
    return roots


_SLICE_ROWS = np.array(
    [
        [0.31 + 0.64j, -0.52 + 0.17j, 0.88 - 0.29j, 0.05 + 0.73j, -0.61 - 0.44j, 0.27 + 0.09j],
    ]
)

_ROTATIONS = [
    np.array(
        [
            [0.36 + 0.21j, 0.52 - 0.44j, -0.61 + 0.08j],
            [-0.47 + 0.33j, 0.29 + 0.55j, 0.18 - 0.42j],
            [0.25 - 0.58j, -0.11 + 0.36j, 0.57 + 0.31j],
        ]
    ),
    np.eye(3, dtype=complex),
    np.array(
        [
            [0.71 - 0.09j, -0.23 + 0.61j, 0.14 + 0.22j],
            [0.18 + 0.42j, 0.66 + 0.05j, -0.51 - 0.17j],
            [-0.33 + 0.27j, 0.08 - 0.39j, 0.62 + 0.44j],
        ]
    ),
    np.array(
        [
            [0.12 + 0.83j, 0.41 + 0.02j, -0.27 - 0.35j],
            [-0.56 + 0.11j, 0.22 - 0.64j, 0.38 + 0.19j],
            [0.31 - 0.24j, -0.53 + 0.29j, 0.49 - 0.07j],
        ]
    ),
]


def _restricted_pair(f: MultiPoly, xc: np.ndarray, basis: np.ndarray):
    """Coefficient dicts of the polar quadric and the cubic on the basis."""
    cubic = f.restrict_complex(basis)
    quad: dict = {}
    for i, df in enumerate(f.gradient()):
        part = df.restrict_complex(basis)
        for e, v in part.items():
            quad[e] = quad.get(e, 0j) + xc[i] * v
    return quad, cubic


def _u_layers(terms: dict, deg: int) -> List[np.ndarray]:
    """Split a 3-variable coefficient dict by the power of the last variable.

    Layer k is the binary form in (s, t) multiplying u^k, returned as
    ascending t-coefficients of length deg - k + 1.
    """
    layers = []
    for k in range(deg + 1):
        arr = np.zeros(deg - k + 1, dtype=complex)
        layers.append(arr)
    for (a, b, c), v in terms.items():
        layers[c][b] += v
    return layers


def _sylvester_det(quad_layers, cubic_layers, s: complex, t: complex) -> complex:
    def at(layer, d):
        # layer holds ascending t-exponent coefficients of a degree-d binary form
        return sum(
            layer[k] * s ** (d - k) * t**k for k in range(len(layer))
        )

    a0 = at(quad_layers[0], 2)
    a1 = at(quad_layers[1], 1)
    a2 = at(quad_layers[2], 0)
    b0 = at(cubic_layers[0], 3)
    b1 = at(cubic_layers[1], 2)
    b2 = at(cubic_layers[2], 1)
    b3 = at(cubic_layers[3], 0)
    m = np.array(
        [
            [a2, a1, a0, 0, 0],
            [0, a2, a1, a0, 0],
            [0, 0, a2, a1, a0],
            [b3, b2, b1, b0, 0],
            [0, b3, b2, b1, b0],
        ],
        dtype=complex,
    )
    return complex(np.linalg.det(m))


def _polish_pair(w: np.ndarray, quad: ComplexPoly, cubic: ComplexPoly, cfg) -> np.ndarray:
    w = np.array(w, dtype=complex)
    chart = int(np.argmax(np.abs(w)))
    free = [k for k in range(3) if k != chart]
    for _ in range(cfg.max_newton_iters):
        fval = np.array([quad.evaluate(w), cubic.evaluate(w)])
        if np.max(np.abs(fval)) < cfg.tol_newton:
            return w
        grad_q = quad.gradient_at(w)
        grad_c = cubic.gradient_at(w)
        jac = np.array([[grad_q[free[0]], grad_q[free[1]]], [grad_c[free[0]], grad_c[free[1]]]])
        try:
            delta = np.linalg.solve(jac, fval)
        except np.linalg.LinAlgError:
            return w  # clustered root: leave for the cluster detector
        if np.max(np.abs(delta)) > 1e3:
            return w
        w[free[0]] -= delta[0]
        w[free[1]] -= delta[1]
    return w


def solve_lines_through_point(
    f: MultiPoly, x: Sequence, cfg: ExperimentConfig = DEFAULT_CONFIG
) -> List[NumericSolution]:
    """Directions of all lines on V(f) through x, solved by elimination.

    The tangency conditions restrict to a quadric and a cubic on a
    projective plane of directions; their Sylvester resultant in the
    last coordinate is a binary sextic solved numerically.  Each
    solution carries the full direction vector (orthogonal to x) and
    cluster sizes flag multiple lines.  A vanishing resultant means the
    point carries a positive-dimensional line family.
    """
    xc = np.array(
        [c.to_complex() if hasattr(c, "to_complex") else complex(c) for c in x]
    )
    xc = xc / np.linalg.norm(xc)
    n = f.n_vars
    fc = ComplexPoly.from_exact(f)
    if abs(fc.evaluate(xc)) > 1e-8:
        raise NotOnCubic("fiber base point is not on the hypersurface")
    grad = fc.gradient_at(xc)
    if np.linalg.norm(grad) < 1e-10:
        raise SingularPoint("gradient vanishes at the base point")

    rows = [grad, xc.conj()]
    _, _, vh = np.linalg.svd(np.vstack(rows))
    basis_full = vh[2:].conj()
    if basis_full.shape[0] > 3:
        # slice the direction space down to a plane with fixed generic rows
        extra = basis_full.shape[0] - 3
        cuts = _SLICE_ROWS[:extra, : basis_full.shape[1]]
        proj = cuts @ basis_full.T.conj()
        _, _, wh = np.linalg.svd(proj)
        basis_full = wh[extra:].conj() @ basis_full

    last_error = None
    for rotation in _ROTATIONS:
        basis = rotation @ basis_full
        quad_terms, cubic_terms = _restricted_pair(f, xc, basis)
        quad_layers = _u_layers(quad_terms, 2)
        cubic_layers = _u_layers(cubic_terms, 3)
        entry_scale = max(
            float(np.max(np.abs(np.concatenate(quad_layers)))),
            float(np.max(np.abs(np.concatenate(cubic_layers)))),
        )
        if entry_scale == 0.0:
            raise NonIsolated("restricted system vanishes identically")
        nodes = np.exp(2j * np.pi * np.arange(7) / 7)
        dets = np.array(
            [_sylvester_det(quad_layers, cubic_layers, 1.0, t) for t in nodes]
        )
        det_scale = float(np.max(np.abs(dets)))
        if det_scale < 1e-13 * max(1.0, entry_scale) ** 5:
            raise NonIsolated("eliminant vanishes: a line family passes through x")
        # inverse discrete Fourier transform recovers the sextic coefficients
        powers = np.arange(7)
        sextic = (dets @ np.exp(-2j * np.pi * np.outer(powers, powers) / 7).T) / 7.0
        if abs(sextic[6]) < 1e-8 * det_scale and abs(sextic[0]) < 1e-8 * det_scale:
            last_error = "eliminant degenerate at both chart ends"
            continue

        quad_poly = ComplexPoly.from_terms(3, quad_terms)
        cubic_poly = ComplexPoly.from_terms(3, cubic_terms)
        params = _lift_roots(
            _roots_with_infinity(sextic, 6), quad_layers, cubic_layers,
            quad_poly, cubic_poly, cfg,
        )
        if params is None:
            last_error = "lift failed for a resultant root"
            continue
        groups = _cluster_params(params, quad_poly, cubic_poly, cfg)
        return _solutions_from_groups(groups, params, basis, f, xc)
    raise NoConvergence(last_error or "all chart rotations failed")


def _lift_roots(roots, quad_layers, cubic_layers, quad_poly, cubic_poly, cfg):
    """Lift eliminant roots to full parameter points.

    Distinct fiber points can share one root of the eliminant, so roots
    are grouped first and every lift of the last coordinate that nearly
    satisfies the cubic is kept, distributed over the group's copies.
    """
    st_pts = []
    for root in roots:
        if root is np.inf:
            st_pts.append(np.array([0.0, 1.0], dtype=complex))
        else:
            st = np.array([1.0, root], dtype=complex)
            st_pts.append(st / np.linalg.norm(st))
    groups: List[List[int]] = []
    for i, st in enumerate(st_pts):
        for g in groups:
            overlap = abs(np.vdot(st_pts[g[0]], st))
            if np.sqrt(max(0.0, 1.0 - min(1.0, overlap) ** 2)) < 1e-5:
                g.append(i)
                break
        else:
            groups.append([i])
    params: List[np.ndarray] = []
    for g in groups:
        st = st_pts[g[0]]
        if len(g) > 1:
            aligned = []
            for m in g:
                phase = np.vdot(st_pts[m], st)
                aligned.append(st_pts[m] * (phase / abs(phase)) if abs(phase) > 0 else st_pts[m])
            st = np.mean(aligned, axis=0)
            st = st / np.linalg.norm(st)
        qu = np.array(
            [
                sum(
                    quad_layers[k][m] * st[0] ** (2 - k - m) * st[1] ** m
                    for m in range(len(quad_layers[k]))
                )
                for k in range(3)
            ]
        )
        cu = np.array(
            [
                sum(
                    cubic_layers[k][m] * st[0] ** (3 - k - m) * st[1] ** m
                    for m in range(len(cubic_layers[k]))
                )
                for k in range(4)
            ]
        )
        cu_scale = float(np.max(np.abs(cu)))
        if np.max(np.abs(qu)) == 0.0 or cu_scale == 0.0:
            return None
        candidates = [u for u in _roots_with_infinity(qu, 2) if u is not np.inf]
        scored = []
        for u in candidates:
            val = abs(cu[0] + cu[1] * u + cu[2] * u * u + cu[3] * u**3)
            scored.append((val / (cu_scale * max(1.0, abs(u)) ** 3), u))
        scored.sort(key=lambda p: p[0])
        if not scored:
            return None
        valid = [u for rel, u in scored if rel < 1e-4] or [scored[0][1]]
        for idx, _ in enumerate(g):
            u = valid[idx % len(valid)]
            w = np.array([st[0], st[1], u], dtype=complex)
            w = w / np.max(np.abs(w))
            params.append(_polish_pair(w, quad_poly, cubic_poly, cfg))
    return params if len(params) == 6 else None


def _param_gap(w1: np.ndarray, w2: np.ndarray) -> float:
    overlap = abs(np.vdot(w1, w2)) / (np.linalg.norm(w1) * np.linalg.norm(w2))
    return float(np.sqrt(max(0.0, 1.0 - min(1.0, overlap) ** 2)))


def _newton_contraction(w, quad: ComplexPoly, cubic: ComplexPoly) -> float:
    """Ratio of two Newton step sizes from a nudged start.

    Simple roots contract quadratically, so the ratio is tiny; a root of
    multiplicity m contracts linearly with rate (m-1)/m and the ratio
    stays near 1/2 or above.
    """
    chart = int(np.argmax(np.abs(w)))
    free = [k for k in range(3) if k != chart]
    nudge = np.array([1.0 + 0.7j, -0.6 + 0.4j, 0.3 - 0.8j])[:2]
    z = np.array(w, dtype=complex)
    z[free[0]] += 1e-5 * nudge[0]
    z[free[1]] += 1e-5 * nudge[1]
    steps = []
    for _ in range(2):
        fval = np.array([quad.evaluate(z), cubic.evaluate(z)])
        gq = quad.gradient_at(z)
        gc = cubic.gradient_at(z)
        jac = np.array([[gq[free[0]], gq[free[1]]], [gc[free[0]], gc[free[1]]]])
        try:
            delta = np.linalg.solve(jac, fval)
        except np.linalg.LinAlgError:
            return 1.0
        steps.append(float(np.max(np.abs(delta))))
        z[free[0]] -= delta[0]
        z[free[1]] -= delta[1]
    if steps[0] < 1e-14:
        return 0.0
    return steps[1] / steps[0]


def _cluster_params(params, quad: ComplexPoly, cubic: ComplexPoly, cfg) -> List[List[int]]:
    """Group parameter roots: tight radius first, then a contraction test.

    Noise can split a double root by far more than the tight radius, so
    roots that sit within 1e-3 of each other and refuse to contract
    quadratically are merged as one multiple point.
    """
    n = len(params)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        parent[find(a)] = find(b)

    for i in range(n):
        for j in range(i + 1, n):
            gap = _param_gap(params[i], params[j])
            if gap < cfg.tol_cluster:
                union(i, j)
            elif gap < 1e-3 and _newton_contraction(params[i], quad, cubic) > 0.15:
                union(i, j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _solutions_from_groups(groups, params, basis, f, xc) -> List[NumericSolution]:
    fc = ComplexPoly.from_exact(f)
    grads = [ComplexPoly.from_exact(df) for df in f.gradient()]
    grad_x = np.array([g.evaluate(xc) for g in grads])
    out: List[NumericSolution] = []
    for members in groups:
        if len(members) == 1:
            w = params[members[0]]
        else:
            # noise splits a multiple root symmetrically; the mean cancels it
            anchor = params[members[0]]
            aligned = []
            for m in members:
                wm = params[m]
                phase = np.vdot(wm, anchor)
                aligned.append(wm * (phase / abs(phase)) if abs(phase) > 0 else wm)
            w = np.mean(aligned, axis=0)
        v = w @ basis
        v = v / np.linalg.norm(v)
        res = max(
            abs(fc.evaluate(v)),
            abs(grad_x @ v),
            abs(np.array([g.evaluate(v) for g in grads]) @ xc),
        )
        out.append(NumericSolution(v, float(res), cluster_size=len(members)))
    return out


# ---------------------------------------------------------------------------
# the moving-fiber system


class LineFiberSystem:
    """The square system cutting out line directions through a moving point.

    Unknown y in C^(n+1); equations: a fixed shift-killing functional,
    an affine scale, tangency of the base gradient, the mirrored polar,
    and the cubic itself.  For a smooth base point these have one simple
    solution per line through it (six on a threefold).
    """

    def __init__(self, f: MultiPoly, mu: np.ndarray, chart: np.ndarray):
        self.n = f.n_vars
        self.f = ComplexPoly.from_exact(f)
        self.grads = [ComplexPoly.from_exact(df) for df in f.gradient()]
        self.hess = [
            [ComplexPoly.from_exact(df.partial(j)) for j in range(self.n)]
            for df in f.gradient()
        ]
        self.mu = np.asarray(mu, dtype=complex)
        self.chart = np.asarray(chart, dtype=complex)
        self._x: Optional[np.ndarray] = None
        self._grad_x: Optional[np.ndarray] = None

    def set_base(self, x: np.ndarray) -> None:
        self._x = np.asarray(x, dtype=complex)
        self._grad_x = np.array([g.evaluate(self._x) for g in self.grads])

    def evaluate(self, y: np.ndarray) -> np.ndarray:
        x = self._x
        grad_y = np.array([g.evaluate(y) for g in self.grads])
        return np.array(
            [
                self.mu @ y,
                self.chart @ y - 1.0,
                self._grad_x @ y,
                grad_y @ x,
                self.f.evaluate(y),
            ]
        )

    def jacobian(self, y: np.ndarray) -> np.ndarray:
        x = self._x
        grad_y = np.array([g.evaluate(y) for g in self.grads])
        hess_y = np.array(
            [[self.hess[i][j].evaluate(y) for j in range(self.n)] for i in range(self.n)]
        )
        return np.vstack(
            [
                self.mu,
                self.chart,
                self._grad_x,
                x @ hess_y,
                grad_y,
            ]
        )

    def base_derivative(self, y: np.ndarray, dx: np.ndarray) -> np.ndarray:
        """Derivative of the equations along a base-point velocity dx."""
        x = self._x
        hess_x = np.array(
            [[self.hess[i][j].evaluate(x) for j in range(self.n)] for i in range(self.n)]
        )
        grad_y = np.array([g.evaluate(y) for g in self.grads])
        return np.array(
            [0j, 0j, (hess_x @ dx) @ y, grad_y @ dx, 0j]
        )

    def representative(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Shift and scale a direction to satisfy the two chart equations."""
        mu_x = self.mu @ x
        if abs(mu_x) < 1e-12:
            raise SingularJacobian("shift functional nearly kills the base point")
        y = v - (self.mu @ v) / mu_x * x
        scale = self.chart @ y
        if abs(scale) < 1e-10:
            raise SingularJacobian("chart functional nearly kills a fiber point")
        return y / scale


# ---------------------------------------------------------------------------
# tracking problems: a common protocol with evaluate/jacobian over t


class SegmentOnLine:
    """Fiber tracking along x(t) = p + tau(t) q on a line inside the cubic."""

    def __init__(self, fiber: LineFiberSystem, p: np.ndarray, q: np.ndarray):
        self.fiber = fiber
        self.p = np.asarray(p, dtype=complex)
        self.q = np.asarray(q, dtype=complex)
        self.tau0 = 0j
        self.tau1 = 0j

    def set_segment(self, tau0: complex, tau1: complex) -> None:
        self.tau0 = tau0
        self.tau1 = tau1

    def base_at(self, t: float) -> np.ndarray:
        tau = self.tau0 + (self.tau1 - self.tau0) * t
        x = self.p + tau * self.q
        return x / np.linalg.norm(x)

    def state_size(self) -> int:
        return self.fiber.n

    def evaluate(self, t: float, state: np.ndarray) -> np.ndarray:
        self.fiber.set_base(self.base_at(t))
        return self.fiber.evaluate(state)

    def jacobian(self, t: float, state: np.ndarray) -> np.ndarray:
        self.fiber.set_base(self.base_at(t))
        return self.fiber.jacobian(state)


class SegmentOnSurface:
    """Joint tracking of a dependent base coordinate and the line fiber.

    The base point moves in an affine chart of the hypersurface: some
    coordinates follow a straight segment, one is pinned, and the
    remaining one rides along as part of the unknown state so the point
    stays on the cubic.  State = (dependent coordinate, fiber vector).
    """

    def __init__(
        self,
        fiber: LineFiberSystem,
        f: MultiPoly,
        free: Sequence[int],
        pinned: int,
        pinned_value: complex,
        dep: int,
    ):
        self.fiber = fiber
        self.fc = ComplexPoly.from_exact(f)
        self.free = tuple(free)
        self.pinned = pinned
        self.pinned_value = pinned_value
        self.dep = dep
        self.n = f.n_vars
        self.w0 = np.zeros(len(free), dtype=complex)
        self.w1 = np.zeros(len(free), dtype=complex)

    def set_segment(self, w0: np.ndarray, w1: np.ndarray) -> None:
        self.w0 = np.asarray(w0, dtype=complex)
        self.w1 = np.asarray(w1, dtype=complex)

    def assemble(self, t: float, dep_value: complex) -> np.ndarray:
        x = np.zeros(self.n, dtype=complex)
        w = self.w0 + (self.w1 - self.w0) * t
        for idx, k in enumerate(self.free):
            x[k] = w[idx]
        x[self.pinned] = self.pinned_value
        x[self.dep] = dep_value
        return x

    def state_size(self) -> int:
        return 1 + self.fiber.n

    def evaluate(self, t: float, state: np.ndarray) -> np.ndarray:
        x = self.assemble(t, state[0])
        y = state[1:]
        self.fiber.set_base(x)
        return np.concatenate([[self.fc.evaluate(x)], self.fiber.evaluate(y)])

    def jacobian(self, t: float, state: np.ndarray) -> np.ndarray:
        x = self.assemble(t, state[0])
        y = state[1:]
        self.fiber.set_base(x)
        dep_dir = np.zeros(self.n, dtype=complex)
        dep_dir[self.dep] = 1.0
        top = np.concatenate(
            [[self.fc.partial(self.dep).evaluate(x)], np.zeros(self.fiber.n, dtype=complex)]
        )
        fiber_dep = self.fiber.base_derivative(y, dep_dir)
        fiber_jac = self.fiber.jacobian(y)
        bottom = np.hstack([fiber_dep[:, None], fiber_jac])
        return np.vstack([top, bottom])


# ---------------------------------------------------------------------------
# segment tracking and loops


@dataclass
class LoopPath:
    """A closed polyline of waypoints in the loop parameter space."""

    waypoints: List

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("a loop needs at least two waypoints")

    def segments(self):
        pts = list(self.waypoints)
        if not np.allclose(
            np.atleast_1d(np.asarray(pts[0], dtype=complex)),
            np.atleast_1d(np.asarray(pts[-1], dtype=complex)),
        ):
            pts.append(pts[0])
        return list(zip(pts[:-1], pts[1:]))


def track_segment(
    problem,
    states: Sequence[np.ndarray],
    cfg: ExperimentConfig = DEFAULT_CONFIG,
    corrector_cap: int = 8,
) -> List[np.ndarray]:
    """Advance every state from t=0 to t=1 with shared adaptive steps.

    Predictor: polynomial extrapolation through the last few accepted
    points of each path; corrector: Newton at frozen t.  Steps halve on
    corrector failure down to min_step (PathFailure) and collisions of
    two paths raise PathCrossing.
    """
    paths = [np.array(s, dtype=complex) for s in states]
    history: List[List[Tuple[float, np.ndarray]]] = [[(0.0, p.copy())] for p in paths]
    t = 0.0
    dt = 0.1
    while t < 1.0 - 1e-14:
        dt = min(dt, 1.0 - t)
        t_new = t + dt
        trial: List[np.ndarray] = []
        worst_iters = 0
        failed = False
        for hist in history:
            guess = _extrapolate(hist, t_new)
            # equations are cubic, so the attainable floor scales with |state|^3
            scale = max(1.0, float(np.max(np.abs(guess)))) ** 3
            z, iters, ok = _newton_light(
                lambda s: problem.evaluate(t_new, s),
                lambda s: problem.jacobian(t_new, s),
                guess,
                cfg.tol_newton * 10 * scale,
                corrector_cap,
            )
            if not ok:
                failed = True
                break
            worst_iters = max(worst_iters, iters)
            trial.append(z)
        if failed:
            dt *= 0.5
            if dt < cfg.min_step:
                raise PathFailure("step size underflow at t=%.6f" % t)
            continue
        for i in range(len(trial)):
            for j in range(i + 1, len(trial)):
                if _state_gap(trial[i], trial[j]) < cfg.tol_collision:
                    raise PathCrossing("two paths collided at t=%.6f" % t_new)
        t = t_new
        for hist, z in zip(history, trial):
            hist.append((t, z))
            if len(hist) > 4:
                hist.pop(0)
        if worst_iters <= 3:
            dt = min(dt * 1.3, 0.25)
    return [hist[-1][1] for hist in history]


def _state_gap(z1: np.ndarray, z2: np.ndarray) -> float:
    """Projective chordal gap between two state vectors."""
    n1 = np.linalg.norm(z1)
    n2 = np.linalg.norm(z2)
    if n1 < 1e-300 or n2 < 1e-300:
        return 0.0
    overlap = abs(np.vdot(z1, z2)) / (n1 * n2)
    return float(np.sqrt(max(0.0, 1.0 - min(1.0, overlap) ** 2)))


def _extrapolate(history, t_new: float) -> np.ndarray:
    """Lagrange extrapolation through up to four accepted path points."""
    pts = history[-4:]
    if len(pts) == 1:
        return pts[0][1].copy()
    guess = np.zeros_like(pts[0][1])
    for i, (ti, zi) in enumerate(pts):
        weight = 1.0
        for j, (tj, _) in enumerate(pts):
            if j != i:
                weight *= (t_new - tj) / (ti - tj)
        guess = guess + weight * zi
    return guess


def monodromy_loop(
    problem,
    loop: LoopPath,
    start_states: Sequence[np.ndarray],
    cfg: ExperimentConfig = DEFAULT_CONFIG,
) -> Tuple[Tuple[int, ...], List[np.ndarray]]:
    """Track the fiber around a closed loop and read off the permutation.

    Returns sigma with sigma[i] = index of the start state the i-th path
    landed on.  Ambiguous endpoint matching counts as a crossing.
    """
    states = [np.array(s, dtype=complex) for s in start_states]
    for a, b in loop.segments():
        problem.set_segment(a, b)
        states = track_segment(problem, states, cfg)
    perm = []
    for z in states:
        dists = sorted(
            (_state_gap(z, s0), idx) for idx, s0 in enumerate(start_states)
        )
        best, runner = dists[0], dists[1]
        if best[0] > 1e-4 or best[0] > 0.2 * runner[0]:
            raise PathCrossing("endpoint does not match a unique start state")
        perm.append(best[1])
    if sorted(perm) != list(range(len(start_states))):
        raise PathCrossing("endpoint matching is not a bijection")
    return tuple(perm), states


def triangle_loop(rng: random.Random, center, scale: float = 1.0) -> LoopPath:
    """A random triangle based at ``center`` in one or several complex dims."""
    c = np.atleast_1d(np.asarray(center, dtype=complex))
    verts = [c]
    for _ in range(2):
        jitter = np.array(
            [rng.gauss(0, scale) + 1j * rng.gauss(0, scale) for _ in range(c.size)]
        )
        verts.append(c + jitter)
    verts.append(c)
    if c.size == 1:
        return LoopPath([complex(v[0]) for v in verts])
    return LoopPath(verts)


def _segment_point_distance(a: complex, b: complex, p: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom < 1e-300:
        return abs(p - a)
    s = ((p - a) * np.conj(ab)).real / denom
    s = min(1.0, max(0.0, s))
    return abs(p - (a + s * ab))


def safe_triangle_loop(
    rng: random.Random,
    center: complex,
    branch_points: Sequence[complex],
    scale: float = 1.0,
    margin: float = 1e-3,
    segment_margin: float = 5e-3,
    max_tries: int = 200,
) -> LoopPath:
    """A triangle loop in one complex parameter that avoids branch points.

    Waypoints keep ``margin`` clearance and whole segments keep
    ``segment_margin``, so the tracked fiber never degenerates en route;
    circling branch points is what produces the permutation.
    """
    for _ in range(max_tries):
        verts = [complex(center)]
        for _ in range(2):
            verts.append(
                complex(center) + rng.gauss(0, scale) + 1j * rng.gauss(0, scale)
            )
        if any(
            abs(w - bp) < margin for w in verts[1:] for bp in branch_points
        ):
            continue
        closed = verts + [verts[0]]
        ok = True
        for a, b in zip(closed[:-1], closed[1:]):
            for bp in branch_points:
                if _segment_point_distance(a, b, bp) < segment_margin:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return LoopPath(closed)
    raise PathFailure("could not place a loop clear of the branch points")
