"""Generalized trigonometry for piecewise-constant curvature potentials.

The central object is the solution of the Jacobi equation

    u'' + kappa(theta) * u = 0,       u(0) = 0,  u'(0) = 1,

for a curvature lower bound ``kappa`` that is piecewise constant.  On each
constant piece the solution is an exact trigonometric / affine / hyperbolic
arc, so the pair ``(u, u')`` can be propagated across breakpoints in closed
form with no ODE-solver error.  Everything else in this module is built on
top of that propagation:

* ``eval_sin_kappa`` / ``eval_cos_kappa`` -- the generalized sine and cosine,
* ``distortion`` -- the interpolation distortion ratio sin(t*theta)/sin(theta),
* ``potential_function`` -- cos + lambda * sin, whose first positive root is
  the radius at which a model ball degenerates,
* ``jacobian`` -- the clamped positive power [cos + (H/(N-1)) sin]_+^(N-1)
  used as a volume envelope,
* Sturm-type domination and Riccati-type logarithmic-derivative checks.

Convention: the potential extends symmetrically to negative parameters and
the generalized sine extends antisymmetrically (the cosine symmetrically).
Breakpoints of the reflected potential are the reflected breakpoints.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

ROOT_TOL = 1e-10
# Bracket scan resolution before bisection; monotonicity is not assumed.
ROOT_SCAN_STEPS = 1024


class DomainOverflowError(ValueError):
    """Evaluation past the potential's domain end; never silently clamped."""


class DegenerateIntervalError(ValueError):
    """Slide requested for coincident endpoints."""


class InputError(ValueError):
    """A check was called with inputs violating its stated hypotheses."""


@dataclass(frozen=True)
class CurvaturePotential:
    """Piecewise-constant curvature lower bound on [start, domain_end).

    ``breakpoints[i]`` is the left edge of piece ``i`` (so ``breakpoints[0]``
    is the domain start, normally 0) and ``values[i]`` its curvature.  At a
    breakpoint the potential's value is taken as the minimum of the adjacent
    pieces (lower semicontinuity); this never affects any integral.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    domain_end: float = math.inf

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values) or not self.breakpoints:
            raise ValueError("need one value per piece")
        if any(b2 <= b1 for b1, b2 in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("piece values must be finite")
        if self.domain_end <= self.breakpoints[-1]:
            raise ValueError("domain_end must exceed the last breakpoint")

    @classmethod
    def constant(cls, value: float, start: float = 0.0, end: float = math.inf) -> "CurvaturePotential":
        return cls((start,), (value,), end)

    @property
    def start(self) -> float:
        return self.breakpoints[0]

    @property
    def is_constant(self) -> bool:
        return len(set(self.values)) == 1

    def value_at(self, x: float) -> float:
        """Piece value at ``x``; symmetric reflection below a zero start."""
        if x < self.start:
            if self.start == 0.0:
                return self.value_at(-x)
            raise DomainOverflowError(f"{x} below domain start {self.start}")
        if x >= self.domain_end:
            raise DomainOverflowError(f"{x} beyond domain end {self.domain_end}")
        i = bisect_right(self.breakpoints, x) - 1
        if x == self.breakpoints[i] and i > 0:
            return min(self.values[i - 1], self.values[i])
        return self.values[i]

    def piece_value(self, x: float) -> float:
        """Value of the piece containing ``x``, right-continuous at edges."""
        if x < self.start and self.start == 0.0:
            return self.piece_value(-x)
        i = min(bisect_right(self.breakpoints, x) - 1, len(self.values) - 1)
        return self.values[max(i, 0)]

    def scaled(self, factor: float) -> "CurvaturePotential":
        return CurvaturePotential(self.breakpoints, tuple(v * factor for v in self.values), self.domain_end)

    def slide(self, x0: float, x1: float, direction: str) -> "CurvaturePotential":
        """Reparametrize onto [0, |x1-x0|].

        ``forward`` runs from min(x0,x1) to max(x0,x1); ``backward`` runs the
        same segment in the opposite orientation, so for every t in [0,1] the
        backward slide at t*L equals the forward slide of the swapped pair at
        (1-t)*L.
        """
        if x0 == x1:
            raise DegenerateIntervalError("slide endpoints coincide")
        if direction not in ("forward", "backward"):
            raise ValueError(f"unknown direction {direction!r}")
        lo, hi = min(x0, x1), max(x0, x1)
        if lo < self.start or hi > self.domain_end:
            raise DomainOverflowError(f"[{lo}, {hi}] not inside [{self.start}, {self.domain_end})")
        edges = [lo]
        vals = []
        for b, v in zip(self.breakpoints, self.values):
            if lo < b < hi:
                edges.append(b)
            if b <= lo:
                vals = [v]
            elif b < hi:
                vals.append(v)
        edges.append(hi)
        # vals[i] covers [edges[i], edges[i+1])
        if direction == "forward":
            new_bp = tuple(e - lo for e in edges[:-1])
            new_vals = tuple(vals)
        else:
            new_bp = tuple(hi - e for e in reversed(edges[1:]))
            new_vals = tuple(reversed(vals))
        return CurvaturePotential(new_bp, new_vals, hi - lo)

    def min_value(self) -> float:
        return min(self.values)

    def to_dict(self) -> dict:
        end = "inf" if math.isinf(self.domain_end) else self.domain_end
        return {"breakpoints": list(self.breakpoints), "values": list(self.values), "domain_end": end}

    @classmethod
    def from_dict(cls, d: dict) -> "CurvaturePotential":
        end = d["domain_end"]
        return cls(tuple(d["breakpoints"]), tuple(d["values"]), math.inf if end == "inf" else float(end))


@dataclass(frozen=True)
class JacobiState:
    """Solution value and derivative of u'' + kappa u = 0 at a parameter."""

    theta: float
    u: float
    du: float


@dataclass(frozen=True)
class RootReport:
    """First positive root of a propagated solution, or its absence.

    ``root is None`` means no sign change was found in (0, horizon]; absence
    is a value, not an error.
    """

    root: float | None
    horizon: float
    bracket_width: float = 0.0

    @property
    def found(self) -> bool:
        return self.root is not None


def _piece_step(u: float, du: float, kv: float, dt: float) -> tuple[float, float]:
    """Advance (u, u') by dt through a piece of constant curvature kv."""
    if kv > 0.0:
        s = math.sqrt(kv)
        c, sn = math.cos(s * dt), math.sin(s * dt)
        return u * c + du * sn / s, -u * s * sn + du * c
    if kv < 0.0:
        s = math.sqrt(-kv)
        ch, sh = math.cosh(s * dt), math.sinh(s * dt)
        return u * ch + du * sh / s, u * s * sh + du * ch
    return u + du * dt, du


def _edge_states(kappa: CurvaturePotential, up_to: float) -> list[JacobiState]:
    """States (u, u') at 0 and every breakpoint below ``up_to``.

    Requires a potential starting at 0; propagation is exact per piece.
    """
    if kappa.start != 0.0:
        raise InputError("generalized sine needs a potential anchored at 0")
    states = [JacobiState(0.0, 0.0, 1.0)]
    u, du = 0.0, 1.0
    prev = 0.0
    for b, v in zip(kappa.breakpoints[1:], kappa.values[:-1]):
        if b >= up_to:
            break
        u, du = _piece_step(u, du, v, b - prev)
        states.append(JacobiState(b, u, du))
        prev = b
    return states


def jacobi_state(kappa: CurvaturePotential, theta: float) -> JacobiState:
    """Exact (u, u') of the canonical solution at ``theta`` >= 0."""
    if theta < 0:
        raise ValueError("jacobi_state expects theta >= 0")
    if theta > kappa.domain_end:
        raise DomainOverflowError(f"theta={theta} beyond domain end {kappa.domain_end}")
    states = _edge_states(kappa, theta)
    last = states[-1]
    u, du = _piece_step(last.u, last.du, kappa.piece_value(last.theta), theta - last.theta)
    return JacobiState(theta, u, du)


def _eval_states(kappa: CurvaturePotential, theta):
    """Vectorized (u, u') at |theta|; caller applies parity."""
    th = np.abs(np.asarray(theta, dtype=float))
    if th.size and float(np.max(th)) > kappa.domain_end:
        raise DomainOverflowError(
            f"theta={float(np.max(th))} beyond domain end {kappa.domain_end}"
        )
    top = float(np.max(th)) if th.size else 0.0
    states = _edge_states(kappa, top + 1.0 if math.isinf(kappa.domain_end) else top)
    edges = np.array([s.theta for s in states])
    us = np.array([s.u for s in states])
    dus = np.array([s.du for s in states])
    idx = np.searchsorted(edges, th, side="right") - 1
    idx = np.clip(idx, 0, len(edges) - 1)
    dt = th - edges[idx]
    kv = np.array([kappa.values[i] for i in range(len(edges))])[idx]
    u0, du0 = us[idx], dus[idx]
    u = np.empty_like(dt)
    du = np.empty_like(dt)
    pos = kv > 0
    neg = kv < 0
    zer = ~(pos | neg)
    if np.any(pos):
        s = np.sqrt(kv[pos])
        c, sn = np.cos(s * dt[pos]), np.sin(s * dt[pos])
        u[pos] = u0[pos] * c + du0[pos] * sn / s
        du[pos] = -u0[pos] * s * sn + du0[pos] * c
    if np.any(neg):
        s = np.sqrt(-kv[neg])
        ch, sh = np.cosh(s * dt[neg]), np.sinh(s * dt[neg])
        u[neg] = u0[neg] * ch + du0[neg] * sh / s
        du[neg] = u0[neg] * s * sh + du0[neg] * ch
    if np.any(zer):
        u[zer] = u0[zer] + du0[zer] * dt[zer]
        du[zer] = du0[zer]
    return u, du


def eval_sin_kappa(kappa: CurvaturePotential, theta):
    """Generalized sine: the canonical Jacobi solution, antisymmetric in theta."""
    u, _ = _eval_states(kappa, theta)
    sgn = np.where(np.asarray(theta, dtype=float) >= 0, 1.0, -1.0)
    out = u * sgn
    return float(out) if np.ndim(theta) == 0 else out


def eval_cos_kappa(kappa: CurvaturePotential, theta):
    """Generalized cosine: 1 minus the running kappa-weighted sine integral.

    Coincides with the derivative state of the propagated solution, which is
    continuous across breakpoints; symmetric in theta.
    """
    _, du = _eval_states(kappa, theta)
    return float(du) if np.ndim(theta) == 0 else du


def _first_root_of(fn, horizon: float) -> RootReport:
    """Bracket scan at horizon/2^10 resolution, then bisection to ROOT_TOL."""
    if horizon <= 0 or not math.isfinite(horizon):
        raise ValueError("horizon must be positive and finite")
    grid = np.linspace(0.0, horizon, ROOT_SCAN_STEPS + 1)
    vals = fn(grid)
    lo = hi = None
    for i in range(1, len(grid)):
        if vals[i] == 0.0:
            return RootReport(float(grid[i]), horizon, 0.0)
        if vals[i] < 0.0 < vals[i - 1] or (i > 1 and vals[i] > 0.0 > vals[i - 1]):
            lo, hi = grid[i - 1], grid[i]
            break
    if lo is None:
        return RootReport(None, horizon)
    flo = fn(np.array([lo]))[0]
    while hi - lo > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        fm = fn(np.array([mid]))[0]
        if fm == 0.0:
            return RootReport(float(mid), horizon, 0.0)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return RootReport(0.5 * (lo + hi), horizon, hi - lo)


def first_root(kappa: CurvaturePotential, horizon: float) -> RootReport:
    """First positive zero of the generalized sine within (0, horizon]."""
    horizon = min(horizon, kappa.domain_end)
    return _first_root_of(lambda th: _eval_states(kappa, th)[0], horizon)


def distortion(kappa: CurvaturePotential, t: float, theta: float) -> float:
    """Distortion ratio sin(t*theta)/sin(theta); inf once theta reaches the first sine root."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    if theta == 0.0:
        return t
    denom = eval_sin_kappa(kappa, theta)
    if denom <= 0.0 or first_root(kappa, theta).found:
        return math.inf
    return eval_sin_kappa(kappa, t * theta) / denom


def distortion_grid(kappa: CurvaturePotential, ts, thetas):
    """Distortion coefficients over the (t, theta) product grid.

    Returns an array of shape (len(ts), len(thetas)); entries past the first
    sine root are inf.  Vectorized so property sweeps stay cheap.
    """
    ts = np.asarray(ts, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    denom = eval_sin_kappa(kappa, thetas)
    # A zero of the sine strictly inside (0, theta] forces the inf branch even
    # if the sine recovers positivity afterwards.
    finite = np.ones_like(thetas, dtype=bool)
    positive = np.where(thetas > 0)[0]
    if positive.size:
        top = float(np.max(thetas[positive]))
        rep = first_root(kappa, top)
        pi_k = rep.root if rep.found else math.inf
        finite[positive] = thetas[positive] < pi_k
    out = np.full((len(ts), len(thetas)), math.inf)
    num = eval_sin_kappa(kappa, np.outer(ts, thetas))
    good = finite & (denom > 0)
    out[:, good] = num[:, good] / denom[good]
    if np.any(thetas == 0.0):
        out[:, thetas == 0.0] = ts[:, None]
    return out


def potential_function(kappa: CurvaturePotential, lam: float, theta) -> float:
    """cos_kappa + lam * sin_kappa, on the symmetrically extended line."""
    u, du = _eval_states(kappa, theta)
    sgn = np.where(np.asarray(theta, dtype=float) >= 0, 1.0, -1.0)
    val = du + lam * u * sgn
    return float(val) if np.ndim(theta) == 0 else val


def ball_root(kappa: CurvaturePotential, lam: float, horizon: float) -> RootReport:
    """First positive root of the potential function, if any within horizon."""
    horizon = min(horizon, kappa.domain_end)
    return _first_root_of(lambda th: potential_function(kappa, lam, th), horizon)


def jacobian(kappa: CurvaturePotential, N: float, H: float, theta, clamp_horizon: float | None = None):
    """Volume envelope [cos + (H/(N-1)) sin]_+^(N-1) for the scaled potential.

    Vanishes identically past the first positive root of the underlying
    potential function on either side of 0 (the envelope is an upper bound
    only up to that degeneration radius, so later positivity is clamped).
    """
    if N <= 1:
        raise ValueError("dimension bound N must exceed 1")
    th = np.asarray(theta, dtype=float)
    scaled = kappa.scaled(1.0 / (N - 1.0))
    lam = H / (N - 1.0)
    p = potential_function(scaled, lam, th)
    out = np.power(np.clip(p, 0.0, None), N - 1.0)
    top = clamp_horizon if clamp_horizon is not None else (float(np.max(np.abs(th))) if th.size else 0.0)
    if top > 0:
        plus = ball_root(scaled, lam, min(top, scaled.domain_end))
        if plus.found:
            out = np.where(th >= plus.root, 0.0, out)
        minus = ball_root(scaled, -lam, min(top, scaled.domain_end))
        if minus.found:
            out = np.where(th <= -minus.root, 0.0, out)
    return float(out) if np.ndim(theta) == 0 else out


@dataclass(frozen=True)
class CheckVerdict:
    """Outcome of a sampled inequality check."""

    passed: bool
    worst_margin: float
    witness: tuple | None = None
    details: dict = field(default_factory=dict)


def sturm_domination_check(
    kappa_lo: CurvaturePotential,
    kappa_hi: CurvaturePotential,
    ts,
    thetas,
    tol: float = 1e-9,
) -> CheckVerdict:
    """Distortion monotonicity in the potential: lower kappa, lower distortion.

    Samples sigma_lo - sigma_hi over the (t, theta) grid; the worst signed
    margin should not exceed ``tol``.  The pointwise ordering of the two
    potentials is a hypothesis and is verified first.
    """
    thetas = np.asarray(thetas, dtype=float)
    probe = np.unique(np.concatenate([
        thetas,
        np.asarray(kappa_lo.breakpoints),
        np.asarray(kappa_hi.breakpoints),
    ]))
    probe = probe[(probe >= 0) & (probe < min(kappa_lo.domain_end, kappa_hi.domain_end))]
    mids = 0.5 * (probe[1:] + probe[:-1])
    for x in np.concatenate([probe, mids]):
        if kappa_lo.value_at(float(x)) > kappa_hi.value_at(float(x)) + 1e-13:
            raise InputError(f"kappa_lo exceeds kappa_hi at {float(x)}")
    s_lo = distortion_grid(kappa_lo, ts, thetas)
    s_hi = distortion_grid(kappa_hi, ts, thetas)
    diff = np.where(np.isinf(s_hi), -math.inf, s_lo - s_hi)
    if not np.all(np.isfinite(s_lo) | np.isinf(s_hi)):
        # sine of the smaller potential dies first: ordering violated
        i, j = np.argwhere(np.isinf(s_lo) & np.isfinite(s_hi))[0]
        return CheckVerdict(False, math.inf, (float(np.asarray(ts)[i]), float(thetas[j])))
    worst = float(np.max(diff))
    i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
    witness = (float(np.asarray(ts)[i]), float(thetas[j]))
    return CheckVerdict(worst <= tol, worst, witness)


def riccati_comparison_check(
    thetas,
    v,
    kappa: CurvaturePotential,
    d: float,
    tol: float = 1e-9,
) -> CheckVerdict:
    """Logarithmic-derivative domination for concave-type supersolutions.

    For v with v'' + kappa v <= 0, v(0) = 1 and v'(0) <= d, the log-derivative
    of v never exceeds that of the potential function with slope d, and v
    must die no later than that function's first positive root.  Sampled via
    one-sided difference quotients; the derivative tolerance is ten times the
    quotient's truncation bound.
    """
    thetas = np.asarray(thetas, dtype=float)
    v = np.asarray(v, dtype=float)
    if abs(v[0] - 1.0) > 1e-9:
        raise InputError(f"v(0) = {v[0]}, expected 1")
    if np.any(v < 0):
        raise InputError("v must be nonnegative")
    step = thetas[1] - thetas[0]
    dv0 = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * step)
    if dv0 > d + 10 * step:
        raise InputError(f"v'(0) = {dv0} exceeds d = {d}")
    b = float(thetas[-1]) + step
    rep = ball_root(kappa, d, max(b * 1.5, 1.0))
    if rep.found and b > rep.root + tol + step:
        return CheckVerdict(False, b - rep.root, ("interval end", b))
    interior = np.arange(1, len(thetas) - 1)
    pos = interior[v[interior] > 0]
    logv = np.log(v[pos + 1]) - np.log(v[pos])  # forward quotient numerator
    quo = logv / step
    pvals = potential_function(kappa, d, thetas[pos])
    pder = -np.array([kappa.piece_value(float(t)) for t in thetas[pos]]) * eval_sin_kappa(
        kappa, thetas[pos]
    ) + d * eval_cos_kappa(kappa, thetas[pos])
    bound = pder / pvals
    # forward quotient of log v under-/over-shoots by O(step * |(log v)''|)
    deriv_tol = 10.0 * step
    margins = quo - bound
    worst = float(np.max(margins)) if margins.size else 0.0
    idx = int(np.argmax(margins)) if margins.size else 0
    witness = (float(thetas[pos][idx]),) if margins.size else None
    return CheckVerdict(worst <= deriv_tol, worst, witness, {"deriv_tol": deriv_tol})
