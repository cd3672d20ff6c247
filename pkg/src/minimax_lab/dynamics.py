"""Discrete gamma-GDA, the gamma-GDA flow, limit detection, and basin sampling.

The limit detector is a declared convention (the underlying theory offers
none for discrete dynamics): a fixed point needs ten consecutive small
velocity readings plus a small raw gradient, divergence is a norm threshold
or leaving the domain box, and a cycle is a post-transient return to within
``r_cycle`` of an earlier point (measured against the sampled polyline, so a
fixed sampling grid cannot miss a closed orbit) with per-loop drift at most
``cycle_drift``.
"""

from __future__ import annotations

import csv
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import DEFAULT_TOL, JSON_SCHEMA_VERSION, Tolerances
from .errors import NonFiniteError
from .problems import Box, ObjectiveFunction, Point

R_CYCLE = 1e-4
CYCLE_DRIFT = 1e-5
R_CLUSTER = 1e-3
FIXED_POINT_STREAK = 10


class LimitKind(str, Enum):
    FIXED_POINT = "FixedPoint"
    CYCLE = "Cycle"
    DIVERGED = "Diverged"
    EXHAUSTED = "Exhausted"


@dataclass(frozen=True)
class Limit:
    kind: LimitKind
    point: Point | None = None           # fixed point location
    period: float | None = None          # cycle period estimate (time units)
    witnesses: tuple = ()                # cycle witness points
    reason: str | None = None            # divergence detail

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.point is not None:
            out["point"] = {"x": self.point.x.tolist(), "y": self.point.y.tolist()}
        if self.period is not None:
            out["period"] = self.period
        if self.witnesses:
            out["witnesses"] = [
                {"x": w.x.tolist(), "y": w.y.tolist()} for w in self.witnesses
            ]
        if self.reason is not None:
            out["reason"] = self.reason
        return out


class Mode(str, Enum):
    DISCRETE = "Discrete"
    FLOW = "Flow"


@dataclass(frozen=True)
class Trajectory:
    points: np.ndarray        # (n, d1+d2), row t is the state at step t
    step_size: float          # eta for discrete, dt for flow
    gamma: float
    mode: Mode
    limit: Limit
    dim_x: int

    def point_at(self, t: int) -> Point:
        return Point(self.points[t, : self.dim_x], self.points[t, self.dim_x:])

    @property
    def final(self) -> Point:
        return self.point_at(len(self.points) - 1)

    def times(self) -> np.ndarray:
        return np.arange(len(self.points)) * (self.step_size if self.mode == Mode.FLOW else 1.0)


def _velocity(f: ObjectiveFunction, x: np.ndarray, y: np.ndarray, gamma: float):
    gx, gy = f.grad_at(Point(x, y))
    return np.concatenate([-gx / gamma, gy]), np.sqrt(np.sum(gx**2) + np.sum(gy**2))


def gda_step(f: ObjectiveFunction, p: Point, eta: float, gamma: float) -> Point:
    """One simultaneous gamma-GDA update; both partials evaluated at the old point."""
    if eta <= 0 or gamma <= 0:
        raise ValueError("eta and gamma must be positive")
    gx, gy = f.grad_at(p)
    if not (np.all(np.isfinite(gx)) and np.all(np.isfinite(gy))):
        raise NonFiniteError("gradient is non-finite")
    return Point(p.x - (eta / gamma) * gx, p.y + eta * gy)


def _segment_distance(q: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Distance from q to segment [a, b]."""
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(q - a))
    t = float(np.clip((q - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(q - (a + t * ab)))


class _CycleDetector:
    """Detects post-transient returns to a reference point on the orbit."""

    def __init__(self, transient_steps: int, min_loop: int = 8):
        self.transient = transient_steps
        self.min_loop = min_loop
        self.ref: np.ndarray | None = None
        self.ref_step: int = 0
        self.armed = False

    def observe(self, step: int, prev: np.ndarray, cur: np.ndarray):
        """Returns (loop_steps, drift) on a confirmed cycle, else None."""
        if step <= self.transient:
            return None
        if self.ref is None:
            self.ref = cur.copy()
            self.ref_step = step
            return None
        dist = _segment_distance(self.ref, prev, cur)
        if not self.armed:
            if dist > 10 * R_CYCLE:
                self.armed = True
            return None
        if step - self.ref_step < self.min_loop or dist > R_CYCLE:
            return None
        loop = step - self.ref_step
        if dist <= CYCLE_DRIFT:
            return loop, dist
        # near-return with too much drift: re-arm from here
        self.ref = cur.copy()
        self.ref_step = step
        self.armed = False
        return None


def _run(
    f: ObjectiveFunction,
    p0: Point,
    step_fn,
    vel_fn,
    step_size: float,
    gamma: float,
    max_steps: int,
    mode: Mode,
    tol: Tolerances,
) -> Trajectory:
    d1 = f.dim_x
    states = [p0.concat]
    cur = p0.concat
    streak = 0
    detector = _CycleDetector(transient_steps=max_steps // 2)
    limit = Limit(LimitKind.EXHAUSTED)

    for step in range(1, max_steps + 1):
        try:
            nxt, grad_norm = step_fn(cur)
        except (FloatingPointError, NonFiniteError):
            limit = Limit(LimitKind.DIVERGED, reason="non-finite gradient")
            break
        if not np.all(np.isfinite(nxt)):
            limit = Limit(LimitKind.DIVERGED, reason="non-finite state")
            break
        states.append(nxt.copy())

        if np.linalg.norm(nxt) > 1e6:
            limit = Limit(LimitKind.DIVERGED, reason="norm threshold crossed")
            break
        if not f.in_domain(Point(nxt[:d1], nxt[d1:])):
            limit = Limit(LimitKind.DIVERGED, reason="left the domain box")
            break

        vel_norm = vel_fn(cur, nxt)
        streak = streak + 1 if vel_norm <= tol.tau_station else 0
        if streak >= FIXED_POINT_STREAK:
            p = Point(nxt[:d1], nxt[d1:])
            if f.grad_norm(p) <= 10 * tol.tau_station:
                limit = Limit(LimitKind.FIXED_POINT, point=p)
                break
        hit = detector.observe(step, cur, nxt)
        if hit is not None:
            loop, _ = hit
            period = loop * (step_size if mode == Mode.FLOW else step_size)
            limit = Limit(
                LimitKind.CYCLE,
                period=float(period),
                witnesses=(
                    Point(detector.ref[:d1], detector.ref[d1:]),
                    Point(nxt[:d1], nxt[d1:]),
                ),
            )
            break
        cur = nxt

    return Trajectory(
        points=np.asarray(states),
        step_size=step_size,
        gamma=gamma,
        mode=mode,
        limit=limit,
        dim_x=d1,
    )


def run_gda(
    f: ObjectiveFunction,
    p0: Point,
    eta: float,
    gamma: float,
    max_steps: int = 10000,
    tol: Tolerances = DEFAULT_TOL,
) -> Trajectory:
    """Iterate gamma-GDA until a limit is detected or the budget runs out."""
    if eta <= 0 or gamma <= 0:
        raise ValueError("eta and gamma must be positive")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if f.lip_grad is not None and eta > 1.0 / f.lip_grad:
        warnings.warn(
            f"eta={eta} exceeds 1/ell={1.0 / f.lip_grad:.4g}; GDA may not track the flow",
            stacklevel=2,
        )
    d1 = f.dim_x

    def step_fn(v):
        vel, gn = _velocity(f, v[:d1], v[d1:], gamma)
        return v + eta * vel, gn

    def vel_fn(prev, nxt):
        return float(np.linalg.norm(nxt - prev) / eta)

    return _run(f, p0, step_fn, vel_fn, eta, gamma, max_steps, Mode.DISCRETE, tol)


def run_flow(
    f: ObjectiveFunction,
    p0: Point,
    gamma: float,
    time_horizon: float,
    dt: float = 1e-3,
    tol: Tolerances = DEFAULT_TOL,
) -> Trajectory:
    """Classic fixed-step RK4 integration of the gamma-GDA flow."""
    if dt <= 0 or time_horizon < dt:
        raise ValueError("need dt > 0 and time_horizon >= dt")
    d1 = f.dim_x
    steps = int(round(time_horizon / dt))

    def field_at(v):
        vel, _ = _velocity(f, v[:d1], v[d1:], gamma)
        return vel

    def step_fn(v):
        k1 = field_at(v)
        k2 = field_at(v + 0.5 * dt * k1)
        k3 = field_at(v + 0.5 * dt * k2)
        k4 = field_at(v + dt * k3)
        nxt = v + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return nxt, float(np.linalg.norm(k1))

    def vel_fn(prev, nxt):
        return float(np.linalg.norm(field_at(nxt)))

    return _run(f, p0, step_fn, vel_fn, dt, gamma, steps, Mode.FLOW, tol)


@dataclass(frozen=True)
class BasinCluster:
    point: Point
    count: int


@dataclass(frozen=True)
class BasinSample:
    inits: list[Point]
    limits: list[Limit]
    clusters: list[BasinCluster] = field(default_factory=list)
    tally: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schemaVersion": JSON_SCHEMA_VERSION,
            "tally": self.tally,
            "clusters": [
                {
                    "point": {"x": c.point.x.tolist(), "y": c.point.y.tolist()},
                    "count": c.count,
                }
                for c in self.clusters
            ],
        }


def sample_basins(
    f: ObjectiveFunction,
    region: Box,
    n: int,
    eta: float,
    gamma: float,
    max_steps: int = 10000,
    seed: int = 0,
    threads: int = 1,
    tol: Tolerances = DEFAULT_TOL,
) -> BasinSample:
    """Run GDA from n seeded quasi-uniform initializations and tally the limits.

    Each trajectory draws its initialization from a PRNG stream keyed by
    (seed, index), so the result is independent of execution order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if region.dim != f.dim_x + f.dim_y:
        raise ValueError("region dimension must match dim_x + dim_y")
    d1 = f.dim_x

    def one(i: int) -> tuple[Point, Limit]:
        rng = np.random.default_rng([seed, i])
        v = region.sample(rng)
        p0 = Point(v[:d1], v[d1:])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            traj = run_gda(f, p0, eta, gamma, max_steps, tol)
        return p0, traj.limit

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(n)))
    else:
        results = [one(i) for i in range(n)]

    inits = [r[0] for r in results]
    limits = [r[1] for r in results]

    tally: dict[str, int] = {}
    for lim in limits:
        tally[lim.kind.value] = tally.get(lim.kind.value, 0) + 1

    reps: list[np.ndarray] = []
    counts: list[int] = []
    for lim in limits:
        if lim.kind != LimitKind.FIXED_POINT or lim.point is None:
            continue
        v = lim.point.concat
        for k, rep in enumerate(reps):
            if np.linalg.norm(v - rep) <= R_CLUSTER:
                counts[k] += 1
                break
        else:
            reps.append(v)
            counts.append(1)
    clusters = [
        BasinCluster(Point(rep[:d1], rep[d1:]), cnt) for rep, cnt in zip(reps, counts)
    ]
    return BasinSample(inits=inits, limits=limits, clusters=clusters, tally=tally)


def trajectory_to_csv(traj: Trajectory, f: ObjectiveFunction, path) -> None:
    """Write (t, x..., y..., grad norm) rows; RFC-4180 with a header row."""
    d1, d2 = f.dim_x, f.dim_y
    header = (
        ["t"]
        + [f"x{i + 1}" for i in range(d1)]
        + [f"y{j + 1}" for j in range(d2)]
        + ["grad_norm"]
    )
    times = traj.times()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t, row in zip(times, traj.points):
            p = Point(row[:d1], row[d1:])
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in row] + [repr(f.grad_norm(p))])
