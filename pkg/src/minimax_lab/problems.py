"""Objective functions f(x, y) with differentials, and the worked-example catalog.

Every catalog entry carries exact analytic gradient and Hessian.  Entries that
appear in proofs with a stated domain box carry that box; the rest are
unbounded.  Central finite differences are the fallback (and the validation
oracle) for functions supplied without analytic differentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .config import DEFAULT_TOL
from .errors import NonFiniteError, OutOfDomainError, UnknownNameError


@dataclass(frozen=True)
class Box:
    """Per-coordinate bounds; entries may be +-inf for unbounded coordinates."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or np.any(lo > hi):
            raise ValueError("invalid box bounds")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def is_bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def contains(self, v, margin: float = 0.0) -> bool:
        v = np.asarray(v, dtype=float)
        return bool(np.all(v >= self.lower + margin) and np.all(v <= self.upper - margin))

    def clip(self, v) -> np.ndarray:
        return np.clip(np.asarray(v, dtype=float), self.lower, self.upper)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        if not self.is_bounded:
            raise ValueError("cannot sample from an unbounded box")
        return rng.uniform(self.lower, self.upper)


@dataclass(frozen=True)
class Point:
    """The pair (x, y); x is the min-player's action, y the max-player's."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise NonFiniteError("point has non-finite entries")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def concat(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    @staticmethod
    def from_concat(v, d1: int) -> "Point":
        v = np.asarray(v, dtype=float)
        return Point(v[:d1], v[d1:])


@dataclass(frozen=True)
class HessianBlocks:
    """Partitioned Hessian: a = d2f/dx2, b = d2f/dy2, c = d2f/dxdy."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.atleast_2d(np.asarray(self.b, dtype=float))
        c = np.atleast_2d(np.asarray(self.c, dtype=float))
        object.__setattr__(self, "a", 0.5 * (a + a.T))
        object.__setattr__(self, "b", 0.5 * (b + b.T))
        object.__setattr__(self, "c", c)

    def full(self) -> np.ndarray:
        top = np.hstack([self.a, self.c])
        bot = np.hstack([self.c.T, self.b])
        return np.vstack([top, bot])


@dataclass(frozen=True)
class ObjectiveFunction:
    """f: X x Y -> R with optional analytic differentials and Lipschitz data.

    ``lip_grad`` is the gradient-Lipschitz constant (the paper-style ell) and
    ``lip_value`` the value-Lipschitz constant L on the declared box; both are
    documented upper bounds, not infima.
    """

    name: str
    dim_x: int
    dim_y: int
    value: Callable[[np.ndarray, np.ndarray], float]
    gradient: Optional[Callable[[np.ndarray, np.ndarray], tuple]] = None
    hessian: Optional[Callable[[np.ndarray, np.ndarray], HessianBlocks]] = None
    x_box: Optional[Box] = None
    y_box: Optional[Box] = None
    lip_value: Optional[float] = None
    lip_grad: Optional[float] = None
    params: dict = field(default_factory=dict)

    def point(self, *coords) -> Point:
        v = np.asarray(coords, dtype=float).ravel()
        if v.size != self.dim_x + self.dim_y:
            raise ValueError(f"expected {self.dim_x + self.dim_y} coordinates")
        return Point(v[: self.dim_x], v[self.dim_x:])

    def in_domain(self, p: Point, margin: float = 0.0) -> bool:
        ok_x = self.x_box is None or self.x_box.contains(p.x, margin)
        ok_y = self.y_box is None or self.y_box.contains(p.y, margin)
        return ok_x and ok_y

    def value_at(self, p: Point) -> float:
        v = float(self.value(p.x, p.y))
        if not math.isfinite(v):
            raise NonFiniteError(f"{self.name} is non-finite at {p}")
        return v

    def grad_at(self, p: Point, h: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        if self.gradient is not None:
            gx, gy = self.gradient(p.x, p.y)
            return np.atleast_1d(np.asarray(gx, float)), np.atleast_1d(np.asarray(gy, float))
        return fd_gradient(self, p, h if h is not None else DEFAULT_TOL.fd_h_grad)

    def hess_at(self, p: Point, h: float | None = None) -> HessianBlocks:
        if self.hessian is not None:
            return self.hessian(p.x, p.y)
        return fd_hessian(self, p, h if h is not None else DEFAULT_TOL.fd_h_hess)

    def grad_norm(self, p: Point) -> float:
        gx, gy = self.grad_at(p)
        return float(np.sqrt(np.sum(gx**2) + np.sum(gy**2)))


def fd_gradient(f: ObjectiveFunction, p: Point, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference gradient; requires p interior to the box by h."""
    if h <= 0:
        raise ValueError("h must be positive")
    if not f.in_domain(p, margin=h):
        raise OutOfDomainError(f"point not interior to the domain by margin {h}")
    v = p.concat
    d1 = f.dim_x
    g = np.empty(v.size)
    for i in range(v.size):
        vp, vm = v.copy(), v.copy()
        vp[i] += h
        vm[i] -= h
        g[i] = (f.value_at(Point.from_concat(vp, d1)) - f.value_at(Point.from_concat(vm, d1))) / (2 * h)
    return g[:d1], g[d1:]


def fd_hessian(f: ObjectiveFunction, p: Point, h: float) -> HessianBlocks:
    """Second-order central differences; a and b blocks are symmetrized."""
    if h <= 0:
        raise ValueError("h must be positive")
    if not f.in_domain(p, margin=2 * h):
        raise OutOfDomainError(f"point not interior to the domain by margin {2 * h}")
    v = p.concat
    d1, d = f.dim_x, v.size
    f0 = f.value_at(p)

    def ev(delta):
        return f.value_at(Point.from_concat(v + delta, d1))

    hess = np.empty((d, d))
    eye = np.eye(d)
    for i in range(d):
        hess[i, i] = (ev(2 * h * eye[i]) - 2 * f0 + ev(-2 * h * eye[i])) / (4 * h * h)
        for j in range(i + 1, d):
            hij = (
                ev(h * (eye[i] + eye[j]))
                - ev(h * (eye[i] - eye[j]))
                - ev(h * (eye[j] - eye[i]))
                + ev(-h * (eye[i] + eye[j]))
            ) / (4 * h * h)
            hess[i, j] = hess[j, i] = hij
    return HessianBlocks(hess[:d1, :d1], hess[d1:, d1:], hess[:d1, d1:])


def quadratic_form(a, b, c, name: str = "quadratic_form") -> ObjectiveFunction:
    """f(x, y) = x'Ax/2 + x'Cy + y'By/2 with constant Hessian blocks (A, B, C)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    c = np.atleast_2d(np.asarray(c, dtype=float))
    a = 0.5 * (a + a.T)
    b = 0.5 * (b + b.T)
    d1, d2 = a.shape[0], b.shape[0]
    if c.shape != (d1, d2):
        raise ValueError(f"c must be {d1}x{d2}")
    full = np.vstack([np.hstack([a, c]), np.hstack([c.T, b])])
    ell = float(np.max(np.abs(np.linalg.eigvalsh(full))))
    blocks = HessianBlocks(a, b, c)
    return ObjectiveFunction(
        name=name,
        dim_x=d1,
        dim_y=d2,
        value=lambda x, y: float(0.5 * x @ a @ x + x @ c @ y + 0.5 * y @ b @ y),
        gradient=lambda x, y: (a @ x + c @ y, c.T @ x + b @ y),
        hessian=lambda x, y: blocks,
        lip_grad=ell,
    )


def random_quadratic(
    rng: np.random.Generator,
    d1: int,
    d2: int,
    b_margin: float = 0.0,
    schur_margin: float = 0.0,
    scale: float = 1.0,
    max_tries: int = 1000,
) -> ObjectiveFunction:
    """Random quadratic form; optionally rejects until |eig B| and |eig Schur| exceed margins."""
    for _ in range(max_tries):
        a = rng.normal(size=(d1, d1)) * scale
        b = rng.normal(size=(d2, d2)) * scale
        c = rng.normal(size=(d1, d2)) * scale
        a = 0.5 * (a + a.T)
        b = 0.5 * (b + b.T)
        eb = np.linalg.eigvalsh(b)
        if np.min(np.abs(eb)) <= b_margin:
            continue
        if schur_margin > 0:
            s = a - c @ np.linalg.solve(b, c.T)
            if np.min(np.abs(np.linalg.eigvalsh(0.5 * (s + s.T)))) <= schur_margin:
                continue
        return quadratic_form(a, b, c, name="random_quadratic")
    raise RuntimeError("failed to sample a quadratic satisfying the margins")


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _box(lo, hi) -> Box:
    return Box(np.asarray(lo, float), np.asarray(hi, float))


def _quadratic_saddle(**_):
    # x^2 - y^2
    return quadratic_form([[2.0]], [[-2.0]], [[0.0]], name="quadratic_saddle")


def _coupled_quadratic(**_):
    # -x^2 + 5xy - y^2
    return quadratic_form([[-2.0]], [[-2.0]], [[5.0]], name="coupled_quadratic")


def _xy_cos(**_):
    # 0.2xy - cos(y) on [-1,1] x [-2pi, 2pi]
    return ObjectiveFunction(
        name="xy_cos",
        dim_x=1,
        dim_y=1,
        value=lambda x, y: float(0.2 * x[0] * y[0] - math.cos(y[0])),
        gradient=lambda x, y: (np.array([0.2 * y[0]]), np.array([0.2 * x[0] + math.sin(y[0])])),
        hessian=lambda x, y: HessianBlocks([[0.0]], [[math.cos(y[0])]], [[0.2]]),
        x_box=_box([-1.0], [1.0]),
        y_box=_box([-2 * math.pi], [2 * math.pi]),
        lip_value=1.6,
        lip_grad=1.05,
    )


def _damped_xy_cos(**_):
    # -0.03x^2 + 0.2xy - cos(y) on [-1,1] x [-2pi, 2pi]
    return ObjectiveFunction(
        name="damped_xy_cos",
        dim_x=1,
        dim_y=1,
        value=lambda x, y: float(-0.03 * x[0] ** 2 + 0.2 * x[0] * y[0] - math.cos(y[0])),
        gradient=lambda x, y: (
            np.array([-0.06 * x[0] + 0.2 * y[0]]),
            np.array([0.2 * x[0] + math.sin(y[0])]),
        ),
        hessian=lambda x, y: HessianBlocks([[-0.06]], [[math.cos(y[0])]], [[0.2]]),
        x_box=_box([-1.0], [1.0]),
        y_box=_box([-2 * math.pi], [2 * math.pi]),
        lip_value=1.8,
        lip_grad=1.05,
    )


def _sin_sum(**_):
    # sin(x + y), unbounded
    return ObjectiveFunction(
        name="sin_sum",
        dim_x=1,
        dim_y=1,
        value=lambda x, y: float(math.sin(x[0] + y[0])),
        gradient=lambda x, y: (
            np.array([math.cos(x[0] + y[0])]),
            np.array([math.cos(x[0] + y[0])]),
        ),
        hessian=lambda x, y: HessianBlocks(
            [[-math.sin(x[0] + y[0])]],
            [[-math.sin(x[0] + y[0])]],
            [[-math.sin(x[0] + y[0])]],
        ),
        lip_value=math.sqrt(2.0),
        lip_grad=2.0,
    )


def _y2_minus_2xy(**_):
    # y^2 - 2xy on [-1,1]^2 (local minimax points do not exist here)
    f = quadratic_form([[0.0]], [[2.0]], [[-2.0]], name="y2_minus_2xy")
    return ObjectiveFunction(
        name="y2_minus_2xy",
        dim_x=1,
        dim_y=1,
        value=f.value,
        gradient=f.gradient,
        hessian=f.hessian,
        x_box=_box([-1.0], [1.0]),
        y_box=_box([-1.0], [1.0]),
        lip_value=math.sqrt(20.0),
        lip_grad=f.lip_grad,
    )


def _bilinear(**_):
    # xy, unbounded; the discrete-GDA spiral and flow-circle example
    return quadratic_form([[0.0]], [[0.0]], [[1.0]], name="bilinear")


def _abs_bilinear(**_):
    # xy with y in [-1,1]: phi(x) = max_y xy = |x|
    f = quadratic_form([[0.0]], [[0.0]], [[1.0]], name="abs_bilinear")
    return ObjectiveFunction(
        name="abs_bilinear",
        dim_x=1,
        dim_y=1,
        value=f.value,
        gradient=f.gradient,
        hessian=f.hessian,
        x_box=_box([-2.0], [2.0]),
        y_box=_box([-1.0], [1.0]),
        lip_value=math.sqrt(5.0),
        lip_grad=1.0,
    )


def _strong_concave_y(**_):
    # x^2 - (y - x)^2: strongly concave in y with phi(x) = x^2
    return ObjectiveFunction(
        name="strong_concave_y",
        dim_x=1,
        dim_y=1,
        value=lambda x, y: float(x[0] ** 2 - (y[0] - x[0]) ** 2),
        gradient=lambda x, y: (np.array([2.0 * y[0]]), np.array([2.0 * x[0] - 2.0 * y[0]])),
        hessian=lambda x, y: HessianBlocks([[0.0]], [[-2.0]], [[2.0]]),
        x_box=_box([-2.0], [2.0]),
        y_box=_box([-2.0], [2.0]),
        lip_value=math.sqrt(80.0),
        lip_grad=1.0 + math.sqrt(5.0),
    )


def _limit_nash_quadratic(eps: float = 1.0, **_):
    # x^2 + 2 sqrt(eps) xy + (eps/2) y^2: gamma-GDA stable at gamma=1/eps, never Nash
    if eps <= 0:
        raise ValueError("eps must be positive")
    r = math.sqrt(eps)
    f = quadratic_form([[2.0]], [[eps]], [[2.0 * r]], name="limit_nash_quadratic")
    return ObjectiveFunction(
        name="limit_nash_quadratic",
        dim_x=1,
        dim_y=1,
        value=f.value,
        gradient=f.gradient,
        hessian=f.hessian,
        lip_grad=f.lip_grad,
        params={"eps": eps},
    )


def _limit_minimax_quadratic(eps: float = 1.0, **_):
    # -x^2 + 2 sqrt(eps) xy - (eps/2) y^2: strict local minimax, gamma-GDA unstable at gamma=1/eps
    if eps <= 0:
        raise ValueError("eps must be positive")
    r = math.sqrt(eps)
    f = quadratic_form([[-2.0]], [[-eps]], [[2.0 * r]], name="limit_minimax_quadratic")
    return ObjectiveFunction(
        name="limit_minimax_quadratic",
        dim_x=1,
        dim_y=1,
        value=f.value,
        gradient=f.gradient,
        hessian=f.hessian,
        lip_grad=f.lip_grad,
        params={"eps": eps},
    )


def _limit_minimax_4d(eps: float = 1.0, **_):
    # x1^2 + 2 sqrt(eps) x1y1 + (eps/2) y1^2 - x2^2/2 + 2 sqrt(eps) x2y2 - eps y2^2
    if eps <= 0:
        raise ValueError("eps must be positive")
    r = math.sqrt(eps)
    a = np.diag([2.0, -1.0])
    b = np.diag([eps, -2.0 * eps])
    c = 2.0 * r * np.eye(2)
    f = quadratic_form(a, b, c, name="limit_minimax_4d")
    return ObjectiveFunction(
        name="limit_minimax_4d",
        dim_x=2,
        dim_y=2,
        value=f.value,
        gradient=f.gradient,
        hessian=f.hessian,
        lip_grad=f.lip_grad,
        params={"eps": eps},
    )


_CATALOG: dict[str, Callable[..., ObjectiveFunction]] = {
    "quadratic_saddle": _quadratic_saddle,
    "coupled_quadratic": _coupled_quadratic,
    "xy_cos": _xy_cos,
    "damped_xy_cos": _damped_xy_cos,
    "sin_sum": _sin_sum,
    "y2_minus_2xy": _y2_minus_2xy,
    "bilinear": _bilinear,
    "abs_bilinear": _abs_bilinear,
    "strong_concave_y": _strong_concave_y,
    "limit_nash_quadratic": _limit_nash_quadratic,
    "limit_minimax_quadratic": _limit_minimax_quadratic,
    "limit_minimax_4d": _limit_minimax_4d,
}

# name -> (formula, domain, dims, parameters) for the CLI listing and docs
CATALOG_DOC: dict[str, tuple[str, str, str, str]] = {
    "quadratic_saddle": ("x^2 - y^2", "unbounded", "1+1", ""),
    "coupled_quadratic": ("-x^2 + 5xy - y^2", "unbounded", "1+1", ""),
    "xy_cos": ("0.2xy - cos(y)", "[-1,1] x [-2pi,2pi]", "1+1", ""),
    "damped_xy_cos": ("-0.03x^2 + 0.2xy - cos(y)", "[-1,1] x [-2pi,2pi]", "1+1", ""),
    "sin_sum": ("sin(x + y)", "unbounded", "1+1", ""),
    "y2_minus_2xy": ("y^2 - 2xy", "[-1,1]^2", "1+1", ""),
    "bilinear": ("xy", "unbounded", "1+1", ""),
    "abs_bilinear": ("xy", "[-2,2] x [-1,1]", "1+1", ""),
    "strong_concave_y": ("x^2 - (y-x)^2", "[-2,2]^2", "1+1", ""),
    "limit_nash_quadratic": ("x^2 + 2*sqrt(eps)*xy + (eps/2)y^2", "unbounded", "1+1", "eps"),
    "limit_minimax_quadratic": ("-x^2 + 2*sqrt(eps)*xy - (eps/2)y^2", "unbounded", "1+1", "eps"),
    "limit_minimax_4d": (
        "x1^2 + 2*sqrt(eps)*x1y1 + (eps/2)y1^2 - x2^2/2 + 2*sqrt(eps)*x2y2 - eps*y2^2",
        "unbounded",
        "2+2",
        "eps",
    ),
}


def catalog(name: str, **params) -> ObjectiveFunction:
    """Look up a documented objective by name; parameterized entries accept eps."""
    try:
        factory = _CATALOG[name]
    except KeyError:
        known = ", ".join(sorted(_CATALOG))
        raise UnknownNameError(f"unknown catalog entry {name!r}; known: {known}") from None
    return factory(**params)


def catalog_names() -> list[str]:
    return sorted(_CATALOG)
