"""Second-order taxonomy of stationary points.

Verdicts follow the strict/marginal discipline: a strict call is made only
when the deciding eigenvalue clears the ``tau_strict`` band, a necessary
condition is called failed only when it is violated by more than the band,
and anything inside the band is reported marginal.  Points whose y-block
(resp. x-block) Hessian is near singular take the degenerate branch and get
no minimax (resp. maximin) claim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import DEFAULT_GAMMA_LADDER, DEFAULT_TOL, JSON_SCHEMA_VERSION, Tolerances
from .errors import NonFiniteError, NotStationaryError, OutOfDomainError
from .linalg import general_eigenvalues, is_near_singular, schur_complement, symmetric_eigenvalues
from .problems import HessianBlocks, ObjectiveFunction, Point


class NashVerdict(str, Enum):
    STRICT_NASH = "StrictNash"
    NOT_NASH = "NotNash"
    MARGINAL = "SecondOrderMarginal"


class MinimaxVerdict(str, Enum):
    STRICT_LOCAL_MINIMAX = "StrictLocalMinimax"
    NECESSARY_FAILED = "NecessaryFailed"
    DEGENERATE_B = "DegenerateB"
    MARGINAL = "SecondOrderMarginal"


class MaximinVerdict(str, Enum):
    STRICT_LOCAL_MAXIMIN = "StrictLocalMaximin"
    NECESSARY_FAILED = "NecessaryFailed"
    DEGENERATE_A = "DegenerateA"
    MARGINAL = "SecondOrderMarginal"


class StabilityVerdict(str, Enum):
    STRICT_STABLE = "StrictStable"
    STRICT_UNSTABLE = "StrictUnstable"
    MARGINAL = "Marginal"


class GdaMembership(str, Enum):
    INSIDE = "Inside"
    OUTSIDE = "Outside"
    DEGENERATE_POINT = "DegeneratePoint"


@dataclass(frozen=True)
class Classification:
    point: Point
    gradient_norm: float
    is_stationary: bool
    nash_verdict: NashVerdict | None
    minimax_verdict: MinimaxVerdict | None
    maximin_verdict: MaximinVerdict | None
    a_eigenvalues: list[float]
    b_eigenvalues: list[float]
    schur_eigenvalues: list[float]       # empty when B is degenerate
    necessary_minimax_holds: bool | None  # Schur >= 0 check, reported when B < 0
    margins: dict[str, float]

    def to_json(self) -> dict:
        return {
            "schemaVersion": JSON_SCHEMA_VERSION,
            "point": {"x": self.point.x.tolist(), "y": self.point.y.tolist()},
            "gradientNorm": self.gradient_norm,
            "isStationary": self.is_stationary,
            "nashVerdict": self.nash_verdict.value if self.nash_verdict else None,
            "minimaxVerdict": self.minimax_verdict.value if self.minimax_verdict else None,
            "maximinVerdict": self.maximin_verdict.value if self.maximin_verdict else None,
            "aEigenvalues": self.a_eigenvalues,
            "bEigenvalues": self.b_eigenvalues,
            "schurEigenvalues": self.schur_eigenvalues,
            "necessaryMinimaxHolds": self.necessary_minimax_holds,
            "margins": {k: (v if np.isfinite(v) else None) for k, v in self.margins.items()},
        }


@dataclass(frozen=True)
class GdaStability:
    gamma: float
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    verdict: StabilityVerdict
    max_real_part: float

    def to_json(self) -> dict:
        return {
            "schemaVersion": JSON_SCHEMA_VERSION,
            "gamma": self.gamma,
            "eigenvalues": [{"re": float(z.real), "im": float(z.imag)} for z in self.eigenvalues],
            "verdict": self.verdict.value,
            "maxRealPart": self.max_real_part,
        }


@dataclass(frozen=True)
class LadderRow:
    gamma: float
    small_error_ratio: float   # max_i |lambda_i + eps*mu_i| / eps
    large_error: float         # max_i |lambda_{i+d1} - nu_i|
    verdict: StabilityVerdict


@dataclass(frozen=True)
class InfinityGdaVerdict:
    membership: GdaMembership
    schur_eigenvalues: list[float]   # mu_i: small eigenvalues behave like -eps*mu_i
    b_eigenvalues: list[float]       # nu_i: large eigenvalues approach these
    ladder: list[LadderRow] = field(default_factory=list)
    ladder_consistent: bool | None = None

    def to_json(self) -> dict:
        return {
            "schemaVersion": JSON_SCHEMA_VERSION,
            "membership": self.membership.value,
            "predictedSmallEigScale": [-m for m in self.schur_eigenvalues],
            "predictedLargeEigs": self.b_eigenvalues,
            "empiricalAgreement": [
                {
                    "gamma": r.gamma,
                    "smallErrorRatio": r.small_error_ratio,
                    "largeError": r.large_error,
                    "verdict": r.verdict.value,
                }
                for r in self.ladder
            ],
            "ladderConsistent": self.ladder_consistent,
        }


def _check_point(f: ObjectiveFunction, p: Point) -> None:
    if not f.in_domain(p):
        raise OutOfDomainError(f"{p} lies outside the domain of {f.name}")


def _minimax_branch(a, b, c, tol: Tolerances):
    """Shared minimax logic; the maximin call passes sign-swapped, transposed blocks.

    Returns (verdict, schur eigenvalues or [], necessary-condition flag, margin).
    """
    if is_near_singular(b, tol):
        return MinimaxVerdict.DEGENERATE_B, [], None, float("nan")
    eigs_b = symmetric_eigenvalues(b, tol)
    max_b = float(eigs_b[-1])
    if max_b > tol.tau_strict:
        return MinimaxVerdict.NECESSARY_FAILED, [], None, -max_b
    if max_b >= -tol.tau_strict:
        return MinimaxVerdict.MARGINAL, [], None, -abs(max_b)
    s = schur_complement(a, b, c, tol)
    eigs_s = symmetric_eigenvalues(s, tol)
    min_s = float(eigs_s[0])
    necessary = bool(min_s >= -tol.tau_strict)
    margin = min(-max_b, min_s)
    if min_s > tol.tau_strict:
        return MinimaxVerdict.STRICT_LOCAL_MINIMAX, [float(v) for v in eigs_s], necessary, margin
    if min_s < -tol.tau_strict:
        return MinimaxVerdict.NECESSARY_FAILED, [float(v) for v in eigs_s], necessary, margin
    return MinimaxVerdict.MARGINAL, [float(v) for v in eigs_s], necessary, margin


_MAXIMIN_FROM_MINIMAX = {
    MinimaxVerdict.STRICT_LOCAL_MINIMAX: MaximinVerdict.STRICT_LOCAL_MAXIMIN,
    MinimaxVerdict.NECESSARY_FAILED: MaximinVerdict.NECESSARY_FAILED,
    MinimaxVerdict.DEGENERATE_B: MaximinVerdict.DEGENERATE_A,
    MinimaxVerdict.MARGINAL: MaximinVerdict.MARGINAL,
}


def classify(f: ObjectiveFunction, p: Point, tol: Tolerances = DEFAULT_TOL) -> Classification:
    """Full second-order taxonomy at a point.

    Non-stationary points get no second-order verdicts; all second-order
    statements presuppose a vanishing gradient.
    """
    _check_point(f, p)
    gn = f.grad_norm(p)
    if not np.isfinite(gn):
        raise NonFiniteError(f"gradient of {f.name} is non-finite at {p}")
    blocks = f.hess_at(p)
    a, b, c = blocks.a, blocks.b, blocks.c
    eigs_a = symmetric_eigenvalues(a, tol)
    eigs_b = symmetric_eigenvalues(b, tol)

    if gn > tol.tau_station:
        return Classification(
            point=p,
            gradient_norm=gn,
            is_stationary=False,
            nash_verdict=None,
            minimax_verdict=None,
            maximin_verdict=None,
            a_eigenvalues=[float(v) for v in eigs_a],
            b_eigenvalues=[float(v) for v in eigs_b],
            schur_eigenvalues=[],
            necessary_minimax_holds=None,
            margins={},
        )

    min_a, max_b = float(eigs_a[0]), float(eigs_b[-1])
    nash_margin = min(min_a, -max_b)
    if min_a > tol.tau_strict and max_b < -tol.tau_strict:
        nash = NashVerdict.STRICT_NASH
    elif min_a < -tol.tau_strict or max_b > tol.tau_strict:
        nash = NashVerdict.NOT_NASH
    else:
        nash = NashVerdict.MARGINAL

    mm_verdict, schur_eigs, necessary, mm_margin = _minimax_branch(a, b, c, tol)
    # maximin point of f == minimax point of -f with the players swapped
    mx_raw, _, _, mx_margin = _minimax_branch(-b, -a, -c.T, tol)
    mx_verdict = _MAXIMIN_FROM_MINIMAX[mx_raw]

    return Classification(
        point=p,
        gradient_norm=gn,
        is_stationary=True,
        nash_verdict=nash,
        minimax_verdict=mm_verdict,
        maximin_verdict=mx_verdict,
        a_eigenvalues=[float(v) for v in eigs_a],
        b_eigenvalues=[float(v) for v in eigs_b],
        schur_eigenvalues=schur_eigs,
        necessary_minimax_holds=necessary,
        margins={"nash": nash_margin, "minimax": mm_margin, "maximin": mx_margin},
    )


def gda_jacobian(blocks: HessianBlocks, gamma: float) -> np.ndarray:
    """J_gamma = [[-A/gamma, -C/gamma], [C^T, B]] of the gamma-GDA flow."""
    a, b, c = blocks.a, blocks.b, blocks.c
    top = np.hstack([-a / gamma, -c / gamma])
    bot = np.hstack([c.T, b])
    return np.vstack([top, bot])


def gda_stability(
    f: ObjectiveFunction, p: Point, gamma: float, tol: Tolerances = DEFAULT_TOL
) -> GdaStability:
    """Spectrum of the gamma-GDA flow Jacobian with a strict stability verdict."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    _check_point(f, p)
    jac = gda_jacobian(f.hess_at(p), gamma)
    eigs = general_eigenvalues(jac, tol)
    max_re = float(np.max(eigs.real))
    if max_re < -tol.tau_strict:
        verdict = StabilityVerdict.STRICT_STABLE
    elif max_re > tol.tau_strict:
        verdict = StabilityVerdict.STRICT_UNSTABLE
    else:
        verdict = StabilityVerdict.MARGINAL
    return GdaStability(gamma=float(gamma), jacobian=jac, eigenvalues=eigs, verdict=verdict, max_real_part=max_re)


def match_eigenvalues(observed: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    """Pair observed with predicted eigenvalues by min-cost exact matching.

    Returns the observed values reordered so entry i matches predicted[i];
    eigenvalues are only defined up to labeling, so matching is on modulus
    of the difference.
    """
    obs = np.asarray(observed, dtype=complex)
    pred = np.asarray(predicted, dtype=complex)
    if obs.size != pred.size:
        raise ValueError("matching requires equal counts")
    cost = np.abs(obs[:, None] - pred[None, :])
    rows, cols = linear_sum_assignment(cost)
    out = np.empty_like(pred)
    out[cols] = obs[rows]
    return out


def infinity_gda(
    f: ObjectiveFunction,
    p: Point,
    gamma_ladder=DEFAULT_GAMMA_LADDER,
    tol: Tolerances = DEFAULT_TOL,
) -> InfinityGdaVerdict:
    """Membership in the gamma -> infinity stable-set limit, with ladder evidence.

    Membership is decided analytically (strict minimax <=> inside, necessary
    condition failed <=> outside); a degenerate or marginal second-order
    structure yields DegeneratePoint and no claim.  The ladder rows report
    how fast the d1 small eigenvalues of J_gamma approach -eps * mu_i and the
    rest approach nu_i, and whether the finite-gamma verdicts agree with the
    limit (they need not: the ladder cannot decide a set-theoretic limit).
    """
    _check_point(f, p)
    ladder = sorted(float(g) for g in gamma_ladder)
    if not ladder or ladder[0] <= 0:
        raise ValueError("gamma ladder must be positive")
    gn = f.grad_norm(p)
    if gn > tol.tau_station:
        raise NotStationaryError(f"gradient norm {gn:.3e} exceeds tau_station")

    blocks = f.hess_at(p)
    if is_near_singular(blocks.b, tol):
        return InfinityGdaVerdict(
            membership=GdaMembership.DEGENERATE_POINT,
            schur_eigenvalues=[],
            b_eigenvalues=[float(v) for v in symmetric_eigenvalues(blocks.b, tol)],
        )

    d1 = f.dim_x
    mu = symmetric_eigenvalues(schur_complement(blocks.a, blocks.b, blocks.c, tol), tol)
    nu = symmetric_eigenvalues(blocks.b, tol)

    rows = []
    for gamma in ladder:
        eps = 1.0 / gamma
        stab = gda_stability(f, p, gamma, tol)
        eigs = stab.eigenvalues[np.argsort(np.abs(stab.eigenvalues))]
        small, large = eigs[:d1], eigs[d1:]
        small_m = match_eigenvalues(small, -eps * mu.astype(complex))
        large_m = match_eigenvalues(large, nu.astype(complex))
        rows.append(
            LadderRow(
                gamma=gamma,
                small_error_ratio=float(np.max(np.abs(small_m + eps * mu)) / eps),
                large_error=float(np.max(np.abs(large_m - nu))),
                verdict=stab.verdict,
            )
        )

    cls = classify(f, p, tol)
    if cls.minimax_verdict == MinimaxVerdict.STRICT_LOCAL_MINIMAX:
        membership = GdaMembership.INSIDE
        expected = StabilityVerdict.STRICT_STABLE
    elif cls.minimax_verdict == MinimaxVerdict.NECESSARY_FAILED:
        membership = GdaMembership.OUTSIDE
        expected = StabilityVerdict.STRICT_UNSTABLE
    else:
        # marginal Schur: the limit criterion cannot separate o(eps) from eps*0
        membership = GdaMembership.DEGENERATE_POINT
        expected = None

    consistent = None if expected is None else rows[-1].verdict == expected
    return InfinityGdaVerdict(
        membership=membership,
        schur_eigenvalues=[float(v) for v in mu],
        b_eigenvalues=[float(v) for v in nu],
        ladder=rows,
        ladder_consistent=consistent,
    )
