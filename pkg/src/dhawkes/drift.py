"""Numerical verification of the Lyapunov drift constructions.

Two families are checked on finite boxes of the state space:

* the linear weights V(x) = 1 + sum_i alpha_i x_i that certify
  geometric ergodicity whenever the positive parts of the coefficients
  sum below one, for any memory length;
* the ratio function V_alpha(i,j,k) = (i + alpha*j)/(j + alpha*k + 1) + 1
  for the p = 3 inhibition regime b < 0, c < 0, Disc < 0, with alpha at
  the positive root of the mirror cubic so that the drift's quadratic
  form degenerates to negative semidefinite with an isotropic line that
  avoids the positive octant.

Both drifts admit closed-form one-step expectations (the count is
Poisson, V is affine in the new coordinate), so no sampling is involved:
a scan is an exact enumeration, and a violation-free boundary shell is
the finite-violation-set evidence the ergodicity argument needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cubic import (
    CubicReport,
    alpha_q,
    boundary_band,
    cubic_report,
    det_m_alpha_identity_check,
    discriminant,
)
from .model import Params, State, check_state, intensity

MAX_RECORDED_VIOLATIONS = 100_000


@dataclass(frozen=True)
class DriftReport:
    """Result of one drift scan over [0, box_radius]^p."""

    epsilon: float
    violation_set: tuple[State, ...]
    violations_total: int
    k_bound: float
    box_radius: int
    shell_clean: bool
    small_set_verified: bool

    def __post_init__(self) -> None:
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError(f"epsilon must be in (0, 1], got {self.epsilon}")


@dataclass(frozen=True)
class SmallSetCheck:
    """Uniform lower bound on the 3-step return probability from the clipped set."""

    verified: bool
    witness_probability: float
    bound: float
    states_checked: int
    analytic_tail: bool


# ---------------------------------------------------------------------------
# Linear weights for the positive-part criterion (any p)
# ---------------------------------------------------------------------------


def linear_weights(params: Params) -> list[float]:
    """Weights alpha_i = eta*(p-i+1)/p + sum_{j>=i} (a_j)_+ with eta = 1 - sum (a_i)_+.

    Requires the positive parts to sum below 1.  alpha_1 = 1 always, and
    each weight lies in (0, 1].
    """
    plus = [max(x, 0.0) for x in params.coeffs]
    eta = 1.0 - sum(plus)
    if eta <= 0.0:
        raise ValueError(f"positive parts must sum below 1, got {sum(plus)}")
    p = params.p
    tails = [sum(plus[i:]) for i in range(p)]
    return [eta * (p - i) / p + tails[i] for i in range(p)]


def linear_drift_coeffs(params: Params, epsilon: float) -> list[float]:
    """Coefficients of x_i in the affine upper bound on Delta V + eps*V.

    Each equals (a_i)_+ + alpha_{i+1} + alpha_i*(eps - 1) = -eta/p + eps*alpha_i;
    all are strictly negative iff eps < eta/p, which is what makes the
    violation set finite.
    """
    alphas = linear_weights(params) + [0.0]
    plus = [max(x, 0.0) for x in params.coeffs]
    return [
        plus[i] + alphas[i + 1] + alphas[i] * (epsilon - 1.0) for i in range(params.p)
    ]


def linear_delta_v(params: Params, state: State, epsilon: float) -> float:
    """Exact Delta V + eps*V at a state under the linear weights.

    The one-step expectation is closed-form: E V(X_1) = s + sum_{i>=2}
    alpha_i x_{i-1} + 1 with s the clipped intensity, so the value is
    s + sum_i (alpha_{i+1} + alpha_i (eps-1)) x_i + eps.
    """
    check_state(state, params.p)
    alphas = linear_weights(params) + [0.0]
    s = intensity(params, state)
    val = s + epsilon
    for i, x_i in enumerate(state):
        val += (alphas[i + 1] + alphas[i] * (epsilon - 1.0)) * x_i
    return val


def linear_drift_scan(params: Params, epsilon: float, box_radius: int) -> DriftReport:
    """Enumerate drift violations of the linear-weight condition in a box.

    Only candidate states where the affine bound is positive need
    checking: the bound dominates the exact drift, and its coefficients
    are strictly negative, so candidates live in a simplex near the
    origin.  Violations are then confirmed against the exact value.  A
    clean shell certifies the violation set is finite (it is complete
    whenever the simplex fits inside the box); the set being finite makes
    it small by irreducibility, hence small_set_verified mirrors
    shell_clean here.
    """
    if box_radius < 0:
        raise ValueError(f"box_radius must be >= 0, got {box_radius}")
    bound_coeffs = linear_drift_coeffs(params, epsilon)
    if any(cb >= 0.0 for cb in bound_coeffs):
        plus = [max(x, 0.0) for x in params.coeffs]
        eta = 1.0 - sum(plus)
        raise ValueError(
            f"epsilon={epsilon} too large: need epsilon < eta/p = {eta / params.p}"
        )
    alphas = linear_weights(params) + [0.0]
    exact_coeffs = [
        alphas[i + 1] + alphas[i] * (epsilon - 1.0) for i in range(params.p)
    ]
    budget = epsilon + params.lam
    coeffs = params.coeffs
    lam = params.lam
    p = params.p

    violations: list[State] = []
    k_bound = 0.0
    total = 0
    shell_clean = True
    prefix = [0] * p

    def rec(idx: int, used: float) -> None:
        nonlocal k_bound, total, shell_clean
        if idx == p:
            s = lam + sum(a_i * x_i for a_i, x_i in zip(coeffs, prefix))
            s = s if s > 0.0 else 0.0
            val = s + epsilon + sum(
                ec * x_i for ec, x_i in zip(exact_coeffs, prefix)
            )
            if val > 0.0:
                total += 1
                if total <= MAX_RECORDED_VIOLATIONS:
                    violations.append(tuple(prefix))
                if max(prefix) >= box_radius:
                    shell_clean = False
                if val > k_bound:
                    k_bound = val
            return
        ci = -bound_coeffs[idx]
        x = 0
        while x <= box_radius:
            u2 = used + ci * x
            if u2 >= budget:
                break
            prefix[idx] = x
            rec(idx + 1, u2)
            x += 1
        prefix[idx] = 0

    rec(0, 0.0)
    return DriftReport(
        epsilon=epsilon,
        violation_set=tuple(violations),
        violations_total=total,
        k_bound=k_bound,
        box_radius=box_radius,
        shell_clean=shell_clean,
        small_set_verified=shell_clean,
    )


# ---------------------------------------------------------------------------
# Ratio function for the p = 3 inhibition regime
# ---------------------------------------------------------------------------


def v_alpha(alpha: float, state: State) -> float:
    """V_alpha(i, j, k) = (i + alpha*j)/(j + alpha*k + 1) + 1, always >= 1."""
    if alpha <= 0.0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    check_state(state, 3)
    i, j, k = state
    return (i + alpha * j) / (j + alpha * k + 1.0) + 1.0


def delta_v_alpha(params3: Params, alpha: float, state: State) -> float:
    """Exact one-step drift of V_alpha: E V(X_1) - V(x), no sampling.

    With X_1 = (L, i, j) and L Poisson of mean s, E V(X_1) collapses to
    (s + alpha*i)/(i + alpha*j + 1) + 1; for clipped states s = 0 the
    same formula applies.
    """
    if params3.p != 3:
        raise ValueError(f"requires p=3, got p={params3.p}")
    if alpha <= 0.0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    i, j, k = state
    s = intensity(params3, state)
    return (s + alpha * i) / (i + alpha * j + 1.0) - (i + alpha * j) / (j + alpha * k + 1.0)


def q_form(a: float, b: float, c: float, alpha: float, x: float, y: float, z: float) -> float:
    """Quadratic part of the V_alpha drift numerator.

    q = -x^2 + (b - alpha^2) y^2 + c*alpha*z^2 + (a - alpha) xy
        + alpha(a + alpha) xz + (c + b*alpha) yz.
    """
    return (
        -x * x
        + (b - alpha * alpha) * y * y
        + c * alpha * z * z
        + (a - alpha) * x * y
        + alpha * (a + alpha) * x * z
        + (c + b * alpha) * y * z
    )


def q_form_negativity_check(params3: Params, alpha: float, grid_density: int) -> float:
    """Max of q over unit directions of the closed positive octant.

    Directions are the normalized integer compositions (m1, m2, m3) of
    grid_density, which include the three axes.  Under the inhibition
    hypotheses the maximum must be strictly negative: the isotropic line
    of the degenerate form leaves the octant.
    """
    if grid_density < 1:
        raise ValueError(f"grid_density must be >= 1, got {grid_density}")
    a, b, c = params3.abc
    if not (discriminant(a, b, c) < 0.0 and b < 0.0 and c < 0.0):
        raise ValueError("negativity check requires b < 0, c < 0 and Disc < 0")
    best = -math.inf
    d = grid_density
    for m1 in range(d + 1):
        for m2 in range(d + 1 - m1):
            m3 = d - m1 - m2
            norm = math.sqrt(m1 * m1 + m2 * m2 + m3 * m3)
            val = q_form(a, b, c, alpha, m1 / norm, m2 / norm, m3 / norm)
            if val > best:
                best = val
    return best


def scan_violations(
    params3: Params, alpha: float, epsilon: float, box_radius: int
) -> DriftReport:
    """Exhaustive drift check of V_alpha over [0, box_radius]^3.

    States where the intensity clips to zero belong to the candidate
    small set and are excluded from the violation count but contribute
    to the K bound.  A violation on the outermost shell means the box
    was too small to witness finiteness; that is flagged, not hidden.
    """
    if params3.p != 3:
        raise ValueError(f"requires p=3, got p={params3.p}")
    if box_radius < 0:
        raise ValueError(f"box_radius must be >= 0, got {box_radius}")
    if alpha <= 0.0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if not (0.0 < epsilon <= 1.0):
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    a, b, c = params3.abc
    lam = params3.lam
    r = box_radius
    axis = np.arange(r + 1, dtype=np.float64)
    jj, kk = np.meshgrid(axis, axis, indexing="ij")
    denom_jk = jj + alpha * kk + 1.0

    violations: list[State] = []
    total = 0
    k_bound = -math.inf
    shell_clean = True
    for i in range(r + 1):
        s_raw = a * i + b * jj + c * kk + lam
        s = np.maximum(s_raw, 0.0)
        in_a = s_raw <= 0.0
        v = (i + alpha * jj) / denom_jk + 1.0
        dv = (s + alpha * i) / (i + alpha * jj + 1.0) - (i + alpha * jj) / denom_jk
        dvev = dv + epsilon * v
        bad = np.logical_and(~in_a, dvev > 0.0)
        contrib = dvev[np.logical_or(bad, in_a)]
        if contrib.size:
            k_bound = max(k_bound, float(contrib.max()))
        n_bad = int(bad.sum())
        if n_bad:
            total += n_bad
            coords = np.argwhere(bad)
            if i == r or (coords == r).any():
                shell_clean = False
            room = MAX_RECORDED_VIOLATIONS - len(violations)
            if room > 0:
                for j_, k_ in coords[:room]:
                    violations.append((i, int(j_), int(k_)))
    small = small_set_applicable(params3) and verify_small_set(params3, box_radius).verified
    return DriftReport(
        epsilon=epsilon,
        violation_set=tuple(violations),
        violations_total=total,
        k_bound=k_bound if math.isfinite(k_bound) else 0.0,
        box_radius=box_radius,
        shell_clean=shell_clean,
        small_set_verified=small,
    )


def small_set_applicable(params3: Params) -> bool:
    """The clipped set is provably small only when b <= 0 and c <= 0."""
    _, b, c = params3.abc
    return b <= 0.0 and c <= 0.0


def verify_small_set(params3: Params, box_radius: int) -> SmallSetCheck:
    """Check the 3-step return bound from every clipped state in the box.

    From a state with zero intensity the chain moves deterministically to
    (0, i, j), and with b, c <= 0 the next two zero draws each have
    probability at least e^(-lam), giving P^3(x, 0) >= e^(-2*lam).  The
    bound is evaluated exactly here for each clipped (i, j) pair; states
    outside the box satisfy the same bound by the identical argument
    (analytic_tail), since enlarging i, j, k only shrinks the clipped
    intensities.
    """
    if params3.p != 3:
        raise ValueError(f"requires p=3, got p={params3.p}")
    a, b, c = params3.abc
    if not small_set_applicable(params3):
        raise ValueError(f"small-set bound needs b <= 0 and c <= 0, got b={b} c={c}")
    lam = params3.lam
    r = box_radius
    axis = np.arange(r + 1, dtype=np.float64)
    ii, jj = np.meshgrid(axis, axis, indexing="ij")
    # s(i,j,k) is nonincreasing in k (c <= 0), so (i,j,.) meets the
    # clipped set inside the box iff s(i, j, r) <= 0.
    member = a * ii + b * jj + c * r + lam <= 0.0
    if not member.any():
        return SmallSetCheck(
            verified=True,
            witness_probability=1.0,
            bound=math.exp(-2.0 * lam),
            states_checked=0,
            analytic_tail=True,
        )
    p3 = np.exp(
        -np.maximum(b * ii + c * jj + lam, 0.0) - np.maximum(c * ii + lam, 0.0)
    )
    witness = float(p3[member].min())
    if c < 0.0:
        k_min = np.ceil(np.maximum((a * ii + b * jj + lam) / (-c), 0.0))
        counts = np.where(member, r + 1 - k_min, 0.0)
        states = int(counts.sum())
    else:
        states = int(member.sum()) * (r + 1)
    bound = math.exp(-2.0 * lam)
    return SmallSetCheck(
        verified=witness >= bound - 1e-12,
        witness_probability=witness,
        bound=bound,
        states_checked=states,
        analytic_tail=True,
    )


# ---------------------------------------------------------------------------
# End-to-end certification driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DriftCertificate:
    """Machine-checked premises of geometric ergodicity for one parameter triple."""

    cubic: CubicReport
    alpha: float
    epsilon: float
    report: DriftReport
    small_set: SmallSetCheck
    q_max_on_octant: float
    det_identity_residual: float

    @property
    def complete(self) -> bool:
        return (
            self.report.shell_clean
            and self.small_set.verified
            and self.q_max_on_octant < 0.0
        )


def certify_drift(
    params3: Params,
    box_radius: int = 200,
    max_radius: int = 1600,
    q_grid_density: int = 19,
) -> DriftCertificate:
    """Assemble the full numerical certificate for b < 0, c < 0, Disc < 0.

    Epsilon is taken from the geometric grid 2^-1, ..., 2^-20, keeping
    the largest value whose scan shows a violation-free boundary shell;
    when no epsilon is clean the box is doubled, up to max_radius.
    """
    a, b, c = params3.abc
    if boundary_band(a, b, c):
        raise ValueError("parameters sit on the Disc = 0 boundary band; not certifiable")
    if not (b < 0.0 and c < 0.0 and discriminant(a, b, c) < 0.0):
        raise ValueError("certification requires b < 0, c < 0 and Disc < 0")
    alpha = alpha_q(a, b, c)
    radius = box_radius
    while True:
        for k in range(1, 21):
            eps = 2.0**-k
            rep = scan_violations(params3, alpha, eps, radius)
            if rep.shell_clean:
                return DriftCertificate(
                    cubic=cubic_report(a, b, c),
                    alpha=alpha,
                    epsilon=eps,
                    report=rep,
                    small_set=verify_small_set(params3, radius),
                    q_max_on_octant=q_form_negativity_check(params3, alpha, q_grid_density),
                    det_identity_residual=det_m_alpha_identity_check(a, b, c, alpha),
                )
        if radius >= max_radius:
            raise RuntimeError(
                f"no epsilon in the grid yields a clean shell up to radius {max_radius}"
            )
        radius = min(2 * radius, max_radius)
