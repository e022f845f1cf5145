"""Alternating-minimization solver for rate-regularized routing.

For a loss matrix ell (N items x R experts) and a multiplier lam > 0, the
objective over row-stochastic gates p(t|x_i) is

    L(p) = (1/N) sum_i sum_t p(t|x_i) ell_{i,t}  +  lam * I(X;T),

where I(X;T) is the plug-in routing information of the gate.  The solver
alternates the classic pair of updates: tilt each row toward low loss,

    p(t|x_i)  proportional to  pi_t * exp(-ell_{i,t} / lam),

then refresh the marginal pi as the column mean of the rows.  Each half
step minimizes the objective in one argument, so the Lagrangian never
increases; iteration stops when the decrease falls below ``tol``.

Every single-expert point mass is an exact fixed point of the update, so
after iterating the solver also compares against the best single-expert
gate and returns whichever Lagrangian is lower.  Plain iteration moves by
only ~(loss spread)/lam per step, so for very large lam this comparison
is what reaches the collapsed endpoint in finite time.

Sweeping lam over a grid traces the empirical rate-distortion curve of
the bank; points are reported sorted by achieved rate.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr

from .core import atomic_write_text, fmt_float
from .estimators import routing_mi

RD_CURVE_HEADER = "lambda,rate_nats,distortion,lagrangian,iterations,converged"


@dataclass(frozen=True, eq=False)
class GateMatrix:
    """Row-stochastic conditional p(t|x_i) with its column-mean marginal."""

    cond: np.ndarray
    marginal: np.ndarray

    def __post_init__(self):
        cond = np.ascontiguousarray(np.asarray(self.cond, dtype=np.float64))
        marginal = np.ascontiguousarray(np.asarray(self.marginal, dtype=np.float64))
        if cond.ndim != 2 or cond.shape[0] < 1 or cond.shape[1] < 1:
            raise ValueError("cond must be a nonempty N x R matrix")
        if cond.min() < 0.0:
            raise ValueError("cond entries must be nonnegative")
        row_err = np.abs(cond.sum(axis=1) - 1.0).max()
        if row_err > 1e-10:
            raise ValueError("cond rows must sum to 1 within 1e-10 (max deviation %g)" % row_err)
        if marginal.shape != (cond.shape[1],):
            raise ValueError("marginal must have length R")
        marg_err = np.abs(marginal - cond.mean(axis=0)).max()
        if marg_err > 1e-10:
            raise ValueError("marginal must equal the column mean of cond within 1e-10")
        cond.setflags(write=False)
        marginal.setflags(write=False)
        object.__setattr__(self, "cond", cond)
        object.__setattr__(self, "marginal", marginal)

    @classmethod
    def from_cond(cls, cond):
        cond = np.asarray(cond, dtype=np.float64)
        return cls(cond=cond, marginal=cond.mean(axis=0))


@dataclass(frozen=True, eq=False)
class RDPoint:
    """One (lam, rate, distortion) sample of the empirical trade-off curve."""

    lam: float
    rate: float
    distortion: float
    lagrangian: float
    iterations: int
    converged: bool
    support_size: int
    trace: tuple = None

    def __post_init__(self):
        if abs(self.lagrangian - (self.distortion + self.lam * self.rate)) > 1e-12:
            raise ValueError("lagrangian must equal distortion + lam * rate within 1e-12")
        if self.rate < -1e-12:
            raise ValueError("rate must be nonnegative")
        if not -1e-12 <= self.distortion <= 1.0 + 1e-12:
            raise ValueError("distortion must lie in [0, 1]")


def _check_losses(losses):
    losses = np.ascontiguousarray(np.asarray(losses, dtype=np.float64))
    if losses.ndim != 2 or losses.shape[0] < 1 or losses.shape[1] < 1:
        raise ValueError("losses must be a nonempty N x R matrix")
    if losses.min() < 0.0 or losses.max() > 1.0:
        raise ValueError("losses must lie in [0, 1]")
    return losses


def gate_objective(gate, losses, lam):
    """(avg_loss, rate, lagrangian) of a gate on a loss matrix."""
    cond = np.asarray(getattr(gate, "cond", gate), dtype=np.float64)
    losses = _check_losses(losses)
    if cond.shape != losses.shape:
        raise ValueError("gate shape %r does not match losses shape %r"
                         % (cond.shape, losses.shape))
    lam = float(lam)
    avg_loss = float(np.mean((cond * losses).sum(axis=1)))
    rate = routing_mi(cond)
    return avg_loss, rate, avg_loss + lam * rate


def _point_mass_gate(n_items, num_experts, r):
    cond = np.zeros((n_items, num_experts))
    cond[:, r] = 1.0
    return GateMatrix.from_cond(cond)


def ba_solve(losses, lam, tol=1e-9, max_iter=10000, init=None, record_trace=False):
    """Minimize the rate-regularized routing objective for one lam.

    Parameters
    ----------
    losses : (N, R) array with entries in [0, 1].
    lam : positive trade-off multiplier.
    tol : stop when the Lagrangian decrease falls below this.
    max_iter : iteration cap.
    init : optional strictly positive initial marginal (default uniform).
    record_trace : attach the per-iteration Lagrangian sequence to the
        returned point (diagnostics; slightly larger return value).

    Returns
    -------
    (GateMatrix, RDPoint)
    """
    losses = _check_losses(losses)
    lam = float(lam)
    if not lam > 0.0:
        raise ValueError("lam must be positive, got %r" % lam)
    if int(max_iter) < 1:
        raise ValueError("max_iter must be >= 1")
    n_items, num_experts = losses.shape
    if init is None:
        pi = np.full(num_experts, 1.0 / num_experts)
    else:
        pi = np.ascontiguousarray(np.asarray(init, dtype=np.float64))
        if pi.shape != (num_experts,):
            raise ValueError("init must have length R")
        if pi.min() <= 0.0:
            raise ValueError("init must be strictly positive")
        if abs(pi.sum() - 1.0) > 1e-9:
            raise ValueError("init must sum to 1 within 1e-9")

    # Each iteration tracks the objective in its free-energy form
    #
    #     -lam * mean_i log Z_i,   Z_i = sum_t pi_t exp(-ell_{i,t} / lam),
    #
    # which equals the Lagrangian evaluated at (new rows, previous
    # marginal); both halves of the update decrease it, so it is
    # nonincreasing and needs one log per item instead of a full KL pass.
    # For lam >= 0.02 the tilt exp(-ell/lam) >= e^-50 cannot underflow and
    # is hoisted out of the loop; smaller lam runs in the log domain with
    # a per-row max shift.
    tilt = -losses / lam
    log_domain = lam < 0.02
    if not log_domain:
        tilted = np.exp(tilt)

    trace = []
    prev_free = None
    converged = False
    iterations = 0
    cond = None

    for iterations in range(1, int(max_iter) + 1):
        if log_domain:
            with np.errstate(divide="ignore"):
                logw = np.log(pi)[None, :] + tilt
            shift = logw.max(axis=1, keepdims=True)
            w = np.exp(logw - shift)
            denom = w.sum(axis=1, keepdims=True)
            assert np.all(denom > 0.0), "a gate row lost all mass after tilting"
            log_z = np.log(denom[:, 0]) + shift[:, 0]
        else:
            w = pi[None, :] * tilted
            denom = w.sum(axis=1, keepdims=True)
            assert np.all(denom > 0.0), "a gate row lost all mass after tilting"
            log_z = np.log(denom[:, 0])
        cond = w / denom
        pi = cond.mean(axis=0)

        free = float(-lam * log_z.mean())
        if record_trace:
            trace.append(free)
        if prev_free is not None:
            # The free energy carries rounding noise of order 1e-13 scaled
            # by lam, so the decrease check needs a lam-aware allowance.
            slack = 1e-10 * (1.0 + abs(prev_free)) + 1e-11 * lam
            assert free <= prev_free + slack, (
                "objective increased across an iteration: %r -> %r"
                % (prev_free, free))
            if prev_free - free < tol:
                converged = True
                break
        prev_free = free

    avg_loss = float(np.mean((cond * losses).sum(axis=1)))
    rate = float(rel_entr(cond, np.broadcast_to(pi, cond.shape)).sum() / n_items)
    lagrangian = avg_loss + lam * rate
    if record_trace:
        trace.append(lagrangian)

    # Point masses are exact fixed points of the update; take the best
    # single-expert gate when it beats the iterate.
    col_means = losses.mean(axis=0)
    best_r = int(np.argmin(col_means))
    best_single = float(col_means[best_r])
    if best_single < lagrangian:
        gate = _point_mass_gate(n_items, num_experts, best_r)
        avg_loss, rate, lagrangian = gate_objective(gate, losses, lam)
        converged = True
        if record_trace:
            trace.append(lagrangian)
    else:
        gate = GateMatrix(cond=cond, marginal=pi)

    point = RDPoint(
        lam=lam,
        rate=rate,
        distortion=avg_loss,
        lagrangian=lagrangian,
        iterations=iterations,
        converged=converged,
        support_size=int(np.count_nonzero(gate.marginal > 0.0)),
        trace=tuple(trace) if record_trace else None,
    )
    return gate, point


def default_lambda_grid(lam_min=1e-3, lam_max=1e1, points=25):
    """Log-spaced multiplier grid."""
    if not 0.0 < float(lam_min) <= float(lam_max):
        raise ValueError("need 0 < lam_min <= lam_max")
    if int(points) < 1:
        raise ValueError("points must be >= 1")
    return np.logspace(math.log10(float(lam_min)), math.log10(float(lam_max)), int(points))


def rd_sweep(losses, lambda_grid, tol=1e-9, max_iter=10000, threads=1):
    """Solve every lam independently and return RDPoints sorted by rate.

    Grid points do not interact (each solve starts from the uniform
    marginal), so the output is independent of grid order and of
    ``threads``.
    """
    losses = _check_losses(losses)
    grid = [float(lam) for lam in lambda_grid]
    if not grid:
        raise ValueError("lambda_grid must be nonempty")

    def solve_one(lam):
        return ba_solve(losses, lam, tol=tol, max_iter=max_iter)[1]

    if int(threads) > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            points = list(pool.map(solve_one, grid))
    else:
        points = [solve_one(lam) for lam in grid]

    order = np.argsort([p.rate for p in points], kind="stable")
    return [points[i] for i in order]


def rd_curve_csv(points):
    """Render sweep points as CSV text (already sorted by rate)."""
    lines = [RD_CURVE_HEADER]
    for p in points:
        lines.append(",".join([
            fmt_float(p.lam),
            fmt_float(p.rate),
            fmt_float(p.distortion),
            fmt_float(p.lagrangian),
            str(int(p.iterations)),
            "true" if p.converged else "false",
        ]))
    lines.append("")
    return "\n".join(lines)


def write_rd_curve_csv(points, path):
    atomic_write_text(path, rd_curve_csv(points))


__all__ = [
    "GateMatrix",
    "RDPoint",
    "RD_CURVE_HEADER",
    "ba_solve",
    "default_lambda_grid",
    "gate_objective",
    "rd_curve_csv",
    "rd_sweep",
    "write_rd_curve_csv",
]
