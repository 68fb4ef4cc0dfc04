"""Rotation and non-uniformity optimizers for the cutoff-rate objective.

Three routes: exhaustive search over the one-parameter rotation family,
the closed-form low-SNR optimum, geodesic descent over all of SO(n), and
steepest ascent on the non-uniformity parameters of a 2D constellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, NuqamParams, make_nuqam, normalize_energy
from .liegroup import (
    DescentTrace,
    RotationMatrix,
    SkewMatrix,
    expm_skew,
    geodesic_descent,
    skew_family,
)
from .metrics import ChannelSpec, difference_multiset, rate_from_pair_sum


@dataclass(frozen=True)
class TSearchResult:
    """Outcome of the exhaustive search over the rotation family parameter."""

    t_opt: float
    objective: float
    grid_step: float
    profile: list[tuple[float, float]] | None = None


@dataclass(frozen=True)
class AlphaDescentResult:
    """Outcome of steepest ascent on the non-uniformity parameters."""

    alpha: NuqamParams
    objective: float
    iterations: int
    converged: bool


def _power_of_two_exponent(n: int) -> int:
    k = n.bit_length() - 1
    if n < 2 or 2**k != n:
        raise ValueError(f"dimension {n} is not a power of two")
    return k


def low_snr_optimal_t(n: int) -> float:
    """Closed-form family parameter maximizing the radius-2 local rate: arccos(1/sqrt(n))."""
    _power_of_two_exponent(n)
    return math.acos(1.0 / math.sqrt(n))


def g_of_t(n: int, ch: ChannelSpec, t: float) -> float:
    """Per-column factor whose maximum over t locates the low-SNR optimum."""
    _power_of_two_exponent(n)
    c2, s2 = math.cos(t) ** 2, math.sin(t) ** 2
    return (1.0 + c2 / (2.0 * ch.N0)) * (1.0 + s2 / ((n - 1) * 2.0 * ch.N0)) ** (n - 1)


def grid_search_t(
    x: Constellation,
    ch: ChannelSpec,
    grid_step: float = 1e-4,
    keep_profile: bool = False,
) -> TSearchResult:
    """Maximize the cutoff rate of the rotated constellation over t in [0, pi/2].

    Evaluates R(Q(t) X) on the uniform grid; ties break toward smaller t.
    The pair-difference multiset is computed once and rotated per sample.
    """
    k = _power_of_two_exponent(x.n)
    if not 0 < grid_step <= math.pi / 4:
        raise ValueError("grid_step must be in (0, pi/4]")
    z, counts = difference_multiset(x.points)
    if len(z) == 0:
        raise ValueError("degenerate constellation: no distinct pairs")
    a = skew_family(k).A.entries
    za = z @ a.T
    cf = counts.astype(float)
    inv8n0 = 1.0 / (8.0 * ch.N0)
    q = x.q_bits

    ts = np.arange(0.0, math.pi / 2 + grid_step / 2, grid_step)
    ts = ts[ts <= math.pi / 2 + 1e-15]
    best_t, best_r = 0.0, -math.inf
    profile = [] if keep_profile else None
    for t in ts:
        u = math.cos(t) * z + math.sin(t) * za
        s = float(np.dot(cf, np.prod(1.0 / (1.0 + u**2 * inv8n0), axis=1)))
        r = rate_from_pair_sum(q, s)
        if r > best_r:
            best_t, best_r = float(t), r
        if profile is not None:
            profile.append((float(t), r))
    return TSearchResult(t_opt=best_t, objective=best_r, grid_step=grid_step, profile=profile)


def cutoff_rate_gradient(x: Constellation, ch: ChannelSpec, q: RotationMatrix) -> np.ndarray:
    """Analytic Euclidean gradient of R(Q X) with respect to the entries of Q."""
    if q.n != x.n:
        raise ValueError("rotation and constellation dimensions disagree")
    z, counts = difference_multiset(x.points)
    return _gradient_from_diffs(z, counts.astype(float), x.q_bits, ch.N0, q.entries)


def _pair_sum(z, cf, n0, qm):
    u = z @ qm.T
    w = 1.0 / (1.0 + u**2 / (8.0 * n0))
    return float(np.dot(cf, np.prod(w, axis=1)))


def _gradient_from_diffs(z, cf, q_bits, n0, qm):
    u = z @ qm.T
    w = 1.0 / (1.0 + u**2 / (8.0 * n0))
    t = cf * np.prod(w, axis=1)
    # d(term)/du_a = term * (-w_a * u_a / (4 N0)); du_a/dq_ab = z_b
    g = -(t[:, None] * w * u) / (4.0 * n0)
    grad_s = g.T @ z
    s = float(np.sum(t))
    scale = -(2.0**-q_bits) / ((1.0 + 2.0**-q_bits * s) * math.log(2.0))
    return scale * grad_s


def default_start_rotation(n: int, eps: float = 1e-4) -> RotationMatrix:
    """Small perturbation of the identity: exp(H), H constant +-eps off-diagonal."""
    h = eps * (np.tri(n, k=-1) - np.tri(n, k=-1).T)
    return expm_skew(SkewMatrix(h))


def optimize_rotation_full(
    x: Constellation,
    ch: ChannelSpec,
    q0: RotationMatrix | None = None,
    step: float = 0.1,
    max_iters: int = 5000,
    grad_tol: float = 1e-8,
) -> DescentTrace:
    """Geodesic descent on f(Q) = -R(Q X) over all of SO(n).

    Finds a local optimum; the reported objective values in the trace are
    those of f (negated rate).
    """
    if q0 is None:
        q0 = default_start_rotation(x.n)
    z, counts = difference_multiset(x.points)
    cf = counts.astype(float)
    q_bits, n0 = x.q_bits, ch.N0

    def f(q: RotationMatrix) -> float:
        return -rate_from_pair_sum(q_bits, _pair_sum(z, cf, n0, q.entries))

    def grad_f(q: RotationMatrix) -> np.ndarray:
        return -_gradient_from_diffs(z, cf, q_bits, n0, q.entries)

    return geodesic_descent(f, grad_f, q0, step=step, max_iters=max_iters, grad_tol=grad_tol)


def default_nuqam_init(q_bits: int) -> NuqamParams:
    """Uniform odd-integer levels (1, 3, 5, ...), i.e. the standard QAM axis."""
    return NuqamParams(tuple(float(2 * i + 1) for i in range(2 ** (q_bits // 2 - 1))))


def _nuqam_objective(alpha: np.ndarray, q_bits: int, ch: ChannelSpec) -> float:
    from .metrics import cutoff_rate

    x = make_nuqam(NuqamParams(tuple(alpha)))
    return cutoff_rate(normalize_energy(x, float(q_bits)), ch)


def _project_alpha(alpha: np.ndarray, q_bits: int) -> np.ndarray:
    a = np.sort(np.maximum(alpha, 1e-9))
    # break exact ties so levels stay strictly increasing
    for i in range(1, len(a)):
        if a[i] <= a[i - 1]:
            a[i] = a[i - 1] * (1 + 1e-9) + 1e-12
    # keep the constellation at unit-bit energy so the iterates stay bounded
    return a * math.sqrt(q_bits / (2.0 * np.mean(a**2)))


def optimize_nuqam(
    q_bits: int,
    ch: ChannelSpec,
    init: NuqamParams | None = None,
    max_iters: int = 10000,
    grad_tol: float = 1e-7,
    fd_step: float = 1e-6,
    restarts: int = 0,
    seed: int = 0,
) -> AlphaDescentResult:
    """Steepest ascent of the cutoff rate over the non-uniformity parameters.

    Gradients are central finite differences with relative step fd_step; each
    iterate is projected back to positive ascending levels and renormalized
    to constellation energy q_bits.  With restarts > 0, that many perturbed
    initial points are also tried and the best outcome returned.
    """
    if q_bits not in (4, 6, 8, 10):
        raise ValueError("q_bits must be one of 4, 6, 8, 10")
    if init is None:
        init = default_nuqam_init(q_bits)

    def run(a0: np.ndarray) -> AlphaDescentResult:
        a = _project_alpha(a0, q_bits)
        fval = _nuqam_objective(a, q_bits, ch)
        step = 1.0
        converged = False
        it = 0
        for it in range(1, max_iters + 1):
            grad = np.empty_like(a)
            for i in range(len(a)):
                h = fd_step * max(abs(a[i]), 1.0)
                ap, am = a.copy(), a.copy()
                ap[i] += h
                am[i] -= h
                grad[i] = (
                    _nuqam_objective(ap, q_bits, ch) - _nuqam_objective(am, q_bits, ch)
                ) / (2 * h)
            if np.linalg.norm(grad) < grad_tol:
                converged = True
                break
            while step >= 1e-14:
                a_new = _project_alpha(a + step * grad, q_bits)
                f_new = _nuqam_objective(a_new, q_bits, ch)
                if f_new > fval:
                    break
                step *= 0.5
            if step < 1e-14:
                converged = True  # no ascent direction left at fd resolution
                break
            a, fval = a_new, f_new
            step = min(step * 2.0, 1e3)
        return AlphaDescentResult(
            alpha=NuqamParams(tuple(a)),
            objective=fval,
            iterations=it,
            converged=converged,
        )

    best = run(np.array(init.alpha, dtype=float))
    if restarts > 0:
        rng = np.random.default_rng(seed)
        base = np.array(init.alpha, dtype=float)
        for _ in range(restarts):
            cand = run(base * rng.uniform(0.8, 1.25, size=base.shape))
            if cand.objective > best.objective:
                best = cand
    return best
