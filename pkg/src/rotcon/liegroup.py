"""Skew-symmetric matrices, rotation matrices, and geodesic descent on SO(n).

Provides the recursive Hadamard construction, the one-parameter rotation
family Q(t) = cos(t)I + sin(t)A generated by a skew matrix with A^2 = -I,
matrix exponential/logarithm between so(n) and SO(n), the translated
gradient field on SO(n), and a geodesic gradient-descent optimizer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

ORTHO_TOL = 1e-10
MAX_HADAMARD_K = 12


@dataclass(frozen=True)
class SkewMatrix:
    """Element of so(n): a real n x n matrix with M = -M^T exactly as stored."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("skew matrix must be square")
        if not np.array_equal(m, -m.T):
            raise ValueError("matrix is not exactly skew-symmetric")
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class RotationMatrix:
    """Element of SO(n): QQ^T = I and det(Q) = 1 within 1e-10."""

    entries: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.entries, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("rotation matrix must be square")
        n = q.shape[0]
        ortho_err = np.max(np.abs(q @ q.T - np.eye(n)))
        det_err = abs(np.linalg.det(q) - 1.0)
        if ortho_err > ORTHO_TOL or det_err > ORTHO_TOL:
            raise ValueError(
                f"not a rotation matrix: |QQ^T - I|_max = {ortho_err:.3g}, "
                f"|det - 1| = {det_err:.3g}"
            )
        object.__setattr__(self, "entries", q)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class RotationFamily:
    """One-parameter subgroup Q(t) = cos(t)I + sin(t)A, requiring A^2 = -I."""

    A: SkewMatrix

    def __post_init__(self):
        a = self.A.entries
        err = np.max(np.abs(a @ a + np.eye(a.shape[0])))
        if err > ORTHO_TOL:
            raise ValueError(f"generator does not satisfy A^2 = -I: err = {err:.3g}")

    @property
    def n(self) -> int:
        return self.A.n


@dataclass
class DescentTrace:
    """Record of a geodesic descent run: (iteration, Q, f(Q), |X_f(Q)|_F) rows."""

    iterates: list[tuple[int, RotationMatrix, float, float]] = field(default_factory=list)
    converged: bool = False
    reason: str = ""  # "gradient-tolerance" | "max-iterations" | "step-underflow"

    @property
    def final_rotation(self) -> RotationMatrix:
        return self.iterates[-1][1]

    @property
    def final_objective(self) -> float:
        return self.iterates[-1][2]


def hadamard(k: int) -> np.ndarray:
    """Sylvester Hadamard matrix of order 2^k, built recursively in integers."""
    if not 0 <= k <= MAX_HADAMARD_K:
        raise ValueError(f"k must be in 0..{MAX_HADAMARD_K}, got {k}")
    h = np.array([[1]], dtype=np.int64)
    for _ in range(k):
        h = np.block([[h, h], [h, -h]])
    return h


def skew_family(k: int) -> RotationFamily:
    """Rotation family in dimension 2^k generated by the Hadamard-block skew matrix.

    The integer matrix B is built by B_1 = [0], B_{2m} = [[B, H], [-H, B]]
    with H the order-m Hadamard matrix, then scaled by (2^k - 1)^(-1/2) so
    that the generator squares to -I.
    """
    if not 1 <= k <= MAX_HADAMARD_K:
        raise ValueError(f"k must be in 1..{MAX_HADAMARD_K}, got {k}")
    b = skew_family_integer(k)
    a = b / np.sqrt(2**k - 1)
    a = 0.5 * (a - a.T)  # exact antisymmetry despite rounding
    return RotationFamily(SkewMatrix(a))


def skew_family_integer(k: int) -> np.ndarray:
    """Unscaled integer generator B_{2^k}; satisfies B^2 = -(2^k - 1) I exactly."""
    if not 1 <= k <= MAX_HADAMARD_K:
        raise ValueError(f"k must be in 1..{MAX_HADAMARD_K}, got {k}")
    b = np.array([[0]], dtype=np.int64)
    for j in range(k):
        h = hadamard(j)
        b = np.block([[b, h], [-h, b]])
    return b


def rotation_at(family: RotationFamily, t: float) -> RotationMatrix:
    """Evaluate the family at parameter t: cos(t)I + sin(t)A."""
    n = family.n
    return RotationMatrix(np.cos(t) * np.eye(n) + np.sin(t) * family.A.entries)


def expm_skew(a: SkewMatrix) -> RotationMatrix:
    """Matrix exponential so(n) -> SO(n)."""
    if not np.all(np.isfinite(a.entries)):
        raise ValueError("skew matrix has non-finite entries")
    q = scipy.linalg.expm(a.entries)
    return RotationMatrix(_project_rotation(q))


def logm_rotation(q: RotationMatrix) -> SkewMatrix:
    """Principal matrix logarithm SO(n) -> so(n).

    Fails when an eigenvalue of Q lies within 1e-8 of -1 (no principal branch).
    """
    eigs = np.linalg.eigvals(q.entries)
    if np.min(np.abs(eigs + 1.0)) < 1e-8:
        raise ValueError("eigenvalue too close to -1: principal logarithm undefined")
    m = np.real(scipy.linalg.logm(q.entries))
    return SkewMatrix(0.5 * (m - m.T))


def gradient_field(grad_f_at_q: np.ndarray, q: RotationMatrix) -> SkewMatrix:
    """Translated gradient of f restricted to SO(n): G Q^T - Q G^T.

    The result vanishes exactly at critical points of f on SO(n).
    """
    g = np.asarray(grad_f_at_q, dtype=float)
    if g.shape != q.entries.shape:
        raise ValueError("gradient and rotation dimensions disagree")
    m = g @ q.entries.T
    return SkewMatrix(m - m.T)


def _project_rotation(q: np.ndarray) -> np.ndarray:
    """Nearest rotation matrix by polar decomposition (via SVD)."""
    u, _, vt = np.linalg.svd(q)
    r = u @ vt
    if np.linalg.det(r) < 0:
        u[:, -1] = -u[:, -1]
        r = u @ vt
    return r


def geodesic_descent(
    f,
    grad_f,
    q0: RotationMatrix,
    step: float = 0.1,
    max_iters: int = 5000,
    grad_tol: float = 1e-8,
    reproject_every: int = 50,
) -> DescentTrace:
    """Minimize f over SO(n) by the geodesic update Q <- exp(-h X_f(Q)) Q.

    The Euclidean gradient callback grad_f(Q) returns an n x n matrix of
    partials; it is translated to the skew field X_f(Q) each iteration.  The
    step is halved whenever the move fails to decrease f, and restored after
    an accepted step.  Terminates on gradient tolerance, iteration budget,
    or step underflow below 1e-12.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    q = q0.entries.copy()
    fval = float(f(RotationMatrix(q)))
    if not np.isfinite(fval):
        raise ValueError("objective is not finite at the initial rotation")

    trace = DescentTrace()
    h = step
    for it in range(max_iters + 1):
        rq = RotationMatrix(q)
        xf = gradient_field(grad_f(rq), rq)
        gnorm = float(np.linalg.norm(xf.entries))
        trace.iterates.append((it, rq, fval, gnorm))
        if gnorm <= grad_tol:
            trace.converged = True
            trace.reason = "gradient-tolerance"
            return trace
        if it == max_iters:
            break
        # backtracking: halve the step until f decreases
        while True:
            q_new = scipy.linalg.expm(-h * xf.entries) @ q
            if np.max(np.abs(q_new @ q_new.T - np.eye(q.shape[0]))) > ORTHO_TOL:
                q_new = _project_rotation(q_new)
            f_new = float(f(RotationMatrix(q_new)))
            if not np.isfinite(f_new):
                raise ValueError("objective became non-finite during descent")
            if f_new < fval:
                break
            h *= 0.5
            if h < 1e-12:
                trace.reason = "step-underflow"
                return trace
        q, fval = q_new, f_new
        h = step
        if (it + 1) % reproject_every == 0:
            q = _project_rotation(q)
            fval = float(f(RotationMatrix(q)))
    trace.reason = "max-iterations"
    return trace


def save_rotation_csv(q: RotationMatrix, path) -> None:
    """Write a rotation matrix as row-major plain-text CSV at full precision."""
    np.savetxt(path, q.entries, delimiter=",", fmt="%.17g")


def load_rotation_csv(path) -> RotationMatrix:
    """Read a rotation matrix from CSV; validates orthogonality on load."""
    m = np.loadtxt(path, delimiter=",", ndmin=2)
    return RotationMatrix(m)
