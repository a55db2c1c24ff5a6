"""Time-delay dynamic mode decomposition of a scalar time series.

The chain is: Hankel embedding of one node's samples, reduced SVD of the
left block computed by a deflated power method on the Gram matrix, a small
dense eigendecomposition of the projected one-step operator, then mode
amplitudes from a least-squares fit to the first delay vector.  For wave
data the DMD eigenvalues sit on the unit circle and map back to Laplacian
eigenvalues through the dispersion relation of the chosen backend.

The power method and Hotelling deflation are written out explicitly (they
are the part a resource-constrained device would run); only the tiny dense
eigenproblem and the least-squares solve call into LAPACK.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, ValidationError

logger = logging.getLogger(__name__)

#: Backends whose dispersion relation we can invert.
_DISCRETE_LIKE = ("discrete", "closed_form")


@dataclass(frozen=True)
class HankelPair:
    """Delay-embedded snapshot matrices of one node's series.

    x[r][c] = u(r + c) and y[r][c] = u(r + c + 1); y is x advanced one
    step.  The clustering default is k = w = 2n so the pair spans the 4n
    samples the pipeline records.
    """

    x: np.ndarray
    y: np.ndarray
    series_origin: int
    k: int
    w: int


def build_hankel(series: np.ndarray, k: int, w: int, origin: int = 0) -> HankelPair:
    """Stack K delay rows of width W, plus the one-step shift."""
    series = np.asarray(series)
    if series.ndim != 1:
        raise ValidationError(f"series must be 1-D, got shape {series.shape}")
    k = int(k)
    w = int(w)
    if k < 1 or w < 1:
        raise ValidationError(f"window sizes must be positive, got k={k}, w={w}")
    if series.size < k + w:
        raise NumericalError(
            f"series of length {series.size} too short for k={k}, w={w} "
            f"(needs at least {k + w})"
        )
    idx = np.arange(k)[:, None] + np.arange(w)[None, :]
    return HankelPair(
        x=series[idx], y=series[idx + 1], series_origin=int(origin), k=k, w=w
    )


@dataclass(frozen=True)
class PowerResult:
    """Dominant eigenpair estimate: Rayleigh quotient, unit vector, the
    iteration count, and whether the stopping rule (rather than the
    iteration cap) ended the run."""

    gamma: float
    vector: np.ndarray
    iterations: int
    converged: bool


def power_method(
    s: np.ndarray,
    tol: float = 1e-13,
    max_iter: int = 10_000,
    seed: int = 0,
    orthogonal_to: np.ndarray | None = None,
) -> PowerResult:
    """Dominant eigenpair of a symmetric (Hermitian) PSD matrix.

    Iterates b <- S b / |S b| from a seeded random start and stops when
    successive Rayleigh quotients agree to a relative tol.  Two extra
    rules keep the loop robust: a norm collapse means the matrix (or its
    restriction) is zero and returns gamma = 0 immediately, and a stall
    at high accuracy (progress ratio above 0.9 once the relative step is
    below 1e-7) cuts iteration on near-degenerate pairs, where the
    Rayleigh quotient is already correct to the pair splitting even
    though the vector keeps rotating inside the pair's subspace.

    With orthogonal_to set, the iterate is re-projected onto the
    orthogonal complement of those (orthonormal) columns every step; the
    deflated driver uses this to keep rounding from re-exciting
    eigenpairs that were already extracted.
    """
    s = np.asarray(s)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {s.shape}")
    scale = float(np.abs(s).max()) if s.size else 0.0
    if not np.allclose(s, s.conj().T, rtol=0.0, atol=1e-10 * max(1.0, scale)):
        raise ValidationError("matrix must be symmetric (Hermitian) within 1e-10")
    n = s.shape[0]
    rng = np.random.default_rng(seed)
    b = rng.standard_normal(n)
    if np.iscomplexobj(s):
        b = b + 1j * rng.standard_normal(n)

    def project(vec: np.ndarray) -> np.ndarray:
        if orthogonal_to is not None and orthogonal_to.shape[1] > 0:
            vec = vec - orthogonal_to @ (orthogonal_to.conj().T @ vec)
        return vec

    b = project(b)
    norm = np.linalg.norm(b)
    if norm == 0.0:
        raise ValidationError("start vector vanished under projection")
    b = b / norm

    gamma_prev = np.inf
    diff_prev = np.inf
    stall = 0
    for it in range(1, max_iter + 1):
        sb = project(s @ b)
        gamma = float(np.real(b.conj() @ sb))
        diff = abs(gamma - gamma_prev)
        if diff <= tol * max(abs(gamma), 1e-300):
            return PowerResult(gamma=gamma, vector=b, iterations=it, converged=True)
        if diff <= 1e-7 * max(abs(gamma), 1e-300) and diff >= 0.9 * diff_prev:
            stall += 1
            if stall >= 3:
                return PowerResult(gamma=gamma, vector=b, iterations=it, converged=True)
        else:
            stall = 0
        norm = float(np.linalg.norm(sb))
        if norm <= 1e-300:
            # Zero matrix (or zero restriction): gamma 0, any unit vector.
            return PowerResult(gamma=0.0, vector=b, iterations=it, converged=True)
        b = sb / norm
        gamma_prev = gamma
        diff_prev = diff
    logger.debug("power method hit max_iter=%d (gamma=%.6e)", max_iter, gamma_prev)
    return PowerResult(gamma=gamma_prev, vector=b, iterations=max_iter, converged=False)


def hotelling_deflate(s: np.ndarray, gamma: float, b: np.ndarray) -> np.ndarray:
    """Remove one eigenpair: s - gamma * b b^H.

    Leaves every other eigenpair in place and sends gamma to (numerical)
    zero; deflating a zero eigenvalue returns the matrix unchanged.
    """
    b = np.asarray(b)
    norm = np.linalg.norm(b)
    if abs(norm - 1.0) > 1e-6:
        raise ValidationError(f"deflation vector must be unit norm, got {norm}")
    return s - gamma * np.outer(b, b.conj())


@dataclass(frozen=True)
class ReducedSvd:
    """Rank-r factorization X ~ u_red diag(sigma) v_red^H with sigma
    descending and every retained sigma above truncation_tol * sigma[0]."""

    u_red: np.ndarray
    sigma: np.ndarray
    v_red: np.ndarray
    rank: int
    truncation_tol: float


def reduced_svd(
    x: np.ndarray,
    truncation_tol: float = 1e-8,
    max_rank: int | None = None,
    power_tol: float = 1e-13,
    power_max_iter: int = 1000,
    seed: int = 0,
) -> ReducedSvd:
    """Reduced SVD by a deflated power method on the Gram matrix.

    Eigenvalues of X^H X are the squared singular values; each deflation
    exposes the next one.  Right vectors come from the power iterations,
    sigma_i = sqrt(gamma_i), and the left block is recovered as
    u = X v / sigma (the pseudoinverse expression, since v_red has
    orthonormal columns).  Extraction stops at truncation_tol * sigma[0]
    or at max_rank.
    """
    x = np.asarray(x)
    if x.ndim != 2:
        raise ValidationError(f"expected a matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("matrix entries must be finite")
    k, w = x.shape
    cap = min(k, w) if max_rank is None else min(int(max_rank), k, w)
    gram0 = x.conj().T @ x
    gram0 = 0.5 * (gram0 + gram0.conj().T)
    gram = gram0
    vectors: list[np.ndarray] = []
    sigmas: list[float] = []
    basis = np.zeros((w, cap), dtype=gram.dtype)
    exhausted = 0
    for i in range(cap):
        res = power_method(
            gram,
            tol=power_tol,
            max_iter=power_max_iter,
            seed=seed + i,
            orthogonal_to=basis[:, :i],
        )
        if not res.converged:
            exhausted += 1
        sigma_i = float(np.sqrt(max(res.gamma, 0.0)))
        if i == 0:
            if sigma_i <= 0.0:
                raise NumericalError("matrix has rank 0, nothing to factorize")
            sigma_0 = sigma_i
        if sigma_i <= truncation_tol * sigma_0:
            break
        vectors.append(res.vector)
        sigmas.append(sigma_i)
        basis[:, i] = res.vector
        gram = hotelling_deflate(gram, res.gamma, res.vector)
    if exhausted:
        logger.debug("reduced_svd: %d power runs hit the iteration cap", exhausted)
    v_red = np.column_stack(vectors)
    # Rayleigh-Ritz pass on the undeflated Gram matrix.  Power vectors of
    # near-equal singular values converge to the right plane but mix
    # within it (and deflation then compounds the mixing); the projected
    # eigenproblem is exact inside the collected span, so one small dense
    # solve separates them again.
    projected = v_red.conj().T @ gram0 @ v_red
    projected = 0.5 * (projected + projected.conj().T)
    theta, rotation = scipy.linalg.eigh(projected)
    order = np.argsort(-theta, kind="stable")
    theta = theta[order]
    v_red = v_red @ rotation[:, order]
    sigma = np.sqrt(np.clip(theta, 0.0, None))
    keep = sigma > truncation_tol * sigma[0]
    sigma = sigma[keep]
    v_red = v_red[:, keep]
    rank = int(sigma.size)
    u_red = (x @ v_red) / sigma[None, :]
    return ReducedSvd(
        u_red=u_red,
        sigma=sigma,
        v_red=v_red,
        rank=rank,
        truncation_tol=float(truncation_tol),
    )


@dataclass(frozen=True)
class DmdResult:
    """DMD of one node's delay embedding.

    mu are the eigenvalues of the projected propagator sorted by
    descending real part (ties by ascending imaginary part), modes the
    matching unnormalized columns, a_hat the amplitudes fitted to the
    first delay vector, and coefficients the per-mode products
    modes[0, j] * a_hat[j] that downstream clustering reads signs from.
    lambda_recovered holds per-mode Laplacian eigenvalue estimates when
    the wave speed and backend were supplied, else None.
    """

    mu: np.ndarray
    modes: np.ndarray
    a_hat: np.ndarray
    coefficients: np.ndarray
    lambda_recovered: np.ndarray | None
    phi_condition: float


def _lambda_from_mu(mu: np.ndarray, c: float, backend: str) -> np.ndarray:
    """Per-mode dispersion inversion, clipped to [0, 2]."""
    if backend in _DISCRETE_LIKE:
        lam = (2.0 - 2.0 * mu.real) / (c * c)
    elif backend == "schrodinger":
        lam = (np.angle(mu) / c) ** 2
    else:
        raise ValidationError(f"unknown backend {backend!r}")
    worst = float(np.max(np.maximum(lam - 2.0, -lam), initial=0.0))
    if worst > 1e-3:
        # routine for off-circle modes that the conjugate merge then drops;
        # the merge warns loudly if a strong mode is affected
        logger.debug(
            "recovered eigenvalue leaves [0, 2] by %.3e before clipping", worst
        )
    return np.clip(lam, 0.0, 2.0)


def recover_laplacian_eigenvalues(mu, c: float, backend: str) -> np.ndarray:
    """Laplacian eigenvalue estimates from unit-circle DMD eigenvalues.

    discrete/closed_form data obey mu + 1/mu = 2 - c^2 lambda, so
    lambda = (2 - 2 Re mu) / c^2; schrodinger data oscillate at c sqrt(lambda),
    so lambda = (arg mu / c)^2.  Conjugate eigenvalue pairs describe one
    frequency and merge to a single estimate; the result is ascending.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    c = float(c)
    if c <= 0.0:
        raise ValidationError(f"wave speed must be positive, got {c}")
    drift = float(np.abs(np.abs(mu) - 1.0).max())
    if drift > 1e-2:
        raise NumericalError(
            f"DMD eigenvalue leaves the unit circle by {drift:.3e} (limit 1e-2)"
        )
    lam = _lambda_from_mu(mu, c, backend)
    merged: list[float] = []
    used = np.zeros(mu.size, dtype=bool)
    for i in range(mu.size):
        if used[i]:
            continue
        used[i] = True
        if abs(mu[i].imag) <= 1e-9:
            merged.append(float(lam[i]))
            continue
        partner = None
        best = 1e-6
        for j in range(i + 1, mu.size):
            if used[j]:
                continue
            dist = abs(mu[j] - np.conj(mu[i]))
            if dist < best:
                best = dist
                partner = j
        if partner is None:
            logger.debug("eigenvalue %s has no conjugate partner", mu[i])
            merged.append(float(lam[i]))
        else:
            used[partner] = True
            merged.append(float(0.5 * (lam[i] + lam[partner])))
    return np.sort(np.array(merged))


def dmd(
    pair: HankelPair,
    truncation_tol: float = 1e-8,
    c: float | None = None,
    backend: str | None = None,
    power_tol: float = 1e-13,
    power_max_iter: int = 1000,
    seed: int = 0,
) -> DmdResult:
    """Full DMD of one Hankel pair.

    Reduced SVD of X, projection A~ = U^H Y V Sigma^-1, dense
    eigendecomposition of the small A~, modes (1/mu) Y V Sigma^-1 xi, and
    amplitudes from the least-squares solve of modes @ a_hat = x(0).
    Passing c and backend also maps each mu to a Laplacian eigenvalue
    estimate.
    """
    svd = reduced_svd(
        pair.x,
        truncation_tol=truncation_tol,
        power_tol=power_tol,
        power_max_iter=power_max_iter,
        seed=seed,
    )
    y_proj = (pair.y @ svd.v_red) / svd.sigma[None, :]
    a_tilde = svd.u_red.conj().T @ y_proj
    mu, xi = scipy.linalg.eig(a_tilde)
    keep = np.abs(mu) > 1e-12 * max(1.0, float(np.abs(mu).max()))
    if not np.any(keep):
        raise NumericalError("all DMD eigenvalues are numerically zero")
    mu = mu[keep]
    xi = xi[:, keep]
    modes = (y_proj @ xi) / mu[None, :]
    order = np.lexsort((mu.imag, -mu.real))
    mu = mu[order]
    modes = modes[:, order]
    x0 = pair.x[:, 0].astype(modes.dtype)
    a_hat, _res, phi_rank, phi_sv = np.linalg.lstsq(modes, x0, rcond=None)
    cond = float(phi_sv[0] / phi_sv[-1]) if phi_sv[-1] > 0.0 else float("inf")
    if phi_rank < modes.shape[1]:
        logger.warning(
            "mode matrix is rank deficient (%d of %d, condition %.3e)",
            phi_rank,
            modes.shape[1],
            cond,
        )
    coefficients = modes[0, :] * a_hat
    lam = None
    if c is not None and backend is not None:
        lam = _lambda_from_mu(mu, float(c), backend)
    return DmdResult(
        mu=mu,
        modes=modes,
        a_hat=a_hat,
        coefficients=coefficients,
        lambda_recovered=lam,
        phi_condition=cond,
    )
