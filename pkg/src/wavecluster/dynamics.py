"""Wave dynamics on a graph, sampled at integer times.

Three interchangeable backends produce the same node-by-time sample
matrix (up to numerical error):

* ``discrete``    the explicit second-order update
                  u(t) = 2 u(t-1) - u(t-2) - c^2 L_sym u(t-1)
                  with u(-1) = u(0), stable for 0 < c < sqrt(2);
* ``schrodinger`` the node block u1 of the coupled first-order system
                  driven by the block Hamiltonian, u1(t) = cos(c t sqrt(L_sym)) u1(0),
                  with u2(0) = 0;
* ``closed_form`` the spectral solution sum_j (u0 . v_j)(p_j e^{i t zeta_j}
                  + q_j e^{-i t zeta_j}) v_j, the oracle for the discrete
                  update.

The sampling interval is 1; with c < sqrt(2) and eigenvalues at most 2
every angular frequency stays below pi, so integer-time samples do not
alias.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg

from .analog import MvmStrategy, direct_mvm
from .errors import NumericalError, ValidationError
from .graph import GraphOperators, check_wave_speed

logger = logging.getLogger(__name__)

BACKENDS = ("discrete", "schrodinger", "closed_form")


@dataclass(frozen=True)
class WaveTrajectory:
    """Per-node time series u_i(t) for t = 0 .. t_max - 1.

    samples has one row per node and one column per integer time; the
    first column equals the initial vector.  seed records how the initial
    vector was drawn (None when supplied by the caller).
    """

    samples: np.ndarray
    wave_speed_c: float
    backend: str
    initial: np.ndarray
    seed: int | None = None

    @property
    def n_nodes(self) -> int:
        return self.samples.shape[0]

    @property
    def t_max(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class SchrodingerState:
    """Node block u1 and edge block u2 of the coupled system at one time.

    u2 must vanish at time 0; the dynamics then keep u1 real and u2
    purely imaginary."""

    u1: np.ndarray
    u2: np.ndarray
    time: float

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.u1) ** 2) + np.sum(np.abs(self.u2) ** 2))


def random_u0(n: int, seed: int) -> np.ndarray:
    """Initial amplitudes drawn independently uniform on [0, 1).

    The generator is numpy's default_rng (PCG64) seeded with a single
    64-bit integer, so runs are reproducible across platforms.
    """
    return np.random.default_rng(seed).uniform(0.0, 1.0, size=n)


def _check_u0(ops: GraphOperators, u0: np.ndarray) -> np.ndarray:
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (ops.n_nodes,):
        raise ValidationError(
            f"u0 has shape {u0.shape}, expected ({ops.n_nodes},)"
        )
    if not np.all(np.isfinite(u0)):
        raise ValidationError("u0 must be finite")
    return u0


def _check_t_max(t_max: int) -> int:
    t_max = int(t_max)
    if t_max < 2:
        raise ValidationError(f"t_max must be at least 2, got {t_max}")
    return t_max


def simulate_discrete(
    ops: GraphOperators,
    u0: np.ndarray,
    t_max: int,
    mvm: MvmStrategy | None = None,
    seed: int | None = None,
) -> WaveTrajectory:
    """Run the explicit second-order wave update from u(-1) = u(0) = u0.

    The Laplacian product at each step goes through the supplied MVM
    strategy (direct dense product by default, or the analog crossbar
    emulator).  Samples are checked for non-finite values every 64 steps
    to fail fast on a misconfigured strategy.
    """
    c = check_wave_speed(ops.wave_speed_c)
    u0 = _check_u0(ops, u0)
    t_max = _check_t_max(t_max)
    if mvm is None:
        mvm = direct_mvm
    c2 = c * c
    samples = np.empty((ops.n_nodes, t_max))
    samples[:, 0] = u0
    u_prev = u0
    u_curr = u0
    # transient inf/nan between the periodic checks is expected from a
    # diverging run, so arithmetic warnings are silenced here
    with np.errstate(invalid="ignore", over="ignore"):
        for t in range(1, t_max):
            u_next = 2.0 * u_curr - u_prev - c2 * mvm(ops.l_sym, u_curr)
            samples[:, t] = u_next
            u_prev, u_curr = u_curr, u_next
            if t % 64 == 0 and not np.all(np.isfinite(u_next)):
                raise NumericalError(f"non-finite samples at step {t}")
    if not np.all(np.isfinite(samples)):
        raise NumericalError("non-finite samples in trajectory")
    return WaveTrajectory(
        samples=samples, wave_speed_c=c, backend="discrete", initial=u0, seed=seed
    )


def closed_form_wave(
    ops: GraphOperators,
    u0: np.ndarray,
    t_max: int,
    seed: int | None = None,
) -> WaveTrajectory:
    """Spectral oracle for the discrete update.

    Each eigenpair (lambda_j, v_j) of l_sym contributes
    (u0 . v_j)(p_j e^{i t zeta_j} + q_j e^{-i t zeta_j}) v_j with
    zeta_j = arccos(1 - c^2 lambda_j / 2) and p_j, q_j = (1 +- i tan(zeta_j/2))/2,
    the roots of rho^2 + (c^2 lambda_j - 2) rho + 1 = 0 on the unit circle.
    The lambda = 0 mode has zeta = 0 and p + q = 1, a constant term.
    """
    c = check_wave_speed(ops.wave_speed_c)
    u0 = _check_u0(ops, u0)
    t_max = _check_t_max(t_max)
    try:
        lam, vecs = scipy.linalg.eigh(ops.l_sym)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    # c < sqrt(2) and lambda <= 2 keep c^2 lambda / 2 strictly below 2,
    # so zeta < pi and tan(zeta / 2) stays finite.
    zeta = np.arccos(np.clip(1.0 - 0.5 * c * c * lam, -1.0, 1.0))
    p = 0.5 * (1.0 + 1j * np.tan(0.5 * zeta))
    q = np.conj(p)
    g = vecs.T @ u0
    t = np.arange(t_max)
    phase = np.exp(1j * np.outer(zeta, t))
    term = p[:, None] * phase + q[:, None] * np.conj(phase)
    complex_samples = vecs @ (g[:, None] * term)
    worst_imag = float(np.abs(complex_samples.imag).max())
    if worst_imag > 1e-9:
        raise NumericalError(
            f"closed-form samples have imaginary residue {worst_imag:.3e}"
        )
    return WaveTrajectory(
        samples=complex_samples.real,
        wave_speed_c=c,
        backend="closed_form",
        initial=u0,
        seed=seed,
    )


def simulate_schrodinger(
    ops: GraphOperators,
    u0: np.ndarray,
    t_max: int,
    method: str = "eig",
    seed: int | None = None,
) -> WaveTrajectory:
    """Node-block samples of the coupled first-order system.

    With u2(0) = 0 the node block follows u1(t) = cos(c t sqrt(L_sym)) u0.
    method="eig" evaluates that matrix function exactly through the
    eigendecomposition; method="ode" integrates the coupled system with a
    high-order adaptive scheme (local error below 1e-10 per unit time) to
    emulate integration error.  Samples are taken at integer times.
    """
    c = check_wave_speed(ops.wave_speed_c)
    u0 = _check_u0(ops, u0)
    t_max = _check_t_max(t_max)
    times = np.arange(t_max, dtype=float)
    if method == "eig":
        lam, vecs = scipy.linalg.eigh(ops.l_sym)
        omega = np.sqrt(np.clip(lam, 0.0, None))
        g = vecs.T @ u0
        samples = vecs @ (g[:, None] * np.cos(c * omega[:, None] * times[None, :]))
    elif method == "ode":
        b = ops.incidence_b
        n = ops.n_nodes
        m = b.shape[1]

        def rhs(_t: float, state: np.ndarray) -> np.ndarray:
            u1 = state[:n]
            y = state[n:]
            return np.concatenate((c * (b @ y), -c * (b.T @ u1)))

        state0 = np.concatenate((u0, np.zeros(m)))
        sol = scipy.integrate.solve_ivp(
            rhs,
            (0.0, float(t_max - 1)),
            state0,
            method="DOP853",
            t_eval=times,
            rtol=1e-11,
            atol=1e-13,
        )
        if not sol.success:
            raise NumericalError(f"integrator failed: {sol.message}")
        samples = sol.y[:n, :]
    else:
        raise ValidationError(f"unknown method {method!r}, use 'eig' or 'ode'")
    return WaveTrajectory(
        samples=samples,
        wave_speed_c=c,
        backend="schrodinger",
        initial=u0,
        seed=seed,
    )


def schrodinger_state(ops: GraphOperators, u0: np.ndarray, t: float) -> SchrodingerState:
    """Exact (u1, u2) pair at one (possibly non-integer) time.

    u1 stays real; u2 is purely imaginary,
    u2(t) = -i sum_j (u0 . v_j) sin(c omega_j t) / omega_j * (Bt v_j),
    with the omega = 0 term vanishing because Bt annihilates the constant
    mode.  The pair conserves |u1|^2 + |u2|^2.
    """
    c = check_wave_speed(ops.wave_speed_c)
    u0 = _check_u0(ops, u0)
    lam, vecs = scipy.linalg.eigh(ops.l_sym)
    omega = np.sqrt(np.clip(lam, 0.0, None))
    g = vecs.T @ u0
    u1 = vecs @ (g * np.cos(c * omega * t))
    # sin(c omega t)/omega -> c t as omega -> 0, but Bt v_j = 0 there.
    scale = np.where(omega > 1e-12, np.sin(c * omega * t) / np.where(omega > 1e-12, omega, 1.0), 0.0)
    u2 = -1j * (ops.incidence_b.T @ (vecs @ (g * scale)))
    return SchrodingerState(u1=u1, u2=u2, time=float(t))


@dataclass(frozen=True)
class StabilityReport:
    """Spectral radius of the companion matrix of the discrete update."""

    wave_speed_c: float
    max_abs_rho: float
    stable: bool
    rho: np.ndarray


def stability_check(ops: GraphOperators, c: float | None = None) -> StabilityReport:
    """Eigenvalues rho of the one-step companion matrix
    M = [[2I - c^2 L_sym, -I], [I, 0]].

    The update is declared stable iff max |rho| <= 1 + 1e-9.  An explicit
    c overrides the operator's wave speed so unstable speeds (c >= sqrt(2),
    or any c with c^2 lambda > 4 somewhere) can be probed directly.

    The eigenbasis of l_sym block-diagonalizes M into 2x2 companion
    blocks, one per Laplacian eigenvalue, so each rho pair is a root of
    rho^2 + (c^2 lambda - 2) rho + 1 = 0.  Computing the roots this way
    instead of running a general eigensolver on M matters: the lambda = 0
    block is a defective double root at rho = 1, which a dense
    nonsymmetric solver splits by ~sqrt(machine epsilon), two orders
    above the 1e-9 stability margin.
    """
    c_eff = float(ops.wave_speed_c if c is None else c)
    if c_eff <= 0.0:
        raise ValidationError(f"wave speed must be positive, got {c_eff}")
    # rho(lambda) has square-root branch points at lambda = 0 and 4/c^2,
    # so the 1e-15 rounding noise eigvalsh leaves on the exact 0 and 2
    # endpoints would blow up to 1e-8 in the roots; the true spectrum is
    # inside [0, 2] and clipping removes only the noise.
    lam = np.clip(scipy.linalg.eigvalsh(ops.l_sym), 0.0, 2.0)
    b = (c_eff * c_eff) * lam - 2.0
    disc = np.sqrt(b.astype(complex) ** 2 - 4.0)
    rho = np.concatenate((0.5 * (-b + disc), 0.5 * (-b - disc)))
    max_abs = float(np.abs(rho).max())
    return StabilityReport(
        wave_speed_c=c_eff,
        max_abs_rho=max_abs,
        stable=bool(max_abs <= 1.0 + 1e-9),
        rho=rho,
    )


def simulate(
    ops: GraphOperators,
    u0: np.ndarray,
    t_max: int,
    backend: str = "discrete",
    mvm: MvmStrategy | None = None,
    seed: int | None = None,
) -> WaveTrajectory:
    """Dispatch to one of the three backends by name."""
    if backend == "discrete":
        return simulate_discrete(ops, u0, t_max, mvm=mvm, seed=seed)
    if backend == "schrodinger":
        return simulate_schrodinger(ops, u0, t_max, seed=seed)
    if backend == "closed_form":
        return closed_form_wave(ops, u0, t_max, seed=seed)
    raise ValidationError(f"unknown backend {backend!r}, expected one of {BACKENDS}")
