"""Analog crosspoint matrix-vector multiply emulator.

A crossbar of conductances A driven by voltages y settles to output
currents A y through decoupled first-order dynamics

    dx_j/dt = alpha_j - beta_j x_j,
    alpha_j = gain * (A y)_j / (1 + sum_i A_ji),
    beta_j  = gain / (1 + sum_i A_ji),

where gain is the product of DC loop gain and 3 dB bandwidth.  The fixed
point is exactly (A y)_j, so the circuit computes the product; the
per-component convergence time to an epsilon-accurate state is available
in closed form.  Matrices with negative entries are handled by splitting
into two nonnegative crossbars and differencing the results.

Settling is evaluated with exact exponentials, not numerical integration;
the tests use an ODE integrator as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError

MvmStrategy = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AnalogConfig:
    """Circuit parameters: DC loop gain, 3 dB bandwidth, convergence
    threshold epsilon, and optional initial state (default all zeros)."""

    dc_loop_gain: float = 100.0
    bandwidth_3db: float = 100.0
    epsilon: float = 1e-8
    x0: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.dc_loop_gain <= 0.0:
            raise ValidationError(f"dc_loop_gain must be > 0, got {self.dc_loop_gain}")
        if self.bandwidth_3db <= 0.0:
            raise ValidationError(f"bandwidth_3db must be > 0, got {self.bandwidth_3db}")
        if self.epsilon <= 0.0:
            raise ValidationError(f"epsilon must be > 0, got {self.epsilon}")

    @property
    def gain(self) -> float:
        return self.dc_loop_gain * self.bandwidth_3db


@dataclass(frozen=True)
class SplitMatrix:
    """Nonnegative split a = a_plus - a_minus with disjoint supports."""

    a_plus: np.ndarray
    a_minus: np.ndarray


def split_nonnegative(a: np.ndarray) -> SplitMatrix:
    """Split a real matrix into its positive and negative parts."""
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix entries must be finite")
    return SplitMatrix(a_plus=np.maximum(a, 0.0), a_minus=np.maximum(-a, 0.0))


def _rates(a: np.ndarray, y: np.ndarray, cfg: AnalogConfig):
    a = np.asarray(a, dtype=float)
    y = np.asarray(y, dtype=float)
    if a.ndim != 2:
        raise ValidationError(f"expected a matrix, got ndim={a.ndim}")
    if np.any(a < 0.0):
        raise ValidationError("crossbar conductances must be nonnegative")
    if not np.all(np.isfinite(a)) or not np.all(np.isfinite(y)):
        raise ValidationError("inputs must be finite")
    row_sum = a.sum(axis=1)
    beta = cfg.gain / (1.0 + row_sum)
    fixed_point = a @ y
    alpha = beta * fixed_point
    x0 = np.zeros(a.shape[0]) if cfg.x0 is None else np.asarray(cfg.x0, dtype=float)
    if x0.shape != fixed_point.shape:
        raise ValidationError(
            f"x0 has shape {x0.shape}, expected {fixed_point.shape}"
        )
    return alpha, beta, fixed_point, x0


def convergence_time(
    a: np.ndarray, y: np.ndarray, cfg: AnalogConfig
) -> tuple[np.ndarray, float]:
    """Per-component settling times T_j and the circuit time T = max_j T_j.

    T_j = (1/beta_j) ln(|x0_j beta_j - alpha_j| / (beta_j eps)), clipped at
    zero for components already within eps of their fixed point.
    """
    alpha, beta, _fp, x0 = _rates(a, y, cfg)
    gap = np.abs(x0 * beta - alpha)
    with np.errstate(divide="ignore"):
        times = np.log(gap / (beta * cfg.epsilon)) / beta
    times = np.where(gap / beta > cfg.epsilon, np.maximum(times, 0.0), 0.0)
    return times, float(times.max())


def settle_mvm(
    a: np.ndarray, y: np.ndarray, cfg: AnalogConfig
) -> tuple[np.ndarray, float]:
    """Evolve the crossbar to the first time every component is within
    epsilon of its fixed point (A y); returns (state, settle_time)."""
    alpha, beta, fixed_point, x0 = _rates(a, y, cfg)
    _times, t_settle = convergence_time(a, y, cfg)
    x = fixed_point + (x0 - fixed_point) * np.exp(-beta * t_settle)
    return x, t_settle


def analog_mvm(a: np.ndarray, x: np.ndarray, cfg: AnalogConfig | None = None) -> np.ndarray:
    """Matrix-vector product through the emulated circuit.

    The matrix is split into nonnegative parts, each part settles on its
    own crossbar, and the outputs are differenced; the result is within
    2 * epsilon of the direct product per component.
    """
    if cfg is None:
        cfg = AnalogConfig()
    split = split_nonnegative(a)
    plus, _ = settle_mvm(split.a_plus, x, cfg)
    minus, _ = settle_mvm(split.a_minus, x, cfg)
    return plus - minus


def analog_mvm_strategy(cfg: AnalogConfig | None = None) -> MvmStrategy:
    """An MVM strategy closure suitable for the wave simulator."""
    fixed = cfg if cfg is not None else AnalogConfig()

    def mvm(a: np.ndarray, x: np.ndarray) -> np.ndarray:
        return analog_mvm(a, x, fixed)

    return mvm


def direct_mvm(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Reference MVM strategy: the plain dense product."""
    return a @ x
