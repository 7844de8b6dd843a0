"""Huber loss, per-point residual losses and the empirical risk.

The risk has three parts: a momentum term (Huber of each component of
the momentum residual, averaged over interior collocation points), a
divergence penalty weighted by lambda0 at the same points, and an
initial-condition term weighted by lambda1 averaged over t=0 points.

Everything here takes a field evaluator -- any callable z -> FieldEval --
so the same code scores trained networks, analytic solutions and test
doubles.  Point sums use math.fsum, which is exact and therefore
invariant under permutation of the collocation points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .network import FieldEval


@dataclass(frozen=True)
class LossConfig:
    delta: float = 1.0      # Huber delta; also the loss Lipschitz constant
    lambda0: float = 1.0    # divergence penalty
    lambda1: float = 0.3    # initial-condition penalty
    nu: float = 0.01        # kinematic viscosity (density fixed at 1)

    def __post_init__(self):
        if self.delta <= 0 or self.nu <= 0:
            raise ValueError("delta and nu must be > 0")
        if self.lambda0 < 0 or self.lambda1 < 0:
            raise ValueError("lambda0 and lambda1 must be >= 0")


@dataclass
class CollocationSet:
    interior: np.ndarray   # (N_r, d+1) space-time points
    initial: np.ndarray    # (N_0, d) spatial points

    def __post_init__(self):
        self.interior = np.atleast_2d(np.asarray(self.interior, dtype=float))
        self.initial = np.atleast_2d(np.asarray(self.initial, dtype=float))
        if len(self.interior) < 1 or len(self.initial) < 1:
            raise ValueError("collocation sets must be nonempty")
        if not (np.all(np.isfinite(self.interior)) and np.all(np.isfinite(self.initial))):
            raise ValueError("collocation points must be finite")
        if self.interior.shape[1] != self.initial.shape[1] + 1:
            raise ValueError("interior points must have one more coordinate (time) than initial points")

    @property
    def n_interior(self) -> int:
        return len(self.interior)

    @property
    def n_initial(self) -> int:
        return len(self.initial)


@dataclass
class RiskBreakdown:
    momentum_term: float
    divergence_term: float
    initial_term: float

    @property
    def total(self) -> float:
        return self.momentum_term + self.divergence_term + self.initial_term


def huber(delta: float, x):
    """Quadratic for |x| <= delta, linear beyond; delta-Lipschitz."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    x = np.abs(x)
    return np.where(x <= delta, 0.5 * x * x, delta * (x - 0.5 * delta))


def huber_grad(delta: float, x):
    # Both branches agree in value and slope at |x| = delta.
    return np.clip(x, -delta, delta)


def momentum_residual(fe: FieldEval, nu: float) -> np.ndarray:
    """Component k: du_k/dt + (u . grad) u_k + dp/dx_k - nu * lap u_k."""
    return fe.du_dt + fe.jac_u @ fe.u + fe.grad_p - nu * fe.lap_u


def loss_res(fe: FieldEval, cfg: LossConfig) -> float:
    r = momentum_residual(fe, cfg.nu)
    return float(np.sum(huber(cfg.delta, r)) + cfg.lambda0 * huber(cfg.delta, fe.div_u))


def loss_init(u_at_t0: np.ndarray, f0_val: np.ndarray, cfg: LossConfig) -> float:
    u_at_t0 = np.asarray(u_at_t0, dtype=float)
    f0_val = np.asarray(f0_val, dtype=float)
    if u_at_t0.shape != f0_val.shape:
        raise ValueError("velocity and initial-condition vectors must have equal length")
    return float(cfg.lambda1 * np.sum(huber(cfg.delta, u_at_t0 - f0_val)))


def empirical_risk(field, cfg: LossConfig, colloc: CollocationSet, f0) -> RiskBreakdown:
    """Average the per-point losses over the collocation sets.

    `field` maps a space-time point to a FieldEval; `f0` maps a spatial
    point to the target initial velocity.
    """
    momentum = []
    divergence = []
    for z in colloc.interior:
        fe = field(z)
        r = momentum_residual(fe, cfg.nu)
        momentum.append(float(np.sum(huber(cfg.delta, r))))
        divergence.append(float(cfg.lambda0 * huber(cfg.delta, fe.div_u)))
    initial = []
    d = colloc.initial.shape[1]
    for x in colloc.initial:
        z0 = np.concatenate([x, [0.0]])
        fe = field(z0)
        initial.append(loss_init(fe.u[:d], np.asarray(f0(x), dtype=float), cfg))
    return RiskBreakdown(
        momentum_term=math.fsum(momentum) / colloc.n_interior,
        divergence_term=math.fsum(divergence) / colloc.n_interior,
        initial_term=math.fsum(initial) / colloc.n_initial,
    )
