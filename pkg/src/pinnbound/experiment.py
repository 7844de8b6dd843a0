"""Taylor-Green benchmark, collocation samplers, gap measurement and the
bound-vs-gap correlation sweep.

The decaying 2D vortex
    u(x, y, t) = -cos(pi x) sin(pi y) exp(-2 pi^2 nu t)
    v(x, y, t) =  sin(pi x) cos(pi y) exp(-2 pi^2 nu t)
    p(x, y, t) = -(1/4) (cos(2 pi x) + cos(2 pi y)) exp(-4 pi^2 nu t)
solves the incompressible momentum and divergence equations exactly
(density 1), so its residual vanishes identically and it doubles as a
zero-loss reference field in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .activations import ActivationSpec, SigmaConstants, constants
from .network import FieldEval, PinnWeights, field_eval, init_weights
from .residual import CollocationSet, LossConfig
from .training import TrainConfig, risk_breakdown, train

UNIT_BOX = ((0.0, 1.0), (0.0, 1.0), (0.0, 1.0))
FIGURE1_BOX = ((0.0, 2.0), (0.0, 2.0), (0.0, 1.0))


@dataclass(frozen=True)
class TaylorGreenParams:
    nu: float = 0.01
    rho: float = 1.0
    domain: tuple = UNIT_BOX

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("nu must be > 0")
        if self.rho != 1.0:
            raise ValueError("density is fixed at 1")


def taylor_green_field(z, params: TaylorGreenParams) -> FieldEval:
    """Closed-form field and all its derivatives at z = (x, y, t)."""
    z = np.asarray(z, dtype=float)
    if z.shape != (3,):
        raise ValueError("the vortex solution is 2-dimensional: z must be (x, y, t)")
    x, y, t = z
    nu, rho = params.nu, params.rho
    pi = math.pi
    E = math.exp(-2.0 * pi * pi * nu * t)
    E2 = E * E
    cx, sx = math.cos(pi * x), math.sin(pi * x)
    cy, sy = math.cos(pi * y), math.sin(pi * y)

    u = -cx * sy * E
    v = sx * cy * E
    p_val = -0.25 * rho * (math.cos(2 * pi * x) + math.cos(2 * pi * y)) * E2

    du_dt = np.array([-2.0 * pi * pi * nu * u, -2.0 * pi * pi * nu * v])
    jac = np.array([
        [pi * sx * sy * E, -pi * cx * cy * E],
        [pi * cx * cy * E, -pi * sx * sy * E],
    ])
    grad_p = np.array([
        0.5 * rho * pi * math.sin(2 * pi * x) * E2,
        0.5 * rho * pi * math.sin(2 * pi * y) * E2,
    ])
    lap = np.array([-2.0 * pi * pi * u, -2.0 * pi * pi * v])
    return FieldEval(u=np.array([u, v]), p_val=p_val, du_dt=du_dt, jac_u=jac,
                     grad_p=grad_p, lap_u=lap, div_u=float(np.trace(jac)))


def taylor_green_initial(params: TaylorGreenParams):
    """The t=0 velocity slice, as an initial-condition function x -> u."""
    def f0(x):
        return taylor_green_field(np.array([x[0], x[1], 0.0]), params).u
    return f0


def _check_box(box) -> np.ndarray:
    box = np.asarray(box, dtype=float)
    if np.any(box[:, 1] <= box[:, 0]):
        raise ValueError("degenerate box")
    return box


def sample_interior(n: int, box, seed: int) -> np.ndarray:
    """n i.i.d. uniform space-time points in the box (last axis is time)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    box = _check_box(box)
    rng = np.random.default_rng(seed)
    return rng.uniform(box[:, 0], box[:, 1], size=(n, len(box)))


def sample_initial(n: int, box, seed: int) -> np.ndarray:
    """n i.i.d. uniform spatial points (the box here is spatial only)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    box = _check_box(box)
    rng = np.random.default_rng(seed)
    return rng.uniform(box[:, 0], box[:, 1], size=(n, len(box)))


def moment_constants(interior_samples, initial_samples) -> tuple[float, float]:
    """Root-mean-square point norms: C_z over interior samples and C_z0
    over the (x, 0) embeddings of the initial samples."""
    Zi = np.atleast_2d(np.asarray(interior_samples, dtype=float))
    X0 = np.atleast_2d(np.asarray(initial_samples, dtype=float))
    if len(Zi) == 0 or len(X0) == 0:
        raise ValueError("empty sample")
    C_z = math.sqrt(float(np.mean(np.sum(Zi * Zi, axis=1))))
    C_z0 = math.sqrt(float(np.mean(np.sum(X0 * X0, axis=1))))
    return C_z, C_z0


def pearson(xs, ys) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) != len(ys) or len(xs) < 3:
        raise ValueError("need >= 3 paired values")
    if np.std(xs) == 0.0 or np.std(ys) == 0.0:
        raise ValueError("correlation undefined for constant input")
    return float(np.corrcoef(xs, ys)[0, 1])


@dataclass
class GapReport:
    N_r: int
    N_0: int
    train_risk: float
    population_estimate: float
    population_points: int
    bound: bounds.BoundReport
    seed: int

    @property
    def gap(self) -> float:
        return abs(self.train_risk - self.population_estimate)

    def to_dict(self) -> dict:
        return {"N_r": self.N_r, "N_0": self.N_0, "train_risk": self.train_risk,
                "population_estimate": self.population_estimate,
                "population_points": self.population_points, "gap": self.gap,
                "bound": self.bound.to_dict(), "seed": self.seed}


def measure_gap(weights: PinnWeights, spec: ActivationSpec, loss_cfg: LossConfig,
                train_colloc: CollocationSet, f0, population_points: int, seed: int,
                box=UNIT_BOX, sigma_constants: SigmaConstants | None = None) -> GapReport:
    """Empirical risk on the training set vs a fresh large uniform sample,
    plus the bound evaluated at the trained weights."""
    N_r, N_0 = train_colloc.n_interior, train_colloc.n_initial
    if population_points < 10 * N_r:
        raise ValueError("population_points must be >= 10 * N_r")
    box = np.asarray(box, dtype=float)
    pop_int = sample_interior(population_points, box, seed)
    pop_init = sample_initial(population_points, box[:-1], seed + 1)
    pop_set = CollocationSet(interior=pop_int, initial=pop_init)

    train_risk = risk_breakdown(weights, spec, loss_cfg, train_colloc, f0).total
    pop_risk = risk_breakdown(weights, spec, loss_cfg, pop_set, f0).total

    sc = sigma_constants if sigma_constants is not None else constants(spec)
    C_z, C_z0 = moment_constants(pop_int, pop_init)
    report = bounds.generalization_bound(bounds.weight_stats(weights), sc, loss_cfg,
                                         N_r, N_0, C_z, C_z0)
    return GapReport(N_r=N_r, N_0=N_0, train_risk=train_risk,
                     population_estimate=pop_risk,
                     population_points=population_points, bound=report, seed=seed)


@dataclass
class SweepConfig:
    n_r_values: tuple = (27, 64, 125, 216)
    n_0: int = 500
    width: int = 64
    activation: ActivationSpec = ActivationSpec.from_name("tanh", 3)
    loss: LossConfig = field(default_factory=LossConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    box: tuple = UNIT_BOX
    seed: int = 0
    population_factor: int = 10
    sigma_constants: SigmaConstants | None = None  # per-run override

    def __post_init__(self):
        if len(self.n_r_values) < 3:
            raise ValueError("need at least 3 N_r values for a correlation")


@dataclass
class CorrelationReport:
    rows: list
    pearson_r: float | None
    failed_rows: list

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows],
                "pearson_r": self.pearson_r,
                "failed_rows": self.failed_rows}


def sweep_row(cfg: SweepConfig, idx: int) -> GapReport:
    """Train and evaluate one sweep row.  Seeds derive from (cfg.seed, idx),
    so rows are independent and individually reproducible.  Raises
    RuntimeError if the row's training diverges."""
    n_r = int(cfg.n_r_values[idx])
    params = TaylorGreenParams(nu=cfg.loss.nu, domain=cfg.box)
    f0 = taylor_green_initial(params)
    box = np.asarray(cfg.box, dtype=float)
    row_seed = int(np.random.default_rng((cfg.seed, idx)).integers(2**31))
    colloc = CollocationSet(
        interior=sample_interior(n_r, box, row_seed),
        initial=sample_initial(cfg.n_0, box[:-1], row_seed + 1),
    )
    weights0 = init_weights(d=2, p=cfg.width, seed=row_seed + 2)
    weights, _ = train(weights0, cfg.activation, cfg.loss, colloc, f0, cfg.train)
    return measure_gap(weights, cfg.activation, cfg.loss, colloc, f0,
                       population_points=cfg.population_factor * max(n_r, cfg.n_0),
                       seed=row_seed + 3, box=box,
                       sigma_constants=cfg.sigma_constants)


def correlate(bound_totals, gaps) -> float | None:
    """Pearson r, or None when it is undefined (constant column or too
    few rows)."""
    try:
        return pearson(bound_totals, gaps)
    except ValueError:
        return None


def sweep_experiment(cfg: SweepConfig) -> CorrelationReport:
    """Train one net per N_r, measure its gap, evaluate its bound, and
    correlate bound against gap across the rows.

    Rows whose training diverges are recorded in failed_rows and excluded.
    """
    rows: list[GapReport] = []
    failed: list[dict] = []
    for idx, n_r in enumerate(cfg.n_r_values):
        try:
            rows.append(sweep_row(cfg, idx))
        except RuntimeError as exc:
            failed.append({"N_r": int(n_r), "index": idx, "error": str(exc)})
    r = correlate([row.bound.total for row in rows], [row.gap for row in rows])
    return CorrelationReport(rows=rows, pearson_r=r, failed_rows=failed)
