"""Depth-2 network for the (d+1)-dimensional incompressible flow problem.

The network maps z = (x_1..x_d, t) to a velocity u = A1 @ sigma(W z) and
a pressure p = <a2, sigma(W z)>.  Only W trains; A1 and a2 stay frozen.
All space-time derivatives have closed forms built from sigma' and
sigma'' of the pre-activations, which this module evaluates directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .activations import ActivationSpec, eval_derivs


@dataclass
class PinnWeights:
    """W is p x (d+1) and trainable; A1 (d x p) and a2 (p,) are frozen.

    The last column of W multiplies time; column m < d multiplies x_m.
    """

    W: np.ndarray
    A1: np.ndarray
    a2: np.ndarray

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        self.A1 = np.asarray(self.A1, dtype=float)
        self.a2 = np.asarray(self.a2, dtype=float)
        p, dp1 = self.W.shape
        d = dp1 - 1
        if self.A1.shape != (d, p) or self.a2.shape != (p,):
            raise ValueError(
                f"inconsistent shapes: W {self.W.shape}, A1 {self.A1.shape}, a2 {self.a2.shape}"
            )
        for arr in (self.W, self.A1, self.a2):
            if not np.all(np.isfinite(arr)):
                raise ValueError("weights must be finite")

    @property
    def d(self) -> int:
        return self.W.shape[1] - 1

    @property
    def p(self) -> int:
        return self.W.shape[0]

    def copy(self) -> "PinnWeights":
        return PinnWeights(self.W.copy(), self.A1.copy(), self.a2.copy())


@dataclass
class FieldEval:
    """All derivatives of a velocity/pressure field at one space-time point."""

    u: np.ndarray        # (d,) velocity
    p_val: float
    du_dt: np.ndarray    # (d,)
    jac_u: np.ndarray    # (d, d), entry [k, m] = d u_k / d x_m
    grad_p: np.ndarray   # (d,)
    lap_u: np.ndarray    # (d,)
    div_u: float


def _check_point(weights: PinnWeights, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape != (weights.d + 1,):
        raise ValueError(f"point has shape {z.shape}, expected ({weights.d + 1},)")
    return z


def forward(weights: PinnWeights, spec: ActivationSpec, z):
    """Velocity and pressure at z = (x, t)."""
    z = _check_point(weights, z)
    s = eval_derivs(spec, weights.W @ z)[0]
    return weights.A1 @ s, float(weights.a2 @ s)


def field_eval(weights: PinnWeights, spec: ActivationSpec, z) -> FieldEval:
    """Closed-form field evaluation: values plus all first/second space-time
    derivatives needed by the momentum and divergence residuals."""
    z = _check_point(weights, z)
    W, A1, a2 = weights.W, weights.A1, weights.a2
    d = weights.d
    s0, s1, s2, _ = eval_derivs(spec, W @ z)
    w_t = W[:, d]
    Wx = W[:, :d]

    u = A1 @ s0
    p_val = float(a2 @ s0)
    du_dt = A1 @ (w_t * s1)
    jac_u = np.einsum("kq,qm,q->km", A1, Wx, s1)
    grad_p = Wx.T @ (a2 * s1)
    lap_u = A1 @ (np.sum(Wx * Wx, axis=1) * s2)
    div_u = float(np.trace(jac_u))
    return FieldEval(u=u, p_val=p_val, du_dt=du_dt, jac_u=jac_u,
                     grad_p=grad_p, lap_u=lap_u, div_u=div_u)


def init_weights(d: int, p: int, seed: int, w_scale: float | None = None) -> PinnWeights:
    """Gaussian initialization: A1, a2 standard normal; W scaled by w_scale
    (default 1/sqrt(d+1), which keeps pre-activations O(1) on the unit box)."""
    if d < 1 or p < 1:
        raise ValueError("d and p must be >= 1")
    if w_scale is None:
        w_scale = 1.0 / np.sqrt(d + 1)
    rng = np.random.default_rng(seed)
    A1 = rng.standard_normal((d, p))
    a2 = rng.standard_normal(p)
    W = w_scale * rng.standard_normal((p, d + 1))
    return PinnWeights(W=W, A1=A1, a2=a2)


def save_checkpoint(weights: PinnWeights, spec: ActivationSpec, path) -> None:
    """Write a JSON checkpoint.  Floats use Python's shortest round-trip
    repr, so save -> load is bit-exact."""
    doc = {
        "d": weights.d,
        "p": weights.p,
        "activation": {"family": spec.family.value, "k": spec.k},
        "W": weights.W.tolist(),
        "A1": weights.A1.tolist(),
        "a2": weights.a2.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_checkpoint(path) -> tuple[PinnWeights, ActivationSpec]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
        d, p = int(doc["d"]), int(doc["p"])
        spec = ActivationSpec.from_name(doc["activation"]["family"],
                                        int(doc["activation"]["k"]))
        weights = PinnWeights(W=np.array(doc["W"], dtype=float),
                              A1=np.array(doc["A1"], dtype=float),
                              a2=np.array(doc["a2"], dtype=float))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"malformed checkpoint {path}: {exc}") from exc
    if weights.W.shape != (p, d + 1):
        raise ValueError(f"checkpoint shape mismatch: W is {weights.W.shape}, header says p={p}, d={d}")
    return weights, spec
