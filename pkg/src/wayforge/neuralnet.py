"""Three-layer feedforward network (input / hidden / output) with plain
stochastic-gradient-descent training and a finite-difference gradient
checker.

Also provides the demo velocity predictor: a small network trained on
behavior-layer commands as synthetic labels over a 10-value feature
encoding of (pose, goal, nearest obstacle). It demonstrates the network
mechanism; it is not the planner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .behaviors import BehaviorParams, arbitrate, snapshot_from_pose
from .dynamics import Pose
from .world import Scenario

HIDDEN_ACTIVATIONS = ("sigmoid", "relu")
OUTPUT_ACTIVATIONS = ("sigmoid", "linear")


class TrainingDiverged(RuntimeError):
    """Raised when the training loss becomes non-finite."""

    def __init__(self, epoch: int):
        super().__init__(f"training diverged (non-finite loss) at epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class MlpNetwork:
    input_dim: int
    hidden_dim: int
    output_dim: int
    w1: np.ndarray  # (input_dim, hidden_dim)
    b1: np.ndarray  # (hidden_dim,)
    w2: np.ndarray  # (hidden_dim, output_dim)
    b2: np.ndarray  # (output_dim,)
    hidden_activation: str = "sigmoid"
    output_activation: str = "linear"

    def __post_init__(self) -> None:
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(f"hidden_activation must be one of {HIDDEN_ACTIVATIONS}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"output_activation must be one of {OUTPUT_ACTIVATIONS}")
        if self.w1.shape != (self.input_dim, self.hidden_dim):
            raise ValueError("w1 shape mismatch")
        if self.b1.shape != (self.hidden_dim,):
            raise ValueError("b1 shape mismatch")
        if self.w2.shape != (self.hidden_dim, self.output_dim):
            raise ValueError("w2 shape mismatch")
        if self.b2.shape != (self.output_dim,):
            raise ValueError("b2 shape mismatch")
        for arr in (self.w1, self.b1, self.w2, self.b2):
            if not np.all(np.isfinite(arr)):
                raise ValueError("network parameters must be finite")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 100
    batch_size: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


def create_network(
    input_dim: int,
    hidden_dim: int,
    output_dim: int,
    hidden_activation: str = "sigmoid",
    output_activation: str = "linear",
    seed: int = 0,
) -> MlpNetwork:
    """Seeded init: weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)],
    biases zero."""
    rng = np.random.default_rng(seed)
    lim1 = 1.0 / math.sqrt(input_dim)
    lim2 = 1.0 / math.sqrt(hidden_dim)
    return MlpNetwork(
        input_dim=input_dim,
        hidden_dim=hidden_dim,
        output_dim=output_dim,
        w1=rng.uniform(-lim1, lim1, size=(input_dim, hidden_dim)),
        b1=np.zeros(hidden_dim),
        w2=rng.uniform(-lim2, lim2, size=(hidden_dim, output_dim)),
        b2=np.zeros(output_dim),
        hidden_activation=hidden_activation,
        output_activation=output_activation,
    )


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "sigmoid":
        with np.errstate(over="ignore"):  # exp overflow saturates to 0/1, which is fine
            return 1.0 / (1.0 + np.exp(-z))
    if name == "relu":
        return np.maximum(0.0, z)
    return z  # linear


def _forward_pass(net: MlpNetwork, x: np.ndarray):
    z1 = x @ net.w1 + net.b1
    h = _activate(net.hidden_activation, z1)
    z2 = h @ net.w2 + net.b2
    y = _activate(net.output_activation, z2)
    return z1, h, z2, y


def forward(net: MlpNetwork, x: Sequence[float]) -> np.ndarray:
    """Deterministic forward pass for a single input vector."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (net.input_dim,):
        raise ValueError(f"input length {arr.shape} != input_dim {net.input_dim}")
    return _forward_pass(net, arr)[3]


def mse_loss(pred: Sequence[float], target: Sequence[float]) -> float:
    """Mean of squared componentwise differences."""
    p = np.asarray(pred, dtype=float)
    t = np.asarray(target, dtype=float)
    if p.shape != t.shape:
        raise ValueError("pred and target lengths differ")
    return float(np.mean((p - t) ** 2))


def _gradients(net: MlpNetwork, x: np.ndarray, t: np.ndarray):
    """Backprop gradients of the mean-squared error over a batch.

    x: (batch, input_dim), t: (batch, output_dim). The loss is the mean over
    all batch elements and output components.
    """
    z1, h, _, y = _forward_pass(net, x)
    batch = x.shape[0]
    dy = 2.0 * (y - t) / (batch * net.output_dim)
    if net.output_activation == "sigmoid":
        dz2 = dy * y * (1.0 - y)
    else:
        dz2 = dy
    dw2 = h.T @ dz2
    db2 = dz2.sum(axis=0)
    dh = dz2 @ net.w2.T
    if net.hidden_activation == "sigmoid":
        dz1 = dh * h * (1.0 - h)
    else:
        dz1 = dh * (z1 > 0.0)
    dw1 = x.T @ dz1
    db1 = dz1.sum(axis=0)
    return dw1, db1, dw2, db2


def train(
    net: MlpNetwork,
    inputs: Sequence[Sequence[float]],
    targets: Sequence[Sequence[float]],
    config: TrainConfig,
) -> tuple[MlpNetwork, list[float]]:
    """Minibatch SGD on the mean-squared error.

    Returns a new network and the per-epoch mean loss history; the input
    network is not mutated. Raises TrainingDiverged (with the epoch index)
    if the loss becomes non-finite.
    """
    x = np.asarray(inputs, dtype=float)
    t = np.asarray(targets, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("inputs must be a non-empty list of vectors")
    if x.shape[1] != net.input_dim or t.shape != (x.shape[0], net.output_dim):
        raise ValueError("dataset dimensions do not match the network")
    w1, b1 = net.w1.copy(), net.b1.copy()
    w2, b2 = net.w2.copy(), net.b2.copy()
    work = replace(net, w1=w1, b1=b1, w2=w2, b2=b2)
    rng = np.random.default_rng(config.seed)
    history: list[float] = []
    n = x.shape[0]
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        with np.errstate(over="ignore", invalid="ignore"):  # divergence shows up as non-finite loss
            for lo in range(0, n, config.batch_size):
                idx = order[lo : lo + config.batch_size]
                xb, tb = x[idx], t[idx]
                _, _, _, yb = _forward_pass(work, xb)
                epoch_losses.append(float(np.mean((yb - tb) ** 2)))
                dw1, db1, dw2, db2 = _gradients(work, xb, tb)
                w1 -= config.learning_rate * dw1
                b1 -= config.learning_rate * db1
                w2 -= config.learning_rate * dw2
                b2 -= config.learning_rate * db2
            mean_loss = float(np.mean(epoch_losses))
        if not math.isfinite(mean_loss):
            raise TrainingDiverged(epoch)
        history.append(mean_loss)
    return work, history


def _flat_params(net: MlpNetwork) -> list[tuple[str, np.ndarray]]:
    return [("w1", net.w1), ("b1", net.b1), ("w2", net.w2), ("b2", net.b2)]


def gradient_check(net: MlpNetwork, x: Sequence[float], target: Sequence[float], eps: float = 1e-5) -> float:
    """Max relative error between backprop and central-difference gradients
    of mse_loss(forward(net, x), target) over every parameter."""
    if eps <= 0:
        raise ValueError("eps must be > 0")
    xv = np.asarray(x, dtype=float).reshape(1, -1)
    tv = np.asarray(target, dtype=float).reshape(1, -1)
    analytic = _gradients(net, xv, tv)
    worst = 0.0
    for (_, param), grad in zip(_flat_params(net), analytic):
        flat = param.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            loss_hi = mse_loss(forward(net, xv[0]), tv[0])
            flat[i] = original - eps
            loss_lo = mse_loss(forward(net, xv[0]), tv[0])
            flat[i] = original
            numeric = (loss_hi - loss_lo) / (2.0 * eps)
            err = abs(gflat[i] - numeric) / max(1.0, abs(numeric))
            worst = max(worst, err)
    return worst


def save_network(net: MlpNetwork, path: str) -> None:
    """Flat text format: header with dims/activations, then one matrix per
    block in row-major order (w1 rows, b1, w2 rows, b2). repr rendering makes
    the round trip bit-exact."""
    lines = [
        f"mlp {net.input_dim} {net.hidden_dim} {net.output_dim} "
        f"{net.hidden_activation} {net.output_activation}"
    ]

    def emit_rows(arr: np.ndarray) -> None:
        for row in np.atleast_2d(arr):
            lines.append(" ".join(repr(float(v)) for v in row))

    for _, param in _flat_params(net):
        emit_rows(param)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_network(path: str) -> MlpNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = lines[0].split()
    if len(header) != 6 or header[0] != "mlp":
        raise ValueError(f"{path}: bad network header")
    input_dim, hidden_dim, output_dim = (int(tok) for tok in header[1:4])
    hidden_act, output_act = header[4], header[5]
    expected = input_dim + 1 + hidden_dim + 1
    body = lines[1:]
    if len(body) != expected:
        raise ValueError(f"{path}: expected {expected} parameter rows, got {len(body)}")

    def rows(count: int, width: int, offset: int) -> np.ndarray:
        block = [[float(tok) for tok in body[offset + r].split()] for r in range(count)]
        arr = np.asarray(block)
        if arr.shape != (count, width):
            raise ValueError(f"{path}: parameter block shape mismatch")
        return arr

    w1 = rows(input_dim, hidden_dim, 0)
    b1 = rows(1, hidden_dim, input_dim)[0]
    w2 = rows(hidden_dim, output_dim, input_dim + 1)
    b2 = rows(1, output_dim, input_dim + 1 + hidden_dim)[0]
    return MlpNetwork(input_dim, hidden_dim, output_dim, w1, b1, w2, b2, hidden_act, output_act)


# --- demo velocity predictor -------------------------------------------------

FEATURE_DIM = 10
_OBSTACLE_DISTANCE_CAP = 100.0


def pose_features(pose: Pose, scenario: Scenario) -> np.ndarray:
    """10-value feature encoding of a pose in a scene, for the demo predictor."""
    snap = snapshot_from_pose(pose, scenario)
    gx, gy = scenario.goal
    return np.array(
        [
            pose.x,
            pose.y,
            math.cos(pose.theta),
            math.sin(pose.theta),
            gx - pose.x,
            gy - pose.y,
            snap.d_goal,
            snap.phi_goal,
            min(snap.d_obstacle, _OBSTACLE_DISTANCE_CAP),
            snap.phi_obstacle,
        ]
    )


def build_velocity_dataset(
    scenario: Scenario,
    params: BehaviorParams,
    n_samples: int,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Random poses in the scene paired with the behavior layer's (v, omega)
    commands as labels."""
    rng = np.random.default_rng(seed)
    b = scenario.bounds
    features = np.zeros((n_samples, FEATURE_DIM))
    labels = np.zeros((n_samples, 2))
    for i in range(n_samples):
        while True:  # rejection-sample poses that are not inside an obstacle
            pose = Pose(
                x=float(rng.uniform(b.xmin, b.xmax)),
                y=float(rng.uniform(b.ymin, b.ymax)),
                theta=float(rng.uniform(-math.pi, math.pi)),
            )
            snap = snapshot_from_pose(pose, scenario)
            if snap.d_obstacle > 0.0:
                break
        cmd = arbitrate(snap, params).cmd
        features[i] = pose_features(pose, scenario)
        labels[i] = (cmd.v, cmd.omega)
    return features, labels


def train_velocity_predictor(
    scenario: Scenario,
    params: BehaviorParams,
    config: TrainConfig,
    hidden_dim: int = 64,
    n_samples: int = 400,
    seed: int = 0,
) -> tuple[MlpNetwork, list[float]]:
    """Train the demo predictor (features -> v, omega) on behavior labels."""
    features, labels = build_velocity_dataset(scenario, params, n_samples, seed=seed)
    net = create_network(
        FEATURE_DIM,
        hidden_dim,
        2,
        hidden_activation="relu",
        output_activation="linear",
        seed=seed,
    )
    return train(net, features, labels, config)
