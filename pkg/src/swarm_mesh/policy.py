"""Decentralizable message-passing policy.

Each agent encodes its local observation into a latent message, exchanges
messages with its neighbors, transforms each neighbor latent against its own
(difference-based message function), sums the results including a self-loop,
and decodes the sum into a planar desired velocity.  The same computation can
be run centrally over a whole team (the synchronous oracle) or locally per
agent from received messages; both paths share a canonical summation order so
they agree bit-for-bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, WeightFormatError

WEIGHT_FORMAT_VERSION = 1
ACTIVATIONS = ("relu", "tanh", "identity")

OBSERVATION_DIM = 6
ACTION_DIM = 2


def _apply_activation(tag: str, x: np.ndarray) -> np.ndarray:
    if tag == "relu":
        return np.maximum(x, 0.0)
    if tag == "tanh":
        return np.tanh(x)
    if tag == "identity":
        return x
    raise ShapeError(f"unknown activation tag: {tag!r}")


@dataclass(frozen=True)
class MlpLayer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64)
        if w.ndim != 2:
            raise ShapeError(f"layer weights must be 2-D, got shape {w.shape}")
        if b.shape != (w.shape[0],):
            raise ShapeError(
                f"bias shape {b.shape} does not match {w.shape[0]} outputs"
            )
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise ShapeError("layer parameters must be finite")
        if self.activation not in ACTIVATIONS:
            raise ShapeError(f"unknown activation tag: {self.activation!r}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)
        w.setflags(write=False)
        b.setflags(write=False)

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class MlpParams:
    layers: tuple[MlpLayer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ShapeError("an MLP needs at least one layer")
        for prev, cur in zip(layers, layers[1:]):
            if cur.in_dim != prev.out_dim:
                raise ShapeError(
                    f"layer shapes do not chain: {prev.out_dim} -> {cur.in_dim}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim


@dataclass(frozen=True)
class PolicyWeights:
    enc: MlpParams
    gnn: MlpParams
    act: MlpParams
    latent_dim: int

    def __post_init__(self):
        if self.latent_dim <= 0:
            raise ShapeError("latent_dim must be positive")
        if self.enc.out_dim != self.latent_dim:
            raise ShapeError(
                f"encoder outputs {self.enc.out_dim}, expected latent_dim={self.latent_dim}"
            )
        if self.gnn.in_dim != self.latent_dim:
            raise ShapeError(
                f"message net consumes {self.gnn.in_dim}, expected latent_dim={self.latent_dim}"
            )
        if self.act.out_dim != ACTION_DIM:
            raise ShapeError(
                f"action net outputs {self.act.out_dim}, expected {ACTION_DIM}"
            )


@dataclass(frozen=True)
class Message:
    sender: int
    sent_at: float
    payload: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.payload, dtype=np.float64)
        object.__setattr__(self, "payload", p)
        p.setflags(write=False)


def mlp_forward(params: MlpParams, x) -> np.ndarray:
    """Evaluate an MLP: affine layer then activation, in order."""
    h = np.asarray(x, dtype=np.float64)
    if h.shape != (params.in_dim,):
        raise ShapeError(
            f"input shape {h.shape} does not match first-layer input {params.in_dim}"
        )
    for layer in params.layers:
        h = _apply_activation(layer.activation, layer.weights @ h + layer.bias)
    return h


def build_observation(p, v, p_g) -> np.ndarray:
    """Concatenate [position, relative goal, predicted position]."""
    p = np.asarray(p, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    p_g = np.asarray(p_g, dtype=np.float64)
    for name, vec in (("p", p), ("v", v), ("p_g", p_g)):
        if vec.shape != (2,) or not np.isfinite(vec).all():
            raise ShapeError(f"{name} must be a finite 2-vector")
    return np.concatenate([p, p_g - p, p + v])


def encode(w: PolicyWeights, z) -> np.ndarray:
    """Latent message payload for an observation."""
    return mlp_forward(w.enc, z)


def message_transform(w: PolicyWeights, h_i, h_j, edge_feature=None) -> np.ndarray:
    """Transform one incoming latent against the receiver's own latent.

    The edge feature slot is accepted for signature generality but ignored by
    this difference-based model.
    """
    h_i = np.asarray(h_i, dtype=np.float64)
    h_j = np.asarray(h_j, dtype=np.float64)
    if h_i.shape != (w.latent_dim,) or h_j.shape != (w.latent_dim,):
        raise ShapeError(
            f"latents must have shape ({w.latent_dim},), got {h_i.shape} and {h_j.shape}"
        )
    return mlp_forward(w.gnn, h_i - h_j)


def aggregate(transformed, latent_dim: int | None = None) -> np.ndarray:
    """Elementwise sum in the given (canonical) order; empty -> zeros."""
    items = [np.asarray(t, dtype=np.float64) for t in transformed]
    if not items:
        if latent_dim is None:
            raise ShapeError("cannot aggregate an empty list without latent_dim")
        return np.zeros(latent_dim)
    dim = items[0].shape
    acc = np.zeros(dim)
    for item in items:
        if item.shape != dim:
            raise ShapeError(f"mixed latent shapes: {dim} vs {item.shape}")
        acc = acc + item
    return acc


def evaluate_local(w: PolicyWeights, z_own, neighbor_msgs) -> tuple[np.ndarray, np.ndarray]:
    """One agent's forward pass from its own observation and received messages.

    Returns (action, outgoing message payload).  The self-loop is applied
    first, then neighbors in ascending sender id; `neighbor_msgs` must not
    contain the agent's own message.
    """
    h_own = encode(w, z_own)
    ordered = sorted(neighbor_msgs, key=lambda m: m.sender)
    transformed = [message_transform(w, h_own, h_own)]
    for msg in ordered:
        transformed.append(message_transform(w, h_own, msg.payload))
    pooled = aggregate(transformed, w.latent_dim)
    action = mlp_forward(w.act, pooled)
    return action, h_own


def evaluate_centralized(w: PolicyWeights, all_obs, graph) -> list[np.ndarray]:
    """Synchronous whole-team evaluation; the oracle for the local path.

    `graph` is a NeighborhoodGraph (world module); agent i's neighborhood is
    every j with a directed edge j -> i.  Payloads are this tick's encodings.
    """
    ids = list(graph.nodes)
    if len(ids) != len(all_obs):
        raise ShapeError(
            f"graph has {len(ids)} nodes but {len(all_obs)} observations given"
        )
    latents = {i: encode(w, z) for i, z in zip(ids, all_obs)}
    actions = []
    for i in ids:
        h_i = latents[i]
        neighbors = sorted(graph.in_neighbors(i))
        transformed = [message_transform(w, h_i, h_i)]
        for j in neighbors:
            transformed.append(message_transform(w, h_i, latents[j]))
        pooled = aggregate(transformed, w.latent_dim)
        actions.append(mlp_forward(w.act, pooled))
    return actions


# ---------------------------------------------------------------------------
# weight I/O


def _mlp_to_json(params: MlpParams) -> list[dict]:
    return [
        {
            "rows": layer.out_dim,
            "cols": layer.in_dim,
            "weights": layer.weights.reshape(-1).tolist(),
            "bias": layer.bias.tolist(),
            "activation": layer.activation,
        }
        for layer in params.layers
    ]


def _mlp_from_json(obj, name: str) -> MlpParams:
    try:
        layers = []
        for entry in obj:
            rows, cols = int(entry["rows"]), int(entry["cols"])
            w = np.asarray(entry["weights"], dtype=np.float64)
            if w.size != rows * cols:
                raise WeightFormatError(
                    f"{name}: expected {rows * cols} weights, got {w.size}"
                )
            layers.append(
                MlpLayer(
                    weights=w.reshape(rows, cols),
                    bias=np.asarray(entry["bias"], dtype=np.float64),
                    activation=str(entry["activation"]),
                )
            )
        return MlpParams(tuple(layers))
    except (KeyError, TypeError, ValueError) as exc:
        raise WeightFormatError(f"{name}: malformed layer list: {exc}") from exc


def save_weights(w: PolicyWeights, path) -> None:
    doc = {
        "version": WEIGHT_FORMAT_VERSION,
        "latent_dim": w.latent_dim,
        "enc": _mlp_to_json(w.enc),
        "gnn": _mlp_to_json(w.gnn),
        "act": _mlp_to_json(w.act),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_weights(path) -> PolicyWeights:
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WeightFormatError(f"not valid JSON: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(doc, dict):
        raise WeightFormatError("top level must be an object")
    if doc.get("version") != WEIGHT_FORMAT_VERSION:
        raise WeightFormatError(
            f"unsupported format version {doc.get('version')!r}"
        )
    try:
        latent_dim = int(doc["latent_dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise WeightFormatError("missing or bad latent_dim") from exc
    try:
        return PolicyWeights(
            enc=_mlp_from_json(doc.get("enc"), "enc"),
            gnn=_mlp_from_json(doc.get("gnn"), "gnn"),
            act=_mlp_from_json(doc.get("act"), "act"),
            latent_dim=latent_dim,
        )
    except ShapeError as exc:
        raise WeightFormatError(str(exc)) from exc


def random_weights(
    seed: int,
    latent_dim: int = 16,
    hidden: tuple[int, ...] = (64, 64),
    obs_dim: int = OBSERVATION_DIM,
    scale: float | None = None,
) -> PolicyWeights:
    """Deterministic randomly initialized weights (training is out of scope)."""
    rng = np.random.default_rng(seed)

    def make(in_dim, out_dim):
        layers = []
        dims = [in_dim, *hidden, out_dim]
        for k in range(len(dims) - 1):
            fan_in, fan_out = dims[k], dims[k + 1]
            s = scale if scale is not None else math.sqrt(2.0 / (fan_in + fan_out))
            layers.append(
                MlpLayer(
                    weights=rng.normal(0.0, s, size=(fan_out, fan_in)),
                    bias=np.zeros(fan_out),
                    activation="relu" if k < len(dims) - 2 else "identity",
                )
            )
        return MlpParams(tuple(layers))

    return PolicyWeights(
        enc=make(obs_dim, latent_dim),
        gnn=make(latent_dim, latent_dim),
        act=make(latent_dim, ACTION_DIM),
        latent_dim=latent_dim,
    )
