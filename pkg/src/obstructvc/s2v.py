"""Structure2Vec embeddings and an n-step Q-learning agent for vertex cover.

Embedding update, with all edge weights equal to 1::

    mu_v <- relu(tag * x_v + agg @ sum_{u in N(v)} mu_u + edge @ (deg(v) * relu(edge_w)))

run for ``T`` synchronous rounds from ``mu = 0``. The action value of a
vertex reads the pooled state ``sum_u mu_u`` together with the vertex's own
embedding::

    Q(v) = out . relu([pool @ sum_u mu_u, node @ mu_v])

Gradients are computed by hand; :func:`loss_and_grads` is checked against
finite differences in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .solvers import MODEL, CoverResult, _result

BLOCK_NAMES = ("tag", "agg", "edge_w", "edge", "pool", "node", "out")
CHECKPOINT_MAGIC = "S2VVC"
CHECKPOINT_VERSION = 1


class DivergenceError(FloatingPointError):
    """Training produced a non-finite loss."""


def block_shapes(p: int) -> dict[str, tuple[int, ...]]:
    return {"tag": (p,), "agg": (p, p), "edge_w": (p,), "edge": (p, p),
            "pool": (p, p), "node": (p, p), "out": (2 * p,)}


@dataclass
class ModelParams:
    p: int
    T: int
    theta: dict[str, np.ndarray]

    def __post_init__(self):
        shapes = block_shapes(self.p)
        if set(self.theta) != set(shapes):
            raise ValueError(f"parameter blocks must be {sorted(shapes)}, got {sorted(self.theta)}")
        for name, shape in shapes.items():
            arr = np.asarray(self.theta[name], dtype=np.float64)
            if arr.shape != shape:
                raise ValueError(f"block {name!r} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"block {name!r} has non-finite entries")
            self.theta[name] = arr

    @classmethod
    def init(cls, p: int = 64, T: int = 4, seed: int = 0, scale: float = 0.01) -> "ModelParams":
        """Uniform init in ``[-scale, scale]`` drawn block by block in ``BLOCK_NAMES`` order."""
        rng = np.random.default_rng(seed)
        shapes = block_shapes(p)
        return cls(p, T, {k: rng.uniform(-scale, scale, shapes[k]) for k in BLOCK_NAMES})

    @classmethod
    def zeros(cls, p: int, T: int) -> "ModelParams":
        return cls(p, T, {k: np.zeros(s) for k, s in block_shapes(p).items()})

    def copy(self) -> "ModelParams":
        return ModelParams(self.p, self.T, {k: v.copy() for k, v in self.theta.items()})

    def __eq__(self, other):
        if not isinstance(other, ModelParams):
            return NotImplemented
        return (self.p == other.p and self.T == other.T
                and all(np.array_equal(self.theta[k], other.theta[k]) for k in BLOCK_NAMES))


# ---------------------------------------------------------------- forward / backward

def _relu(x):
    return np.maximum(x, 0.0)


def _graph_arrays(g: Graph):
    a = g.adjacency_matrix()
    return a, a.sum(axis=1)


def _check_dims(g_n, tags, params):
    if len(tags) != g_n:
        raise ValueError(f"tags has length {len(tags)}, graph has {g_n} vertices")


def _embed(adj, deg, tags, params, keep=False):
    th = params.theta
    edge_term = th["edge"] @ _relu(th["edge_w"])
    base = np.outer(tags, th["tag"]) + np.outer(deg, edge_term)
    mu = np.zeros((adj.shape[0], params.p))
    trace = []
    for _ in range(params.T):
        s = adj @ mu
        pre = base + s @ th["agg"].T
        if keep:
            trace.append((s, pre))
        mu = _relu(pre)
    return mu, trace


def embed(g: Graph, tags, params: ModelParams) -> np.ndarray:
    """Per-vertex embeddings, shape ``(n, p)``."""
    tags = np.asarray(tags, dtype=np.float64)
    _check_dims(g.n, tags, params)
    adj, deg = _graph_arrays(g)
    return _embed(adj, deg, tags, params)[0]


def _head(mu, params):
    th = params.theta
    pooled = th["pool"] @ mu.sum(axis=0)
    local = mu @ th["node"].T
    hpre = np.concatenate([np.broadcast_to(pooled, local.shape), local], axis=1)
    return _relu(hpre) @ th["out"], hpre


def q_values(g: Graph, embeddings: np.ndarray, params: ModelParams) -> np.ndarray:
    if embeddings.shape != (g.n, params.p):
        raise ValueError(f"embeddings have shape {embeddings.shape}, expected {(g.n, params.p)}")
    return _head(embeddings, params)[0]


def _scores(adj, deg, tags, params):
    return _head(_embed(adj, deg, tags, params)[0], params)[0]


def _backward(adj, deg, tags, action, dq, params, grads):
    """Accumulate d(dq * Q(action)) / d(theta) into ``grads``."""
    th = params.theta
    p = params.p
    mu, trace = _embed(adj, deg, tags, params, keep=True)
    _, hpre = _head(mu, params)
    h = _relu(hpre[action])
    grads["out"] += dq * h
    dh = dq * th["out"] * (hpre[action] > 0)
    dpooled, dlocal = dh[:p], dh[p:]
    grads["pool"] += np.outer(dpooled, mu.sum(axis=0))
    grads["node"] += np.outer(dlocal, mu[action])
    dmu = np.tile(th["pool"].T @ dpooled, (mu.shape[0], 1))
    dmu[action] += th["node"].T @ dlocal
    dbase = np.zeros_like(mu)
    for s, pre in reversed(trace):
        dpre = dmu * (pre > 0)
        grads["agg"] += dpre.T @ s
        dbase += dpre
        dmu = adj @ (dpre @ th["agg"])
    grads["tag"] += dbase.T @ tags
    r = _relu(th["edge_w"])
    dc = dbase.T @ deg
    grads["edge"] += np.outer(dc, r)
    grads["edge_w"] += (th["edge"].T @ dc) * (th["edge_w"] > 0)


# ---------------------------------------------------------------- episodes

@dataclass
class Transition:
    graph: Graph
    tags: np.ndarray
    action: int
    n_step_return: float
    next_tags: np.ndarray
    terminal: bool
    steps: int
    adj: np.ndarray = field(default=None, repr=False, compare=False)
    deg: np.ndarray = field(default=None, repr=False, compare=False)

    def arrays(self):
        if self.adj is None:
            self.adj, self.deg = _graph_arrays(self.graph)
        return self.adj, self.deg


def legal_actions(adj: np.ndarray, tags: np.ndarray) -> np.ndarray:
    """Mask of vertices outside the cover with at least one uncovered incident edge."""
    free = tags == 0
    return free & ((adj @ free.astype(np.float64)) > 0)


def greedy_action(scores: np.ndarray, legal: np.ndarray) -> int:
    masked = np.where(legal, scores, -np.inf)
    return int(np.argmax(masked))


def run_episode(g: Graph, params: ModelParams, epsilon: float = 0.0, rng_seed=None,
                n_step: int = 2) -> tuple[CoverResult, list[Transition]]:
    """Build a cover one vertex at a time, epsilon-greedy on the current Q-values.

    Each move earns reward -1, so the episode return is minus the cover size.
    """
    rng = np.random.default_rng(rng_seed)
    adj, deg = _graph_arrays(g)
    tags = np.zeros(g.n)
    states = [tags.copy()]
    actions = []
    legal = legal_actions(adj, tags)
    while legal.any():
        if epsilon > 0 and rng.random() < epsilon:
            v = int(rng.choice(np.flatnonzero(legal)))
        else:
            v = greedy_action(_scores(adj, deg, tags, params), legal)
        actions.append(v)
        tags[v] = 1.0
        states.append(tags.copy())
        legal = legal_actions(adj, tags)
    length = len(actions)
    transitions = []
    for i, v in enumerate(actions):
        k = min(n_step, length - i)
        transitions.append(Transition(g, states[i], v, -float(k), states[i + k],
                                      i + k == length, k, adj, deg))
    return _result(g, actions, MODEL), transitions


def greedy_cover(g: Graph, params: ModelParams) -> CoverResult:
    return run_episode(g, params, 0.0, None)[0]


# ---------------------------------------------------------------- learning

def td_targets(batch, target_params: ModelParams, discount: float) -> np.ndarray:
    ys = np.empty(len(batch))
    for i, tr in enumerate(batch):
        y = tr.n_step_return
        if not tr.terminal:
            adj, deg = tr.arrays()
            legal = legal_actions(adj, tr.next_tags)
            if legal.any():
                q = _scores(adj, deg, tr.next_tags, target_params)
                y += discount ** tr.steps * q[legal].max()
        ys[i] = y
    return ys


def loss_and_grads(batch, params: ModelParams, targets) -> tuple[float, dict[str, np.ndarray]]:
    """Mean squared TD error against fixed ``targets`` and its gradient."""
    grads = {k: np.zeros_like(v) for k, v in params.theta.items()}
    total = 0.0
    scale = 2.0 / len(batch)
    for tr, y in zip(batch, targets):
        adj, deg = tr.arrays()
        q = _scores(adj, deg, tr.tags, params)[tr.action]
        err = q - y
        total += err * err
        _backward(adj, deg, tr.tags, tr.action, scale * err, params, grads)
    return total / len(batch), grads


class Adam:
    def __init__(self, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m = {}
        self.v = {}

    def step(self, theta, grads, lr):
        self.t += 1
        out = {}
        for k, g in grads.items():
            m = self.m.get(k, 0.0) * self.beta1 + (1 - self.beta1) * g
            v = self.v.get(k, 0.0) * self.beta2 + (1 - self.beta2) * g * g
            self.m[k], self.v[k] = m, v
            mhat = m / (1 - self.beta1 ** self.t)
            vhat = v / (1 - self.beta2 ** self.t)
            out[k] = theta[k] - lr * mhat / (np.sqrt(vhat) + self.eps)
        return out


def train_step(batch, params: ModelParams, learning_rate: float, discount: float,
               target_params: ModelParams, optimizer=None, max_grad_norm=None):
    """One gradient step on the squared n-step TD error.

    Returns ``(new_params, loss)``; ``params`` is not modified. Plain SGD
    unless an ``optimizer`` such as :class:`Adam` is passed.
    """
    if not batch:
        raise ValueError("empty batch")
    targets = td_targets(batch, target_params, discount)
    loss, grads = loss_and_grads(batch, params, targets)
    if not np.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads.values()):
        raise DivergenceError(f"non-finite loss {loss}; reduce the learning rate")
    if max_grad_norm is not None:
        norm = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
        if norm > max_grad_norm:
            grads = {k: g * (max_grad_norm / norm) for k, g in grads.items()}
    if learning_rate == 0:
        return params.copy(), float(loss)
    if optimizer is None:
        theta = {k: params.theta[k] - learning_rate * grads[k] for k in BLOCK_NAMES}
    else:
        theta = optimizer.step(params.theta, grads, learning_rate)
    return ModelParams(params.p, params.T, theta), float(loss)


# ---------------------------------------------------------------- checkpoints

def save_params(params: ModelParams, path) -> None:
    """Write the text checkpoint: header ``S2VVC 1 p T``, then ``name rows cols`` blocks."""
    lines = [f"{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION} {params.p} {params.T}"]
    for name in BLOCK_NAMES:
        arr = np.atleast_2d(params.theta[name])
        lines.append(f"{name} {arr.shape[0]} {arr.shape[1]}")
        for row in arr:
            lines.append(" ".join(repr(float(x)) for x in row))
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def load_params(path) -> ModelParams:
    with open(path) as f:
        tokens = [line.split() for line in f if line.strip()]
    if not tokens or tokens[0][:2] != [CHECKPOINT_MAGIC, str(CHECKPOINT_VERSION)] or len(tokens[0]) != 4:
        raise ValueError(f"{path}: not an {CHECKPOINT_MAGIC} v{CHECKPOINT_VERSION} checkpoint")
    p, T = int(tokens[0][2]), int(tokens[0][3])
    shapes = block_shapes(p)
    theta = {}
    i = 1
    while i < len(tokens):
        name, rows, cols = tokens[i][0], int(tokens[i][1]), int(tokens[i][2])
        block = np.array([[float(x) for x in row] for row in tokens[i + 1:i + 1 + rows]])
        if block.shape != (rows, cols):
            raise ValueError(f"{path}: block {name!r} is malformed")
        if name not in shapes:
            raise ValueError(f"{path}: unknown block {name!r}")
        theta[name] = block.reshape(shapes[name])
        i += 1 + rows
    return ModelParams(p, T, theta)
