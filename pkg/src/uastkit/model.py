"""The classifier network over both AST views.

The sequence side embeds the pre-order path, runs multi-head self-attention
with Q = K = V (no input projections unless the learned_projections variant
is switched on), and feeds a stacked bidirectional LSTM whose recurrence is
masked to the true sequence length.  The graph side runs GCN layers over the
precomputed normalized adjacency and mean-pools real nodes.  Features fuse
by concatenation, sequence side first, into a softmax classifier.

Two entry points compute the same function: the per-sample ops (embed,
self_attention, bilstm_encode, gcn_forward, graph_pool, fuse, classify,
forward) and forward_batch, which shares one tape across a whole batch so
tape length does not grow with batch size.  Training uses forward_batch;
the per-sample ops are the contract surface and delegate where practical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import autograd as ag
from .autograd import Tensor
from .errors import ConfigError, ShapeMismatch, ZeroNodes
from .featurizer import GraphSample, PathSequence

MODES = ("uast", "sast", "gast")
GCN_ACTIVATIONS = ("relu", "sigmoid", "tanh")
POOLINGS = ("mean", "sum")

_ACT = {"relu": ag.relu, "sigmoid": ag.sigmoid, "tanh": ag.tanh}

INIT_STREAM = 1  # rng stream id for parameter initialization


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    k: int
    mode: str = "uast"
    L: int = 200
    d: int = 200
    heads: int = 4
    attn_dropout: float = 0.2
    h: int = 64
    lstm_layers: int = 2
    lstm_dropout: float = 0.5
    N: int = 400
    gcn_layers: int = 2
    gcn_hidden: int = 200
    d_out: int = 64
    gcn_activation: str = "relu"
    pooling: str = "mean"
    learned_projections: bool = False

    def validate(self) -> "ModelConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.gcn_activation not in GCN_ACTIVATIONS:
            raise ConfigError(f"gcn_activation must be one of {GCN_ACTIVATIONS}")
        if self.pooling not in POOLINGS:
            raise ConfigError(f"pooling must be one of {POOLINGS}")
        positive = ("vocab_size", "k", "L", "d", "heads", "h", "lstm_layers",
                    "N", "gcn_layers", "gcn_hidden", "d_out")
        for name in positive:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.d % self.heads != 0:
            raise ConfigError(
                f"d ({self.d}) must be divisible by heads ({self.heads})")
        for name in ("attn_dropout", "lstm_dropout"):
            rate = getattr(self, name)
            if not 0.0 <= rate < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {rate}")
        return self

    @property
    def head_dim(self) -> int:
        return self.d // self.heads

    @property
    def fusion_dim(self) -> int:
        if self.mode == "sast":
            return 2 * self.h
        if self.mode == "gast":
            return self.d_out
        return 2 * self.h + self.d_out

    @property
    def uses_path(self) -> bool:
        return self.mode in ("uast", "sast")

    @property
    def uses_graph(self) -> bool:
        return self.mode in ("uast", "gast")


@dataclass
class LstmGates:
    """One direction of one layer; weights are [h x (h + in_dim)]."""
    w_i: Tensor
    w_f: Tensor
    w_o: Tensor
    w_c: Tensor
    b_i: Tensor
    b_f: Tensor
    b_o: Tensor
    b_c: Tensor


@dataclass
class ModelParams:
    config: ModelConfig
    embedding: Tensor | None = None
    proj_q: Tensor | None = None
    proj_k: Tensor | None = None
    proj_v: Tensor | None = None
    lstm: list[tuple[LstmGates, LstmGates]] = field(default_factory=list)
    gcn: list[Tensor] = field(default_factory=list)
    clf_w: Tensor | None = None
    clf_b: Tensor | None = None

    def manifest(self) -> list[tuple[str, Tensor]]:
        """Stable (name, tensor) ordering; drives optimizer and checkpoints."""
        out: list[tuple[str, Tensor]] = []
        if self.embedding is not None:
            out.append(("embedding", self.embedding))
        for name, t in (("proj_q", self.proj_q), ("proj_k", self.proj_k),
                        ("proj_v", self.proj_v)):
            if t is not None:
                out.append((name, t))
        for layer, (fwd, bwd) in enumerate(self.lstm):
            for direction, gates in (("fwd", fwd), ("bwd", bwd)):
                for gate in ("w_i", "w_f", "w_o", "w_c",
                             "b_i", "b_f", "b_o", "b_c"):
                    out.append((f"lstm.{layer}.{direction}.{gate}",
                                getattr(gates, gate)))
        for i, w in enumerate(self.gcn):
            out.append((f"gcn.{i}", w))
        out.append(("classifier.w", self.clf_w))
        out.append(("classifier.b", self.clf_b))
        return out

    def parameters(self) -> list[Tensor]:
        return [t for _, t in self.manifest()]

    def all_finite(self) -> bool:
        return all(np.isfinite(t.data).all() for t in self.parameters())


def freeze_pad_gradient(params: ModelParams) -> None:
    """Zero the PAD embedding row's gradient so that row never moves."""
    e = params.embedding
    if e is not None and e.grad is not None:
        e.grad[0, :] = 0.0


def _gcn_dims(cfg: ModelConfig) -> list[tuple[int, int]]:
    dims = [cfg.vocab_size] + [cfg.gcn_hidden] * (cfg.gcn_layers - 1) + [cfg.d_out]
    return list(zip(dims[:-1], dims[1:]))


def _build_params(cfg: ModelConfig, uniform, bias) -> ModelParams:
    """Assemble the mode-dependent parameter structure from filler callables."""
    params = ModelParams(config=cfg)
    if cfg.uses_path:
        params.embedding = uniform(cfg.vocab_size, cfg.d, cfg.d)
        if cfg.learned_projections:
            params.proj_q = uniform(cfg.d, cfg.d, cfg.d)
            params.proj_k = uniform(cfg.d, cfg.d, cfg.d)
            params.proj_v = uniform(cfg.d, cfg.d, cfg.d)
        in_dim = cfg.d
        for _ in range(cfg.lstm_layers):
            directions = []
            for _ in range(2):
                fan = cfg.h + in_dim
                directions.append(LstmGates(
                    w_i=uniform(cfg.h, fan, fan), w_f=uniform(cfg.h, fan, fan),
                    w_o=uniform(cfg.h, fan, fan), w_c=uniform(cfg.h, fan, fan),
                    b_i=bias(cfg.h), b_f=bias(cfg.h, 1.0),
                    b_o=bias(cfg.h), b_c=bias(cfg.h)))
            params.lstm.append((directions[0], directions[1]))
            in_dim = 2 * cfg.h
    if cfg.uses_graph:
        params.gcn = [uniform(fan_in, fan_out, fan_in)
                      for fan_in, fan_out in _gcn_dims(cfg)]
    params.clf_w = uniform(cfg.fusion_dim, cfg.k, cfg.fusion_dim)
    params.clf_b = bias(cfg.k)
    return params


def init_params(cfg: ModelConfig, seed: int) -> ModelParams:
    """Uniform(-sqrt(1/fan_in), sqrt(1/fan_in)) per matrix; forget bias 1."""
    cfg.validate()
    rng = np.random.default_rng([seed, INIT_STREAM])

    def uniform(rows: int, cols: int, fan_in: int) -> Tensor:
        bound = math.sqrt(1.0 / fan_in)
        return Tensor(rng.uniform(-bound, bound, size=(rows, cols)),
                      requires_grad=True)

    def bias(cols: int, value: float = 0.0) -> Tensor:
        return Tensor(np.full((1, cols), value), requires_grad=True)

    params = _build_params(cfg, uniform, bias)
    if params.embedding is not None:
        params.embedding.data[0, :] = 0.0  # PAD row starts zero, stays zero
    return params


def empty_params(cfg: ModelConfig) -> ModelParams:
    """Zero-filled parameters with the canonical shapes, for deserialization."""
    cfg.validate()

    def uniform(rows: int, cols: int, fan_in: int) -> Tensor:
        return Tensor(np.zeros((rows, cols)), requires_grad=True)

    def bias(cols: int, value: float = 0.0) -> Tensor:
        return Tensor(np.zeros((1, cols)), requires_grad=True)

    return _build_params(cfg, uniform, bias)


# --- sequence side -----------------------------------------------------------

def embed(path: PathSequence, params: ModelParams) -> Tensor:
    """[L x d] with row t = E[indices[t]]; PAD positions hit the zero row."""
    return ag.embedding_lookup(params.embedding, path.indices)


def _attention_mask(L: int, true_length: int) -> Tensor | None:
    if true_length >= L:
        return None
    row = np.zeros((1, L))
    row[0, true_length:] = -np.inf
    return Tensor(row)


def _attend_one(x: Tensor, mask: Tensor | None, cfg: ModelConfig,
                params: ModelParams | None, training: bool,
                rng: np.random.Generator | None) -> Tensor:
    """Multi-head attention over one sample's [L x d] rows."""
    if cfg.learned_projections:
        if params is None or params.proj_q is None:
            raise ConfigError("learned_projections on but no projection weights")
        q_all = ag.matmul(x, params.proj_q)
        k_all = ag.matmul(x, params.proj_k)
        v_all = ag.matmul(x, params.proj_v)
    else:
        q_all = k_all = v_all = x
    hd = cfg.head_dim
    inv_sqrt = 1.0 / math.sqrt(hd)
    heads_out: list[Tensor] = []
    for head in range(cfg.heads):
        lo, hi = head * hd, (head + 1) * hd
        q = ag.slice_cols(q_all, lo, hi)
        k = q if k_all is q_all else ag.slice_cols(k_all, lo, hi)
        v = q if v_all is q_all else ag.slice_cols(v_all, lo, hi)
        scores = ag.scale(ag.matmul(q, ag.transpose(k)), inv_sqrt)
        if mask is not None:
            scores = ag.add(scores, mask)
        weights = ag.softmax_rows(scores)
        weights = ag.dropout(weights, cfg.attn_dropout, training, rng)
        heads_out.append(ag.matmul(weights, v))
    return ag.concat(heads_out, axis=1) if len(heads_out) > 1 else heads_out[0]


def self_attention(x: Tensor, true_length: int, cfg: ModelConfig,
                   params: ModelParams | None = None, training: bool = False,
                   rng: np.random.Generator | None = None) -> Tensor:
    """[L x d] -> [L x d]; keys at padded positions masked to -inf."""
    if x.shape != (cfg.L, cfg.d):
        raise ShapeMismatch(f"self_attention: {x.shape} vs ({cfg.L}, {cfg.d})")
    if true_length < 1:
        raise ShapeMismatch("self_attention: true_length must be >= 1")
    return _attend_one(x, _attention_mask(cfg.L, true_length), cfg, params,
                       training, rng)


def _masks_for_batch(true_lengths: list[int], T: int) -> list[tuple]:
    """Per-step (mask, inv_mask) tensor pairs; None when every row is live."""
    arr = np.asarray(true_lengths)
    out = []
    for t in range(T):
        live = (arr > t).astype(np.float64).reshape(-1, 1)
        if live.all():
            out.append((None, None))
        else:
            out.append((Tensor(live), Tensor(1.0 - live)))
    return out


def _lstm_direction(xs: list[Tensor], masks: list[tuple], gates: LstmGates,
                    h_dim: int, reverse: bool) -> tuple[list[Tensor], Tensor]:
    """Run one direction over the step list; returns per-step h and final h."""
    batch = xs[0].shape[0]
    w_all = ag.transpose(ag.concat(
        [gates.w_i, gates.w_f, gates.w_o, gates.w_c], axis=0))  # [(h+in) x 4h]
    b_all = ag.concat([gates.b_i, gates.b_f, gates.b_o, gates.b_c], axis=1)
    h = Tensor(np.zeros((batch, h_dim)))
    c = Tensor(np.zeros((batch, h_dim)))
    steps = range(len(xs) - 1, -1, -1) if reverse else range(len(xs))
    outs: list[Tensor | None] = [None] * len(xs)
    for t in steps:
        z = ag.concat([h, xs[t]], axis=1)
        pre = ag.add(ag.matmul(z, w_all), b_all)
        i_g = ag.sigmoid(ag.slice_cols(pre, 0, h_dim))
        f_g = ag.sigmoid(ag.slice_cols(pre, h_dim, 2 * h_dim))
        o_g = ag.sigmoid(ag.slice_cols(pre, 2 * h_dim, 3 * h_dim))
        c_hat = ag.tanh(ag.slice_cols(pre, 3 * h_dim, 4 * h_dim))
        c_new = ag.add(ag.mul(f_g, c), ag.mul(i_g, c_hat))
        live, dead = masks[t]
        if live is None:
            c = c_new
        else:
            c = ag.add(ag.mul(c_new, live), ag.mul(c, dead))
        h_new = ag.mul(o_g, ag.tanh(c))
        if live is None:
            h = h_new
        else:
            h = ag.add(ag.mul(h_new, live), ag.mul(h, dead))
        outs[t] = h
    return outs, h  # type: ignore[return-value]


def _bilstm_over_steps(xs: list[Tensor], true_lengths: list[int],
                       params: ModelParams, cfg: ModelConfig, training: bool,
                       rng: np.random.Generator | None) -> Tensor:
    masks = _masks_for_batch(true_lengths, len(xs))
    inputs = xs
    final_fwd: Tensor | None = None
    final_bwd: Tensor | None = None
    for layer, (fwd_gates, bwd_gates) in enumerate(params.lstm):
        outs_f, final_fwd = _lstm_direction(inputs, masks, fwd_gates,
                                            cfg.h, reverse=False)
        outs_b, final_bwd = _lstm_direction(inputs, masks, bwd_gates,
                                            cfg.h, reverse=True)
        if layer + 1 < len(params.lstm):
            inputs = [ag.dropout(ag.concat([f, b], axis=1), cfg.lstm_dropout,
                                 training, rng)
                      for f, b in zip(outs_f, outs_b)]
    return ag.concat([final_fwd, final_bwd], axis=1)


def bilstm_encode(x: Tensor, true_length: int, params: ModelParams,
                  cfg: ModelConfig, training: bool = False,
                  rng: np.random.Generator | None = None) -> Tensor:
    """[L x d] -> [1 x 2h]: top layer's forward-final and backward-final."""
    if true_length < 1:
        raise ShapeMismatch("bilstm_encode: true_length must be >= 1")
    if x.shape[1] != cfg.d:
        raise ShapeMismatch(f"bilstm_encode: {x.shape} vs (*, {cfg.d})")
    steps = [ag.slice_rows(x, t, t + 1) for t in range(min(true_length, x.shape[0]))]
    return _bilstm_over_steps(steps, [len(steps)], params, cfg, training, rng)


# --- graph side --------------------------------------------------------------

def _adjacency_tensor(graph: GraphSample) -> Tensor:
    return Tensor(graph.norm_adj)


def _gcn_from_adj(adj: Tensor, node_kinds: np.ndarray, params: ModelParams,
                  cfg: ModelConfig) -> Tensor:
    act = _ACT[cfg.gcn_activation]
    # one-hot rows times W0 is exactly a row gather; PAD rows pick row 0 of
    # W0 but the zero rows/cols of adj erase them, matching one-hot algebra
    h = ag.gather_rows(params.gcn[0], node_kinds)
    h = act(ag.matmul(adj, h))
    for w in params.gcn[1:]:
        h = act(ag.matmul(adj, ag.matmul(h, w)))
    return h


def gcn_forward(graph: GraphSample, params: ModelParams,
                cfg: ModelConfig) -> Tensor:
    """[N x d_out] node features after the stacked propagation layers."""
    if graph.N != cfg.N:
        raise ShapeMismatch(f"gcn_forward: graph N={graph.N} vs config N={cfg.N}")
    if int(graph.node_kinds.max(initial=0)) >= cfg.vocab_size:
        raise ShapeMismatch("gcn_forward: node kind index outside vocabulary")
    return _gcn_from_adj(_adjacency_tensor(graph), graph.node_kinds, params, cfg)


def graph_pool(h: Tensor, node_count: int, pooling: str = "mean") -> Tensor:
    """[N x d_out] -> [1 x d_out] over the first node_count rows."""
    if node_count < 1:
        raise ZeroNodes("graph_pool: node_count must be >= 1")
    real = ag.slice_rows(h, 0, node_count)
    return ag.mean_axis(real, 0) if pooling == "mean" else ag.sum_axis(real, 0)


# --- fusion and head ----------------------------------------------------------

def fuse(h_sast: Tensor, h_gast: Tensor) -> Tensor:
    """Row-wise concatenation, sequence features first."""
    return ag.concat([h_sast, h_gast], axis=1)


def classify(h_code: Tensor, params: ModelParams) -> Tensor:
    """softmax(h_code W + b): rows are probability vectors."""
    return ag.softmax_rows(ag.add(ag.matmul(h_code, params.clf_w), params.clf_b))


# --- full passes ---------------------------------------------------------------

@dataclass
class PreparedSample:
    """A featurized record with its graph constants materialized once."""
    path: PathSequence | None
    true_length: int
    adj: Tensor | None
    node_kinds: np.ndarray | None
    node_count: int
    label: int


def prepare_sample(path: PathSequence | None, graph: GraphSample | None,
                   cfg: ModelConfig, label: int = -1) -> PreparedSample:
    adj = None
    kinds = None
    count = 0
    if cfg.uses_graph:
        if graph is None:
            raise ShapeMismatch("this mode needs the graph view")
        adj = _adjacency_tensor(graph)
        kinds = graph.node_kinds
        count = graph.node_count
    true_length = 0
    if cfg.uses_path:
        if path is None:
            raise ShapeMismatch("this mode needs the path view")
        true_length = max(1, path.true_length)
    return PreparedSample(path=path if cfg.uses_path else None,
                          true_length=true_length, adj=adj, node_kinds=kinds,
                          node_count=count, label=label)


def forward_batch(batch: list[PreparedSample], params: ModelParams,
                  cfg: ModelConfig, training: bool = False,
                  rng: np.random.Generator | None = None) -> Tensor:
    """Probabilities [B x k] for a whole batch on one shared tape."""
    if not batch:
        raise ShapeMismatch("forward_batch: empty batch")
    features: list[Tensor] = []

    if cfg.uses_path:
        L = cfg.L
        flat = np.concatenate([s.path.indices for s in batch])
        x_all = ag.embedding_lookup(params.embedding, flat)
        atts: list[Tensor] = []
        for b, s in enumerate(batch):
            xb = ag.slice_rows(x_all, b * L, (b + 1) * L)
            atts.append(_attend_one(xb, _attention_mask(L, s.true_length),
                                    cfg, params, training, rng))
        att_all = ag.concat(atts, axis=0) if len(atts) > 1 else atts[0]
        lengths = [s.true_length for s in batch]
        T = max(lengths)
        base = np.arange(len(batch)) * L
        steps = [ag.gather_rows(att_all, base + t) for t in range(T)]
        features.append(_bilstm_over_steps(steps, lengths, params, cfg,
                                           training, rng))

    if cfg.uses_graph:
        pooled = [graph_pool(_gcn_from_adj(s.adj, s.node_kinds, params, cfg),
                             s.node_count, cfg.pooling)
                  for s in batch]
        features.append(ag.concat(pooled, axis=0) if len(pooled) > 1
                        else pooled[0])

    h_code = fuse(features[0], features[1]) if len(features) == 2 else features[0]
    return classify(h_code, params)


def forward(path: PathSequence | None, graph: GraphSample | None,
            params: ModelParams, cfg: ModelConfig, training: bool = False,
            rng: np.random.Generator | None = None) -> Tensor:
    """Single-sample probabilities [1 x k]."""
    sample = prepare_sample(path, graph, cfg)
    return forward_batch([sample], params, cfg, training, rng)
