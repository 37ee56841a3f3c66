"""
Trainable layers with explicit forward/backward passes.

Every layer keeps its arrays in `params` and the matching accumulated
gradients in `grads`. `backward` must follow the `forward` whose cache it
consumes; gradients accumulate until `zero_grad`.
"""

from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from app.nn.functional import check_finite, reverse_padded, sigmoid

EMBEDDING_INIT_RANGE = 0.05


def glorot_uniform(rng: np.random.Generator, shape: Tuple[int, int]) -> np.ndarray:
    limit = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    """Base class: named parameters, gradients and child layers."""

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self.children: Dict[str, "Layer"] = {}

    def add_param(self, name: str, value: np.ndarray) -> np.ndarray:
        value = np.ascontiguousarray(value, dtype=np.float64)
        self.params[name] = value
        self.grads[name] = np.zeros_like(value)
        return value

    def add_child(self, name: str, layer: "Layer") -> "Layer":
        self.children[name] = layer
        return layer

    def _walk(self, prefix: str = "") -> Iterator[Tuple[str, "Layer"]]:
        yield prefix, self
        for name, child in self.children.items():
            yield from child._walk(f"{prefix}{name}/")

    def named_parameters(self) -> Dict[str, np.ndarray]:
        return {f"{p}{k}": v for p, layer in self._walk() for k, v in layer.params.items()}

    def named_gradients(self) -> Dict[str, np.ndarray]:
        return {f"{p}{k}": v for p, layer in self._walk() for k, v in layer.grads.items()}

    def zero_grad(self) -> None:
        for _, layer in self._walk():
            for g in layer.grads.values():
                g.fill(0.0)

    def count_parameters(self) -> int:
        return int(sum(v.size for v in self.named_parameters().values()))

    def load_parameters(self, values: Dict[str, np.ndarray]) -> None:
        """Copy arrays into the existing buffers (references held elsewhere stay valid)."""
        own = self.named_parameters()
        missing = set(own) - set(values)
        if missing:
            raise KeyError(f"missing parameters: {sorted(missing)}")
        for name, target in own.items():
            source = np.asarray(values[name], dtype=np.float64)
            if source.shape != target.shape:
                raise ValueError(f"shape mismatch for {name}: {source.shape} vs {target.shape}")
            np.copyto(target, source)


class Embedding(Layer):
    """Row lookup table [vocab, dim]."""

    def __init__(self, vocab_size: int, dim: int, rng: np.random.Generator):
        super().__init__()
        self.vocab_size = vocab_size
        self.dim = dim
        self.add_param("embeddings", rng.uniform(-EMBEDDING_INIT_RANGE, EMBEDDING_INIT_RANGE, size=(vocab_size, dim)))
        self._ids: Optional[np.ndarray] = None

    def forward(self, ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids)
        if ids.size and (ids.min() < 0 or ids.max() >= self.vocab_size):
            raise ValueError(f"ids must lie in [0, {self.vocab_size})")
        self._ids = ids
        return self.params["embeddings"][ids]

    def backward(self, d_out: np.ndarray) -> None:
        if self._ids is None:
            raise RuntimeError("backward called before forward")
        np.add.at(self.grads["embeddings"], self._ids.reshape(-1), d_out.reshape(-1, self.dim))


class Dense(Layer):
    """Affine map on the last axis, optionally followed by tanh."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, activation: Optional[str] = None):
        super().__init__()
        if activation not in (None, "tanh"):
            raise ValueError(f"unsupported activation {activation!r}")
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.activation = activation
        self.add_param("kernel", glorot_uniform(rng, (in_dim, out_dim)))
        self.add_param("bias", np.zeros(out_dim))
        self._x: Optional[np.ndarray] = None
        self._y: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        y = x @ self.params["kernel"] + self.params["bias"]
        if self.activation == "tanh":
            y = np.tanh(y)
        self._y = y
        return y

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        if self._x is None:
            raise RuntimeError("backward called before forward")
        if self.activation == "tanh":
            d_out = d_out * (1.0 - self._y ** 2)
        x2 = self._x.reshape(-1, self.in_dim)
        d2 = d_out.reshape(-1, self.out_dim)
        self.grads["kernel"] += x2.T @ d2
        self.grads["bias"] += d2.sum(axis=0)
        return d_out @ self.params["kernel"].T


class Lstm(Layer):
    """
    Unidirectional LSTM over [B, T, D] with zero initial state.

    Gate order in the fused kernels is i, f, g, o; the forget-gate bias
    starts at 1.0.
    """

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator):
        super().__init__()
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        h = hidden_dim
        self.add_param("kernel", glorot_uniform(rng, (input_dim, 4 * h)))
        self.add_param("recurrent_kernel", glorot_uniform(rng, (h, 4 * h)))
        bias = np.zeros(4 * h)
        bias[h:2 * h] = 1.0
        self.add_param("bias", bias)
        self._cache: Optional[dict] = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        check_finite(x, "LSTM input")
        B, T, _ = x.shape
        H = self.hidden_dim
        U = self.params["recurrent_kernel"]
        xw = x @ self.params["kernel"] + self.params["bias"]

        hs = np.zeros((B, T, H))
        cs = np.zeros((B, T, H))
        gates = np.zeros((B, T, 4 * H))
        h = np.zeros((B, H))
        c = np.zeros((B, H))
        for t in range(T):
            z = xw[:, t] + h @ U
            i = sigmoid(z[:, :H])
            f = sigmoid(z[:, H:2 * H])
            g = np.tanh(z[:, 2 * H:3 * H])
            o = sigmoid(z[:, 3 * H:])
            c = f * c + i * g
            h = o * np.tanh(c)
            check_finite(h, "LSTM hidden state", step=t)
            gates[:, t] = np.concatenate([i, f, g, o], axis=1)
            hs[:, t] = h
            cs[:, t] = c
        self._cache = {"x": x, "hs": hs, "cs": cs, "gates": gates}
        return hs

    def backward(self, d_hs: np.ndarray) -> np.ndarray:
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        x, hs, cs, gates = (self._cache[k] for k in ("x", "hs", "cs", "gates"))
        B, T, D = x.shape
        H = self.hidden_dim
        U = self.params["recurrent_kernel"]

        dz = np.zeros((B, T, 4 * H))
        dh_next = np.zeros((B, H))
        dc_next = np.zeros((B, H))
        for t in reversed(range(T)):
            i = gates[:, t, :H]
            f = gates[:, t, H:2 * H]
            g = gates[:, t, 2 * H:3 * H]
            o = gates[:, t, 3 * H:]
            c_prev = cs[:, t - 1] if t > 0 else np.zeros((B, H))
            tanh_c = np.tanh(cs[:, t])

            dh = d_hs[:, t] + dh_next
            dc = dc_next + dh * o * (1.0 - tanh_c ** 2)
            dz[:, t, :H] = dc * g * i * (1.0 - i)
            dz[:, t, H:2 * H] = dc * c_prev * f * (1.0 - f)
            dz[:, t, 2 * H:3 * H] = dc * i * (1.0 - g ** 2)
            dz[:, t, 3 * H:] = dh * tanh_c * o * (1.0 - o)
            dc_next = dc * f
            dh_next = dz[:, t] @ U.T

        h_prev = np.concatenate([np.zeros((B, 1, H)), hs[:, :-1]], axis=1)
        self.grads["recurrent_kernel"] += h_prev.reshape(-1, H).T @ dz.reshape(-1, 4 * H)
        self.grads["kernel"] += x.reshape(-1, D).T @ dz.reshape(-1, 4 * H)
        self.grads["bias"] += dz.sum(axis=(0, 1))
        return dz @ self.params["kernel"].T


class Gru(Layer):
    """
    GRU with classic reset placement: n = tanh(x Wn + (r * h) Un + bn).

    Gate order in the fused kernels is z, r, n.
    """

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator):
        super().__init__()
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        h = hidden_dim
        self.add_param("kernel", glorot_uniform(rng, (input_dim, 3 * h)))
        self.add_param("recurrent_kernel", glorot_uniform(rng, (h, 3 * h)))
        self.add_param("bias", np.zeros(3 * h))
        self._cache: Optional[dict] = None

    def input_projection(self, x: np.ndarray) -> np.ndarray:
        return x @ self.params["kernel"] + self.params["bias"]

    def cell(self, xz: np.ndarray, h: np.ndarray) -> Tuple[np.ndarray, Tuple[np.ndarray, ...]]:
        """One step from a precomputed input projection; returns (h_new, cache)."""
        H = self.hidden_dim
        U = self.params["recurrent_kernel"]
        hu = h @ U[:, :2 * H]
        z = sigmoid(xz[:, :H] + hu[:, :H])
        r = sigmoid(xz[:, H:2 * H] + hu[:, H:])
        n = np.tanh(xz[:, 2 * H:] + (r * h) @ U[:, 2 * H:])
        h_new = (1.0 - z) * n + z * h
        return h_new, (h, z, r, n)

    def cell_backward(self, dh_new: np.ndarray, cache: Tuple[np.ndarray, ...]) -> Tuple[np.ndarray, np.ndarray]:
        """Returns (d input projection, d previous state); accumulates recurrent grads."""
        h, z, r, n = cache
        H = self.hidden_dim
        U = self.params["recurrent_kernel"]

        dn = dh_new * (1.0 - z)
        dh = dh_new * z
        dan = dn * (1.0 - n ** 2)
        self.grads["recurrent_kernel"][:, 2 * H:] += (r * h).T @ dan
        drh = dan @ U[:, 2 * H:].T
        dh += drh * r
        daz = dh_new * (h - n) * z * (1.0 - z)
        dar = drh * h * r * (1.0 - r)
        dzr = np.concatenate([daz, dar], axis=1)
        self.grads["recurrent_kernel"][:, :2 * H] += h.T @ dzr
        dh += dzr @ U[:, :2 * H].T
        return np.concatenate([dzr, dan], axis=1), dh

    def forward(self, x: np.ndarray, h0: Optional[np.ndarray] = None) -> np.ndarray:
        check_finite(x, "GRU input")
        B, T, _ = x.shape
        h = np.zeros((B, self.hidden_dim)) if h0 is None else h0
        xz = self.input_projection(x)
        hs = np.zeros((B, T, self.hidden_dim))
        caches = []
        for t in range(T):
            h, cache = self.cell(xz[:, t], h)
            check_finite(h, "GRU hidden state", step=t)
            hs[:, t] = h
            caches.append(cache)
        self._cache = {"x": x, "caches": caches}
        return hs

    def backward(self, d_hs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Returns (dx, d initial state)."""
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        x = self._cache["x"]
        caches: List[Tuple[np.ndarray, ...]] = self._cache["caches"]
        B, T, D = x.shape
        dxz = np.zeros((B, T, 3 * self.hidden_dim))
        dh = np.zeros((B, self.hidden_dim))
        for t in reversed(range(T)):
            dxz[:, t], dh = self.cell_backward(d_hs[:, t] + dh, caches[t])
        self.grads["kernel"] += x.reshape(-1, D).T @ dxz.reshape(-1, 3 * self.hidden_dim)
        self.grads["bias"] += dxz.sum(axis=(0, 1))
        return dxz @ self.params["kernel"].T, dh


class Bidirectional(Layer):
    """
    Runs `forward_layer` left-to-right and `backward_layer` over each row
    reversed within its true length; outputs are concatenated per step.
    """

    def __init__(self, forward_layer: Layer, backward_layer: Layer):
        super().__init__()
        self.forward_layer = self.add_child("forward", forward_layer)
        self.backward_layer = self.add_child("backward", backward_layer)
        self._lengths: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        self._lengths = lengths
        h_fwd = self.forward_layer.forward(x)
        h_bwd = reverse_padded(self.backward_layer.forward(reverse_padded(x, lengths)), lengths)
        return np.concatenate([h_fwd, h_bwd], axis=-1)

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        if self._lengths is None:
            raise RuntimeError("backward called before forward")
        H = d_out.shape[-1] // 2
        dx_fwd = _first(self.forward_layer.backward(d_out[..., :H]))
        dx_bwd = _first(self.backward_layer.backward(reverse_padded(d_out[..., H:], self._lengths)))
        return dx_fwd + reverse_padded(dx_bwd, self._lengths)


def _first(result):
    """GRU.backward returns (dx, dh0); LSTM.backward returns dx."""
    return result[0] if isinstance(result, tuple) else result
