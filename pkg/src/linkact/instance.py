"""Wireless instance model, random topology generation, and the on-disk
instance format.

Reproducibility contract: topologies are drawn from numpy's PCG64 bit
generator. Link ``i`` of an instance with seed ``s`` uses the stream
``SeedSequence(s, spawn_key=(0, i))``; per-link SINR-threshold draws (study
2) use ``SeedSequence(s, spawn_key=(1,))``. All coordinate draws are
``Generator.uniform`` doubles, documented draw-by-draw in the generator
functions below, so instances are reproducible from the seed alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import GenerationError, ParseError
from .units import db_to_linear, dbm_to_watts, gain_from_distance

MAX_PLACEMENT_RETRIES = 10**6

SPARSE_AREA_M = 1000.0
DENSE_AREA_M = 500.0


@dataclass
class Instance:
    """One link-activation instance, all quantities in linear scale.

    ``gains[m][k]`` is the channel gain from transmitter m to receiver k.
    Thresholds and weights may be None on freshly generated topologies; the
    study harness or CLI fills them in before solving. Instances are
    treated as immutable after construction (use ``with_thresholds`` /
    ``with_weights`` to derive variants).
    """

    K: int
    gains: np.ndarray
    powers: np.ndarray
    noise: float
    thresholds: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.gains = np.asarray(self.gains, dtype=float)
        self.powers = np.asarray(self.powers, dtype=float)
        if self.thresholds is not None:
            self.thresholds = np.asarray(self.thresholds, dtype=float)
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
        validate_instance(self)

    def with_thresholds(self, thresholds) -> "Instance":
        t = np.broadcast_to(np.asarray(thresholds, dtype=float), (self.K,)).copy()
        return replace(self, thresholds=t)

    def with_weights(self, weights) -> "Instance":
        w = np.broadcast_to(np.asarray(weights, dtype=float), (self.K,)).copy()
        return replace(self, weights=w)

    def received_power(self) -> np.ndarray:
        """K x K table, entry [m, k] = powers[m] * gains[m, k]."""
        return self.powers[:, None] * self.gains

    def snr(self) -> np.ndarray:
        """Single-link SNR of every link (interference-free)."""
        return self.powers * np.diag(self.gains) / self.noise

    def require_thresholds(self) -> np.ndarray:
        if self.thresholds is None:
            raise ValueError("instance has no SINR thresholds set")
        return self.thresholds

    def require_weights(self) -> np.ndarray:
        if self.weights is None:
            raise ValueError("instance has no activation weights set")
        return self.weights


def validate_instance(inst: Instance) -> None:
    K = inst.K
    if not isinstance(K, int) or K < 0:
        raise ParseError("link count must be a nonnegative integer", field="k")
    if inst.gains.shape != (K, K):
        raise ParseError(f"expected {K}x{K} matrix, got {inst.gains.shape}", field="gains")
    if not np.all(np.isfinite(inst.gains)):
        raise ParseError("non-finite entry", field="gains")
    if np.any(inst.gains < 0.0):
        raise ParseError("negative channel gain", field="gains")
    if K and np.any(np.diag(inst.gains) <= 0.0):
        raise ParseError("diagonal (own-link) gains must be positive", field="gains")
    if inst.powers.shape != (K,):
        raise ParseError(f"expected length-{K} vector, got {inst.powers.shape}", field="powers_w")
    if not np.all(np.isfinite(inst.powers)) or np.any(inst.powers <= 0.0):
        raise ParseError("transmit powers must be positive finite", field="powers_w")
    if not (np.isfinite(inst.noise) and inst.noise > 0.0):
        raise ParseError("noise power must be positive finite", field="noise_w")
    for name, vec in (("thresholds_lin", inst.thresholds), ("weights", inst.weights)):
        if vec is not None:
            if vec.shape != (K,):
                raise ParseError(f"expected length-{K} vector, got {vec.shape}", field=name)
            if not np.all(np.isfinite(vec)) or np.any(vec <= 0.0):
                raise ParseError("entries must be positive finite", field=name)


@dataclass(frozen=True)
class TopologySpec:
    """Parameters of one random topology draw (datasets I and N)."""

    dataset: str  # "I" or "N"
    density: str  # "sparse" or "dense"
    K: int
    seed: int
    area_side_m: Optional[float] = None  # derived from density when None
    pathloss_exponent: float = 4.0
    tx_power_dbm: float = 30.0
    noise_dbm: float = -100.0
    min_link_m: float = 3.0
    max_link_m: float = 200.0
    feasibility_threshold_db: float = 6.0

    def __post_init__(self):
        if self.dataset not in ("I", "N"):
            raise ValueError(f"dataset must be 'I' or 'N', got {self.dataset!r}")
        if self.density not in ("sparse", "dense"):
            raise ValueError(f"density must be 'sparse' or 'dense', got {self.density!r}")
        if self.K <= 0:
            raise ValueError("K must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.area_side_m is None:
            side = SPARSE_AREA_M if self.density == "sparse" else DENSE_AREA_M
            object.__setattr__(self, "area_side_m", side)
        if self.area_side_m not in (SPARSE_AREA_M, DENSE_AREA_M):
            raise ValueError("area side must be 500 m (dense) or 1000 m (sparse)")
        diagonal = self.area_side_m * math.sqrt(2.0)
        if not 0 < self.min_link_m < self.max_link_m <= diagonal:
            raise ValueError("need 0 < min_link_m < max_link_m <= area diagonal")


def _link_rng(seed: int, link: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(0, link))))


def threshold_rng(seed: int) -> np.random.Generator:
    """Stream for per-link SINR-threshold draws, disjoint from placement."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(1,))))


def _place_link_arbitrary(rng, side: float, snr_floor: float, p_over_eta: float, alpha: float):
    """Dataset I: both endpoints uniform in the square, redrawn until the
    interference-free SNR clears the feasibility floor."""
    for _ in range(MAX_PLACEMENT_RETRIES):
        tx = (rng.uniform(0.0, side), rng.uniform(0.0, side))
        rx = (rng.uniform(0.0, side), rng.uniform(0.0, side))
        d = math.hypot(tx[0] - rx[0], tx[1] - rx[1])
        if d <= 0.0:
            continue
        if p_over_eta * gain_from_distance(d, alpha) >= snr_floor:
            return tx, rx, d
    raise GenerationError("dataset-I placement exceeded the retry budget")


def _place_link_ranged(rng, side: float, d_min: float, d_max: float):
    """Dataset N: the link length is drawn first (so its distribution cannot
    depend on the area), then transmitter and bearing are redrawn until the
    receiver lands inside the square. The drawn length, not the one
    reconstructed from the coordinates, is the link's length; this keeps the
    SNR multiset bit-identical across densities for matched seeds."""
    d = rng.uniform(d_min, d_max)
    for _ in range(MAX_PLACEMENT_RETRIES):
        tx = (rng.uniform(0.0, side), rng.uniform(0.0, side))
        theta = rng.uniform(0.0, 2.0 * math.pi)
        rx = (tx[0] + d * math.cos(theta), tx[1] + d * math.sin(theta))
        if 0.0 <= rx[0] <= side and 0.0 <= rx[1] <= side:
            return tx, rx, d
    raise GenerationError("dataset-N placement exceeded the retry budget")


def generate(spec: TopologySpec) -> Instance:
    """Draw a topology and build its gain matrix.

    Thresholds and weights are left unset; they belong to the study, not the
    topology. Deterministic in ``spec`` (the seed drives named per-link
    streams, see module docstring).
    """
    side = spec.area_side_m
    power_w = dbm_to_watts(spec.tx_power_dbm)
    noise_w = dbm_to_watts(spec.noise_dbm)
    snr_floor = db_to_linear(spec.feasibility_threshold_db)
    alpha = spec.pathloss_exponent

    txs = np.empty((spec.K, 2))
    rxs = np.empty((spec.K, 2))
    lengths = np.empty(spec.K)
    for i in range(spec.K):
        rng = _link_rng(spec.seed, i)
        if spec.dataset == "I":
            tx, rx, d = _place_link_arbitrary(rng, side, snr_floor, power_w / noise_w, alpha)
        else:
            tx, rx, d = _place_link_ranged(rng, side, spec.min_link_m, spec.max_link_m)
        txs[i] = tx
        rxs[i] = rx
        lengths[i] = d

    gains = np.empty((spec.K, spec.K))
    for m in range(spec.K):
        for k in range(spec.K):
            if m == k:
                d = lengths[m]
            else:
                d = math.hypot(txs[m, 0] - rxs[k, 0], txs[m, 1] - rxs[k, 1])
            gains[m, k] = gain_from_distance(d, alpha)

    meta = {
        "dataset": spec.dataset,
        "density": spec.density,
        "seed": spec.seed,
        "area_m": side,
        "coords": {"tx": txs.tolist(), "rx": rxs.tolist()},
        "rng": "pcg64-seedseq",
    }
    return Instance(
        K=spec.K,
        gains=gains,
        powers=np.full(spec.K, power_w),
        noise=noise_w,
        metadata=meta,
    )


# ---------------------------------------------------------------------------
# On-disk format: one JSON document per instance. Floats are written with 17
# significant digits so read(write(x)) round-trips bit for bit.
# ---------------------------------------------------------------------------


def _f17(x: float) -> str:
    return format(float(x), ".17e")


def _render_vector(vec) -> str:
    if vec is None:
        return "null"
    return "[" + ", ".join(_f17(v) for v in vec) + "]"


def instance_to_json(inst: Instance) -> str:
    rows = ",\n    ".join("[" + ", ".join(_f17(g) for g in row) + "]" for row in inst.gains)
    parts = [
        "{",
        f'  "k": {inst.K},',
        f'  "noise_w": {_f17(inst.noise)},',
        f'  "powers_w": {_render_vector(inst.powers)},',
        f'  "thresholds_lin": {_render_vector(inst.thresholds)},',
        f'  "weights": {_render_vector(inst.weights)},',
        '  "gains": [',
        f"    {rows}",
        "  ],",
        f'  "meta": {json.dumps(inst.metadata, sort_keys=True)}',
        "}",
    ]
    return "\n".join(parts) + "\n"


def instance_from_json(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    for key in ("k", "noise_w", "powers_w", "gains"):
        if key not in doc:
            raise ParseError("missing required field", field=key)
    k = doc["k"]
    if not isinstance(k, int) or isinstance(k, bool) or k < 0:
        raise ParseError("must be a nonnegative integer", field="k")

    def vector(name, required):
        val = doc.get(name)
        if val is None:
            if required:
                raise ParseError("missing required field", field=name)
            return None
        if not isinstance(val, list) or len(val) != k:
            raise ParseError(f"expected a length-{k} array", field=name)
        try:
            return np.array([float(v) for v in val])
        except (TypeError, ValueError) as exc:
            raise ParseError("non-numeric entry", field=name) from exc

    gains_raw = doc["gains"]
    if not isinstance(gains_raw, list) or len(gains_raw) != k:
        raise ParseError(f"expected {k} rows", field="gains")
    gains = np.empty((k, k))
    for m, row in enumerate(gains_raw):
        if not isinstance(row, list) or len(row) != k:
            raise ParseError(f"row {m + 1} must have {k} entries", field="gains")
        try:
            gains[m] = [float(v) for v in row]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"non-numeric entry in row {m + 1}", field="gains") from exc

    try:
        noise = float(doc["noise_w"])
    except (TypeError, ValueError) as exc:
        raise ParseError("must be a number", field="noise_w") from exc

    meta = doc.get("meta") or {}
    if not isinstance(meta, dict):
        raise ParseError("must be an object", field="meta")
    return Instance(
        K=k,
        gains=gains,
        powers=vector("powers_w", required=True),
        noise=noise,
        thresholds=vector("thresholds_lin", required=False),
        weights=vector("weights", required=False),
        metadata=meta,
    )


def write_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(instance_to_json(inst))


def read_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_json(fh.read())
