"""Population-level analysis and prediction runs over an event log.

Both entry points work one ego at a time and can farm egos out to a
process pool.  Results are sorted by ego id, so output does not depend on
the number of workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .entropy import analyze_sequence
from .ingest import (
    DEFAULT_BIN_WIDTH,
    DEFAULT_GAP_CAP,
    BinnedEventStream,
    gap_sequence,
    location_sequence,
    partner_gap_sequences,
    partner_location_sequences,
    partner_sequence,
)
from .markov import WEEK, fit, mc_entropy_rate, rolling_evaluate

__all__ = [
    "HISTOGRAM_WIDTH",
    "INDIVIDUAL_COLUMNS",
    "PREDICTION_COLUMNS",
    "REPORT_SCHEMA",
    "PopulationReport",
    "RunConfig",
    "analyze_ego",
    "analyze_population",
    "histogram",
    "individual_row",
    "predict_ego",
    "predict_population",
    "prediction_columns",
    "prediction_row",
]

HISTOGRAM_WIDTH = 0.1


@dataclass(frozen=True)
class RunConfig:
    bin_width: int = DEFAULT_BIN_WIDTH
    gap_cap: int = DEFAULT_GAP_CAP
    min_sequence_length: int = 50
    window: int = WEEK
    ks: tuple = (1, 5)
    seed: int = 0
    bridge: bool = True

    def __post_init__(self):
        for name in ("bin_width", "gap_cap", "min_sequence_length", "window"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        ks = tuple(sorted(set(int(k) for k in self.ks)))
        if not ks or ks[0] < 1:
            raise ValueError("ks must be positive integers")
        object.__setattr__(self, "ks", ks)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["ks"] = list(self.ks)
        return d


@dataclass
class PopulationReport:
    command: str
    config: RunConfig
    individuals: list = field(default_factory=list)
    excluded: list = field(default_factory=list)

    @property
    def summary(self) -> dict:
        out = {}
        for name, values in _rate_columns(self.individuals).items():
            out[name] = {
                "count": len(values),
                "mean": float(np.mean(values)),
                "median": float(np.median(values)),
            }
        return out

    @property
    def histograms(self) -> dict:
        return {name: histogram(values) for name, values in _rate_columns(self.individuals).items()}

    def as_dict(self) -> dict:
        body = {
            "meta": {
                "tool": "predictability",
                "version": __version__,
                "command": self.command,
                "prediction_unit": "interaction event",
            },
            "config": self.config.as_dict(),
            "individuals": self.individuals,
            "excluded": self.excluded,
        }
        if self.command == "analyze":
            body["summary"] = self.summary
            body["histograms"] = self.histograms
        return body


# -- analysis ----------------------------------------------------------------

_SUMMARY_RATES = {
    "partner": ("h_lz", "h_iid", "h_unif", "h_mc", "effective_choices"),
    "location": ("h_lz", "h_iid", "h_unif", "effective_choices"),
    "gap": ("h_lz", "h_iid", "h_unif", "effective_choices"),
}


def _rate_columns(individuals) -> dict:
    columns: dict = {}
    for row in individuals:
        for kind, names in _SUMMARY_RATES.items():
            part = row.get(kind)
            if part is None:
                continue
            for name in names:
                columns.setdefault(f"{kind}.{name}", []).append(part[name])
        for cond, value in row["partner"]["h_cond"].items():
            if value is not None:
                columns.setdefault(f"partner.h_cond.{cond}", []).append(value)
    return columns


def histogram(values, width: float = HISTOGRAM_WIDTH) -> list[dict]:
    """Fixed-width bins covering ``values``; bins are ``[start, end)``."""
    if not values:
        return []
    idx = np.floor(np.asarray(values, dtype=float) / width + 1e-9).astype(np.int64)
    lo, hi = int(idx.min()), int(idx.max())
    counts = np.bincount(idx - lo, minlength=hi - lo + 1)
    return [
        {"start": round(i * width, 10), "end": round((i + 1) * width, 10), "count": int(c)}
        for i, c in zip(range(lo, hi + 1), counts.tolist())
    ]


def _sequence_block(seq, conditioners=None) -> dict:
    return analyze_sequence(seq, conditioners).as_dict()


def analyze_ego(stream: BinnedEventStream, ego, config: RunConfig) -> tuple[dict | None, str | None]:
    """Entropy rates for one ego; returns ``(row, None)`` or ``(None, reason)``."""
    partners = partner_sequence(stream, ego)
    if partners.n < max(config.min_sequence_length, 2):
        return None, f"partner sequence length {partners.n} below minimum {config.min_sequence_length}"

    block = _sequence_block(partners)
    block["h_mc"] = mc_entropy_rate(fit(partners))
    cond = {}
    for name, aligned in (
        ("location", lambda: partner_location_sequences(stream, ego)),
        ("gap", lambda: partner_gap_sequences(stream, ego, config.gap_cap)),
    ):
        try:
            x, y = aligned()
            cond[name] = _sequence_block(x, {name: y})["h_cond"][name]
        except ValueError:
            cond[name] = None
    block["h_cond"] = cond
    row = {"ego": ego, "partner": block}

    try:
        places = location_sequence(stream, ego)
        if places.n >= 2:
            row["location"] = _sequence_block(places)
    except ValueError:
        pass
    try:
        gaps = gap_sequence(stream, ego, config.gap_cap)
        if gaps.n >= 2:
            row["gap"] = _sequence_block(gaps)
    except ValueError:
        pass
    return row, None


def predict_ego(stream: BinnedEventStream, ego, config: RunConfig) -> tuple[dict | None, str | None]:
    try:
        result = rolling_evaluate(stream, ego, window=config.window, ks=config.ks, bridge=config.bridge)
    except ValueError as exc:
        return None, str(exc)
    return {"ego": ego, **result.as_dict()}, None


_worker_stream = None


def _init_worker(stream):
    global _worker_stream
    _worker_stream = stream


def _call(args):
    func, ego, config = args
    return func(_worker_stream, ego, config)


def _run(func, stream: BinnedEventStream, config: RunConfig, workers: int):
    egos = stream.egos
    if workers > 1 and len(egos) > 1:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(stream,)) as pool:
            results = list(pool.map(_call, [(func, ego, config) for ego in egos]))
    else:
        results = [func(stream, ego, config) for ego in egos]
    individuals, excluded = [], []
    for ego, (row, reason) in zip(egos, results):
        if row is None:
            excluded.append({"ego": ego, "reason": reason})
        else:
            individuals.append(row)
    return individuals, excluded


def analyze_population(stream: BinnedEventStream, config: RunConfig, workers: int = 1) -> PopulationReport:
    individuals, excluded = _run(analyze_ego, stream, config, workers)
    return PopulationReport("analyze", config, individuals, excluded)


def predict_population(stream: BinnedEventStream, config: RunConfig, workers: int = 1) -> PopulationReport:
    individuals, excluded = _run(predict_ego, stream, config, workers)
    return PopulationReport("predict", config, individuals, excluded)


# -- flat CSV views ----------------------------------------------------------

INDIVIDUAL_COLUMNS = (
    "ego", "n", "K", "h_lz", "h_iid", "h_unif", "h_mc", "effective_choices",
    "h_cond_location", "h_cond_gap",
    "location_n", "location_K", "location_h_lz", "location_h_iid", "location_h_unif",
    "gap_n", "gap_K", "gap_h_lz", "gap_h_iid", "gap_h_unif",
)

PREDICTION_COLUMNS = ("ego", "events_evaluated", "windows")


def individual_row(row: dict) -> list:
    """Flatten one analysis row in :data:`INDIVIDUAL_COLUMNS` order."""
    p = row["partner"]
    out = [row["ego"], p["n"], p["K"], p["h_lz"], p["h_iid"], p["h_unif"], p["h_mc"],
           p["effective_choices"], p["h_cond"].get("location"), p["h_cond"].get("gap")]
    for kind in ("location", "gap"):
        part = row.get(kind)
        out += [None] * 5 if part is None else [part["n"], part["K"], part["h_lz"], part["h_iid"], part["h_unif"]]
    return out


def prediction_columns(ks) -> tuple:
    return PREDICTION_COLUMNS + tuple(f"top{k}" for k in ks)


def prediction_row(row: dict, ks) -> list:
    return [row["ego"], row["events_evaluated"], len(row["windows"])] + [row["accuracy"][f"top{k}"] for k in ks]


_number = {"type": "number"}
_nullable_number = {"type": ["number", "null"]}
_count = {"type": "integer", "minimum": 0}

_SEQUENCE_BLOCK = {
    "type": "object",
    "required": ["n", "K", "h_lz", "h_iid", "h_unif", "effective_choices", "h_cond"],
    "properties": {
        "n": _count,
        "K": _count,
        "h_lz": _number,
        "h_iid": {"type": "number", "minimum": 0},
        "h_unif": {"type": "number", "minimum": 0},
        "h_mc": {"type": "number", "minimum": 0},
        "effective_choices": {"type": "number", "exclusiveMinimum": 0},
        "h_cond": {"type": "object", "additionalProperties": _nullable_number},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["meta", "config", "individuals", "excluded"],
    "properties": {
        "meta": {
            "type": "object",
            "required": ["tool", "version", "command"],
            "properties": {"command": {"enum": ["analyze", "predict"]}},
        },
        "config": {
            "type": "object",
            "required": ["bin_width", "gap_cap", "min_sequence_length", "window", "ks", "seed"],
        },
        "individuals": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["ego"],
                "properties": {
                    "ego": {"type": "string"},
                    "partner": _SEQUENCE_BLOCK,
                    "location": _SEQUENCE_BLOCK,
                    "gap": _SEQUENCE_BLOCK,
                    "events_evaluated": _count,
                    "accuracy": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0, "maximum": 1}},
                    "windows": {"type": "array"},
                },
            },
        },
        "excluded": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["ego", "reason"],
                "properties": {"ego": {"type": "string"}, "reason": {"type": "string"}},
            },
        },
        "summary": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["count", "mean", "median"],
            },
        },
        "histograms": {
            "type": "object",
            "additionalProperties": {
                "type": "array",
                "items": {"type": "object", "required": ["start", "end", "count"]},
            },
        },
    },
}
