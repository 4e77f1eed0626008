"""Benchmark harness: phase timings and exact message sizes.

Four phases, each measured around encode + compute + decode so the numbers
describe what a deployment would actually pay per message:

  setup         server_setup + encode of the setup message
  request       client_create_request + encode
  response      decode(request) + server_process_request + encode
  intersection  decode(response) + client_process_response

Timings use the monotonic clock; the median of `repeats` full pipeline runs
is reported and every raw run is kept. Byte counts are the lengths of the
actually serialized messages, never estimates.

The sizes table compares, for one element count and a sweep of
false-positive rates, the serialized Bloom filter and Golomb-compressed set
against naively shipping 8-byte integers per element.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field

from .bloom import BloomFilter
from .errors import InvalidParameters
from .gcs import GolombCompressedSet
from .protocol import client_create_request, client_process_response, server_process_request, server_setup
from .wire import decode_message, encode_message

PHASES = ("setup", "request", "response", "intersection")

# Refuse runs whose encrypted working set alone would dwarf typical desk RAM.
MEMORY_BUDGET_BYTES = 1 << 31


@dataclass
class BenchConfig:
    n_server: int
    n_client: int
    total_fp: float = 1e-9
    ds_type: str = "bloom"
    reveal: bool = True
    repeats: int = 3
    overlap: float = 0.5
    seed: int = 1
    extrapolate_from: int | None = None

    def __post_init__(self):
        if self.n_server < 0 or self.n_client < 0:
            raise InvalidParameters("element counts must be non-negative")
        if not 0.0 <= self.overlap <= 1.0:
            raise InvalidParameters("overlap must be in [0, 1]")
        if self.repeats < 1:
            raise InvalidParameters("repeats must be >= 1")


@dataclass
class BenchReport:
    config: BenchConfig
    runs: dict[str, list[float]] = field(default_factory=dict)
    sizes: dict[str, int] = field(default_factory=dict)
    cardinality: int = 0
    extrapolated: bool = False
    timed_n_server: int = 0

    def median(self, phase: str) -> float:
        return statistics.median(self.runs[phase])

    def table(self) -> str:
        mark = "*" if self.extrapolated else ""
        lines = [
            "parameters: N=%d%s n=%d p=%g ds=%s reveal=%s"
            % (self.config.n_server, mark, self.config.n_client, self.config.total_fp,
               self.config.ds_type, self.config.reveal),
        ]
        if self.extrapolated:
            lines.append(
                "*setup timed at N=%d and scaled linearly to N=%d; sizes are exact"
                % (self.timed_n_server, self.config.n_server))
        lines.append("%-14s %12s %14s" % ("phase", "median (s)", "message bytes"))
        size_for = {"setup": "setup", "request": "request", "response": "response"}
        for phase in PHASES:
            size = size_for.get(phase)
            lines.append("%-14s %12.4f %14s"
                         % (phase + ("*" if phase == "setup" and self.extrapolated else ""),
                            self.median(phase),
                            self.sizes[size] if size else "-"))
        lines.append("intersection cardinality: %d" % self.cardinality)
        return "\n".join(lines)

    def machine_lines(self) -> list[str]:
        out = []
        for phase in PHASES:
            out.append(
                "BENCH phase=%s n_server=%d n_client=%d fpr=%g ds=%s reveal=%d "
                "median_s=%.6f runs_s=%s extrapolated=%d"
                % (phase, self.config.n_server, self.config.n_client,
                   self.config.total_fp, self.config.ds_type, int(self.config.reveal),
                   self.median(phase),
                   ",".join("%.6f" % t for t in self.runs[phase]),
                   int(self.extrapolated and phase == "setup")))
        for name, size in self.sizes.items():
            out.append("BENCH size_%s_bytes=%d" % (name, size))
        return out


def make_corpus(n_server: int, n_client: int, overlap: float, seed: int):
    """Disjoint random 16-byte ids with a controlled overlap fraction."""
    rng = random.Random(seed)
    n_common = min(n_server, round(n_client * overlap))
    server = [rng.randbytes(16) for _ in range(n_server)]
    client = rng.sample(server, n_common) if n_common else []
    client += [rng.randbytes(16) for _ in range(n_client - n_common)]
    rng.shuffle(client)
    return server, client


def run_bench(cfg: BenchConfig) -> BenchReport:
    if cfg.n_server * 33 > MEMORY_BUDGET_BYTES:
        raise InvalidParameters(
            "N=%d implies a %d-byte encrypted working set; pass a smaller N or "
            "use extrapolate_from" % (cfg.n_server, cfg.n_server * 33))
    timed_n = cfg.extrapolate_from or cfg.n_server
    if timed_n > cfg.n_server:
        raise InvalidParameters("extrapolate_from must not exceed n_server")
    scale = cfg.n_server / timed_n if timed_n else 1.0

    server_ids, client_ids = make_corpus(timed_n, cfg.n_client, cfg.overlap, cfg.seed)
    report = BenchReport(cfg, {p: [] for p in PHASES},
                         extrapolated=timed_n != cfg.n_server, timed_n_server=timed_n)

    for _ in range(cfg.repeats):
        t0 = time.perf_counter()
        state, setup_msg = server_setup(server_ids, cfg.n_client or 1, cfg.total_fp, cfg.ds_type)
        setup_bytes = encode_message(setup_msg)
        report.runs["setup"].append((time.perf_counter() - t0) * scale)

        t0 = time.perf_counter()
        cstate, request_msg = client_create_request(client_ids, cfg.reveal)
        request_bytes = encode_message(request_msg)
        report.runs["request"].append(time.perf_counter() - t0)

        t0 = time.perf_counter()
        response_msg = server_process_request(state, decode_message(request_bytes))
        response_bytes = encode_message(response_msg)
        report.runs["response"].append(time.perf_counter() - t0)

        t0 = time.perf_counter()
        result = client_process_response(cstate, decode_message(setup_bytes), decode_message(response_bytes))
        report.runs["intersection"].append(time.perf_counter() - t0)
        report.cardinality = result.cardinality

    if report.extrapolated:
        # Exact setup size at the full N: rebuild the structure from synthetic
        # encrypted encodings (content-independent size for bloom, hash-uniform
        # for gcs), no curve work needed.
        rng = random.Random(cfg.seed + 1)
        fake = [rng.randbytes(33) for _ in range(cfg.n_server)]
        if cfg.ds_type == "bloom":
            full = BloomFilter.create(max(1, cfg.n_server), cfg.n_client or 1, cfg.total_fp)
            for e in fake:
                full.insert(e)
        else:
            full = GolombCompressedSet.build(fake, cfg.n_client or 1, cfg.total_fp)
        report.sizes["setup"] = 6 + len(full.serialize())
    else:
        report.sizes["setup"] = len(setup_bytes)
    report.sizes["request"] = len(request_bytes)
    report.sizes["response"] = len(response_bytes)
    return report


def table_sizes(n_elements: int = 10_000,
                fprs: tuple[float, ...] = (1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12),
                seed: int = 1) -> list[dict]:
    """Serialized structure sizes versus naive 64-bit storage, per FP rate."""
    rng = random.Random(seed)
    elements = [rng.randbytes(33) for _ in range(n_elements)]
    rows = []
    for fpr in fprs:
        bf = BloomFilter.create(max(1, n_elements), 1, fpr)
        for e in elements:
            bf.insert(e)
        g = GolombCompressedSet.build(elements, 1, fpr)
        rows.append({
            "fpr": fpr,
            "naive_bytes": 8 * n_elements,
            "bloom_bytes": len(bf.serialize()),
            "gcs_bytes": len(g.serialize()),
        })
    return rows


def sizes_table_text(rows: list[dict]) -> str:
    lines = ["%-10s %14s %14s %14s" % ("FPR", "naive", "bloom filter", "gcs")]
    for r in rows:
        lines.append("%-10g %13dB %13dB %13dB"
                     % (r["fpr"], r["naive_bytes"], r["bloom_bytes"], r["gcs_bytes"]))
    return "\n".join(lines)


def sizes_machine_lines(rows: list[dict]) -> list[str]:
    return [
        "SIZES fpr=%g naive_bytes=%d bloom_bytes=%d gcs_bytes=%d"
        % (r["fpr"], r["naive_bytes"], r["bloom_bytes"], r["gcs_bytes"])
        for r in rows
    ]
