"""Exact analysis and Monte-Carlo simulation of systematic vs non-systematic
relaying in a network-coded erasure relay channel."""

from relaycode._core import (
    Decoder,
    GaloisField,
    NeverCompletesError,
    Packet,
    analyze,
    completion_times,
    decoding_cost,
    encode,
    expected_uncoded_gain,
    first_stage_distribution,
    measure_uncoded_gap,
    run_batch,
    t_non_sys,
    t_sys,
)

__all__ = [
    "Decoder",
    "GaloisField",
    "NeverCompletesError",
    "Packet",
    "analyze",
    "completion_times",
    "decoding_cost",
    "encode",
    "expected_uncoded_gain",
    "first_stage_distribution",
    "measure_uncoded_gap",
    "run_batch",
    "t_non_sys",
    "t_sys",
]
