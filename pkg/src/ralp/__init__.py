"""Repeat-accumulate codes: LP decoding, high-girth interleavers, analytic
error bounds, and seeded Monte Carlo simulation."""

from .channels import ChannelModel, LlrDistribution, LlrVector, awgn, bsc, llr_vector
from .encoder import Codeword, DegreeDistribution, GroupedInterleaver, accumulate, encode
from .interleaver import (
    HyperGraphLine,
    build_matching,
    girth,
    load_interleaver,
    matching_to_interleaver,
    random_interleaver,
    restricted_distance_ball,
    save_interleaver,
)
from .auxgraph import (
    AuxGraph,
    Hyperpromenade,
    Witness,
    build_aux_graph,
    build_hyperpromenade_graph,
    extract_witness,
    min_cost_simple_window,
    validate_hyperpromenade,
)
from .decoder import (
    DecodeResult,
    RalpDecoder,
    Trellis,
    assemble_ralp,
    brute_force_ml,
    build_trellis,
    decode,
    solve_lp,
)
from .bounds import (
    BoundReport,
    awgn_bound,
    awgn_threshold_sigma2,
    bsc_bound,
    bsc_threshold,
    irregular_mbios_bound,
    mbios_bound,
)
from .simulate import SimConfig, WerEstimate, parse_config, run_monte_carlo

__version__ = "0.1.0"

__all__ = [
    "ChannelModel", "LlrDistribution", "LlrVector", "awgn", "bsc", "llr_vector",
    "Codeword", "DegreeDistribution", "GroupedInterleaver", "accumulate", "encode",
    "HyperGraphLine", "build_matching", "girth", "load_interleaver",
    "matching_to_interleaver", "random_interleaver", "restricted_distance_ball",
    "save_interleaver",
    "AuxGraph", "Hyperpromenade", "Witness", "build_aux_graph",
    "build_hyperpromenade_graph", "extract_witness", "min_cost_simple_window",
    "validate_hyperpromenade",
    "DecodeResult", "RalpDecoder", "Trellis", "assemble_ralp", "brute_force_ml",
    "build_trellis", "decode", "solve_lp",
    "BoundReport", "awgn_bound", "awgn_threshold_sigma2", "bsc_bound",
    "bsc_threshold", "irregular_mbios_bound", "mbios_bound",
    "SimConfig", "WerEstimate", "parse_config", "run_monte_carlo",
]
