"""Seeded Monte Carlo word-error-rate estimation for the LP decoder.

Per-trial randomness derives from SeedSequence((master seed, trial index)),
so estimates are bit-identical for any worker count; the stopping rule is
evaluated on the index-ordered prefix of results.  Results append to a CSV
with a fixed schema; wall time is reported but kept out of the CSV.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bounds_mod
from .channels import ChannelModel, awgn, bsc, llr_vector
from .decoder import RalpDecoder
from .encoder import DegreeDistribution, GroupedInterleaver, encode
from .interleaver import (
    build_matching,
    girth as hypergraph_girth,
    interleaver_to_line,
    load_interleaver,
    matching_to_interleaver,
    random_interleaver,
)

RESULTS_HEADER = ("channel,param,q,k,n,girth,seed,trials,errors,wer,"
                  "ci_lo,ci_hi,bound_exact,bound_asymptotic")

_CHUNK = 256


class ConfigError(ValueError):
    pass


@dataclass
class SimConfig:
    channel_kind: str
    channel_param: float
    k: int
    degrees: tuple[int, ...]
    interleaver_path: str | None = None
    interleaver_policy: str | None = None
    interleaver_seed: int = 0
    trials: int = 1000
    min_errors: int | None = None
    seed: int = 0
    workers: int = 1
    random_codeword: bool = False
    integrality_tol: float = 1e-6
    feasibility_tol: float = 1e-9

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("sim.trials must be >= 1")
        if self.min_errors is not None and self.min_errors < 1:
            raise ConfigError("sim.min_errors must be >= 1")
        if self.workers < 1:
            raise ConfigError("sim.workers must be >= 1")

    @property
    def channel(self) -> ChannelModel:
        if self.channel_kind == "bsc":
            return bsc(self.channel_param)
        return awgn(self.channel_param)


_KEY_DOC = {
    "channel.kind": "bsc or awgn",
    "channel.p": "BSC crossover probability",
    "channel.sigma2": "AWGN noise variance",
    "code.k": "number of info bits",
    "code.q": "regular repetition degree",
    "code.degrees": "comma-separated repetition degrees (irregular)",
    "interleaver.path": "RA-IL v1 file to load",
    "interleaver.policy": "paper_greedy or random",
    "interleaver.seed": "seed for interleaver construction",
    "sim.trials": "maximum decode attempts",
    "sim.min_errors": "stop once this many errors are seen",
    "sim.seed": "64-bit master seed",
    "sim.workers": "worker processes",
    "sim.random_codeword": "true to transmit random codewords",
    "lp.integrality_tol": "flow integrality tolerance",
    "lp.feasibility_tol": "constraint feasibility tolerance",
}


def parse_config_text(text: str) -> SimConfig:
    """Parse 'section.key = value' lines; '#' starts a comment.

    Unknown keys are errors: physics parameters never default silently.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEY_DOC:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    def need(key):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
        return raw[key]

    def geti(key, default=None):
        if key not in raw:
            return default
        try:
            return int(raw[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: expected integer, got {raw[key]!r}")

    def getf(key, default=None):
        if key not in raw:
            return default
        try:
            return float(raw[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: expected number, got {raw[key]!r}")

    kind = need("channel.kind").lower()
    if kind == "bsc":
        if "channel.p" not in raw:
            raise ConfigError("missing required key 'channel.p'")
        if "channel.sigma2" in raw:
            raise ConfigError("key 'channel.sigma2' invalid for channel.kind = bsc")
        param = getf("channel.p")
    elif kind == "awgn":
        if "channel.sigma2" not in raw:
            raise ConfigError("missing required key 'channel.sigma2'")
        if "channel.p" in raw:
            raise ConfigError("key 'channel.p' invalid for channel.kind = awgn")
        param = getf("channel.sigma2")
    else:
        raise ConfigError(f"key 'channel.kind': unknown channel {kind!r}")

    k = geti("code.k")
    if k is None:
        raise ConfigError("missing required key 'code.k'")
    if "code.q" in raw and "code.degrees" in raw:
        raise ConfigError("give either 'code.q' or 'code.degrees', not both")
    if "code.q" in raw:
        degrees = (geti("code.q"),) * k
    elif "code.degrees" in raw:
        try:
            degrees = tuple(int(s) for s in raw["code.degrees"].split(","))
        except ValueError:
            raise ConfigError("key 'code.degrees': expected comma-separated integers")
        if len(degrees) != k:
            raise ConfigError(f"key 'code.degrees': expected {k} entries")
    else:
        raise ConfigError("missing required key 'code.q' (or 'code.degrees')")

    if "interleaver.path" in raw and "interleaver.policy" in raw:
        raise ConfigError("give either 'interleaver.path' or 'interleaver.policy'")
    if "interleaver.path" not in raw and "interleaver.policy" not in raw:
        raise ConfigError("missing required key 'interleaver.path' or 'interleaver.policy'")
    policy = raw.get("interleaver.policy")
    if policy is not None and policy not in ("paper_greedy", "random"):
        raise ConfigError(f"key 'interleaver.policy': unknown policy {policy!r}")

    random_cw = raw.get("sim.random_codeword", "false").lower()
    if random_cw not in ("true", "false"):
        raise ConfigError("key 'sim.random_codeword': expected true or false")

    if "sim.seed" not in raw:
        raise ConfigError("missing required key 'sim.seed'")
    if "sim.trials" not in raw:
        raise ConfigError("missing required key 'sim.trials'")

    try:
        cfg = SimConfig(
            channel_kind=kind,
            channel_param=param,
            k=k,
            degrees=degrees,
            interleaver_path=raw.get("interleaver.path"),
            interleaver_policy=policy,
            interleaver_seed=geti("interleaver.seed", 0),
            trials=geti("sim.trials"),
            min_errors=geti("sim.min_errors", None),
            seed=geti("sim.seed"),
            workers=geti("sim.workers", 1),
            random_codeword=random_cw == "true",
            integrality_tol=getf("lp.integrality_tol", 1e-6),
            feasibility_tol=getf("lp.feasibility_tol", 1e-9),
        )
        # channel parameter validated here
        cfg.channel
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc))
    return cfg


def parse_config(path) -> SimConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        return parse_config_text(fh.read())


def resolve_interleaver(cfg: SimConfig):
    """(GroupedInterleaver, girth) from a file or a construction policy."""
    dd = DegreeDistribution(cfg.degrees)
    if cfg.interleaver_path is not None:
        il, g = load_interleaver(cfg.interleaver_path)
        if il.degrees.degrees != dd.degrees:
            raise ConfigError("interleaver file does not match code.degrees")
        return il, g
    if cfg.interleaver_policy == "paper_greedy":
        if not dd.is_regular:
            raise ConfigError("paper_greedy interleavers require a regular code")
        graph, g = build_matching(dd.degrees[0], dd.k, policy="paper_greedy")
        return matching_to_interleaver(graph), g
    rng = np.random.default_rng(cfg.interleaver_seed)
    return random_interleaver(cfg.degrees, rng)


@dataclass(frozen=True)
class WerEstimate:
    trials_run: int
    errors: int
    solver_failures: int
    wer: float
    ci_lo: float
    ci_hi: float
    seed: int
    wall_time: float


def wilson_interval(errors: int, trials: int, z: float = 1.959963984540054):
    """95% Wilson score interval; always contains errors/trials."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    phat = errors / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials
                         + z * z / (4.0 * trials * trials)) / denom
    # clamp against roundoff so the interval always contains phat
    return max(min(center - half, phat), 0.0), min(max(center + half, phat), 1.0)


class _TrialContext:
    """Everything one trial needs, built once per process."""

    def __init__(self, cfg: SimConfig, il: GroupedInterleaver):
        self.cfg = cfg
        self.dd = DegreeDistribution(cfg.degrees)
        self.il = il
        self.channel = cfg.channel
        self.decoder = RalpDecoder(self.dd, il,
                                   integrality_tol=cfg.integrality_tol,
                                   feasibility_tol=cfg.feasibility_tol)

    def run(self, idx: int):
        cfg = self.cfg
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, idx)))
        if cfg.random_codeword:
            info = rng.integers(0, 2, self.dd.k).astype(np.int8)
            tx = encode(info, self.dd, self.il).transmitted()
        else:
            info = np.zeros(self.dd.k, dtype=np.int8)
            tx = np.zeros(self.dd.n + 1, dtype=np.int8)
        received = self.channel.sample(tx, rng)
        vec = llr_vector(self.channel, received)
        out = self.decoder.decode(vec)
        solver_fail = (out.solution is None
                       or out.solution.status not in ("optimal",))
        error = out.outcome != "codeword" or not np.array_equal(out.info, info)
        return error, solver_fail


_CTX: _TrialContext | None = None


def _eval_block(indices):
    return [_CTX.run(i) for i in indices]


def _split(indices, parts):
    size = math.ceil(len(indices) / parts)
    return [indices[i:i + size] for i in range(0, len(indices), size)]


def run_monte_carlo(cfg: SimConfig, il: GroupedInterleaver | None = None):
    """Estimate the word error rate; deterministic for fixed (config, seed).

    Returns (WerEstimate, interleaver, girth).  Transmits the all-zero
    codeword unless the config requests random codewords; solver failures
    count as errors and are also reported separately.
    """
    global _CTX
    t0 = time.perf_counter()
    if il is None:
        il, il_girth = resolve_interleaver(cfg)
    else:
        il_girth = hypergraph_girth(interleaver_to_line(il))
    _CTX = _TrialContext(cfg, il)
    min_errors = cfg.min_errors if cfg.min_errors is not None else cfg.trials + 1
    flags: list[tuple[bool, bool]] = []
    stop_at = cfg.trials
    pool = None
    try:
        if cfg.workers > 1:
            import multiprocessing as mp
            pool = ProcessPoolExecutor(max_workers=cfg.workers,
                                       mp_context=mp.get_context("fork"))
        done = 0
        scan_pos = 0
        errs_seen = 0
        while done < stop_at:
            chunk = list(range(done, min(done + _CHUNK, cfg.trials)))
            if pool is not None:
                blocks = _split(chunk, cfg.workers)
                results = []
                for block_result in pool.map(_eval_block, blocks):
                    results.extend(block_result)
            else:
                results = _eval_block(chunk)
            flags.extend(results)
            done += len(chunk)
            # stopping rule on the index-ordered prefix
            while scan_pos < len(flags):
                if flags[scan_pos][0]:
                    errs_seen += 1
                    if errs_seen >= min_errors:
                        stop_at = min(stop_at, scan_pos + 1)
                        break
                scan_pos += 1
            if done >= stop_at:
                break
    finally:
        if pool is not None:
            pool.shutdown()
        _CTX = None
    flags = flags[:stop_at]
    errors = sum(1 for err, _ in flags if err)
    fails = sum(1 for _, f in flags if f)
    trials_run = len(flags)
    lo, hi = wilson_interval(errors, trials_run)
    est = WerEstimate(trials_run=trials_run, errors=errors,
                      solver_failures=fails, wer=errors / trials_run,
                      ci_lo=lo, ci_hi=hi, seed=cfg.seed,
                      wall_time=time.perf_counter() - t0)
    return est, il, il_girth


def bound_pair(cfg: SimConfig, il_girth) -> tuple[float, float]:
    """(exact union bound, asymptotic-form value) for the CSV.

    The asymptotic column evaluates K (log_q n) n^e with e the bound chain's
    n-exponent implied by the channel parameter.  Bounds need even degrees
    and a large enough block; otherwise both columns are nan.
    """
    dd = DegreeDistribution(cfg.degrees)
    n = dd.n
    try:
        if dd.is_regular and dd.all_even:
            q = dd.degrees[0]
            if cfg.channel_kind == "bsc":
                rep = bounds_mod.bsc_bound(q, n, cfg.channel_param, 0.0)
            else:
                rep = bounds_mod.awgn_bound(q, n, cfg.channel_param, 0.0)
            logq_n = math.log(n) / math.log(q)
            asym = rep.constant * logq_n * n ** rep.n_power
            return rep.wep_exact, asym
        if dd.all_even and il_girth not in (None, math.inf):
            dist = cfg.channel.llr_distribution("rescaled")
            exact = bounds_mod.irregular_mbios_bound(
                dd.degrees, il_girth, n, dist)
            return exact, math.nan
    except ValueError:
        pass
    return math.nan, math.nan


def results_csv_line(cfg: SimConfig, il_girth, est: WerEstimate) -> str:
    dd = DegreeDistribution(cfg.degrees)
    exact, asym = bound_pair(cfg, il_girth)
    girth_field = il_girth if il_girth not in (None, math.inf) else -1
    fields = (cfg.channel_kind, cfg.channel_param, dd.q_max, dd.k, dd.n,
              girth_field, est.seed, est.trials_run, est.errors, est.wer,
              est.ci_lo, est.ci_hi, exact, asym)
    return ",".join(str(v) for v in fields)


def append_results(path, lines):
    """Append rows to a results CSV, writing the header only when new."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a") as fh:
        if fresh:
            fh.write(RESULTS_HEADER + "\n")
        for line in lines:
            fh.write(line + "\n")
