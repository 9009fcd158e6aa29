import math
from fractions import Fraction

import numpy as np
import pytest

from ralp.channels import LlrVector, awgn, bsc
from ralp.decoder import (
    RalpDecoder,
    assemble_ralp,
    brute_force_ml,
    build_trellis,
    codeword_flow,
    decode,
    solve_lp,
    trellis_path_cost,
)
from ralp.encoder import DegreeDistribution, GroupedInterleaver, encode


def small_code(q=2, k=2):
    dd = DegreeDistribution.regular(q, k)
    return dd, GroupedInterleaver.consecutive(dd)


def test_trellis_structure_n4():
    dd, _ = small_code(2, 2)
    tr = build_trellis(dd)
    assert tr.num_edges == 16
    seg1 = [e for e in tr.edges if e.segment == 1]
    assert len(seg1) == 2 and all(e.tail == 0 for e in seg1)
    term = [e for e in tr.edges if e.segment == 5]
    assert len(term) == 2 and all(e.head == 0 and e.output == 0 for e in term)
    inner = [e for e in tr.edges if 2 <= e.segment <= 4]
    assert len(inner) == 12
    for e in tr.edges:
        assert e.input == (e.tail ^ e.head) or e.segment == tr.n + 1
        if e.segment <= tr.n:
            assert e.output == e.head
    # input-1 pairs: one edge in segment 1, two in the rest
    assert len(tr.input1_pairs[0]) == 1
    assert all(len(p) == 2 for p in tr.input1_pairs[1:])


def test_zero_path_exists():
    dd, _ = small_code(2, 3)
    tr = build_trellis(dd)
    zero_edges = [e for e in tr.edges if e.tail == 0 and e.head == 0]
    assert len(zero_edges) == tr.n + 1  # one per segment incl. termination


def test_ralp_dimensions():
    dd, il = small_code(2, 2)
    tr = build_trellis(dd)
    lp = assemble_ralp(tr, LlrVector(np.ones(4)), il)
    assert lp.c.shape == (16 + 2,)
    assert lp.A.shape == (1 + 8 + 4, 18)
    assert set(np.unique(lp.A)) <= {-1.0, 0.0, 1.0}


def test_every_codeword_is_feasible_flow():
    dd, il = small_code(2, 3)
    tr = build_trellis(dd)
    lp = assemble_ralp(tr, LlrVector(np.ones(dd.n)), il)
    for w in range(2 ** dd.k):
        info = [(w >> (dd.k - 1 - t)) & 1 for t in range(dd.k)]
        cw = encode(info, dd, il)
        f = codeword_flow(tr, cw, dd.k)
        x = np.array(info, dtype=float)
        v = np.concatenate([f, x])
        assert np.max(np.abs(lp.A @ v - lp.b)) < 1e-12


def test_all_zero_favoring_llrs_decode_to_zero():
    dd, il = small_code(2, 2)
    tr = build_trellis(dd)
    lp = assemble_ralp(tr, LlrVector(np.ones(dd.n)), il)
    sol = solve_lp(lp)
    assert sol.status == "optimal" and sol.integral
    assert sol.objective == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(sol.x, 0.0)


def test_decode_noiseless_roundtrip():
    dd, il = small_code(4, 3)
    dec = RalpDecoder(dd, il)
    ch = bsc(0.05)
    rng = np.random.default_rng(0)
    for _ in range(8):
        info = rng.integers(0, 2, dd.k)
        cw = encode(info, dd, il)
        vec = LlrVector(ch.llr(cw.transmitted()))  # no channel noise
        out = dec.decode(vec)
        assert out.outcome == "codeword"
        assert out.certificate
        assert np.array_equal(out.info, info)


def test_brute_force_tiny_cases():
    dd, il = small_code(2, 1)
    info, cost = brute_force_ml(LlrVector(np.array([-1.0, -1.0, 1.0])), dd, il)
    # codeword for info=1 is bits 10 -> cost gamma_1 = -1; info=0 costs 0
    assert info.tolist() == [1] and cost == -1.0
    info0, cost0 = brute_force_ml(LlrVector(np.ones(3)), dd, il)
    assert info0.tolist() == [0] and cost0 == 0.0


def test_brute_force_guard():
    dd = DegreeDistribution.regular(2, 21)
    il = GroupedInterleaver.consecutive(dd)
    with pytest.raises(ValueError):
        brute_force_ml(LlrVector(np.ones(dd.n)), dd, il)


def test_brute_force_matches_trellis_walk():
    rng = np.random.default_rng(1)
    dd, il = small_code(3, 4)
    tr = build_trellis(dd)
    vals = rng.normal(size=dd.n)
    vec = LlrVector(vals)
    _, best = brute_force_ml(vec, dd, il)
    walked = []
    for w in range(2 ** dd.k):
        info = [(w >> (dd.k - 1 - t)) & 1 for t in range(dd.k)]
        cw = encode(info, dd, il)
        walked.append(trellis_path_cost(tr, cw, vals))
    assert min(walked) == pytest.approx(best, rel=1e-12)


def test_lp_lower_bounds_ml():
    # relaxation property over random noisy instances
    rng = np.random.default_rng(7)
    dd, il = small_code(4, 4)
    dec = RalpDecoder(dd, il)
    ch = bsc(0.2)
    for _ in range(100):
        received = ch.sample(np.zeros(dd.n + 1, dtype=np.int8), rng)
        vec = LlrVector(ch.llr(received))
        out = dec.decode(vec)
        _, ml_cost = brute_force_ml(vec, dd, il)
        if out.solution and out.solution.status == "optimal":
            assert out.solution.objective <= ml_cost + 1e-9


def test_ml_certificate_exact_rational():
    # integral outputs match brute force exactly (costs are +-1 integers)
    rng = np.random.default_rng(21)
    dd, il = small_code(4, 4)
    dec = RalpDecoder(dd, il)
    ch = bsc(0.1)
    integral_seen = 0
    for _ in range(200):
        received = ch.sample(np.zeros(dd.n + 1, dtype=np.int8), rng)
        vec = LlrVector(ch.llr(received))
        out = dec.decode(vec)
        if out.outcome != "codeword":
            continue
        integral_seen += 1
        _, ml_cost = brute_force_ml(vec, dd, il)
        cw = encode(out.info, dd, il)
        exact = sum(Fraction(int(b)) * Fraction(int(v))
                    for b, v in zip(cw.bits, vec.values[:dd.n].astype(int)))
        assert exact == Fraction(int(round(ml_cost)))
    assert integral_seen > 100


def test_fractional_instance_decodes_to_error():
    # regression fixture: found by random search over BSC noise at k=4
    dd, il = small_code(4, 4)
    dec = RalpDecoder(dd, il)
    vals = np.ones(dd.n)
    for i in FRACTIONAL_FLIPS:
        vals[i] = -1.0
    out = dec.decode(LlrVector(vals))
    assert out.outcome == "error"
    assert out.solution is not None and not out.solution.integral
    assert out.solution.objective < brute_force_ml(LlrVector(vals), dd, il)[1]


# flip pattern (0-based llr indices) with a fractional optimum: LP objective
# -1 beats the ML cost 0 via a half-integral flow
FRACTIONAL_FLIPS = [0, 1]


def test_decoder_matches_one_shot_decode():
    dd, il = small_code(2, 3)
    vals = np.array([1.0, -1.0, 1.0, 1.0, -1.0, 1.0])
    a = decode(LlrVector(vals), dd, il)
    b = RalpDecoder(dd, il).decode(LlrVector(vals))
    assert a.outcome == b.outcome
    if a.outcome == "codeword":
        assert np.array_equal(a.info, b.info)


def test_decoder_reuse_is_stateless():
    # solving a noisy instance then a clean one gives the same result as a
    # fresh decoder (tableau restoration)
    rng = np.random.default_rng(5)
    dd, il = small_code(4, 4)
    dec = RalpDecoder(dd, il)
    ch = bsc(0.3)
    vecs = [LlrVector(ch.llr(ch.sample(np.zeros(dd.n, dtype=np.int8), rng)))
            for _ in range(20)]
    outs1 = [dec.decode(v) for v in vecs]
    outs2 = [RalpDecoder(dd, il).decode(v) for v in vecs]
    for a, b in zip(outs1, outs2):
        assert a.outcome == b.outcome
        assert a.objective == pytest.approx(b.objective, abs=1e-9)


def test_agreeability_constraint_counts():
    dd = DegreeDistribution((2, 4))
    il = GroupedInterleaver.consecutive(dd)
    tr = build_trellis(dd)
    lp = assemble_ralp(tr, LlrVector(np.ones(dd.n)), il)
    n = dd.n
    assert lp.A.shape[0] == 1 + 2 * n + n  # source + conservation + agreeability
