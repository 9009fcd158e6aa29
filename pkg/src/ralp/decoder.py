"""LP decoding of repeat-accumulate codes on the accumulator trellis.

The trellis has one segment per code bit plus a termination segment pinned to
the zero state.  Decoding minimizes the LLR cost of a unit flow through the
trellis subject to flow conservation and agreeability: the input-1 flow must
be identical across all positions of each interleaver group.  An integral
optimum is the ML codeword; a fractional optimum decodes as "error".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import LlrVector
from .encoder import Codeword, DegreeDistribution, GroupedInterleaver
from .simplex import SimplexError, Tableau, solve_bounded_lp

INTEGRALITY_TOL = 1e-6
FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class TrellisEdge:
    index: int
    segment: int      # 1..n+1 (n+1 is the termination segment)
    tail: int         # state bit entering the segment
    head: int         # state bit after the transition
    input: int        # tail ^ head
    output: int       # head (termination outputs 0)


@dataclass(frozen=True)
class Trellis:
    n: int
    edges: tuple[TrellisEdge, ...]
    input1_pairs: tuple[tuple[int, ...], ...]  # I_i edge ids, i = 1..n

    @property
    def num_edges(self) -> int:
        return len(self.edges)


def build_trellis(dd: DegreeDistribution) -> Trellis:
    """Accumulator trellis with termination: 2 + 4(n-1) + 2 edges.

    Segment 1 starts from the pinned zero state; inner segments carry all
    four transitions; the termination segment forces the zero state and its
    output bit is always 0.
    """
    n = dd.n
    edges = []
    for seg in range(1, n + 1):
        tails = (0,) if seg == 1 else (0, 1)
        for tail in tails:
            for head in (0, 1):
                edges.append(TrellisEdge(
                    index=len(edges), segment=seg, tail=tail, head=head,
                    input=tail ^ head, output=head))
    for tail in (0, 1):
        edges.append(TrellisEdge(
            index=len(edges), segment=n + 1, tail=tail, head=0,
            input=tail, output=0))
    pairs = []
    for seg in range(1, n + 1):
        pairs.append(tuple(e.index for e in edges
                           if e.segment == seg and e.input == 1))
    return Trellis(n=n, edges=tuple(edges), input1_pairs=tuple(pairs))


@dataclass(eq=False)
class LinearProgram:
    """min c @ v over A v = b, 0 <= v <= 1; v = edge flows then info values."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    num_edges: int
    k: int

    @property
    def ub(self) -> np.ndarray:
        return np.ones(len(self.c))


@dataclass(frozen=True)
class LpSolution:
    status: str
    f: np.ndarray | None
    x: np.ndarray | None
    objective: float
    integral: bool


@dataclass(frozen=True)
class DecodeResult:
    outcome: str                      # "codeword" | "error"
    info: np.ndarray | None
    certificate: bool                 # True iff outcome == "codeword"
    objective: float
    solution: LpSolution | None = None


def _constraint_matrix(trellis: Trellis, il: GroupedInterleaver):
    """Rows: unit source flow, conservation at every interior node,
    one agreeability row per (group, member position)."""
    n = trellis.n
    ne = trellis.num_edges
    k = il.k
    rows = 1 + 2 * n + n
    A = np.zeros((rows, ne + k))
    b = np.zeros(rows)
    # unit flow out of the starting zero state
    for e in trellis.edges:
        if e.segment == 1:
            A[0, e.index] = 1.0
    b[0] = 1.0
    # conservation at node (i, bit): out(segment i+1 with tail=bit)
    # minus in(segment i with head=bit)
    row = 1
    node_row = {}
    for i in range(1, n + 1):
        for bit in (0, 1):
            node_row[(i, bit)] = row
            row += 1
    for e in trellis.edges:
        if e.segment <= n:
            A[node_row[(e.segment, e.head)], e.index] -= 1.0
        if e.segment >= 2:
            A[node_row[(e.segment - 1, e.tail)], e.index] += 1.0
    # agreeability: x_t - sum of input-1 flow at layer i = 0 for i in X_t
    for t, grp in enumerate(il.groups):
        for i in grp:
            A[row, ne + t] = 1.0
            for eid in trellis.input1_pairs[i - 1]:
                A[row, eid] = -1.0
            row += 1
    return A, b


def _objective(trellis: Trellis, llr_values: np.ndarray, k: int) -> np.ndarray:
    """gamma_i on the output-1 edges of segment i; termination costs nothing.

    Attaching the cost to output-1 edges makes the minimum-cost agreeable
    flow the ML codeword; a constant per-segment cost cannot move the argmin.
    """
    n = trellis.n
    c = np.zeros(trellis.num_edges + k)
    for e in trellis.edges:
        if e.segment <= n and e.output == 1:
            c[e.index] = llr_values[e.segment - 1]
    return c


def assemble_ralp(trellis: Trellis, llrs: LlrVector,
                  il: GroupedInterleaver) -> LinearProgram:
    n = trellis.n
    if il.n != n:
        raise ValueError(f"interleaver covers {il.n} positions, trellis has {n}")
    if len(llrs.values) not in (n, n + 1):
        raise ValueError(f"need {n} or {n + 1} LLRs, got {len(llrs.values)}")
    A, b = _constraint_matrix(trellis, il)
    c = _objective(trellis, llrs.values, il.k)
    return LinearProgram(c=c, A=A, b=b, num_edges=trellis.num_edges, k=il.k)


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Optimal vertex via the two-phase bounded simplex."""
    res = solve_bounded_lp(lp.c, lp.A, lp.b, lp.ub)
    if res.status != "optimal":
        return LpSolution(res.status, None, None, math.nan, False)
    f = res.x[:lp.num_edges]
    x = res.x[lp.num_edges:]
    integral = bool(np.all(np.minimum(f, 1.0 - f) <= INTEGRALITY_TOL))
    return LpSolution("optimal", f, x, res.objective, integral)


class RalpDecoder:
    """Reusable decoder for one (degree distribution, interleaver) pair.

    Builds the trellis and constraint tableau once.  Solves start from the
    basis that is optimal for the all-zero-favoring cost vector (the all-zero
    path), which is feasible for every cost vector since the constraints
    never change; the tableau is restored after any solve that pivoted, so
    results are independent of call order.
    """

    def __init__(self, dd: DegreeDistribution, il: GroupedInterleaver,
                 integrality_tol: float = INTEGRALITY_TOL,
                 feasibility_tol: float = FEASIBILITY_TOL):
        if il.degrees.degrees != dd.degrees:
            raise ValueError("interleaver does not match the degree distribution")
        self.dd = dd
        self.il = il
        self.integrality_tol = float(integrality_tol)
        self.feasibility_tol = float(feasibility_tol)
        self.trellis = build_trellis(dd)
        self.A, self.b = _constraint_matrix(self.trellis, il)
        self.num_edges = self.trellis.num_edges
        ub = np.ones(self.A.shape[1])
        zero_path = [e.index for e in self.trellis.edges
                     if e.tail == 0 and e.head == 0]
        self._tab = Tableau.from_point(self.A, self.b, ub, zero_path)
        ref_cost = _objective(self.trellis, np.ones(dd.n), il.k)
        self._tab.run(ref_cost)
        self._snap = self._tab.snapshot()
        self._dirty = False

    def _solve(self, c: np.ndarray):
        if self._dirty:
            self._tab.restore(self._snap)
            self._dirty = False
        before = self._tab.iterations
        status = self._tab.run(c)
        if self._tab.iterations - before > 1:
            self._dirty = True
        return status

    def decode(self, llrs: LlrVector) -> DecodeResult:
        """Solve the decoding LP; integral optimum -> info word, else error."""
        n = self.dd.n
        vals = llrs.values
        if len(vals) not in (n, n + 1):
            raise ValueError(f"need {n} or {n + 1} LLRs, got {len(vals)}")
        c = _objective(self.trellis, vals, self.il.k)
        status = self._solve(c)
        if status != "optimal":
            sol = LpSolution(status, None, None, math.nan, False)
            return DecodeResult("error", None, False, math.nan, sol)
        v = self._tab.solution()
        f = v[:self.num_edges]
        x = v[self.num_edges:]
        objective = float(c @ v)
        resid = float(np.max(np.abs(self.A @ v - self.b)))
        if resid > self.feasibility_tol:
            raise SimplexError(f"solution violates constraints by {resid}")
        integral = bool(np.all(np.minimum(f, 1.0 - f) <= self.integrality_tol))
        sol = LpSolution("optimal", f, x, objective, integral)
        if not integral:
            return DecodeResult("error", None, False, objective, sol)
        info = np.zeros(self.il.k, dtype=np.int8)
        for t, grp in enumerate(self.il.groups):
            flows = [sum(f[eid] for eid in self.trellis.input1_pairs[i - 1])
                     for i in grp]
            if max(flows) - min(flows) > self.integrality_tol:
                raise SimplexError(f"inconsistent group flow for bit {t}: {flows}")
            info[t] = int(round(flows[0]))
        return DecodeResult("codeword", info, True, objective, sol)


def decode(llrs: LlrVector, dd: DegreeDistribution,
           il: GroupedInterleaver) -> DecodeResult:
    """One-shot decode; build a RalpDecoder for repeated use."""
    return RalpDecoder(dd, il).decode(llrs)


def brute_force_ml(llrs: LlrVector, dd: DegreeDistribution,
                   il: GroupedInterleaver, guard: int = 20):
    """Exhaustive ML: argmin over all 2^k codewords of the output-1 LLR sum.

    Ties break lexicographically on the info bits.  Returns (info, cost).
    """
    k = dd.k
    if k > guard:
        raise ValueError(f"k={k} beyond brute-force guard {guard}")
    n = dd.n
    vals = np.asarray(llrs.values[:n], dtype=float)
    # stream indicator per info bit, vectorized over all words
    pos_of = np.zeros(n, dtype=int)
    for t, grp in enumerate(il.groups):
        for i in grp:
            pos_of[i - 1] = t
    words = np.arange(2 ** k, dtype=np.int64)
    # info bit t of word w (t=0 most significant: lexicographic order)
    info_bits = (words[:, None] >> (k - 1 - np.arange(k))) & 1
    streams = info_bits[:, pos_of]
    bits = np.bitwise_and(np.cumsum(streams, axis=1), 1)
    costs = bits @ vals
    best = int(np.argmin(costs))  # first minimum = lexicographically least
    return info_bits[best].astype(np.int8), float(costs[best])


def trellis_path_cost(trellis: Trellis, codeword: Codeword,
                      llr_values: np.ndarray) -> float:
    """Walk the codeword's trellis path and add up the edge costs.

    Independent of the formula sum(gamma_i * bit_i); used to cross-check the
    trellis structure against the encoder.
    """
    c = _objective(trellis, np.asarray(llr_values, dtype=float), 0)
    inputs = np.zeros(trellis.n, dtype=np.int8)
    # reconstruct accumulator inputs from outputs
    prev = 0
    for i, out in enumerate(codeword.bits):
        inputs[i] = prev ^ out
        prev = out
    by_key = {(e.segment, e.tail, e.input): e for e in trellis.edges}
    state = 0
    total = 0.0
    for seg in range(1, trellis.n + 1):
        e = by_key[(seg, state, int(inputs[seg - 1]))]
        if e.output != codeword.bits[seg - 1]:
            raise AssertionError("trellis walk disagrees with codeword bits")
        total += c[e.index]
        state = e.head
    e = by_key[(trellis.n + 1, state, state)]
    total += c[e.index]
    if e.head != 0:
        raise AssertionError("termination did not reach the zero state")
    return total


def codeword_flow(trellis: Trellis, codeword: Codeword, k: int):
    """Unit flow (f, x) of a codeword; feasible for the decoding LP."""
    f = np.zeros(trellis.num_edges)
    by_key = {(e.segment, e.tail, e.input): e for e in trellis.edges}
    state = 0
    inputs = []
    prev = 0
    for out in codeword.bits:
        inputs.append(prev ^ out)
        prev = out
    for seg in range(1, trellis.n + 1):
        e = by_key[(seg, state, inputs[seg - 1])]
        f[e.index] = 1.0
        state = e.head
    f[by_key[(trellis.n + 1, state, state)].index] = 1.0
    return f
