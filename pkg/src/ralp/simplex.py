"""Primal simplex for equality-constrained LPs with box-bounded variables.

minimize c @ x   s.t.   A @ x = b,   0 <= x <= ub   (ub entries may be inf)

Dense tableau implementation sized for decoding LPs (a few thousand
variables).  Deterministic: Dantzig pricing with lowest-index tie breaks,
switching permanently to Bland's rule once a degenerate-pivot budget
(10 * number of variables) is spent.  Nonbasic variables sit at either
bound, so the unit box needs no extra rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NB_LB, NB_UB, BASIC = 0, 1, 2

_PIVOT_TOL = 1e-9
_COST_TOL = 1e-9
_DEGEN_TOL = 1e-11


class SimplexError(RuntimeError):
    pass


@dataclass
class SimplexResult:
    status: str            # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float
    iterations: int


class Tableau:
    """Simplex state: T = B^-1 A for every column, basic values, var states."""

    def __init__(self, A: np.ndarray, b: np.ndarray, ub: np.ndarray):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        self.m, self.nv = A.shape
        if b.shape != (self.m,):
            raise ValueError("b shape mismatch")
        self.A = A
        self.b = b
        self.ub = np.asarray(ub, dtype=float)
        if self.ub.shape != (self.nv,):
            raise ValueError("ub shape mismatch")
        self.T = A.copy()
        self.xb = b.copy()
        self.basis = np.full(self.m, -1, dtype=int)
        self.state = np.full(self.nv, NB_LB, dtype=np.int8)
        self.degenerate_pivots = 0
        self.bland = False
        self.iterations = 0

    # -- construction helpers --------------------------------------------

    @classmethod
    def from_artificials(cls, A, b, ub):
        """Start from the identity basis of artificial columns (phase 1)."""
        A = np.asarray(A, dtype=float).copy()
        b = np.asarray(b, dtype=float).copy()
        neg = b < 0
        A[neg] *= -1.0
        b[neg] *= -1.0
        m, nv = A.shape
        full_A = np.hstack([A, np.eye(m)])
        full_ub = np.concatenate([np.asarray(ub, dtype=float),
                                  np.full(m, math.inf)])
        tab = cls(full_A, b, full_ub)
        tab.n_struct = nv
        tab.basis = np.arange(nv, nv + m)
        tab.state[nv:] = BASIC
        tab.xb = b.copy()
        return tab

    @classmethod
    def from_point(cls, A, b, ub, at_upper):
        """Start from a known feasible point with all variables at bounds.

        ``at_upper`` lists variables sitting at their (finite) upper bound;
        everything else sits at 0, and A @ point must equal b exactly.  The
        artificial identity basis then carries all-zero values, so no phase-1
        iterations are needed; artificials are driven out by zero-step pivots.
        """
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        ub_arr = np.asarray(ub, dtype=float)
        point = np.zeros(A.shape[1])
        point[list(at_upper)] = ub_arr[list(at_upper)]
        resid = b - A @ point
        if np.max(np.abs(resid)) > 1e-9:
            raise SimplexError("provided point does not satisfy A x = b")
        tab = cls.from_artificials(A, b, ub)
        tab.state[list(at_upper)] = NB_UB
        tab.xb = tab.b - tab.A[:, :tab.n_struct] @ point
        tab.drive_out_artificials()
        return tab

    # -- core pivoting ----------------------------------------------------

    def _pivot(self, row: int, col: int, t: float, direction: int,
               entering_value: float, leaving_state: int):
        leave = self.basis[row]
        if leave >= 0:
            self.state[leave] = leaving_state
        if abs(t) > _DEGEN_TOL:
            self.xb -= direction * t * self.T[:, col]
        self.basis[row] = col
        self.state[col] = BASIC
        self.xb[row] = entering_value
        piv = self.T[row, col]
        self.T[row] /= piv
        colvals = self.T[:, col].copy()
        colvals[row] = 0.0
        self.T -= np.outer(colvals, self.T[row])
        # keep the entering column numerically exact
        self.T[:, col] = 0.0
        self.T[row, col] = 1.0

    def _flip(self, col: int):
        u = self.ub[col]
        if self.state[col] == NB_LB:
            self.xb -= u * self.T[:, col]
            self.state[col] = NB_UB
        else:
            self.xb += u * self.T[:, col]
            self.state[col] = NB_LB

    def _ratio_test(self, col: int, direction: int):
        """Blocking constraint for the entering column moving by t >= 0.

        Basic values move by -t * direction * T[:, col].  Returns
        (t, row, leaving_state); row = -1 means a bound flip of the entering
        variable, row = -2 means the step is unbounded.  Ties between rows
        break to the lowest basic-variable index (Bland-compatible and
        deterministic).
        """
        beta = direction * self.T[:, col]
        rows = []  # (ratio, basic var index, row, state the leaver lands on)
        dec = np.nonzero(beta > _PIVOT_TOL)[0]
        for i in dec:
            rows.append((self.xb[i] / beta[i], self.basis[i], int(i), NB_LB))
        inc = np.nonzero(beta < -_PIVOT_TOL)[0]
        for i in inc:
            cap = self.ub[self.basis[i]]
            if math.isfinite(cap):
                rows.append(((cap - self.xb[i]) / (-beta[i]),
                             self.basis[i], int(i), NB_UB))
        t_row, row, leave_state = math.inf, -1, NB_LB
        if rows:
            best = min(rows, key=lambda r: (r[0], r[1]))
            # guard tiny negatives from accumulated roundoff
            t_row, row, leave_state = max(best[0], 0.0), best[2], best[3]
        flip = self.ub[col]
        if math.isinf(t_row) and math.isinf(flip):
            return math.inf, -2, NB_LB
        if flip < t_row - 1e-12:
            return flip, -1, NB_LB
        return t_row, row, leave_state

    def _entering(self, d: np.ndarray):
        lb_viol = (self.state == NB_LB) & (d < -_COST_TOL)
        ub_viol = (self.state == NB_UB) & (d > _COST_TOL)
        if not (lb_viol.any() or ub_viol.any()):
            return -1
        viol = np.where(lb_viol, -d, 0.0) + np.where(ub_viol, d, 0.0)
        if self.bland:
            return int(np.nonzero(viol > 0)[0][0])
        return int(np.argmax(viol))  # first max = lowest index on ties

    def run(self, c: np.ndarray, max_iters: int | None = None) -> str:
        """Iterate to optimality for costs c. Returns "optimal"/"unbounded"."""
        c = np.asarray(c, dtype=float)
        d = c - c[self.basis] @ self.T
        d[self.basis] = 0.0
        if max_iters is None:
            max_iters = 200 * (self.nv + self.m) + 1000
        budget = 10 * self.nv
        for _ in range(max_iters):
            col = self._entering(d)
            if col < 0:
                self.iterations += 1
                return "optimal"
            direction = 1 if self.state[col] == NB_LB else -1
            t, row, leaving_state = self._ratio_test(col, direction)
            self.iterations += 1
            if row == -2:
                return "unbounded"
            if row == -1:
                self._flip(col)
                continue
            if t <= _DEGEN_TOL:
                self.degenerate_pivots += 1
                if self.degenerate_pivots > budget:
                    self.bland = True
            if self.state[col] == NB_LB:
                entering_value = t
            else:
                entering_value = self.ub[col] - t
            self._pivot(row, col, t, direction, entering_value, leaving_state)
            d = d - d[col] * self.T[row]
            d[col] = 0.0
        raise SimplexError("iteration limit exceeded")

    # -- phase 1 helpers ---------------------------------------------------

    def phase1(self) -> bool:
        """Minimize the artificial sum; True when a feasible basis remains."""
        c = np.zeros(self.nv)
        c[self.n_struct:] = 1.0
        status = self.run(c)
        if status != "optimal":
            raise SimplexError(f"phase 1 ended {status}")
        infeas = sum(self.xb[i] for i in range(self.m)
                     if self.basis[i] >= self.n_struct)
        if infeas > 1e-7:
            return False
        self.drive_out_artificials()
        return True

    def drive_out_artificials(self):
        """Zero-step pivots replacing basic artificials by structural columns,
        then drop the artificial columns entirely."""
        ns = self.n_struct
        for row in range(self.m):
            if self.basis[row] < ns:
                continue
            if abs(self.xb[row]) > 1e-7:
                raise SimplexError("cannot drop artificial with nonzero value")
            cand = np.abs(self.T[row, :ns])
            cand[self.state[:ns] == BASIC] = 0.0
            col = int(np.argmax(cand))
            if cand[col] <= _PIVOT_TOL:
                raise SimplexError("redundant row: no structural pivot available")
            entering_value = 0.0 if self.state[col] == NB_LB else self.ub[col]
            self._pivot(row, col, 0.0, 1, entering_value, NB_LB)
        self.T = np.ascontiguousarray(self.T[:, :ns])
        self.ub = self.ub[:ns]
        self.state = self.state[:ns]
        self.nv = ns

    # -- solution ----------------------------------------------------------

    def solution(self) -> np.ndarray:
        x = np.zeros(self.nv)
        at_ub = self.state == NB_UB
        x[at_ub] = self.ub[at_ub]
        x[self.basis] = self.xb
        return x

    def snapshot(self):
        return (self.T.copy(), self.xb.copy(), self.basis.copy(),
                self.state.copy())

    def restore(self, snap):
        T, xb, basis, state = snap
        np.copyto(self.T, T)
        np.copyto(self.xb, xb)
        np.copyto(self.basis, basis)
        np.copyto(self.state, state)
        self.degenerate_pivots = 0
        self.bland = False


def solve_bounded_lp(c, A, b, ub) -> SimplexResult:
    """Two-phase solve of min c@x s.t. A@x = b, 0 <= x <= ub."""
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    ub = np.asarray(ub, dtype=float)
    m, nv = A.shape if A.size else (0, len(c))
    if m == 0:
        if np.any((c < 0) & ~np.isfinite(ub)):
            return SimplexResult("unbounded", None, -math.inf, 0)
        x = np.where(c < 0, ub, 0.0)
        return SimplexResult("optimal", x, float(c @ x), 0)
    tab = Tableau.from_artificials(A, b, ub)
    if not tab.phase1():
        return SimplexResult("infeasible", None, math.nan, tab.iterations)
    full_c = c
    status = tab.run(full_c)
    if status != "optimal":
        return SimplexResult("unbounded", None, -math.inf, tab.iterations)
    x = tab.solution()
    return SimplexResult("optimal", x, float(c @ x), tab.iterations)
