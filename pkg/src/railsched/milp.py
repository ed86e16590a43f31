"""Thin mixed-integer linear programming layer.

Both optimization models are expressed against :class:`ModelBuilder`; the
actual solve is delegated to the HiGHS engine bundled with SciPy, which is
open source, runs single-threaded and is deterministic for identical input.
Models can be exported in LP format for debugging.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

logger = logging.getLogger(__name__)

__all__ = [
    "ModelBuilder",
    "SolveOptions",
    "SolveResult",
    "SolveStatus",
    "SolverError",
    "solve",
]

#: Binary solution values farther than this from an integer trigger a warning.
BINARY_TOLERANCE = 1e-6

_SENSES = ("<=", ">=", "==")


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE_TIME_LIMIT = "feasible_time_limit"
    INFEASIBLE = "infeasible"
    ERROR = "error"


class SolverError(RuntimeError):
    """Raised by callers when a solve did not yield a usable solution."""


@dataclass
class SolveOptions:
    """Knobs forwarded to the backend.

    ``thread_count`` and ``solver_seed`` are recorded for reproducibility
    bookkeeping; the bundled backend always runs one deterministic thread.
    """

    time_limit: float = 10800.0
    relative_mip_gap: float | None = None
    thread_count: int = 1
    solver_seed: int | None = None

    def __post_init__(self) -> None:
        if self.time_limit <= 0:
            raise ValueError("time limit must be positive")


@dataclass
class SolveResult:
    status: SolveStatus
    objective_value: float
    best_bound: float
    values: np.ndarray
    wall_time: float
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE_TIME_LIMIT)


class ModelBuilder:
    """Incrementally assembled minimization MILP.

    Variables are identified by the integer returned from ``add_binary`` /
    ``add_continuous``; constraints are linear with sense ``<=``, ``>=`` or
    ``==``. Objective coefficients accumulate, so repeated
    ``add_objective_term`` calls on the same variable sum up.
    """

    def __init__(self, name: str = "model") -> None:
        self.name = name
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._binary: list[bool] = []
        self._names: list[str] = []
        self._rows: list[list[tuple[int, float]]] = []
        self._senses: list[str] = []
        self._rhs: list[float] = []
        self._objective: dict[int, float] = {}

    # -- variables ---------------------------------------------------------

    def add_binary(self, name: str = "") -> int:
        idx = len(self._lb)
        self._lb.append(0.0)
        self._ub.append(1.0)
        self._binary.append(True)
        self._names.append(name or f"x{idx}")
        return idx

    def add_continuous(self, lb: float = 0.0, ub: float = math.inf, name: str = "") -> int:
        if lb > ub:
            raise ValueError(f"empty bound range [{lb}, {ub}]")
        idx = len(self._lb)
        self._lb.append(float(lb))
        self._ub.append(float(ub))
        self._binary.append(False)
        self._names.append(name or f"x{idx}")
        return idx

    def set_var_bounds(self, var: int, lb: float, ub: float) -> None:
        self._check_var(var)
        if lb > ub:
            raise ValueError(f"empty bound range [{lb}, {ub}]")
        self._lb[var] = float(lb)
        self._ub[var] = float(ub)

    @property
    def num_variables(self) -> int:
        return len(self._lb)

    @property
    def num_constraints(self) -> int:
        return len(self._rows)

    def _check_var(self, var: int) -> None:
        if not 0 <= var < len(self._lb):
            raise ValueError(f"unknown variable id {var}")

    # -- constraints and objective ------------------------------------------

    def add_constraint(self, terms, sense: str, rhs: float) -> int:
        """Add ``sum(coef * var) sense rhs``; ``terms`` is (var, coef) pairs."""
        if sense not in _SENSES:
            raise ValueError(f"sense must be one of {_SENSES}")
        row = [(int(v), float(c)) for v, c in terms]
        for v, _ in row:
            self._check_var(v)
        self._rows.append(row)
        self._senses.append(sense)
        self._rhs.append(float(rhs))
        return len(self._rows) - 1

    def add_objective_term(self, var: int, coef: float) -> None:
        self._check_var(var)
        if coef:
            self._objective[var] = self._objective.get(var, 0.0) + float(coef)

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(self.num_variables)
        for var, coef in self._objective.items():
            c[var] = coef
        return c

    # -- export --------------------------------------------------------------

    def to_lp_string(self) -> str:
        """Model in LP text format (for inspection, not round-trip)."""

        def term_str(coef: float, name: str) -> str:
            sign = "+" if coef >= 0 else "-"
            return f"{sign} {abs(coef):.12g} {name}"

        lines = [f"\\ {self.name}", "Minimize", " obj:"]
        obj_terms = [term_str(c, self._names[v]) for v, c in sorted(self._objective.items())]
        lines.append("  " + (" ".join(obj_terms) if obj_terms else "0 " + self._names[0]))
        lines.append("Subject To")
        sense_map = {"<=": "<=", ">=": ">=", "==": "="}
        for i, (row, sense, rhs) in enumerate(zip(self._rows, self._senses, self._rhs)):
            body = " ".join(term_str(c, self._names[v]) for v, c in row)
            lines.append(f" c{i}: {body} {sense_map[sense]} {rhs:.12g}")
        lines.append("Bounds")
        for idx, (lo, hi) in enumerate(zip(self._lb, self._ub)):
            if self._binary[idx]:
                continue
            hi_str = "+inf" if math.isinf(hi) else f"{hi:.12g}"
            lines.append(f" {lo:.12g} <= {self._names[idx]} <= {hi_str}")
        binaries = [self._names[i] for i, b in enumerate(self._binary) if b]
        if binaries:
            lines.append("Binaries")
            for i in range(0, len(binaries), 12):
                lines.append(" " + " ".join(binaries[i : i + 12]))
        lines.append("End")
        return "\n".join(lines) + "\n"

    # -- assembly -------------------------------------------------------------

    def _constraint_matrix(self):
        rows, cols, vals = [], [], []
        lower = np.empty(self.num_constraints)
        upper = np.empty(self.num_constraints)
        for i, (row, sense, rhs) in enumerate(zip(self._rows, self._senses, self._rhs)):
            for var, coef in row:
                rows.append(i)
                cols.append(var)
                vals.append(coef)
            if sense == "<=":
                lower[i], upper[i] = -np.inf, rhs
            elif sense == ">=":
                lower[i], upper[i] = rhs, np.inf
            else:
                lower[i], upper[i] = rhs, rhs
        matrix = sparse.csc_matrix(
            (vals, (rows, cols)), shape=(self.num_constraints, self.num_variables)
        )
        return matrix, lower, upper


def solve(builder: ModelBuilder, options: SolveOptions | None = None) -> SolveResult:
    """Solve the built model, returning the incumbent even on a time limit.

    Binary values in the solution are rounded to exact 0/1 before
    extraction; a solution farther than ``BINARY_TOLERANCE`` from
    integrality is reported (it indicates a backend tolerance problem).
    """
    opts = options or SolveOptions()
    if builder.num_variables == 0:
        raise ValueError("model has no variables")
    c = builder.objective_vector()
    integrality = np.array(builder._binary, dtype=np.uint8)
    bounds = Bounds(np.array(builder._lb), np.array(builder._ub))
    milp_options = {"disp": False, "presolve": True, "time_limit": float(opts.time_limit)}
    if opts.relative_mip_gap is not None:
        milp_options["mip_rel_gap"] = float(opts.relative_mip_gap)

    constraints = ()
    if builder.num_constraints:
        matrix, lower, upper = builder._constraint_matrix()
        constraints = (LinearConstraint(matrix, lower, upper),)

    start = time.perf_counter()
    try:
        res = milp(
            c,
            constraints=constraints,
            integrality=integrality,
            bounds=bounds,
            options=milp_options,
        )
    except Exception as exc:  # backend fault
        elapsed = time.perf_counter() - start
        logger.error("%s: backend error: %s", builder.name, exc)
        return SolveResult(
            status=SolveStatus.ERROR,
            objective_value=math.nan,
            best_bound=math.nan,
            values=np.empty(0),
            wall_time=elapsed,
            message=str(exc),
        )
    elapsed = time.perf_counter() - start

    if res.status == 2:
        status = SolveStatus.INFEASIBLE
    elif res.status == 0:
        status = SolveStatus.OPTIMAL
    elif res.status == 1 and res.x is not None:
        status = SolveStatus.FEASIBLE_TIME_LIMIT
    else:
        status = SolveStatus.ERROR

    if res.x is None:
        return SolveResult(
            status=status,
            objective_value=math.nan,
            best_bound=math.nan,
            values=np.empty(0),
            wall_time=elapsed,
            message=res.message,
        )

    values = np.array(res.x, dtype=float)
    binary_mask = integrality.astype(bool)
    if binary_mask.any():
        drift = np.abs(values[binary_mask] - np.round(values[binary_mask])).max()
        if drift > BINARY_TOLERANCE:
            logger.warning("%s: binary drift %.3g exceeds tolerance", builder.name, drift)
        values[binary_mask] = np.round(values[binary_mask])

    best_bound = getattr(res, "mip_dual_bound", None)
    if best_bound is None:
        best_bound = float(res.fun)
    logger.debug(
        "%s: %s obj=%.6f bound=%.6f in %.2fs",
        builder.name,
        status.value,
        res.fun,
        best_bound,
        elapsed,
    )
    return SolveResult(
        status=status,
        objective_value=float(res.fun),
        best_bound=float(best_bound),
        values=values,
        wall_time=elapsed,
        message=res.message,
    )
