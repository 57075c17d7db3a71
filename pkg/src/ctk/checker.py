"""Exact CSL model checking over explicit CTMCs.

Qualitative bounds (<=0, >0, >=1, <1) are decided purely by graph
analysis. Unbounded until is solved by Gauss-Seidel on the embedded jump
chain with direct elimination as a fallback; time-bounded until by
uniformization with Poisson truncation. All tolerances live in
`CheckSettings` and default to the documented values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import sparse
from scipy.stats import poisson

from .ast_nodes import (
    Atomic,
    Bound,
    BoundedEventually,
    BoundedUntil,
    CslFormula,
    Eventually,
    FAnd,
    FBool,
    FNot,
    FOr,
    PathFormula,
    Prob,
    StateFormula,
    Until,
)
from .ctmc import Ctmc
from .errors import CheckError, SolverError

_CMP = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


@dataclass(frozen=True)
class CheckSettings:
    """Solver configuration; every tolerance can be overridden."""

    gauss_seidel_tol: float = 1e-10
    iteration_cap: int = 10**6
    direct_solve_max: int = 2000
    uniformization_factor: float = 1.02
    poisson_epsilon: float = 1e-9
    solver: str = "auto"  # 'auto' (iterative with fallback) | 'iterative' | 'direct'


DEFAULT_SETTINGS = CheckSettings()


@dataclass
class CheckResult:
    kind: str  # 'verdict' or 'probability'
    value: Union[bool, float]
    per_state: Optional[np.ndarray] = None
    warnings: list[str] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# state sets

def eval_state_formula(ctmc: Ctmc, formula: StateFormula,
                       settings: CheckSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Boolean membership vector of a state formula, one entry per state."""
    if isinstance(formula, Atomic):
        if not ctmc.has_variable(formula.var):
            raise CheckError(f"unknown variable '{formula.var}' in property")
        column = np.array([s[ctmc.variable_index(formula.var)]
                           for s in ctmc.states])
        return _CMP[formula.op](column, formula.value)
    if isinstance(formula, FBool):
        return np.full(ctmc.num_states, formula.value, dtype=bool)
    if isinstance(formula, FNot):
        return ~eval_state_formula(ctmc, formula.operand, settings)
    if isinstance(formula, FAnd):
        return (eval_state_formula(ctmc, formula.left, settings)
                & eval_state_formula(ctmc, formula.right, settings))
    if isinstance(formula, FOr):
        return (eval_state_formula(ctmc, formula.left, settings)
                | eval_state_formula(ctmc, formula.right, settings))
    if isinstance(formula, Prob):
        if formula.bound.is_query():
            raise CheckError(
                "query-form P=? cannot be nested inside a state formula; "
                "give it a bound")
        if formula.filter is not None:
            raise CheckError(
                "filters are only supported on the outermost probability "
                "operator")
        return _prob_mask(ctmc, formula, settings)
    raise CheckError(f"unknown formula node {formula!r}")


def _prob_mask(ctmc: Ctmc, prob: Prob,
               settings: CheckSettings) -> np.ndarray:
    """Per-state truth of a bounded probability operator."""
    if prob.bound.is_qualitative():
        return qualitative_check(ctmc, prob, settings)
    values, _ = _path_probability(ctmc, prob.path, settings)
    return _compare(values, prob.bound)


def _compare(values: np.ndarray, bound: Bound) -> np.ndarray:
    return _CMP[bound.op](values, bound.value)


# ---------------------------------------------------------------------------
# graph analyses

def _exists_until(ctmc: Ctmc, phi1: np.ndarray, phi2: np.ndarray) -> np.ndarray:
    """States with a path to phi2 whose strict prefix stays in phi1."""
    pred = ctmc.predecessors()
    mask = phi2.copy()
    stack = list(np.flatnonzero(phi2))
    while stack:
        u = stack.pop()
        for v in pred[u]:
            if not mask[v] and phi1[v]:
                mask[v] = True
                stack.append(v)
    return mask


def _almost_sure_until(ctmc: Ctmc, phi1: np.ndarray,
                       phi2: np.ndarray) -> np.ndarray:
    """States whose until probability is exactly one (graph-only)."""
    can_reach = _exists_until(ctmc, phi1, phi2)
    prob0 = ~can_reach
    # states that can escape to prob0 through phi1-and-not-phi2 states
    pred = ctmc.predecessors()
    bad = prob0.copy()
    stack = list(np.flatnonzero(prob0))
    through = phi1 & ~phi2
    while stack:
        u = stack.pop()
        for v in pred[u]:
            if not bad[v] and through[v]:
                bad[v] = True
                stack.append(v)
    return ~bad


def qualitative_check(ctmc: Ctmc, prob: Prob,
                      settings: CheckSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Exact per-state verdicts for <=0 / >0 / >=1 / <1 bounds."""
    bound = prob.bound
    if not bound.is_qualitative():
        raise CheckError(f"bound '{bound.op}{bound.value}' is not qualitative")
    phi1, phi2, time = _path_parts(ctmc, prob.path, settings)
    if time is not None and time == 0.0:
        positive = phi2.copy()
        certain = phi2.copy()
    elif time is not None:
        positive = _exists_until(ctmc, phi1, phi2)
        certain = phi2.copy()  # within finite time only immediate targets are sure
    else:
        positive = _exists_until(ctmc, phi1, phi2)
        certain = _almost_sure_until(ctmc, phi1, phi2)
    if bound.op == ">" and bound.value == 0.0:
        return positive
    if bound.op == "<=" and bound.value == 0.0:
        return ~positive
    if bound.op == ">=" and bound.value == 1.0:
        return certain
    return ~certain  # '<1'


def _path_parts(ctmc: Ctmc, path: PathFormula, settings: CheckSettings):
    if isinstance(path, Eventually):
        return (np.ones(ctmc.num_states, dtype=bool),
                eval_state_formula(ctmc, path.target, settings), None)
    if isinstance(path, BoundedEventually):
        return (np.ones(ctmc.num_states, dtype=bool),
                eval_state_formula(ctmc, path.target, settings), path.time)
    if isinstance(path, Until):
        return (eval_state_formula(ctmc, path.lhs, settings),
                eval_state_formula(ctmc, path.rhs, settings), None)
    if isinstance(path, BoundedUntil):
        return (eval_state_formula(ctmc, path.lhs, settings),
                eval_state_formula(ctmc, path.rhs, settings), path.time)
    raise CheckError(f"unknown path formula {path!r}")


# ---------------------------------------------------------------------------
# unbounded until

def prob_unbounded_until(ctmc: Ctmc, phi1: np.ndarray, phi2: np.ndarray,
                         settings: CheckSettings = DEFAULT_SETTINGS,
                         diagnostics: Optional[dict] = None) -> np.ndarray:
    """P(phi1 U phi2) per state: graph precomputation plus linear solve."""
    n = ctmc.num_states
    result = np.zeros(n)
    result[phi2] = 1.0
    can_reach = _exists_until(ctmc, phi1, phi2)
    unknown = np.flatnonzero(can_reach & ~phi2)
    if unknown.size == 0:
        return result
    succ = ctmc.successors()
    exit_rates = ctmc.exit_rates()
    if settings.solver == "direct":
        values = _solve_direct(unknown, succ, exit_rates, phi2, can_reach)
        if diagnostics is not None:
            diagnostics["reach_solver"] = "direct"
    else:
        values, converged, sweeps = _gauss_seidel(
            unknown, succ, exit_rates, phi2, can_reach, settings)
        if diagnostics is not None:
            diagnostics["reach_solver"] = "gauss-seidel"
            diagnostics["reach_sweeps"] = sweeps
        if not converged:
            if (settings.solver == "auto"
                    and unknown.size < settings.direct_solve_max):
                values = _solve_direct(unknown, succ, exit_rates, phi2, can_reach)
                if diagnostics is not None:
                    diagnostics["reach_solver"] = "direct-fallback"
            else:
                raise SolverError(
                    f"Gauss-Seidel did not converge within "
                    f"{settings.iteration_cap} sweeps "
                    f"({unknown.size} unknowns)")
    result[unknown] = values
    return np.clip(result, 0.0, 1.0)


def _gauss_seidel(unknown: np.ndarray, succ, exit_rates, phi2, can_reach,
                  settings: CheckSettings):
    """In-place sweeps of p(s) = sum_t rate(s,t)/E(s) * p(t).

    Converged when the equation residual is below tolerance and the
    geometric-tail error estimate residual * rho / (1 - rho), with rho the
    observed residual contraction, is below it as well; a small residual
    alone underestimates the error on slowly contracting systems.
    """
    n = len(exit_rates)
    p = np.zeros(n)
    p[phi2] = 1.0
    unknown_list = list(unknown)
    tol = settings.gauss_seidel_tol
    previous = None
    for sweep in range(1, settings.iteration_cap + 1):
        for s in unknown_list:
            total = 0.0
            for rate, t in succ[s]:
                total += rate * p[t]
            p[s] = total / exit_rates[s]
        residual = 0.0
        for s in unknown_list:
            total = 0.0
            for rate, t in succ[s]:
                total += rate * p[t]
            diff = abs(total / exit_rates[s] - p[s])
            if diff > residual:
                residual = diff
        if residual == 0.0:
            return p[unknown], True, sweep
        if residual < tol and previous:
            rho = min(residual / previous, 0.999)
            if residual * rho / (1.0 - rho) < tol:
                return p[unknown], True, sweep
        previous = residual
    return p[unknown], False, settings.iteration_cap


def _solve_direct(unknown: np.ndarray, succ, exit_rates, phi2, can_reach):
    """Dense Gaussian elimination on the unknown block."""
    index = {int(s): i for i, s in enumerate(unknown)}
    m = len(unknown)
    A = np.eye(m)
    b = np.zeros(m)
    for s in unknown:
        i = index[int(s)]
        E = exit_rates[s]
        for rate, t in succ[s]:
            w = rate / E
            if phi2[t]:
                b[i] += w
            elif t in index:
                A[i, index[t]] -= w
            # transitions into prob0 states contribute nothing
    return np.linalg.solve(A, b)


# ---------------------------------------------------------------------------
# bounded until (uniformization)

def prob_bounded_until(ctmc: Ctmc, phi1: np.ndarray, phi2: np.ndarray,
                       time: float,
                       settings: CheckSettings = DEFAULT_SETTINGS,
                       diagnostics: Optional[dict] = None) -> np.ndarray:
    """P(phi1 U<=t phi2) per state via uniformization.

    phi2 states and (not phi1, not phi2) states are made absorbing; the
    result is the probability of residing in phi2 at the time bound.
    """
    if time < 0:
        raise CheckError(f"negative time bound {time}")
    n = ctmc.num_states
    target = phi2.astype(float)
    if time == 0.0:
        return target
    absorbing = phi2 | (~phi1 & ~phi2)
    rows, cols, rates = [], [], []
    exit_rates = np.zeros(n)
    for t in ctmc.transitions:
        if absorbing[t.source]:
            continue
        rows.append(t.source)
        cols.append(t.target)
        rates.append(t.rate)
        exit_rates[t.source] += t.rate
    max_exit = exit_rates.max() if n else 0.0
    if max_exit == 0.0:
        return target
    q = settings.uniformization_factor * max_exit
    mu = q * time
    P = sparse.csr_matrix(
        (np.array(rates) / q, (rows, cols)), shape=(n, n))
    diag = np.ones(n)
    diag[~absorbing] -= exit_rates[~absorbing] / q
    P = P + sparse.diags(diag)

    k_max = int(poisson.ppf(1.0 - settings.poisson_epsilon, mu))
    while poisson.cdf(k_max, mu) < 1.0 - settings.poisson_epsilon:
        k_max += 1
    weights = poisson.pmf(np.arange(k_max + 1), mu)
    acc = weights[0] * target
    vec = target
    for k in range(1, k_max + 1):
        vec = P @ vec
        acc = acc + weights[k] * vec
    if diagnostics is not None:
        diagnostics["uniformization_rate"] = q
        diagnostics["poisson_terms"] = k_max + 1
    return np.clip(acc, 0.0, 1.0)


def _path_probability(ctmc: Ctmc, path: PathFormula,
                      settings: CheckSettings,
                      diagnostics: Optional[dict] = None) -> tuple[np.ndarray, Optional[float]]:
    phi1, phi2, time = _path_parts(ctmc, path, settings)
    if time is None:
        return (prob_unbounded_until(ctmc, phi1, phi2, settings, diagnostics),
                None)
    return (prob_bounded_until(ctmc, phi1, phi2, time, settings, diagnostics),
            time)


# ---------------------------------------------------------------------------
# top-level property checking

def check_property(ctmc: Ctmc, prop: CslFormula,
                   settings: CheckSettings = DEFAULT_SETTINGS) -> CheckResult:
    """Check a property; filters follow the for-all-filter-states rule.

    Without a filter the property is evaluated at the initial state. A
    bounded operator with a filter holds iff the bound holds in every
    reachable state satisfying the filter (vacuously true when none do); a
    query with a filter requires exactly one reachable filter state.
    """
    if isinstance(prop, Prob):
        return _check_prob(ctmc, prop, settings)
    mask = eval_state_formula(ctmc, prop, settings)
    return CheckResult(kind="verdict", value=bool(mask[ctmc.initial]))


def _check_prob(ctmc: Ctmc, prop: Prob,
                settings: CheckSettings) -> CheckResult:
    diagnostics: dict = {}
    bound = prop.bound
    values: Optional[np.ndarray] = None
    if bound.is_qualitative():
        mask = qualitative_check(ctmc, prop, settings)
    elif bound.is_query():
        values, _ = _path_probability(ctmc, prop.path, settings, diagnostics)
        mask = None
    else:
        values, _ = _path_probability(ctmc, prop.path, settings, diagnostics)
        mask = _compare(values, bound)

    if prop.filter is None:
        if bound.is_query():
            return CheckResult(kind="probability",
                               value=float(values[ctmc.initial]),
                               per_state=values, diagnostics=diagnostics)
        return CheckResult(kind="verdict", value=bool(mask[ctmc.initial]),
                           per_state=values, diagnostics=diagnostics)

    filter_mask = eval_state_formula(ctmc, prop.filter, settings)
    count = int(filter_mask.sum())
    if bound.is_query():
        if count != 1:
            raise CheckError(
                f"query filter must match exactly one reachable state, "
                f"matched {count}")
        state = int(np.flatnonzero(filter_mask)[0])
        return CheckResult(kind="probability", value=float(values[state]),
                           per_state=values, diagnostics=diagnostics)
    if count == 0:
        return CheckResult(
            kind="verdict", value=True, per_state=values,
            warnings=["filter matches no reachable state; "
                      "property holds vacuously"],
            diagnostics=diagnostics)
    verdict = bool(mask[filter_mask].all())
    return CheckResult(kind="verdict", value=verdict, per_state=values,
                       diagnostics=diagnostics)

