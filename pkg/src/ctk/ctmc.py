"""Explicit-state CTMC construction from a flattened system.

States are valuations of the flattened system's variables in a fixed
order. Exploration is breadth-first with bundles evaluated in canonical
order, so two builds of the same system produce identical state orderings
and transition lists.

Semantics per bundle: all guards must hold; the rate is the product of the
participants' rate expressions evaluated in the source state; updates are
applied jointly with right-hand sides read from the source state. An
update that would drive a variable out of its declared range disables the
bundle in that state, and transitions whose joint update is the identity
are dropped (a self-loop never changes any measurable quantity of a CTMC).
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field

from .algebra import FlatSystem
from .ast_nodes import eval_expr
from .errors import BuildError, StateCapError

DEFAULT_STATE_CAP = 10**7


@dataclass(frozen=True)
class Transition:
    source: int
    label: str
    rate: float
    target: int


@dataclass(eq=False)
class Ctmc:
    """Immutable explicit CTMC; safe to share across concurrent checkers."""

    var_names: tuple[str, ...]
    var_bounds: tuple[tuple[int, int], ...]
    states: tuple[tuple[int, ...], ...]
    initial: int
    transitions: tuple[Transition, ...]
    blocked_labels: frozenset[str] = frozenset()
    _var_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._var_index = {name: i for i, name in enumerate(self.var_names)}

    @property
    def num_states(self) -> int:
        return len(self.states)

    def variable_index(self, name: str) -> int:
        try:
            return self._var_index[name]
        except KeyError:
            raise BuildError(f"unknown variable '{name}'") from None

    def has_variable(self, name: str) -> bool:
        return name in self._var_index

    def valuation(self, index: int) -> dict[str, int]:
        return dict(zip(self.var_names, self.states[index]))

    def exit_rates(self) -> list[float]:
        rates = [0.0] * self.num_states
        for t in self.transitions:
            rates[t.source] += t.rate
        return rates

    def successors(self) -> list[list[tuple[float, int]]]:
        out: list[list[tuple[float, int]]] = [[] for _ in range(self.num_states)]
        for t in self.transitions:
            out[t.source].append((t.rate, t.target))
        return out

    def predecessors(self) -> list[list[int]]:
        pred: list[list[int]] = [[] for _ in range(self.num_states)]
        for t in self.transitions:
            pred[t.target].append(t.source)
        return pred


def build(flat: FlatSystem, state_cap: int = DEFAULT_STATE_CAP) -> Ctmc:
    """Enumerate the reachable state space of a flattened system."""
    variables = flat.variables()
    names = tuple(name for name, _ in variables)
    bounds = tuple((decl.lower, decl.upper) for _, decl in variables)
    init = tuple(decl.init for _, decl in variables)
    position = {name: i for i, name in enumerate(names)}

    for bundle in flat.bundles:
        targets: set[str] = set()
        for part in bundle.parts:
            for update in flat.command(part).updates:
                if update.var in targets:
                    raise BuildError(
                        f"joint update on label '{bundle.label}' writes "
                        f"variable '{update.var}' twice")
                targets.add(update.var)

    index = {init: 0}
    states = [init]
    transitions: list[Transition] = []
    queue: deque[tuple[int, ...]] = deque([init])

    while queue:
        state = queue.popleft()
        source = index[state]
        valuation = dict(zip(names, state))
        for bundle in flat.bundles:
            commands = [flat.command(part) for part in bundle.parts]
            if not all(eval_expr(c.guard, valuation) for c in commands):
                continue
            rate = 1.0
            for c in commands:
                value = eval_expr(c.rate, valuation)
                if value < 0:
                    raise BuildError(
                        f"negative rate {value} on label '{bundle.label}' "
                        f"in state {state}")
                rate *= float(value)
            if rate == 0.0:
                continue
            nxt = list(state)
            in_range = True
            for c in commands:
                for update in c.updates:
                    pos = position[update.var]
                    value = eval_expr(update.value, valuation)
                    lo, hi = bounds[pos]
                    if not lo <= value <= hi:
                        in_range = False
                        break
                    nxt[pos] = value
                if not in_range:
                    break
            if not in_range:
                continue
            target_state = tuple(nxt)
            if target_state == state:
                continue
            if target_state not in index:
                if len(states) >= state_cap:
                    raise StateCapError(
                        f"state space exceeds cap of {state_cap} states")
                index[target_state] = len(states)
                states.append(target_state)
                queue.append(target_state)
            transitions.append(
                Transition(source, bundle.label, rate, index[target_state]))

    return Ctmc(
        var_names=names,
        var_bounds=bounds,
        states=tuple(states),
        initial=0,
        transitions=tuple(transitions),
        blocked_labels=flat.blocked,
    )


def label_transitions(ctmc: Ctmc, label: str) -> list[Transition]:
    """All transitions carrying a label, possibly empty."""
    return [t for t in ctmc.transitions if t.label == label]


def export_tables(ctmc: Ctmc, directory: str) -> tuple[str, str]:
    """Write the state and transition tables as plain text files."""
    os.makedirs(directory, exist_ok=True)
    states_path = os.path.join(directory, "states.txt")
    trans_path = os.path.join(directory, "transitions.txt")
    with open(states_path, "w", encoding="utf-8") as handle:
        handle.write("# index " + " ".join(ctmc.var_names) + "\n")
        for i, state in enumerate(ctmc.states):
            handle.write(f"{i} " + " ".join(str(v) for v in state) + "\n")
    with open(trans_path, "w", encoding="utf-8") as handle:
        handle.write("# source label rate target\n")
        for t in ctmc.transitions:
            handle.write(f"{t.source} {t.label} {t.rate:.17g} {t.target}\n")
    return states_path, trans_path
