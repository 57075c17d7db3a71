"""Composition algebra: instantiation, alphabets, independence and the
flattening of a composition tree into synchronisation bundles.

Generic modules are stored in their index-1 form (the names already carry
the instance index). `instantiate` reindexes names:

  * labels ending in `_<digits>` have the suffix replaced by the new index,
    labels without a suffix get `_<index>` appended;
  * variable names have their first digit run replaced when it is `1`,
    otherwise `_<index>` is appended.

Flattening resolves every rename/hide/parallel operator into *bundles*: a
bundle is the set of commands (one per participating component) that must
fire jointly under one visible label. A label in a sync set with
participants on only one side is blocked and contributes no bundle; hidden
labels keep their bundles but fire locally and never synchronise again.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .ast_nodes import (
    BinOp,
    Command,
    CompositionExpr,
    Expr,
    Hide,
    Instance,
    Model,
    ModuleDef,
    NotOp,
    Par,
    ParAuto,
    Rename,
    RoleAnnotation,
    Update,
    VarDecl,
    VarRef,
)
from .errors import ModelError

_LABEL_SUFFIX = re.compile(r"^(.*)_(\d+)$")
_FIRST_DIGITS = re.compile(r"\d+")


def _reindex_label(label: str, index: int) -> str:
    m = _LABEL_SUFFIX.match(label)
    if m:
        return f"{m.group(1)}_{index}"
    return f"{label}_{index}"


def _reindex_variable(name: str, index: int) -> str:
    m = _FIRST_DIGITS.search(name)
    if m and m.group(0) == "1":
        return name[:m.start()] + str(index) + name[m.end():]
    return f"{name}_{index}"


def _reindex_expr(expr: Expr, index: int) -> Expr:
    if isinstance(expr, VarRef):
        return VarRef(_reindex_variable(expr.name, index))
    if isinstance(expr, NotOp):
        return NotOp(_reindex_expr(expr.operand, index))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, _reindex_expr(expr.left, index),
                     _reindex_expr(expr.right, index))
    return expr


def instantiate(generic: ModuleDef, index: int) -> ModuleDef:
    """Instance of a generic module with every variable and label reindexed."""
    if index < 1:
        raise ModelError(f"instance index must be positive, got {index}")
    variables = tuple(
        VarDecl(_reindex_variable(v.name, index), v.lower, v.upper, v.init)
        for v in generic.variables)
    commands = tuple(
        Command(
            _reindex_label(c.label, index) if c.label else "",
            _reindex_expr(c.guard, index),
            _reindex_expr(c.rate, index),
            tuple(Update(_reindex_variable(u.var, index),
                         _reindex_expr(u.value, index))
                  for u in c.updates),
        )
        for c in generic.commands)
    return ModuleDef(f"{generic.name}_{index}", variables, commands)


def instantiate_annotations(annotations: tuple[RoleAnnotation, ...],
                            index: int) -> tuple[RoleAnnotation, ...]:
    return tuple(
        RoleAnnotation(_reindex_label(a.label, index), a.role, a.module_kind)
        for a in annotations)


# ---------------------------------------------------------------------------
# alphabets and independence

def alphabet(expr: CompositionExpr, model: Model) -> frozenset[str]:
    """External label set of a composition expression."""
    if isinstance(expr, Instance):
        generic = model.module(expr.generic)
        return frozenset(_reindex_label(l, expr.index) for l in generic.labels())
    if isinstance(expr, Rename):
        child = alphabet(expr.child, model)
        mapping = dict(expr.mapping)
        return frozenset(mapping.get(l, l) for l in child)
    if isinstance(expr, Hide):
        return alphabet(expr.child, model) - frozenset(expr.labels)
    if isinstance(expr, (Par, ParAuto)):
        return alphabet(expr.left, model) | alphabet(expr.right, model)
    raise ModelError(f"unknown composition node {expr!r}")


@dataclass(frozen=True)
class IndependenceResult:
    independent: bool
    shared_labels: frozenset[str]


def independence_check(p1: CompositionExpr, p2: CompositionExpr,
                       model: Model) -> IndependenceResult:
    """Pathways are independent iff their external label sets are disjoint;
    otherwise the shared labels witness cross-talk."""
    shared = alphabet(p1, model) & alphabet(p2, model)
    return IndependenceResult(not shared, frozenset(shared))


# ---------------------------------------------------------------------------
# flattening

@dataclass(frozen=True)
class Component:
    """One module instance inside a flattened system."""

    name: str
    module: ModuleDef


@dataclass(frozen=True)
class Bundle:
    """Commands that fire jointly as one transition family.

    `parts` holds (component index, command index) pairs; a hidden bundle
    fires locally under its pre-hiding label.
    """

    label: str
    parts: tuple[tuple[int, int], ...]
    hidden: bool = False


@dataclass
class FlatSystem:
    components: tuple[Component, ...]
    bundles: tuple[Bundle, ...]
    blocked: frozenset[str]
    warnings: tuple[str, ...] = ()

    def variables(self) -> tuple[tuple[str, VarDecl], ...]:
        """Global variable order: component-major, declaration order."""
        out: list[tuple[str, VarDecl]] = []
        seen: set[str] = set()
        for comp in self.components:
            for decl in comp.module.variables:
                if decl.name in seen:
                    raise ModelError(
                        f"variable '{decl.name}' declared by more than one "
                        f"component of the composition")
                seen.add(decl.name)
                out.append((decl.name, decl))
        return tuple(out)

    def participants(self, label: str) -> frozenset[int]:
        """Components owning a command with this label, after renaming."""
        comps: set[int] = set()
        for bundle in self.bundles:
            if bundle.label == label and not bundle.hidden:
                comps.update(ci for ci, _ in bundle.parts)
        return frozenset(comps)

    def command(self, part: tuple[int, int]) -> Command:
        ci, ki = part
        return self.components[ci].module.commands[ki]


@dataclass
class _Flat:
    components: list[Component] = field(default_factory=list)
    visible: dict[str, list[tuple[tuple[int, int], ...]]] = field(default_factory=dict)
    internal: list[tuple[str, tuple[tuple[int, int], ...]]] = field(default_factory=list)
    blocked: set[str] = field(default_factory=set)
    warnings: list[str] = field(default_factory=list)


def _flatten(expr: CompositionExpr, model: Model) -> _Flat:
    if isinstance(expr, Instance):
        module = instantiate(model.module(expr.generic), expr.index)
        flat = _Flat(components=[Component(module.name, module)])
        for ki, cmd in enumerate(module.commands):
            if cmd.label:
                flat.visible.setdefault(cmd.label, []).append(((0, ki),))
            else:
                flat.internal.append(("", ((0, ki),)))
        return flat

    if isinstance(expr, Rename):
        flat = _flatten(expr.child, model)
        mapping = dict(expr.mapping)
        for old in mapping:
            if old not in flat.visible:
                raise ModelError(f"rename of undeclared label '{old}'")
        renamed: dict[str, list[tuple[tuple[int, int], ...]]] = {}
        for label, bundles in flat.visible.items():
            new = mapping.get(label, label)
            if new in renamed:
                raise ModelError(
                    f"rename collision: two labels map to '{new}'")
            renamed[new] = bundles
        flat.visible = renamed
        return flat

    if isinstance(expr, Hide):
        flat = _flatten(expr.child, model)
        for label in expr.labels:
            for bundle in flat.visible.pop(label, []):
                flat.internal.append((label, bundle))
        return flat

    if isinstance(expr, (Par, ParAuto)):
        left = _flatten(expr.left, model)
        right = _flatten(expr.right, model)
        if isinstance(expr, ParAuto):
            sync = tuple(sorted(set(left.visible) & set(right.visible)))
        else:
            sync = expr.sync
        offset = len(left.components)
        shift = lambda parts: tuple((ci + offset, ki) for ci, ki in parts)
        merged = _Flat(
            components=left.components + right.components,
            internal=left.internal + [(l, shift(p)) for l, p in right.internal],
            blocked=left.blocked | right.blocked,
            warnings=left.warnings + right.warnings,
        )
        sync_set = set(sync)
        for label in sync:
            lv = left.visible.get(label, [])
            rv = right.visible.get(label, [])
            if lv and rv:
                merged.visible[label] = [
                    lp + shift(rp) for lp in lv for rp in rv]
            elif lv or rv:
                merged.blocked.add(label)
            else:
                merged.warnings.append(
                    f"sync label '{label}' occurs in neither alphabet and "
                    f"blocks nothing")
        for label, bundles in left.visible.items():
            if label not in sync_set:
                merged.visible.setdefault(label, []).extend(bundles)
        for label, bundles in right.visible.items():
            if label not in sync_set:
                merged.visible.setdefault(label, []).extend(
                    shift(p) for p in bundles)
        return merged

    raise ModelError(f"unknown composition node {expr!r}")


def flatten(expr: CompositionExpr, model: Model) -> FlatSystem:
    """Resolve a composition tree into components and transition bundles."""
    flat = _flatten(expr, model)
    names = [c.name for c in flat.components]
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise ModelError(
            f"instance '{sorted(dupes)[0]}' appears more than once in the "
            f"composition")
    bundles = [Bundle(label, parts, hidden=True)
               for label, parts in flat.internal]
    for label, alternatives in flat.visible.items():
        for parts in alternatives:
            bundles.append(Bundle(label, parts))
    bundles.sort(key=lambda b: (b.label, b.parts))
    system = FlatSystem(
        components=tuple(flat.components),
        bundles=tuple(bundles),
        blocked=frozenset(flat.blocked),
        warnings=tuple(flat.warnings),
    )
    system.variables()  # raises on cross-component variable collisions
    return system
