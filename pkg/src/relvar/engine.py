"""Finite-domain constraint store with table constraints and GAC propagation.

Variables are integer ids. A finite variable holds a bitset over the value
indices ``0..k-1``; a set variable holds a pair of bitsets (must-contain,
may-contain) over a small universe. Constraints revise domains until a
fixpoint is reached or some domain becomes empty. Depth-first search with
chronological backtracking is layered on top, restoring domains from a trail.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

VarId = int
ConstraintId = int

MAX_SET_UNIVERSE = 16


class EmptyDomain(ValueError):
    """Raised when a variable is created with no values."""


class ArityError(ValueError):
    """Raised when a constraint's scope and data disagree in shape."""


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(values: Iterable[int]) -> int:
    mask = 0
    for v in values:
        mask |= 1 << v
    return mask


@dataclass(frozen=True)
class FiniteDomain:
    """Set of value indices, stored as a bitset over ``0..universe_size-1``."""

    bits: int
    universe_size: int

    def __post_init__(self):
        if self.universe_size < 1:
            raise ValueError("universe_size must be positive")
        if self.bits < 0 or self.bits >> self.universe_size:
            raise ValueError(f"bits {self.bits:#x} exceed universe of size {self.universe_size}")

    @classmethod
    def full(cls, universe_size: int) -> FiniteDomain:
        return cls((1 << universe_size) - 1, universe_size)

    @classmethod
    def of(cls, values: Iterable[int], universe_size: int) -> FiniteDomain:
        return cls(mask_of(values), universe_size)

    def values(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.bits))

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __contains__(self, value: int) -> bool:
        return value >= 0 and bool(self.bits >> value & 1)

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    @property
    def is_bound(self) -> bool:
        return self.bits != 0 and self.bits & (self.bits - 1) == 0


@dataclass(frozen=True)
class SetDomain:
    """Bounds of a set variable: every value ``s`` satisfies lower <= s <= upper."""

    lower: int
    upper: int
    universe_size: int

    def __post_init__(self):
        if not 1 <= self.universe_size <= MAX_SET_UNIVERSE:
            raise ValueError(f"set universe must have 1..{MAX_SET_UNIVERSE} elements")
        if (self.lower | self.upper) >> self.universe_size:
            raise ValueError("bounds exceed the universe")

    @classmethod
    def unconstrained(cls, universe_size: int) -> SetDomain:
        return cls(0, (1 << universe_size) - 1, universe_size)

    @property
    def is_valid(self) -> bool:
        return self.lower & ~self.upper == 0

    @property
    def is_bound(self) -> bool:
        return self.lower == self.upper

    def required(self) -> frozenset[int]:
        return frozenset(iter_bits(self.lower))

    def possible(self) -> frozenset[int]:
        return frozenset(iter_bits(self.upper))

    def __len__(self) -> int:
        """Number of sets between the bounds (0 if the bounds cross)."""
        if not self.is_valid:
            return 0
        return 1 << bin(self.upper & ~self.lower).count("1")


class Constraint:
    scope: tuple[VarId, ...]

    def revise(self, store: Store) -> bool:
        """Narrow domains of the scope; return False on a wipe-out."""
        raise NotImplementedError


class TableConstraint(Constraint):
    """Extensional constraint: the scope must take one of the listed tuples.

    Supports are looked up per (position, value) and the last support found
    is cached as a residue; a residue that is still valid is accepted without
    rescanning.
    """

    def __init__(self, scope: Sequence[VarId], tuples: Iterable[Sequence[int]]):
        self.scope = tuple(scope)
        self.tuples = tuple(sorted({tuple(t) for t in tuples}))
        arity = len(self.scope)
        self._by_value: list[dict[int, list[int]]] = [defaultdict(list) for _ in range(arity)]
        for ti, t in enumerate(self.tuples):
            if len(t) != arity:
                raise ArityError(f"tuple {t} does not match arity {arity}")
            for pos, val in enumerate(t):
                self._by_value[pos][val].append(ti)
        self._residue: dict[tuple[int, int], int] = {}

    def _valid(self, doms: list, t: tuple[int, ...]) -> bool:
        for var, val in zip(self.scope, t):
            if not doms[var] >> val & 1:
                return False
        return True

    def find_support(self, doms: list, pos: int, val: int) -> tuple[int, ...] | None:
        key = (pos, val)
        ti = self._residue.get(key)
        if ti is not None and self._valid(doms, self.tuples[ti]):
            return self.tuples[ti]
        for ti in self._by_value[pos].get(val, ()):
            t = self.tuples[ti]
            if self._valid(doms, t):
                self._residue[key] = ti
                return t
        return None

    def revise(self, store: Store) -> bool:
        doms = store._dom
        for pos, var in enumerate(self.scope):
            dom = doms[var]
            keep = dom
            for val in iter_bits(dom):
                if self.find_support(doms, pos, val) is None:
                    keep &= ~(1 << val)
            if keep != dom and not store._narrow(var, keep):
                return False
        return True


class SetMembership(Constraint):
    def __init__(self, var: VarId, element: int, required: bool):
        self.scope = (var,)
        self.element = element
        self.required = required

    def revise(self, store: Store) -> bool:
        var = self.scope[0]
        lo, up = store._dom[var]
        bit = 1 << self.element
        if self.required:
            lo |= bit
        else:
            up &= ~bit
        return store._narrow_set(var, lo, up)


class SetEnumChannel(Constraint):
    """enum_var == i  <=>  set_var == valid_sets[i], enforced on set bounds."""

    def __init__(self, set_var: VarId, enum_var: VarId, valid_sets: Sequence[int]):
        self.scope = (set_var, enum_var)
        self.valid_sets = tuple(valid_sets)

    def revise(self, store: Store) -> bool:
        set_var, enum_var = self.scope
        lo, up = store._dom[set_var]
        dom = store._dom[enum_var]
        keep = 0
        inter = -1
        union = 0
        for i in iter_bits(dom):
            s = self.valid_sets[i]
            if lo & ~s == 0 and s & ~up == 0:
                keep |= 1 << i
                inter &= s
                union |= s
        if not store._narrow(enum_var, keep):
            return False
        return store._narrow_set(set_var, lo | inter, up & union)


class ArrayConstraint(Constraint):
    """cells[x1, ..., xd] takes a value in ``target``, with the indices x1..xd variables.

    Index values are pruned when no completion of the other indices selects a
    cell whose domain meets the target; once every index is bound the selected
    cell is intersected with the target. This is weaker than GAC on the whole
    conjunction: cell domains are not pruned while indices remain open.
    A ``None`` cell never satisfies the constraint.
    """

    def __init__(self, index_vars: Sequence[VarId], cells: dict[tuple[int, ...], VarId | None],
                 shape: tuple[int, ...], target: int):
        self.index_vars = tuple(index_vars)
        self.cells = cells
        self.shape = shape
        self.target = target
        self.scope = self.index_vars + tuple(sorted({c for c in cells.values() if c is not None}))

    def revise(self, store: Store) -> bool:
        doms = store._dom
        index_doms = [tuple(iter_bits(doms[x])) for x in self.index_vars]
        supported = [0] * len(self.index_vars)
        for combo in itertools.product(*index_doms):
            cell = self.cells[combo]
            if cell is not None and doms[cell] & self.target:
                for k, val in enumerate(combo):
                    supported[k] |= 1 << val
        for x, keep in zip(self.index_vars, supported):
            if not store._narrow(x, doms[x] & keep):
                return False
        if all(len(d) == 1 for d in index_doms):
            cell = self.cells[tuple(d[0] for d in index_doms)]
            return store._narrow(cell, doms[cell] & self.target)
        return True


def smallest_domain_first(store: Store, candidates: Sequence[VarId]) -> VarId:
    return min(candidates, key=lambda v: (store.domain_size(v), v))


def ascending(values: Sequence[int]) -> Sequence[int]:
    return values


class Store:
    """A single-threaded constraint store."""

    def __init__(self):
        self._is_set: list[bool] = []
        self._universe: list[int] = []
        self._dom: list = []
        self._watch: list[list[ConstraintId]] = []
        self._constraints: list[Constraint] = []
        self._trail: list[tuple[VarId, object]] = []
        self._queue: deque[ConstraintId] = deque()
        self._queued: set[ConstraintId] = set()

    # -- variables -----------------------------------------------------------

    def new_var(self, domain: FiniteDomain) -> VarId:
        if domain.is_empty:
            raise EmptyDomain("initial domain is empty")
        return self._add_var(False, domain.universe_size, domain.bits)

    def new_set_var(self, domain: SetDomain) -> VarId:
        if not domain.is_valid:
            raise EmptyDomain("set bounds cross: lower is not a subset of upper")
        return self._add_var(True, domain.universe_size, (domain.lower, domain.upper))

    def _add_var(self, is_set: bool, universe: int, value) -> VarId:
        var = len(self._dom)
        self._is_set.append(is_set)
        self._universe.append(universe)
        self._dom.append(value)
        self._watch.append([])
        return var

    @property
    def num_vars(self) -> int:
        return len(self._dom)

    @property
    def num_constraints(self) -> int:
        return len(self._constraints)

    def is_set_var(self, var: VarId) -> bool:
        return self._is_set[var]

    def domain(self, var: VarId) -> FiniteDomain | SetDomain:
        if self._is_set[var]:
            lo, up = self._dom[var]
            return SetDomain(lo, up, self._universe[var])
        return FiniteDomain(self._dom[var], self._universe[var])

    def bits(self, var: VarId) -> int:
        return self._dom[var]

    def domain_size(self, var: VarId) -> int:
        return len(self.domain(var))

    def is_bound(self, var: VarId) -> bool:
        return self.domain(var).is_bound

    def snapshot(self) -> tuple:
        return tuple(self._dom)

    # -- constraints ---------------------------------------------------------

    def _check_vars(self, scope: Iterable[VarId]):
        for var in scope:
            if not 0 <= var < len(self._dom):
                raise KeyError(f"unknown variable {var}")

    def _post(self, constraint: Constraint) -> ConstraintId:
        cid = len(self._constraints)
        self._constraints.append(constraint)
        for var in set(constraint.scope):
            self._watch[var].append(cid)
        self._schedule(cid)
        return cid

    def constraint(self, cid: ConstraintId) -> Constraint:
        return self._constraints[cid]

    def post_table(self, scope: Sequence[VarId], tuples: Iterable[Sequence[int]]) -> ConstraintId:
        scope = tuple(scope)
        if not scope:
            raise ArityError("table constraint needs arity >= 1")
        self._check_vars(scope)
        for var in scope:
            if self._is_set[var]:
                raise TypeError("table constraints take finite variables; channel set variables first")
        constraint = TableConstraint(scope, tuples)
        for t in constraint.tuples:
            for var, val in zip(scope, t):
                if not 0 <= val < self._universe[var]:
                    raise ArityError(f"tuple {t}: value {val} outside universe of variable {var}")
        return self._post(constraint)

    def post_set_membership(self, var: VarId, element: int, required: bool) -> ConstraintId:
        self._check_vars([var])
        if not self._is_set[var]:
            raise TypeError(f"variable {var} is not a set variable")
        if not 0 <= element < self._universe[var]:
            raise ValueError(f"element {element} outside universe")
        return self._post(SetMembership(var, element, required))

    def channel_set_to_enum(self, set_var: VarId, enum_var: VarId,
                            valid_sets: Sequence[Iterable[int]]) -> ConstraintId:
        self._check_vars([set_var, enum_var])
        if not self._is_set[set_var] or self._is_set[enum_var]:
            raise TypeError("expected (set variable, finite variable)")
        masks = [mask_of(s) for s in valid_sets]
        if len(set(masks)) != len(masks):
            raise ValueError("valid sets must be distinct")
        if any(m >> self._universe[set_var] for m in masks):
            raise ValueError("valid set exceeds the set universe")
        if len(masks) != self._universe[enum_var]:
            raise ArityError("enum universe must equal the number of valid sets")
        return self._post(SetEnumChannel(set_var, enum_var, masks))

    def post_array_constraint(self, index_vars: Sequence[VarId], cell_vars, target: Iterable[int] | int
                              ) -> ConstraintId:
        """Post ``cell_vars[x1]...[xd] in target`` with ``index_vars = (x1, ..., xd)``.

        ``cell_vars`` is a d-dimensional nested sequence of variable ids (or
        None for cells that can never be selected) and ``target`` a bitmask or
        an iterable of value indices.
        """
        index_vars = tuple(index_vars)
        self._check_vars(index_vars)
        cells: dict[tuple[int, ...], VarId] = {}
        shape = _nested_shape(cell_vars)
        if len(shape) != len(index_vars):
            raise ArityError(f"{len(index_vars)} index variables for a {len(shape)}-dimensional array")
        for idx in itertools.product(*(range(s) for s in shape)):
            cell = cell_vars
            for i in idx:
                cell = cell[i]
            cells[idx] = cell
        self._check_vars(c for c in cells.values() if c is not None)
        for x, size in zip(index_vars, shape):
            if self._dom[x] >> size:
                raise ValueError(f"index variable {x} ranges beyond array bound {size}")
        target_mask = target if isinstance(target, int) else mask_of(target)
        return self._post(ArrayConstraint(index_vars, cells, shape, target_mask))

    def support(self, cid: ConstraintId, pos: int, value: int) -> tuple[int, ...] | None:
        """A tuple of table constraint ``cid`` that supports ``value`` at ``pos``."""
        constraint = self._constraints[cid]
        if not isinstance(constraint, TableConstraint):
            raise TypeError("supports are only defined for table constraints")
        return constraint.find_support(self._dom, pos, value)

    # -- propagation ---------------------------------------------------------

    def _schedule(self, cid: ConstraintId):
        if cid not in self._queued:
            self._queued.add(cid)
            self._queue.append(cid)

    def _narrow(self, var: VarId, bits: int) -> bool:
        old = self._dom[var]
        if bits == old:
            return True
        self._trail.append((var, old))
        self._dom[var] = bits
        if bits == 0:
            return False
        for cid in self._watch[var]:
            self._schedule(cid)
        return True

    def _narrow_set(self, var: VarId, lo: int, up: int) -> bool:
        old = self._dom[var]
        if (lo, up) == old:
            return True
        self._trail.append((var, old))
        self._dom[var] = (lo, up)
        if lo & ~up:
            return False
        for cid in self._watch[var]:
            self._schedule(cid)
        return True

    def propagate(self, rng: random.Random | None = None) -> bool:
        """Revise scheduled constraints to a fixpoint.

        Returns True at a fixpoint (every table constraint is then GAC) and
        False when a domain empties. ``rng`` picks queue entries at random,
        which must not change the fixpoint reached.
        """
        queue = self._queue
        while queue:
            if rng is not None and len(queue) > 1:
                queue.rotate(-rng.randrange(len(queue)))
            cid = queue.popleft()
            self._queued.discard(cid)
            if not self._constraints[cid].revise(self):
                queue.clear()
                self._queued.clear()
                return False
        return True

    # -- search --------------------------------------------------------------

    def _undo(self, mark: int):
        trail = self._trail
        dom = self._dom
        while len(trail) > mark:
            var, old = trail.pop()
            dom[var] = old

    def _branches(self, var: VarId, value_order) -> Iterator[tuple]:
        if self._is_set[var]:
            lo, up = self._dom[var]
            e = next(iter_bits(up & ~lo))
            yield (lo | 1 << e, up)
            yield (lo, up & ~(1 << e))
        else:
            for val in value_order(tuple(iter_bits(self._dom[var]))):
                yield 1 << val

    def _apply(self, var: VarId, choice) -> bool:
        if self._is_set[var]:
            return self._narrow_set(var, *choice)
        return self._narrow(var, choice)

    def _value(self, var: VarId):
        if self._is_set[var]:
            return frozenset(iter_bits(self._dom[var][0]))
        return self._dom[var].bit_length() - 1

    def solutions(self, var_order: Callable = smallest_domain_first,
                  value_order: Callable = ascending) -> Iterator[dict[VarId, object]]:
        """Enumerate all solutions; the store is restored once exhausted.

        Finite variables map to value indices, set variables to frozensets.
        """
        mark = len(self._trail)
        pending = list(self._queue)
        try:
            if self.propagate():
                yield from self._search(var_order, value_order)
        finally:
            self._queue.clear()
            self._queued.clear()
            self._undo(mark)
            for cid in pending:
                self._schedule(cid)

    def _search(self, var_order, value_order):
        open_vars = [v for v in range(len(self._dom)) if not self.is_bound(v)]
        if not open_vars:
            yield {v: self._value(v) for v in range(len(self._dom))}
            return
        var = var_order(self, open_vars)
        for choice in self._branches(var, value_order):
            mark = len(self._trail)
            if self._apply(var, choice) and self.propagate():
                yield from self._search(var_order, value_order)
            self._queue.clear()
            self._queued.clear()
            self._undo(mark)

    def solve(self, var_order: Callable = smallest_domain_first,
              value_order: Callable = ascending) -> dict[VarId, object] | None:
        """First solution in search order, or None if the store is unsatisfiable."""
        gen = self.solutions(var_order, value_order)
        try:
            return next(gen, None)
        finally:
            gen.close()


def _nested_shape(cells) -> tuple[int, ...]:
    shape = []
    level = cells
    while isinstance(level, (list, tuple)):
        shape.append(len(level))
        if not level:
            break
        level = level[0]
    return tuple(shape)
