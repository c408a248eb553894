"""Finite-domain constraint model with deterministic propagation.

Domains are encoded as integer bitmasks over a model-wide value offset, so
value-based pruning across variables (all-different) is plain bit arithmetic.
The propagation strength per constraint kind is fixed and documented below;
together with the FIFO queue order (seeded in constraint declaration order)
this makes every fixpoint fully deterministic:

* ``all_different``  -- value consistency: assigned values are removed from
  the other domains in scope, repeated to a local fixpoint; duplicate
  assigned values fail.
* ``linear_eq`` / ``linear_le`` -- bounds consistency on the weighted sum.
* ``abs_diff`` (z = \\|x - y\\|) -- value consistency on all three variables:
  a value survives iff it has a support in the other two domains, checked
  word-parallel with mask shifts (a - b == v  <=>  (dx >> v) & dy != 0).
* ``not_equal`` (x != y + offset) -- value removal once one side is assigned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union


class InconsistentProblem(ValueError):
    """Raised when an input required to be propagation-consistent is not."""


@dataclass(frozen=True)
class VariableDecl:
    name: str
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(sorted(set(self.values)))
        if not vals:
            raise ValueError(f"variable {self.name!r} declared with an empty domain")
        object.__setattr__(self, "values", vals)


def var_range(name: str, lo: int, hi: int) -> VariableDecl:
    if lo > hi:
        raise ValueError(f"variable {name!r}: empty range [{lo}, {hi}]")
    return VariableDecl(name, tuple(range(lo, hi + 1)))


@dataclass(frozen=True)
class AllDifferent:
    vars: tuple[int, ...]

    @property
    def scope(self) -> tuple[int, ...]:
        return self.vars


@dataclass(frozen=True)
class LinearEq:
    """sum(coeffs[i] * vars[i]) == rhs"""

    coeffs: tuple[int, ...]
    vars: tuple[int, ...]
    rhs: int

    @property
    def scope(self) -> tuple[int, ...]:
        return self.vars


@dataclass(frozen=True)
class LinearLe:
    """sum(coeffs[i] * vars[i]) <= rhs"""

    coeffs: tuple[int, ...]
    vars: tuple[int, ...]
    rhs: int

    @property
    def scope(self) -> tuple[int, ...]:
        return self.vars


@dataclass(frozen=True)
class AbsDiff:
    """z == |x - y|"""

    x: int
    y: int
    z: int

    @property
    def scope(self) -> tuple[int, ...]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class NotEqual:
    """x != y + offset"""

    x: int
    y: int
    offset: int = 0

    @property
    def scope(self) -> tuple[int, ...]:
        return (self.x, self.y)


Constraint = Union[AllDifferent, LinearEq, LinearLe, AbsDiff, NotEqual]

_ALLDIFF, _LINEQ, _LINLE, _ABSDIFF, _NOTEQ = range(5)


@dataclass(frozen=True)
class Objective:
    var: int
    maximize: bool = False


class Model:
    """Immutable problem description plus precomputed propagation tables.

    A Model is built once and shared read-only by every worker; all mutable
    search state lives in the domain-mask lists handed to :func:`propagate`.
    """

    def __init__(
        self,
        name: str,
        variables: Sequence[VariableDecl],
        constraints: Sequence[Constraint],
        objective: Optional[Objective] = None,
    ):
        if not variables:
            raise ValueError("a model needs at least one variable")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.name = name
        self.variables = tuple(variables)
        self.constraints = tuple(constraints)
        self.objective = objective
        self.n = len(variables)
        self.names = tuple(names)
        self.index_of = {nm: i for i, nm in enumerate(names)}

        self.lo = min(v.values[0] for v in variables)
        hi = max(v.values[-1] for v in variables)
        self.ubits = hi - self.lo + 1

        base = self.lo
        masks = []
        for v in variables:
            m = 0
            for val in v.values:
                m |= 1 << (val - base)
            masks.append(m)
        self.initial_masks = tuple(masks)

        for ci, c in enumerate(self.constraints):
            scope = c.scope
            if not scope:
                raise ValueError(f"constraint #{ci} has empty scope")
            for v in scope:
                if not 0 <= v < self.n:
                    raise ValueError(f"constraint #{ci} references unknown variable index {v}")
            if isinstance(c, (LinearEq, LinearLe)) and len(c.coeffs) != len(c.vars):
                raise ValueError(f"constraint #{ci}: coefficient/variable length mismatch")
        if objective is not None and not 0 <= objective.var < self.n:
            raise ValueError("objective references unknown variable index")

        self.scopes = tuple(c.scope for c in self.constraints)

        # Compiled propagator table: plain tuples keyed by an int kind so the
        # propagation loop does no attribute lookups.
        props = []
        for c in self.constraints:
            if isinstance(c, AllDifferent):
                props.append((_ALLDIFF, c.vars))
            elif isinstance(c, LinearEq):
                props.append((_LINEQ, tuple(zip(c.coeffs, c.vars)), c.rhs))
            elif isinstance(c, LinearLe):
                props.append((_LINLE, tuple(zip(c.coeffs, c.vars)), c.rhs))
            elif isinstance(c, AbsDiff):
                props.append((_ABSDIFF, c.x, c.y, c.z))
            elif isinstance(c, NotEqual):
                props.append((_NOTEQ, c.x, c.y, c.offset))
            else:
                raise TypeError(f"unknown constraint type {type(c).__name__}")
        self._props = tuple(props)

        watch: list[list[int]] = [[] for _ in range(self.n)]
        for ci, c in enumerate(self.constraints):
            for v in c.scope:
                if ci not in watch[v]:
                    watch[v].append(ci)
        self.watchers = tuple(tuple(w) for w in watch)

        # static "most constrained" degree: number of constraints per variable
        self.static_degree = tuple(len(w) for w in self.watchers)

    # -- mask helpers ------------------------------------------------------

    def value_bit(self, value: int) -> int:
        off = value - self.lo
        if 0 <= off < self.ubits:
            return 1 << off
        return 0

    def range_mask(self, a: int, b: int) -> int:
        """Mask of all representable values in [a, b]."""
        a = max(a - self.lo, 0)
        b = min(b - self.lo, self.ubits - 1)
        if a > b:
            return 0
        return ((1 << (b - a + 1)) - 1) << a

    def decode(self, mask: int) -> tuple[int, ...]:
        base = self.lo
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1 + base)
            mask ^= low
        return tuple(out)


@dataclass
class SearchState:
    """Domains of one search node. Restoration is by copy; exact by design."""

    model: Model
    masks: list[int]
    failed: bool = False

    def domains(self) -> list[tuple[int, ...]]:
        return [self.model.decode(m) for m in self.masks]

    def domain(self, var: int) -> tuple[int, ...]:
        return self.model.decode(self.masks[var])

    def is_assigned(self, var: int) -> bool:
        d = self.masks[var]
        return d != 0 and d & (d - 1) == 0


def root_state(model: Model) -> SearchState:
    return SearchState(model, list(model.initial_masks))


def assign(state: SearchState, var: int, value: int) -> SearchState:
    """Fix ``var`` to ``value`` without propagating (caller composes)."""
    bit = state.model.value_bit(value)
    if not state.masks[var] & bit:
        raise ValueError(
            f"value {value} not in the domain of {state.model.names[var]}"
        )
    masks = list(state.masks)
    masks[var] = bit
    return SearchState(state.model, masks, state.failed)


def propagate(state: SearchState, model: Optional[Model] = None) -> SearchState:
    """Run all propagators to fixpoint; returns a new state, maybe failed."""
    m = model if model is not None else state.model
    if state.failed:
        return SearchState(m, list(state.masks), True)
    masks = list(state.masks)
    fail, _ = _propagate(m, masks, range(len(m.constraints)), [])
    return SearchState(m, masks, fail >= 0)


def _propagate(
    model: Model,
    doms: list[int],
    wake: Iterable[int],
    pruned: list[int],
) -> tuple[int, int]:
    """Fixpoint loop over a FIFO queue of constraint indices.

    Mutates ``doms`` in place and appends every pruned variable index to
    ``pruned`` (duplicates possible; callers dedupe per decision). Returns
    ``(failing_constraint_index_or_minus_1, propagator_passes)``.
    """
    props = model._props
    watchers = model.watchers
    base = model.lo
    ubits = model.ubits
    nprops = len(props)
    inq = bytearray(nprops)
    q = deque()
    for ci in wake:
        if not inq[ci]:
            inq[ci] = 1
            q.append(ci)
    qpop = q.popleft
    qpush = q.append
    passes = 0

    while q:
        ci = qpop()
        inq[ci] = 0
        p = props[ci]
        kind = p[0]
        passes += 1

        if kind == _ALLDIFF:
            scope = p[1]
            changed = True
            while changed:
                changed = False
                amask = 0
                for v in scope:
                    d = doms[v]
                    if d & (d - 1) == 0:
                        if amask & d:
                            return ci, passes
                        amask |= d
                for v in scope:
                    d = doms[v]
                    if d & (d - 1):
                        nd = d & ~amask
                        if nd != d:
                            doms[v] = nd
                            pruned.append(v)
                            if not nd:
                                return ci, passes
                            changed = True
                            for w in watchers[v]:
                                if w != ci and not inq[w]:
                                    inq[w] = 1
                                    qpush(w)

        elif kind == _LINEQ or kind == _LINLE:
            pairs = p[1]
            rhs = p[2]
            is_eq = kind == _LINEQ
            while True:
                smin = 0
                smax = 0
                for c, v in pairs:
                    d = doms[v]
                    vmin = (d & -d).bit_length() - 1 + base
                    vmax = d.bit_length() - 1 + base
                    if c > 0:
                        smin += c * vmin
                        smax += c * vmax
                    else:
                        smin += c * vmax
                        smax += c * vmin
                if smin > rhs or (is_eq and rhs > smax):
                    return ci, passes
                changed = False
                for c, v in pairs:
                    d = doms[v]
                    vmin = (d & -d).bit_length() - 1 + base
                    vmax = d.bit_length() - 1 + base
                    if c > 0:
                        cmin = c * vmin
                        cmax = c * vmax
                    else:
                        cmin = c * vmax
                        cmax = c * vmin
                    rmin = smin - cmin
                    if is_eq:
                        rmax = smax - cmax
                        # c*x in [rhs - rmax, rhs - rmin]
                        if c > 0:
                            nlo = -((-(rhs - rmax)) // c)
                            nhi = (rhs - rmin) // c
                        else:
                            nlo = -((-(rhs - rmin)) // c)
                            nhi = (rhs - rmax) // c
                    else:
                        # c*x <= rhs - rmin
                        if c > 0:
                            nlo = vmin
                            nhi = (rhs - rmin) // c
                        else:
                            nlo = -((-(rhs - rmin)) // c)
                            nhi = vmax
                    if nlo > vmin or nhi < vmax:
                        a = max(nlo - base, 0)
                        b = min(nhi - base, ubits - 1)
                        nd = d & ((((1 << (b - a + 1)) - 1) << a) if a <= b else 0)
                        if nd != d:
                            doms[v] = nd
                            pruned.append(v)
                            if not nd:
                                return ci, passes
                            changed = True
                            for w in watchers[v]:
                                if w != ci and not inq[w]:
                                    inq[w] = 1
                                    qpush(w)
                if not changed:
                    break

        elif kind == _ABSDIFF:
            x = p[1]
            y = p[2]
            z = p[3]
            while True:
                dx = doms[x]
                dy = doms[y]
                dz = doms[z]
                # z keeps v iff some pair differs by exactly v
                nz = 0
                d = dz
                while d:
                    low = d & -d
                    d ^= low
                    v = low.bit_length() - 1 + base
                    if v >= 0 and ((dx >> v) & dy or (dy >> v) & dx):
                        nz |= low
                # x keeps a iff a-v or a+v lands in dy for some surviving v
                sup_x = 0
                sup_y = 0
                d = nz
                while d:
                    low = d & -d
                    d ^= low
                    v = low.bit_length() - 1 + base
                    sup_x |= (dy << v) | (dy >> v)
                    sup_y |= (dx << v) | (dx >> v)
                nx = dx & sup_x
                ny = dy & sup_y
                changed = False
                for var_i, nd, od in ((z, nz, dz), (x, nx, dx), (y, ny, dy)):
                    if nd != od:
                        doms[var_i] = nd
                        pruned.append(var_i)
                        if not nd:
                            return ci, passes
                        changed = True
                        for w in watchers[var_i]:
                            if w != ci and not inq[w]:
                                inq[w] = 1
                                qpush(w)
                if not changed:
                    break

        else:  # _NOTEQ
            x = p[1]
            y = p[2]
            off = p[3]
            dx = doms[x]
            dy = doms[y]
            if dx & (dx - 1) == 0:
                vx = dx.bit_length() - 1 + base
                bit = model.value_bit(vx - off)
                if dy & bit:
                    nd = dy & ~bit
                    doms[y] = nd
                    pruned.append(y)
                    if not nd:
                        return ci, passes
                    for w in watchers[y]:
                        if w != ci and not inq[w]:
                            inq[w] = 1
                            qpush(w)
                    dy = nd
            if dy & (dy - 1) == 0:
                vy = dy.bit_length() - 1 + base
                bit = model.value_bit(vy + off)
                if dx & bit:
                    nd = dx & ~bit
                    doms[x] = nd
                    pruned.append(x)
                    if not nd:
                        return ci, passes
                    for w in watchers[x]:
                        if w != ci and not inq[w]:
                            inq[w] = 1
                            qpush(w)

    return -1, passes
