"""Pseudo-Boolean functions as reduced ordered decision diagrams.

Every function lives in a DiagramStore that owns the unique table, so two
functions from the same store are pointwise equal exactly when they share a
root handle.  Terminals are double-precision reals deduplicated by value
equality (no epsilon merging).  Internal nodes branch on a variable; on any
root-to-terminal path the variable ranks given by the store's VarOrder
strictly increase.

A store and its diagrams belong to a single solve and are used by one worker
at a time; diagrams are immutable once created.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterable


class ResourceLimitError(Exception):
    """Diagram node count exceeded the configured cap."""


class DeadlineExceeded(Exception):
    """Wall-clock deadline hit during diagram operations."""


class VarOrder:
    """Fixed bijection from variables to diagram levels, total for one solve."""

    __slots__ = ("_rank", "_vars")

    def __init__(self, variables: Iterable[int]):
        self._vars = tuple(variables)
        self._rank = {v: i for i, v in enumerate(self._vars)}
        if len(self._rank) != len(self._vars):
            raise ValueError("variable order contains duplicates")

    def rank(self, var: int) -> int:
        return self._rank[var]

    def __contains__(self, var: int) -> bool:
        return var in self._rank

    def __len__(self) -> int:
        return len(self._vars)

    @property
    def variables(self) -> tuple[int, ...]:
        return self._vars


class DiagramStore:
    """Hash-consed node store plus operation caches for one solve.

    Handles are indices into parallel arrays.  A terminal has var 0 and a
    value; an internal node has a positive var and two child handles.  The
    operation cache may be cleared at any point without changing results.
    """

    _CHECK_EVERY = 4096  # deadline poll interval, in node creations

    def __init__(self, order: VarOrder, node_limit: int | None = None,
                 deadline: float | None = None):
        self.order = order
        self.node_limit = node_limit
        self.deadline = deadline
        self._var: list[int] = []
        self._lo: list[int] = []
        self._hi: list[int] = []
        self._val: list[float] = []
        self._terms: dict[float, int] = {}
        self._unique: dict[tuple[int, int, int], int] = {}
        self._cache: dict[tuple, int] = {}
        self._support_cache: dict[int, frozenset[int]] = {}
        self._since_check = 0
        self.zero = self._terminal(0.0)
        self.one = self._terminal(1.0)

    # -- node construction -------------------------------------------------

    def _bump(self):
        if self.node_limit is not None and len(self._var) >= self.node_limit:
            raise ResourceLimitError(
                f"diagram store exceeded {self.node_limit} nodes")
        self._since_check += 1
        if self.deadline is not None and self._since_check >= self._CHECK_EVERY:
            self._since_check = 0
            if time.monotonic() > self.deadline:
                raise DeadlineExceeded("deadline hit during execution")

    def _terminal(self, value: float) -> int:
        h = self._terms.get(value)
        if h is not None:
            return h
        self._bump()
        h = len(self._var)
        self._var.append(0)
        self._lo.append(-1)
        self._hi.append(-1)
        self._val.append(value)
        self._terms[value] = h
        return h

    def _node(self, var: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (var, lo, hi)
        h = self._unique.get(key)
        if h is not None:
            return h
        self._bump()
        h = len(self._var)
        self._var.append(var)
        self._lo.append(lo)
        self._hi.append(hi)
        self._val.append(0.0)
        self._unique[key] = h
        return h

    @property
    def node_count(self) -> int:
        """Total nodes ever created (terminals included); monotone."""
        return len(self._var)

    def clear_cache(self):
        self._cache.clear()

    # -- public constructors ------------------------------------------------

    def constant(self, c: float) -> "PbFunc":
        if not math.isfinite(c):
            raise ValueError(f"terminal value must be finite, got {c}")
        return PbFunc(self, self._terminal(float(c)))

    def clause_func(self, clause: Iterable[int]) -> "PbFunc":
        """0/1 diagram of a disjunction of signed literals.

        The clause must not mention a variable twice (tautologies have no
        diagram here; an empty clause yields constant 0).
        """
        lits = sorted(clause, key=lambda l: self.order.rank(abs(l)), reverse=True)
        h = self.zero
        for l in lits:
            v = abs(l)
            if l > 0:
                h = self._node(v, h, self.one)
            else:
                h = self._node(v, self.one, h)
        return PbFunc(self, h)

    # -- internal recursive operations (handle level) -----------------------

    def _is_term(self, h: int) -> bool:
        return self._var[h] == 0

    def _top_rank(self, h: int) -> int:
        v = self._var[h]
        return self.order.rank(v) if v else len(self.order)

    def _mul(self, f: int, g: int) -> int:
        if f == self.one:
            return g
        if g == self.one:
            return f
        if f == self.zero or g == self.zero:
            return self.zero
        if self._var[f] == 0 and self._var[g] == 0:
            return self._terminal(self._val[f] * self._val[g])
        if f > g:
            f, g = g, f
        key = ("*", f, g)
        h = self._cache.get(key)
        if h is not None:
            return h
        rf, rg = self._top_rank(f), self._top_rank(g)
        r = min(rf, rg)
        f0, f1 = (self._lo[f], self._hi[f]) if rf == r else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if rg == r else (g, g)
        h = self._node(self.order.variables[r],
                       self._mul(f0, g0), self._mul(f1, g1))
        self._cache[key] = h
        return h

    def _max2(self, f: int, g: int) -> int:
        if f == g:
            return f
        if self._var[f] == 0 and self._var[g] == 0:
            return self._terminal(max(self._val[f], self._val[g]))
        if f > g:
            f, g = g, f
        key = ("max", f, g)
        h = self._cache.get(key)
        if h is not None:
            return h
        rf, rg = self._top_rank(f), self._top_rank(g)
        r = min(rf, rg)
        f0, f1 = (self._lo[f], self._hi[f]) if rf == r else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if rg == r else (g, g)
        h = self._node(self.order.variables[r],
                       self._max2(f0, g0), self._max2(f1, g1))
        self._cache[key] = h
        return h

    def _convex(self, f1: int, f0: int, p: float) -> int:
        """p * f1 + (1-p) * f0 pointwise."""
        if f1 == f0:
            return f1
        if self._var[f1] == 0 and self._var[f0] == 0:
            return self._terminal(p * self._val[f1] + (1.0 - p) * self._val[f0])
        key = ("cvx", f1, f0, p)
        h = self._cache.get(key)
        if h is not None:
            return h
        r1, r0 = self._top_rank(f1), self._top_rank(f0)
        r = min(r1, r0)
        a0, a1 = (self._lo[f1], self._hi[f1]) if r1 == r else (f1, f1)
        b0, b1 = (self._lo[f0], self._hi[f0]) if r0 == r else (f0, f0)
        h = self._node(self.order.variables[r],
                       self._convex(a0, b0, p), self._convex(a1, b1, p))
        self._cache[key] = h
        return h

    def _ge(self, f: int, g: int) -> int:
        """1.0 where f >= g pointwise, else 0.0."""
        if f == g:
            return self.one
        if self._var[f] == 0 and self._var[g] == 0:
            return self.one if self._val[f] >= self._val[g] else self.zero
        key = ("ge", f, g)
        h = self._cache.get(key)
        if h is not None:
            return h
        rf, rg = self._top_rank(f), self._top_rank(g)
        r = min(rf, rg)
        f0, f1 = (self._lo[f], self._hi[f]) if rf == r else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if rg == r else (g, g)
        h = self._node(self.order.variables[r],
                       self._ge(f0, g0), self._ge(f1, g1))
        self._cache[key] = h
        return h

    def _exists(self, f: int, x: int) -> int:
        rx = self.order.rank(x)
        if self._top_rank(f) > rx:
            return f  # x cannot occur below this node
        if self._var[f] == x:
            return self._max2(self._lo[f], self._hi[f])
        key = ("ex", f, x)
        h = self._cache.get(key)
        if h is not None:
            return h
        h = self._node(self._var[f],
                       self._exists(self._lo[f], x), self._exists(self._hi[f], x))
        self._cache[key] = h
        return h

    def _rand(self, f: int, x: int, p: float) -> int:
        rx = self.order.rank(x)
        if self._top_rank(f) > rx:
            return f  # absent variable: p*f + (1-p)*f = f
        if self._var[f] == x:
            return self._convex(self._hi[f], self._lo[f], p)
        key = ("rp", f, x, p)
        h = self._cache.get(key)
        if h is not None:
            return h
        h = self._node(self._var[f],
                       self._rand(self._lo[f], x, p), self._rand(self._hi[f], x, p))
        self._cache[key] = h
        return h

    def _dsgn(self, f: int, x: int) -> int:
        rx = self.order.rank(x)
        if self._top_rank(f) > rx:
            return self.one  # cofactors coincide; ties choose 1
        if self._var[f] == x:
            return self._ge(self._hi[f], self._lo[f])
        key = ("ds", f, x)
        h = self._cache.get(key)
        if h is not None:
            return h
        h = self._node(self._var[f],
                       self._dsgn(self._lo[f], x), self._dsgn(self._hi[f], x))
        self._cache[key] = h
        return h

    def _support(self, f: int) -> frozenset[int]:
        got = self._support_cache.get(f)
        if got is not None:
            return got
        if self._var[f] == 0:
            out: frozenset[int] = frozenset()
        else:
            out = (self._support(self._lo[f]) | self._support(self._hi[f])
                   | {self._var[f]})
        self._support_cache[f] = out
        return out

    def _terminals(self, f: int) -> set[float]:
        out: set[float] = set()
        seen: set[int] = set()
        stack = [f]
        while stack:
            h = stack.pop()
            if h in seen:
                continue
            seen.add(h)
            if self._var[h] == 0:
                out.add(self._val[h])
            else:
                stack.append(self._lo[h])
                stack.append(self._hi[h])
        return out

    def approx_equal(self, f: "PbFunc", g: "PbFunc", tol: float) -> bool:
        """Pointwise |f - g| <= tol, by simultaneous traversal."""
        memo: dict[tuple[int, int], bool] = {}

        def rec(a: int, b: int) -> bool:
            if a == b:
                return True
            key = (a, b)
            got = memo.get(key)
            if got is not None:
                return got
            if self._var[a] == 0 and self._var[b] == 0:
                ok = abs(self._val[a] - self._val[b]) <= tol
            else:
                ra, rb = self._top_rank(a), self._top_rank(b)
                r = min(ra, rb)
                a0, a1 = (self._lo[a], self._hi[a]) if ra == r else (a, a)
                b0, b1 = (self._lo[b], self._hi[b]) if rb == r else (b, b)
                ok = rec(a0, b0) and rec(a1, b1)
            memo[key] = ok
            return ok

        if f.store is not self or g.store is not self:
            raise ValueError("functions belong to a different store")
        return rec(f.root, g.root)


class PbFunc:
    """A pseudo-Boolean function: a handle into a DiagramStore.

    Equality is pointwise equality, decided in O(1) by handle comparison
    thanks to hash consing.
    """

    __slots__ = ("store", "root")

    def __init__(self, store: DiagramStore, root: int):
        self.store = store
        self.root = root

    def _check_same_store(self, other: "PbFunc"):
        if self.store is not other.store:
            raise ValueError("operands built under different stores/orders")

    def join(self, other: "PbFunc") -> "PbFunc":
        """Pointwise product over the union of supports."""
        self._check_same_store(other)
        return PbFunc(self.store, self.store._mul(self.root, other.root))

    def exists_project(self, x: int) -> "PbFunc":
        """Pointwise max over the two cofactors of x; identity if x is absent."""
        return PbFunc(self.store, self.store._exists(self.root, x))

    def rand_project(self, x: int, p: float) -> "PbFunc":
        """Convex combination p*(x=1 cofactor) + (1-p)*(x=0 cofactor)."""
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"probability {p} outside [0, 1]")
        return PbFunc(self.store, self.store._rand(self.root, x, p))

    def dsgn(self, x: int) -> "DsgnFunc":
        """Which value of x attains the larger cofactor; ties choose 1."""
        return DsgnFunc(x, PbFunc(self.store, self.store._dsgn(self.root, x)))

    def evaluate(self, assignment: dict[int, bool]) -> float:
        """Value at a total assignment (w.r.t. this function's support)."""
        st = self.store
        h = self.root
        while st._var[h] != 0:
            v = st._var[h]
            try:
                b = assignment[v]
            except KeyError:
                raise KeyError(f"assignment is missing support variable {v}") from None
            h = st._hi[h] if b else st._lo[h]
        return st._val[h]

    @property
    def support(self) -> frozenset[int]:
        return self.store._support(self.root)

    def is_constant(self) -> bool:
        return self.store._var[self.root] == 0

    def terminal_values(self) -> set[float]:
        return self.store._terminals(self.root)

    def __eq__(self, other):
        return (isinstance(other, PbFunc) and other.store is self.store
                and other.root == self.root)

    def __hash__(self):
        return hash((id(self.store), self.root))

    def __repr__(self):
        if self.is_constant():
            return f"PbFunc(const {self.store._val[self.root]})"
        return f"PbFunc(#{self.root} over {sorted(self.support)})"

    def to_dot(self, name: str = "f") -> str:
        """GraphViz rendering; solid edge = assigned 1, dashed = assigned 0."""
        st = self.store
        lines = [f"digraph {name} {{"]
        seen: set[int] = set()
        stack = [self.root]
        while stack:
            h = stack.pop()
            if h in seen:
                continue
            seen.add(h)
            if st._var[h] == 0:
                lines.append(f'  n{h} [shape=box, label="{st._val[h]:g}"];')
            else:
                lines.append(f'  n{h} [shape=oval, label="{st._var[h]}"];')
                lines.append(f"  n{h} -> n{st._hi[h]};")
                lines.append(f"  n{h} -> n{st._lo[h]} [style=dashed];")
                stack.append(st._lo[h])
                stack.append(st._hi[h])
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class DsgnFunc:
    """A derivative sign: the variable plus its 0/1-valued chooser function.

    chooser(tau) = 1 means the variable should be set to 1 to maximize the
    function the sign was taken from, given the partial assignment tau.
    """

    var: int
    chooser: PbFunc

    def __post_init__(self):
        assert self.var not in self.chooser.support

    def pick(self, assignment: dict[int, bool]) -> bool:
        return self.chooser.evaluate(assignment) != 0.0
