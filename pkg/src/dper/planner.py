"""Graded project-join trees via blockwise variable elimination.

Planning eliminates every randomized variable before any existential one, so
the bucket-elimination construction is graded by construction: internal nodes
projecting randomized variables can never sit above nodes projecting
existential ones.  Variables that occur in no clause are not part of the
tree at all (the projection sets partition exactly the variables of the
formula); the executor assigns such existential variables a default value.

Tree file format (text, children listed before parents):

    pjt <num_nodes> <num_clauses> <num_vars>
    l <id> <clause_index>                      (clause_index is 1-based)
    i <id> <grade:x|y> <child ids...> | <projected vars...>
    r <root id>
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .formula import Problem

HEURISTICS = ("min-fill", "min-degree", "lex")

GRADE_X = "x"
GRADE_Y = "y"


class TreeError(Exception):
    """A project-join tree criterion or gradedness property is violated."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass
class PjNode:
    id: int
    clause: int | None = None          # leaf: 0-based clause index
    children: list[int] = field(default_factory=list)
    projected: frozenset[int] = frozenset()

    @property
    def is_leaf(self) -> bool:
        return self.clause is not None


@dataclass
class PjTree:
    nodes: dict[int, PjNode]
    root: int
    grade_x: set[int]                  # internal ids projecting existential vars
    grade_y: set[int]

    def internal_ids(self):
        return [i for i, n in self.nodes.items() if not n.is_leaf]

    def leaf_ids(self):
        return [i for i, n in self.nodes.items() if n.is_leaf]

    def postorder(self) -> list[int]:
        """Children before parents, left-to-right in stored child order."""
        out: list[int] = []
        stack: list[tuple[int, bool]] = [(self.root, False)]
        while stack:
            nid, expanded = stack.pop()
            if expanded:
                out.append(nid)
                continue
            stack.append((nid, True))
            for c in reversed(self.nodes[nid].children):
                stack.append((c, False))
        return out

    def free_vars(self, p: Problem) -> dict[int, frozenset[int]]:
        """Per node: clause variables beneath it not yet projected there."""
        out: dict[int, frozenset[int]] = {}
        for nid in self.postorder():
            n = self.nodes[nid]
            if n.is_leaf:
                out[nid] = p.clause_vars(n.clause)
            else:
                acc: set[int] = set()
                for c in n.children:
                    acc |= out[c]
                out[nid] = frozenset(acc - n.projected)
        return out

    def subtree_clause_vars(self, p: Problem) -> dict[int, frozenset[int]]:
        """Per node: union of clause variables over all descendant leaves."""
        out: dict[int, frozenset[int]] = {}
        for nid in self.postorder():
            n = self.nodes[nid]
            if n.is_leaf:
                out[nid] = p.clause_vars(n.clause)
            else:
                acc: set[int] = set()
                for c in n.children:
                    acc |= out[c]
                out[nid] = frozenset(acc)
        return out

    def cumulative_projected(self) -> dict[int, frozenset[int]]:
        """Per node: all variables projected at or below it."""
        out: dict[int, frozenset[int]] = {}
        for nid in self.postorder():
            n = self.nodes[nid]
            acc: set[int] = set(n.projected)
            for c in n.children:
                acc |= out[c]
            out[nid] = frozenset(acc)
        return out


# -- elimination orders ------------------------------------------------------


def _min_fill_cost(adj, v) -> int:
    nbrs = list(adj[v])
    cost = 0
    for i in range(len(nbrs)):
        for j in range(i + 1, len(nbrs)):
            if nbrs[j] not in adj[nbrs[i]]:
                cost += 1
    return cost


def elimination_order(graph: dict[int, set[int]], X, Y, heuristic: str = "min-fill",
                      seed: int = 0, randomize_ties: bool = False) -> list[int]:
    """Total order over X | Y with every Y variable before every X variable.

    The heuristic scores candidates within the current block on the evolving
    graph (eliminating a vertex clique-connects its neighbors).  Ties break
    to the lowest variable id unless randomize_ties is set, in which case the
    seeded RNG picks among the tied candidates.
    """
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown heuristic {heuristic!r}; pick from {HEURISTICS}")
    rng = random.Random(seed)
    adj = {v: set(ns) for v, ns in graph.items()}
    for v in set(X) | set(Y):
        adj.setdefault(v, set())

    order: list[int] = []
    for block in (sorted(Y), sorted(X)):
        remaining = set(block)
        while remaining:
            if heuristic == "lex":
                best = [min(remaining)]
            else:
                if heuristic == "min-degree":
                    score = lambda v: len(adj[v])
                else:
                    score = lambda v: _min_fill_cost(adj, v)
                lowest = None
                best = []
                for v in sorted(remaining):
                    s = score(v)
                    if lowest is None or s < lowest:
                        lowest, best = s, [v]
                    elif s == lowest:
                        best.append(v)
            pick = rng.choice(best) if randomize_ties else best[0]
            order.append(pick)
            remaining.discard(pick)
            nbrs = adj[pick] & set(adj)
            for a in nbrs:
                adj[a] |= nbrs - {a}
                adj[a].discard(pick)
            del adj[pick]
    return order


# -- tree construction -------------------------------------------------------


def build_graded_tree(p: Problem, order: list[int]) -> PjTree:
    """Bucket elimination along `order`, which must list all of Y before any X.

    Each clause starts as a leaf in the bucket of its earliest-eliminated
    variable.  Eliminating a variable joins its bucket under a new internal
    node projecting that variable; a single-child chain in the same block is
    merged into one node with a larger projection set.  Clause-free variables
    are skipped entirely: projecting them anywhere would not change any value
    and they may not appear in the projection sets.
    """
    pos = {v: i for i, v in enumerate(order)}
    y_positions = [pos[v] for v in p.Y if v in pos]
    x_positions = [pos[v] for v in p.X if v in pos]
    if y_positions and x_positions and max(y_positions) > min(x_positions):
        raise TreeError("elimination order mixes blocks: some existential "
                        "variable precedes a randomized one")
    missing = (p.X | p.Y) - set(pos)
    if missing:
        raise TreeError(f"elimination order omits variables {sorted(missing)}")

    nodes: dict[int, PjNode] = {}
    grade_x: set[int] = set()
    grade_y: set[int] = set()
    support: dict[int, frozenset[int]] = {}
    buckets: dict[int, list[int]] = {i: [] for i in range(len(order))}
    done: list[int] = []
    next_id = 1

    def new_leaf(ci: int) -> int:
        nonlocal next_id
        nid = next_id
        next_id += 1
        nodes[nid] = PjNode(id=nid, clause=ci)
        support[nid] = p.clause_vars(ci)
        return nid

    for ci in range(len(p.clauses)):
        nid = new_leaf(ci)
        vs = support[nid]
        if vs:
            buckets[min(pos[v] for v in vs)].append(nid)
        else:
            done.append(nid)  # empty clause: constant-0 leaf under the root

    for i, x in enumerate(order):
        group = buckets[i]
        if not group:
            continue  # x occurs in no clause
        grade = GRADE_X if x in p.X else GRADE_Y
        lone = nodes[group[0]] if len(group) == 1 else None
        if (lone is not None and not lone.is_leaf
                and (lone.id in grade_x) == (grade == GRADE_X)):
            # chain: fold x into the single child's projection set
            lone.projected = lone.projected | {x}
            nid = lone.id
        else:
            nid = next_id
            next_id += 1
            nodes[nid] = PjNode(id=nid, children=list(group),
                                projected=frozenset({x}))
            (grade_x if grade == GRADE_X else grade_y).add(nid)
        # group supports were recorded before this step, so this also covers
        # the merge case (old support of the merged node, minus x)
        sup = frozenset(set().union(*(support[c] for c in group)) - {x})
        support[nid] = sup
        if sup:
            buckets[min(pos[v] for v in sup)].append(nid)
        else:
            done.append(nid)

    if len(done) == 1 and not nodes[done[0]].is_leaf:
        root = done[0]
    else:
        root = next_id
        nodes[root] = PjNode(id=root, children=list(done))
        grade_x.add(root)  # empty projection set; either grade works
    return PjTree(nodes=nodes, root=root, grade_x=grade_x, grade_y=grade_y)


# -- validation ---------------------------------------------------------------


def check_tree(t: PjTree, p: Problem) -> None:
    """Both project-join-tree criteria plus basic shape; raises TreeError."""
    bad = []
    if t.root not in t.nodes:
        raise TreeError([f"root {t.root} is not a node"])
    seen_parents: dict[int, int] = {}
    reachable = set()
    stack = [t.root]
    while stack:
        nid = stack.pop()
        if nid in reachable:
            bad.append(f"node {nid} reached twice (not a tree)")
            continue
        reachable.add(nid)
        n = t.nodes.get(nid)
        if n is None:
            bad.append(f"child reference to missing node {nid}")
            continue
        if n.is_leaf and (n.children or n.projected):
            bad.append(f"leaf {nid} has children or projections")
        for c in n.children:
            if c in seen_parents:
                bad.append(f"node {c} has two parents ({seen_parents[c]}, {nid})")
            seen_parents[c] = nid
            stack.append(c)
    unreachable = set(t.nodes) - reachable
    if unreachable:
        bad.append(f"nodes unreachable from root: {sorted(unreachable)}")
    if bad:
        raise TreeError(bad)

    # gamma is a bijection between leaves and clauses
    indices = [t.nodes[l].clause for l in t.leaf_ids()]
    if sorted(indices) != list(range(len(p.clauses))):
        bad.append(
            f"leaf clause indices {sorted(indices)} are not a bijection with "
            f"clauses 0..{len(p.clauses) - 1}")

    # criterion 1: projection sets partition vars(phi)
    formula_vars = p.all_clause_vars()
    seen_vars: dict[int, int] = {}
    for nid in t.internal_ids():
        for v in t.nodes[nid].projected:
            if v in seen_vars:
                bad.append(f"variable {v} projected at both {seen_vars[v]} and {nid}")
            seen_vars[v] = nid
            if v not in formula_vars:
                bad.append(f"node {nid} projects {v}, which occurs in no clause")
    uncovered = formula_vars - set(seen_vars)
    if uncovered:
        bad.append(f"clause variables never projected: {sorted(uncovered)}")

    # criterion 2: the leaf of every clause mentioning a projected variable
    # lies beneath the projecting node
    clause_leaf = {t.nodes[l].clause: l for l in t.leaf_ids()}
    descendants: dict[int, set[int]] = {}
    for nid in t.postorder():
        n = t.nodes[nid]
        acc = {nid}
        for c in n.children:
            acc |= descendants.get(c, {c})
        descendants[nid] = acc
    clauses_with: dict[int, list[int]] = {}
    for ci in range(len(p.clauses)):
        for v in p.clause_vars(ci):
            clauses_with.setdefault(v, []).append(ci)
    for nid in t.internal_ids():
        under = descendants[nid]
        for v in t.nodes[nid].projected:
            for ci in clauses_with.get(v, ()):
                if clause_leaf.get(ci) not in under:
                    bad.append(
                        f"node {nid} projects {v} but clause {ci}'s leaf "
                        f"{clause_leaf.get(ci)} is not beneath it")
    if bad:
        raise TreeError(bad)


def check_graded(t: PjTree, X, Y) -> None:
    """All four gradedness properties; raises TreeError naming the property."""
    bad = []
    internal = set(t.internal_ids())
    if (t.grade_x | t.grade_y) != internal or (t.grade_x & t.grade_y):
        bad.append(
            f"property 1: grades ({sorted(t.grade_x)}, {sorted(t.grade_y)}) "
            f"do not partition internal nodes {sorted(internal)}")
    for nid in sorted(t.grade_x & internal):
        extra = t.nodes[nid].projected - set(X)
        if extra:
            bad.append(f"property 2: node {nid} in the existential grade "
                       f"projects non-existential {sorted(extra)}")
    for nid in sorted(t.grade_y & internal):
        extra = t.nodes[nid].projected - set(Y)
        if extra:
            bad.append(f"property 3: node {nid} in the randomized grade "
                       f"projects non-randomized {sorted(extra)}")
    # property 4: no existential-grade node below a randomized-grade node
    below_y: list[int] = []
    stack = [(t.root, False)]
    while stack:
        nid, under_y = stack.pop()
        if under_y and nid in t.grade_x:
            below_y.append(nid)
        next_under = under_y or nid in t.grade_y
        for c in t.nodes[nid].children:
            stack.append((c, next_under))
    for nid in sorted(below_y):
        bad.append(f"property 4: existential-grade node {nid} is a descendant "
                   f"of a randomized-grade node")
    if bad:
        raise TreeError(bad)


def width(t: PjTree, p: Problem) -> int:
    """Max variables involved in valuating any single node."""
    free = t.free_vars(p)
    w = 0
    for nid, vs in free.items():  # nodes reachable from the root
        n = t.nodes[nid]
        w = max(w, len(vs) if n.is_leaf else len(vs | n.projected))
    return w


def sibling_projection_disjoint(t: PjTree, p: Problem) -> bool:
    """Cumulative projections of one sibling never meet clause vars of another."""
    cum = t.cumulative_projected()
    cv = t.subtree_clause_vars(p)
    for nid in t.internal_ids():
        kids = t.nodes[nid].children
        for a in kids:
            for b in kids:
                if a != b and cum[a] & cv[b]:
                    return False
    return True


# -- tree files ---------------------------------------------------------------


def write_tree(t: PjTree, p: Problem) -> str:
    lines = [f"pjt {len(t.nodes)} {len(p.clauses)} {p.num_vars}"]
    for nid in t.postorder():
        n = t.nodes[nid]
        if n.is_leaf:
            lines.append(f"l {nid} {n.clause + 1}")
        else:
            grade = GRADE_X if nid in t.grade_x else GRADE_Y
            kids = " ".join(str(c) for c in n.children)
            projs = " ".join(str(v) for v in sorted(n.projected))
            lines.append(f"i {nid} {grade} {kids} | {projs}".rstrip())
    lines.append(f"r {t.root}")
    return "\n".join(lines) + "\n"


def read_tree(text: str, p: Problem) -> PjTree:
    """Parse and fully validate a tree file against the Problem."""
    nodes: dict[int, PjNode] = {}
    grade_x: set[int] = set()
    grade_y: set[int] = set()
    root = None
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        toks = line.split()
        if toks[0] == "pjt":
            if len(toks) != 4:
                raise TreeError(f"line {lineno}: malformed header")
            header = tuple(int(x) for x in toks[1:])
        elif toks[0] == "l":
            if len(toks) != 3:
                raise TreeError(f"line {lineno}: malformed leaf line")
            nid, ci = int(toks[1]), int(toks[2])
            if not (1 <= ci <= len(p.clauses)):
                raise TreeError(
                    f"line {lineno}: clause index {ci} beyond clause count "
                    f"{len(p.clauses)}")
            if nid in nodes:
                raise TreeError(f"line {lineno}: duplicate node id {nid}")
            nodes[nid] = PjNode(id=nid, clause=ci - 1)
        elif toks[0] == "i":
            if "|" not in toks or len(toks) < 4:
                raise TreeError(f"line {lineno}: malformed internal line")
            bar = toks.index("|")
            nid = int(toks[1])
            grade = toks[2]
            if grade not in (GRADE_X, GRADE_Y):
                raise TreeError(f"line {lineno}: bad grade {grade!r}")
            kids = [int(x) for x in toks[3:bar]]
            projs = frozenset(int(x) for x in toks[bar + 1:])
            for c in kids:
                if c not in nodes:
                    raise TreeError(
                        f"line {lineno}: child {c} not defined before parent {nid}")
            if nid in nodes:
                raise TreeError(f"line {lineno}: duplicate node id {nid}")
            nodes[nid] = PjNode(id=nid, children=kids, projected=projs)
            (grade_x if grade == GRADE_X else grade_y).add(nid)
        elif toks[0] == "r":
            root = int(toks[1])
        else:
            raise TreeError(f"line {lineno}: unknown record {toks[0]!r}")
    if header is None:
        raise TreeError("missing pjt header")
    if root is None:
        raise TreeError("missing root line")
    if header[0] != len(nodes):
        raise TreeError(f"header declares {header[0]} nodes, file has {len(nodes)}")
    if header[1] != len(p.clauses) or header[2] != p.num_vars:
        raise TreeError("header clause/variable counts disagree with the problem")
    t = PjTree(nodes=nodes, root=root, grade_x=grade_x, grade_y=grade_y)
    check_tree(t, p)
    check_graded(t, p.X, p.Y)
    return t


def plan(p: Problem, heuristic: str = "min-fill", seed: int = 0,
         randomize_ties: bool = False) -> PjTree:
    """Elimination order + bucket elimination in one step."""
    from .formula import primal_graph

    g = primal_graph(p)
    order = elimination_order(g, p.X, p.Y, heuristic, seed, randomize_ties)
    return build_graded_tree(p, order)
