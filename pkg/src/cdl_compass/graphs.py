"""Directed and partially directed graphs, d-separation, and equivalence classes.

Graphs are immutable values over string-named variables.  The central
operations are:

* :func:`d_separated` — decide whether a DAG implies a conditional
  independence, via the moralized-ancestral-graph criterion;
* :func:`implied_independencies` — the full set of conditional
  independencies a DAG entails, in a deterministic order;
* :func:`enumerate_mec` — exact brute-force enumeration of all labeled DAGs
  on a small variable set that agree with a set of independence and
  dependence constraints; with constraints read off a graph's full
  independence structure this recovers its Markov equivalence class;
* :func:`unroll` — instantiate a temporal template into a concrete DAG over
  role-indexed per-step variables.

A text exchange format is provided: one edge per line, ``parent -> child``
for directed edges, ``a -- b`` for undirected ones, bare names for isolated
nodes, ``#`` starts a comment.

All set-valued outputs are returned in lexicographic order of variable
names and then edge lists, so results are reproducible byte for byte.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator


class CycleError(ValueError):
    """A directed cycle where a DAG was required; carries the offending cycle."""

    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("directed cycle: " + " -> ".join(cycle + cycle[:1]))


class GraphFormatError(ValueError):
    """Malformed graph text; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _check_name(name: object) -> str:
    if not isinstance(name, str) or not name or any(c.isspace() for c in name):
        raise ValueError(f"variable names are nonempty strings without whitespace: {name!r}")
    return name


def _find_cycle(nodes: Iterable[str], children: dict[str, set[str]]) -> list[str]:
    """Return one directed cycle (as a node list) via iterative DFS."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {v: WHITE for v in nodes}
    parent: dict[str, str] = {}
    for root in sorted(color):
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, Iterator[str]]] = [(root, iter(sorted(children[root])))]
        color[root] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == GREY:
                    cycle = [nxt]
                    cur = node
                    while cur != nxt:
                        cycle.append(cur)
                        cur = parent[cur]
                    cycle.reverse()
                    return cycle
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    parent[nxt] = node
                    stack.append((nxt, iter(sorted(children[nxt]))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    raise AssertionError("no cycle found")  # pragma: no cover


@dataclass(frozen=True)
class Dag:
    """A directed acyclic graph over named variables.

    Construction validates everything: edge endpoints must be declared
    nodes, self loops are cycles, and any directed cycle raises
    :class:`CycleError` naming the cycle.
    """

    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]

    @classmethod
    def of(cls, edges: Iterable[tuple[str, str]] = (), nodes: Iterable[str] = ()) -> "Dag":
        """Build a DAG, adding edge endpoints to the node set automatically."""
        edge_set = frozenset((str(a), str(b)) for a, b in edges)
        node_set = frozenset(str(v) for v in nodes) | frozenset(
            v for e in edge_set for v in e
        )
        return cls(node_set, edge_set)

    def __post_init__(self) -> None:
        for v in self.nodes:
            _check_name(v)
        children: dict[str, set[str]] = {v: set() for v in self.nodes}
        for a, b in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"edge ({a!r}, {b!r}) uses an undeclared node")
            if a == b:
                raise CycleError([a])
            children[a].add(b)
        # Kahn's algorithm; on failure report one concrete cycle.
        indeg = {v: 0 for v in self.nodes}
        for a, b in self.edges:
            indeg[b] += 1
        queue = sorted(v for v, d in indeg.items() if d == 0)
        seen = 0
        while queue:
            v = queue.pop()
            seen += 1
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if seen != len(self.nodes):
            raise CycleError(_find_cycle(self.nodes, children))

    # -- cached index structures (the dataclass is frozen; cached_property
    # -- writes straight to __dict__, which is fine for derived data) -------

    @cached_property
    def _order(self) -> tuple[str, ...]:
        return tuple(sorted(self.nodes))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self._order)}

    @cached_property
    def _parent_masks(self) -> tuple[int, ...]:
        masks = [0] * len(self._order)
        for a, b in self.edges:
            masks[self._index[b]] |= 1 << self._index[a]
        return tuple(masks)

    @cached_property
    def _child_masks(self) -> tuple[int, ...]:
        masks = [0] * len(self._order)
        for a, b in self.edges:
            masks[self._index[a]] |= 1 << self._index[b]
        return tuple(masks)

    @cached_property
    def _descendant_masks(self) -> tuple[int, ...]:
        """Strict descendants of each node, as bitmasks, via reverse topological order."""
        n = len(self._order)
        masks = [0] * n
        for v in reversed(self.topological_order()):
            i = self._index[v]
            acc = 0
            kids = self._child_masks[i]
            while kids:
                low = kids & -kids
                j = low.bit_length() - 1
                acc |= low | masks[j]
                kids ^= low
            masks[i] = acc
        return tuple(masks)

    def parents(self, node: str) -> frozenset[str]:
        self._require(node)
        return frozenset(a for a, b in self.edges if b == node)

    def children(self, node: str) -> frozenset[str]:
        self._require(node)
        return frozenset(b for a, b in self.edges if a == node)

    def descendants(self, node: str) -> frozenset[str]:
        """Strict descendants (the node itself excluded)."""
        self._require(node)
        mask = self._descendant_masks[self._index[node]]
        return frozenset(self._order[i] for i in _bits(mask))

    def topological_order(self) -> tuple[str, ...]:
        """A deterministic topological order (lexicographic among ready nodes)."""
        indeg = {v: 0 for v in self.nodes}
        for _, b in self.edges:
            indeg[b] += 1
        import heapq

        ready = [v for v, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        out: list[str] = []
        children = {v: sorted(self.children(v)) for v in self.nodes}
        while ready:
            v = heapq.heappop(ready)
            out.append(v)
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(ready, c)
        return tuple(out)

    def _require(self, *names: str) -> None:
        for v in names:
            if v not in self.nodes:
                raise ValueError(f"unknown variable {v!r}")


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def d_separated(g: Dag, x: str, y: str, given: Iterable[str] = ()) -> bool:
    """Does ``g`` imply ``x`` independent of ``y`` given the conditioning set?

    Uses the moralized-ancestral-graph criterion: restrict to the ancestral
    closure of ``{x, y} ∪ given``, marry the parents of every node, drop
    directions, delete the conditioning nodes, and test connectivity.  This
    is equivalent to path blocking: a chain or fork is blocked when its
    middle node is conditioned on; a collider blocks unless it or one of its
    descendants is conditioned on.

    Symmetric in ``x`` and ``y``.  Requires ``x != y`` and neither endpoint
    inside the conditioning set.
    """
    z = frozenset(given)
    g._require(x, y, *z)
    if x == y:
        raise ValueError("d-separation needs two distinct variables")
    if x in z or y in z:
        raise ValueError("query variables may not appear in the conditioning set")

    idx = g._index
    parent_masks = g._parent_masks
    child_masks = g._child_masks
    xi, yi = idx[x], idx[y]
    zmask = 0
    for v in z:
        zmask |= 1 << idx[v]

    # Ancestral closure of {x, y} ∪ z.
    anc = (1 << xi) | (1 << yi) | zmask
    frontier = anc
    while frontier:
        new = 0
        for i in _bits(frontier):
            new |= parent_masks[i]
        frontier = new & ~anc
        anc |= new

    # Moralize within the closure: undirected skeleton plus married parents.
    adj = [0] * len(parent_masks)
    for i in _bits(anc):
        pa = parent_masks[i] & anc
        adj[i] |= (pa | child_masks[i]) & anc
        for p in _bits(pa):
            adj[p] |= pa | (1 << i)

    # Delete conditioning nodes and test reachability.
    blocked = zmask
    reach = 1 << xi
    frontier = reach
    target = 1 << yi
    while frontier:
        new = 0
        for i in _bits(frontier):
            new |= adj[i]
        new &= ~blocked
        frontier = new & ~reach
        reach |= new
        if reach & target:
            return False
    return True


@dataclass(frozen=True)
class IndependenceStatement:
    """One (possibly negated) conditional independence claim.

    Stored in canonical form with ``x < y`` lexicographically, since the
    relation is symmetric in its endpoints.
    """

    x: str
    y: str
    given: frozenset[str] = frozenset()
    holds: bool = True

    def __post_init__(self) -> None:
        _check_name(self.x)
        _check_name(self.y)
        if self.x == self.y:
            raise ValueError("an independence statement needs two distinct variables")
        if self.x in self.given or self.y in self.given:
            raise ValueError("statement variables may not appear in the conditioning set")
        if self.y < self.x:
            first, second = self.y, self.x
            object.__setattr__(self, "x", first)
            object.__setattr__(self, "y", second)
        object.__setattr__(self, "given", frozenset(self.given))

    def sort_key(self) -> tuple:
        return (self.x, self.y, len(self.given), tuple(sorted(self.given)), not self.holds)


@dataclass(frozen=True)
class IndependenceSet:
    """A set of independence/dependence constraints, free of contradictions."""

    statements: frozenset[IndependenceStatement]

    @classmethod
    def of(cls, statements: Iterable[IndependenceStatement]) -> "IndependenceSet":
        return cls(frozenset(statements))

    def __post_init__(self) -> None:
        object.__setattr__(self, "statements", frozenset(self.statements))
        seen: dict[tuple, bool] = {}
        for s in self.statements:
            key = (s.x, s.y, s.given)
            if key in seen and seen[key] != s.holds:
                raise ValueError(
                    f"contradictory constraints on {s.x} and {s.y} given {sorted(s.given)}"
                )
            seen[key] = s.holds

    def sorted_statements(self) -> tuple[IndependenceStatement, ...]:
        return tuple(sorted(self.statements, key=IndependenceStatement.sort_key))

    def variables(self) -> frozenset[str]:
        out: set[str] = set()
        for s in self.statements:
            out.add(s.x)
            out.add(s.y)
            out |= s.given
        return frozenset(out)


def implied_independencies(g: Dag, max_nodes: int = 8) -> IndependenceSet:
    """Every conditional independence the DAG entails.

    Checks each unordered variable pair against every conditioning subset of
    the remaining variables; subsets are visited by size, then
    lexicographically, and pairs lexicographically, so iteration order of
    the result is deterministic.  Refuses graphs beyond ``max_nodes`` (the
    subset lattice is exponential).
    """
    if len(g.nodes) > max_nodes:
        raise ValueError(
            f"graph has {len(g.nodes)} nodes; implied_independencies is capped at "
            f"{max_nodes}"
        )
    order = sorted(g.nodes)
    found: list[IndependenceStatement] = []
    for x, y in itertools.combinations(order, 2):
        rest = [v for v in order if v not in (x, y)]
        for size in range(len(rest) + 1):
            for z in itertools.combinations(rest, size):
                if d_separated(g, x, y, z):
                    found.append(IndependenceStatement(x, y, frozenset(z)))
    return IndependenceSet.of(found)


def consistent_with(g: Dag, constraints: IndependenceSet) -> bool:
    """Does the DAG agree with every constraint, negations included?"""
    return all(
        d_separated(g, s.x, s.y, s.given) == s.holds
        for s in constraints.sorted_statements()
    )


def enumerate_dags(variables: Iterable[str]) -> Iterator[Dag]:
    """All labeled DAGs on the given variables, in a deterministic order.

    Each unordered pair independently takes one of three states (no edge,
    forward, backward); branches that already contain a cycle are pruned by
    maintaining reachability masks incrementally.
    """
    names = sorted({_check_name(v) for v in variables})
    n = len(names)
    pairs = list(itertools.combinations(range(n), 2))
    node_set = frozenset(names)

    def rec(k: int, edges: list[tuple[int, int]], reach: list[int]):
        if k == len(pairs):
            yield Dag(node_set, frozenset((names[a], names[b]) for a, b in edges))
            return
        a, b = pairs[k]
        yield from rec(k + 1, edges, reach)
        for src, dst in ((a, b), (b, a)):
            if reach[dst] & (1 << src):
                continue  # dst already reaches src: adding src->dst closes a cycle
            new_reach = list(reach)
            gained = new_reach[dst] | (1 << dst)
            for i in range(n):
                if new_reach[i] & (1 << src) or i == src:
                    new_reach[i] |= gained
            edges.append((src, dst))
            yield from rec(k + 1, edges, new_reach)
            edges.pop()

    yield from rec(0, [], [0] * n)


def enumerate_mec(
    constraints: IndependenceSet,
    variables: Iterable[str],
    max_nodes: int = 6,
) -> list[Dag]:
    """All DAGs on ``variables`` agreeing exactly with the constraints.

    Both independence and dependence statements must hold: the collider
    structure, for instance, is pinned down only by asserting that its
    endpoints become dependent when the middle node is conditioned on.
    When the constraints record a graph's complete independence structure
    (every pair, every conditioning subset, with negations for the rest),
    the result is that graph's Markov equivalence class.

    Exact brute force over all labeled DAGs, capped at ``max_nodes``.
    Results are sorted lexicographically by edge list.
    """
    names = sorted({_check_name(v) for v in variables})
    if len(names) > max_nodes:
        raise ValueError(
            f"{len(names)} variables exceed the enumeration cap of {max_nodes}"
        )
    unknown = constraints.variables() - set(names)
    if unknown:
        raise ValueError(f"constraints mention unlisted variables: {sorted(unknown)}")
    members = [g for g in enumerate_dags(names) if consistent_with(g, constraints)]
    members.sort(key=lambda g: tuple(sorted(g.edges)))
    return members


# ---------------------------------------------------------------------------
# Partially directed graphs


@dataclass(frozen=True)
class Pdag:
    """A partially directed graph: directed part acyclic, plus undirected edges.

    Serves as a structural payload and round-trips through the text format;
    no further operations consume the undirected part.
    """

    nodes: frozenset[str]
    directed: frozenset[tuple[str, str]]
    undirected: frozenset[frozenset[str]]

    @classmethod
    def of(
        cls,
        directed: Iterable[tuple[str, str]] = (),
        undirected: Iterable[tuple[str, str]] = (),
        nodes: Iterable[str] = (),
    ) -> "Pdag":
        d = frozenset((str(a), str(b)) for a, b in directed)
        u = frozenset(frozenset((str(a), str(b))) for a, b in undirected)
        node_set = (
            frozenset(str(v) for v in nodes)
            | frozenset(v for e in d for v in e)
            | frozenset(v for e in u for v in e)
        )
        return cls(node_set, d, u)

    def __post_init__(self) -> None:
        for v in self.nodes:
            _check_name(v)
        for a, b in self.directed:
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"edge ({a!r}, {b!r}) uses an undeclared node")
            if a == b:
                raise CycleError([a])
        for pair in self.undirected:
            if len(pair) != 2:
                raise ValueError("undirected edges join two distinct nodes")
            if not pair <= self.nodes:
                raise ValueError(f"undirected edge {sorted(pair)} uses an undeclared node")
        for a, b in self.directed:
            if (b, a) in self.directed:
                raise ValueError(f"both orientations present between {a!r} and {b!r}")
            if frozenset((a, b)) in self.undirected:
                raise ValueError(
                    f"edge between {a!r} and {b!r} is both directed and undirected"
                )
        # The directed part must be acyclic for this to be a PDAG at all.
        Dag(self.nodes, self.directed)


# ---------------------------------------------------------------------------
# Text exchange format


def parse_graph(text: str) -> Dag | Pdag:
    """Parse edge-list text into a :class:`Dag`, or a :class:`Pdag` if any
    undirected edge appears.

    One edge per line: ``parent -> child`` or ``a -- b``; a bare name
    declares an isolated node; ``#`` starts a comment; blank lines are
    skipped.
    """
    nodes: set[str] = set()
    directed: list[tuple[str, str]] = []
    undirected: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            if len(tokens) == 1:
                nodes.add(_check_name(tokens[0]))
            elif len(tokens) == 3 and tokens[1] == "->":
                directed.append((_check_name(tokens[0]), _check_name(tokens[2])))
            elif len(tokens) == 3 and tokens[1] == "--":
                undirected.append((_check_name(tokens[0]), _check_name(tokens[2])))
            else:
                raise ValueError(
                    "expected 'a -> b', 'a -- b', or a bare node name"
                )
        except GraphFormatError:
            raise
        except ValueError as exc:
            raise GraphFormatError(lineno, str(exc)) from None
    try:
        if undirected:
            return Pdag.of(directed, undirected, nodes)
        return Dag.of(directed, nodes)
    except ValueError as exc:
        raise GraphFormatError(0, str(exc)) from None


def parse_dag(text: str) -> Dag:
    """Parse edge-list text that must describe a DAG (no undirected edges)."""
    g = parse_graph(text)
    if isinstance(g, Pdag):
        raise GraphFormatError(0, "graph contains undirected edges where a DAG is required")
    return g


def format_graph(g: Dag | Pdag) -> str:
    """Canonical edge-list text: isolated nodes first, then sorted edges."""
    if isinstance(g, Dag):
        directed = sorted(g.edges)
        undirected: list[tuple[str, str]] = []
    else:
        directed = sorted(g.directed)
        undirected = sorted(tuple(sorted(p)) for p in g.undirected)
    touched = {v for e in directed for v in e} | {v for e in undirected for v in e}
    lines = sorted(g.nodes - touched)
    lines += [f"{a} -> {b}" for a, b in directed]
    lines += [f"{a} -- {b}" for a, b in undirected]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Independence-constraint text format (used by the CLI's mec subcommand)


def parse_constraints(text: str, variables: Iterable[str]) -> IndependenceSet:
    """Parse independence constraints, one per line.

    Syntax, with ``_||_`` read as "independent of"::

        S _||_ D | C          # holds, conditioning on C
        not S _||_ C          # dependence, marginal
        not C _||_ D | *      # dependence for *every* conditioning subset

    The conditioning part after ``|`` is a comma- or space-separated list;
    ``*`` expands to every subset of the remaining declared variables.
    """
    names = sorted({_check_name(v) for v in variables})
    name_set = set(names)
    statements: list[IndependenceStatement] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        holds = True
        if line.startswith("not "):
            holds = False
            line = line[4:].strip()
        if "_||_" not in line:
            raise GraphFormatError(lineno, "expected '<x> _||_ <y> [| <given>]'")
        left, _, right = line.partition("_||_")
        if "|" in right:
            y_part, _, tail = right.partition("|")
        else:
            y_part, tail = right, ""
        x_tokens, y_tokens = left.split(), y_part.split()
        if len(x_tokens) != 1 or len(y_tokens) != 1:
            raise GraphFormatError(lineno, "expected '<x> _||_ <y> [| <given>]'")
        x, y = x_tokens[0], y_tokens[0]
        tail = tail.strip()
        for v in (x, y):
            if v not in name_set:
                raise GraphFormatError(lineno, f"undeclared variable {v!r}")
        if tail == "*":
            rest = [v for v in names if v not in (x, y)]
            for size in range(len(rest) + 1):
                for z in itertools.combinations(rest, size):
                    statements.append(IndependenceStatement(x, y, frozenset(z), holds))
            continue
        given = [t for chunk in tail.split(",") for t in chunk.split() if t]
        for v in given:
            if v not in name_set:
                raise GraphFormatError(lineno, f"undeclared variable {v!r}")
        try:
            statements.append(IndependenceStatement(x, y, frozenset(given), holds))
        except ValueError as exc:
            raise GraphFormatError(lineno, str(exc)) from None
    try:
        return IndependenceSet.of(statements)
    except ValueError as exc:
        raise GraphFormatError(0, str(exc)) from None


# ---------------------------------------------------------------------------
# Temporal templates

EVERY_STEP = "every"
FIRST_STEP_ONLY = "first"
AFTER_FIRST_STEP = "later"
_QUALIFIERS = (EVERY_STEP, FIRST_STEP_ONLY, AFTER_FIRST_STEP)


@dataclass(frozen=True)
class TemporalTemplate:
    """A repeating graph motif over variable roles, unrolled step by step.

    ``within_step`` edges connect roles inside one time step.  Each entry
    carries a step qualifier: ``"every"`` instantiates at all steps,
    ``"first"`` only at step 1, ``"later"`` at steps 2 onward.  The
    qualifiers exist because real processes are not always stationary at
    the boundary: an initialization step may feed a variable that, once the
    process is running, feeds back the other way.

    ``across_step`` edges connect a role at step t to a role at step t+1
    (lag 1 only; edges never point backward in time).
    """

    roles: frozenset[str]
    within_step: tuple[tuple[str, str, str], ...]
    across_step: frozenset[tuple[str, str]]

    @classmethod
    def of(
        cls,
        roles: Iterable[str],
        within_step: Iterable[tuple] = (),
        across_step: Iterable[tuple] = (),
    ) -> "TemporalTemplate":
        role_set = frozenset(_check_name(r) for r in roles)
        within: list[tuple[str, str, str]] = []
        for entry in within_step:
            if len(entry) == 2:
                src, dst, when = entry[0], entry[1], EVERY_STEP
            elif len(entry) == 3:
                src, dst, when = entry
            else:
                raise ValueError(f"within-step entries are (src, dst[, when]): {entry!r}")
            if when not in _QUALIFIERS:
                raise ValueError(
                    f"unknown step qualifier {when!r}; expected one of {_QUALIFIERS}"
                )
            within.append((str(src), str(dst), when))
        across: list[tuple[str, str]] = []
        for entry in across_step:
            if len(entry) == 2:
                src, dst, lag = entry[0], entry[1], 1
            elif len(entry) == 3:
                src, dst, lag = entry
            else:
                raise ValueError(f"across-step entries are (src, dst[, lag]): {entry!r}")
            if lag < 1:
                raise ValueError(
                    f"cross-step edge {src!r} -> {dst!r} has lag {lag}; "
                    "edges must point forward in time"
                )
            if lag != 1:
                raise ValueError(f"only lag-1 cross-step edges are supported, got {lag}")
            across.append((str(src), str(dst)))
        return cls(
            role_set,
            tuple(sorted(dict.fromkeys(within))),
            frozenset(across),
        )

    def __post_init__(self) -> None:
        for src, dst, when in self.within_step:
            if src not in self.roles or dst not in self.roles:
                raise ValueError(f"within-step edge ({src!r}, {dst!r}) uses an unknown role")
            if src == dst:
                raise ValueError(f"within-step self edge on role {src!r}")
            if when not in _QUALIFIERS:
                raise ValueError(f"unknown step qualifier {when!r}")
        for src, dst in self.across_step:
            if src not in self.roles or dst not in self.roles:
                raise ValueError(f"cross-step edge ({src!r}, {dst!r}) uses an unknown role")


def unroll(template: TemporalTemplate, steps: int) -> Dag:
    """Instantiate a template into a concrete DAG over ``steps`` time steps.

    Nodes are named ``<role><step>`` with steps counted from 1.  Within-step
    edges are instantiated at the steps their qualifier selects; cross-step
    edges connect consecutive steps.  The result is validated as a DAG, so a
    template whose within-step edges form a cycle fails loudly.
    """
    if steps < 1:
        raise ValueError(f"steps must be at least 1, got {steps}")
    nodes = [f"{role}{t}" for role in sorted(template.roles) for t in range(1, steps + 1)]
    edges: list[tuple[str, str]] = []
    for src, dst, when in template.within_step:
        if when == EVERY_STEP:
            instantiated = range(1, steps + 1)
        elif when == FIRST_STEP_ONLY:
            instantiated = range(1, 2)
        else:
            instantiated = range(2, steps + 1)
        for t in instantiated:
            edges.append((f"{src}{t}", f"{dst}{t}"))
    for src, dst in sorted(template.across_step):
        for t in range(1, steps):
            edges.append((f"{src}{t}", f"{dst}{t + 1}"))
    return Dag.of(edges, nodes)


def hidden_confounder_template() -> TemporalTemplate:
    """Reference template: treatment process with a hidden confounder.

    Four roles per step — covariates ``X``, treatment ``A``, hidden
    confounder ``U``, outcome ``Y``.  Covariates drive the outcome and the
    treatment at every step; at the first step they and the treatment also
    initialize the confounder, which from the second step onward feeds the
    covariates instead.  All four roles propagate forward with lag 1 into
    the next step's covariates (and the confounder into itself).

    Unrolled over two steps this yields 8 nodes and 11 edges; the direction
    between X and U flips after initialization, which is exactly the kind of
    non-stationarity the step qualifiers exist to express.
    """
    return TemporalTemplate.of(
        roles=("X", "A", "U", "Y"),
        within_step=(
            ("X", "Y", EVERY_STEP),
            ("X", "A", EVERY_STEP),
            ("X", "U", FIRST_STEP_ONLY),
            ("A", "U", FIRST_STEP_ONLY),
            ("U", "X", AFTER_FIRST_STEP),
        ),
        across_step=(("X", "X"), ("A", "X"), ("U", "X"), ("U", "U")),
    )
