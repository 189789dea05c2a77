"""Mixed-radix words, decision assignment trees, and instrumented counters.

Every construction in this package produces a Counter: a pair of step
functions (next and prev) over a fixed mixed-radix domain, together with the
cycle length and the per-step read/write bounds the construction promises.
Steps run against Tape objects so the promises can be checked empirically:
a tape records which coordinates were read and how many assignments were
executed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional


class BoundExceeded(RuntimeError):
    """A configured resource limit (steps, tree nodes, factoring) was hit."""


@dataclass(frozen=True)
class Domain:
    """A product Z_r1 x ... x Z_rn described by its per-coordinate radices."""

    radices: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.radices:
            raise ValueError("domain needs at least one coordinate")
        if any(r < 2 for r in self.radices):
            raise ValueError("every radix must be at least 2")

    @classmethod
    def uniform(cls, m: int, n: int) -> "Domain":
        return cls((m,) * n)

    @property
    def n(self) -> int:
        return len(self.radices)

    @property
    def size(self) -> int:
        return math.prod(self.radices)

    def validate(self, word) -> None:
        if len(word) != self.n:
            raise ValueError(f"expected {self.n} digits, got {len(word)}")
        for i, (d, r) in enumerate(zip(word, self.radices)):
            if not 0 <= d < r:
                raise ValueError(f"digit {d} out of range at coordinate {i + 1}")

    def rank(self, word) -> int:
        """Mixed-radix rank; coordinate 1 is the most significant."""
        v = 0
        for d, r in zip(word, self.radices):
            v = v * r + d
        return v

    def unrank(self, i: int) -> tuple[int, ...]:
        if not 0 <= i < self.size:
            raise ValueError(f"rank {i} out of range")
        digits = []
        for r in reversed(self.radices):
            i, d = divmod(i, r)
            digits.append(d)
        return tuple(reversed(digits))

    def words(self) -> Iterator[tuple[int, ...]]:
        """All words in rank order."""
        return itertools.product(*(range(r) for r in self.radices))


@dataclass(frozen=True)
class StepStats:
    reads: int
    writes: int


class Tape:
    """One step's view of a word.

    Reading a coordinate counts once no matter how often it is re-read, and
    reading back a value the step itself wrote is free. Every executed
    assignment counts as a write, including rewrites of the same value.
    """

    __slots__ = ("cells", "reads", "written", "writes")

    def __init__(self, word):
        self.cells = list(word)
        self.reads: set[int] = set()
        self.written: set[int] = set()
        self.writes = 0

    def read(self, i: int) -> int:
        if i not in self.written:
            self.reads.add(i)
        return self.cells[i]

    def write(self, i: int, v: int) -> None:
        self.cells[i] = v
        self.written.add(i)
        self.writes += 1

    def word(self) -> tuple[int, ...]:
        return tuple(self.cells)

    def stats(self) -> StepStats:
        return StepStats(len(self.reads), self.writes)


class OffsetTape:
    """Window onto a larger tape, shifted by a fixed coordinate offset."""

    __slots__ = ("base", "offset")

    def __init__(self, base, offset: int):
        self.base = base
        self.offset = offset

    def read(self, i: int) -> int:
        return self.base.read(i + self.offset)

    def write(self, i: int, v: int) -> None:
        self.base.write(i + self.offset, v)


@dataclass(frozen=True)
class Query:
    """Internal tree node: branch on the value of one coordinate."""

    coord: int
    children: tuple


@dataclass(frozen=True)
class Assign:
    """Leaf: write the listed (coordinate, value) pairs in order."""

    assignments: tuple[tuple[int, int], ...]


def dat_validate(tree, domain: Domain) -> None:
    """Check tree shape: full fan-out, no repeated query on a path, and
    every assignment in range and targeting a queried coordinate."""

    def walk(node, seen: frozenset) -> None:
        if isinstance(node, Query):
            if not 0 <= node.coord < domain.n:
                raise ValueError(f"query coordinate {node.coord + 1} out of range")
            if node.coord in seen:
                raise ValueError(f"coordinate {node.coord + 1} queried twice on a path")
            want = domain.radices[node.coord]
            if len(node.children) != want:
                raise ValueError(
                    f"query on coordinate {node.coord + 1} needs {want} children, "
                    f"got {len(node.children)}")
            for child in node.children:
                walk(child, seen | {node.coord})
        elif isinstance(node, Assign):
            for coord, value in node.assignments:
                if not 0 <= coord < domain.n:
                    raise ValueError(f"assignment coordinate {coord + 1} out of range")
                if not 0 <= value < domain.radices[coord]:
                    raise ValueError(
                        f"value {value} out of range for coordinate {coord + 1}")
                if coord not in seen:
                    raise ValueError(
                        f"leaf assigns coordinate {coord + 1} without reading it")
        else:
            raise ValueError(f"not a tree node: {node!r}")

    walk(tree, frozenset())


def dat_eval(tree, word) -> tuple[tuple[int, ...], StepStats]:
    """Run one step of the tree on a word."""
    cells = list(word)
    reads = 0
    node = tree
    while isinstance(node, Query):
        node = node.children[cells[node.coord]]
        reads += 1
    if not isinstance(node, Assign):
        raise ValueError(f"not a tree node: {node!r}")
    writes = 0
    for coord, value in node.assignments:
        cells[coord] = value
        writes += 1
    return tuple(cells), StepStats(reads, writes)


def dat_read_complexity(tree) -> int:
    """Most queries on any root-to-leaf path."""
    if isinstance(tree, Assign):
        return 0
    return 1 + max(dat_read_complexity(c) for c in tree.children)


def dat_write_complexity(tree) -> int:
    """Largest assignment count over all leaves."""
    if isinstance(tree, Assign):
        return len(tree.assignments)
    return max(dat_write_complexity(c) for c in tree.children)


def dat_count_nodes(tree) -> int:
    if isinstance(tree, Assign):
        return 1
    return 1 + sum(dat_count_nodes(c) for c in tree.children)


def dat_to_json(tree):
    """Plain-dict form with 1-based coordinates."""
    if isinstance(tree, Query):
        return {"query": tree.coord + 1,
                "children": [dat_to_json(c) for c in tree.children]}
    if isinstance(tree, Assign):
        return {"assign": [[c + 1, v] for c, v in tree.assignments]}
    raise ValueError(f"not a tree node: {tree!r}")


def dat_from_json(obj):
    if not isinstance(obj, dict):
        raise ValueError("tree node must be an object")
    if "query" in obj:
        coord = obj["query"]
        if not isinstance(coord, int) or coord < 1:
            raise ValueError("query coordinate must be a positive integer")
        return Query(coord - 1, tuple(dat_from_json(c) for c in obj["children"]))
    if "assign" in obj:
        out = []
        for pair in obj["assign"]:
            coord, value = pair
            if not isinstance(coord, int) or coord < 1:
                raise ValueError("assignment coordinate must be a positive integer")
            out.append((coord - 1, value))
        return Assign(tuple(out))
    raise ValueError("tree node needs a 'query' or 'assign' key")


class _BranchOn(Exception):
    def __init__(self, coord):
        self.coord = coord


class _ProbeTape:
    """Tape that knows only the coordinates fixed so far; reading anything
    else aborts the run so the caller can branch on it."""

    __slots__ = ("known", "written", "assigns")

    def __init__(self, known: dict):
        self.known = known
        self.written: dict[int, int] = {}
        self.assigns: list[tuple[int, int]] = []

    def read(self, i: int) -> int:
        if i in self.written:
            return self.written[i]
        if i in self.known:
            return self.known[i]
        raise _BranchOn(i)

    def write(self, i: int, v: int) -> None:
        self.written[i] = v
        self.assigns.append((i, v))


def materialize(step: Callable, domain: Domain, node_budget: int = 10 ** 6):
    """Unfold a deterministic tape step into an explicit decision tree.

    The step is replayed once per node against a probe tape that only knows
    the coordinates on the current path; the first unknown read becomes a
    query node. Raises BoundExceeded once node_budget nodes exist.
    """
    budget = node_budget

    def build(known: dict):
        nonlocal budget
        if budget <= 0:
            raise BoundExceeded(f"tree exceeds {node_budget} nodes")
        budget -= 1
        probe = _ProbeTape(known)
        try:
            step(probe)
        except _BranchOn as b:
            children = tuple(build({**known, b.coord: v})
                             for v in range(domain.radices[b.coord]))
            return Query(b.coord, children)
        return Assign(tuple(probe.assigns))

    tree = build({})
    dat_validate(tree, domain)
    return tree


class Counter:
    """A cyclic counter: instrumented step functions plus claimed bounds.

    next_fn and prev_fn mutate a tape in place. claimed_length is the cycle
    length the construction promises through the start word; claimed_reads
    and claimed_writes bound per-step coordinate touches. None means no
    promise. Audits check all of them against observed behaviour.
    """

    def __init__(self, domain: Domain, next_fn: Callable, prev_fn: Callable,
                 claimed_length: int, start, *,
                 claimed_reads: Optional[int] = None,
                 claimed_writes: Optional[int] = None,
                 recipe: Optional[dict] = None):
        domain.validate(start)
        if claimed_length < 1:
            raise ValueError("claimed_length must be positive")
        self.domain = domain
        self._next_fn = next_fn
        self._prev_fn = prev_fn
        self.claimed_length = claimed_length
        self.start = tuple(start)
        self.claimed_reads = claimed_reads
        self.claimed_writes = claimed_writes
        self.recipe = recipe

    def next_tape(self, tape) -> None:
        self._next_fn(tape)

    def prev_tape(self, tape) -> None:
        self._prev_fn(tape)

    def next(self, word) -> tuple[tuple[int, ...], StepStats]:
        tape = Tape(word)
        self._next_fn(tape)
        return tape.word(), tape.stats()

    def prev(self, word) -> tuple[tuple[int, ...], StepStats]:
        tape = Tape(word)
        self._prev_fn(tape)
        return tape.word(), tape.stats()

    def __repr__(self) -> str:
        kind = (self.recipe or {}).get("kind", "?")
        return (f"Counter(kind={kind}, domain={self.domain.radices}, "
                f"length={self.claimed_length})")


@dataclass
class OrbitReport:
    """Result of walking a counter from its start word."""

    observed_length: int
    max_reads: int
    max_writes: int
    distinct: bool
    closed: bool
    truncated: bool
    visited_ranks: Optional[set[int]]


# Above this many words the walk stops tracking the visited set; distinctness
# then rests on closure alone.
TRACK_LIMIT = 2 ** 27


def measure_counter(counter: Counter, max_steps: Optional[int] = None,
                    direction: str = "next",
                    track_visited: Optional[bool] = None) -> OrbitReport:
    """Walk the counter until it returns to start, revisits a word, or runs
    out of budget. max_steps defaults to the claimed length."""
    if direction not in ("next", "prev"):
        raise ValueError("direction must be 'next' or 'prev'")
    domain = counter.domain
    if max_steps is None:
        max_steps = counter.claimed_length
    if track_visited is None:
        track_visited = domain.size <= TRACK_LIMIT
    step = counter.next if direction == "next" else counter.prev
    start = counter.start
    visited = {domain.rank(start)} if track_visited else None
    w = start
    max_reads = max_writes = 0
    distinct = True
    closed = False
    steps = 0
    while steps < max_steps:
        w, st = step(w)
        steps += 1
        if st.reads > max_reads:
            max_reads = st.reads
        if st.writes > max_writes:
            max_writes = st.writes
        if w == start:
            closed = True
            break
        if track_visited:
            rk = domain.rank(w)
            if rk in visited:
                distinct = False
                break
            visited.add(rk)
    truncated = not closed and distinct
    return OrbitReport(steps, max_reads, max_writes, distinct, closed,
                       truncated, visited)


def word_parse(text: str, domain: Domain) -> tuple[int, ...]:
    """Parse a word, either comma-separated or one character per digit.

    The contiguous form is only meaningful when every radix fits in one
    decimal digit.
    """
    text = text.strip()
    if "," in text:
        tokens = [t.strip() for t in text.split(",")]
    elif domain.n == 1:
        tokens = [text]
    elif all(r <= 10 for r in domain.radices):
        tokens = list(text)
    else:
        raise ValueError("radices above 10 need comma-separated digits")
    if len(tokens) != domain.n:
        raise ValueError(f"expected {domain.n} digits, got {len(tokens)}")
    try:
        digits = tuple(int(t) for t in tokens)
    except ValueError:
        raise ValueError(f"malformed word {text!r}") from None
    domain.validate(digits)
    return digits


def word_format(word, domain: Domain) -> str:
    if all(r <= 10 for r in domain.radices):
        return "".join(str(d) for d in word)
    return ",".join(str(d) for d in word)
