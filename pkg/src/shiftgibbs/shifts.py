"""Shift spaces presented by labeled graphs.

Words, bi-infinite eventually-periodic points with presenting paths,
cylinders, graph gap certificates, the splice construction, and
sliding-block factor codes.  All types are immutable after construction
and every operation is a pure function, so everything here is safe to
call concurrently.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np

from .exceptions import ValidationError, VolumeGuardError

DEFAULT_ENUM_CAP = 2_000_000
_DET_STATE_CAP = 65536


def enumeration_cap(override: int | None = None) -> int:
    """Active brute-force cap: explicit override, else SHIFTGIBBS_ENUM_CAP, else default."""
    if override is not None:
        return int(override)
    env = os.environ.get("SHIFTGIBBS_ENUM_CAP", "").strip()
    return int(env) if env else DEFAULT_ENUM_CAP


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of symbol tokens; the order fixes all iteration order."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(str(s) for s in self.symbols))
        if not self.symbols:
            raise ValidationError("alphabet must be nonempty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValidationError("alphabet symbols must be distinct")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(range(len(self.symbols)))

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise ValidationError(f"symbol {symbol!r} not in alphabet") from None

    def text(self, letters: Sequence[int]) -> str:
        """Render letter indices as text (concatenated, or comma separated
        when some symbol is longer than one character)."""
        syms = [self.symbols[i] for i in letters]
        if all(len(s) == 1 for s in self.symbols):
            return "".join(syms)
        return ",".join(syms)

    def parse(self, text: str) -> tuple[int, ...]:
        """Inverse of :meth:`text` for well-formed input."""
        if "," in text:
            parts = text.split(",")
        elif all(len(s) == 1 for s in self.symbols):
            parts = list(text)
        else:
            parts = text.split()
        return tuple(self.index(p) for p in parts)


@dataclass(frozen=True)
class Word:
    """Finite configuration on a closed integer window ``[start, start+len-1]``."""

    alphabet: Alphabet
    start: int
    letters: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(a) for a in self.letters))
        for a in self.letters:
            if not 0 <= a < len(self.alphabet):
                raise ValidationError(f"letter index {a} out of range")

    @property
    def end(self) -> int:
        return self.start + len(self.letters) - 1

    @property
    def window(self) -> tuple[int, int]:
        return (self.start, self.end)

    def __len__(self) -> int:
        return len(self.letters)

    def symbol_at(self, k: int) -> int:
        if not self.start <= k <= self.end:
            raise ValidationError(f"position {k} outside window {self.window}")
        return self.letters[k - self.start]

    def restrict(self, a: int, b: int) -> "Word":
        if a < self.start or b > self.end:
            raise ValidationError("restriction window exceeds word window")
        return Word(self.alphabet, a, self.letters[a - self.start:b - self.start + 1])

    def shifted(self, j: int) -> "Word":
        """The word ``T^j w`` living on ``window - j`` (same letters)."""
        return Word(self.alphabet, self.start - j, self.letters)

    def text(self) -> str:
        return self.alphabet.text(self.letters)


@dataclass(frozen=True)
class Cylinder:
    """Cylinder set determined by a center word on the symmetric window [-m, m]."""

    center_word: Word

    def __post_init__(self):
        w = self.center_word
        if len(w) % 2 == 0 or w.start != -(len(w) // 2):
            raise ValidationError("cylinder window must be symmetric about 0")

    @property
    def m(self) -> int:
        return len(self.center_word) // 2


class SoficPresentation:
    """Labeled directed graph presenting a sofic shift.

    The presented shift space is exactly the set of bi-infinite label
    sequences of paths.  The graph must be essential (every vertex has at
    least one outgoing and one incoming edge).
    """

    def __init__(self, alphabet: Alphabet, vertices: Sequence[str],
                 edges: Sequence[tuple[str, str, str]]):
        self.alphabet = alphabet
        self.vertices = tuple(str(v) for v in vertices)
        if not self.vertices:
            raise ValidationError("presentation needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("vertex names must be distinct")
        vindex = {v: i for i, v in enumerate(self.vertices)}
        parsed = []
        for (src, dst, sym) in edges:
            if str(src) not in vindex:
                raise ValidationError(f"unknown vertex {src!r} in edge")
            if str(dst) not in vindex:
                raise ValidationError(f"unknown vertex {dst!r} in edge")
            parsed.append((vindex[str(src)], vindex[str(dst)], alphabet.index(str(sym))))
        self.edges = tuple(parsed)
        if not self.edges:
            raise ValidationError("presentation needs at least one edge")
        n = len(self.vertices)
        out_lists: list[list[int]] = [[] for _ in range(n)]
        in_lists: list[list[int]] = [[] for _ in range(n)]
        for e, (s, d, _a) in enumerate(self.edges):
            out_lists[s].append(e)
            in_lists[d].append(e)
        for v in range(n):
            if not out_lists[v] or not in_lists[v]:
                raise ValidationError(
                    f"vertex {self.vertices[v]!r} is stranded: presentation must be essential")
        self._out = tuple(tuple(es) for es in out_lists)
        self._in = tuple(tuple(es) for es in in_lists)

    # -- basic structure ---------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edge_source(self, e: int) -> int:
        return self.edges[e][0]

    def edge_target(self, e: int) -> int:
        return self.edges[e][1]

    def edge_symbol(self, e: int) -> int:
        return self.edges[e][2]

    def out_edges(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_edges(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def __eq__(self, other) -> bool:
        return (isinstance(other, SoficPresentation)
                and self.alphabet == other.alphabet
                and self.vertices == other.vertices
                and self.edges == other.edges)

    def __hash__(self):
        return hash((self.alphabet, self.vertices, self.edges))

    def __repr__(self):
        return (f"SoficPresentation({len(self.vertices)} vertices, "
                f"{len(self.edges)} edges, alphabet {self.alphabet.symbols})")

    # -- cached structural flags --------------------------------------------

    @cached_property
    def right_resolving(self) -> bool:
        for v in range(self.n_vertices):
            labels = [self.edge_symbol(e) for e in self._out[v]]
            if len(labels) != len(set(labels)):
                return False
        return True

    @cached_property
    def irreducible(self) -> bool:
        n = self.n_vertices
        seen = self._reach(0, self._out, forward=True)
        if len(seen) != n:
            return False
        seen = self._reach(0, self._in, forward=False)
        return len(seen) == n

    def _reach(self, root: int, adj, forward: bool) -> set[int]:
        seen = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for e in adj[v]:
                w = self.edge_target(e) if forward else self.edge_source(e)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    @cached_property
    def period(self) -> int:
        """gcd of cycle lengths; defined only for irreducible graphs."""
        if not self.irreducible:
            raise ValidationError("aperiodicity undefined on reducible graph")
        level = {0: 0}
        queue = [0]
        g = 0
        while queue:
            nxt = []
            for v in queue:
                for e in self._out[v]:
                    w = self.edge_target(e)
                    if w in level:
                        g = math.gcd(g, level[v] + 1 - level[w])
                    else:
                        level[w] = level[v] + 1
                        nxt.append(w)
            queue = nxt
        return abs(g) if g else 0

    @cached_property
    def aperiodic(self) -> bool:
        return self.period == 1

    # -- determinized word automaton -----------------------------------------

    @cached_property
    def _det(self) -> tuple[np.ndarray, int]:
        """Subset automaton over label transitions, reachable from the full
        vertex set.  Words of the shift correspond one-to-one to paths from
        the start state, which makes word counting and word-sum partition
        products exact even when a word has several presenting paths."""
        K = len(self.alphabet)
        by_symbol: list[list[list[int]]] = [
            [[] for _ in range(K)] for _ in range(self.n_vertices)]
        for (s, d, a) in self.edges:
            by_symbol[s][a].append(d)
        start = frozenset(range(self.n_vertices))
        ids = {start: 0}
        order = [start]
        rows = []
        i = 0
        while i < len(order):
            cur = order[i]
            row = []
            for a in range(K):
                tgt = frozenset(t for v in cur for t in by_symbol[v][a])
                if tgt:
                    if tgt not in ids:
                        if len(ids) >= _DET_STATE_CAP:
                            raise VolumeGuardError(
                                "volume too large for brute force: determinized "
                                "automaton exceeds state cap")
                        ids[tgt] = len(order)
                        order.append(tgt)
                    row.append(ids[tgt])
                else:
                    row.append(-1)
            rows.append(row)
            i += 1
        return np.array(rows, dtype=np.int64), 0

    def word_count(self, length: int) -> int:
        """Exact number of allowed words of the given length (exact integers)."""
        if length == 0:
            return 1
        det, start = self._det
        counts = {start: 1}
        for _ in range(length):
            nxt: dict[int, int] = {}
            for s, c in counts.items():
                for t in det[s]:
                    if t >= 0:
                        nxt[int(t)] = nxt.get(int(t), 0) + c
            counts = nxt
        return sum(counts.values())

    def allows(self, letters: Sequence[int]) -> bool:
        """True iff the letter sequence labels at least one path."""
        det, s = self._det
        for a in letters:
            s = det[s][a]
            if s < 0:
                return False
        return True

    # -- word enumeration ------------------------------------------------------

    def _grow(self, words: np.ndarray, states: np.ndarray, steps: int
              ) -> tuple[np.ndarray, np.ndarray]:
        det, _ = self._det
        K = len(self.alphabet)
        letters_tile = np.arange(K, dtype=np.uint8)
        for _ in range(steps):
            n = words.shape[0]
            rep = np.repeat(np.arange(n), K)
            letters = np.tile(letters_tile, n)
            nxt = det[states[rep], letters]
            ok = nxt >= 0
            words = np.concatenate(
                [words[rep[ok]], letters[ok][:, None]], axis=1)
            states = nxt[ok]
        return words, states

    def word_matrix(self, length: int, cap: int | None = None) -> np.ndarray:
        """All allowed words of the given length, lexicographic order, as a
        ``(count, length)`` uint8 array.  Refuses above the enumeration cap."""
        count = self.word_count(length)
        limit = enumeration_cap(cap)
        if count > limit:
            raise VolumeGuardError(
                f"volume too large for brute force: {count} words of length "
                f"{length} exceed the cap {limit}")
        det, start = self._det
        words = np.zeros((1, 0), dtype=np.uint8)
        states = np.array([start], dtype=np.int64)
        words, _ = self._grow(words, states, length)
        return words

    def iter_word_blocks(self, length: int, cap: int | None = None,
                         block_size: int = 1 << 20) -> Iterator[np.ndarray]:
        """Yield the lexicographic word list in contiguous blocks of at most
        ``block_size`` rows without materializing the whole list."""
        count = self.word_count(length)
        limit = enumeration_cap(cap)
        if count > limit:
            raise VolumeGuardError(
                f"volume too large for brute force: {count} words of length "
                f"{length} exceed the cap {limit}")
        det, start = self._det
        n_det = det.shape[0]
        # per-state subtree word counts, exact integers
        cnt: list[list[int]] = [[1] * n_det]
        for _ in range(length):
            prev = cnt[-1]
            cur = []
            for s in range(n_det):
                c = 0
                for t in det[s]:
                    if t >= 0:
                        c += prev[int(t)]
                cur.append(c)
            cnt.append(cur)

        K = len(self.alphabet)

        def emit(prefix: list[int], state: int, remaining: int):
            if cnt[remaining][state] <= block_size or remaining == 0:
                row = np.array([prefix], dtype=np.uint8)
                st = np.array([state], dtype=np.int64)
                words, _ = self._grow(row, st, remaining)
                if words.shape[0]:
                    yield words
                return
            for a in range(K):
                t = det[state][a]
                if t >= 0:
                    yield from emit(prefix + [a], int(t), remaining - 1)

        yield from emit([], start, length)

    # -- path utilities ---------------------------------------------------------

    @cached_property
    def _pair_dist(self) -> np.ndarray:
        """Shortest nonempty path lengths between ordered vertex pairs."""
        n = self.n_vertices
        dist = np.full((n, n), -1, dtype=np.int64)
        for src in range(n):
            frontier = [self.edge_target(e) for e in self._out[src]]
            d = 1
            seen: set[int] = set()
            while frontier:
                fresh = []
                for v in frontier:
                    if v not in seen:
                        seen.add(v)
                        if dist[src, v] < 0:
                            dist[src, v] = d
                        fresh.append(v)
                frontier = sorted({self.edge_target(e) for v in fresh for e in self._out[v]}
                                  - seen)
                d += 1
        return dist

    def shortest_path_edges(self, src: int, dst: int) -> tuple[int, ...]:
        """Edge list of a shortest nonempty path src -> dst (lexicographically
        first among the shortest); requires reachability."""
        best: dict[int, tuple[int, ...]] = {}
        frontier: list[tuple[int, tuple[int, ...]]] = [(src, ())]
        while frontier:
            nxt: list[tuple[int, tuple[int, ...]]] = []
            for v, path in frontier:
                for e in self._out[v]:
                    w = self.edge_target(e)
                    cand = path + (e,)
                    if w == dst:
                        return cand
                    if w not in best:
                        best[w] = cand
                        nxt.append((w, cand))
            frontier = nxt
        raise ValidationError("no finite gap: target vertex unreachable")


@dataclass(frozen=True)
class DecouplingCertificate:
    """Graph gap certificate: every ordered vertex pair is joined by a path
    of length exactly ``gap`` (exact-length variant) or by a nonempty path
    of length at most ``gap`` (bounded-length variant)."""

    gap: int
    variant: str  # "bounded-length" | "exact-length"

    def __post_init__(self):
        if self.variant not in ("bounded-length", "exact-length"):
            raise ValidationError(f"unknown gap variant {self.variant!r}")


@dataclass(frozen=True)
class BlockCode:
    """Sliding-block code with window radius ``radius``: maps each allowed
    source word on ``[-radius, radius]`` to a target symbol."""

    radius: int
    target_alphabet: Alphabet
    block_map: Callable[[tuple[int, ...]], int]

    @staticmethod
    def from_table(radius: int, target_alphabet: Alphabet,
                   table: dict[tuple[int, ...], int],
                   default: int | None = None) -> "BlockCode":
        def fn(pattern: tuple[int, ...]) -> int:
            if pattern in table:
                return table[pattern]
            if default is None:
                raise ValidationError(f"block map undefined on pattern {pattern}")
            return default
        return BlockCode(radius, target_alphabet, fn)


class Point:
    """Bi-infinite eventually-periodic point with an explicit presenting path.

    The path is stored as three edge lists: ``left_cycle`` repeated toward
    -infinity on ``(-inf, core_start)``, ``core`` on
    ``[core_start, core_start + len(core) - 1]``, and ``right_cycle``
    repeated toward +infinity.  Symbols are the edge labels, so every
    coordinate is queryable in O(1).
    """

    def __init__(self, presentation: SoficPresentation,
                 left_cycle: Sequence[int], core: Sequence[int],
                 right_cycle: Sequence[int], core_start: int = 0):
        self.presentation = presentation
        self.left_cycle = tuple(int(e) for e in left_cycle)
        self.core = tuple(int(e) for e in core)
        self.right_cycle = tuple(int(e) for e in right_cycle)
        self.core_start = int(core_start)
        if not self.left_cycle or not self.right_cycle:
            raise ValidationError("tail cycles must be nonempty")
        p = presentation
        for e in self.left_cycle + self.core + self.right_cycle:
            if not 0 <= e < len(p.edges):
                raise ValidationError(f"edge id {e} out of range")
        # cycles must close up
        for cyc in (self.left_cycle, self.right_cycle):
            for i, e in enumerate(cyc):
                nxt = cyc[(i + 1) % len(cyc)]
                if p.edge_target(e) != p.edge_source(nxt):
                    raise ValidationError("tail cycle is not a closed path")
        # the full edge assignment must chain correctly across joints
        lo = self.core_start - 1
        hi = self.core_start + len(self.core)
        for k in range(lo, hi + 1):
            if p.edge_target(self.edge_at(k)) != p.edge_source(self.edge_at(k + 1)):
                raise ValidationError("presenting path edges do not chain")

    @property
    def right_start(self) -> int:
        """First coordinate governed by the right cycle."""
        return self.core_start + len(self.core)

    def edge_at(self, k: int) -> int:
        if k < self.core_start:
            return self.left_cycle[(k - self.core_start) % len(self.left_cycle)]
        if k >= self.right_start:
            return self.right_cycle[(k - self.right_start) % len(self.right_cycle)]
        return self.core[k - self.core_start]

    def symbol_at(self, k: int) -> int:
        return self.presentation.edge_symbol(self.edge_at(k))

    def vertex_at(self, k: int) -> int:
        """Vertex visited at position k (source of the edge at k)."""
        return self.presentation.edge_source(self.edge_at(k))

    def word(self, a: int, b: int) -> Word:
        return Word(self.presentation.alphabet, a,
                    tuple(self.symbol_at(k) for k in range(a, b + 1)))

    def shifted(self, j: int) -> "Point":
        """The translate T^j of this point: ``(T^j x)(k) = x(k + j)``."""
        return Point(self.presentation, self.left_cycle, self.core,
                     self.right_cycle, self.core_start - j)

    def __repr__(self):
        w = self.word(-3, 3)
        return f"Point(...{w.text()}... core_start={self.core_start})"


def periodic_point(presentation: SoficPresentation, cycle_edges: Sequence[int],
                   core_start: int = 0) -> Point:
    """Point obtained by repeating one closed path in both directions."""
    return Point(presentation, cycle_edges, (), cycle_edges, core_start)


def point_from_words(presentation: SoficPresentation, left: Sequence[int],
                     core: Sequence[int], right: Sequence[int],
                     core_start: int = 0) -> Point:
    """Find a presenting path for the eventually periodic symbol sequence
    given by ``left`` repeated on the left, ``core`` in the middle and
    ``right`` repeated on the right; bounded search over (phase, vertex)
    pairs synchronized with the cycles.
    """
    p = presentation
    left = tuple(int(a) for a in left)
    core = tuple(int(a) for a in core)
    right = tuple(int(a) for a in right)
    if not left or not right:
        raise ValidationError("tail cycle words must be nonempty")

    def sym_edges(v: int, a: int) -> list[int]:
        return [e for e in p.out_edges(v) if p.edge_symbol(e) == a]

    n = p.n_vertices
    # product-graph nodes (phase i, vertex v) for the left cycle word:
    # an edge (i, v) -> (i+1 mod P, w) exists when v --left[i]--> w.
    P = len(left)
    good_left = {(i, v) for i in range(P) for v in range(n)}
    # greatest fixed point: keep (i, v) only if it has a predecessor, so the
    # periodic tail can extend to -infinity
    changed = True
    while changed:
        changed = False
        keep = set()
        for (i, v) in good_left:
            prev_i = (i - 1) % P
            if any((prev_i, p.edge_source(e)) in good_left
                   for e in p.in_edges(v) if p.edge_symbol(e) == left[prev_i]):
                keep.add((i, v))
        if keep != good_left:
            good_left = keep
            changed = True
    # symmetric construction for the right cycle: keep nodes with a successor
    Q = len(right)
    good_right = {(i, v) for i in range(Q) for v in range(n)}
    changed = True
    while changed:
        changed = False
        keep = set()
        for (i, v) in good_right:
            if any(((i + 1) % Q, p.edge_target(e)) in good_right
                   for e in sym_edges(v, right[i])):
                keep.add((i, v))
        if keep != good_right:
            good_right = keep
            changed = True
    if not good_left or not good_right:
        raise ValidationError("word has no presenting path in this presentation")

    # read the core from a good left node to a good right node
    start_phase = 0  # left cycle aligned so that left[0] sits at core_start - P
    paths: dict[int, list[int]] = {
        v: [] for (i, v) in sorted(good_left) if i == start_phase}
    if not paths:
        raise ValidationError("word has no presenting path in this presentation")
    for a in core:
        nxt: dict[int, list[int]] = {}
        for v, path in sorted(paths.items()):
            for e in sorted(sym_edges(v, a)):
                w = p.edge_target(e)
                if w not in nxt:
                    nxt[w] = path + [e]
        paths = nxt
        if not paths:
            raise ValidationError("word has no presenting path in this presentation")
    ends = [v for v in paths if (0, v) in good_right]
    if not ends:
        raise ValidationError("word has no presenting path in this presentation")
    end = min(ends)
    core_edges = paths[end]

    # realize concrete cycles through the chosen joints
    def walk_left_cycle(v: int) -> tuple[list[int], list[int]]:
        # walk backwards through good_left until a (phase, vertex) repeats
        trail = [(start_phase, v)]
        edges: list[int] = []
        seen = {trail[0]: 0}
        while True:
            i, u = trail[-1]
            prev_i = (i - 1) % P
            cands = [e for e in p.in_edges(u)
                     if p.edge_symbol(e) == left[prev_i]
                     and (prev_i, p.edge_source(e)) in good_left]
            e = min(cands)
            node = (prev_i, p.edge_source(e))
            edges.append(e)
            if node in seen:
                # cycle found: the edges from `node`'s first occurrence on
                cut = seen[node]
                cyc = list(reversed(edges[cut:]))
                lead = list(reversed(edges[:cut]))
                return cyc, lead
            seen[node] = len(edges)
            trail.append(node)

    def walk_right_cycle(v: int) -> tuple[list[int], list[int]]:
        trail = [(0, v)]
        edges: list[int] = []
        seen = {trail[0]: 0}
        while True:
            i, u = trail[-1]
            cands = [e for e in sym_edges(u, right[i])
                     if ((i + 1) % Q, p.edge_target(e)) in good_right]
            e = min(cands)
            node = ((i + 1) % Q, p.edge_target(e))
            edges.append(e)
            if node in seen:
                cut = seen[node]
                return edges[cut:], edges[:cut]
            seen[node] = len(edges)
            trail.append(node)

    start_vertex = (p.edge_source(core_edges[0]) if core_edges else end)
    left_cyc, left_lead = walk_left_cycle(start_vertex)
    right_cyc, right_lead = walk_right_cycle(end)
    # fold the acyclic lead-ins into the core so the tails are purely periodic
    full_core = left_lead + core_edges + right_lead
    return Point(presentation, left_cyc, full_core, right_cyc,
                 core_start - len(left_lead))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def enumerate_words(presentation: SoficPresentation, n: int,
                    cap: int | None = None) -> list[Word]:
    """All allowed words on the window [-n, n], lexicographic in the
    alphabet order.  Refuses above the enumeration cap."""
    if n < 0:
        raise ValidationError("n must be nonnegative")
    mat = presentation.word_matrix(2 * n + 1, cap=cap)
    alph = presentation.alphabet
    return [Word(alph, -n, tuple(int(a) for a in row)) for row in mat]


def is_irreducible(presentation: SoficPresentation) -> bool:
    """True iff the underlying digraph is strongly connected."""
    return presentation.irreducible


def is_aperiodic(presentation: SoficPresentation) -> bool:
    """True iff the gcd of cycle lengths is 1; requires irreducibility."""
    return presentation.aperiodic


def decoupling_gap(presentation: SoficPresentation,
                   variant: str = "bounded-length") -> DecouplingCertificate:
    """Minimal gap certificate of the requested variant.

    bounded-length: the maximum over ordered vertex pairs of the shortest
    nonempty path length.  exact-length: the minimal q whose q-th Boolean
    adjacency power is all-positive (requires aperiodicity).
    """
    if variant not in ("bounded-length", "exact-length"):
        raise ValidationError(f"unknown gap variant {variant!r}")
    if not presentation.irreducible:
        raise ValidationError("no finite gap: presentation is not irreducible")
    if variant == "bounded-length":
        dist = presentation._pair_dist
        return DecouplingCertificate(int(dist.max()), variant)
    if not presentation.aperiodic:
        raise ValidationError("exact-length gap does not exist: graph is periodic")
    n = presentation.n_vertices
    adj = np.zeros((n, n), dtype=bool)
    for (s, d, _a) in presentation.edges:
        adj[s, d] = True
    power = adj.copy()
    q = 1
    limit = (n - 1) * (n - 1) + 2
    while not power.all():
        power = (power.astype(np.int64) @ adj.astype(np.int64)) > 0
        q += 1
        if q > limit:
            raise ValidationError("exact-length gap does not exist: graph is periodic")
    return DecouplingCertificate(q, variant)


def splice(presentation: SoficPresentation, x_minus: Point, y: Point,
           x_plus: Point, m: int) -> tuple[Point, int, int]:
    """Glue the center of ``y`` on [-m, m] to the far tails of ``x_minus``
    and ``x_plus`` through connecting graph paths.

    Returns ``(z, l_minus, l_plus)`` with ``|l_minus|, |l_plus| <= q`` (the
    bounded-length gap) such that

    * ``z`` agrees with ``y`` on ``[-m, m]``,
    * ``z`` agrees with ``T^{-l_minus} x_minus`` on ``(-inf, -m-q)``,
    * ``z`` agrees with ``T^{-l_plus} x_plus`` on ``(m+q, inf)``.
    """
    for pt in (x_minus, y, x_plus):
        if pt.presentation is not presentation and pt.presentation != presentation:
            raise ValidationError("foreign point: not presented in this presentation")
    if not presentation.irreducible:
        raise ValidationError("no finite gap: presentation is not irreducible")
    if m < 0:
        raise ValidationError("m must be nonnegative")
    q = decoupling_gap(presentation, "bounded-length").gap

    p = presentation
    vQ = y.vertex_at(-m)                       # start of the middle block
    vR = p.edge_target(y.edge_at(m))           # end of the middle block
    vP = p.edge_target(x_minus.edge_at(-(m + q) - 1))  # end of the left tail
    vS = x_plus.vertex_at(m + q + 1)           # start of the right tail

    conn_left = p.shortest_path_edges(vP, vQ)
    conn_right = p.shortest_path_edges(vR, vS)
    q_minus, q_plus = len(conn_left), len(conn_right)
    l_minus = q - q_minus
    l_plus = q_plus - q

    def z_edge(k: int) -> int:
        if k < -m - q_minus:
            return x_minus.edge_at(k - l_minus)
        if k < -m:
            return conn_left[k + m + q_minus]
        if k <= m:
            return y.edge_at(k)
        if k <= m + q_plus:
            return conn_right[k - m - 1]
        return x_plus.edge_at(k - l_plus)

    p_left = len(x_minus.left_cycle)
    p_right = len(x_plus.right_cycle)
    core_lo = min(-m - q_minus, x_minus.core_start + l_minus)
    core_hi = max(m + q_plus, x_plus.right_start + l_plus - 1)
    left_cycle = [z_edge(core_lo - p_left + i) for i in range(p_left)]
    right_cycle = [z_edge(core_hi + 1 + i) for i in range(p_right)]
    core = [z_edge(k) for k in range(core_lo, core_hi + 1)]
    z = Point(presentation, left_cycle, core, right_cycle, core_lo)
    return z, l_minus, l_plus


def apply_block_code(code: BlockCode, w: Word) -> Word:
    """Apply a radius-k sliding-block code to a word on [a-k, b+k],
    producing the image word on [a, b]."""
    k = code.radius
    if len(w) < 2 * k + 1:
        raise ValidationError("insufficient context: window too short for code radius")
    a, b = w.start + k, w.end - k
    letters = []
    for pos in range(a, b + 1):
        pattern = tuple(w.letters[pos - k - w.start: pos + k + 1 - w.start])
        letters.append(code.block_map(pattern))
    return Word(code.target_alphabet, a, tuple(letters))


def factor_presentation(presentation: SoficPresentation,
                        code: BlockCode) -> SoficPresentation:
    """Presentation of the image shift under a sliding-block code.

    Vertices are length-2k paths of the source graph (the k = 0 case keeps
    the source vertices); an edge extends the path by one source edge and
    carries the code's output on the (2k+1)-letter label window.  The
    presented language is exactly the image of the source language.
    """
    k = code.radius
    p = presentation
    if k == 0:
        keys = [(v, ()) for v in range(p.n_vertices)]
    else:
        paths = [(v, ()) for v in range(p.n_vertices)]
        for _ in range(2 * k):
            paths = [(p.edge_target(e), es + (e,))
                     for (v, es) in paths for e in p.out_edges(v)]
        keys = sorted({(p.edge_source(es[0]), es) for (_v, es) in paths})
    index = {key: i for i, key in enumerate(keys)}
    names = [f"b{i}" for i in range(len(keys))]
    edges = []
    for (v0, es) in keys:
        end = p.edge_target(es[-1]) if es else v0
        for f in p.out_edges(end):
            window = tuple(p.edge_symbol(e) for e in es) + (p.edge_symbol(f),)
            label = code.block_map(window)
            if es:
                tgt = (p.edge_target(es[0]), es[1:] + (f,))
            else:
                tgt = (p.edge_target(f), ())
            edges.append((names[index[(v0, es)]], names[index[tgt]],
                          code.target_alphabet.symbols[label]))
    return SoficPresentation(code.target_alphabet, names, edges)


def factor_gap_bound(source_cert: DecouplingCertificate, k: int) -> int:
    """Gap bound propagated through a radius-k factor code: q + 2k."""
    return source_cert.gap + 2 * k


def sft_presentation(alphabet: Alphabet,
                     forbidden: Sequence[str]) -> SoficPresentation:
    """Vertex-shift presentation of the SFT with the given forbidden words.

    Vertices are the allowed (F-1)-blocks (F = longest forbidden word,
    minimum memory 1); the edge u -> v exists when the overlap word u·v[-1]
    avoids every forbidden word, and is labeled with the newly exposed
    letter v[-1].  Stranded blocks are pruned so the graph is essential.
    """
    fwords = [alphabet.parse(t) for t in forbidden]
    if any(len(f) == 0 for f in fwords):
        raise ValidationError("forbidden words must be nonempty")
    memory = max((len(f) - 1 for f in fwords), default=1)
    memory = max(memory, 1)
    K = len(alphabet)

    def contains_forbidden(seq: tuple[int, ...]) -> bool:
        for f in fwords:
            L = len(f)
            for i in range(len(seq) - L + 1):
                if seq[i:i + L] == tuple(f):
                    return True
        return False

    blocks = [b for b in _tuples(K, memory) if not contains_forbidden(b)]
    alive = set(blocks)
    # prune to the essential core
    changed = True
    while changed:
        changed = False
        keep = set()
        for b in alive:
            has_out = any(b[1:] + (a,) in alive and
                          not contains_forbidden(b + (a,))
                          for a in range(K))
            has_in = any((a,) + b[:-1] in alive and
                         not contains_forbidden((a,) + b)
                         for a in range(K))
            if has_out and has_in:
                keep.add(b)
        if keep != alive:
            alive = keep
            changed = True
    if not alive:
        raise ValidationError("SFT language is empty")
    blocks = sorted(alive)
    names = [alphabet.text(b) for b in blocks]
    edges = []
    for b in blocks:
        for a in range(K):
            t = b[1:] + (a,)
            if t in alive and not contains_forbidden(b + (a,)):
                edges.append((alphabet.text(b), alphabet.text(t),
                              alphabet.symbols[a]))
    return SoficPresentation(alphabet, names, edges)


def _tuples(K: int, length: int) -> Iterator[tuple[int, ...]]:
    if length == 0:
        yield ()
        return
    for head in _tuples(K, length - 1):
        for a in range(K):
            yield head + (a,)
