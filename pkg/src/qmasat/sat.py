"""SAT instances, brute-force oracles, the 8-clause census and the 3-SAT reduction.

Two instance types live here.  :class:`Cnf3` is an ordinary 3-CNF formula with
signed DIMACS-style literals.  :class:`SatInstance24` is a 2-out-of-4 SAT
instance: every clause names four distinct variables and is satisfied when
exactly two of them are true.

Assignments are plain tuples of 0/1 integers ``(x_1, ..., x_n)``.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import CapacityError, InputError, ParseError

#: Largest instance the brute-force oracle will enumerate.
MAX_ENUM_VARS = 30
#: Largest number of live partial assignments kept during enumeration.
MAX_FRONTIER = 1 << 25
#: Largest number of instances a census will walk.
MAX_CENSUS_INSTANCES = 2_000_000

Assignment = tuple  # tuple[int, ...] of 0/1


@dataclass(frozen=True)
class Cnf3:
    """A 3-CNF formula over variables ``1..n_vars``."""

    n_vars: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.n_vars < 1:
            raise InputError(f"n_vars must be positive, got {self.n_vars}")
        for idx, c in enumerate(clauses):
            _check_cnf_clause(c, self.n_vars, idx)


@dataclass(frozen=True)
class SatInstance24:
    """A 2-out-of-4 SAT instance over variables ``1..n_vars``."""

    n_vars: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(tuple(int(v) for v in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.n_vars < 2 or self.n_vars % 2:
            raise InputError(f"n_vars must be a positive even integer, got {self.n_vars}")
        for idx, c in enumerate(clauses):
            _check_clause24(c, self.n_vars, idx)

    def __len__(self):
        return len(self.clauses)


def _check_cnf_clause(clause, n_vars, idx):
    if len(clause) != 3:
        raise InputError(f"clause {idx} has {len(clause)} literals, expected 3")
    variables = [abs(l) for l in clause]
    if any(l == 0 or abs(l) > n_vars for l in clause):
        raise InputError(f"clause {idx} has a literal outside 1..{n_vars}: {clause}")
    if len(set(variables)) != 3:
        raise InputError(f"clause {idx} repeats a variable: {clause}")


def _check_clause24(clause, n_vars, idx=None):
    where = "clause" if idx is None else f"clause {idx}"
    if len(clause) != 4:
        raise InputError(f"{where} has {len(clause)} indices, expected 4")
    if any(v < 1 or v > n_vars for v in clause):
        raise InputError(f"{where} has an index outside 1..{n_vars}: {clause}")
    if len(set(clause)) != 4:
        raise InputError(f"{where} indices are not distinct: {clause}")


# ---------------------------------------------------------------------------
# Assignments and clause evaluation


def assignment_from_string(bits: str) -> Assignment:
    """``"110000"`` -> ``(1, 1, 0, 0, 0, 0)``."""
    if not bits or set(bits) - {"0", "1"}:
        raise InputError(f"not a bit string: {bits!r}")
    return tuple(int(b) for b in bits)


def assignment_to_string(a: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in a)


def complement(a: Sequence[int]) -> Assignment:
    return tuple(1 - int(b) for b in a)


def eval_clause24(clause: Sequence[int], a: Sequence[int]) -> bool:
    """True iff exactly two of the four clause variables are set in ``a``."""
    if len(clause) != 4 or any(v < 1 or v > len(a) for v in clause):
        raise InputError(f"clause {tuple(clause)} invalid for {len(a)} variables")
    return sum(int(a[v - 1]) for v in clause) == 2


def eval_instance(inst: SatInstance24, a: Sequence[int]) -> bool:
    if len(a) != inst.n_vars:
        raise InputError(f"assignment length {len(a)} != n_vars {inst.n_vars}")
    return all(eval_clause24(c, a) for c in inst.clauses)


def eval_cnf(cnf: Cnf3, a: Sequence[int]) -> bool:
    if len(a) != cnf.n_vars:
        raise InputError(f"assignment length {len(a)} != n_vars {cnf.n_vars}")
    return all(any((l > 0) == bool(a[abs(l) - 1]) for l in c) for c in cnf.clauses)


def all_clauses24(n: int) -> list:
    """Every 4-subset of ``1..n`` in lexicographic order."""
    return list(itertools.combinations(range(1, n + 1), 4))


# ---------------------------------------------------------------------------
# Brute force


def _enumerate(n_vars, closing, check, limit):
    # Breadth-first extension of prefixes, x_1 most significant.  Appending the
    # new bit as the least significant one keeps the frontier sorted, so the
    # survivors come out in lexicographic order.
    if n_vars > MAX_ENUM_VARS:
        raise CapacityError(f"{n_vars} variables exceeds the enumeration bound {MAX_ENUM_VARS}")
    codes = np.zeros(1, dtype=np.int64)
    for t in range(1, n_vars + 1):
        nxt = np.empty(2 * codes.size, dtype=np.int64)
        nxt[0::2] = codes << 1
        nxt[1::2] = (codes << 1) | 1
        codes = nxt
        for item in closing[t]:
            codes = codes[check(codes, t, item)]
        if codes.size > MAX_FRONTIER:
            raise CapacityError(f"more than {MAX_FRONTIER} partial assignments alive at variable {t}")
        if not codes.size:
            break
    if limit is not None:
        codes = codes[:limit]
    shifts = np.arange(n_vars - 1, -1, -1, dtype=np.int64)
    bits = (codes[:, None] >> shifts) & 1
    return [tuple(row) for row in bits.tolist()]


def _closing_index(n_vars, items, variables_of):
    closing = [[] for _ in range(n_vars + 1)]
    for item in items:
        closing[max(variables_of(item))].append(item)
    return closing


def _check24(codes, t, clause):
    total = np.zeros(codes.size, dtype=np.int64)
    for v in clause:
        total += (codes >> (t - v)) & 1
    return total == 2


def _check_cnf(codes, t, clause):
    ok = np.zeros(codes.size, dtype=bool)
    for l in clause:
        bit = ((codes >> (t - abs(l))) & 1).astype(bool)
        ok |= bit if l > 0 else ~bit
    return ok


def solutions(inst: SatInstance24, limit: int | None = None) -> list:
    """All satisfying assignments of ``inst`` in lexicographic order.

    Exhaustive over ``{0,1}^n``; a prefix is dropped as soon as a clause whose
    variables it fully covers is violated.  ``limit`` truncates the result.
    """
    closing = _closing_index(inst.n_vars, inst.clauses, lambda c: c)
    return _enumerate(inst.n_vars, closing, _check24, limit)


def cnf_solutions(cnf: Cnf3, limit: int | None = None) -> list:
    closing = _closing_index(cnf.n_vars, cnf.clauses, lambda c: [abs(l) for l in c])
    return _enumerate(cnf.n_vars, closing, _check_cnf, limit)


def is_satisfiable(inst) -> bool:
    if isinstance(inst, Cnf3):
        return bool(cnf_solutions(inst, limit=1))
    return bool(solutions(inst, limit=1))


# ---------------------------------------------------------------------------
# Census


class Census(NamedTuple):
    total: int
    satisfiable: int
    solution_counts: list


def _clause_masks(n):
    # bit i of a mask <-> assignment number i in lexicographic order
    masks = []
    for clause in all_clauses24(n):
        m = 0
        for i in range(1 << n):
            if sum((i >> (n - v)) & 1 for v in clause) == 2:
                m |= 1 << i
        masks.append(m)
    return masks


def census(n: int = 6, m: int = 8) -> Census:
    """Count solutions of every m-subset of the 4-variable clauses on n variables."""
    if n < 4 or n % 2:
        raise InputError(f"census needs an even n >= 4, got {n}")
    if n > 16:
        raise CapacityError(f"census over {n} variables exceeds the bound of 16")
    n_clauses = math.comb(n, 4)
    if not 0 <= m <= n_clauses:
        raise InputError(f"m must lie in 0..{n_clauses}, got {m}")
    total = math.comb(n_clauses, m)
    if total > MAX_CENSUS_INSTANCES:
        raise CapacityError(f"{total} instances exceeds the census bound {MAX_CENSUS_INSTANCES}")
    masks = _clause_masks(n)
    full = (1 << (1 << n)) - 1
    counts = []
    for combo in itertools.combinations(masks, m):
        acc = full
        for mask in combo:
            acc &= mask
        counts.append(acc.bit_count())
    return Census(total, sum(1 for c in counts if c), counts)


def census_instance(n: int, m: int, index: int) -> SatInstance24:
    """The ``index``-th m-clause instance in the census enumeration order."""
    total = math.comb(math.comb(n, 4), m)
    if not 0 <= index < total:
        raise InputError(f"census index must lie in 0..{total - 1}, got {index}")
    combo = next(itertools.islice(itertools.combinations(all_clauses24(n), m), index, None))
    return SatInstance24(n, combo)


# ---------------------------------------------------------------------------
# 3-SAT -> 2-out-of-4 SAT


class _Builder:
    def __init__(self, n_vars):
        self.n = n_vars
        self.clauses = []

    def new(self):
        self.n += 1
        return self.n

    def add(self, *vs):
        self.clauses.append(tuple(vs))


def reduce_3sat(cnf: Cnf3) -> SatInstance24:
    """Reduce a 3-CNF formula to an equisatisfiable 2-out-of-4 SAT instance.

    Original variable ``i`` keeps index ``i``.  Index ``n_vars + 1`` is a
    reference variable read as "false"; every 2-out-of-4 instance is closed
    under global complement, so a solution decodes as ``x_i XOR x_ref``
    (see :func:`decode_reduced`).

    Each clause picks two literals of equal sign.  A pair clause
    ``(p, q, g, h)`` forces ``g = h = 1`` when ``p = q = 0`` and ``g = h = 0``
    when ``p = q = 1``; it is shared by all clauses over the same variable
    pair, positive clauses reading ``g`` and negative ones reading ``h``.  A
    tail gadget then forbids "pair triggered and third literal false".
    """
    n = cnf.n_vars
    if not cnf.clauses:
        return SatInstance24(n + n % 2, ())

    b = _Builder(n)
    ref_f, ref_t = b.new(), b.new()
    h1, h2, h3 = b.new(), b.new(), b.new()
    # only satisfiable with ref_f != ref_t
    b.add(ref_f, ref_t, h1, h2)
    b.add(ref_f, ref_t, h1, h3)
    b.add(ref_f, h1, h2, h3)

    pairs = {}
    negation = {}

    def pair_handles(p, q):
        key = (min(p, q), max(p, q))
        if key not in pairs:
            g, h = b.new(), b.new()
            b.add(key[0], key[1], g, h)
            pairs[key] = (g, h)
        return pairs[key]

    def negated(u):
        if u not in negation:
            a = b.new()
            b.add(u, ref_f, ref_t, a)
            negation[u] = a
        return negation[u]

    for clause in cnf.clauses:
        p, q, r = _choose_pair(clause, pairs)
        positive = p > 0
        g, h = pair_handles(abs(p), abs(q))
        handle, trigger = (g, 1) if positive else (h, 0)
        falsifying = 0 if r > 0 else 1
        x = abs(r)
        if (trigger, falsifying) == (0, 0):
            b.add(handle, x, ref_f, b.new())
        elif (trigger, falsifying) == (1, 1):
            b.add(handle, x, ref_t, b.new())
        elif (trigger, falsifying) == (0, 1):
            b.add(x, ref_t, negated(handle), b.new())
        else:
            b.add(x, ref_f, negated(handle), b.new())

    if b.n % 2:
        b.new()
    return SatInstance24(b.n, tuple(b.clauses))


def _choose_pair(clause, existing):
    """Return ``(p, q, r)``: p, q equal-signed literals, r the remaining one."""
    options = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        p, q = clause[i], clause[j]
        if (p > 0) != (q > 0):
            continue
        (r,) = [clause[k] for k in range(3) if k not in (i, j)]
        key = (min(abs(p), abs(q)), max(abs(p), abs(q)))
        # cheap tails first (third literal of opposite sign), then reuse
        rank = ((r > 0) == (p > 0), key not in existing, i, j)
        options.append((rank, p, q, r))
    options.sort()
    _, p, q, r = options[0]
    return p, q, r


def decode_reduced(cnf: Cnf3, a: Sequence[int]) -> Assignment:
    """Map a solution of ``reduce_3sat(cnf)`` back to the original variables."""
    n = cnf.n_vars
    if not cnf.clauses:
        return tuple(int(x) for x in a[:n])
    ref = int(a[n])
    return tuple(int(x) ^ ref for x in a[:n])


# ---------------------------------------------------------------------------
# Text formats


def parse_cnf(text: str) -> Cnf3:
    """Parse DIMACS CNF with exactly three literals per clause."""
    header = None
    clauses = []
    current = []
    current_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise ParseError("duplicate problem line", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if header[0] < 1 or header[1] < 0:
                raise ParseError(f"malformed header {line!r}", lineno)
            continue
        if header is None:
            raise ParseError("clause before the 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"not an integer literal: {tok!r}", lineno) from None
            if current_line is None:
                current_line = lineno
            if lit == 0:
                _finish_cnf_clause(current, header[0], current_line, clauses)
                current, current_line = [], None
            else:
                if abs(lit) > header[0]:
                    raise ParseError(f"literal {lit} out of range 1..{header[0]}", lineno)
                current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        raise ParseError("last clause is not terminated by 0", current_line)
    if len(clauses) != header[1]:
        raise ParseError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return Cnf3(header[0], tuple(clauses))


def _finish_cnf_clause(lits, n_vars, lineno, out):
    try:
        _check_cnf_clause(tuple(lits), n_vars, len(out))
    except InputError as exc:
        raise ParseError(str(exc), lineno) from None
    out.append(tuple(lits))


def serialize_cnf(cnf: Cnf3) -> str:
    lines = [f"p cnf {cnf.n_vars} {len(cnf.clauses)}"]
    lines += [" ".join(str(l) for l in c) + " 0" for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def _clause_lines(text):
    # line number of each element of the top-level "clauses" array
    m = re.search(r'"clauses"\s*:\s*\[', text)
    if m is None:
        return []
    lines, depth, pos = [], 1, m.end()
    while pos < len(text) and depth:
        ch = text[pos]
        if ch == "[":
            depth += 1
            if depth == 2:
                lines.append(text.count("\n", 0, pos) + 1)
        elif ch == "]":
            depth -= 1
        pos += 1
    return lines


def parse_instance(text: str) -> SatInstance24:
    """Parse ``{"n": <int>, "clauses": [[i,j,k,l], ...]}``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(data, dict) or "n" not in data or "clauses" not in data:
        raise ParseError('expected an object with keys "n" and "clauses"', 1)
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 2 or n % 2:
        raise ParseError(f'"n" must be a positive even integer, got {n!r}', 1)
    raw = data["clauses"]
    if not isinstance(raw, list):
        raise ParseError('"clauses" must be a list', 1)
    lines = _clause_lines(text)
    clauses = []
    for idx, c in enumerate(raw):
        line = lines[idx] if idx < len(lines) else None
        if not isinstance(c, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in c):
            raise ParseError(f"clause {idx} must be a list of integers", line)
        try:
            _check_clause24(tuple(c), n, idx)
        except InputError as exc:
            raise ParseError(str(exc), line) from None
        clauses.append(tuple(c))
    return SatInstance24(n, tuple(clauses))


def serialize_instance(inst: SatInstance24) -> str:
    return json.dumps({"n": inst.n_vars, "clauses": [list(c) for c in inst.clauses]})


def instance_from_clauses(n: int, clauses: Iterable[Sequence[int]]) -> SatInstance24:
    return SatInstance24(n, tuple(tuple(c) for c in clauses))
