"""Arthur's four tests and the composite protocol.

Every test has an exact reject probability and a sampler that draws one
round with an explicit ``numpy.random.Generator``.  Samplers return a
:class:`Verdict`; nothing here touches global random state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityError, InputError
from .sat import SatInstance24, _check_clause24
from .states import overlap

#: Matchings are enumerated exhaustively only up to this many modes.
MAX_MATCHING_MODES = 16
#: The exact uniformity computation tracks 3**(n/2) sign patterns.
MAX_UNIFORMITY_PAIRS = 12


class TestKind(enum.Enum):
    SATISFIABILITY = "satisfiability"
    UNIFORMITY = "uniformity"
    SYMMETRY = "symmetry"
    PRODUCT = "product"


TestKind.__test__ = False  # keep pytest from collecting it

TEST_ORDER = (TestKind.SATISFIABILITY, TestKind.UNIFORMITY, TestKind.SYMMETRY, TestKind.PRODUCT)


@dataclass(frozen=True)
class Matching:
    """A perfect matching of ``1..n`` as sorted pairs ``(i, j)``, ``i < j``."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple(sorted(tuple(sorted((int(i), int(j)))) for i, j in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        modes = [v for p in pairs for v in p]
        if sorted(modes) != list(range(1, len(modes) + 1)) or any(i == j for i, j in pairs):
            raise InputError(f"not a perfect matching of 1..{len(modes)}: {pairs}")

    @property
    def n(self) -> int:
        return 2 * len(self.pairs)

    def outcome_labels(self) -> list:
        """Outcome order used by :func:`uniformity_outcome_dist`."""
        return [(p, s) for p in self.pairs for s in "+-"]

    def __str__(self):
        return "{" + ",".join(f"({i},{j})" for i, j in self.pairs) + "}"


@dataclass(frozen=True)
class Verdict:
    accept: bool
    test: TestKind
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.accept and not self.evidence:
            raise InputError("a reject verdict must carry its evidence")

    @property
    def decision(self) -> str:
        return "accept" if self.accept else "reject"


@dataclass(frozen=True)
class ProtocolParams:
    k_copies: int = 3
    test_weights: tuple = (0.25, 0.25, 0.25, 0.25)
    rng_seed: int = 0

    def __post_init__(self):
        w = tuple(float(x) for x in self.test_weights)
        object.__setattr__(self, "test_weights", w)
        if self.k_copies < 2:
            raise InputError(f"k_copies must be >= 2, got {self.k_copies}")
        if len(w) != 4 or min(w) < 0 or abs(sum(w) - 1) > 1e-12:
            raise InputError(f"test weights must be 4 nonnegative numbers summing to 1, got {w}")
        if not 0 <= self.rng_seed < 2**64:
            raise InputError("rng_seed must be an unsigned 64-bit integer")

    def weight(self, kind: TestKind) -> float:
        return self.test_weights[TEST_ORDER.index(kind)]


def _check_dims(a, b):
    if np.shape(a) != np.shape(b):
        raise InputError(f"dimension mismatch: {np.shape(a)} vs {np.shape(b)}")


# ---------------------------------------------------------------------------
# Satisfiability test


def clause_projection_prob(psi, clause: Sequence[int]) -> float:
    """|<c|psi>|^2 with |c> = (|i> + |j> + |k> + |l>)/2."""
    psi = np.asarray(psi)
    _check_clause24(tuple(clause), psi.size)
    amp = psi[[v - 1 for v in clause]].sum() / 2
    return float(abs(amp) ** 2)


def satisfiability_reject_exact(psis, inst: SatInstance24) -> float:
    """Reject probability with clause and copy drawn uniformly."""
    if not inst.clauses:
        raise InputError("the instance has no clauses")
    if not len(psis):
        raise InputError("no proof copies")
    return float(np.mean([[clause_projection_prob(p, c) for c in inst.clauses] for p in psis]))


def satisfiability_test(psis, inst: SatInstance24, rng: np.random.Generator) -> Verdict:
    if not inst.clauses:
        raise InputError("the instance has no clauses")
    if not len(psis):
        raise InputError("no proof copies")
    ci = int(rng.integers(len(inst.clauses)))
    copy = int(rng.integers(len(psis)))
    clause = inst.clauses[ci]
    fired = rng.random() < clause_projection_prob(psis[copy], clause)
    evidence = {"clause": clause, "copy": copy, "outcome": "c" if fired else "not-c"}
    return Verdict(not fired, TestKind.SATISFIABILITY, evidence)


# ---------------------------------------------------------------------------
# Uniformity test


def enumerate_matchings(n: int) -> list:
    """All perfect matchings of ``1..n`` in canonical (lexicographic) order."""
    if n < 2 or n % 2:
        raise InputError(f"n must be even and >= 2, got {n}")
    if n > MAX_MATCHING_MODES:
        raise CapacityError(f"matching enumeration is bounded by n <= {MAX_MATCHING_MODES}")

    def rec(items):
        if not items:
            yield ()
            return
        first, rest = items[0], items[1:]
        for idx, partner in enumerate(rest):
            for tail in rec(rest[:idx] + rest[idx + 1 :]):
                yield ((first, partner),) + tail

    return [Matching(p) for p in rec(tuple(range(1, n + 1)))]


def random_matching(n: int, rng: np.random.Generator) -> Matching:
    """Uniformly random perfect matching."""
    perm = rng.permutation(n) + 1
    return Matching(tuple(zip(perm[0::2].tolist(), perm[1::2].tolist())))


def uniformity_outcome_dist(psi, m: Matching) -> np.ndarray:
    """Probabilities of ``(pair, +)`` and ``(pair, -)``, pairs in matching order.

    Entry ``2p`` is ``|a_i + a_j|^2 / 2`` and entry ``2p + 1`` is
    ``|a_i - a_j|^2 / 2`` for the ``p``-th pair ``(i, j)``.
    """
    psi = np.asarray(psi)
    if psi.size != m.n:
        raise InputError(f"state has {psi.size} modes, matching covers {m.n}")
    idx = np.array(m.pairs) - 1
    ai, aj = psi[idx[:, 0]], psi[idx[:, 1]]
    dist = np.empty(m.n)
    dist[0::2] = np.abs(ai + aj) ** 2 / 2
    dist[1::2] = np.abs(ai - aj) ** 2 / 2
    return dist


def uniformity_test(copies, m: Matching, rng: np.random.Generator) -> Verdict:
    """Measure every copy in the matching basis; reject on a sign clash."""
    if len(copies) < 2:
        raise InputError(f"the uniformity test needs k >= 2 copies, got {len(copies)}")
    seen = {}
    outcomes = []
    clash = None
    for psi in copies:
        dist = uniformity_outcome_dist(psi, m)
        cdf = np.cumsum(dist)
        o = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), m.n - 1)
        pair, sign = m.pairs[o // 2], "+-"[o % 2]
        outcomes.append((pair, sign))
        if seen.setdefault(pair, sign) != sign and clash is None:
            clash = pair
    evidence = {"matching": m.pairs, "outcomes": outcomes}
    if clash is not None:
        evidence["clash"] = clash
    return Verdict(clash is None, TestKind.UNIFORMITY, evidence)


def _copies_arg(psi_or_copies, k):
    arr = np.asarray(psi_or_copies)
    if arr.ndim == 1:
        if k is None:
            raise InputError("k is required when a single state is given")
        return [arr] * k
    if k is not None and k != len(arr):
        raise InputError(f"k={k} but {len(arr)} copies were given")
    return list(arr)


def uniformity_reject_exact(psi_or_copies, m: Matching, k: int | None = None) -> float:
    """Exact reject probability of the uniformity test.

    Sums over all outcome strings of the ``k`` copies, grouped by the sign
    seen so far on each pair (unseen, ``+`` or ``-``); strings that already
    clash are absorbed into the reject mass.  Accepts a single state with
    ``k`` or an explicit list of copies.
    """
    copies = _copies_arg(psi_or_copies, k)
    if len(copies) < 1:
        raise InputError("no proof copies")
    n_pairs = len(m.pairs)
    if n_pairs > MAX_UNIFORMITY_PAIRS:
        raise CapacityError(f"{n_pairs} pairs exceeds the bound {MAX_UNIFORMITY_PAIRS}")
    # pattern code: base-3 digit per pair, 0 unseen / 1 plus / 2 minus
    n_pat = 3**n_pairs
    digits = (np.arange(n_pat)[:, None] // 3 ** np.arange(n_pairs)) % 3
    weight = np.zeros(n_pat)
    weight[0] = 1.0
    for psi in copies:
        q = uniformity_outcome_dist(psi, m).reshape(n_pairs, 2)
        nxt = np.zeros(n_pat)
        for p in range(n_pairs):
            step = 3**p
            d = digits[:, p]
            for s in (0, 1):
                sign = s + 1
                ok = (d == 0) | (d == sign)
                src = np.nonzero(ok)[0]
                dst = src + np.where(d[src] == 0, sign * step, 0)
                np.add.at(nxt, dst, weight[src] * q[p, s])
        weight = nxt
    return float(min(max(1.0 - weight.sum(), 0.0), 1.0))


def uniformity_reject_avg(psi_or_copies, k: int | None = None) -> float:
    """Uniformity reject probability averaged over all matchings."""
    copies = _copies_arg(psi_or_copies, k)
    ms = enumerate_matchings(np.asarray(copies[0]).size)
    return float(np.mean([uniformity_reject_exact(copies, m) for m in ms]))


# ---------------------------------------------------------------------------
# Swap-based tests


def swap_reject_prob(a, b) -> float:
    _check_dims(a, b)
    return float(max(1 - abs(overlap(a, b)) ** 2, 0.0) / 2)


def symmetry_test(copy_a, copy_b, rng: np.random.Generator) -> Verdict:
    p = swap_reject_prob(copy_a, copy_b)
    rejected = rng.random() < p
    return Verdict(not rejected, TestKind.SYMMETRY, {"outcome": "reject" if rejected else "accept"})


def product_accept_prob(copies_a, copies_b) -> float:
    """prod_t (1 + |<a_t|b_t>|^2) / 2."""
    if len(copies_a) != len(copies_b):
        raise InputError(f"length mismatch: {len(copies_a)} vs {len(copies_b)}")
    return float(np.prod([1 - swap_reject_prob(a, b) for a, b in zip(copies_a, copies_b)]))


def product_test(copies_a, copies_b, rng: np.random.Generator) -> Verdict:
    if len(copies_a) != len(copies_b):
        raise InputError(f"length mismatch: {len(copies_a)} vs {len(copies_b)}")
    failed = [t for t, (a, b) in enumerate(zip(copies_a, copies_b)) if rng.random() < swap_reject_prob(a, b)]
    evidence = {"failed_slots": failed} if failed else {}
    return Verdict(not failed, TestKind.PRODUCT, evidence)


# ---------------------------------------------------------------------------
# Composite protocol


def _check_proofs(proofs):
    if len(proofs) != 2:
        raise InputError("proofs must be a pair (merlin_a_copies, merlin_b_copies)")
    a, b = proofs
    if len(a) < 2 or len(a) != len(b):
        raise InputError("both Merlins must send the same number k >= 2 of copies")
    return a, b


def run_test(kind: TestKind, proofs, inst: SatInstance24, rng: np.random.Generator, matching: Matching | None = None) -> Verdict:
    """Run one round of a single test.

    Satisfiability, uniformity and symmetry act on one Merlin chosen
    uniformly; uniformity uses ``matching`` or a uniformly random one;
    symmetry compares copies 1 and 2; product pairs the Merlins slot-wise.
    """
    a, b = _check_proofs(proofs)
    if kind is TestKind.PRODUCT:
        return product_test(a, b, rng)
    merlin = int(rng.integers(2))
    copies = (a, b)[merlin]
    if kind is TestKind.SATISFIABILITY:
        v = satisfiability_test(copies, inst, rng)
    elif kind is TestKind.UNIFORMITY:
        m = matching if matching is not None else random_matching(len(copies[0]), rng)
        v = uniformity_test(copies, m, rng)
    else:
        v = symmetry_test(copies[0], copies[1], rng)
    return Verdict(v.accept, v.test, {"merlin": "AB"[merlin], **v.evidence})


def reject_exact(kind: TestKind, proofs, inst: SatInstance24, matching: Matching | None = None) -> float:
    """Exact reject probability of :func:`run_test`."""
    a, b = _check_proofs(proofs)
    if kind is TestKind.PRODUCT:
        return _clip01(1 - product_accept_prob(a, b))
    if kind is TestKind.SATISFIABILITY:
        per = [satisfiability_reject_exact(c, inst) for c in (a, b)]
    elif kind is TestKind.UNIFORMITY:
        if matching is None:
            per = [uniformity_reject_avg(c) for c in (a, b)]
        else:
            per = [uniformity_reject_exact(c, matching) for c in (a, b)]
    else:
        per = [swap_reject_prob(c[0], c[1]) for c in (a, b)]
    return _clip01(float(np.mean(per)))


def run_protocol(proofs, inst: SatInstance24, params: ProtocolParams, rng: np.random.Generator, matching: Matching | None = None) -> Verdict:
    """One protocol round: draw a test by ``params.test_weights`` and run it."""
    a, b = _check_proofs(proofs)
    if len(a) != params.k_copies:
        raise InputError(f"expected {params.k_copies} copies per Merlin, got {len(a)}")
    kind = TEST_ORDER[int(rng.choice(4, p=params.test_weights))]
    return run_test(kind, proofs, inst, rng, matching)


def protocol_reject_exact(proofs, inst: SatInstance24, params: ProtocolParams, matching: Matching | None = None) -> float:
    total = 0.0
    for kind, w in zip(TEST_ORDER, params.test_weights):
        if w:
            total += w * reject_exact(kind, proofs, inst, matching)
    return _clip01(total)


def _clip01(p: float) -> float:
    # Rounding can leave an exact probability a few ulps outside [0, 1].
    return min(max(p, 0.0), 1.0)


def statistical_fidelity(p_the: float, p_exp: float) -> float:
    """(sqrt(p q) + sqrt((1 - p)(1 - q)))^2 for two Bernoulli distributions."""
    for p in (p_the, p_exp):
        if not 0 <= p <= 1:
            raise InputError(f"probability out of range: {p}")
    f = (math.sqrt(p_the * p_exp) + math.sqrt((1 - p_the) * (1 - p_exp))) ** 2
    return min(f, 1.0)
