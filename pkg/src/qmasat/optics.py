"""Linear-optics realisation of the tests.

Modes ``1..n`` map to ``h1, v1, h2, v2, ...``: odd modes are horizontal and
even modes vertical polarisation, mode pair ``(2p - 1, 2p)`` sharing path
``p``.  Two-mode gates are half-wave plates

    u(theta) = [[cos theta,  sin theta],
                [sin theta, -cos theta]]

Circuits are sequences of stages, each a set of gates on disjoint mode
pairs or a mode permutation.  Single-photon statistics follow from the
circuit unitary; the swap test is a mode-wise balanced coupler between two
proofs, read by ``2 x n/2`` polarisation-blind detectors.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import CompilationError, ConfigError, InputError
from .sat import _check_clause24
from .states import as_state, overlap
from .verifier import Matching

#: Accepted (one-side) outcomes are scaled by this in reports to account for
#: unregistered same-detector events.
ACCEPT_CORRECTION = 1.5


# ---------------------------------------------------------------------------
# Modes


def mode_label(i: int, n: int = 6) -> tuple:
    """Mode ``i`` -> ``(path, "h" | "v")``."""
    if n % 2 or not 1 <= i <= n:
        raise InputError(f"mode {i} invalid for n={n}")
    return ((i + 1) // 2, "h" if i % 2 else "v")


def mode_index(path: int, pol: str, n: int = 6) -> int:
    if pol not in ("h", "v") or not 1 <= path <= n // 2:
        raise InputError(f"no mode {pol}{path} for n={n}")
    return 2 * path - 1 if pol == "h" else 2 * path


def waveplate_u(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [s, -c]])


# ---------------------------------------------------------------------------
# Circuits


@dataclass(frozen=True)
class GateStage:
    gates: tuple  # ((i, j, theta), ...)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple((int(i), int(j), float(t)) for i, j, t in self.gates))


@dataclass(frozen=True)
class PermStage:
    """Input mode ``i`` is routed to output mode ``perm[i - 1]``."""

    perm: tuple

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))


@dataclass(frozen=True)
class CircuitConfig:
    n: int
    stages: tuple = ()
    measure: str = "modes"
    labels: tuple | None = None  # optional outcome label per detector

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        validate_circuit(self)

    def to_json(self) -> str:
        stages = []
        for st in self.stages:
            if isinstance(st, GateStage):
                stages.append({"gates": [[i, j, t] for i, j, t in st.gates]})
            else:
                stages.append({"perm": list(st.perm)})
        data = {"n": self.n, "stages": stages, "measure": self.measure}
        if self.labels is not None:
            data["labels"] = [str(lab) for lab in self.labels]
        return json.dumps(data)

    @classmethod
    def from_json(cls, text: str) -> "CircuitConfig":
        try:
            data = json.loads(text)
            stages = []
            for st in data["stages"]:
                if "gates" in st:
                    stages.append(GateStage(tuple(tuple(g) for g in st["gates"])))
                elif "perm" in st:
                    stages.append(PermStage(tuple(st["perm"])))
                else:
                    raise ConfigError(f"stage without gates or perm: {st}")
            n = data.get("n")
            if n is None:
                n = _infer_n(stages)
            return cls(int(n), tuple(stages), data.get("measure", "modes"), data.get("labels"))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad circuit JSON: {exc}") from None


def _infer_n(stages):
    n = 0
    for st in stages:
        if isinstance(st, PermStage):
            n = max(n, len(st.perm))
        else:
            n = max([n] + [max(i, j) for i, j, _ in st.gates])
    if n == 0:
        raise ConfigError("cannot infer the mode count of an empty circuit")
    return n + n % 2


def validate_circuit(c: CircuitConfig) -> None:
    if c.n < 2:
        raise ConfigError(f"a circuit needs at least 2 modes, got {c.n}")
    if c.measure != "modes":
        raise ConfigError(f"unsupported measurement {c.measure!r}")
    if c.labels is not None and len(c.labels) != c.n:
        raise ConfigError(f"{len(c.labels)} labels for {c.n} detectors")
    for k, st in enumerate(c.stages):
        if isinstance(st, GateStage):
            used = set()
            for i, j, _ in st.gates:
                if i == j or not (1 <= i <= c.n and 1 <= j <= c.n):
                    raise ConfigError(f"stage {k}: bad gate modes ({i}, {j})")
                if used & {i, j}:
                    raise ConfigError(f"stage {k}: gates overlap on modes {sorted(used & {i, j})}")
                used |= {i, j}
        elif isinstance(st, PermStage):
            if sorted(st.perm) != list(range(1, c.n + 1)):
                raise ConfigError(f"stage {k}: {st.perm} is not a permutation of 1..{c.n}")
        else:
            raise ConfigError(f"stage {k}: unknown stage type {type(st).__name__}")


def stage_matrix(st, n: int) -> np.ndarray:
    if isinstance(st, PermStage):
        m = np.zeros((n, n))
        m[np.array(st.perm) - 1, np.arange(n)] = 1.0
        return m
    m = np.eye(n)
    for i, j, theta in st.gates:
        idx = np.ix_([i - 1, j - 1], [i - 1, j - 1])
        m[idx] = waveplate_u(theta)
    return m


def circuit_unitary(c: CircuitConfig) -> np.ndarray:
    """Product of stage matrices, later stages on the left."""
    u = np.eye(c.n, dtype=np.complex128)
    for st in c.stages:
        u = stage_matrix(st, c.n) @ u
    return u


def single_photon_dist(psi, c: CircuitConfig) -> np.ndarray:
    """Detector click probabilities ``|(U psi)_d|^2``."""
    psi = np.asarray(psi)
    if psi.size != c.n:
        raise InputError(f"state has {psi.size} modes, circuit has {c.n}")
    return np.abs(circuit_unitary(c) @ psi) ** 2


def compose(*circuits: CircuitConfig) -> CircuitConfig:
    """Run ``circuits`` one after another; labels come from the last one."""
    n = circuits[0].n
    if any(c.n != n for c in circuits):
        raise ConfigError("cannot compose circuits of different sizes")
    stages = tuple(st for c in circuits for st in c.stages)
    return CircuitConfig(n, stages, labels=circuits[-1].labels)


def _route(front: Sequence[int], n: int) -> PermStage:
    # send front[k] to mode k + 1, the remaining modes after them in order
    order = list(front) + [i for i in range(1, n + 1) if i not in front]
    perm = [0] * n
    for dest, src in enumerate(order, start=1):
        perm[src - 1] = dest
    return PermStage(tuple(perm))


H = math.pi / 4


def compile_clause_circuit(clause: Sequence[int], n: int = 6) -> CircuitConfig:
    """Route ``|c> = (|i> + |j> + |k> + |l>)/2`` onto detector 1.

    Stages: bring the clause modes to paths 1 and 2, Hadamard within both
    paths, swap ``v1`` with ``h2`` and Hadamard path 1 again.  Detector 1 is
    labelled ``"c"``.
    """
    clause = tuple(clause)
    _check_clause24(clause, n)
    if n < 4 or n % 2:
        raise CompilationError(f"no clause circuit for n={n}")
    swap_23 = [1, 3, 2] + list(range(4, n + 1))
    stages = (
        _route(clause, n),
        GateStage(((1, 2, H), (3, 4, H))),
        PermStage(tuple(swap_23)),
        GateStage(((1, 2, H),)),
    )
    labels = ("c",) + ("not-c",) * (n - 1)
    circuit = CircuitConfig(n, stages, labels=labels)
    if not np.allclose(circuit_unitary(circuit)[0], np.isin(np.arange(1, n + 1), clause) / 2):
        raise CompilationError(f"clause circuit for {clause} does not project onto |c>")
    return circuit


def compile_matching_circuit(m: Matching, n: int = 6) -> CircuitConfig:
    """Pair ``(i, j)`` number ``p`` lands on path ``p`` and meets a Hadamard.

    Detector ``2p - 1`` then reads ``(|i> + |j>)/sqrt 2`` and detector ``2p``
    reads ``(|i> - |j>)/sqrt 2``.
    """
    if m.n != n:
        raise CompilationError(f"matching covers {m.n} modes, circuit has {n}")
    front = [v for pair in m.pairs for v in pair]
    stages = (_route(front, n), GateStage(tuple((2 * p + 1, 2 * p + 2, H) for p in range(n // 2))))
    labels = tuple(f"{i}{j}{s}" for (i, j) in m.pairs for s in "+-")
    return CircuitConfig(n, stages, labels=labels)


def compile_encoding_circuit(amplitudes) -> CircuitConfig:
    """Prepare a real state from a photon in mode 1 with a waveplate cascade.

    Gate ``t`` on modes ``(t, t + 1)`` keeps the target amplitude on mode
    ``t`` and passes the remaining norm on to mode ``t + 1``.
    """
    psi = as_state(amplitudes)
    if np.abs(psi.imag).max() > 1e-12:
        raise CompilationError("the waveplate cascade prepares real amplitudes only")
    target = psi.real
    n = target.size
    tail = np.sqrt(np.cumsum((target**2)[::-1])[::-1])  # tail[t] = norm of target[t:]
    stages = []
    for t in range(n - 1):
        if t == n - 2:
            theta = math.atan2(target[t + 1], target[t])
        else:
            theta = math.atan2(tail[t + 1], target[t])
        stages.append(GateStage(((t + 1, t + 2, theta),)))
    return CircuitConfig(n, tuple(stages))


# ---------------------------------------------------------------------------
# Two-photon swap test


@dataclass(frozen=True)
class PhotonModel:
    """Photon indistinguishability ``gamma`` and an optional delay profile.

    ``delay_profile`` is a callable or a mapping from delay to gamma.
    """

    gamma: float = 1.0
    delay_profile: Callable | Mapping | None = field(default=None, compare=False)

    def __post_init__(self):
        _check_gamma(self.gamma)

    def gamma_at(self, delay: float) -> float:
        if self.delay_profile is None:
            raise InputError("the photon model has no delay profile")
        if callable(self.delay_profile):
            g = float(self.delay_profile(delay))
        else:
            if delay not in self.delay_profile:
                raise InputError(f"delay {delay} is not covered by the profile")
            g = float(self.delay_profile[delay])
        return _check_gamma(g)


def _check_gamma(g):
    if not 0 <= g <= 1:
        raise InputError(f"gamma must lie in [0, 1], got {g}")
    return g


def gaussian_sinc_profile(sigma: float = 1.0, width: float = 1.0, visibility: float = 1.0) -> Callable:
    """``gamma(t) = visibility * exp(-t^2 / 2 sigma^2) * |sinc(t / width)|``."""
    _check_gamma(visibility)

    def profile(delay):
        return visibility * math.exp(-(delay**2) / (2 * sigma**2)) * abs(float(np.sinc(delay / width)))

    return profile


def detector_of(side: int, mode: int, n: int = 6) -> int:
    """Side 0 holds detectors ``1..n/2`` (one per path), side 1 the rest."""
    return side * (n // 2) + (mode + 1) // 2


def channels(n: int = 6) -> list:
    """All detector pairs ``(d1, d2)`` with their class, in lexicographic order."""
    half = n // 2
    out = []
    for d1 in range(1, n + 1):
        for d2 in range(d1 + 1, n + 1):
            same_side = (d1 <= half) == (d2 <= half)
            out.append((d1, d2, "accept" if same_side else "reject"))
    return out


@dataclass(frozen=True)
class SwapOutcome:
    n: int
    gamma: float
    coincidences: dict  # (d1, d2) -> probability, d1 < d2
    same_detector: float

    @property
    def reject(self) -> float:
        """Cross-side coincidences."""
        half = self.n // 2
        return sum(p for (d1, d2), p in self.coincidences.items() if (d1 <= half) != (d2 <= half))

    @property
    def accept_registered(self) -> float:
        """One-side coincidences on two distinct detectors."""
        return sum(self.coincidences.values()) - self.reject

    @property
    def accept_raw(self) -> float:
        """Every accept event, registered or not."""
        return self.accept_registered + self.same_detector

    @property
    def accept_corrected(self) -> float:
        return ACCEPT_CORRECTION * self.accept_registered

    def rows(self) -> list:
        rows = []
        for d1, d2, cls in channels(self.n):
            rows.append((f"{d1}-{d2}", d1, d2, cls, self.coincidences[(d1, d2)]))
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["channel", "d1", "d2", "class", "probability"])
        for row in self.rows():
            w.writerow(row[:4] + (repr(float(row[4])),))
        return buf.getvalue()


def two_photon_channels(psi_a, psi_b, model: PhotonModel | None = None) -> SwapOutcome:
    """Two-photon statistics of the optical swap test.

    The proofs enter opposite ports of a balanced coupler acting on each of
    the ``n`` mode pairs.  With output amplitudes ``A = U a`` and ``B = U b``,
    a detection in output modes ``o1 != o2`` has probability

        |A1 B2|^2 + |A2 B1|^2 + 2 gamma Re(conj(A1 B2) A2 B1)

    and a double occupation of mode ``o`` has ``(1 + gamma) |A_o B_o|^2``.
    Output modes are then binned into polarisation-blind detectors.
    """
    model = model or PhotonModel()
    a = np.asarray(psi_a, dtype=np.complex128)
    b = np.asarray(psi_b, dtype=np.complex128)
    if a.shape != b.shape or a.ndim != 1:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    n = a.size
    if n % 2:
        raise InputError(f"the swap test needs an even mode count, got {n}")
    gamma = model.gamma
    amp_a = np.concatenate([a, a]) / math.sqrt(2)
    amp_b = np.concatenate([b, -b]) / math.sqrt(2)
    direct = np.outer(amp_a, amp_b)  # photon a in o1, photon b in o2
    pa = np.abs(direct) ** 2
    prob = pa + pa.T + 2 * gamma * np.real(np.conj(direct) * direct.T)
    diag = (1 + gamma) * np.diag(pa)

    det = np.array([detector_of(s, m, n) for s in (0, 1) for m in range(1, n + 1)])
    coinc = {(d1, d2): 0.0 for d1, d2, _ in channels(n)}
    same = float(diag.sum())
    iu, ju = np.triu_indices(2 * n, k=1)
    for o1, o2, p in zip(iu, ju, prob[iu, ju]):
        d1, d2 = det[o1], det[o2]
        if d1 == d2:
            same += p
        else:
            coinc[(min(d1, d2), max(d1, d2))] += p
    return SwapOutcome(n, gamma, {k: float(v) for k, v in coinc.items()}, float(same))


def hom_scan(psi_a, psi_b, delays: Sequence[float], model: PhotonModel) -> list:
    """Swap-test statistics at each delay, gamma taken from the delay profile.

    Returns dicts with ``delay``, ``gamma``, ``reject``, ``accept_registered``,
    ``accept_corrected`` and ``same_detector``.
    """
    if model.delay_profile is None:
        raise InputError("hom_scan needs a photon model with a delay profile")
    out = []
    for t in delays:
        g = model.gamma_at(t)
        res = two_photon_channels(psi_a, psi_b, PhotonModel(g))
        out.append(
            {
                "delay": float(t),
                "gamma": g,
                "reject": res.reject,
                "accept_registered": res.accept_registered,
                "accept_corrected": res.accept_corrected,
                "same_detector": res.same_detector,
            }
        )
    return out


def swap_reject_formula(psi_a, psi_b, gamma: float = 1.0) -> float:
    """Closed form of the cross-side probability, ``(1 - gamma |<a|b>|^2) / 2``."""
    return (1 - gamma * abs(overlap(psi_a, psi_b)) ** 2) / 2
