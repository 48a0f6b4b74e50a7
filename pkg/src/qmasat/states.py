"""Single-photon proof states.

A proof copy is an ``n``-mode single-photon state, stored as a read-only
complex numpy vector of unit norm.  Mode ``i`` of the text corresponds to
array index ``i - 1``.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .errors import InputError, ParseError
from .sat import assignment_from_string

NORM_TOL = 1e-12


def as_state(amplitudes, normalize: bool = False) -> np.ndarray:
    """Validate (or normalise) a vector of amplitudes into a state.

    The result is a fresh read-only ``complex128`` array.
    """
    psi = np.array(amplitudes, dtype=np.complex128).reshape(-1)
    if psi.size < 2:
        raise InputError(f"a state needs at least 2 modes, got {psi.size}")
    norm = np.linalg.norm(psi)
    if normalize:
        if norm == 0:
            raise InputError("cannot normalise the zero vector")
        psi = psi / norm
    elif abs(norm**2 - 1) > NORM_TOL:
        raise InputError(f"state is not unit norm (|psi|^2 = {norm**2!r})")
    psi.flags.writeable = False
    return psi


def proper_state(a: Sequence[int]) -> np.ndarray:
    """Encode an assignment as ``sum_i (-1)^{x_i} |i> / sqrt(n)``."""
    x = np.asarray(a, dtype=np.int64)
    if x.size < 2:
        raise InputError(f"proper states need n >= 2, got {x.size}")
    return as_state((1 - 2 * x) / np.sqrt(x.size))


def improper_theta(theta: float, n: int = 6) -> np.ndarray:
    """Alternating ``(cos t, sin t, cos t, ...)``, renormalised."""
    if n < 2 or n % 2:
        raise InputError(f"n must be even and >= 2, got {n}")
    amps = np.tile([np.cos(theta), np.sin(theta)], n // 2)
    return as_state(amps, normalize=True)


def cheat_common_var(v: int, n: int = 6) -> np.ndarray:
    """Amplitude ``-3`` on mode ``v`` and ``1`` elsewhere, over ``sqrt(n + 8)``.

    Any clause containing ``v`` then has a vanishing projection onto
    ``(|i> + |j> + |k> + |l>)/2``.
    """
    if not 1 <= v <= n:
        raise InputError(f"mode {v} outside 1..{n}")
    amps = np.ones(n)
    amps[v - 1] = -3.0
    return as_state(amps / np.sqrt(n + 8))


def basis_state(i: int, n: int) -> np.ndarray:
    if not 1 <= i <= n:
        raise InputError(f"mode {i} outside 1..{n}")
    e = np.zeros(n)
    e[i - 1] = 1.0
    return as_state(e)


def overlap(a, b) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def random_state(rng: np.random.Generator, n: int = 6, real: bool = False) -> np.ndarray:
    """Haar-random unit vector."""
    z = rng.normal(size=n)
    if not real:
        z = z + 1j * rng.normal(size=n)
    return as_state(z, normalize=True)


def parse_state(text: str, n: int = 6) -> np.ndarray:
    """Parse a state literal.

    Accepted forms: ``proper:110000``, ``improper:<theta>``, ``cheat:<mode>``,
    or a JSON array of ``[re, im]`` pairs.  ``n`` sizes the ``improper`` and
    ``cheat`` shorthands.
    """
    text = text.strip()
    if text.startswith("["):
        try:
            pairs = json.loads(text)
            return as_state([complex(float(re_), float(im)) for re_, im in pairs])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad amplitude list {text!r}: {exc}") from None
    kind, sep, arg = text.partition(":")
    if not sep:
        raise ParseError(f"unrecognised state literal {text!r}")
    try:
        if kind == "proper":
            return proper_state(assignment_from_string(arg))
        if kind == "improper":
            return improper_theta(float(arg), n)
        if kind == "cheat":
            return cheat_common_var(int(arg), n)
    except ValueError as exc:
        raise ParseError(f"bad state literal {text!r}: {exc}") from None
    raise ParseError(f"unknown state kind {kind!r}")


def format_state(psi) -> str:
    """JSON ``[[re, im], ...]`` form accepted by :func:`parse_state`."""
    return json.dumps([[float(z.real), float(z.imag)] for z in np.asarray(psi)])
