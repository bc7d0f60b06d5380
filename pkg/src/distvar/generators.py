"""Random Sigma data satisfying the distinguished-set conditions by construction."""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .errors import UnsupportedKind
from .pencilvariety import SigmaData

KINDS = ("diagonal", "swaplike", "conjugatedDiagonal")


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    if d == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(d, random_state=rng)


def diagonal_sigma(n: int, d: int, rng: np.random.Generator) -> SigmaData:
    """Unimodular diagonal ``U_i`` with product I; each coordinate owned by exactly one ``P_i``."""
    phases = rng.random((n, d))
    phases[-1] = -phases[:-1].sum(axis=0)
    owner = rng.integers(0, n, size=d)
    us = tuple(np.diag(np.exp(2j * np.pi * phases[i])) for i in range(n))
    ps = tuple(np.diag((owner == i).astype(float)).astype(np.complex128) for i in range(n))
    return SigmaData(ps, us)


def swaplike_sigma(d: int, rng: np.random.Generator, u=None, p=None) -> SigmaData:
    """``U_1 = U, P_1 = P, U_2 = U^*, P_2 = U P^perp U^*``."""
    if u is None:
        u = haar_unitary(d, rng)
    if p is None:
        rank = int(rng.integers(1, d)) if d > 1 else int(rng.integers(0, 2))
        w = haar_unitary(d, rng)
        p = w[:, :rank] @ w[:, :rank].conj().T
    u = np.asarray(u, dtype=np.complex128)
    p = np.asarray(p, dtype=np.complex128)
    eye = np.eye(d)
    return SigmaData((p, u @ (eye - p) @ u.conj().T), (u, u.conj().T))


def generate_sigma(kind: str, n: int, d: int, seed: int = 0, u=None, p=None) -> SigmaData:
    """Random valid Sigma data of the requested kind.

    ``u`` and ``p`` pin the swaplike unitary and projection (used by tests to
    reproduce the swap fixture).
    """
    rng = np.random.default_rng(seed)
    if kind == "diagonal":
        return diagonal_sigma(n, d, rng)
    if kind == "swaplike":
        if n != 2:
            raise UnsupportedKind("swaplike Sigma data exists only for n = 2")
        return swaplike_sigma(d, rng, u, p)
    if kind == "conjugatedDiagonal":
        base = diagonal_sigma(n, d, rng)
        return base.conjugate(haar_unitary(d, rng))
    raise UnsupportedKind(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
