"""Joint eigenvalues (Taylor joint spectrum) of commuting matrix tuples."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, GenericCombinationFailure, NotCommuting
from .numkernel import DEFAULT_TOL, Tolerances, as_matrix, eigenvalues, schur

MAX_RETRIES = 5


@dataclass(frozen=True)
class JointEigenvalue:
    values: tuple[complex, ...]
    witness_residual: float
    multiplicity_hint: int = 1

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class CommutingTuple:
    """A tuple of equal-size square matrices and its largest commutator norm."""

    matrices: tuple[np.ndarray, ...]
    commutator_defect: float = field(compare=False)

    @classmethod
    def from_matrices(cls, matrices: Sequence) -> "CommutingTuple":
        mats = tuple(as_matrix(m, f"A{k + 1}") for k, m in enumerate(matrices))
        if not mats:
            raise DimensionMismatch("tuple must contain at least one matrix")
        d = mats[0].shape[0]
        for k, m in enumerate(mats):
            if m.shape != (d, d):
                raise DimensionMismatch(f"A{k + 1} has shape {m.shape}, expected ({d}, {d})")
        return cls(mats, commutator_defect(mats))

    @property
    def n(self) -> int:
        return len(self.matrices)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def norm(self) -> float:
        return max((float(np.linalg.norm(m, 2)) if m.size else 0.0) for m in self.matrices)

    def is_commuting(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.commutator_defect <= tol.structural * max(1.0, self.norm()) ** 2


def commutator_defect(mats: Sequence[np.ndarray]) -> float:
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = mats[i] @ mats[j] - mats[j] @ mats[i]
            if c.size:
                worst = max(worst, float(np.linalg.norm(c, 2)))
    return worst


def _as_tuple(t) -> CommutingTuple:
    return t if isinstance(t, CommutingTuple) else CommutingTuple.from_matrices(t)


def stacked_min_singular(t: CommutingTuple, values: Sequence[complex]) -> float:
    """Smallest singular value of the stacked matrix [A_1 - l_1 I; ...; A_n - l_n I]."""
    if len(values) != t.n:
        raise DimensionMismatch(f"expected {t.n} values, got {len(values)}")
    d = t.dim
    if d == 0:
        return 0.0
    eye = np.eye(d)
    stacked = np.vstack([a - lam * eye for a, lam in zip(t.matrices, values)])
    return float(np.linalg.svd(stacked, compute_uv=False)[-1])


def verify_joint_eigenvalue(t, lam, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff the matrices share an (approximate) eigenvector for ``lam``.

    The test is ``sigma_min([A_k - lam_k I]_k) <= tol.spectral * max(1, |t|)``.
    """
    t = _as_tuple(t)
    values = lam.values if isinstance(lam, JointEigenvalue) else tuple(lam)
    return stacked_min_singular(t, values) <= tol.spectral * max(1.0, t.norm())


def _clusters(diag: np.ndarray, radius: float) -> list[list[int]]:
    """Group positions whose diagonal entries are within ``radius`` (single linkage)."""
    groups: list[list[int]] = []
    for idx in range(len(diag)):
        hits = [g for g in groups if np.min(np.abs(diag[g] - diag[idx])) < radius]
        merged = [idx]
        for g in hits:
            merged.extend(g)
            groups.remove(g)
        groups.append(sorted(merged))
    return sorted(groups, key=lambda g: g[0])


def _read_tuples(t: CommutingTuple, q: np.ndarray, bdiag: np.ndarray,
                 tol: Tolerances) -> list[tuple[complex, ...]] | None:
    """Read joint eigenvalues off the triangularized tuple, or None to retry."""
    d = t.dim
    scale = max(1.0, t.norm())
    groups = _clusters(bdiag, tol.spectral * scale)
    owner = np.empty(d, dtype=int)
    for gi, g in enumerate(groups):
        owner[g] = gi
    off_block = owner[:, None] != owner[None, :]
    lower = np.tril(np.ones((d, d), dtype=bool), -1) & off_block
    per_position = np.empty((d, t.n), dtype=np.complex128)
    for k, a in enumerate(t.matrices):
        m = q.conj().T @ a @ q
        if lower.any() and np.abs(m[lower]).max() > tol.spectral * scale:
            return None
        for g in groups:
            block = m[np.ix_(g, g)]
            if len(g) == 1:
                per_position[g[0], k] = block[0, 0]
                continue
            vals = eigenvalues(block, tol)
            if np.max(np.abs(vals - vals.mean())) > tol.spectral * scale:
                # the cluster mixes distinct joint eigenvalues: pairing is ambiguous
                return None
            if np.abs(np.tril(block, -1)).max() <= tol.spectral * scale:
                per_position[g, k] = np.diag(block)
            else:
                per_position[g, k] = vals.mean()
    return [tuple(complex(v) for v in row) for row in per_position]


def joint_eigenvalues(t, tol: Tolerances = DEFAULT_TOL,
                      seed: int | np.random.Generator | None = 0) -> list[JointEigenvalue]:
    """All ``d`` joint eigenvalues (with multiplicity) of a commuting tuple.

    A random unimodular combination ``B = sum c_k A_k`` is Schur-triangularized
    and each ``A_k`` is read off in the same basis.  Positions where ``B`` has
    clustered eigenvalues are read blockwise.  A fresh combination is drawn
    (up to five retries) if some ``Q^H A_k Q`` is not block triangular.

    Raises
    ------
    NotCommuting
    GenericCombinationFailure
    """
    t = _as_tuple(t)
    if not t.is_commuting(tol):
        raise NotCommuting(f"commutator defect {t.commutator_defect:.3e} exceeds tolerance")
    if t.dim == 0:
        return []
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    for _ in range(1 + MAX_RETRIES):
        if t.n == 1:
            coeffs = np.ones(1, dtype=np.complex128)
        else:
            coeffs = np.exp(2j * np.pi * rng.random(t.n))
        b = sum(c * a for c, a in zip(coeffs, t.matrices))
        q, tb = schur(b, tol)
        tuples = _read_tuples(t, q, np.diag(tb), tol)
        if tuples is not None:
            break
    else:
        raise GenericCombinationFailure(
            f"no generic combination triangularized the tuple in {1 + MAX_RETRIES} tries")
    arr = np.array(tuples, dtype=np.complex128)
    out = []
    for row in tuples:
        mult = int(np.sum(np.max(np.abs(arr - np.array(row)), axis=1) <= tol.spectral))
        out.append(JointEigenvalue(row, stacked_min_singular(t, row), max(mult, 1)))
    return out
