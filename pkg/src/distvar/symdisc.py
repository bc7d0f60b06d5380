"""The symmetrized polydisc G_n and the F-pencil description of its distinguished varieties.

``pi_n(z) = (s_1(z), .., s_{n-1}(z), p(z))`` sends the polydisc onto G_n.  A
point ``(s, p)`` lies in G_n iff every root of
``t^n - s_1 t^{n-1} + s_2 t^{n-2} - .. + (-1)^n p`` lies in the open unit disc.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonSquare, SingularPencilEverywhere
from .jointspec import CommutingTuple, joint_eigenvalues
from .numkernel import DEFAULT_TOL, Tolerances, as_matrix, eigenvalues
from .pencilvariety import VarietyPoint, classify

INSIDE = "inside"
BOUNDARY_BAND = "boundaryBand"
OUTSIDE = "outside"

# Companion eigenvalues of a k-fold root scatter by ~eps**(1/k).  Roots within
# a loose radius are proposed as one cluster; the cluster is replaced by its
# mean only if the coefficients are still reproduced to ~machine precision,
# which a genuine multiple root does and two distinct roots more than ~1e-6
# apart do not.
ROOT_MERGE_RTOL = 100 * np.finfo(float).eps

VALIDATION_RADII = (0.25, 0.5, 0.75, 0.95)


@dataclass(frozen=True)
class SymPoint:
    s: tuple[complex, ...]
    p: complex

    @property
    def n(self) -> int:
        return len(self.s) + 1

    def as_tuple(self) -> tuple[complex, ...]:
        return (*self.s, self.p)


def symmetrize(z: Sequence[complex]) -> SymPoint:
    """Elementary symmetric functions of ``z`` via expansion of ``prod (t - z_k)``."""
    coeffs = np.array([1.0 + 0j])
    for zk in z:
        coeffs = np.append(coeffs, 0) - np.append(0, coeffs) * complex(zk)
    n = len(coeffs) - 1
    signs = np.array([(-1) ** i for i in range(n + 1)])
    e = coeffs * signs
    return SymPoint(tuple(complex(v) for v in e[1:n]), complex(e[n]) if n else 0j)


def _monic_coefficients(q: SymPoint) -> np.ndarray:
    """Coefficients (highest degree first) of ``t^n - s_1 t^{n-1} + .. + (-1)^n p``."""
    e = np.array([1.0 + 0j, *q.s, q.p])
    return e * np.array([(-1) ** i for i in range(len(e))])


def _coefficient_error(roots: np.ndarray, target: np.ndarray) -> float:
    return float(np.max(np.abs(np.poly(roots) - target)))


def _cluster_mean(roots: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    n = len(roots)
    radius = 10 * (n * np.finfo(float).eps) ** (1.0 / n)
    tol = ROOT_MERGE_RTOL * n * max(1.0, float(np.max(np.abs(coeffs))))
    out = roots.copy()
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        group = [i]
        frontier = [i]
        seen[i] = True
        while frontier:
            j = frontier.pop()
            near = np.where(~seen & (np.abs(roots - roots[j]) <= radius * max(1.0, abs(roots[j]))))[0]
            seen[near] = True
            group.extend(near.tolist())
            frontier.extend(near.tolist())
        if len(group) > 1:
            trial = out.copy()
            trial[group] = roots[group].mean()
            if _coefficient_error(trial, coeffs) <= max(tol, _coefficient_error(out, coeffs)):
                out = trial
    return out


def _canonical_order(values: np.ndarray) -> list[complex]:
    key = sorted(range(len(values)),
                 key=lambda k: (-round(abs(values[k]), 12), round(float(np.angle(values[k])), 12)))
    return [complex(values[k]) for k in key]


def preimage(q: SymPoint, tol: Tolerances = DEFAULT_TOL) -> list[complex]:
    """The ``n`` roots (with multiplicity) in nonincreasing-modulus order, ties by angle."""
    coeffs = _monic_coefficients(q)
    n = len(coeffs) - 1
    if n == 1:
        return [complex(q.p)]
    companion = np.zeros((n, n), dtype=np.complex128)
    companion[0, :] = -coeffs[1:]
    companion[np.arange(1, n), np.arange(n - 1)] = 1.0
    roots = _cluster_mean(eigenvalues(companion, tol), coeffs)
    return _canonical_order(roots)


@dataclass(frozen=True)
class Membership:
    status: str
    max_root_modulus: float

    @property
    def inside(self) -> bool:
        return self.status == INSIDE

    def to_dict(self) -> dict:
        return {"membership": self.status, "max_root_modulus": self.max_root_modulus}


def in_gn(q: SymPoint, tol: Tolerances = DEFAULT_TOL) -> Membership:
    roots = preimage(q, tol)
    top = max(abs(r) for r in roots)
    if top < 1 - tol.spectral:
        status = INSIDE
    elif top <= 1 + tol.spectral:
        status = BOUNDARY_BAND
    else:
        status = OUTSIDE
    return Membership(status, float(top))


@dataclass(frozen=True)
class FPencilData:
    """Matrices ``F_1 .. F_{n-1}`` of a common size; ``n`` is one more than their count."""

    F: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(as_matrix(f, f"F{i + 1}") for i, f in enumerate(self.F))
        if not mats:
            raise DimensionMismatch("need at least one F matrix")
        d = mats[0].shape[0]
        for i, m in enumerate(mats):
            if m.shape != (d, d):
                raise NonSquare(f"F{i + 1} has shape {m.shape}, expected ({d}, {d})")
        object.__setattr__(self, "F", mats)

    @property
    def n(self) -> int:
        return len(self.F) + 1

    @property
    def dim(self) -> int:
        return self.F[0].shape[0]

    def pencil_tuple(self, p: complex) -> list[np.ndarray]:
        """``(F_1^* + p F_{n-1}, F_2^* + p F_{n-2}, .., F_{n-1}^* + p F_1)``."""
        m = len(self.F)
        return [self.F[i].conj().T + p * self.F[m - 1 - i] for i in range(m)]


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


@dataclass
class FPencilReport:
    commute_defect: float
    cross_defect: float
    violations: list[dict] = field(default_factory=list)
    samples: int = 0
    fiber_finite: bool = True
    tolerance: float = DEFAULT_TOL.structural

    @property
    def condition_i(self) -> bool:
        return max(self.commute_defect, self.cross_defect) <= self.tolerance

    @property
    def condition_ii(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "pass" if self.condition_i and self.condition_ii else "fail"

    def to_dict(self) -> dict:
        return {
            "commute_defect": self.commute_defect,
            "cross_defect": self.cross_defect,
            "condition_i": self.condition_i,
            "condition_ii": self.condition_ii,
            "samples": self.samples,
            "violations": self.violations,
            "fiber_finite_heuristic": self.fiber_finite,
            "regular_sequence": "not decided",
            "verdict": self.verdict,
        }


def f_condition_defects(f: FPencilData) -> tuple[float, float]:
    """``max |[F_i, F_j]|`` and ``max |[F_i^*, F_{n-j}] - [F_j^*, F_{n-i}]|`` over i < j."""
    F = f.F
    n = f.n
    comm = cross = 0.0
    for i in range(1, n):
        for j in range(i + 1, n):
            a, b = F[i - 1], F[j - 1]
            comm = max(comm, _norm(a @ b - b @ a))
            x = a.conj().T @ F[n - j - 1] - F[n - j - 1] @ a.conj().T
            y = b.conj().T @ F[n - i - 1] - F[n - i - 1] @ b.conj().T
            cross = max(cross, _norm(x - y))
    return comm, cross


def validate_fpencil(f: FPencilData, z_samples: int = 16, tol: Tolerances = DEFAULT_TOL,
                     seed: int = 0) -> FPencilReport:
    """Check the commutation relations exactly and the G_n containment on sampled circles.

    The regular-sequence and irreducible-component conditions are not decided;
    the report carries only a sampled fiber-finiteness flag for them.
    """
    comm, cross = f_condition_defects(f)
    report = FPencilReport(comm, cross, tolerance=tol.structural)
    if not report.condition_i:
        return report
    eye = np.eye(f.dim)
    k = 0
    for r in VALIDATION_RADII:
        for a in range(z_samples):
            z = complex(r * np.exp(2j * np.pi * a / z_samples))
            mats = f.pencil_tuple(z) + [z * eye]
            eigs = joint_eigenvalues(CommutingTuple.from_matrices(mats), tol, seed + k)
            k += 1
            report.samples += 1
            distinct = {tuple(np.round(je.values, 8)) for je in eigs}
            report.fiber_finite &= len(distinct) <= f.dim
            for je in eigs:
                q = SymPoint(tuple(je.values[:-1]), je.values[-1])
                mem = in_gn(q, tol)
                if mem.status == OUTSIDE:
                    report.violations.append({
                        "z": z,
                        "joint_eigenvalue": list(je.values),
                        "max_root_modulus": mem.max_root_modulus,
                    })
    return report


def trace_lambda(f: FPencilData, p_grid: Sequence[complex], tol: Tolerances = DEFAULT_TOL,
                 seed: int = 0) -> list[tuple[SymPoint, float]]:
    """Points ``(s, p)`` with ``s`` a joint eigenvalue of the F-pencil tuple at ``p``."""
    out = []
    for k, p in enumerate(p_grid):
        p = complex(p)
        for je in joint_eigenvalues(CommutingTuple.from_matrices(f.pencil_tuple(p)), tol, seed + k):
            out.append((SymPoint(je.values, p), je.witness_residual))
    return out


def pullback_to_polydisc(points: Sequence[SymPoint], tol: Tolerances = DEFAULT_TOL) -> list[VarietyPoint]:
    """Canonical preimage of each point; the residual is the round-trip error."""
    out = []
    for q in points:
        coords = tuple(preimage(q, tol))
        back = symmetrize(coords)
        resid = float(np.max(np.abs(np.array(back.as_tuple()) - np.array(q.as_tuple()))))
        out.append(VarietyPoint(complex(q.p), coords, classify(coords, tol), resid))
    return out


def bidisc_determinantal_fiber(a, z: complex, tol: Tolerances = DEFAULT_TOL,
                               seed: int = 0) -> list[complex]:
    """Finite ``w`` with ``det(A^* + A z w - (z + w) I) = 0``.

    Solved as the generalized eigenproblem ``(A^* - z I) x = w (I - z A) x``.

    Raises
    ------
    SingularPencilEverywhere
        If the pencil is singular at three random ``w``.
    """
    a = as_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"A is {a.shape[0]}x{a.shape[1]}")
    d = a.shape[0]
    eye = np.eye(d)
    left = a.conj().T - z * eye
    right = eye - z * a
    scale = max(1.0, _norm(left), _norm(right))
    rng = np.random.default_rng(seed)
    probes = rng.normal(size=3) + 1j * rng.normal(size=3)
    if all(np.linalg.svd(left - w * right, compute_uv=False)[-1] <= tol.rank * scale
           for w in probes):
        raise SingularPencilEverywhere(f"det vanishes identically in w at z={z}")
    alpha, beta = scipy.linalg.eig(left, right, right=False, homogeneous_eigvals=True)
    out = []
    for al, be in zip(alpha, beta):
        if abs(be) > tol.spectral * max(1.0, abs(al)):
            out.append(complex(al / be))
    return sorted(out, key=lambda w: (round(w.real, 12), round(w.imag, 12)))
