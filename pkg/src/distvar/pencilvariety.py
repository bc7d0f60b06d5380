"""Sigma data (projections + commuting unitaries) and the distinguished set it cuts out.

For Sigma = (P_1..P_n, U_1..U_n) the pencils are
``Phi_i(z) = U_i (I - P_i) + z U_i P_i`` and the set is the union over
base points ``z`` of the joint eigenvalues ``(z_1, .., z_n)`` of
``(Phi_1(z), .., Phi_n(z))``; every such point has ``prod z_i = z``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import DimensionMismatch, IndexOutOfRange, InvalidSigma, MalformedSigma, NotCommuting, NotCommutingAtZ
from .jointspec import CommutingTuple, commutator_defect, joint_eigenvalues
from .numkernel import DEFAULT_TOL, Tolerances, as_matrix, operator_norm

INTERIOR = "interior"
BOUNDARY = "boundary"
EXTERIOR = "exterior"

CONDITIONS = ("condition1", "condition2", "condition3", "product_identity")


def _norm(a: np.ndarray) -> float:
    return operator_norm(a)


@dataclass(frozen=True)
class SigmaData:
    projections: tuple[np.ndarray, ...]
    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "projections",
                           tuple(as_matrix(p, f"P{i + 1}") for i, p in enumerate(self.projections)))
        object.__setattr__(self, "unitaries",
                           tuple(as_matrix(u, f"U{i + 1}") for i, u in enumerate(self.unitaries)))
        if len(self.projections) != len(self.unitaries) or not self.projections:
            raise MalformedSigma("need the same positive number of projections and unitaries")
        d = self.projections[0].shape[0]
        for name, m in self._named():
            if m.shape != (d, d):
                raise MalformedSigma(f"{name} has shape {m.shape}, expected ({d}, {d})")

    @property
    def n(self) -> int:
        return len(self.projections)

    @property
    def d(self) -> int:
        return self.projections[0].shape[0]

    def _named(self):
        for i, p in enumerate(self.projections):
            yield f"P{i + 1}", p
        for i, u in enumerate(self.unitaries):
            yield f"U{i + 1}", u

    def structural_defects(self) -> dict[str, float]:
        """Projection, unitarity, commutation and product defects keyed by matrix name."""
        eye = np.eye(self.d)
        out = {}
        for i, p in enumerate(self.projections):
            out[f"P{i + 1}"] = max(_norm(p - p.conj().T), _norm(p @ p - p))
        for i, u in enumerate(self.unitaries):
            out[f"U{i + 1}"] = _norm(u.conj().T @ u - eye)
        out["U_commute"] = commutator_defect(self.unitaries)
        prod = eye.astype(np.complex128)
        for u in self.unitaries:
            prod = prod @ u
        out["U_product"] = _norm(prod - eye)
        return out

    def check_structure(self, tol: Tolerances = DEFAULT_TOL) -> None:
        """Raise :class:`MalformedSigma` naming the first matrix that breaks an invariant."""
        for name, defect in self.structural_defects().items():
            if defect > tol.structural:
                raise MalformedSigma(f"{name} violates its invariant (defect {defect:.3e})")

    def conjugate(self, w: np.ndarray) -> "SigmaData":
        """Sigma data with every matrix replaced by ``W^H M W``."""
        w = as_matrix(w)
        wh = w.conj().T
        return SigmaData(tuple(wh @ p @ w for p in self.projections),
                         tuple(wh @ u @ w for u in self.unitaries))


@dataclass
class SigmaValidationReport:
    condition1_defect: float
    condition2_defect: float
    condition3_defect: float
    product_identity_defect: float
    tolerance: float

    @property
    def defects(self) -> dict[str, float]:
        return {
            "condition1": self.condition1_defect,
            "condition2": self.condition2_defect,
            "condition3": self.condition3_defect,
            "product_identity": self.product_identity_defect,
        }

    @property
    def failed(self) -> list[str]:
        return [k for k, v in self.defects.items() if v > self.tolerance]

    @property
    def passed(self) -> bool:
        return not self.failed

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {**self.defects, "failed": self.failed, "verdict": self.verdict}


def pencil(s: SigmaData, i: int, z: complex) -> np.ndarray:
    """``U_i (I - P_i) + z U_i P_i`` for the 0-based pencil index ``i``."""
    if not 0 <= i < s.n:
        raise IndexOutOfRange(f"pencil index {i} outside 0..{s.n - 1}")
    u, p = s.unitaries[i], s.projections[i]
    return u @ (np.eye(s.d) - p) + z * (u @ p)


def pencils(s: SigmaData, z: complex) -> list[np.ndarray]:
    return [pencil(s, i, z) for i in range(s.n)]


def _sample_circles(count: int) -> np.ndarray:
    angles = 2 * np.pi * np.arange(count) / max(count, 1)
    ring = np.exp(1j * angles)
    return np.concatenate([0.5 * ring, ring])


def validate_sigma(s: SigmaData, tol: Tolerances = DEFAULT_TOL,
                   z_samples: int = 16) -> SigmaValidationReport:
    """Check the three algebraic conditions and the pencil product identity.

    Condition 1: ``P_i^perp U_i^* P_j^perp U_j^*`` commute pairwise.
    Condition 2: ``U_i P_i U_j P_j`` commute pairwise.
    Condition 3: ``sum_i W_i^* P_i W_i = I`` with ``W_i = U_{i-1} .. U_1``.
    The product identity ``prod_i Phi_i(z) = z I`` is sampled at ``z_samples``
    points on each of the circles ``|z| = 0.5`` and ``|z| = 1``.
    """
    s.check_structure(tol)
    eye = np.eye(s.d)
    a = [(eye - p) @ u.conj().T for p, u in zip(s.projections, s.unitaries)]
    b = [u @ p for p, u in zip(s.projections, s.unitaries)]
    c1 = c2 = 0.0
    for i in range(s.n):
        for j in range(i + 1, s.n):
            c1 = max(c1, _norm(a[i] @ a[j] - a[j] @ a[i]))
            c2 = max(c2, _norm(b[i] @ b[j] - b[j] @ b[i]))
    total = np.zeros((s.d, s.d), dtype=np.complex128)
    w = eye.astype(np.complex128)
    for p, u in zip(s.projections, s.unitaries):
        total += w.conj().T @ p @ w
        w = u @ w
    c3 = _norm(total - eye)
    prod_defect = 0.0
    for z in _sample_circles(z_samples):
        prod = eye.astype(np.complex128)
        for m in pencils(s, z):
            prod = prod @ m
        prod_defect = max(prod_defect, _norm(prod - z * eye))
    return SigmaValidationReport(c1, c2, c3, prod_defect, tol.structural)


@dataclass(frozen=True)
class VarietyPoint:
    z: complex
    coordinates: tuple[complex, ...]
    classification: str
    witness_residual: float


def classify(coords: Sequence[complex], tol: Tolerances = DEFAULT_TOL) -> str:
    top = max((abs(c) for c in coords), default=0.0)
    if top < 1 - tol.spectral:
        return INTERIOR
    if top <= 1 + tol.spectral:
        return BOUNDARY
    return EXTERIOR


def fiber(s: SigmaData, z: complex, tol: Tolerances = DEFAULT_TOL,
          seed: int | np.random.Generator | None = 0) -> list[VarietyPoint]:
    """The ``d`` points of the set lying over the base point ``z`` (with multiplicity)."""
    t = CommutingTuple.from_matrices(pencils(s, z))
    if not t.is_commuting(tol):
        raise NotCommutingAtZ(
            f"pencils fail to commute at z={z} (defect {t.commutator_defect:.3e})")
    try:
        eigs = joint_eigenvalues(t, tol, seed)
    except NotCommuting as exc:  # pragma: no cover - guarded above
        raise NotCommutingAtZ(str(exc)) from exc
    return [VarietyPoint(complex(z), je.values, classify(je.values, tol), je.witness_residual)
            for je in eigs]


@dataclass
class VarietyPointCloud:
    sigma: SigmaData | None
    points: list[VarietyPoint]
    grid: dict = field(default_factory=dict)

    @property
    def interior_count(self) -> int:
        return sum(p.classification == INTERIOR for p in self.points)

    @property
    def boundary_count(self) -> int:
        return sum(p.classification == BOUNDARY for p in self.points)

    @property
    def exterior_count(self) -> int:
        return sum(p.classification == EXTERIOR for p in self.points)

    @property
    def n(self) -> int:
        if self.points:
            return len(self.points[0].coordinates)
        return self.sigma.n if self.sigma is not None else 0

    def coordinates(self) -> np.ndarray:
        return np.array([p.coordinates for p in self.points], dtype=np.complex128).reshape(
            len(self.points), self.n)


def polar_grid(radii: Sequence[float], angles: int) -> list[complex]:
    ks = np.arange(angles)
    return [complex(r * np.exp(2j * np.pi * k / angles)) for r in radii for k in ks]


def trace_variety(s: SigmaData, radii: Sequence[float], angles_per_radius: int,
                  tol: Tolerances = DEFAULT_TOL, seed: int = 0,
                  validate: bool = True) -> VarietyPointCloud:
    """Union of fibers over the polar grid ``r e^{2 pi i k / angles}``.

    Fiber ``j`` of the grid uses random seed ``seed + j`` so results do not
    depend on evaluation order.
    """
    radii = [float(r) for r in radii]
    if any(r <= 0 or r > 1 for r in radii):
        raise ValueError("radii must lie in (0, 1]")
    if radii != sorted(radii):
        raise ValueError("radii must be sorted ascending")
    if validate and radii:
        report = validate_sigma(s, tol)
        if not report.passed:
            raise InvalidSigma(f"Sigma fails {', '.join(report.failed)}")
    points: list[VarietyPoint] = []
    for j, z in enumerate(polar_grid(radii, angles_per_radius)):
        points.extend(fiber(s, z, tol, seed + j))
    return VarietyPointCloud(s, points, {"radii": radii, "angles": int(angles_per_radius)})


def distinct_count(points: Sequence[VarietyPoint], radius: float) -> int:
    """Number of geometrically distinct points: connected components at max-norm ``radius``."""
    if not points:
        return 0
    coords = np.array([p.coordinates for p in points], dtype=np.complex128)
    emb = np.hstack([coords.real, coords.imag])
    pairs = cKDTree(emb).query_pairs(radius, p=np.inf, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
                       shape=(len(points), len(points)))
    return int(connected_components(graph, directed=False)[0])


@dataclass
class DistinguishedCertificate:
    interior_nonempty: bool
    exits_through_torus: bool
    exterior_violations: int
    boundary_angles: int
    max_boundary_modulus_deviation: float
    max_boundary_unitarity_defect: float
    distinct_points: int

    @property
    def verdict(self) -> str:
        ok = self.interior_nonempty and self.exits_through_torus and self.exterior_violations == 0
        return "pass" if ok else "fail"

    def to_dict(self) -> dict:
        return {
            "interior_nonempty": self.interior_nonempty,
            "exits_through_torus": self.exits_through_torus,
            "exterior_violations": self.exterior_violations,
            "boundary_angles": self.boundary_angles,
            "max_boundary_modulus_deviation": self.max_boundary_modulus_deviation,
            "max_boundary_unitarity_defect": self.max_boundary_unitarity_defect,
            "distinct_points": self.distinct_points,
            "verdict": self.verdict,
        }


def certify_distinguished(cloud: VarietyPointCloud, boundary_angles: int,
                          tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> DistinguishedCertificate:
    """Check that the set meets the open polydisc and leaves it only through the torus.

    Failures are reported in the certificate, never raised.
    """
    exterior = sum(
        1 for p in cloud.points if any(abs(c) > 1 + tol.spectral for c in p.coordinates))
    interior = any(p.classification == INTERIOR for p in cloud.points)
    mod_dev = 0.0
    unit_dev = 0.0
    exits = False
    s = cloud.sigma
    if s is not None and boundary_angles > 0:
        exits = True
        eye = np.eye(s.d)
        for k in range(boundary_angles):
            z = complex(np.exp(2j * np.pi * k / boundary_angles))
            for m in pencils(s, z):
                unit_dev = max(unit_dev, _norm(m.conj().T @ m - eye))
            try:
                pts = fiber(s, z, tol, seed + k)
            except (NotCommuting, DimensionMismatch):
                exits = False
                continue
            for p in pts:
                for c in p.coordinates:
                    mod_dev = max(mod_dev, abs(abs(c) - 1.0))
        exits = exits and mod_dev <= tol.spectral and unit_dev <= tol.structural
    return DistinguishedCertificate(
        interior_nonempty=interior,
        exits_through_torus=exits,
        exterior_violations=exterior,
        boundary_angles=int(boundary_angles),
        max_boundary_modulus_deviation=mod_dev,
        max_boundary_unitarity_defect=unit_dev,
        distinct_points=distinct_count(cloud.points, tol.spectral),
    )
