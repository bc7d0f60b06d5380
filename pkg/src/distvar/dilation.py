"""Defect operators, dilation conditions, the truncated Toeplitz model and von Neumann checks.

For commuting contractions ``T_1 .. T_n`` with product ``T`` the defect
spaces are identified with coordinate spaces through a canonical frame of
each defect operator's range (see :func:`canonical_frame`), so Sigma data
supplied by the caller is read in those coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyCloud, InvalidSigma, NotAContraction, NotCommuting, NotPure
from .jointspec import commutator_defect
from .numkernel import DEFAULT_TOL, Tolerances, as_matrix, operator_norm, psd_sqrt, spectral_radius
from .pencilvariety import SigmaData, SigmaValidationReport, VarietyPointCloud, validate_sigma
from .polynomials import MatrixPolynomial


@dataclass(frozen=True)
class ContractionTuple:
    T: tuple[np.ndarray, ...]
    product: np.ndarray = field(compare=False)
    commutator_defect: float = field(compare=False)

    @classmethod
    def from_matrices(cls, matrices: Sequence, tol: Tolerances = DEFAULT_TOL) -> "ContractionTuple":
        mats = tuple(as_matrix(m, f"T{k + 1}") for k, m in enumerate(matrices))
        if not mats:
            raise DimensionMismatch("need at least one matrix")
        m = mats[0].shape[0]
        for k, a in enumerate(mats):
            if a.shape != (m, m):
                raise DimensionMismatch(f"T{k + 1} has shape {a.shape}, expected ({m}, {m})")
            if operator_norm(a) > 1 + tol.structural:
                raise NotAContraction(f"T{k + 1} has norm {operator_norm(a):.12g} > 1")
        defect = commutator_defect(mats)
        if defect > tol.structural:
            raise NotCommuting(f"commutator defect {defect:.3e} exceeds tolerance")
        prod = reduce(np.matmul, mats)
        return cls(mats, prod, defect)

    @property
    def n(self) -> int:
        return len(self.T)

    @property
    def m(self) -> int:
        return self.T[0].shape[0]

    def adjoint(self) -> "ContractionTuple":
        mats = tuple(a.conj().T for a in self.T)
        return ContractionTuple(mats, reduce(np.matmul, mats), self.commutator_defect)


def canonical_frame(projector: np.ndarray, rank: int) -> np.ndarray:
    """Orthonormal basis of a projector's range by greedy pivoted Gram-Schmidt on its columns.

    Columns are chosen by largest residual norm, ties to the lowest index, so
    a coordinate subspace is framed by its own standard basis vectors.
    """
    m = projector.shape[0]
    resid = projector.astype(np.complex128).copy()
    frame = np.zeros((m, rank), dtype=np.complex128)
    for k in range(rank):
        norms = np.linalg.norm(resid, axis=0)
        j = int(np.flatnonzero(norms >= (1 - 1e-9) * norms.max())[0])
        q = resid[:, j] / norms[j]
        q = q - frame[:, :k] @ (frame[:, :k].conj().T @ q)
        q /= np.linalg.norm(q)
        frame[:, k] = q
        resid -= np.outer(q, q.conj() @ resid)
    return frame


@dataclass
class DefectData:
    DT: np.ndarray
    DTstar: np.ndarray
    frame_T: np.ndarray
    frame_Tstar: np.ndarray

    @property
    def defect_dim(self) -> int:
        return self.frame_T.shape[1]

    @property
    def defect_star_dim(self) -> int:
        return self.frame_Tstar.shape[1]


def _defect(m_sq: np.ndarray, tol: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    m_sq = 0.5 * (m_sq + m_sq.conj().T)
    w, v = np.linalg.eigh(m_sq)
    keep = w > tol.rank
    rank = int(keep.sum())
    root = psd_sqrt(m_sq, tol, floor=tol.rank)
    proj = v[:, keep] @ v[:, keep].conj().T
    return root, canonical_frame(proj, rank)


def defects(t: ContractionTuple, tol: Tolerances = DEFAULT_TOL) -> DefectData:
    """Defect operators of the product ``T`` and framed defect spaces.

    Eigenvalues of ``I - T^*T`` at or below ``tol.rank`` count as zero, both for
    the numerical rank and for the square root.
    """
    T = t.product
    eye = np.eye(t.m)
    dt, frame = _defect(eye - T.conj().T @ T, tol)
    dts, frame_s = _defect(eye - T @ T.conj().T, tol)
    return DefectData(dt, dts, frame, frame_s)


def is_pure_c0(T, tol: Tolerances = DEFAULT_TOL) -> bool:
    """``T^{*k} -> 0``; for matrices this is ``spectral_radius(T) < 1``."""
    T = as_matrix(T)
    if operator_norm(T) > 1 + tol.structural:
        raise NotAContraction(f"norm {operator_norm(T):.12g} > 1")
    return spectral_radius(T, tol) < 1 - tol.spectral


@dataclass
class FundamentalEqReport:
    residuals: list[float]
    threshold: float
    gram_residuals: list[float] | None = None

    @property
    def passed(self) -> bool:
        worst = max(self.residuals + (self.gram_residuals or []), default=0.0)
        return worst <= self.threshold

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        out = {"residuals": self.residuals, "threshold": self.threshold, "verdict": self.verdict}
        if self.gram_residuals is not None:
            out["gram_residuals"] = self.gram_residuals
        return out


def _sigma_blocks(s: SigmaData) -> tuple[list[np.ndarray], list[np.ndarray]]:
    eye = np.eye(s.d)
    a = [(eye - p) @ u.conj().T for p, u in zip(s.projections, s.unitaries)]
    b = [p @ u.conj().T for p, u in zip(s.projections, s.unitaries)]
    return a, b


def check_fundamental_eq_star(t: ContractionTuple, s: SigmaData, dd: DefectData,
                              tol: Tolerances = DEFAULT_TOL) -> FundamentalEqReport:
    """Residuals of ``D_{T*} T_i^* = P_i^perp U_i^* D_{T*} + P_i U_i^* D_{T*} T^*``."""
    if s.d != dd.defect_star_dim or s.n != t.n:
        raise DimensionMismatch(
            f"Sigma is {s.n} x {s.d}x{s.d}, tuple has n={t.n} and defect* dim {dd.defect_star_dim}")
    x = dd.frame_Tstar.conj().T @ dd.DTstar
    xt = x @ t.product.conj().T
    a, b = _sigma_blocks(s)
    res = [operator_norm(x @ ti.conj().T - ai @ x - bi @ xt) for ti, ai, bi in zip(t.T, a, b)]
    return FundamentalEqReport(res, tol.spectral * t.m)


def check_fundamental_eq_unimain(t: ContractionTuple, s: SigmaData, dd: DefectData,
                                 tol: Tolerances = DEFAULT_TOL) -> FundamentalEqReport:
    """Residuals of ``D_T T_i = P_i^perp U_i^* D_T + P_i U_i^* D_T T`` and
    ``D_T U_i P_i U_i^* D_T = I - T_i^* T_i``."""
    if s.d != dd.defect_dim or s.n != t.n:
        raise DimensionMismatch(
            f"Sigma is {s.n} x {s.d}x{s.d}, tuple has n={t.n} and defect dim {dd.defect_dim}")
    y = dd.frame_T.conj().T @ dd.DT
    yt = y @ t.product
    a, b = _sigma_blocks(s)
    eye = np.eye(t.m)
    res = [operator_norm(y @ ti - ai @ y - bi @ yt) for ti, ai, bi in zip(t.T, a, b)]
    gram = [operator_norm(y.conj().T @ (u @ p @ u.conj().T) @ y - (eye - ti.conj().T @ ti))
            for ti, p, u in zip(t.T, s.projections, s.unitaries)]
    return FundamentalEqReport(res, tol.spectral * t.m, gram)


def _polar(a: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(a)
    return u @ vh


def _nearest_projection(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    keep = v[:, w > 0.5]
    return keep @ keep.conj().T


@dataclass
class SigmaSolveResult:
    sigma: SigmaData | None
    history: list[float]
    status: str
    validation: SigmaValidationReport | None = None
    fundamental: FundamentalEqReport | None = None

    @property
    def success(self) -> bool:
        return self.sigma is not None


def solve_sigma_star(t: ContractionTuple, dd: DefectData, tol: Tolerances = DEFAULT_TOL,
                     max_iter: int = 200) -> SigmaSolveResult:
    """Best-effort recovery of Sigma data satisfying the co-isometric fundamental equations.

    For each ``i`` the pair ``(A_i, B_i) = (P_i^perp U_i^*, P_i U_i^*)`` is found
    by alternating between the affine solution set of
    ``A_i X + B_i X T^* = X T_i^*`` (``X = D_{T*}`` in frame coordinates) and
    the set of pairs of that shape.  A candidate is returned only if it passes
    both :func:`validate_sigma` and :func:`check_fundamental_eq_star`.

    Raises
    ------
    NotPure
        If the product is not a pure contraction.
    """
    if not is_pure_c0(t.product, tol):
        raise NotPure("product of the tuple is not a pure contraction")
    d = dd.defect_star_dim
    if d < 1:
        raise DimensionMismatch("defect space of T^* is trivial")
    eye = np.eye(d)
    history: list[float] = []
    if t.n == 1:
        projections, unitaries = [eye.astype(np.complex128)], [eye.astype(np.complex128)]
        status = "forced"
    else:
        x = dd.frame_Tstar.conj().T @ dd.DTstar
        g = np.vstack([x, x @ t.product.conj().T])
        gp = np.linalg.pinv(g, rcond=tol.rank)
        rhs = [x @ ti.conj().T for ti in t.T]
        ab = [r @ gp for r in rhs]
        threshold = tol.spectral * t.m
        projections, unitaries = [None] * t.n, [None] * t.n
        status = "no_convergence"
        for _ in range(max_iter):
            worst = 0.0
            for i in range(t.n):
                a, b = ab[i][:, :d], ab[i][:, d:]
                v = _polar(a + b)
                for _ in range(3):
                    p = _nearest_projection(0.5 * (eye - a @ v.conj().T + b @ v.conj().T))
                    v = _polar((eye - p) @ a + p @ b)
                struct = np.hstack([(eye - p) @ v, p @ v])
                mismatch = struct @ g - rhs[i]
                worst = max(worst, operator_norm(mismatch))
                projections[i], unitaries[i] = p, v.conj().T
                ab[i] = struct - mismatch @ gp
            history.append(worst)
            if worst <= tol.structural:
                status = "converged"
                break
        if status != "converged" and history and history[-1] <= threshold:
            status = "converged"
    try:
        cand = SigmaData(tuple(projections), tuple(unitaries))
        report = validate_sigma(cand, tol)
    except Exception as exc:  # malformed candidate: report, never return it
        return SigmaSolveResult(None, history, f"{status}; candidate rejected: {exc}")
    fund = check_fundamental_eq_star(t, cand, dd, tol)
    if report.passed and fund.passed:
        return SigmaSolveResult(cand, history, status, report, fund)
    return SigmaSolveResult(None, history, f"{status}; verification failed", report, fund)


def truncated_shift(N: int) -> np.ndarray:
    return np.eye(N, k=-1, dtype=np.complex128)


@dataclass
class ToeplitzModel:
    """Degree-``N`` truncation of the Toeplitz tuple with symbols ``U_i P_i^perp + z U_i P_i``.

    Coordinates are degree-major: block ``k`` holds the coefficient of ``z^k``.
    """

    sigma: SigmaData
    N: int
    blocks: list[np.ndarray]

    def interior_columns(self) -> np.ndarray:
        return np.arange((self.N - 1) * self.sigma.d)

    def interior_defects(self) -> dict[str, float]:
        cols = self.interior_columns()
        eye = np.eye(len(cols))
        iso = max(operator_norm(v[:, cols].conj().T @ v[:, cols] - eye) for v in self.blocks)
        comm = 0.0
        for i in range(len(self.blocks)):
            for j in range(i + 1, len(self.blocks)):
                vi, vj = self.blocks[i], self.blocks[j]
                comm = max(comm, operator_norm((vi @ vj - vj @ vi)[:, cols]))
        prod = reduce(np.matmul, self.blocks)
        shift = np.kron(truncated_shift(self.N), np.eye(self.sigma.d))
        return {
            "isometry": iso,
            "commutation": comm,
            "product_shift": operator_norm((prod - shift)[:, cols]),
        }

    def compressed_tuple(self, tol: Tolerances = DEFAULT_TOL) -> ContractionTuple:
        """Compression to polynomials of degree < N, which is the block matrices themselves."""
        return ContractionTuple.from_matrices(self.blocks, tol)


def build_toeplitz_model(s: SigmaData, N: int, tol: Tolerances = DEFAULT_TOL) -> ToeplitzModel:
    if N < 2:
        raise ValueError("truncation degree must be at least 2")
    report = validate_sigma(s, tol)
    if not report.passed:
        raise InvalidSigma(f"Sigma fails {', '.join(report.failed)}")
    eye_n = np.eye(N)
    shift = truncated_shift(N)
    eye_d = np.eye(s.d)
    blocks = [np.kron(eye_n, u @ (eye_d - p)) + np.kron(shift, u @ p)
              for p, u in zip(s.projections, s.unitaries)]
    return ToeplitzModel(s, N, blocks)


@dataclass
class VNResult:
    lhs: float
    rhs: float
    satisfied: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "satisfied": self.satisfied, "margin": self.margin}


def _cloud_points(cloud) -> tuple[np.ndarray, int]:
    if isinstance(cloud, VarietyPointCloud):
        pts = cloud.coordinates()
        return pts, cloud.boundary_count
    pts = np.asarray(cloud, dtype=np.complex128)
    if pts.ndim != 2:
        raise ValueError("cloud must be a VarietyPointCloud or an (N, n) array")
    top = np.max(np.abs(pts), axis=1) if len(pts) else np.zeros(0)
    return pts, int(np.sum(top >= 1 - DEFAULT_TOL.spectral))


def vn_check(t: ContractionTuple, cloud, polys: Sequence[MatrixPolynomial],
             tol: Tolerances = DEFAULT_TOL) -> dict:
    """Compare ``|f(T)|`` with the sampled sup of ``|f|`` over the cloud.

    ``rhs`` is a grid maximum, so an unsatisfied entry is evidence rather than
    proof; the returned grid metadata allows re-running at finer resolution.
    """
    pts, boundary = _cloud_points(cloud)
    if len(pts) == 0:
        raise EmptyCloud("cloud has no points")
    if pts.shape[1] != t.n:
        raise DimensionMismatch(f"cloud has {pts.shape[1]} coordinates, tuple has {t.n}")
    results = []
    for poly in polys:
        lhs = operator_norm(poly.evaluate_operators(t.T))
        vals = poly.evaluate_points(pts)
        if poly.size == 1:
            rhs = float(np.max(np.abs(vals[:, 0, 0])))
        else:
            rhs = float(np.max(np.linalg.norm(vals, ord=2, axis=(1, 2))))
        results.append(VNResult(lhs, rhs, lhs <= rhs + tol.spectral))
    grid = cloud.grid if isinstance(cloud, VarietyPointCloud) else {}
    return {
        "points": int(len(pts)),
        "boundary_points": boundary,
        "grid": grid,
        "results": results,
    }


__all__ = [
    "ContractionTuple",
    "DefectData",
    "FundamentalEqReport",
    "SigmaSolveResult",
    "ToeplitzModel",
    "VNResult",
    "build_toeplitz_model",
    "canonical_frame",
    "check_fundamental_eq_star",
    "check_fundamental_eq_unimain",
    "defects",
    "is_pure_c0",
    "solve_sigma_star",
    "truncated_shift",
    "vn_check",
]
