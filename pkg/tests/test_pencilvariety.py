from __future__ import annotations

import numpy as np
import pytest
from conftest import E11, SWAP
from oracles import diagonal_fiber, multiset_distance

from distvar.errors import IndexOutOfRange, InvalidSigma, MalformedSigma
from distvar.generators import generate_sigma, haar_unitary
from distvar.pencilvariety import (
    BOUNDARY,
    EXTERIOR,
    INTERIOR,
    SigmaData,
    VarietyPoint,
    VarietyPointCloud,
    certify_distinguished,
    distinct_count,
    fiber,
    pencil,
    trace_variety,
    validate_sigma,
)

ONE = np.ones((1, 1))
ZERO = np.zeros((1, 1))


def _partition_break(s: SigmaData) -> SigmaData:
    ps = [p.copy() for p in s.projections]
    owner = next(i for i in range(s.n) if ps[i][0, 0].real > 0.5)
    ps[(owner + 1) % s.n][0, 0] = 1.0
    return SigmaData(tuple(ps), s.unitaries)


class TestValidate:
    def test_swap_passes_exactly(self, swap_sigma):
        r = validate_sigma(swap_sigma)
        assert r.passed and max(r.defects.values()) < 1e-12

    def test_partition_violation(self):
        r = validate_sigma(SigmaData((ONE, ONE), (ONE, ONE)))
        assert r.verdict == "fail"
        assert r.condition3_defect == pytest.approx(1.0)
        assert "condition3" in r.failed

    def test_literal_off_diagonal_swap_variant_fails(self):
        # P_2 = diag(0,1) with swap unitaries breaks the partition sum
        r = validate_sigma(SigmaData((E11, np.diag([0.0, 1.0])), (SWAP, SWAP)))
        assert "condition3" in r.failed

    @pytest.mark.parametrize("seed", range(5))
    def test_diagonal_family(self, seed):
        assert validate_sigma(generate_sigma("diagonal", 3, 5, seed)).passed

    def test_mutation_flags_partition(self):
        s = generate_sigma("diagonal", 3, 4, seed=3)
        r = validate_sigma(_partition_break(s))
        assert "condition3" in r.failed
        assert "condition1" not in r.failed and "condition2" not in r.failed

    def test_rotated_projection_flags_commutation(self, rng):
        s = generate_sigma("conjugatedDiagonal", 3, 4, seed=4)
        w = haar_unitary(4, rng)
        ps = list(s.projections)
        ps[0] = w @ ps[0] @ w.conj().T
        r = validate_sigma(SigmaData(tuple(ps), s.unitaries))
        assert {"condition1", "condition2"} & set(r.failed)

    def test_conjugation_covariance(self, rng):
        s = generate_sigma("diagonal", 3, 4, seed=8)
        w = haar_unitary(4, rng)
        r1, r2 = validate_sigma(s), validate_sigma(s.conjugate(w))
        assert r2.passed
        for k in r1.defects:
            assert abs(r1.defects[k] - r2.defects[k]) < 1e-12

    def test_malformed_names_matrix(self):
        with pytest.raises(MalformedSigma, match="P1"):
            SigmaData((np.array([[0.5]]), ONE), (ONE, ONE)).check_structure()
        with pytest.raises(MalformedSigma, match="U2"):
            SigmaData((ONE, ZERO), (ONE, np.array([[2.0]]))).check_structure()

    def test_report_dict(self, swap_sigma):
        d = validate_sigma(swap_sigma).to_dict()
        assert d["verdict"] == "pass" and d["failed"] == []


class TestPencil:
    def test_swap_examples(self, swap_sigma):
        assert np.allclose(pencil(swap_sigma, 0, 0), [[0, 1], [0, 0]])
        assert np.allclose(pencil(swap_sigma, 0, 1), SWAP)

    def test_diagonal_substitution(self):
        s = generate_sigma("diagonal", 3, 4, seed=2)
        z = 0.3 - 0.2j
        for i in range(3):
            u, p = np.diag(s.unitaries[i]), np.diag(s.projections[i]).real
            assert np.allclose(pencil(s, i, z), np.diag(u * np.where(p > 0.5, z, 1)))

    def test_index_range(self, swap_sigma):
        with pytest.raises(IndexOutOfRange):
            pencil(swap_sigma, 2, 0.1)


class TestFiber:
    def test_swap_interior(self, swap_sigma):
        pts = fiber(swap_sigma, 0.25)
        assert multiset_distance([p.coordinates for p in pts], [(0.5, 0.5), (-0.5, -0.5)]) < 1e-12
        assert all(p.classification == INTERIOR for p in pts)

    def test_swap_boundary(self, swap_sigma):
        pts = fiber(swap_sigma, 1.0)
        assert multiset_distance([p.coordinates for p in pts], [(1, 1), (-1, -1)]) < 1e-12
        assert all(p.classification == BOUNDARY for p in pts)

    @pytest.mark.parametrize("seed", range(4))
    def test_closed_form(self, seed):
        s = generate_sigma("diagonal", 3, 5, seed)
        u = [np.diag(m) for m in s.unitaries]
        p = [np.diag(m) for m in s.projections]
        for z in (0.1, 0.5j, -0.7 + 0.2j):
            got = [pt.coordinates for pt in fiber(s, z)]
            assert multiset_distance(got, diagonal_fiber(u, p, z)) < 1e-10


class TestTrace:
    def test_small_grid(self, swap_sigma):
        cloud = trace_variety(swap_sigma, [0.5], 4)
        assert len(cloud.points) == 8
        for p in cloud.points:
            a, b = p.coordinates
            assert abs(a - b) < 1e-12 and abs(a * a - p.z) < 1e-12

    def test_degenerate_family(self):
        s = SigmaData((ONE, ZERO), (ONE, ONE))
        cloud = trace_variety(s, [0.3, 0.9], 8)
        assert all(abs(p.coordinates[1] - 1) < 1e-15 for p in cloud.points)
        assert cloud.interior_count == 0
        cert = certify_distinguished(cloud, 36)
        assert cert.verdict == "fail" and not cert.interior_nonempty

    def test_empty_radii(self, swap_sigma):
        assert trace_variety(swap_sigma, [], 8).points == []

    def test_rejects_invalid(self):
        with pytest.raises(InvalidSigma):
            trace_variety(SigmaData((ONE, ONE), (ONE, ONE)), [0.5], 4)
        with pytest.raises(ValueError):
            trace_variety(generate_sigma("diagonal", 2, 2), [0.5, 1.5], 4)

    def test_deterministic(self):
        s = generate_sigma("conjugatedDiagonal", 3, 3, seed=11)
        a = trace_variety(s, [0.4, 0.8], 6, seed=3)
        b = trace_variety(s, [0.4, 0.8], 6, seed=3)
        assert a.points == b.points


class TestCertify:
    def test_swap_passes(self, swap_sigma):
        cloud = trace_variety(swap_sigma, [0.2, 0.6, 0.95], 32)
        cert = certify_distinguished(cloud, 360)
        assert cert.verdict == "pass"
        assert cert.max_boundary_modulus_deviation < 1e-10

    def test_planted_exterior(self, swap_sigma):
        cloud = trace_variety(swap_sigma, [0.5], 8)
        z = 0.5
        cloud.points.append(VarietyPoint(z, (1.5, z / 1.5), EXTERIOR, 0.0))
        cert = certify_distinguished(cloud, 36)
        assert cert.exterior_violations == 1 and cert.verdict == "fail"

    def test_distinct_count(self, swap_sigma):
        cloud = trace_variety(swap_sigma, [0.5], 8)
        doubled = cloud.points + cloud.points
        assert distinct_count(doubled, 1e-9) == 16
        assert distinct_count([], 1e-9) == 0

    def test_cloud_helpers(self, swap_sigma):
        cloud = VarietyPointCloud(swap_sigma, [])
        assert cloud.n == 2 and cloud.coordinates().shape == (0, 2)


def test_diagonal_data_touches_boundary_off_torus():
    # coordinates not owned by index i are the unimodular constants u_ik, so no
    # fiber point is strictly interior and the certificate must fail
    s = generate_sigma("diagonal", 2, 3, seed=1)
    cloud = trace_variety(s, [0.3, 0.6, 0.9], 16)
    assert cloud.interior_count == 0 and cloud.boundary_count == len(cloud.points)
    assert certify_distinguished(cloud, 90).verdict == "fail"


def test_swaplike_data_is_strictly_interior():
    s = generate_sigma("swaplike", 2, 3, seed=4)
    cloud = trace_variety(s, [0.3, 0.6, 0.9], 16)
    assert cloud.interior_count == len(cloud.points)
    assert certify_distinguished(cloud, 90).verdict == "pass"
