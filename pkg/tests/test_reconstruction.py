import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import basis_of, random_subset
from gsp_sampling.errors import ContractError, SingularSystemError
from gsp_sampling.graph import complete_graph, generate_er, path_graph, shift_operator
from gsp_sampling.reconstruction import (
    Method,
    Observation,
    glr_operator,
    ls_operator,
    reconstruct,
)
from gsp_sampling.sampling import greedy_select, restrict_rows
from gsp_sampling.spectral import band, band_projector


class TestLS:
    def test_all_vertices_is_projector(self, er30):
        b = er30[0]
        r = ls_operator(b, range(b.n))
        np.testing.assert_allclose(r.matrix, band_projector(b), atol=1e-12)
        assert r.rank == b.k and r.method is Method.LS

    def test_empty_set(self, er30):
        r = ls_operator(er30[0], [])
        assert r.matrix.shape == (30, 0) and r.rank == 0
        out = reconstruct(r, Observation(np.zeros(0), r.sample_set))
        np.testing.assert_array_equal(out, np.zeros(30))

    def test_path_explicit_inverse(self, p3_basis):
        b = band(p3_basis, 2)
        r = ls_operator(b, [0, 2])
        rows = restrict_rows(b.u_k, [0, 2])
        g = np.array([[5 / 6, -1 / 6], [-1 / 6, 5 / 6]])
        np.testing.assert_allclose(rows @ rows.T, g, atol=1e-15)
        # Square invertible case: R = U_k (M U_k)^{-1}.
        expected = b.u_k @ np.linalg.inv(rows)
        np.testing.assert_allclose(r.matrix, expected, atol=1e-14)
        assert np.sum(r.matrix**2) == pytest.approx(1 / (2 / 3) + 1, abs=1e-12)

    def test_exact_recovery_bandlimited(self, er30):
        b = er30[1]
        s = greedy_select(b, "A", b.k)
        x = b.u_k @ np.arange(1.0, b.k + 1)
        xhat = reconstruct(ls_operator(b, s), Observation.from_signal(x, s))
        np.testing.assert_allclose(xhat, x, atol=1e-10)

    def test_minimal_norm_under_rank_deficiency(self, twin_graph):
        b = band(basis_of(twin_graph), 2)
        r = ls_operator(b, [2, 3])
        assert r.rank == 1
        # Identical rows get equal weight: pinv spreads evenly.
        np.testing.assert_allclose(r.matrix[:, 0], r.matrix[:, 1], atol=1e-14)

    def test_range_inside_band(self, er30):
        b = er30[2]
        s = random_subset(np.random.default_rng(0), 30, 12)
        r = ls_operator(b, s)
        np.testing.assert_allclose(band_projector(b) @ r.matrix, r.matrix, atol=1e-12)

    def test_mismatched_observation(self, er30):
        r = ls_operator(er30[0], [0, 1])
        with pytest.raises(ContractError):
            reconstruct(r, Observation(np.zeros(2), [1, 0]))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(0, 29), unique=True, min_size=1),
           st.integers(0, 4))
    def test_pinv_identities(self, s, gi):
        b = band(basis_of(generate_er(30, 0.8, gi)), 5)
        r = ls_operator(b, s)
        a = restrict_rows(b.u_k, s)
        pinv = b.u_k.T @ r.matrix
        np.testing.assert_allclose(a @ pinv @ a, a, atol=1e-9)
        np.testing.assert_allclose(pinv @ a @ pinv, pinv, atol=1e-6 * max(1, np.abs(pinv).max()))


class TestGLR:
    def test_tiny_mu_all_vertices_identity(self, er30):
        lap = shift_operator(generate_er(30, 0.8, 0), "combinatorial")
        r = glr_operator(lap, range(30), mu=1e-12)
        np.testing.assert_allclose(r.matrix, np.eye(30), atol=1e-9)

    def test_triangle_single_sample(self):
        lap = shift_operator(complete_graph(3), "combinatorial")
        r = glr_operator(lap, [0], mu=1.0)
        system = lap + np.diag([1.0, 0.0, 0.0])
        np.testing.assert_allclose(r.matrix[:, 0], np.linalg.solve(system, [1.0, 0.0, 0.0]), atol=1e-14)
        np.testing.assert_allclose(r.matrix[:, 0], [1.0, 1.0, 1.0], atol=1e-14)

    @pytest.mark.parametrize("mu", [1e-3, 1e-1, 10.0])
    def test_constant_preserved(self, mu):
        lap = shift_operator(generate_er(30, 0.8, 1), "combinatorial")
        s = [3, 7, 11]
        xhat = reconstruct(glr_operator(lap, s, mu), Observation(np.full(3, 2.5), s))
        np.testing.assert_allclose(xhat, 2.5, atol=1e-10)

    @pytest.mark.parametrize("seed", range(20))
    def test_smoothness_monotone_in_mu(self, seed):
        lap = shift_operator(generate_er(30, 0.8, seed), "combinatorial")
        rng = np.random.default_rng(seed)
        s = random_subset(rng, 30, int(rng.integers(1, 30)))
        y = rng.standard_normal(len(s))
        quad = []
        for mu in (1e-3, 1e-2, 1e-1, 1.0, 10.0):
            xhat = reconstruct(glr_operator(lap, s, mu), Observation(y, s))
            quad.append(xhat @ lap @ xhat)
        assert all(a >= b - 1e-10 * max(1.0, a) for a, b in zip(quad, quad[1:]))

    def test_linearity(self):
        lap = shift_operator(path_graph(6), "combinatorial")
        s = [0, 5]
        r = glr_operator(lap, s)
        y1, y2 = np.array([1.0, -2.0]), np.array([0.5, 4.0])
        lhs = reconstruct(r, Observation(2 * y1 - 3 * y2, s))
        rhs = 2 * reconstruct(r, Observation(y1, s)) - 3 * reconstruct(r, Observation(y2, s))
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_rejects_empty_and_bad_mu(self):
        lap = shift_operator(path_graph(4), "combinatorial")
        with pytest.raises(ContractError):
            glr_operator(lap, [])
        with pytest.raises(ContractError):
            glr_operator(lap, [0], mu=0.0)

    def test_singular_system(self):
        # Two disconnected components; samples only on the first leave the second free.
        lap = np.zeros((4, 4))
        lap[:2, :2] = [[1, -1], [-1, 1]]
        lap[2:, 2:] = [[1, -1], [-1, 1]]
        with pytest.raises(SingularSystemError) as info:
            glr_operator(lap, [0], mu=1.0)
        assert info.value.condition > 1e8


class TestUnbiased:
    def test_noise_mean_zero(self, er30):
        b = er30[3]
        s = greedy_select(b, "D", 8)
        r = ls_operator(b, s)
        x = b.u_k @ np.ones(b.k)
        rng = np.random.default_rng(5)
        noise = 0.1 * rng.standard_normal((len(s), 20000))
        est = reconstruct(r, Observation(restrict_rows(x, s)[:, None] + noise, s))
        se = est.std(axis=1) / np.sqrt(20000)
        assert np.all(np.abs(est.mean(axis=1) - x) <= 5 * se + 1e-12)
