import warnings

import numpy as np
import pytest

from conftest import basis_of
from gsp_sampling.errors import ContractError, ParameterError
from gsp_sampling.graph import complete_graph, generate_ba, generate_er, generate_sbm, path_graph
from gsp_sampling.spectral import (
    DegenerateBandWarning,
    band,
    band_projector,
    eigendecompose,
    leverage_scores,
    load_basis,
    numerical_rank,
    save_basis,
    zero_cutoff,
)

# Closed-form path eigenvectors: cos(j pi (i + 1/2) / N), normalized.
P3_U = np.array([
    [1 / np.sqrt(3), 1 / np.sqrt(2), 1 / np.sqrt(6)],
    [1 / np.sqrt(3), 0.0, -2 / np.sqrt(6)],
    [1 / np.sqrt(3), -1 / np.sqrt(2), 1 / np.sqrt(6)],
])


class TestEigendecompose:
    def test_path_spectrum(self, p3_basis):
        expected = [4 * np.sin(j * np.pi / 6) ** 2 for j in range(3)]
        np.testing.assert_allclose(p3_basis.eigenvalues, expected, atol=1e-12)
        np.testing.assert_allclose(p3_basis.eigenvectors, P3_U, atol=1e-12)

    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_complete_spectrum(self, n):
        vals = basis_of(complete_graph(n)).eigenvalues
        np.testing.assert_allclose(vals, [0] + [n] * (n - 1), atol=1e-10)

    def test_constant_first_eigenvector(self):
        basis = basis_of(generate_ba(50, 2, 1))
        np.testing.assert_allclose(basis.eigenvectors[:, 0], 1 / np.sqrt(50), atol=1e-10)

    def test_rejects_asymmetric(self):
        with pytest.raises(ContractError):
            eigendecompose(np.array([[1.0, 2.0], [0.0, 1.0]]))

    @pytest.mark.parametrize("make", [
        lambda s: generate_er(300, 0.8, s),
        lambda s: generate_ba(1000, 3, s),
        lambda s: generate_sbm(200, 10, 0.7, 0.1, s),
    ])
    def test_invariants(self, make):
        from gsp_sampling.graph import shift_operator
        lap = shift_operator(make(0))
        basis = eigendecompose(lap)
        u, lam = basis.eigenvectors, basis.eigenvalues
        assert np.all(np.diff(lam) >= 0)
        assert abs(lam[0]) <= 1e-8
        assert np.max(np.abs(u.T @ u - np.eye(len(lam)))) <= 1e-8
        assert np.max(np.abs(lap - (u * lam) @ u.T)) <= 1e-6 * max(1.0, lam[-1])

    def test_sign_convention(self):
        basis = basis_of(generate_er(40, 0.5, 2))
        for col in basis.eigenvectors.T:
            first = col[np.flatnonzero(np.abs(col) > 1e-8)[0]]
            assert first > 0


class TestBand:
    def test_path_k1(self, p3_basis):
        b = band(p3_basis, 1)
        np.testing.assert_allclose(b.u_k[:, 0], 1 / np.sqrt(3), atol=1e-12)
        assert b.spectral_gap == pytest.approx(1.0, abs=1e-12)
        assert not b.degenerate

    def test_full_band(self, p3_basis):
        b = band(p3_basis, 3)
        assert b.spectral_gap == 0.0
        np.testing.assert_array_equal(b.u_k, p3_basis.eigenvectors)

    def test_degenerate_warning(self):
        with pytest.warns(DegenerateBandWarning):
            b = band(basis_of(complete_graph(4)), 2)
        assert b.degenerate

    def test_no_warning_at_gap(self, p3_basis):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            band(p3_basis, 2)

    @pytest.mark.parametrize("k", [0, 4])
    def test_out_of_range(self, p3_basis, k):
        with pytest.raises(ParameterError):
            band(p3_basis, k)


class TestProjector:
    def test_identity_at_full_band(self, p3_basis):
        np.testing.assert_allclose(band_projector(band(p3_basis, 3)), np.eye(3), atol=1e-12)

    def test_path_k1(self, p3_basis):
        np.testing.assert_allclose(band_projector(band(p3_basis, 1)), np.full((3, 3), 1 / 3), atol=1e-12)

    def test_path_k2(self, p3_basis):
        expected = P3_U[:, :2] @ P3_U[:, :2].T
        proj = band_projector(band(p3_basis, 2))
        np.testing.assert_allclose(proj, expected, atol=1e-12)
        np.testing.assert_allclose(proj @ proj, proj, atol=1e-8)
        assert np.trace(proj) == pytest.approx(2, abs=1e-8)

    def test_degenerate_basis_independence(self):
        basis = basis_of(complete_graph(4))
        with pytest.warns(DegenerateBandWarning):
            b1 = band(basis, 2)
        # Rotate inside the degenerate eigenspace to get another valid U_2.
        theta = 0.7
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        alt = basis.eigenvectors.copy()
        alt[:, 1:3] = alt[:, 1:3] @ rot
        lap = (alt * basis.eigenvalues) @ alt.T
        np.testing.assert_allclose(lap, 4 * np.eye(4) - np.ones((4, 4)), atol=1e-12)
        for u in (b1.u_k, alt[:, :2]):
            proj = u @ u.T
            np.testing.assert_allclose(proj @ proj, proj, atol=1e-8)
            assert np.trace(proj) == pytest.approx(2, abs=1e-8)

    def test_nondegenerate_projector_is_canonical(self, er30):
        b = er30[0]
        flipped = b.u_k * np.where(np.arange(b.k) % 2, -1.0, 1.0)
        np.testing.assert_allclose(flipped @ flipped.T, band_projector(b), atol=1e-12)


class TestLeverage:
    def test_full_band_all_ones(self, p3_basis):
        np.testing.assert_allclose(leverage_scores(band(p3_basis, 3)), 1.0, atol=1e-12)

    def test_triangle_k1(self, k3_basis):
        np.testing.assert_allclose(leverage_scores(band(k3_basis, 1)), 1 / 3, atol=1e-12)

    def test_path_k2(self, p3_basis):
        scores = leverage_scores(band(p3_basis, 2))
        assert scores.sum() == pytest.approx(2, abs=1e-8)
        assert scores[1] == pytest.approx(np.sum(P3_U[1, :2] ** 2), abs=1e-12)
        assert scores[1] == pytest.approx(1 / 3, abs=1e-12)

    def test_sum_is_k(self, er30):
        for b in er30:
            assert leverage_scores(b).sum() == pytest.approx(b.k, abs=1e-8)

    def test_sign_invariant(self, er30):
        b = er30[1]
        flipped = b.u_k * -1.0
        np.testing.assert_allclose(np.sum(flipped**2, axis=1), leverage_scores(b), atol=1e-15)


class TestZeroCutoff:
    def test_default_rule(self):
        assert zero_cutoff(2.0, 100, 10) == pytest.approx(2.0 * 100 * np.finfo(float).eps)

    def test_override(self):
        assert zero_cutoff(2.0, 100, 10, rtol=1e-3) == pytest.approx(2e-3)

    def test_rank(self):
        sv = np.array([1.0, 1e-3, 1e-16])
        assert numerical_rank(sv, 10, 3) == 2
        assert numerical_rank(sv, 10, 3, rtol=1e-2) == 1
        assert numerical_rank(np.array([]), 10, 3) == 0


class TestCache:
    def test_roundtrip(self, tmp_path):
        g = generate_er(25, 0.5, 1)
        basis = basis_of(g)
        path = tmp_path / "b.bin"
        save_basis(path, basis, g.digest(), k_max=6)
        loaded, header = load_basis(path, expected_hash=g.digest())
        assert header == {"n": 25, "k_max": 6, "kind": "combinatorial", "hash": g.digest()}
        np.testing.assert_array_equal(loaded.eigenvalues, basis.eigenvalues)
        np.testing.assert_array_equal(loaded.eigenvectors, basis.eigenvectors[:, :6])
        np.testing.assert_array_equal(band(loaded, 5).u_k, band(basis, 5).u_k)

    def test_layout(self, tmp_path):
        import json
        import struct
        basis = basis_of(path_graph(3))
        path = tmp_path / "b.bin"
        save_basis(path, basis, "abc")
        raw = path.read_bytes()
        (hlen,) = struct.unpack("<I", raw[:4])
        assert json.loads(raw[4 : 4 + hlen])["n"] == 3
        assert len(raw) == 4 + hlen + 8 * (3 + 9)

    def test_hash_mismatch(self, tmp_path):
        basis = basis_of(path_graph(3))
        save_basis(tmp_path / "b.bin", basis, "abc")
        with pytest.raises(ContractError):
            load_basis(tmp_path / "b.bin", expected_hash="xyz")
