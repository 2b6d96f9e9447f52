import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractv.errors import InvalidParameterError
from fractv.fractional import (FractionalFamily, fractional_power, fractional_transform, gfso, jfrft,
                               joint_shifts, normalize_energy_preserving)
from fractv.graph import cycle_laplacian, eigendecompose, laplacian
from fractv.transforms import jft_matrix

from conftest import path_graph, random_graph


def fourier_decomp(L):
    d = eigendecompose(L)
    return d, eigendecompose(d.basis.conj().T)


def test_power_branches():
    np.testing.assert_array_equal(fractional_power([0.0, 2.0], 0.0), [1, 1])
    np.testing.assert_allclose(fractional_power([0.0, 2.0], 0.5), [0, np.sqrt(2)])
    assert fractional_power([-1.0], 0.5)[0] == pytest.approx(1j)
    assert fractional_power([complex(-1.0, -1e-17)], 0.5)[0] == pytest.approx(1j)
    assert fractional_power([-1e-16], 0.3)[0] == 0


class TestFractionalTransform:
    def test_endpoints(self, rng):
        d, fd = fourier_decomp(laplacian(random_graph(rng, 12)))
        assert np.array_equal(fractional_transform(fd, 0).transform, np.eye(12))
        assert np.abs(fractional_transform(fd, 1).transform - d.basis.conj().T).max() < 1e-9

    def test_endpoint_one_computed(self, rng):
        # without the stored operator the a=1 matrix comes from the eigendecomposition
        d, fd = fourier_decomp(laplacian(random_graph(rng, 12)))
        from fractv.graph import SpectralDecomposition
        bare = SpectralDecomposition(fd.basis, fd.eigenvalues)
        assert np.abs(fractional_transform(bare, 1).transform - d.basis.conj().T).max() < 1e-9

    def test_half_squared(self, rng):
        for L in (laplacian(random_graph(rng, 10)), cycle_laplacian(7)):
            d, fd = fourier_decomp(L)
            half = fractional_transform(fd, 0.5).transform
            assert np.abs(half @ half - d.basis.conj().T).max() < 1e-8

    @pytest.mark.parametrize("a", [-0.1, 1.5])
    def test_order_range(self, rng, a):
        _, fd = fourier_decomp(laplacian(random_graph(rng, 5)))
        with pytest.raises(InvalidParameterError):
            fractional_transform(fd, a)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(3, 32), st.integers(1, 16), st.integers(0, 2**32 - 1))
    def test_semigroup_and_inverse(self, n, t, seed):
        rng = np.random.default_rng(seed)
        for fam in (FractionalFamily(eigendecompose(laplacian(random_graph(rng, n)))),
                    FractionalFamily(eigendecompose(cycle_laplacian(t)))):
            a = rng.uniform(0, 1)
            b = rng.uniform(0, 1 - a)
            Fa, Fb, Fab = (fam.basis(x).transform for x in (a, b, a + b))
            assert np.abs(Fa @ Fb - Fab).max() < 1e-8
            assert np.abs(Fa.conj().T @ Fa - np.eye(fam.size)).max() < 1e-8


class TestGfso:
    @settings(max_examples=10, deadline=None)
    @given(st.integers(2, 32), st.integers(1, 16), st.integers(0, 2**32 - 1))
    def test_endpoint_reductions(self, n, t, seed):
        rng = np.random.default_rng(seed)
        for L in (laplacian(random_graph(rng, n)), cycle_laplacian(t)):
            d = eigendecompose(L)
            assert np.abs(gfso(d, 1) - L).max() < 1e-8
            assert np.abs(gfso(d, 0) - np.eye(len(L))).max() < 1e-12

    def test_two_path_half(self):
        d = eigendecompose(laplacian(path_graph(2)))
        w = np.sort(np.linalg.eigvals(gfso(d, 0.5)).real)
        np.testing.assert_allclose(w, [0, np.sqrt(2)], atol=1e-12)

    def test_literal_orientation(self, rng):
        L = laplacian(random_graph(rng, 6))
        d = eigendecompose(L)
        U = d.basis
        assert np.abs(gfso(d, 1, literal=True) - U.conj().T @ np.diag(d.eigenvalues) @ U).max() < 1e-9

    def test_diagonalized_by_fractional_basis(self, rng):
        fam = FractionalFamily(eigendecompose(cycle_laplacian(5)))
        b = fam.basis(0.4)
        L = fam.shift_operator(0.4)
        D = b.transform @ L @ b.transform.conj().T
        np.testing.assert_allclose(D, np.diag(b.frac_eigenvalues), atol=1e-12)


class TestJfrft:
    def setup_family(self, rng, n, t):
        return (FractionalFamily(eigendecompose(cycle_laplacian(t))),
                FractionalFamily(eigendecompose(laplacian(random_graph(rng, n)))))

    def test_reduces_to_jft_and_identity(self, rng):
        fT, fG = self.setup_family(rng, 6, 4)
        V = jfrft(fT.basis(1), fG.basis(1)).joint_transform
        assert np.abs(V - jft_matrix(fG.shift.basis, fT.shift.basis)).max() < 1e-9
        assert np.abs(jfrft(fT.basis(0), fG.basis(0)).joint_transform - np.eye(24)).max() < 1e-9

    def test_unitary(self, rng):
        fT, fG = self.setup_family(rng, 6, 4)
        V = jfrft(fT.basis(0.3), fG.basis(0.7)).joint_transform
        assert np.abs(V @ V.conj().T - np.eye(24)).max() < 1e-8

    def test_factored_forward_matches_dense(self, rng):
        fT, fG = self.setup_family(rng, 5, 3)
        J = jfrft(fT.basis(0.6), fG.basis(0.2))
        X = rng.standard_normal((5, 3))
        np.testing.assert_allclose(J.forward(X).reshape(-1, order="F"), J.joint_transform @ X.reshape(-1, order="F"),
                                   atol=1e-12)
        np.testing.assert_allclose(J.inverse(J.forward(X)), X, atol=1e-12)

    def test_parseval(self, rng):
        fT, fG = self.setup_family(rng, 9, 7)
        J = jfrft(fT.basis(0.45), fG.basis(0.85))
        X = rng.standard_normal((9, 7))
        assert np.linalg.norm(J.forward(X)) == pytest.approx(np.linalg.norm(X), rel=1e-9)

    def test_joint_shifts_literal_basis_diagonalizes(self, rng):
        fT, fG = self.setup_family(rng, 5, 4)
        js = joint_shifts(fT, fG, 0.5, 0.5, literal=True)
        D = js.basis.graph @ js.L_G @ js.basis.graph.conj().T
        np.testing.assert_allclose(D, np.diag(js.eigs_G), atol=1e-12)


class TestNormalize:
    def test_halves(self):
        L, e = normalize_energy_preserving(np.eye(2) * 2, np.array([0.0, 2.0]))
        np.testing.assert_array_equal(e, [0, 1])
        np.testing.assert_array_equal(L, np.eye(2))

    def test_idempotent(self):
        e = np.array([0.5, 1.0, -1.0])
        L, e2 = normalize_energy_preserving(np.diag(e), e)
        np.testing.assert_array_equal(e2, e)

    def test_cycle(self):
        d = eigendecompose(cycle_laplacian(4))
        L, e = normalize_energy_preserving(cycle_laplacian(4), d.eigenvalues)
        np.testing.assert_allclose(e, np.array([0, 1 - 1j, 1 + 1j, 2]) / 2, atol=1e-15)

    def test_zero_spectrum_unchanged(self):
        L, e = normalize_energy_preserving(np.zeros((2, 2)), np.zeros(2))
        assert not np.any(L) and not np.any(e)

    def test_commutes_with_original(self, rng):
        fam = FractionalFamily(eigendecompose(laplacian(random_graph(rng, 10))))
        b = fam.basis(0.3)
        L = fam.shift_operator(0.3)
        Ln, _ = normalize_energy_preserving(L, b.frac_eigenvalues)
        assert np.abs(Ln @ L - L @ Ln).max() < 1e-8
