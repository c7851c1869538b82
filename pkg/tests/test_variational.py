"""Solver-side checks: Sobel tangents, target assembly, the energy and
its gradient, and the masked minimization itself."""

import math

import numpy as np
import pytest

from conftest import ang_dist, dense_minimizer, grid_field
from polyfield.dataset import sample_scene
from polyfield.geometry import LineSegment, Scene
from polyfield.polyvector import PolyVectorField, decode, smoothness_energy
from polyfield.raster import RasterImage, mask, rasterize
from polyfield.variational import (
    SolveConfig,
    SolveResult,
    build_target,
    energy,
    energy_gradient,
    sobel_tangent,
    solve,
)


def horizontal_stripe():
    # stroke at y = 8.25 with width 1.5 lands intensities 0.5 / 1.0 / 0.0
    # on rows 7 / 8 / 9; every column identical, so the Sobel x response
    # cancels exactly
    scene = Scene(16, 16, (LineSegment((-2.0, 8.25), (18.0, 8.25)),))
    return rasterize(scene, stroke_width=1.5)


class TestSobelTangent:
    def test_horizontal_stroke_angles_exact(self):
        image = horizontal_stripe()
        rows = image.pixels[:, 3]
        assert rows[7] == 0.5 and rows[8] == 1.0 and rows[9] == 0.0

        angles, confident = sobel_tangent(image)
        expected_conf = np.zeros((16, 16), dtype=bool)
        expected_conf[6:10, :] = True
        assert np.array_equal(confident, expected_conf)
        assert np.all(angles[confident] == 0.0)

    def test_vertical_stroke_angles(self):
        scene = Scene(16, 16, (LineSegment((8.25, -2.0), (8.25, 18.0)),))
        image = rasterize(scene, stroke_width=1.5)
        angles, confident = sobel_tangent(image)
        expected_conf = np.zeros((16, 16), dtype=bool)
        expected_conf[:, 6:10] = True
        assert np.array_equal(confident, expected_conf)
        assert np.allclose(angles[confident], math.pi / 2.0, atol=1e-12)

    def test_constant_image_unconfident(self):
        image = RasterImage(12, 12, np.full((12, 12), 0.3))
        angles, confident = sobel_tangent(image)
        assert not confident.any()
        assert angles.shape == (12, 12)

    def test_angles_live_in_half_turn(self):
        rng = np.random.default_rng(5)
        image = RasterImage(20, 20, rng.uniform(0.0, 1.0, (20, 20)))
        angles, confident = sobel_tangent(image)
        assert np.all(angles >= 0.0) and np.all(angles < math.pi)
        assert confident.any()


class TestBuildTarget:
    def test_horizontal_stroke_target(self):
        image = horizontal_stripe()
        config = SolveConfig(sigma=0.0)
        target, weights = build_target(image, config)

        support = mask(image, 0.5)  # rows 7 and 8, all confident
        assert np.array_equal(target.mask, support)
        assert np.array_equal(weights, support.astype(float))

        expected = np.array([-1.0, 0.0, 0.0, 0.0])
        assert np.allclose(target.channels[support], expected, atol=1e-12)
        assert np.all(target.channels[~support] == 0.0)

    def test_smoothing_keeps_constant_target(self):
        image = horizontal_stripe()
        target, _ = build_target(image, SolveConfig(sigma=1.0))
        expected = np.array([-1.0, 0.0, 0.0, 0.0])
        assert np.allclose(target.channels[target.mask], expected, atol=1e-12)

    def test_unconfident_interior_gets_zero_weight(self):
        # a thick blob has interior pixels with no gradient at all
        pix = np.zeros((16, 16))
        pix[4:12, 4:12] = 1.0
        image = RasterImage(16, 16, pix)
        target, weights = build_target(image, SolveConfig(sigma=0.0))
        assert weights[8, 8] == 0.0
        assert not target.mask[8, 8]
        assert weights[4, 8] == 1.0


class TestEnergy:
    def test_matching_constant_field_is_zero(self):
        f = grid_field(np.tile([0.2, -0.1, 0.4, 0.0], (5, 5, 1)))
        w = np.ones((5, 5))
        assert energy(f, f, w, 0.7) == 0.0

    def test_two_pixel_hand_case(self):
        target = grid_field(np.tile([-1.0, 0.0, 0.0, 0.0], (1, 2, 1)))
        ch = target.channels.copy()
        ch[0, 1] = 0.0
        f = PolyVectorField(ch, target.mask)
        w = np.ones((1, 2))
        assert energy(f, target, w, 0.0) == 1.0
        # one unit of misfit plus one unit of jump
        assert energy(f, target, w, 0.1) == 1.0 + 0.1

    def test_matching_field_reduces_to_smoothness_term(self):
        rng = np.random.default_rng(8)
        f = grid_field(rng.normal(size=(6, 6, 4)))
        w = rng.uniform(0.0, 2.0, (6, 6))
        e = energy(f, f, w, 0.3)
        assert e == pytest.approx(0.3 * smoothness_energy(f), rel=1e-15)

    def test_dimension_mismatch_raises(self):
        a = grid_field(np.zeros((3, 3, 4)))
        b = grid_field(np.zeros((4, 4, 4)))
        with pytest.raises(ValueError):
            energy(a, b, np.ones((3, 3)), 0.1)
        with pytest.raises(ValueError):
            energy(a, a, np.ones((4, 3)), 0.1)
        with pytest.raises(ValueError):
            energy_gradient(a, b, np.ones((3, 3)), 0.1)


class TestEnergyGradient:
    def test_matches_central_differences(self):
        rng = np.random.default_rng(13)
        m = rng.uniform(size=(8, 8)) < 0.7
        m[3, 3] = True
        vals = np.where(m[..., None], rng.normal(size=(8, 8, 4)), 0.0)
        tvals = np.where(m[..., None], rng.normal(size=(8, 8, 4)), 0.0)
        f = PolyVectorField(vals, m)
        t = PolyVectorField(tvals, m)
        w = np.where(m, rng.uniform(0.0, 2.0, (8, 8)), 0.0)
        gamma = 0.35

        g = energy_gradient(f, t, w, gamma)
        assert np.all(g[~m] == 0.0)

        h = 1e-4
        fd = np.zeros_like(g)
        for r, c in zip(*np.nonzero(m)):
            for k in range(4):
                up = vals.copy()
                up[r, c, k] += h
                dn = vals.copy()
                dn[r, c, k] -= h
                e_up = energy(PolyVectorField(up, m), t, w, gamma)
                e_dn = energy(PolyVectorField(dn, m), t, w, gamma)
                fd[r, c, k] = (e_up - e_dn) / (2.0 * h)
        rel = np.max(np.abs(g - fd)) / (1e-12 + np.max(np.abs(g)))
        assert rel < 1e-5

    def test_zero_gamma_gradient_is_pure_misfit(self):
        rng = np.random.default_rng(14)
        f = grid_field(rng.normal(size=(5, 5, 4)))
        t = grid_field(rng.normal(size=(5, 5, 4)))
        w = rng.uniform(0.5, 1.5, (5, 5))
        g = energy_gradient(f, t, w, 0.0)
        assert np.allclose(g, 2.0 * w[..., None] * (f.channels - t.channels))


def block_image():
    pix = np.zeros((8, 8))
    pix[2:5, 2:6] = 1.0  # 12-pixel rectangle
    return RasterImage(8, 8, pix)


def elbow_image():
    pix = np.zeros((8, 8))
    pix[2:6, 2] = 1.0
    pix[5, 2:6] = 1.0  # 7 + 3 = 10-pixel elbow
    return RasterImage(8, 8, pix)


class TestSolve:
    def test_zero_gamma_returns_target_exactly(self):
        image = horizontal_stripe()
        config = SolveConfig(gamma=0.0, sigma=0.0)
        target, _ = build_target(image, config)
        result = solve(image, config)
        assert result.iterations == 0
        assert len(result.energies) == 1
        assert result.energies[0] == 0.0
        assert np.array_equal(result.field.channels, target.channels)
        assert np.array_equal(result.field.mask, mask(image, 0.5))

    def test_empty_mask_raises(self):
        image = RasterImage(8, 8, np.zeros((8, 8)))
        with pytest.raises(ValueError):
            solve(image)

    def test_energy_trace_is_monotone_on_random_scenes(self):
        for index in range(6):
            scene = sample_scene(900, index)
            image = rasterize(scene)
            result = solve(image)
            trace = np.array(result.energies)
            assert np.all(np.diff(trace) <= 0.0)
            assert result.gradient_norm <= 1e-6 * (1.0 + trace[-1]) or (
                result.iterations == 500
            )

    def test_deterministic(self):
        image = block_image()
        a = solve(image)
        b = solve(image)
        assert np.array_equal(a.field.channels, b.field.channels)
        assert a.energies == b.energies

    def test_matches_dense_solve_on_block(self):
        image = block_image()
        config = SolveConfig(sigma=0.0, tol=1e-14, max_iters=5000)
        result = solve(image, config)
        exact = dense_minimizer(image, config)
        diff = np.abs(result.field.channels - exact.channels)
        assert diff.max() < 1e-6

    def test_matches_dense_solve_on_elbow(self):
        image = elbow_image()
        config = SolveConfig(tol=1e-14, max_iters=5000)  # default smoothing
        result = solve(image, config)
        exact = dense_minimizer(image, config)
        assert np.abs(result.field.channels - exact.channels).max() < 1e-6

    def test_large_gamma_kills_the_smoothness_residual(self):
        # the penalty squares the sum of the right and down differences,
        # so a huge gamma drives that combination to zero; the field can
        # still vary along directions the operator cannot see
        from polyfield.geometry import Arc
        from polyfield.variational import _grad_op, _neighbor_ok

        scene = Scene(64, 64, (Arc((32.5, 32.5), 20.0, 0.0, math.pi / 2.0),))
        image = rasterize(scene)
        config = SolveConfig(gamma=1e6, max_iters=4000, tol=1e-14)
        result = solve(image, config)
        right_ok, down_ok = _neighbor_ok(result.field.mask)
        residual = float(
            np.sum(_grad_op(result.field.channels, right_ok, down_ok) ** 2)
        )
        assert residual <= 1e-5
        assert result.energies[-1] <= result.energies[0]

    def test_single_segment_recovers_tangent_interior(self):
        scene = Scene(64, 64, (LineSegment((6.0, 32.5), (58.0, 32.5)),))
        image = rasterize(scene)
        result = solve(image)
        cols = np.arange(12, 53)
        c0 = result.field.c0()[32, cols]
        c2 = result.field.c2()[32, cols]
        a, b = decode(c0, c2)
        err = np.minimum(ang_dist(a, 0.0), ang_dist(b, 0.0))
        assert err.max() < math.radians(2.0)
        assert err.max() < 1e-3  # regression margin, measured ~6e-5

    def test_result_shape(self):
        image = block_image()
        result = solve(image)
        assert isinstance(result, SolveResult)
        assert isinstance(result.energies, tuple)
        assert result.gradient_norm >= 0.0
        assert result.iterations == len(result.energies) - 1
