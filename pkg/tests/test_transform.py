import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparsecast.errors import DimensionError
from sparsecast.image import Frame, partition
from sparsecast.transform import (
    CoefficientCube,
    CoefficientGroup,
    dct2,
    dct_cube,
    group,
    idct2,
    idct_cube,
    ungroup,
)

blocks16 = arrays(np.float64, (16, 16), elements=st.floats(-300, 300, allow_nan=False))


class TestDct2:
    def test_constant_block_concentrates_at_dc(self):
        coeffs = dct2(np.full((16, 16), 3.0))
        assert coeffs[0, 0] == pytest.approx(16 * 3.0, rel=1e-12)
        coeffs[0, 0] = 0.0
        assert np.max(np.abs(coeffs)) < 1e-9

    def test_zero_block(self):
        assert np.array_equal(dct2(np.zeros((16, 16))), np.zeros((16, 16)))

    @given(blocks16)
    def test_round_trip(self, block):
        back = idct2(dct2(block))
        assert np.allclose(back, block, rtol=1e-9, atol=1e-9)

    def test_dc_only_inverts_to_constant(self):
        coeffs = np.zeros((16, 16))
        coeffs[0, 0] = 16 * 5.0
        assert np.allclose(idct2(coeffs), np.full((16, 16), 5.0), atol=1e-12)

    @given(blocks16, blocks16)
    def test_idct2_linearity(self, x, y):
        combined = idct2(2.5 * x - 0.5 * y)
        separate = 2.5 * idct2(x) - 0.5 * idct2(y)
        assert np.allclose(combined, separate, rtol=1e-9, atol=1e-9)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            dct2(np.zeros((8, 16)))

    @given(arrays(np.float64, (32, 32), elements=st.floats(0, 255, allow_nan=False)))
    def test_parseval(self, pixels):
        cube = dct_cube(partition(Frame(pixels), 16))
        assert np.sum(cube.values**2) == pytest.approx(np.sum(pixels**2), rel=1e-9)

    def test_cube_matches_per_block_dct(self):
        rng = np.random.default_rng(1)
        grid = partition(Frame(rng.uniform(0, 255, (32, 32))), 16)
        cube = dct_cube(grid)
        for n in range(grid.block_count):
            assert np.allclose(cube.values[:, :, n], dct2(grid.blocks[n]), atol=1e-12)
        back = idct_cube(cube)
        assert np.allclose(back.blocks, grid.blocks, atol=1e-9)


class TestGrouping:
    def test_group_indexing_convention(self):
        values = np.zeros((2, 2, 4))
        values[0, 0] = [0.0, 1.0, 2.0, 3.0]
        groups = group(CoefficientCube(values))
        assert groups[0].frequency_index == 0
        assert np.array_equal(groups[0].values, [0.0, 1.0, 2.0, 3.0])

    def test_identical_blocks_give_constant_groups(self):
        rng = np.random.default_rng(2)
        block = rng.uniform(-10, 10, (4, 4))
        cube = CoefficientCube(np.repeat(block[:, :, None], 5, axis=2))
        for g in group(cube):
            assert np.ptp(g.values) == 0.0

    @given(arrays(np.float64, (4, 4, 6), elements=st.floats(-100, 100, allow_nan=False)))
    def test_group_ungroup_round_trip(self, values):
        cube = CoefficientCube(values)
        assert np.array_equal(ungroup(group(cube)).values, cube.values)

    @given(arrays(np.float64, (16, 6), elements=st.floats(-100, 100, allow_nan=False)))
    def test_ungroup_group_round_trip(self, flat):
        groups = [CoefficientGroup(j, flat[j]) for j in range(16)]
        back = group(ungroup(groups))
        for j in range(16):
            assert np.array_equal(back[j].values, flat[j])

    def test_ungroup_rejects_ragged_groups(self):
        groups = [CoefficientGroup(0, np.zeros(4)), CoefficientGroup(1, np.zeros(5))]
        with pytest.raises(DimensionError):
            ungroup(groups + [CoefficientGroup(j, np.zeros(4)) for j in (2, 3)])


class TestGroupStatistics:
    def test_sparsity_is_exact_nonzero_count(self):
        g = CoefficientGroup(0, np.array([0.0, 1e-300, -2.0, 0.0]))
        assert g.sparsity == 2

    def test_population_variance(self):
        g = CoefficientGroup(0, np.array([1.0, 3.0]))
        assert g.mean == 2.0
        assert g.variance == 1.0  # divide by N, not N-1

    @given(arrays(np.float64, (32,), elements=st.floats(-1e3, 1e3, allow_nan=False)))
    def test_mean_removal_centers(self, values):
        g = CoefficientGroup(0, values)
        centered = g.values - g.mean
        bound = 1e-12 * max(np.max(np.abs(values)), 1.0)
        assert abs(centered.mean()) <= bound

    def test_scene_energy_concentrates_at_dc(self, scene):
        groups = group(dct_cube(partition(scene, 16)))
        variances = [g.variance for g in groups]
        assert int(np.argmax(variances)) == 0
