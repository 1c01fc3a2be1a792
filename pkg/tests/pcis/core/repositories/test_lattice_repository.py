"""
Lattice Repository Unit Tests.
"""

import numpy as np
import pytest

from src.pcis.constants import DatasetTag
from src.pcis.core.exceptions import DatasetParseError, GridMismatchError
from src.pcis.core.repositories import LatticeRepository
from src.pcis.core.repositories.lattice_repository import decode_action_set, encode_action_set
from src.pcis.core.schema.features import StateBox
from src.pcis.core.schema.lattice import LatticeMask
from src.pcis.services.feature_service import OneHotFeatureMap
from src.pcis.services.lattice_service import LatticeService
from src.pcis.services.operator_service import PcisOperatorService
from src.pcis.services.oracle_service import OracleService


@pytest.fixture
def fixture_result(fixture_model, fixture_params, rng):
    """
    Fixture containing a ConInv result and a certification outcome on the 4-state model.
    """
    grid = LatticeService.tabular_grid(fixture_model.state_count)
    operator = PcisOperatorService(OneHotFeatureMap(4, 2), grid, fixture_params)
    grow = OracleService.sample_transitions(fixture_model, 20_000, rng, DatasetTag.GROW)
    mask, result = operator.con_inv(grow, LatticeMask.full(grid))
    cert = OracleService.sample_transitions(fixture_model, 20_000, rng, DatasetTag.CERTIFICATION)
    return mask, result, operator.certify_shield(cert, mask)


class TestActionSetEncoding:
    def test_bitmask(self):
        assert encode_action_set(np.array([True, False, True])) == 5
        assert encode_action_set(np.zeros(3, dtype=bool)) == 0
        np.testing.assert_array_equal(decode_action_set(6, 3), [False, True, True])


class TestMasks:
    def test_save_and_load_mask(self, tmp_path, mc_grid, rng):
        """
        Test that a mask written on the MountainCar lattice loads back on the same lattice.
        :param tmp_path: pytest temporary directory.
        :param mc_grid: MountainCar lattice fixture.
        """
        repository = LatticeRepository(tmp_path)
        mask = LatticeMask(grid=mc_grid, bits=rng.random(mc_grid.size) < 0.3)
        path = repository.save(mask, repository.path("mask.csv"), "abc", 0)
        assert repository.load(path, mc_grid).equals(mask)

    def test_rewrite_is_byte_identical(self, tmp_path, mc_grid):
        repository = LatticeRepository(tmp_path)
        mask = LatticeService.box_mask(mc_grid, (-0.7, -0.02), (-0.3, 0.02))
        first = repository.save(mask, tmp_path / "first.csv", "abc", 0)
        second = repository.save(repository.load(first, mc_grid), tmp_path / "second.csv", "abc", 0)
        assert first.read_bytes() == second.read_bytes()

    def test_rejects_mask_of_other_size(self, tmp_path, mc_grid):
        repository = LatticeRepository(tmp_path)
        small = LatticeService.build_grid(mc_grid.box, (20, 30))
        path = repository.save(LatticeMask.full(small), tmp_path / "mask.csv", "abc", 0)
        with pytest.raises(GridMismatchError):
            repository.load(path, mc_grid)

    def test_rejects_mask_on_other_box(self, tmp_path, mc_grid):
        """
        Test that a mask of the right size but with other point coordinates is rejected.
        """
        repository = LatticeRepository(tmp_path)
        box = StateBox(lower=(-1.2, -0.07), upper=(0.6, 0.07))
        other = LatticeService.build_grid(box, (200, 30))
        path = repository.save(LatticeMask.full(other), tmp_path / "mask.csv", "abc", 0)
        with pytest.raises(GridMismatchError, match="not lattice point 0"):
            repository.load(path, mc_grid)

    def test_bad_member_flag_reports_line(self, tmp_path):
        grid = LatticeService.tabular_grid(2)
        path = tmp_path / "mask.csv"
        path.write_text(
            "# schema=pcis-mask/v1 config_hash=abc seed=0\nindex,x_0,member\n0,0.0,1\n1,1.0,yes\n"
        )
        with pytest.raises(DatasetParseError) as exc_info:
            LatticeRepository(tmp_path).load(path, grid)
        assert exc_info.value.line_number == 4

    def test_empty_file_is_empty_mask(self, tmp_path):
        grid = LatticeService.tabular_grid(3)
        path = tmp_path / "mask.csv"
        path.write_text("")
        assert LatticeRepository(tmp_path).load(path, grid).is_empty()


class TestOperatorArtifacts:
    def test_action_maps_reload(self, tmp_path, fixture_result):
        """
        Test that the stored action maps of omega reload exactly and that points outside
        omega have no safe action.
        :param fixture_result: ConInv result fixture.
        """
        mask, result, _ = fixture_result
        repository = LatticeRepository(tmp_path)
        path = repository.save_operator_result(result, tmp_path / "maps.csv", "abc", 0)
        action_sets = repository.load_action_maps(path, mask.grid, result.horizon, 2)

        members = result.omega.indices
        np.testing.assert_array_equal(action_sets[:, members], result.action_sets[:, members])
        assert not action_sets[:, ~result.omega.bits].any()

    def test_value_table_has_one_column_per_stage(self, tmp_path, fixture_result):
        _, result, _ = fixture_result
        repository = LatticeRepository(tmp_path)
        path = repository.save_value_table(result.value_table, tmp_path / "values.csv", "a", 0)
        header, columns = path.read_text().splitlines()[:2]
        assert header.startswith("# schema=pcis-values/v1")
        assert columns == "index,x_0,value_0,value_1,value_2"

    def test_verdict(self, tmp_path, fixture_result):
        mask, _, outcome = fixture_result
        repository = LatticeRepository(tmp_path)
        path = repository.save_verdict(outcome, tmp_path / "verdict.csv", "abc", 0)
        assert repository.load_verdict(path) == outcome.accepted

    def test_action_maps_reject_out_of_range_rows(self, tmp_path):
        grid = LatticeService.tabular_grid(2)
        path = tmp_path / "maps.csv"
        path.write_text(
            "# schema=pcis-operator/v1 config_hash=abc seed=0\n"
            "stage,index,x_0,value,action_mask,continuation\n"
            "0,5,5.0,1.0,1,0\n"
        )
        with pytest.raises(DatasetParseError):
            LatticeRepository(tmp_path).load_action_maps(path, grid, 1, 2)
