import pytest

from classifier.process_pool import ProcessPool
from utils.exceptions import ProcessError
from utils.utils import accuracy

JOBS = [([1, 2, 3], [1, 2, 3]), ([1, 1, 1], [1, 2, 2]), ([2, 2], [1, 2])]


class TestProcessPool:

    def test_inline_map_keeps_order(self):
        with ProcessPool() as pool:
            assert pool.map(accuracy, JOBS) == [1.0, 1 / 3, 0.5]

    def test_worker_map_matches_inline(self):
        with ProcessPool(max_processes=2) as pool:
            assert pool.map(accuracy, JOBS) == [1.0, 1 / 3, 0.5]

    def test_original_exception_is_raised(self):
        with ProcessPool() as pool:
            with pytest.raises(ValueError):
                pool.map(accuracy, JOBS + [([1, 2], [1])])

    def test_every_failed_trial_is_logged(self, caplog):
        with ProcessPool() as pool:
            with pytest.raises(ValueError):
                pool.map(accuracy, [([1, 2], [1]), ([1], [1]), ([1], [1, 2])])
        failures = [r.getMessage() for r in caplog.records if r.levelname == "ERROR"]
        assert len(failures) == 2
        assert failures[0].startswith("Trial 0 failed") and failures[1].startswith("Trial 2 failed")

    def test_status_lookup(self):
        pool = ProcessPool()
        ok = pool.submit(accuracy, ([1], [1]))
        bad = pool.submit(accuracy, ([1, 2], [1]))
        assert pool.get_process_status(ok) == "completed"
        assert pool.get_process_result(ok) == 1.0
        assert pool.get_process_status(bad) == "failed"
        assert "Shape mismatch" in pool.get_process_error(bad)
        assert pool.get_process_status("missing") == "not_found"
        pool.cleanup()
        assert pool.get_process_status(ok) == "not_found"

    def test_invalid_size(self):
        with pytest.raises(ProcessError):
            ProcessPool(max_processes=0)
