from concurrent.futures import Future, ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence
import uuid

from utils.logger import Logger
from utils.exceptions import ProcessError

logger = Logger.get_logger(__name__)

class ProcessPool:
    """Pool for running independent trials in worker processes"""

    def __init__(self, max_processes: int = 1):
        """Initialize process pool; max_processes=1 runs everything in-process"""
        if max_processes < 1:
            raise ProcessError(f"max_processes must be at least 1, got {max_processes}")
        self.max_processes = max_processes
        self.executor: Optional[ProcessPoolExecutor] = None
        self.futures: Dict[str, Future] = {}
        self.results: Dict[str, Any] = {}
        self.errors: Dict[str, str] = {}
        self.exceptions: Dict[str, BaseException] = {}
        logger.debug(f"Process pool initialized with max_processes={max_processes}")

    def __enter__(self) -> 'ProcessPool':
        return self

    def __exit__(self, *exc):
        self.cleanup()

    def submit(self, target: Callable, args: tuple = ()) -> str:
        """Run target(*args) and return a task ID"""
        task_id = str(uuid.uuid4())
        if self.max_processes == 1:
            self._run_inline(task_id, target, args)
            return task_id
        try:
            if self.executor is None:
                self.executor = ProcessPoolExecutor(max_workers=self.max_processes)
            self.futures[task_id] = self.executor.submit(target, *args)
            logger.debug(f"Submitted task {task_id}")
            return task_id
        except Exception as e:
            logger.error(f"Failed to submit task: {str(e)}", exc_info=True)
            raise ProcessError(str(e))

    def _run_inline(self, task_id: str, target: Callable, args: tuple):
        try:
            self.results[task_id] = target(*args)
        except Exception as e:
            self.errors[task_id] = str(e)
            self.exceptions[task_id] = e
            logger.debug(f"Task {task_id} failed: {str(e)}")

    def _collect(self, task_id: str):
        future = self.futures.pop(task_id, None)
        if future is None:
            return
        try:
            self.results[task_id] = future.result()
        except Exception as e:
            self.errors[task_id] = str(e)
            self.exceptions[task_id] = e
            logger.debug(f"Task {task_id} failed: {str(e)}")

    def get_process_status(self, task_id: str) -> str:
        """Get the status of a task"""
        if task_id in self.errors:
            return "failed"
        if task_id in self.results:
            return "completed"
        future = self.futures.get(task_id)
        if future is None:
            return "not_found"
        if future.done():
            self._collect(task_id)
            return self.get_process_status(task_id)
        return "running"

    def get_process_error(self, task_id: str) -> Optional[str]:
        """Get the error message if the task failed"""
        self._collect(task_id)
        return self.errors.get(task_id)

    def get_process_result(self, task_id: str) -> Any:
        """Wait for a task and return its result"""
        self._collect(task_id)
        return self.results.get(task_id)

    def map(self, target: Callable, arg_list: Sequence[tuple]) -> List[Any]:
        """Run target over every argument tuple; results come back in input order.

        Once all tasks finish, the exception of the first failed task is re-raised.
        """
        task_ids = [self.submit(target, args) for args in arg_list]
        for task_id in task_ids:
            self._collect(task_id)
        failed = [(index, task_id) for index, task_id in enumerate(task_ids)
                  if self.get_process_status(task_id) == "failed"]
        for index, task_id in failed:
            logger.error(f"Trial {index} failed: {self.get_process_error(task_id)}")
        if failed:
            raise self.exceptions[failed[0][1]]
        return [self.results.pop(task_id) for task_id in task_ids]

    def cleanup(self):
        """Cancel pending tasks, shut the workers down and forget all state"""
        for future in self.futures.values():
            future.cancel()
        if self.executor is not None:
            self.executor.shutdown(wait=True)
            self.executor = None
        self.futures.clear()
        self.results.clear()
        self.errors.clear()
        self.exceptions.clear()
        logger.debug("Process pool cleaned up")
