import dataclasses
import enum
import faulthandler
import multiprocessing as mp
import pickle
import queue
import signal
import sys
import time
import traceback
from typing import Any, Dict, Hashable, Iterator, List, Optional, Sequence, Tuple, Type

from contextlog import get_logger

from hkcalc.errors import HKError
from hkcalc.lib import catch_ctrl_c


class PoolWorkerTaskType(enum.Enum):
    INVOKE = "invoke"
    STOP = "stop"


@dataclasses.dataclass(frozen=True)
class PoolWorkerTask:
    type: PoolWorkerTaskType
    payload: Optional[Any] = None


class PickleSafeException(Exception):
    """An exception that can be safely pickled and passed between processes."""

    def __init__(self, orig_exc_cls: Type[Exception], orig_exc_msg: str, task: str, formatted_output: str) -> None:
        self.orig_exc_cls = orig_exc_cls
        self.orig_exc_msg = orig_exc_msg
        self.task = task
        self.formatted_output = formatted_output
        super().__init__(orig_exc_cls, orig_exc_msg, task, formatted_output)

    def __repr__(self) -> str:
        return f"PickleSafeException<{self.orig_exc_cls.__name__}({self.orig_exc_msg!r})>"

    def __str__(self) -> str:
        return f"An exception for task {self.task}:\n{self.formatted_output}"

    @staticmethod
    def from_exc(orig_exc: Exception, task: Any, formatted_output: str) -> "PickleSafeException":
        return PickleSafeException(orig_exc.__class__, str(orig_exc), str(task), formatted_output)


class TaskResult:
    def __init__(self, worker_name, task, result=None, exc=None):
        self.worker_name = worker_name
        self.task = task
        self.result = result
        self.exc = exc
        self.extra = {}

    def __repr__(self):
        return "TaskResult(worker_name=%s, task=%s, result=%s, exc=%s, extra=%s)" % (
            self.worker_name, self.task, self.result, self.exc, self.extra)


@catch_ctrl_c
def pool_worker(pool, index, task_queue, done_queue):
    faulthandler.register(signal.SIGUSR1)
    _logger = get_logger(worker=index)
    tasks_done = 0
    worker_name = mp.current_process().name

    while True:
        task: PoolWorkerTask = task_queue.get()
        if task.type == PoolWorkerTaskType.STOP:
            _logger.debug("I received STOP, terminating...")
            return

        task_result = TaskResult(worker_name, task.payload)
        task_result.extra["start_time"] = time.monotonic()
        ret_exc = None
        try:
            _logger.debug("Worker-%d start task %s", index, task.payload)
            task_result.result = pool.func(task.payload, *pool.args, **pool.kwargs)
            # an unpicklable result would otherwise blow up inside multiprocessing
            pickle.dumps(task_result.result)
        except KeyboardInterrupt:  # pylint: disable=try-except-raise
            raise
        except Exception as exc:
            ret_exc = PickleSafeException.from_exc(exc, task.payload, traceback.format_exc())
            task_result.exc = ret_exc
            task_result.result = None
        task_result.extra["duration"] = time.monotonic() - task_result.extra["start_time"]
        done_queue.put((worker_name, task_result, ret_exc))

        tasks_done += 1
        if pool.max_tasks and tasks_done >= pool.max_tasks:
            _logger.debug("Maximum tasks limit reached. Now I can retire")
            sys.exit(9)


class Parallel:
    """Runs func(task, *args, **kwargs) for every task, inline or in a process pool"""

    def __init__(self, func, *args, **kwargs):
        self.func = func
        self.args = args
        self.kwargs = kwargs
        self.parallel = mp.cpu_count()
        self.task_timeout = 1800  # maximum seconds to wait for next task done
        self.max_tasks = 0
        self.tasks_done = 0

    def tune(self, **kwargs):
        for (kw, arg) in kwargs.items():
            if not hasattr(self, kw):
                raise ValueError("Can not tune Parallel.%s: attribute doesn't exist" % kw)
            setattr(self, kw, arg)
        return self

    def run(self, tasks: Sequence[Hashable], tolerate_fails=True) -> Tuple[Dict[Any, Any], Dict[Any, Exception]]:
        success, fail = {}, {}
        for task_result in self.irun(tasks, tolerate_fails):
            if task_result.exc is not None:
                fail[task_result.task] = task_result.exc
            else:
                success[task_result.task] = task_result.result
        return success, fail

    def irun(self, tasks: Sequence[Hashable], tolerate_fails=True) -> Iterator[TaskResult]:
        _logger = get_logger()
        self.tasks_done = 0
        pool_size = min(max(1, self.parallel), len(tasks))
        if pool_size == 0:
            return

        # single process way
        if pool_size == 1:
            worker_name = mp.current_process().name
            for task in tasks:
                task_result = TaskResult(worker_name, task)
                task_result.extra["start_time"] = time.monotonic()
                try:
                    task_result.result = self.func(task, *self.args, **self.kwargs)
                except Exception as exc:
                    if not tolerate_fails:
                        raise
                    exc.formatted_output = traceback.format_exc()
                    task_result.exc = exc
                task_result.extra["duration"] = time.monotonic() - task_result.extra["start_time"]
                self.tasks_done += 1
                yield task_result
            return

        # multiple processes way
        _logger.info("creating process pool with %d workers for %d tasks", pool_size, len(tasks))
        task_queue = mp.Queue()
        done_queue = mp.Queue()
        for task in tasks:
            task_queue.put(PoolWorkerTask(type=PoolWorkerTaskType.INVOKE, payload=task))

        pool = {}
        for index in range(pool_size):
            task_queue.put(PoolWorkerTask(type=PoolWorkerTaskType.STOP))
        for index in range(pool_size):
            worker_name = "Worker-%d" % index
            pool[worker_name] = self._start_worker(worker_name, index, task_queue, done_queue)
            _logger.debug("Worker '%s' has been created with PID %d", worker_name, pool[worker_name].pid)

        last_task_ts = time.monotonic()
        while True:
            exc = None
            task_result = None
            try:
                _, task_result, exc = done_queue.get(True, 1)
                last_task_ts = time.monotonic()
            except queue.Empty:
                pass

            retired_workers, failed_workers = self._check_children(pool)

            terminate_exc = None
            if task_result is None and time.monotonic() - last_task_ts > self.task_timeout:
                terminate_exc = HKError("no task finished within %d seconds" % self.task_timeout)
            if not tolerate_fails:
                if exc is not None:
                    terminate_exc = exc
                elif failed_workers:
                    terminate_exc = HKError(f"Workers {failed_workers} exited with error")

            if terminate_exc is not None:
                for (name, worker) in pool.items():
                    if worker.exitcode is None:
                        worker.terminate()
                        _logger.warning("Worker '%s' (PID: %d) has been terminated", name, worker.pid)
                    worker.join()
                raise terminate_exc

            if task_result is not None:
                self.tasks_done += 1
                yield task_result

            # drain results of workers that already exited
            if not pool and (self.tasks_done >= len(tasks) or task_result is None):
                break

            for name in retired_workers:
                _logger.debug("Worker '%s' has retired. Restart it", name)
                pool[name] = self._start_worker(name, int(name.split("-")[1]), task_queue, done_queue)
        task_queue.close()
        done_queue.close()

    def _start_worker(self, name, index, task_queue, done_queue) -> mp.Process:
        worker = mp.Process(name=name, target=pool_worker, args=(self, index, task_queue, done_queue))
        worker.start()
        return worker

    def _check_children(self, pool) -> Tuple[List[str], List[str]]:
        _logger = get_logger()
        retired_workers = []
        failed_workers = []
        for name in list(pool.keys()):
            exitcode = pool[name].exitcode
            if exitcode is None:
                continue
            if exitcode == 9:
                retired_workers.append(name)
            elif exitcode != 0:
                _logger.error("Worker '%s' (PID: %d) has exited with non-zero exit code %d", name, pool[name].pid,
                              exitcode)
                failed_workers.append(name)
            else:
                _logger.debug("Worker '%s' (PID: %d) has been reaped with exitcode %d", name, pool[name].pid, exitcode)
            pool[name].join()
            if exitcode != 9:
                del pool[name]
        return retired_workers, failed_workers

