"""
Task engine for batches of independent experiment runs.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Optional, Tuple

from loguru import logger


class TaskStatus(Enum):
    """Task execution status."""
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class Task:
    """One unit of work; action must be a module-level function for process pools."""
    name: str
    action: Callable
    args: Tuple[Any, ...] = ()
    status: TaskStatus = TaskStatus.PENDING
    result: Any = None
    error: Optional[str] = None
    error_type: Optional[str] = None


@dataclass
class Workflow:
    """An ordered batch of independent tasks."""
    name: str
    description: str = ""
    tasks: Dict[str, Task] = field(default_factory=dict)

    def add_task(self, name: str, action: Callable, *args: Any) -> None:
        """
        Add a task to the workflow.

        Args:
            name: Unique task name
            action: Function to execute
            *args: Positional arguments passed to action
        """
        if name in self.tasks:
            raise ValueError(f"Duplicate task name: {name}")
        self.tasks[name] = Task(name=name, action=action, args=args)

    def get_task(self, name: str) -> Optional[Task]:
        """Get a task by name."""
        return self.tasks.get(name)

    def __len__(self) -> int:
        return len(self.tasks)


class WorkflowEngine:
    """Runs workflows sequentially or on a process pool."""

    def __init__(self, max_workers: int = 1):
        """
        Initialize workflow engine.

        Args:
            max_workers: Worker processes; 1 or less runs tasks in-process
        """
        self.max_workers = max(1, int(max_workers))
        self.workflows: Dict[str, Workflow] = {}
        logger.debug(f"Workflow engine initialized with {self.max_workers} worker(s)")

    def register_workflow(self, workflow: Workflow) -> None:
        """Register a workflow under its name."""
        self.workflows[workflow.name] = workflow
        logger.debug(f"Registered workflow: {workflow.name} ({len(workflow)} tasks)")

    def execute_workflow(self, workflow_name: str) -> Dict[str, Dict[str, Any]]:
        """
        Execute a registered workflow.

        A failing task is recorded with its error and does not stop the
        others. Results are returned in task insertion order.

        Args:
            workflow_name: Name of a registered workflow

        Returns:
            Mapping task name -> {"status", "result", "error", "error_type"}
        """
        if workflow_name not in self.workflows:
            raise ValueError(f"Workflow not found: {workflow_name}")

        workflow = self.workflows[workflow_name]
        workers = min(self.max_workers, max(1, len(workflow)))
        logger.info(f"Executing workflow: {workflow_name} ({len(workflow)} tasks, {workers} worker(s))")

        if workers <= 1:
            for task in workflow.tasks.values():
                task.status = TaskStatus.RUNNING
                try:
                    self._complete(task, task.action(*task.args))
                except Exception as e:
                    self._fail(task, e)
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = {}
                for task in workflow.tasks.values():
                    task.status = TaskStatus.RUNNING
                    futures[task.name] = executor.submit(task.action, *task.args)
                for name, future in futures.items():
                    task = workflow.tasks[name]
                    try:
                        self._complete(task, future.result())
                    except Exception as e:
                        self._fail(task, e)

        results = {
            name: {
                "status": task.status.value,
                "result": task.result,
                "error": task.error,
                "error_type": task.error_type,
            }
            for name, task in workflow.tasks.items()
        }

        success_count = sum(1 for t in workflow.tasks.values() if t.status == TaskStatus.COMPLETED)
        logger.info(f"Workflow {workflow_name} completed: {success_count}/{len(workflow)} tasks succeeded")
        return results

    def run(self, workflow: Workflow) -> Dict[str, Dict[str, Any]]:
        """Register and execute in one call."""
        self.register_workflow(workflow)
        return self.execute_workflow(workflow.name)

    @staticmethod
    def _complete(task: Task, result: Any) -> None:
        task.result = result
        task.status = TaskStatus.COMPLETED

    @staticmethod
    def _fail(task: Task, error: Exception) -> None:
        task.status = TaskStatus.FAILED
        task.error = str(error)
        task.error_type = type(error).__name__
        logger.error(f"Task {task.name} failed: {error}")
