"""Task engine for independent experiment runs."""

from .workflow_engine import Task, TaskStatus, Workflow, WorkflowEngine

__all__ = ["Task", "TaskStatus", "Workflow", "WorkflowEngine"]
