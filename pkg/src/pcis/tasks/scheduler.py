"""
Module containing a bounded worker pool for fanning seeded jobs out across processes.
"""

from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any

from src.pcis.core.config import settings
from src.pcis.core.logger import logger


@dataclass
class JobModel:
    """
    Dataclass for a seeded job.

    Attributes:
        func: Module-level function to call, it must be picklable.
        id: Unique job identifier, the key of its result.
        name: Human-readable job name to be shown in logs.
        group: A group for the job, e.g. the shielded or the unshielded arm.
        enabled: Set to False to skip the job without removing its definition.
        args: Positional arguments passed to func.
        kwargs: Keyword arguments passed to func.
    """

    func: Callable[..., Any]
    id: str
    name: str | None = None
    group: str = "general"
    enabled: bool = True
    args: list | None = None
    kwargs: dict | None = None


class Scheduler:
    """
    Scheduler running registered jobs on at most max_workers processes. Every job is
    internally sequential; results come back in registration order whatever the
    completion order was.
    """

    def __init__(self, max_workers: int | None = None):
        self.max_workers = max(1, max_workers or settings.MAX_WORKERS)
        self.jobs: list[JobModel] = []

    def add_job(self, job: JobModel) -> None:
        """
        Add a job to the scheduler registry.
        :param job: The JobModel to register.
        :raises ValueError: If a job with the same id is registered.
        """
        if any(existing.id == job.id for existing in self.jobs):
            raise ValueError(f"A job with id '{job.id}' is already registered.")
        self.jobs.append(job)

    def run_jobs(self) -> dict[str, Any]:
        """
        Run all enabled jobs and log a grouped summary of what ran and what was skipped.
        With a single worker the jobs run in this process.
        :return: Job results keyed by job id, in registration order.
        """
        enabled = [job for job in self.jobs if job.enabled]
        disabled = [job for job in self.jobs if not job.enabled]

        for group in sorted({job.group for job in enabled}):
            group_jobs = [j.id for j in enabled if j.group == group]
            logger.info("[%s] Scheduled: %s", group.upper(), group_jobs)
        if disabled:
            logger.info(
                "Skipped %d disabled job(s): %s",
                len(disabled),
                [job.id for job in disabled],
            )

        workers = min(self.max_workers, len(enabled))
        if workers <= 1:
            return {job.id: self._call(job) for job in enabled}

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                job.id: pool.submit(job.func, *(job.args or []), **(job.kwargs or {}))
                for job in enabled
            }
            results = {}
            for job in enabled:
                results[job.id] = futures[job.id].result()
                logger.info("Job '%s' finished.", job.name or job.id)
        return results

    @staticmethod
    def _call(job: JobModel) -> Any:
        result = job.func(*(job.args or []), **(job.kwargs or {}))
        logger.info("Job '%s' finished.", job.name or job.id)
        return result
