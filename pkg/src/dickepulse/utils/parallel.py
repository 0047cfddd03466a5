"""
Index-ordered fan-out over a process pool
"""

from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Any, Callable, List, Sequence


def run_indexed(func: Callable[[Any], Any], tasks: Sequence[Any],
                workers: int = 1) -> List[Any]:
    """
    Evaluate func on every task and return the results in task order

    func must be a module-level function so the pool can pickle it. With a
    single worker the tasks run in-process.

    Args:
        func: Function of one task
        tasks: Task arguments
        workers: Number of worker processes

    Returns:
        Results, results[i] = func(tasks[i])
    """
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]

    results: List[Any] = [None] * len(tasks)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(func, task): i for i, task in enumerate(tasks)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results
