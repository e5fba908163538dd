import os


def worker_count(tasks: int) -> int:
    """Thread count for a sweep, capped by ``JCM_THREADS`` (0 or unset = automatic)."""
    raw = os.environ.get("JCM_THREADS", "").strip()
    try:
        cap = int(raw) if raw else 0
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = os.cpu_count() or 1
    return max(1, min(cap, tasks))
