import os


def worker_count(default: int = 1) -> int:
    """Worker cap from ``SPECTRAL_BALLS_WORKERS``; never changes results."""
    raw = os.environ.get("SPECTRAL_BALLS_WORKERS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default
