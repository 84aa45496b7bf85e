import threading
import time
from pathlib import Path
from typing import List, Optional


class Trigger:
    """Debounced rerun request that remembers which scripts changed."""

    _value: float
    _lock: threading.Lock

    def __init__(self, delay: float = 0.0):
        self._lock = threading.Lock()
        self._value = 0
        self._delay = delay
        self._pending: List[Path] = []

    def emit(self, path: Optional[Path] = None):
        with self._lock:
            self._value = time.time() + self._delay
            if path is not None and path not in self._pending:
                self._pending.append(path)

    def emit_now(self):
        with self._lock:
            self._value = time.time()

    def is_active(self):
        return self._value != 0

    def release(self) -> List[Path]:
        with self._lock:
            self._value = 0
            pending, self._pending = self._pending, []
        return pending

    def check(self):
        return self._value > 0 and time.time() > self._value
