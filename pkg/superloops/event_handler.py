from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional

from watchdog import events
from watchdog.utils.patterns import match_any_paths

from .constants import SCRIPT_SUFFIX
from .trigger import Trigger


class EventHandler:
    EVENTS_WATCHED = {
        events.EVENT_TYPE_CREATED,
        events.EVENT_TYPE_MODIFIED,
        events.EVENT_TYPE_MOVED,
    }

    def __init__(
        self,
        trigger: Trigger,
        patterns: Optional[List[str]] = None,
        ignore_patterns: Optional[List[str]] = None,
    ):
        self._patterns = patterns or [f"*{SCRIPT_SUFFIX}"]
        self._ignore_patterns = ignore_patterns or []
        self._trigger = trigger

    @property
    def patterns(self) -> List[str]:
        return self._patterns

    @property
    def ignore_patterns(self) -> List[str]:
        return self._ignore_patterns

    def _watched_path(self, event: events.FileSystemEvent) -> Optional[str]:
        if event.event_type not in self.EVENTS_WATCHED:
            return None

        # a moved script is rerun under its new name
        path = getattr(event, "dest_path", "") or event.src_path
        if match_any_paths(
            [path], included_patterns=self.patterns, excluded_patterns=self.ignore_patterns
        ):
            return str(path)
        return None

    def dispatch(self, event: events.FileSystemEvent) -> None:
        path = self._watched_path(event)
        if path:
            self._trigger.emit(Path(path))
            logging.info(f"{path} {event.event_type}")
        else:
            logging.debug(f"IGNORED event: {event.event_type} src: {event.src_path}")
