"""Rate-limited, cached download of snapshot pages."""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import requests

log = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://steamspy.com/api.php?request=all&page={page}"
CACHE_ENV = "TAGTAXA_CACHE"


class FetchError(RuntimeError):
    def __init__(self, page: int, reason: str):
        super().__init__(f"page {page}: {reason}")
        self.page = page


@dataclass
class FetchResult:
    paths: list[Path] = field(default_factory=list)
    requested: list[int] = field(default_factory=list)
    cached: list[int] = field(default_factory=list)


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "tagtaxa"


def page_path(cache_dir: Path, page: int) -> Path:
    return Path(cache_dir) / f"page_{page:05d}.json"


def parse_page_range(text: str) -> range:
    """Parse ``A..B`` (inclusive) into a range; ``A..B`` with B < A is empty."""
    lo, sep, hi = text.partition("..")
    if not sep:
        n = int(text)
        return range(n, n + 1)
    return range(int(lo), int(hi) + 1)


class _Throttle:
    def __init__(self, delay: float, clock: Callable[[], float], sleep: Callable[[float], None]):
        self.delay = delay
        self.clock = clock
        self.sleep = sleep
        self._last: float | None = None

    def wait(self) -> None:
        if self._last is not None:
            remaining = self.delay - (self.clock() - self._last)
            if remaining > 0:
                self.sleep(remaining)
        self._last = self.clock()


def fetch_snapshot(
    pages: Iterable[int],
    cache_dir: str | Path | None = None,
    endpoint: str = DEFAULT_ENDPOINT,
    *,
    delay: float = 1.0,
    retries: int = 3,
    timeout: float = 30.0,
    session: requests.Session | None = None,
    clock: Callable[[], float] = time.monotonic,
    sleep: Callable[[float], None] = time.sleep,
) -> FetchResult:
    """Download each page into ``cache_dir``, one file per page.

    Pages already in the cache are never re-requested; cached files are immutable, so
    a refresh means deleting them first. Requests are spaced at least ``delay`` seconds
    apart. A page is attempted ``1 + retries`` times before :class:`FetchError`; pages
    written before the failure stay in the cache.
    """
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    cache.mkdir(parents=True, exist_ok=True)
    http = session or requests.Session()
    throttle = _Throttle(delay, clock, sleep)
    result = FetchResult()

    for page in pages:
        target = page_path(cache, page)
        if target.exists():
            result.cached.append(page)
            result.paths.append(target)
            continue
        url = endpoint.format(page=page)
        last_error = "no attempt made"
        body: bytes | None = None
        for attempt in range(retries + 1):
            throttle.wait()
            result.requested.append(page)
            try:
                resp = http.get(url, timeout=timeout)
            except requests.RequestException as exc:
                last_error = str(exc)
            else:
                if resp.status_code == 200:
                    body = resp.content
                    break
                last_error = f"HTTP {resp.status_code}"
            log.warning("page %d attempt %d failed: %s", page, attempt + 1, last_error)
        if body is None:
            raise FetchError(page, f"giving up after {retries + 1} attempts ({last_error})")
        tmp = target.with_suffix(".part")
        tmp.write_bytes(body)
        tmp.replace(target)
        result.paths.append(target)
        log.info("fetched page %d (%d bytes)", page, len(body))
    return result
