"""Linear-in-time interpolation over a two-snapshot window."""

import numpy as np


class NoDataError(Exception):
    """value_at() was called before any snapshot was pushed."""


class TimeInterpolator:
    """Hold the two most recent snapshots of a value and interpolate.

    Between the two held times the value is linear; at or past the
    newest time it holds steady (the consumer is running ahead of the
    producer, which is normal under a lagged exchange); before the
    oldest time it returns the oldest snapshot.
    """

    def __init__(self):
        self._older = None
        self._newer = None

    def push(self, time, values):
        snap = (float(time), np.array(values, dtype=float).ravel())
        if self._newer is not None and time <= self._newer[0]:
            # same or older time replaces the newest snapshot
            self._newer = snap
            return
        self._older = self._newer
        self._newer = snap

    def value_at(self, time):
        if self._newer is None:
            raise NoDataError("no snapshots pushed yet")
        t1, v1 = self._newer
        if self._older is None or time >= t1:
            return v1.copy()
        t0, v0 = self._older
        if time <= t0:
            return v0.copy()
        w = (time - t0) / (t1 - t0)
        return (1.0 - w) * v0 + w * v1

    @property
    def latest_time(self):
        return None if self._newer is None else self._newer[0]
