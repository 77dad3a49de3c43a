import numpy as np


class SpaceMeter:
    """Current and peak stored entries over named working arrays."""

    def __init__(self, label=''):
        self.label = label
        self._held = {}
        self.current = 0
        self.peak = 0

    def hold(self, name, array_or_size):
        if isinstance(array_or_size, (int, np.integer)):
            size = int(array_or_size)
        else:
            size = int(np.size(array_or_size))
        self.current += size - self._held.get(name, 0)
        self._held[name] = size
        if self.current > self.peak:
            self.peak = self.current
        return array_or_size

    def release(self, name):
        self.current -= self._held.pop(name, 0)

    def held(self):
        return dict(self._held)

    def __repr__(self):
        return f"SpaceMeter({self.label!r}, current={self.current}, peak={self.peak})"


class _NullMeter:
    def hold(self, name, array_or_size):
        return array_or_size

    def release(self, name):
        pass


NULL_METER = _NullMeter()


def meter_or_null(meter):
    return NULL_METER if meter is None else meter
