"""Plain-text output writers and their readers.

Scalar series go to two-column CSV; field snapshots go to a small
header plus row-major rows.  Floats are written with repr so a read
back returns bit-identical values.
"""

import numpy as np


class TimeseriesWriter:
    """Append (time, value) rows to a CSV file as a run progresses."""

    def __init__(self, path, name):
        self.path = str(path)
        self.name = name
        self._stream = open(self.path, "w")
        self._stream.write("time,{}\n".format(name))
        self._stream.flush()

    def append(self, time, value):
        self._stream.write("{},{}\n".format(repr(float(time)), repr(float(value))))
        self._stream.flush()

    def close(self):
        if self._stream is not None:
            self._stream.close()
            self._stream = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_timeseries(path):
    """Read a two-column CSV back as (name, times, values)."""
    with open(path) as stream:
        header = stream.readline().rstrip("\n")
        prefix, _, name = header.partition(",")
        if prefix != "time" or not name:
            raise ValueError("not a timeseries file: {}".format(path))
        times, values = [], []
        for line in stream:
            line = line.strip()
            if not line:
                continue
            t, _, v = line.partition(",")
            times.append(float(t))
            values.append(float(v))
    return name, np.array(times), np.array(values)


def write_grid_snapshot(path, name, time, grid, values):
    """Write one field snapshot: header lines, then row-major rows."""
    values = np.asarray(values, dtype=float).ravel()
    shape = grid.shape if grid.shape else (1,)
    rows = values.reshape(shape[0], -1)
    with open(str(path), "w") as stream:
        stream.write("name: {}\n".format(name))
        stream.write("time: {}\n".format(repr(float(time))))
        stream.write("shape: {}\n".format(" ".join(str(n) for n in grid.shape)))
        stream.write(
            "spacing: {}\n".format(" ".join(repr(d) for d in grid.spacing))
        )
        stream.write("origin: {}\n".format(" ".join(repr(x) for x in grid.origin)))
        for row in rows:
            stream.write(" ".join(repr(v) for v in row.tolist()) + "\n")


def read_grid_snapshot(path):
    """Read a snapshot back as a dict with name, time, shape, and values."""
    with open(path) as stream:
        head = {}
        for _ in range(5):
            line = stream.readline().rstrip("\n")
            key, _, rest = line.partition(": ")
            head[key] = rest
        shape = tuple(int(n) for n in head["shape"].split())
        values = []
        for line in stream:
            line = line.strip()
            if line:
                values.extend(float(v) for v in line.split())
    return {
        "name": head["name"],
        "time": float(head["time"]),
        "shape": shape,
        "spacing": tuple(float(d) for d in head["spacing"].split()),
        "origin": tuple(float(x) for x in head["origin"].split()),
        "values": np.array(values).reshape(shape or (1,)),
    }
