"""File-backed document store for compositions and run records.

Layout under one root directory:

    compositions/<id>.doc    composition document, byte-for-byte as posted
    compositions/<id>.meta   owner, shared flag, title
    runs/<id>/record.doc     run lifecycle record
    runs/<id>/outputs/       working directory of the run

Every write goes to a temp file in the target directory and is moved
into place with an atomic rename, so a reader (or a process killed at
any moment) never sees a half-written document.
"""

import json
import os
import re
import secrets
import tempfile
import time
from dataclasses import dataclass, field

_ID_SHAPE = re.compile(r"^[A-Za-z0-9_-]+$")

_TRANSITIONS = {
    "queued": ("running",),
    "running": ("succeeded", "failed"),
}

RUN_STATUSES = ("queued", "running", "succeeded", "failed")


class TransitionError(ValueError):
    """A run record was asked to move backwards or skip a state."""


@dataclass
class RunRecord:
    run_id: str
    composition_id: str
    owner: str = "anonymous"
    status: str = "queued"
    submitted: float = None
    started: float = None
    finished: float = None
    message: str = ""
    outputs: list = field(default_factory=list)

    def transition(self, status, message="", outputs=None):
        if status not in _TRANSITIONS.get(self.status, ()):
            raise TransitionError(
                "run {} cannot go from {} to {}".format(
                    self.run_id, self.status, status
                )
            )
        self.status = status
        now = time.time()
        if status == "running":
            self.started = now
        else:
            self.finished = now
            self.message = message
            if outputs is not None:
                self.outputs = list(outputs)

    def as_dict(self):
        return {
            "id": self.run_id,
            "composition_id": self.composition_id,
            "owner": self.owner,
            "status": self.status,
            "submitted": self.submitted,
            "started": self.started,
            "finished": self.finished,
            "message": self.message,
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(
            run_id=doc["id"],
            composition_id=doc["composition_id"],
            owner=doc.get("owner", "anonymous"),
            status=doc["status"],
            submitted=doc.get("submitted"),
            started=doc.get("started"),
            finished=doc.get("finished"),
            message=doc.get("message", ""),
            outputs=list(doc.get("outputs", [])),
        )


def _valid_id(some_id):
    return isinstance(some_id, str) and bool(_ID_SHAPE.match(some_id))


class DocumentStore:
    def __init__(self, root):
        self.root = str(root)
        self._compositions = os.path.join(self.root, "compositions")
        self._runs = os.path.join(self.root, "runs")
        os.makedirs(self._compositions, exist_ok=True)
        os.makedirs(self._runs, exist_ok=True)

    def new_id(self):
        return secrets.token_urlsafe(9)

    def _atomic_write(self, path, data):
        if isinstance(data, str):
            data = data.encode()
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as stream:
                stream.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    # -- compositions ------------------------------------------------------

    def save_composition(self, comp_id, body, meta):
        self._atomic_write(
            os.path.join(self._compositions, comp_id + ".doc"), body
        )
        self._atomic_write(
            os.path.join(self._compositions, comp_id + ".meta"),
            json.dumps(meta, sort_keys=True),
        )

    def load_composition(self, comp_id):
        if not _valid_id(comp_id):
            return None
        path = os.path.join(self._compositions, comp_id + ".doc")
        if not os.path.exists(path):
            return None
        with open(path, "rb") as stream:
            return stream.read()

    def load_composition_meta(self, comp_id):
        if not _valid_id(comp_id):
            return None
        path = os.path.join(self._compositions, comp_id + ".meta")
        if not os.path.exists(path):
            return None
        with open(path) as stream:
            return json.load(stream)

    def save_composition_meta(self, comp_id, meta):
        self._atomic_write(
            os.path.join(self._compositions, comp_id + ".meta"),
            json.dumps(meta, sort_keys=True),
        )

    def list_compositions(self):
        names = os.listdir(self._compositions)
        return sorted(n[:-4] for n in names if n.endswith(".doc"))

    # -- runs ----------------------------------------------------------------

    def run_dir(self, run_id):
        return os.path.join(self._runs, run_id)

    def outputs_dir(self, run_id):
        return os.path.join(self.run_dir(run_id), "outputs")

    def save_run(self, record):
        directory = self.run_dir(record.run_id)
        os.makedirs(directory, exist_ok=True)
        self._atomic_write(
            os.path.join(directory, "record.doc"),
            json.dumps(record.as_dict(), sort_keys=True),
        )

    def load_run(self, run_id):
        if not _valid_id(run_id):
            return None
        path = os.path.join(self.run_dir(run_id), "record.doc")
        if not os.path.exists(path):
            return None
        with open(path) as stream:
            return RunRecord.from_dict(json.load(stream))

    def list_runs(self):
        try:
            names = os.listdir(self._runs)
        except FileNotFoundError:
            return []
        return sorted(n for n in names if _valid_id(n))
