"""Local run executor: a fixed pool of workers draining a FIFO queue.

Stands in for a cluster submission system.  Each run owns its own
working directory under the store, so workers never contend.  With
zero workers nothing executes; submissions pile up in the store as
queued records, which a later executor instance can recover.
"""

import json
import queue
import threading

from ..coupler import load_composition, run as run_composition


class RunExecutor:
    def __init__(self, store, workers=2):
        self.store = store
        self.workers = workers
        self._queue = queue.Queue()
        for n in range(workers):
            thread = threading.Thread(
                target=self._drain, daemon=True, name="run-worker-{}".format(n)
            )
            thread.start()

    def submit(self, run_id):
        self._queue.put(run_id)

    def recover(self):
        """Pick up where a previous process left off.

        Queued runs go back on the queue; runs that were mid-flight
        when the process died are marked failed rather than silently
        resumed with a half-written workdir.
        """
        for run_id in self.store.list_runs():
            record = self.store.load_run(run_id)
            if record is None:
                continue
            if record.status == "queued":
                self.submit(run_id)
            elif record.status == "running":
                record.transition("failed", "interrupted by restart")
                self.store.save_run(record)

    def _drain(self):
        while True:
            run_id = self._queue.get()
            try:
                self._execute(run_id)
            finally:
                self._queue.task_done()

    def _execute(self, run_id):
        record = self.store.load_run(run_id)
        if record is None or record.status != "queued":
            return
        record.transition("running")
        self.store.save_run(record)
        try:
            body = self.store.load_composition(record.composition_id)
            if body is None:
                raise RuntimeError(
                    "composition {} is gone".format(record.composition_id)
                )
            comp = load_composition(json.loads(body))
            summary = run_composition(comp, self.store.outputs_dir(run_id))
        except Exception as err:
            record.transition("failed", str(err))
            self.store.save_run(record)
            return
        if summary.status == "succeeded":
            record.transition("succeeded", outputs=summary.outputs)
        else:
            record.transition(
                "failed", summary.error or "run failed", outputs=summary.outputs
            )
        self.store.save_run(record)
