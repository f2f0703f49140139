import json
import logging
import time
from pathlib import Path

from django.db import DatabaseError

from mahnn.constants import RUN_COMPLETED, RUN_FAILED
from mahnn.models import EpochMetric, FoldResult, TrainingRun
from mahnn.utils.files import sha256sum, write_atomic


logger = logging.getLogger(__name__)

MANIFEST_FILE = 'manifest.json'


class RunRecorder:
    """
    Collects the manifest of one command run

    The manifest is written to ``out_dir`` when the run finishes and
    mirrored into a ``TrainingRun`` row. Database problems are logged and
    never abort the run.
    """

    def __init__(self, command, out_dir, config=None, seed=None, inputs=None):
        self.command = command
        self.out_dir = Path(out_dir)
        self.config = config.to_dict() if config is not None else {}
        self.variant = config.variant if config is not None else ''
        if seed is None and config is not None:
            seed = config.seed
        self.seed = seed
        self.inputs = {
            name: str(path) for name, path in (inputs or {}).items()
            if path is not None
        }
        self.outputs = []
        self.started = time.monotonic()
        self.run = self._save(
            TrainingRun.objects.create,
            command=command,
            variant=self.variant,
            seed=seed,
            config=self.config,
            inputs=self.inputs,
        )

    def _save(self, action, *args, **kwargs):
        try:
            return action(*args, **kwargs)
        except DatabaseError as e:
            logger.error(
                'Could not record %s run in the database. EXCEPTION: %s',
                self.command, e
            )
            return None

    def add_epoch(self, record, fold=None):
        if self.run is None:
            return
        self._save(
            EpochMetric.objects.create,
            run=self.run,
            fold=fold,
            epoch=record['epoch'],
            loss=record['loss'],
            train_accuracy=record['train_accuracy'],
            dev_accuracy=record['dev_accuracy'],
        )

    def add_fold(self, record):
        if self.run is None:
            return
        self._save(
            FoldResult.objects.create,
            run=self.run,
            fold=record['fold'],
            train_size=record['train_size'],
            test_size=record['test_size'],
            accuracy=record['accuracy'],
        )

    def add_output(self, *paths):
        self.outputs.extend(Path(path) for path in paths)

    def checksums(self):
        return {
            str(path): sha256sum(path)
            for path in self.outputs if path.is_file()
        }

    def manifest(self, accuracy=None, results=None):
        return {
            'command': self.command,
            'variant': self.variant,
            'config': self.config,
            'seed': self.seed,
            'inputs': self.inputs,
            'outputs': [str(path) for path in self.outputs],
            'checksums': self.checksums(),
            'accuracy': accuracy,
            'results': results,
            'wall_clock': round(time.monotonic() - self.started, 3),
        }

    def finish(self, accuracy=None, results=None):
        """Writes ``manifest.json`` and marks the run completed"""
        manifest = self.manifest(accuracy=accuracy, results=results)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = write_atomic(
            self.out_dir / MANIFEST_FILE,
            json.dumps(manifest, indent=2, sort_keys=True)
        )

        if self.run is not None:
            self.run.status = RUN_COMPLETED
            self.run.outputs = manifest['outputs']
            self.run.checksums = manifest['checksums']
            self.run.accuracy = accuracy
            self.run.wall_clock = manifest['wall_clock']
            self._save(self.run.save)

        logger.info(
            'Run %s finished in %.1fs, manifest written to %s',
            self.command, manifest['wall_clock'], path
        )
        return path

    def fail(self, error):
        logger.error('Run %s failed. EXCEPTION: %s', self.command, error)
        if self.run is None:
            return
        self.run.status = RUN_FAILED
        self.run.error = str(error)
        self.run.wall_clock = round(time.monotonic() - self.started, 3)
        self._save(self.run.save)
