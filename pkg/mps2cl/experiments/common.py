import dataclasses
import datetime
import os
import time

from typing import Any, Dict, List, Optional, Sequence

from mps2cl.config import ExperimentConfig, ModelConfig
from mps2cl.consts import VERSION
from mps2cl.core.mps import (
    MpsTensors, CanonicalForm, canonical_form, aklt_tensors, random_tensors,
    classical_tensors, load_tensors,
)
from mps2cl.core.parent import default_range
from mps2cl.errors import ERROR_HANDLER
from mps2cl.experiments.output import write_json, write_csv
from mps2cl.logger import LOGGER
from mps2cl.verdicts import Verdict


def load_model(model: ModelConfig) -> MpsTensors:
    if model.file is not None:
        return load_tensors(model.file)
    if model.preset == 'aklt':
        return aklt_tensors()
    if model.preset == 'classical':
        return classical_tensors(model.xi)
    return random_tensors(model.d, model.D, model.seed)


@dataclasses.dataclass
class ExperimentOptions:
    output_dir: str
    workers: int


@dataclasses.dataclass
class Table:
    columns: List[str]
    rows: List[Sequence[Any]] = dataclasses.field(default_factory=list)


class Experiment:
    NAME = ''

    def __init__(self, config: ExperimentConfig, options: ExperimentOptions):
        self.config = config
        self.options = options
        self.summary = dict()  # type: Dict[str, Any]
        self.tables = dict()  # type: Dict[str, Table]
        self.verdicts = []  # type: List[Verdict]
        self._tensors = None  # type: Optional[MpsTensors]
        self._canonical = None  # type: Optional[CanonicalForm]
        self._started = time.perf_counter()

    @property
    def tensors(self) -> MpsTensors:
        if self._tensors is None:
            LOGGER.info(f'Loading model {self.config.model}')
            self._tensors = load_model(self.config.model)
        return self._tensors

    @property
    def canonical(self) -> CanonicalForm:
        if self._canonical is None:
            LOGGER.info('Computing canonical form')
            self._canonical = canonical_form(self.tensors, self.config.model.g1_cap)
            LOGGER.info(f'- L0={self._canonical.l0}, xi={self._canonical.xi.tolist()}')
        return self._canonical

    @property
    def interaction_range(self) -> int:
        return self.config.model.range or default_range(self.tensors, self.config.model.g1_cap)

    def record(self, verdict: Verdict):
        self.verdicts.append(verdict)
        if not verdict.applicable:
            ERROR_HANDLER.warning(cause=verdict.name, message=verdict.describe())
        elif verdict.failed:
            ERROR_HANDLER.error(cause=verdict.name, message=verdict.describe())
        else:
            LOGGER.info(f'- {verdict.describe()}')

    def record_all(self, verdicts: Sequence[Verdict]):
        for verdict in verdicts:
            self.record(verdict)

    def run(self):
        pass

    @property
    def directory(self) -> str:
        return os.path.join(self.options.output_dir, self.NAME)

    def abort(self, error: Exception):
        self.summary['error'] = {'type': type(error).__name__, 'message': str(error)}

    def finish(self):
        """Write the summary, the tables and the metadata; also called after
        a failed check or an aborted run with whatever was collected."""
        LOGGER.info(f'Writing results to {self.directory}')
        self.summary['subcommand'] = self.NAME
        self.summary['verdicts'] = self.verdicts
        self.summary['passed'] = 'error' not in self.summary and not any(v.failed for v in self.verdicts)
        write_json(os.path.join(self.directory, 'summary.json'), self.summary)
        for name, table in self.tables.items():
            write_csv(os.path.join(self.directory, f'{name}.csv'), table.columns, table.rows)
        write_json(os.path.join(self.directory, 'metadata.json'), {
            'version': VERSION,
            'created': datetime.datetime.now(datetime.timezone.utc).isoformat(),
            'wall_time': time.perf_counter() - self._started,
            'workers': self.options.workers,
        })
