import copy
import dataclasses
import yaml

from typing import List, Optional

from mps2cl.consts import PRODUCT_CAP, SPARSE_LIMIT, DENSE_LIMIT


PRESETS = ['aklt', 'random', 'classical']
ENSEMBLES = ['iid', 'uniform']


class MissingConfigurationError(Exception):

    def __init__(self, missing: List[str]):
        self.missing = missing


class InvalidConfigurationError(Exception):

    def __init__(self, problems: List[str]):
        self.problems = problems


@dataclasses.dataclass(frozen=True)
class ModelConfig:
    preset: Optional[str]
    file: Optional[str]
    seed: int
    d: int
    D: int
    xi: List[float]
    range: Optional[int]
    g1_cap: int

    @property
    def physical_dim(self) -> Optional[int]:
        if self.file is not None:
            return None
        if self.preset == 'aklt':
            return 3
        if self.preset == 'classical':
            return len(self.xi) ** 2
        return self.d

    def __str__(self):
        if self.file is not None:
            return f'file {self.file}'
        if self.preset == 'random':
            return f'random (d={self.d}, D={self.D}, seed={self.seed})'
        return self.preset


@dataclasses.dataclass(frozen=True)
class BlockConfig:
    L: int
    blocks: int
    L_list: List[int]


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    N_list: List[int]
    beta_fractions: List[float]
    seeds: List[int]
    ensemble: str
    perturbation_range: int


@dataclasses.dataclass(frozen=True)
class PathConfig:
    steps: int


@dataclasses.dataclass(frozen=True)
class OutputConfig:
    directory: str
    workers: int


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    model: ModelConfig
    block: BlockConfig
    L_range: List[int]
    N_list: List[int]
    sweep: SweepConfig
    path: PathConfig
    output: OutputConfig

    def problems(self, subcommand: str, d: Optional[int] = None) -> List[str]:
        """Cap and consistency violations relevant to ``subcommand``;
        ``d`` overrides the physical dimension (tensor files)."""
        d = d or self.model.physical_dim or 2
        found = []
        if self.model.preset is None and self.model.file is None:
            found.append('model.preset or model.file must be given')
        if self.model.preset is not None and self.model.preset not in PRESETS:
            found.append(f'model.preset must be one of {PRESETS}')
        if self.model.range is not None and self.model.range < 1:
            found.append('model.range must be positive')
        if self.output.workers < 1:
            found.append('output.workers must be at least 1')
        if subcommand in ('block', 'converge'):
            for L in self.block.L_list:
                if L < 2 or L % 2 or d ** L > PRODUCT_CAP:
                    found.append(f'block.L_list entry {L} must be even with 2 <= L, d^L <= {PRODUCT_CAP}')
        if subcommand in ('converge', 'aklt'):
            if len(self.L_range) < 3 or min(self.L_range) < 1:
                found.append('converge.L_range needs at least three positive entries')
        if subcommand in ('parent-gap', 'aklt'):
            for N in self.N_list:
                if N < 2 or d ** N > SPARSE_LIMIT:
                    found.append(f'parent.N_list entry {N} outside 2 <= N, d^N <= {SPARSE_LIMIT}')
        if subcommand in ('decompose', 'phase-path'):
            L, m = self.block.L, self.block.blocks
            if L < 2 or L % 2:
                found.append('block.L must be even and positive')
            if m < 3:
                found.append('block.blocks must be at least 3')
            if d ** (L * m) > DENSE_LIMIT:
                found.append(f'd^(L*blocks) = {d ** (L * m)} exceeds {DENSE_LIMIT}')
        if subcommand == 'phase-path' and self.path.steps < 1:
            found.append('path.steps must be at least 1')
        if subcommand == 'sweep':
            if not self.sweep.seeds:
                found.append('sweep.seeds must not be empty')
            if self.sweep.ensemble not in ENSEMBLES:
                found.append(f'sweep.ensemble must be one of {ENSEMBLES}')
            if any(b < 0 for b in self.sweep.beta_fractions) or not self.sweep.beta_fractions:
                found.append('sweep.beta_fractions must be a non-empty list of non-negative numbers')
            if self.sweep.perturbation_range < 1:
                found.append('sweep.perturbation_range must be positive')
            for N in self.sweep.N_list:
                if N < 2 or d ** N > SPARSE_LIMIT:
                    found.append(f'sweep.N_list entry {N} outside 2 <= N, d^N <= {SPARSE_LIMIT}')
        return found


class ConfigParser:
    DEFAULTS = {
        'model': {
            'preset': None,
            'file': None,
            'seed': 0,
            'd': 2,
            'D': 2,
            'xi': [0.6, 0.4],
            'range': None,
            'g1_cap': 8,
        },
        'block': {
            'L': 2,
            'blocks': 3,
            'L_list': [2, 4, 6],
        },
        'converge': {
            'L_range': [1, 2, 3, 4, 5, 6, 7, 8],
        },
        'parent': {
            'N_list': [6, 8, 10],
        },
        'sweep': {
            'N_list': [6, 8, 10, 12],
            'beta_fractions': [0.0, 0.01, 0.02, 0.03, 0.04, 0.05],
            'seeds': list(range(10)),
            'ensemble': 'iid',
            'perturbation_range': 2,
        },
        'path': {
            'steps': 20,
        },
        'output': {
            'directory': 'results',
            'workers': 1,
        },
    }
    REQUIRED = [
        ['model'],
    ]

    def __init__(self):
        self.cfg = dict()

    @staticmethod
    def can_read(content):
        try:
            yaml.load(content, Loader=yaml.FullLoader)
            return True
        except Exception:
            return False

    def read_string(self, content):
        self.cfg = yaml.load(content, Loader=yaml.FullLoader) or dict()

    def has(self, *path):
        x = self.cfg
        for p in path:
            if not hasattr(x, 'keys') or p not in x.keys():
                return False
            x = x[p]
        return True

    def _get_default(self, *path):
        x = self.DEFAULTS
        for p in path:
            x = x[p]
        return copy.deepcopy(x)

    def get_or_default(self, *path):
        x = self.cfg
        for p in path:
            if not hasattr(x, 'keys') or p not in x.keys():
                return self._get_default(*path)
            x = x[p]
        return x

    def set(self, *path, value):
        """Override a key (CLI flags); None leaves the key untouched."""
        if value is None:
            return
        x = self.cfg
        for p in path[:-1]:
            if not hasattr(x.get(p), 'keys'):
                x[p] = dict()
            x = x[p]
        x[path[-1]] = value

    def validate(self):
        if not hasattr(self.cfg, 'keys'):
            raise InvalidConfigurationError(['top level must be a mapping'])
        missing = []
        for path in self.REQUIRED:
            if not self.has(*path):
                missing.append('.'.join(path))
        if len(missing) > 0:
            raise MissingConfigurationError(missing)
        try:
            self.config
        except (TypeError, ValueError) as e:
            raise InvalidConfigurationError([str(e)])

    @property
    def model(self):
        return ModelConfig(
            preset=self.get_or_default('model', 'preset'),
            file=self.get_or_default('model', 'file'),
            seed=int(self.get_or_default('model', 'seed')),
            d=int(self.get_or_default('model', 'd')),
            D=int(self.get_or_default('model', 'D')),
            xi=[float(x) for x in self.get_or_default('model', 'xi')],
            range=_optional_int(self.get_or_default('model', 'range')),
            g1_cap=int(self.get_or_default('model', 'g1_cap')),
        )

    @property
    def block(self):
        return BlockConfig(
            L=int(self.get_or_default('block', 'L')),
            blocks=int(self.get_or_default('block', 'blocks')),
            L_list=[int(x) for x in self.get_or_default('block', 'L_list')],
        )

    @property
    def sweep(self):
        return SweepConfig(
            N_list=[int(x) for x in self.get_or_default('sweep', 'N_list')],
            beta_fractions=[float(x) for x in self.get_or_default('sweep', 'beta_fractions')],
            seeds=[int(x) for x in self.get_or_default('sweep', 'seeds')],
            ensemble=str(self.get_or_default('sweep', 'ensemble')),
            perturbation_range=int(self.get_or_default('sweep', 'perturbation_range')),
        )

    @property
    def config(self):
        return ExperimentConfig(
            model=self.model,
            block=self.block,
            L_range=[int(x) for x in self.get_or_default('converge', 'L_range')],
            N_list=[int(x) for x in self.get_or_default('parent', 'N_list')],
            sweep=self.sweep,
            path=PathConfig(steps=int(self.get_or_default('path', 'steps'))),
            output=OutputConfig(
                directory=str(self.get_or_default('output', 'directory')),
                workers=int(self.get_or_default('output', 'workers')),
            ),
        )


def _optional_int(value) -> Optional[int]:
    return None if value is None else int(value)
