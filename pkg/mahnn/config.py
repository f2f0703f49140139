from dataclasses import asdict, dataclass, field, fields, replace

from . import app_settings
from .constants import (
    OPTIMIZER_ADAM,
    OPTIMIZER_CHOICES,
    PRECISION_CHOICES,
    SEMANTIC_AXIS_CHOICES,
    SEMANTIC_AXIS_POSITIONS,
)
from .exceptions import ConfigError


def _default(name):
    return field(default_factory=lambda: getattr(app_settings, name))


@dataclass(frozen=True)
class TrainConfig:
    """Every hyper-parameter of a run, defaults come from ``app_settings``"""

    hidden_size: int = _default('MAHNN_HIDDEN_SIZE')
    embedding_dim: int = _default('MAHNN_EMBEDDING_DIM')
    channels: int = _default('MAHNN_CHANNELS')
    rv: bool = False
    l2: float = _default('MAHNN_L2')
    filter_sizes: tuple = field(
        default_factory=lambda: tuple(app_settings.MAHNN_FILTER_SIZES)
    )
    filter_maps: int = _default('MAHNN_FILTER_MAPS')
    dropout: float = _default('MAHNN_DROPOUT')
    # one keep probability per channel, a single value is broadcast
    keep_probabilities: tuple = field(
        default_factory=lambda: (app_settings.MAHNN_KEEP_PROBABILITY,)
    )
    attention_dim: int = None
    semantic_axis: str = SEMANTIC_AXIS_POSITIONS
    optimizer: str = OPTIMIZER_ADAM
    learning_rate: float = _default('MAHNN_LEARNING_RATE')
    batch_size: int = _default('MAHNN_BATCH_SIZE')
    epochs: int = _default('MAHNN_EPOCHS')
    patience: int = _default('MAHNN_PATIENCE')
    dev_fraction: float = _default('MAHNN_DEV_FRACTION')
    seed: int = 0
    precision: str = _default('MAHNN_PRECISION')
    max_length: int = None
    rare_word_threshold: int = _default('MAHNN_RARE_WORD_THRESHOLD')
    oov_range: float = _default('MAHNN_OOV_RANGE')
    embeddings_path: str = None
    freeze_embeddings: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'filter_sizes', tuple(self.filter_sizes))
        probabilities = tuple(self.keep_probabilities)
        if len(probabilities) == 1 and self.channels > 1:
            probabilities = probabilities * self.channels
        object.__setattr__(self, 'keep_probabilities', probabilities)

        errors = self.validate()
        if errors:
            raise ConfigError(errors)

    def validate(self):
        errors = []
        positive = (
            'hidden_size', 'embedding_dim', 'channels', 'filter_maps',
            'batch_size', 'epochs', 'rare_word_threshold',
        )
        for name in positive:
            if getattr(self, name) < 1:
                errors.append(f'{name} must be positive')
        if self.learning_rate < 0:
            errors.append('learning_rate must not be negative')
        if self.l2 < 0:
            errors.append('l2 must not be negative')
        if not 0 <= self.dropout < 1:
            errors.append('dropout must be in [0, 1)')
        if not self.filter_sizes or min(self.filter_sizes) < 1:
            errors.append('filter_sizes must be a non-empty list of widths')
        if len(self.keep_probabilities) != self.channels:
            errors.append(
                'keep_probabilities needs one value or one per channel'
            )
        if any(not 0 < p <= 1 for p in self.keep_probabilities):
            errors.append('keep_probabilities must lie in (0, 1]')
        if self.attention_dim is not None and self.attention_dim < 1:
            errors.append('attention_dim must be positive')
        if self.max_length is not None and self.max_length < 1:
            errors.append('max_length must be positive')
        choices = (
            ('precision', PRECISION_CHOICES),
            ('optimizer', OPTIMIZER_CHOICES),
            ('semantic_axis', SEMANTIC_AXIS_CHOICES),
        )
        for name, options in choices:
            if getattr(self, name) not in dict(options):
                errors.append(f'unknown {name} {getattr(self, name)!r}')
        return errors

    @property
    def variant(self):
        if self.rv:
            return 'MahNN-rv'
        return f'MahNN-{self.channels}'

    @property
    def semantic_dim(self):
        return self.attention_dim or self.hidden_size

    def to_dict(self):
        data = asdict(self)
        data['filter_sizes'] = list(self.filter_sizes)
        data['keep_probabilities'] = list(self.keep_probabilities)
        return data

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f'unknown key {key!r}' for key in unknown])
        return cls(**data)

    def override(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        if 'channels' in changes and 'keep_probabilities' not in changes:
            if len(set(self.keep_probabilities)) == 1:
                changes['keep_probabilities'] = self.keep_probabilities[:1]
        return replace(self, **changes)
