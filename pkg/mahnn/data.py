import io
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import (
    SPLIT_CV,
    SPLIT_FIXED_TEST,
    SPLIT_NAMES,
    SPLIT_TEST,
    SPLIT_TRAIN,
)
from .exceptions import ConfigError, ParseError, SchemaError


logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(r'\w+|[^\w\s]')

REPLACEMENT_CHARACTER = '\ufffd'


def tokenize(text):
    """Lowercases and splits, punctuation marks become their own tokens"""
    return TOKEN_PATTERN.findall(text.lower())


@dataclass(frozen=True)
class LabeledExample:
    tokens: tuple
    label: int
    line_index: int
    split: str = None


@dataclass
class Corpus:
    examples: list
    class_names: list
    source: str = ''

    def __post_init__(self):
        for example in self.examples:
            if not 0 <= example.label < len(self.class_names):
                raise SchemaError(
                    f'label {example.label} of line {example.line_index} '
                    f'has no class name'
                )

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    @property
    def num_classes(self):
        return len(self.class_names)

    @property
    def labels(self):
        return np.array([example.label for example in self.examples])

    @property
    def average_length(self):
        if not self.examples:
            return 0.0
        return float(np.mean([len(e.tokens) for e in self.examples]))

    def subset(self, indices):
        return Corpus(
            examples=[self.examples[i] for i in indices],
            class_names=self.class_names,
            source=self.source,
        )


@dataclass
class LoadReport:
    source: str = ''
    accepted: int = 0
    rejected: list = field(default_factory=list)
    replaced_characters: int = 0
    num_classes: int = 0
    average_length: float = 0.0

    def to_dict(self):
        return {
            'source': self.source,
            'N': self.accepted,
            'c': self.num_classes,
            'l': round(self.average_length, 4),
            'rejected': [
                {'line': line, 'reason': reason}
                for line, reason in self.rejected
            ],
            'replaced_characters': self.replaced_characters,
        }


def _read_lines(source):
    if isinstance(source, (str, Path)):
        with open(source, 'rb') as handle:
            return str(source), handle.read().splitlines()
    if isinstance(source, bytes):
        return '<bytes>', source.splitlines()
    if isinstance(source, io.TextIOBase):
        return getattr(source, 'name', '<stream>'), [
            line.encode('utf-8') for line in source.read().splitlines()
        ]
    return getattr(source, 'name', '<stream>'), [
        line if isinstance(line, bytes) else line.encode('utf-8')
        for line in source
    ]


def decode_line(raw):
    try:
        return raw.decode('utf-8'), 0
    except UnicodeDecodeError:
        text = raw.decode('utf-8', errors='replace')
        return text, text.count(REPLACEMENT_CHARACTER)


def _resolve_label(value, schema, line_number):
    value = value.strip()

    if schema is None:
        if not value.lstrip('-').isdigit():
            raise SchemaError(
                f'line {line_number}: label {value!r} is not an integer '
                f'and no class names were given'
            )
        return int(value)

    if value in schema:
        return schema.index(value)

    if value.isdigit() and int(value) < len(schema):
        return int(value)

    raise SchemaError(f'line {line_number}: unknown label {value!r}')


def load_tsv(source, schema=None):
    """
    Loads ``label<TAB>text[<TAB>split]`` lines into a ``Corpus``

    :param source: path, bytes, text stream or iterable of lines
    :param schema: optional list of class names, labels may then be names
        or integer ids
    :returns: ``(corpus, report)``
    """
    name, lines = _read_lines(source)
    report = LoadReport(source=name)
    schema = list(schema) if schema is not None else None
    examples = []

    for line_number, raw in enumerate(lines, start=1):
        text, replaced = decode_line(raw)
        report.replaced_characters += replaced
        text = text.rstrip('\r\n')

        if not text.strip():
            continue

        parts = text.split('\t')
        if len(parts) < 2:
            raise ParseError('expected label<TAB>text', line_number)
        if len(parts) > 3:
            raise ParseError('too many tab separated fields', line_number)

        label = _resolve_label(parts[0], schema, line_number)
        if label < 0:
            raise SchemaError(f'line {line_number}: negative label {label}')

        split = parts[2].strip() if len(parts) == 3 else None
        if split is not None and split not in SPLIT_NAMES:
            raise ParseError(f'unknown split {split!r}', line_number)

        tokens = tokenize(parts[1])
        if not tokens:
            logger.warning(
                'Rejected line %s of %s: empty text after tokenization',
                line_number, name
            )
            report.rejected.append((line_number, 'empty text'))
            continue

        examples.append(LabeledExample(
            tokens=tuple(tokens),
            label=label,
            line_index=line_number,
            split=split,
        ))

    if schema is not None:
        class_names = schema
    else:
        top = max((example.label for example in examples), default=-1)
        class_names = [str(label) for label in range(top + 1)]

    corpus = Corpus(examples=examples, class_names=class_names, source=name)

    report.accepted = len(examples)
    report.num_classes = corpus.num_classes
    report.average_length = corpus.average_length

    logger.info(
        'Loaded %s examples with %s classes from %s (%s rejected)',
        report.accepted, report.num_classes, name, len(report.rejected)
    )

    return corpus, report


@dataclass
class SplitPlan:
    mode: str
    seed: int = 0
    train: list = field(default_factory=list)
    dev: list = field(default_factory=list)
    test: list = field(default_factory=list)
    folds: list = field(default_factory=list)

    def fold_assignment(self, size):
        assignment = np.full(size, -1, dtype=np.int64)
        for fold, indices in enumerate(self.folds):
            assignment[indices] = fold
        return assignment

    def iter_folds(self):
        """Yields ``(fold, train_indices, test_indices)``"""
        for fold, test in enumerate(self.folds):
            train = np.concatenate([
                indices for other, indices in enumerate(self.folds)
                if other != fold
            ])
            yield fold, np.sort(train), np.sort(test)


def make_splits(corpus, mode=SPLIT_CV, k=10, seed=0):
    """
    Split plan for a corpus

    ``fixed_test`` keeps the file given train/dev/test assignment in file
    order, ``cv`` shuffles with ``seed`` and deals ``k`` near-equal folds.
    """
    size = len(corpus)

    if mode == SPLIT_FIXED_TEST:
        if not any(e.split == SPLIT_TEST for e in corpus.examples):
            raise ConfigError(
                'fixed_test split requested but the corpus declares no '
                'test rows'
            )
        plan = SplitPlan(mode=mode, seed=seed)
        for index, example in enumerate(corpus.examples):
            getattr(plan, example.split or SPLIT_TRAIN).append(index)
        return plan

    if mode != SPLIT_CV:
        raise ConfigError(f'Unknown split mode {mode!r}')
    if k < 2:
        raise ConfigError(f'k must be at least 2, got {k}')
    if k > size:
        raise ConfigError(f'k={k} exceeds the dataset size {size}')

    order = np.random.default_rng(seed).permutation(size)
    return SplitPlan(
        mode=mode,
        seed=seed,
        folds=[np.sort(fold) for fold in np.array_split(order, k)],
    )


def corpus_statistics(corpus, vocabulary=None, matched=None):
    """Summary columns of a dataset: c, l, N, V, V_word and test size"""
    test_size = sum(1 for e in corpus.examples if e.split == SPLIT_TEST)
    return {
        'c': corpus.num_classes,
        'l': round(corpus.average_length, 2),
        'N': len(corpus),
        'V': vocabulary.num_words if vocabulary is not None else None,
        'V_word': matched,
        'Test': test_size if test_size else SPLIT_CV.upper(),
    }


FILLER_WORDS = tuple(f'w{index}' for index in range(30))


def synthetic_keyword_corpus(size=200, seed=0, min_length=4, max_length=8):
    """
    Balanced binary corpus decided by a single keyword

    Every sentence holds filler tokens plus either ``good`` (positive) or
    ``bad`` (negative) at a random position.
    """
    rng = np.random.default_rng(seed)
    examples = []

    for index in range(size):
        label = index % 2
        length = int(rng.integers(min_length, max_length + 1))
        tokens = list(rng.choice(FILLER_WORDS, size=length - 1))
        tokens.insert(int(rng.integers(0, length)), 'good' if label else 'bad')
        examples.append(LabeledExample(
            tokens=tuple(str(token) for token in tokens),
            label=label,
            line_index=index + 1,
        ))

    return Corpus(
        examples=examples,
        class_names=['negative', 'positive'],
        source='synthetic',
    )
