import logging
from collections import Counter
from pathlib import Path

import numpy as np

from .constants import PAD_ID, PAD_TOKEN, UNK_ID, UNK_TOKEN
from .exceptions import ConfigError, ContractError, ParseError
from .tensor import Tensor, get_dtype, take_rows


logger = logging.getLogger(__name__)


class Vocabulary:
    """Token to id map, ids 0 and 1 are reserved for PAD and UNK"""

    def __init__(self, tokens=(), counts=None):
        self.id_to_token = [PAD_TOKEN, UNK_TOKEN]
        self.token_to_id = {PAD_TOKEN: PAD_ID, UNK_TOKEN: UNK_ID}
        self.counts = Counter(counts or {})

        for token in tokens:
            self.add(token)

    def __len__(self):
        return len(self.id_to_token)

    def __contains__(self, token):
        return token in self.token_to_id

    def __iter__(self):
        return iter(self.id_to_token)

    @property
    def pad_id(self):
        return PAD_ID

    @property
    def unk_id(self):
        return UNK_ID

    @property
    def num_words(self):
        return len(self.id_to_token) - 2

    def add(self, token):
        if token not in self.token_to_id:
            self.token_to_id[token] = len(self.id_to_token)
            self.id_to_token.append(token)
        return self.token_to_id[token]

    def lookup(self, token):
        return self.token_to_id.get(token, UNK_ID)

    def is_rare(self, token, threshold):
        return self.counts.get(token, 0) < threshold

    def to_text(self):
        return ''.join(f'{token}\n' for token in self.id_to_token)

    def save(self, path):
        Path(path).write_text(self.to_text(), encoding='utf-8')

    @classmethod
    def from_lines(cls, lines):
        tokens = [line.rstrip('\n') for line in lines]
        if tokens[:2] != [PAD_TOKEN, UNK_TOKEN]:
            raise ParseError('vocabulary must start with the PAD and UNK '
                             'tokens', 1)
        return cls(tokens[2:])

    @classmethod
    def load(cls, path):
        with open(path, encoding='utf-8') as handle:
            return cls.from_lines(handle.read().splitlines())


def build_vocabulary(token_lists):
    """Vocabulary in first-seen order, with occurrence counts"""
    counts = Counter()
    vocabulary = Vocabulary()

    for tokens in token_lists:
        for token in tokens:
            counts[token] += 1
            vocabulary.add(token)

    vocabulary.counts = counts
    return vocabulary


class EmbeddingTable:
    """
    Trainable ``V x d`` word matrix

    ``matched`` flags rows that hold a pretrained vector, every other row is
    filled by ``init_oov``.
    """

    def __init__(self, weight, matched=None, trainable=True):
        weight = np.asarray(weight)
        if weight.ndim != 2:
            raise ContractError('embedding weight must be a matrix')
        if not np.isfinite(weight).all():
            raise ContractError('embedding weight holds non-finite values')

        self.weight = Tensor(
            weight, requires_grad=trainable, name='embedding.weight'
        )
        if matched is None:
            matched = np.zeros(weight.shape[0], dtype=bool)
        self.matched = np.asarray(matched, dtype=bool)

    @classmethod
    def empty(cls, num_rows, dim, trainable=True):
        return cls(np.zeros((num_rows, dim)), trainable=trainable)

    @property
    def num_rows(self):
        return self.weight.shape[0]

    @property
    def dim(self):
        return self.weight.shape[1]

    @property
    def matched_count(self):
        return int(self.matched.sum())

    @property
    def trainable(self):
        return self.weight.requires_grad

    @trainable.setter
    def trainable(self, value):
        self.weight.requires_grad = value

    def lookup(self, ids):
        return take_rows(self.weight, ids)

    def named_parameters(self):
        return {'embedding.weight': self.weight}


def _open_text(source):
    if isinstance(source, (str, Path)):
        with open(source, encoding='utf-8', errors='replace') as handle:
            return handle.read().splitlines()
    if hasattr(source, 'read'):
        return source.read().splitlines()
    return [line.rstrip('\n') for line in source]


def load_word2vec_text(source, vocabulary, dim, rare_word_threshold=1):
    """
    Reads word2vec text vectors for the tokens of ``vocabulary``

    The first line is the ``V d`` header, then one ``token v1 ... vd`` line
    per vector. Tokens seen fewer than ``rare_word_threshold`` times in the
    corpus keep a random vector.

    :returns: ``(table, matched_count)``, unmatched rows are zero until
        ``init_oov`` fills them
    """
    lines = _open_text(source)
    if not lines:
        raise ParseError('missing "V d" header', 1)

    header = lines[0].split()
    if len(header) != 2 or not all(part.isdigit() for part in header):
        raise ParseError('header must be "V d"', 1)
    declared_rows, declared_dim = int(header[0]), int(header[1])

    if declared_dim != dim:
        raise ConfigError(
            f'word2vec vectors have {declared_dim} dimensions, '
            f'the model expects {dim}'
        )

    weight = np.zeros((len(vocabulary), dim), dtype=get_dtype())
    matched = np.zeros(len(vocabulary), dtype=bool)
    rows = 0

    for line_number, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        rows += 1

        token, values = parts[0], parts[1:]
        if len(values) != dim:
            raise ParseError(
                f'expected {dim} values for {token!r}, got {len(values)}',
                line_number
            )
        try:
            vector = np.array(values, dtype=np.float64)
        except ValueError:
            raise ParseError(
                f'non-numeric value in vector of {token!r}', line_number
            ) from None

        if token not in vocabulary:
            continue
        if vocabulary.is_rare(token, rare_word_threshold):
            continue

        index = vocabulary.lookup(token)
        weight[index] = vector
        matched[index] = True

    if rows != declared_rows:
        raise ParseError(
            f'header declares {declared_rows} vectors, found {rows}',
            len(lines)
        )

    table = EmbeddingTable(weight, matched=matched)
    logger.info(
        'Matched %s of %s vocabulary words with pretrained vectors',
        table.matched_count, vocabulary.num_words
    )
    return table, table.matched_count


def init_oov(table, rng, bound=0.25):
    """Fills every unmatched row i.i.d. from U[-bound, bound]"""
    missing = np.flatnonzero(~table.matched)
    if missing.size:
        table.weight.data[missing] = rng.uniform(
            -bound, bound, size=(missing.size, table.dim)
        )
    return table


def encode_and_pad(tokens, length, vocabulary):
    """
    Ids of ``tokens`` front-padded or truncated to ``length``

    :returns: ``(ids, pad_mask)`` where ``pad_mask`` is true at pad positions
    """
    if length < 1:
        raise ContractError(f'length must be at least 1, got {length}')
    if vocabulary.num_words == 0:
        raise ConfigError('vocabulary is empty')

    kept = [vocabulary.lookup(token) for token in list(tokens)[:length]]
    padding = length - len(kept)

    ids = [vocabulary.pad_id] * padding + kept
    pad_mask = [True] * padding + [False] * len(kept)
    return ids, pad_mask


def encode_batch(token_lists, length, vocabulary):
    """``encode_and_pad`` over many sequences, as integer and bool arrays"""
    encoded = [encode_and_pad(t, length, vocabulary) for t in token_lists]
    ids = np.array([pair[0] for pair in encoded], dtype=np.int64)
    masks = np.array([pair[1] for pair in encoded], dtype=bool)
    return ids.reshape(-1, length), masks.reshape(-1, length)


def max_sequence_length(token_lists):
    return max((len(tokens) for tokens in token_lists), default=0)
