import json
import logging
from pathlib import Path

import numpy as np

from mahnn.config import TrainConfig
from mahnn.constants import CHECKPOINT_FORMAT_VERSION
from mahnn.embeddings import Vocabulary
from mahnn.exceptions import ConfigError, ParseError
from mahnn.network import MahNN
from mahnn.tensor import precision
from mahnn.utils.files import write_atomic


logger = logging.getLogger(__name__)

CONFIG_FILE = 'config.json'
VOCABULARY_FILE = 'vocabulary.txt'
PARAMETERS_FILE = 'parameters.bin'
MANIFEST_FILE = 'parameters.json'
RNG_FILE = 'rng.json'

CHECKPOINT_FILES = (
    CONFIG_FILE, VOCABULARY_FILE, PARAMETERS_FILE, MANIFEST_FILE, RNG_FILE,
)


def save_checkpoint(model, directory, rng_state=None):
    """
    Writes config, vocabulary, parameters and rng state into ``directory``

    Parameters are concatenated little-endian arrays in ``parameters.bin``,
    ``parameters.json`` lists name, shape, dtype and byte offset of each.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    config = {
        'format_version': CHECKPOINT_FORMAT_VERSION,
        'config': model.config.to_dict(),
        'num_classes': model.num_classes,
        'class_names': model.class_names,
        'sequence_length': model.sequence_length,
    }

    entries = []
    chunks = []
    offset = 0
    for name, tensor in model.named_parameters().items():
        # np.ascontiguousarray promotes 0-d biases to shape (1,)
        array = np.array(tensor.data, order='C')
        raw = array.astype(array.dtype.newbyteorder('<')).tobytes()
        entries.append({
            'name': name,
            'shape': list(tensor.shape),
            'dtype': array.dtype.newbyteorder('<').str,
            'offset': offset,
            'nbytes': len(raw),
            'trainable': tensor.requires_grad,
        })
        chunks.append(raw)
        offset += len(raw)

    manifest = {
        'format_version': CHECKPOINT_FORMAT_VERSION,
        'parameters': entries,
    }

    write_atomic(directory / CONFIG_FILE, json.dumps(config, indent=2))
    write_atomic(directory / VOCABULARY_FILE, model.vocabulary.to_text())
    write_atomic(directory / PARAMETERS_FILE, b''.join(chunks))
    write_atomic(directory / MANIFEST_FILE, json.dumps(manifest, indent=2))
    write_atomic(directory / RNG_FILE, json.dumps(rng_state))

    logger.info(
        'Saved checkpoint with %s parameter tensors to %s',
        len(entries), directory
    )
    return [directory / name for name in CHECKPOINT_FILES]


def load_checkpoint(directory):
    """Rebuilds the saved ``MahNN``, returns ``(model, rng_state)``"""
    directory = Path(directory)
    missing = [
        name for name in CHECKPOINT_FILES if not (directory / name).exists()
    ]
    if missing:
        raise ConfigError(
            [f'checkpoint {directory} lacks {name}' for name in missing]
        )

    saved = json.loads((directory / CONFIG_FILE).read_text(encoding='utf-8'))
    manifest = json.loads(
        (directory / MANIFEST_FILE).read_text(encoding='utf-8')
    )
    for document in (saved, manifest):
        if document.get('format_version') != CHECKPOINT_FORMAT_VERSION:
            raise ConfigError(
                f'unsupported checkpoint format '
                f'{document.get("format_version")!r}'
            )

    config = TrainConfig.from_dict(saved['config'])
    vocabulary = Vocabulary.load(directory / VOCABULARY_FILE)
    raw = (directory / PARAMETERS_FILE).read_bytes()

    state = {}
    for entry in manifest['parameters']:
        end = entry['offset'] + entry['nbytes']
        if end > len(raw):
            raise ParseError(f'parameters.bin is truncated at {entry["name"]}')
        array = np.frombuffer(
            raw[entry['offset']:end], dtype=np.dtype(entry['dtype'])
        )
        state[entry['name']] = array.reshape(entry['shape'])

    with precision(config.precision):
        model = MahNN(
            config, vocabulary,
            num_classes=saved['num_classes'],
            sequence_length=saved['sequence_length'],
            class_names=saved['class_names'],
        )
        model.load_state(state)

    rng_state = json.loads((directory / RNG_FILE).read_text(encoding='utf-8'))
    logger.info('Loaded %s checkpoint from %s', config.variant, directory)
    return model, rng_state
