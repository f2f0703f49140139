import csv
import io
import json
import logging
from pathlib import Path

from mahnn.constants import MODE_INFER
from mahnn.tensor import precision


logger = logging.getLogger(__name__)

EXPORT_BATCH_SIZE = 64
RECORDS_FILE = 'attention.jsonl'
MATRIX_DIRECTORY = 'matrices'


def attention_records(model, corpus):
    """
    Yields one record per example with the syntactic weights and the mean
    semantic weight of every channel over the non-pad positions
    """
    examples = list(corpus)
    length = model.sequence_length

    with precision(model.config.precision):
        ids, masks = model.encode([example.tokens for example in examples])

        for start in range(0, len(examples), EXPORT_BATCH_SIZE):
            stop = start + EXPORT_BATCH_SIZE
            result = model.forward(ids[start:stop], masks[start:stop],
                                   mode=MODE_INFER)
            predictions = result.predictions()

            for offset, example in enumerate(examples[start:stop]):
                kept = ~masks[start + offset]
                channels = []

                for index, weights in enumerate(result.channel_set.syntactic):
                    semantic = result.channel_set.semantic[index]
                    channels.append({
                        'channel': index,
                        'syntactic': [
                            float(value)
                            for value in weights.data[offset][kept]
                        ],
                        'semantic': None if semantic is None else [
                            float(value) for value in
                            semantic.data[offset][kept].mean(axis=-1)
                        ],
                    })

                yield {
                    'line': example.line_index,
                    'tokens': list(example.tokens[:length]),
                    'label': int(example.label),
                    'prediction': int(predictions[offset]),
                    'channels': channels,
                }


def _matrix_csv(record):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['channel'] + record['tokens'])
    for channel in record['channels']:
        writer.writerow(
            [f'syntactic_{channel["channel"]}']
            + [repr(value) for value in channel['syntactic']]
        )
    for channel in record['channels']:
        if channel['semantic'] is not None:
            writer.writerow(
                [f'semantic_{channel["channel"]}']
                + [repr(value) for value in channel['semantic']]
            )
    return buffer.getvalue()


def export_attention(model, corpus, directory):
    """
    Writes ``attention.jsonl`` plus one CSV matrix per example

    :returns: list of written paths
    """
    directory = Path(directory)
    matrices = directory / MATRIX_DIRECTORY
    matrices.mkdir(parents=True, exist_ok=True)

    records_path = directory / RECORDS_FILE
    written = [records_path]

    with open(records_path, 'w', encoding='utf-8', newline='\n') as handle:
        for number, record in enumerate(attention_records(model, corpus)):
            handle.write(json.dumps(record, sort_keys=True) + '\n')

            matrix_path = matrices / f'example_{number:06d}.csv'
            matrix_path.write_text(_matrix_csv(record), encoding='utf-8')
            written.append(matrix_path)

    logger.info(
        'Exported attention weights of %s examples to %s',
        len(written) - 1, directory
    )
    return written
