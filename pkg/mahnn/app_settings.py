import os

from django.conf import settings


MAHNN_HIDDEN_SIZE = getattr(settings, 'MAHNN_HIDDEN_SIZE', 100)
MAHNN_EMBEDDING_DIM = getattr(settings, 'MAHNN_EMBEDDING_DIM', 300)
MAHNN_CHANNELS = getattr(settings, 'MAHNN_CHANNELS', 3)
MAHNN_L2 = getattr(settings, 'MAHNN_L2', 0.0005)
MAHNN_FILTER_SIZES = getattr(settings, 'MAHNN_FILTER_SIZES', (3, 4, 5))
MAHNN_FILTER_MAPS = getattr(settings, 'MAHNN_FILTER_MAPS', 100)
MAHNN_DROPOUT = getattr(settings, 'MAHNN_DROPOUT', 0.5)
MAHNN_KEEP_PROBABILITY = getattr(settings, 'MAHNN_KEEP_PROBABILITY', 0.9)
MAHNN_LEARNING_RATE = getattr(settings, 'MAHNN_LEARNING_RATE', 1e-3)
MAHNN_BATCH_SIZE = getattr(settings, 'MAHNN_BATCH_SIZE', 32)
MAHNN_EPOCHS = getattr(settings, 'MAHNN_EPOCHS', 25)
MAHNN_PATIENCE = getattr(settings, 'MAHNN_PATIENCE', 10)
MAHNN_DEV_FRACTION = getattr(settings, 'MAHNN_DEV_FRACTION', 0.1)
MAHNN_PRECISION = getattr(settings, 'MAHNN_PRECISION', 'f64')
MAHNN_OOV_RANGE = getattr(settings, 'MAHNN_OOV_RANGE', 0.25)
MAHNN_RARE_WORD_THRESHOLD = getattr(
    settings, 'MAHNN_RARE_WORD_THRESHOLD', 1
)
MAHNN_FOLDS = getattr(settings, 'MAHNN_FOLDS', 10)

# Worker cap for evaluation fan-out, the environment wins over settings
MAHNN_THREADS = int(
    os.environ.get('MAHNN_THREADS') or getattr(settings, 'MAHNN_THREADS', 4)
)
