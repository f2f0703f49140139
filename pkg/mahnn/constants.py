PAD_TOKEN = '<pad>'
UNK_TOKEN = '<unk>'
PAD_ID = 0
UNK_ID = 1

# Added to the syntactic score of padded positions before the softmax
PAD_PENALTY = -99999.0

CHECKPOINT_FORMAT_VERSION = 1

PRECISION_F64 = 'f64'
PRECISION_F32 = 'f32'

PRECISION_CHOICES = (
    (PRECISION_F64, '64-bit'),
    (PRECISION_F32, '32-bit'),
)

OPTIMIZER_ADAM = 'adam'
OPTIMIZER_SGD = 'sgd'

OPTIMIZER_CHOICES = (
    (OPTIMIZER_ADAM, 'Adam'),
    (OPTIMIZER_SGD, 'SGD'),
)

SEMANTIC_AXIS_POSITIONS = 'positions'
SEMANTIC_AXIS_DIMENSIONS = 'dimensions'

SEMANTIC_AXIS_CHOICES = (
    (SEMANTIC_AXIS_POSITIONS, 'Normalize across positions'),
    (SEMANTIC_AXIS_DIMENSIONS, 'Normalize across dimensions'),
)

MODE_TRAIN = 'train'
MODE_INFER = 'infer'

SPLIT_TRAIN = 'train'
SPLIT_DEV = 'dev'
SPLIT_TEST = 'test'

SPLIT_NAMES = (SPLIT_TRAIN, SPLIT_DEV, SPLIT_TEST)

SPLIT_FIXED_TEST = 'fixed_test'
SPLIT_CV = 'cv'

RUN_RUNNING = 1
RUN_COMPLETED = 2
RUN_FAILED = 3

RUN_STATUS_CHOICES = (
    (RUN_RUNNING, 'Running'),
    (RUN_COMPLETED, 'Completed'),
    (RUN_FAILED, 'Failed'),
)

EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_VERIFICATION_FAILURE = 4

SWEEP_PARAMETERS = ('hidden_size', 'channels', 'filter_sizes', 'filter_maps')
