"""
Adapters from the raw distribution layouts of the benchmark corpora to the
canonical ``label<TAB>text[<TAB>split]`` format
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from mahnn.constants import SPLIT_DEV, SPLIT_TEST, SPLIT_TRAIN
from mahnn.data import decode_line
from mahnn.exceptions import ConfigError, ParseError
from mahnn.utils.files import write_atomic


logger = logging.getLogger(__name__)

FORMAT_MR = 'mr'
FORMAT_SUBJ = 'subj'
FORMAT_MPQA = 'mpqa'
FORMAT_SST = 'sst'

NEGATIVE_LABELS = {'0', '-1', 'neg', 'negative'}
POSITIVE_LABELS = {'1', '+1', 'pos', 'positive'}


@dataclass
class ConversionReport:
    format: str
    sources: dict
    output: str = ''
    class_names: list = field(default_factory=list)
    label_counts: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)
    replaced_characters: int = 0

    @property
    def written(self):
        return sum(self.label_counts.values())

    def to_dict(self):
        return {
            'format': self.format,
            'sources': self.sources,
            'output': self.output,
            'class_names': self.class_names,
            'label_counts': self.label_counts,
            'written': self.written,
            'skipped': [
                {'source': source, 'line': line, 'reason': reason}
                for source, line, reason in self.skipped
            ],
            'replaced_characters': self.replaced_characters,
        }


def _clean(text):
    return ' '.join(text.split())


def _read(path, report):
    """Yields ``(line_number, text)`` of the non-blank lines of ``path``"""
    with open(path, 'rb') as handle:
        raw_lines = handle.read().splitlines()

    for line_number, raw in enumerate(raw_lines, start=1):
        text, replaced = decode_line(raw)
        report.replaced_characters += replaced
        text = text.strip()
        if text:
            yield line_number, text


def _labelled_files(sources, roles, report):
    """One file per class, ``roles`` maps source name to label id"""
    rows = []
    for role, label in roles.items():
        for _, text in _read(sources[role], report):
            rows.append((label, _clean(text), None))
    return rows


def _mpqa(sources, report):
    rows = []
    path = sources['data']
    for line_number, text in _read(path, report):
        prefix, _, sentence = text.partition(' ')
        prefix = prefix.lower()
        sentence = _clean(sentence)

        if prefix in NEGATIVE_LABELS:
            label = 0
        elif prefix in POSITIVE_LABELS:
            label = 1
        else:
            report.skipped.append(
                (str(path), line_number, f'unknown label {prefix!r}')
            )
            continue
        if not sentence:
            report.skipped.append((str(path), line_number, 'empty text'))
            continue
        rows.append((label, sentence, None))
    return rows


def _sst(sources, report):
    rows = []
    for split in (SPLIT_TRAIN, SPLIT_DEV, SPLIT_TEST):
        if split not in sources:
            continue
        path = sources[split]
        for line_number, text in _read(path, report):
            label, tab, sentence = text.partition('\t')
            sentence = _clean(sentence)
            if not tab or not label.strip().isdigit():
                raise ParseError(
                    f'{path}: expected label<TAB>sentence', line_number
                )
            if not sentence:
                report.skipped.append((str(path), line_number, 'empty text'))
                continue
            rows.append((int(label), sentence, split))
    return rows


FORMATS = {
    FORMAT_MR: {
        'roles': ('negative', 'positive'),
        'class_names': ['negative', 'positive'],
    },
    FORMAT_SUBJ: {
        'roles': ('objective', 'subjective'),
        'class_names': ['objective', 'subjective'],
    },
    FORMAT_MPQA: {
        'roles': ('data',),
        'class_names': ['negative', 'positive'],
    },
    FORMAT_SST: {
        'roles': (SPLIT_TRAIN, SPLIT_DEV, SPLIT_TEST),
        'class_names': None,
    },
}


def check_sources(format_name, sources):
    if format_name not in FORMATS:
        raise ConfigError(
            f'unknown format {format_name!r}, '
            f'expected one of {", ".join(sorted(FORMATS))}'
        )

    roles = FORMATS[format_name]['roles']
    errors = [
        f'unexpected source {name!r} for {format_name}, '
        f'expected {", ".join(roles)}'
        for name in sorted(set(sources) - set(roles))
    ]
    if format_name == FORMAT_SST:
        if not sources:
            errors.append(f'{format_name} needs at least one split source')
    else:
        errors += [
            f'{format_name} needs a {role!r} source'
            for role in roles if role not in sources
        ]
    errors += [
        f'source {path} does not exist'
        for path in sources.values() if not Path(path).is_file()
    ]
    if errors:
        raise ConfigError(errors)


def convert(format_name, sources, output):
    """
    Writes the canonical TSV for one raw corpus

    :param format_name: one of ``mr``, ``subj``, ``mpqa`` or ``sst``
    :param sources: mapping of source role to path, e.g.
        ``{'negative': 'rt-polarity.neg', 'positive': 'rt-polarity.pos'}``
    :param output: destination TSV path
    :returns: ``ConversionReport``
    """
    check_sources(format_name, sources)
    report = ConversionReport(
        format=format_name,
        sources={name: str(path) for name, path in sources.items()},
        output=str(output),
    )

    if format_name == FORMAT_MPQA:
        rows = _mpqa(sources, report)
    elif format_name == FORMAT_SST:
        rows = _sst(sources, report)
    else:
        roles = FORMATS[format_name]['roles']
        rows = _labelled_files(
            sources, {role: label for label, role in enumerate(roles)}, report
        )

    counts = Counter(label for label, _, _ in rows)
    class_names = FORMATS[format_name]['class_names']
    if class_names is None:
        class_names = [str(label) for label in range(max(counts) + 1)] \
            if counts else []
    report.class_names = class_names
    report.label_counts = {
        name: counts.get(label, 0) for label, name in enumerate(class_names)
    }

    lines = []
    for label, text, split in rows:
        text = text.replace('\t', ' ')
        columns = [str(label), text] + ([split] if split else [])
        lines.append('\t'.join(columns))
    write_atomic(output, ''.join(line + '\n' for line in lines))

    logger.info(
        'Converted %s %s examples into %s, skipped %s lines',
        report.written, format_name, output, len(report.skipped)
    )
    return report
