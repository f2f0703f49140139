import json

from mahnn.data import corpus_statistics
from mahnn.exceptions import ConfigError
from mahnn.management.base import MahnnCommand
from mahnn.utils.converters import FORMATS, check_sources, convert
from mahnn.utils.files import write_atomic
from mahnn.utils.run_manifest import RunRecorder

DATA_FILE = 'data.tsv'
REPORT_FILE = 'load_report.json'


class Command(MahnnCommand):
    help = (
        'Converts a raw MR, Subj, MPQA or SST distribution to '
        'label<TAB>text[<TAB>split], e.g. --format mr '
        '--source negative=rt-polarity.neg --source positive=rt-polarity.pos'
    )

    def add_arguments(self, parser):
        parser.add_argument('--format', required=True, choices=sorted(FORMATS))
        parser.add_argument(
            '--source', action='append', default=[], metavar='ROLE=PATH',
            help='raw input file, repeat once per role'
        )
        self.add_out_argument(parser)

    @staticmethod
    def _sources(values):
        sources, errors = {}, []
        for value in values:
            role, sep, path = value.partition('=')
            if not sep or not role or not path:
                errors.append(f'--source {value!r} is not ROLE=PATH')
            else:
                sources[role] = path
        if errors:
            raise ConfigError(errors)
        return sources

    def run(self, **options):
        sources = self._sources(options['source'])
        check_sources(options['format'], sources)
        out_dir = self.out_dir(options)
        recorder = RunRecorder(
            'mahnn_convert', out_dir, inputs=sources,
        )

        try:
            conversion = convert(
                options['format'], sources, out_dir / DATA_FILE
            )
            corpus, load = self.load_data(
                out_dir / DATA_FILE, schema=conversion.class_names
            )
        except Exception as e:
            recorder.fail(e)
            raise

        report = {
            'conversion': conversion.to_dict(),
            'load': load.to_dict(),
            'statistics': corpus_statistics(corpus),
        }
        recorder.add_output(
            out_dir / DATA_FILE,
            write_atomic(out_dir / REPORT_FILE,
                         json.dumps(report, indent=2, sort_keys=True)),
        )
        recorder.finish(results={'written': conversion.written})
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {conversion.written} examples to {out_dir / DATA_FILE}'
        ))
