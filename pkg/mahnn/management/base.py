import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from mahnn.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_DATA_ERROR,
    PRECISION_CHOICES,
)
from mahnn.data import load_tsv
from mahnn.exceptions import ConfigError, ParseError, SchemaError
from mahnn.forms import load_config


logger = logging.getLogger(__name__)

DATA_ERRORS = (ParseError, SchemaError, OSError)


class MahnnCommand(BaseCommand):
    """
    Shared plumbing of the ``mahnn_*`` commands

    Subclasses implement ``run(**options)``. Configuration problems exit
    with code 2 and unreadable data with code 3.
    """

    def add_config_arguments(self, parser):
        parser.add_argument(
            '--config', help='JSON document with the run configuration'
        )
        parser.add_argument('--seed', type=int)
        parser.add_argument(
            '--precision', choices=[choice for choice, _ in PRECISION_CHOICES]
        )
        parser.add_argument('--channels', type=int)
        parser.add_argument(
            '--rv', action='store_true',
            help='disable the semantic attention (MahNN-rv)'
        )

    def add_out_argument(self, parser):
        parser.add_argument(
            '--out', required=True, help='directory receiving every output'
        )

    def resolve_config(self, options, **extra):
        """JSON document, then command line flags, then ``extra``"""
        overrides = {
            'seed': options.get('seed'),
            'precision': options.get('precision'),
            'channels': options.get('channels'),
            'rv': options.get('rv') or None,
        }
        overrides.update(extra)
        return load_config(options.get('config'), **overrides)

    def load_data(self, path, schema=None):
        if not path:
            raise ConfigError('--data is required')
        corpus, report = load_tsv(path, schema=schema)
        if len(corpus) == 0:
            raise ParseError(f'{path} holds no usable examples')
        return corpus, report

    def out_dir(self, options):
        directory = Path(options['out'])
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except ConfigError as e:
            logger.error('Invalid configuration: %s', e)
            raise CommandError(
                '\n'.join(['Invalid configuration:'] + e.messages),
                returncode=EXIT_CONFIG_ERROR
            )
        except DATA_ERRORS as e:
            logger.error('Unusable data: %s', e)
            raise CommandError(
                f'Unusable data: {e}', returncode=EXIT_DATA_ERROR
            )

    def run(self, **options):
        raise NotImplementedError('subclasses must implement run()')
