import json

from django import forms
from django.core.exceptions import ValidationError
from django.forms.forms import NON_FIELD_ERRORS

from .config import TrainConfig
from .constants import (
    OPTIMIZER_CHOICES,
    PRECISION_CHOICES,
    SEMANTIC_AXIS_CHOICES,
)
from .exceptions import ConfigError


class NumberListField(forms.Field):
    """Accepts a JSON list, a single number or a comma separated string"""
    item_type = float
    default_error_messages = {
        'invalid': 'Enter a list of numbers.',
        'empty': 'Enter at least one value.',
    }

    def to_python(self, value):
        if value is None or value == '':
            return None
        if isinstance(value, str):
            try:
                value = json.loads(f'[{value.strip("[]")}]')
            except ValueError:
                raise ValidationError(
                    self.error_messages['invalid'], code='invalid'
                )
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = [value]
        if not isinstance(value, (list, tuple)):
            raise ValidationError(
                self.error_messages['invalid'], code='invalid'
            )
        if not value:
            raise ValidationError(self.error_messages['empty'], code='empty')
        return tuple(self.convert(item) for item in value)

    def convert(self, item):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ValidationError(
                self.error_messages['invalid'], code='invalid'
            )
        return self.item_type(item)


class IntegerListField(NumberListField):
    item_type = int
    default_error_messages = {
        'invalid': 'Enter a list of whole numbers.',
    }

    def convert(self, item):
        number = super().convert(item)
        if number != item:
            raise ValidationError(
                self.error_messages['invalid'], code='invalid'
            )
        return number


class TrainConfigForm(forms.Form):
    """
    Validates a JSON run configuration

    Every key is optional, missing keys fall back to ``TrainConfig``
    defaults. All problems are reported at once through ``errors``.
    """
    hidden_size = forms.IntegerField(required=False, min_value=1)
    embedding_dim = forms.IntegerField(required=False, min_value=1)
    channels = forms.IntegerField(required=False, min_value=1)
    rv = forms.BooleanField(required=False)
    l2 = forms.FloatField(required=False, min_value=0)
    filter_sizes = IntegerListField(required=False)
    filter_maps = forms.IntegerField(required=False, min_value=1)
    dropout = forms.FloatField(required=False, min_value=0, max_value=0.99)
    keep_probabilities = NumberListField(required=False)
    attention_dim = forms.IntegerField(required=False, min_value=1)
    semantic_axis = forms.ChoiceField(
        required=False, choices=SEMANTIC_AXIS_CHOICES
    )
    optimizer = forms.ChoiceField(required=False, choices=OPTIMIZER_CHOICES)
    learning_rate = forms.FloatField(required=False, min_value=0)
    batch_size = forms.IntegerField(required=False, min_value=1)
    epochs = forms.IntegerField(required=False, min_value=1)
    patience = forms.IntegerField(required=False, min_value=1)
    dev_fraction = forms.FloatField(required=False, min_value=0, max_value=0.5)
    seed = forms.IntegerField(required=False, min_value=0)
    precision = forms.ChoiceField(required=False, choices=PRECISION_CHOICES)
    max_length = forms.IntegerField(required=False, min_value=1)
    rare_word_threshold = forms.IntegerField(required=False, min_value=1)
    oov_range = forms.FloatField(required=False, min_value=0)
    embeddings_path = forms.CharField(required=False)
    freeze_embeddings = forms.BooleanField(required=False)

    def clean(self):
        cleaned_data = super().clean()

        unknown = sorted(set(self.data) - set(self.fields))
        for key in unknown:
            self.add_error(None, f'Unknown configuration key {key!r}.')

        if not self.errors:
            try:
                self._config = TrainConfig(**self._present(cleaned_data))
            except ConfigError as error:
                for message in error.messages:
                    self.add_error(None, message)

        return cleaned_data

    @staticmethod
    def _present(cleaned_data):
        return {
            name: value for name, value in cleaned_data.items()
            if value is not None and value != ''
        }

    def to_config(self):
        if not self.is_valid():
            raise ConfigError(self.error_list())
        return self._config

    def error_list(self):
        messages = []
        for field, errors in self.errors.items():
            for message in errors:
                if field == NON_FIELD_ERRORS:
                    messages.append(message)
                else:
                    messages.append(f'{field}: {message}')
        return messages


def parse_config(document=None, **overrides):
    """
    ``TrainConfig`` from a JSON document and command line overrides

    Overrides set to ``None`` are ignored.
    """
    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ConfigError('the configuration must be a JSON object')

    data = dict(document)
    data.update({k: v for k, v in overrides.items() if v is not None})
    if 'channels' in overrides and overrides['channels'] is not None:
        probabilities = data.get('keep_probabilities')
        if isinstance(probabilities, (list, tuple)) and len(
                set(probabilities)) == 1:
            data['keep_probabilities'] = list(probabilities[:1])

    form = TrainConfigForm(data=data)
    return form.to_config()


def read_config_document(path):
    try:
        with open(path, encoding='utf-8') as handle:
            document = json.load(handle)
    except OSError as error:
        raise ConfigError(f'cannot read config {path}: {error}')
    except ValueError as error:
        raise ConfigError(f'config {path} is not valid JSON: {error}')
    if not isinstance(document, dict):
        raise ConfigError(f'config {path} must hold a JSON object')
    return document


def load_config(path=None, **overrides):
    document = read_config_document(path) if path else {}
    return parse_config(document, **overrides)
