from django.apps import AppConfig


class MahnnConfig(AppConfig):
    name = 'mahnn'
    verbose_name = 'MahNN text classification'
