from django.db import models

from .constants import RUN_COMPLETED, RUN_FAILED


class TrainingRunQuerySet(models.QuerySet):

    use_for_related_fields = True

    def completed(self):
        return self.filter(status=RUN_COMPLETED)

    def failed(self):
        return self.filter(status=RUN_FAILED)

    def for_command(self, command):
        return self.filter(command=command)
