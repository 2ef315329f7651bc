"""Scores the saved models of an experiment on the held-out splits."""
import os

from django.core.management.base import CommandError

from benchmarks.management.base import ExperimentCommand
from benchmarks.runner import Experiment


class Command(ExperimentCommand):
    help = "Evaluates the models written by `train` and writes <out>/metrics.json"

    def handle_experiment(self, config, /, **options):
        experiment = Experiment(config)
        results = []
        for row_name, name, label, decoder_config, strategy, size in experiment.grid():
            for task in config.tasks:
                path = experiment.model_path(row_name, strategy, task, size)
                if not os.path.exists(path):
                    raise CommandError("No trained model at %s; run `train` first" % path)
                model = experiment.load_model(name, decoder_config, task, path)
                record = experiment.score(model, task, timing=False)
                results.append(dict(record.as_dict(), name=row_name, strategy=strategy, decoder=label,
                                    dataset_size=size or 0))
        self.write_json(config.path('metrics.json'), {'experiment': config.name, 'seed': config.seed,
                                                      'records': results})
