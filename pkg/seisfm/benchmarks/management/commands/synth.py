"""Writes the task datasets of an experiment as native gather files."""
import os

from benchmarks.management.base import ExperimentCommand
from seisdata import task_datasets, write_dataset


class Command(ExperimentCommand):
    help = "Generates the training and held-out datasets under <out>/data/<task>/"

    def handle_experiment(self, config, /, **options):
        for task in config.tasks:
            training, held_out = task_datasets(task, config.counts[task], config.seed, config.data, config.workers)
            if hasattr(training, 'epoch_samples'):
                training = training.epoch_samples(0)
            directory = config.path('data', task)
            files = write_dataset(training, os.path.join(directory, 'train'))
            files += write_dataset(held_out, os.path.join(directory, 'eval'))
            self.stdout.write("%s: %d training and %d held-out samples (%d files) in %s"
                              % (task, len(training), len(held_out), files, directory))
