"""Downstream training of every grid point, without evaluation."""
from benchmarks.management.base import ExperimentCommand
from benchmarks.runner import Experiment
from training import save_checkpoint


class Command(ExperimentCommand):
    help = "Trains every encoder x decoder x strategy on each task and saves the models"

    def handle_experiment(self, config, /, **options):
        experiment = Experiment(config)
        for row_name, name, _, decoder_config, strategy, size in experiment.grid():
            for task in config.tasks:
                model = experiment.train(name, decoder_config, strategy, task, size)
                path = experiment.model_path(row_name, strategy, task, size)
                save_checkpoint(model.store, path)
                self.stdout.write("%s %s %s: %s" % (row_name, strategy, task, path))
