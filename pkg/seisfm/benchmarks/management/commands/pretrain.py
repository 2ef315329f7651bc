"""MIM pre-training of the experiment's encoders."""
from benchmarks.management.base import ExperimentCommand
from benchmarks.runner import Experiment


class Command(ExperimentCommand):
    help = "Pre-trains every configured encoder by masked image modelling"

    def add_experiment_arguments(self, parser):
        parser.add_argument('--encoder', action='append', help="Only pre-train this encoder (repeatable)")

    def handle_experiment(self, config, /, **options):
        experiment = Experiment(config)
        names = options['encoder'] or [name for name, _ in config.encoders]
        for name in names:
            config.encoder(name)
            self.stdout.write("%s: %s" % (name, experiment.checkpoint(name, refresh=True)))
