import os
import tempfile
import unittest

from benchmarks.config import (
    build_experiment,
    decoder_label,
    load_experiment,
    merge_values,
    parse_config_text,
    read_config_file,
)
from decoder import DecoderConfig
from seisdata import TASKS, UNIFORM
from seisfm.exceptions import ConfigurationError
from training.downstream import STRATEGIES

import benchmarks.tests.helper as helper


class ParseConfigTextTests(unittest.TestCase):

    def test_comments_and_whitespace(self):
        values = parse_config_text("# header\n\n  train.lr = 0.005  # faster\nname=x\n")
        self.assertEqual(list(values.items()), [('train.lr', '0.005'), ('name', 'x')])

    def test_empty_value_allowed(self):
        self.assertEqual(parse_config_text("report.min_combined=\n")['report.min_combined'], '')

    def test_duplicate_key(self):
        with self.assertRaisesRegex(ConfigurationError, "exp.cfg:2: duplicate"):
            parse_config_text("seed=1\nseed=2\n", 'exp.cfg')

    def test_missing_equals_names_line(self):
        with self.assertRaisesRegex(ConfigurationError, "exp.cfg:3"):
            parse_config_text("seed=1\n\njust words\n", 'exp.cfg')

    def test_read_config_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'a.cfg')
            with open(path, 'w') as f:
                f.write("seed=7\n")
            self.assertEqual(read_config_file(path)['seed'], '7')
            with self.assertRaises(ConfigurationError):
                read_config_file(os.path.join(directory, 'missing.cfg'))


class DefaultExperimentTests(unittest.TestCase):

    def setUp(self):
        self.config = load_experiment()

    def test_full_grid(self):
        self.assertEqual([n for n, _ in self.config.encoders], ['conv-tiny', 'swin-tiny', 'vit-tiny', 'hybrid-tiny'])
        self.assertEqual(self.config.tasks, TASKS)
        self.assertEqual(self.config.strategies, STRATEGIES)
        self.assertEqual(len(self.config.decoders), 1)

    def test_decoder_defaults(self):
        label, decoder = self.config.decoders[0]
        self.assertEqual(label, 'skip-modern-conv-bilinear-x2')
        self.assertEqual(decoder, DecoderConfig())

    def test_training_defaults(self):
        train = self.config.train
        self.assertEqual(train.lr, 0.001)
        self.assertEqual(train.weight_decay, 0.01)
        self.assertEqual(train.loss, 'l1')

    def test_denoise_evaluated_on_uniform_noise(self):
        self.assertEqual(self.config.data.for_evaluation().noise_distribution, UNIFORM)

    def test_as_text_rebuilds_equal_config(self):
        rebuilt = build_experiment(merge_values(parse_config_text(self.config.as_text())))
        self.assertEqual(rebuilt, self.config)


class OverrideTests(unittest.TestCase):

    def load(self, **overrides):
        return load_experiment(overrides=overrides)

    def test_seed_and_out_flags_win(self):
        config = load_experiment(seed=11, out='/tmp/elsewhere', overrides={'seed': '5'})
        self.assertEqual(config.seed, 11)
        self.assertEqual(config.train.seed, 11)
        self.assertEqual(config.output_dir, '/tmp/elsewhere')
        self.assertEqual(config.path('report.csv'), '/tmp/elsewhere/report.csv')

    def test_file_then_overrides(self):
        with tempfile.TemporaryDirectory() as directory:
            path = helper.write_config(directory)
            config = load_experiment(path, overrides={'tasks': 'denoise'})
        self.assertEqual(config.name, 'tiny')
        self.assertEqual(config.tasks, ('denoise',))

    def test_unknown_key(self):
        with self.assertRaisesRegex(ConfigurationError, "train.learning_rate"):
            self.load(**{'train.learning_rate': '0.1'})

    def test_encoder_override(self):
        config = load_experiment(overrides=helper.tiny_values('/tmp/x'))
        encoder = config.encoder('conv-tiny')
        self.assertEqual(encoder.stage_channels, (4, 4, 8, 8))
        self.assertEqual(encoder.patch_stride, 2)

    def test_encoder_override_errors(self):
        for key, value in (('encoder.conv-tiny.window', '2,3'),
                           ('encoder.conv-huge.depth', '3'),
                           ('encoder.conv-tiny.colour', '1'),
                           ('encoder.conv-tiny.stage_channels', 'a,b,c,d')):
            with self.assertRaises(ConfigurationError):
                self.load(**{key: value})

    def test_unknown_encoder_in_grid(self):
        config = self.load(encoders='conv-tiny')
        with self.assertRaises(ConfigurationError):
            config.encoder('vit-tiny')

    def test_decoder_grid(self):
        config = self.load(**{'decoder.skip_connections': 'true,false', 'decoder.block': 'modern-conv,double-conv'})
        labels = [label for label, _ in config.decoders]
        self.assertEqual(labels, ['skip-modern-conv-bilinear-x2', 'skip-double-conv-bilinear-x2',
                                  'noskip-modern-conv-bilinear-x2', 'noskip-double-conv-bilinear-x2'])
        self.assertEqual(decoder_label(config.decoders[2][1]), labels[2])

    def test_per_task_epochs(self):
        config = self.load(**{'train.epochs.denoise': '7'})
        self.assertEqual(config.train.epochs_for('denoise'), 7)
        self.assertEqual(config.train.epochs_for('demultiple'), 10)

    def test_pretrain_checkpoints(self):
        config = self.load(**{'pretrain.checkpoint.conv-tiny': '/ckpt/conv.spck'})
        self.assertEqual(config.pretrain.checkpoints, {'conv-tiny': '/ckpt/conv.spck'})

    def test_sizes_and_report_settings(self):
        config = self.load(**{'data.sizes': '250,500', 'report.min_combined': '2.5', 'bench.timing': 'off'})
        self.assertEqual(config.dataset_sizes, (250, 500))
        self.assertEqual(config.report.min_combined, 2.5)
        self.assertFalse(config.bench.timing)

    def test_invalid_values(self):
        for key, value in (('tasks', ''),
                           ('tasks', 'demultiple,deghosting'),
                           ('strategies', 'frozen,thawed'),
                           ('data.demultiple.count', '1'),
                           ('data.sizes', '0,10'),
                           ('data.cut.shape', '64'),
                           ('data.denoise.distribution', 'laplace'),
                           ('bench.reps', '2'),
                           ('bench.timing', 'maybe'),
                           ('train.lr', '0'),
                           ('train.loss', 'huber'),
                           ('decoder.block', 'inception'),
                           ('seed', 'abc')):
            with self.assertRaises(ConfigurationError, msg="%s=%s" % (key, value)):
                self.load(**{key: value})

    def test_duplicate_encoder_names(self):
        with self.assertRaises(ConfigurationError):
            self.load(encoders='conv-tiny,conv-tiny')
