# Common settings

import os

from django.core.exceptions import ImproperlyConfigured

import dj_database_url
import sentry_sdk
from sentry_sdk.integrations.django import DjangoIntegration

# From seisfm/seisfm/settings/base.py to seisfm/
PROJECT_ROOT = os.path.join(os.path.abspath(os.path.dirname(__file__)), os.pardir, os.pardir)

LOGS_PATH = os.path.join(PROJECT_ROOT, 'logs')
if not os.path.isdir(LOGS_PATH):
    os.mkdir(LOGS_PATH)


def get_env_var(name):
    """Attempts to retrieve the named environment variable. If the name does
    not exist in the environment, an exception is raised."""

    try:
        return os.environ[name]
    except KeyError:
        error_message = "The '%s' environment variable is not set" % name
        raise ImproperlyConfigured(error_message)

# Reports go to a SQLite file next to manage.py unless DATABASE_URL says otherwise
DATABASES = {
    'default': dj_database_url.config(default='sqlite:///' + os.path.join(PROJECT_ROOT, 'seisfm.sqlite3')),
}

# Failed grid rows are logged as exceptions, so they reach Sentry when it is set up
if 'SENTRY_DSN' in os.environ:
    sentry_sdk.init(
        dsn=get_env_var('SENTRY_DSN'),
        integrations=[DjangoIntegration()]
    )

TIME_ZONE = 'UTC'
LANGUAGE_CODE = 'en-us'
USE_I18N = False
USE_TZ = True

# Overridden in production; nothing here is served over HTTP
SECRET_KEY = os.environ.get('SECRET_KEY', 'seisfm-desk-only-key')

DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'

INSTALLED_APPS = (
    'django.contrib.contenttypes',
    'benchmarks',
)

# Precision of training and inference; gradient checks use float64 regardless
SEISFM_COMPUTE_DTYPE = 'float32'

# Every key an experiment file may set. Values are strings, parsed by
# benchmarks.config; comma lists expand into grids.
SEISFM_EXPERIMENT_DEFAULTS = {
    'name': 'desk',
    'seed': '0',
    'output_dir': os.path.join(PROJECT_ROOT, 'runs', 'desk'),

    'encoders': 'conv-tiny,swin-tiny,vit-tiny,hybrid-tiny',
    'tasks': 'demultiple,interpolation,denoise',
    'strategies': 'frozen,fine-tuned,scratch',

    'decoder.skip_connections': 'true',
    'decoder.block': 'modern-conv',
    'decoder.upsample': 'bilinear',
    'decoder.bottleneck_multiplier': '2',
    'decoder.head_channels': '16',

    'data.workers': '1',
    'data.demultiple.count': '2000',
    'data.interpolation.count': '2000',
    'data.denoise.count': '2000',
    'data.demultiple.shape': '64,512',
    'data.shot.shape': '256,128',
    'data.cut.shape': '64,64',
    'data.interpolation.mask_ratio': '0.3',
    'data.interpolation.pattern': 'random',
    'data.denoise.level': '0.2',
    'data.denoise.distribution': 'gaussian',
    'data.denoise.eval_distribution': 'uniform',
    # Dataset-size sweep, e.g. 250,500,1000,2000; empty trains on the full split
    'data.sizes': '',

    'train.lr': '0.001',
    'train.weight_decay': '0.01',
    'train.batch': '8',
    'train.loss': 'l1',
    'train.epochs': '10',
    'train.epochs.demultiple': '10',
    'train.epochs.interpolation': '20',
    'train.epochs.denoise': '20',

    'pretrain.count': '200',
    'pretrain.epochs': '30',
    'pretrain.mask_ratio': '0.6',

    'bench.timing': 'true',
    'bench.batch': '8',
    'bench.warmup': '1',
    'bench.reps': '3',

    'report.formats': 'csv,json',
    'report.scatter': 'params,dataset_size,latency',
    'report.log_x': 'dataset_size',
    'report.min_combined': '',
}

PACKAGES = ('tensorkit', 'encoders', 'decoder', 'seisdata', 'training', 'metrics', 'benchmarks')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'seisfm_log': {
            'format': '%(asctime)s | [%(process)s] [%(levelname)s] %(name)s: %(message)s',
        },
        'seisfm_console': {
            'format': '[%(process)s] [%(levelname)s] %(message)s',
        },
        'timing_log': {
            'format': '%(asctime)s [%(process)s]: at=%(levelname)s %(message)s',
            'datefmt': "%Y-%m-%dT%H:%M:%S%z",
        },
    },
    'handlers': {
        'logfile_seisfm': {
            'level': 'DEBUG',
            'class': 'logging.FileHandler',
            'filename': os.path.join(LOGS_PATH, 'seisfm.log'),
            'formatter': 'seisfm_log',
        },
        'console_seisfm': {
            'level': 'INFO',
            'class': 'logging.StreamHandler',
            'formatter': 'seisfm_console',
        },
        'logfile_timing': {
            'level': 'INFO',
            'class': 'logging.FileHandler',
            'filename': os.path.join(LOGS_PATH, 'timing.log'),
            'formatter': 'timing_log',
        },
    },
    'loggers': dict(
        {package: {
            'handlers': ['logfile_seisfm', 'console_seisfm'],
            'level': 'INFO',
            'propagate': True,
        } for package in PACKAGES},
        timing={
            'handlers': ['logfile_timing'],
            'level': 'INFO',
            'propagate': False,
        },
    ),
}
