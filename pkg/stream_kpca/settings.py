"""Django settings for the stream_kpca project, read from the environment through django-environ."""
import os
import sys
from pathlib import Path

import environ


BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env()
environ.Env.read_env(os.path.join(BASE_DIR, '.env'))


SECRET_KEY = env('SECRET_KEY', default='stream-kpca-local-only')
DEBUG = env.bool('DEBUG', default=False)


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'sketching',
    'evaluation',
]

MIDDLEWARE = []


# Database
# Only used when a benchmark is recorded (`kpca benchmark --record LABEL`).

DATABASES = {
    'default': env.db('DATABASE_URL', default=f"sqlite:///{BASE_DIR / 'db.sqlite3'}"),
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Internationalization

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True


REST_FRAMEWORK = {
    # keep full float precision in JSON mirrors of reports and model headers
    'COERCE_DECIMAL_TO_STRING': False,
}


# Streaming kernel PCA

STREAM_KPCA = {
    # largest n for which the exact n x n gram oracle is materialized
    'ORACLE_MAX_N': env.int('STREAM_KPCA_ORACLE_MAX_N', default=5000),
    'DEFAULT_SIGMA': env.float('STREAM_KPCA_DEFAULT_SIGMA', default=1.0),
    'TIMING_REPEATS': env.int('STREAM_KPCA_TIMING_REPEATS', default=3),
    'CSV_CHUNK_ROWS': env.int('STREAM_KPCA_CSV_CHUNK_ROWS', default=4096),
    'RECONSTRUCT_CHUNK_ROWS': env.int('STREAM_KPCA_RECONSTRUCT_CHUNK_ROWS', default=1024),
    'DEFAULT_TEST_SIZE': env.int('STREAM_KPCA_DEFAULT_TEST_SIZE', default=100),
}


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': sys.stderr,
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': env('STREAM_KPCA_LOG_LEVEL', default='INFO'),
    },
}
