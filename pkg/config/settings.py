"""
Django settings for the chiral Dicke laboratory.

The project has no web surface: Django provides the settings layer, the
management-command CLI, the cache framework and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/6.0/ref/settings/
"""

from pathlib import Path
from decouple import config as env

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = env('SECRET_KEY', default='django-insecure-chiral-dicke-lab-local-only')

DEBUG = env('DEBUG', default=True, cast=bool)

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    "chiral",
]

# Sweep datasets are files; nothing is persisted in a database.
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# ===== LOGGING CONFIGURATION =====
LOG_LEVEL = env('LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'worker': {
            'format': '[%(asctime)s: %(levelname)s/%(processName)s] %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'worker',
        },
    },
    'loggers': {
        'chiral': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

# ===== CACHE CONFIGURATION =====
# Exact-diagonalization results are memoised here (see chiral.cache_utils)
CACHES = {
    'default': {
        'BACKEND': env('CHIRAL_CACHE_BACKEND', default='django.core.cache.backends.locmem.LocMemCache'),
        'LOCATION': env('CHIRAL_CACHE_LOCATION', default='chiral-dicke'),
    }
}

# ===== SWEEP / SOLVER CONFIGURATION =====
# Default worker threads for `manage.py sweep` when --threads is not given
CHIRAL_SWEEP_THREADS = env('CHIRAL_SWEEP_THREADS', default=1, cast=int)

# Largest Fock x Dicke basis the ED oracle may assemble
CHIRAL_ED_MAX_DIMENSION = env('CHIRAL_ED_MAX_DIMENSION', default=2_000_000, cast=int)

# ===== SENTRY CONFIGURATION (Error Tracking) =====
# Only initialize Sentry if DSN is provided (long unattended sweeps)
import sentry_sdk
from sentry_sdk.integrations.django import DjangoIntegration


def before_send_sentry(event, hint):
    """Filter out informational events; only warnings and errors are reported"""
    if event.get('level') in ('info', 'debug'):
        return None
    return event


SENTRY_DSN = env('SENTRY_DSN', default='')
if SENTRY_DSN:  # Only enable if DSN is configured
    sentry_sdk.init(
        dsn=SENTRY_DSN,
        integrations=[
            DjangoIntegration(),
        ],
        traces_sample_rate=0,
        send_default_pii=False,
        environment=env('ENVIRONMENT', default='development'),
        before_send=before_send_sentry,
    )
