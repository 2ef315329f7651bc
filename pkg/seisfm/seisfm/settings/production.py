from .base import *

if bool(os.environ.get('FORCE_DEBUG_MODE')):
    DEBUG = True
else:
    DEBUG = False

SECRET_KEY = get_env_var('SECRET_KEY')

# Production report databases live on postgres
DATABASES = {
    'default': dj_database_url.parse(get_env_var('DATABASE_URL')),
}

sentry_sdk.init(
    dsn=get_env_var('SENTRY_DSN'),
    integrations=[DjangoIntegration()]
)
