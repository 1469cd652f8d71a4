import django
from django.conf import settings


def configure_standalone() -> None:
    """Configure a minimal Django project around the app so that its
    management commands run outside any host project.

    Only ``rest_framework`` and ``django_pathwise_gp`` are installed; no
    database is configured. Library loggers write to the console, at INFO
    level by default; the commands adjust the level to ``--verbosity``.
    """
    if settings.configured:
        return
    settings.configure(
        INSTALLED_APPS=["rest_framework", "django_pathwise_gp"],
        USE_TZ=True,
        LOGGING={
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "console": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"}
            },
            "handlers": {
                "console": {"class": "logging.StreamHandler", "formatter": "console"}
            },
            "loggers": {
                "django_pathwise_gp": {"handlers": ["console"], "level": "INFO"}
            },
        },
    )
    django.setup()
