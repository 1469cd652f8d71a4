from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class PathwiseGPConfig(AppConfig):
    name = "django_pathwise_gp"
    verbose_name = _("Django Pathwise GP")

    def ready(self) -> None:
        """Register the system checks that validate the
        ``DJANGO_PATHWISE_GP_*`` settings once the app registry is loaded."""
        from django_pathwise_gp.settings import checks
