from django_pathwise_gp.tests.setup import configure_django_settings
from django_pathwise_gp.tests.fixtures import (
    csv_file,
    random_data,
    toy_data,
    matern_spec,
    se_spec,
    toy_fit_config,
    write_config,
)
