from .data import csv_file, random_data, toy_data
from .kernels import matern_spec, se_spec
from .run_configs import toy_fit_config, write_config
