"""Entry point of the ``gp-sgd`` console script.

``gp-sgd <subcommand> [options]`` runs the management command of the same
name (``fit`` runs ``gp_fit``, ``gen-data`` runs ``gp_gen_data``) inside a
minimal standalone Django configuration.
"""

import sys
from typing import List, Optional

from django.core.management import execute_from_command_line

from django_pathwise_gp.utils.standalone import configure_standalone

SUBCOMMANDS = {
    "fit": "gp_fit",
    "sample": "gp_sample",
    "diagnose": "gp_diagnose",
    "benchmark": "gp_benchmark",
    "thompson": "gp_thompson",
    "gen-data": "gp_gen_data",
}

USAGE = "usage: gp-sgd {%s} --config PATH [--out DIR] [--seed N] [--threads N]" % (
    "|".join(SUBCOMMANDS)
)


def main(argv: Optional[List[str]] = None) -> None:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(USAGE + "\n")
        sys.exit(0 if argv else 2)
    if argv[0] not in SUBCOMMANDS:
        sys.stderr.write(f"Unknown subcommand '{argv[0]}'.\n{USAGE}\n")
        sys.exit(2)
    configure_standalone()
    execute_from_command_line(["gp-sgd", SUBCOMMANDS[argv[0]], *argv[1:]])


if __name__ == "__main__":
    main()
