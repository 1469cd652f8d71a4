from .command import handle_pathwise_errors
