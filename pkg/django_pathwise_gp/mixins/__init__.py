from .reject_unknown_fields import RejectUnknownFieldsMixin
