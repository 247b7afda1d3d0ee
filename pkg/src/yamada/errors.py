"""Shared exception hierarchy.

Every domain error raised by this package derives from YamadaError so the
command line tool can map any of them to a clean nonzero exit.
"""


class YamadaError(Exception):
    pass
