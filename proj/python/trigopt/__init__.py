# SPDX-License-Identifier: Apache-2.0
# Copyright (c) 2026 trigopt contributors
"""Trajectory optimization with logic-triggered constraints."""

try:
    from ._trigopt import *  # noqa: F401,F403  (installed package layout)
    from ._trigopt import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension directly on sys.path
    from _trigopt import *  # noqa: F401,F403
    from _trigopt import __version__  # noqa: F401
