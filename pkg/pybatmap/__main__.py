# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

# pylint: disable=missing-module-docstring

import sys

from .cli import main

sys.exit(main())
