# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only


"""Base module for pybatmap."""

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"
__version__ = "0.1.0b1"
