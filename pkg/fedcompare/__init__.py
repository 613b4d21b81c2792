#!/usr/bin/env python
# -*- coding: utf-8 -*-

version = (0, 1, 0)

__title__ = "fed-compare"
__license__ = "MIT"

__version__ = '.'.join(map(str, version))
