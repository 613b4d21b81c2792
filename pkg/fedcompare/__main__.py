# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import sys

from fedcompare.cli import main


sys.exit(main())
