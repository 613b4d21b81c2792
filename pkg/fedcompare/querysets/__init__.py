# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from fedcompare.querysets.cohort import CohortQuerySet
from fedcompare.querysets.checkpoint import CheckpointQuerySet
from fedcompare.querysets.roundlog import RoundLogQuerySet
