# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from fedcompare.actors.core import Actor
from fedcompare.actors.client import ClientWorker
from fedcompare.actors.server import AggregationServer
