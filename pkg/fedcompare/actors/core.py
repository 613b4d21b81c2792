# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from fedcompare.core import ConfiguredObject
from fedcompare.models import PredictorSpec


class Actor(ConfiguredObject):
    """Federated participant base class

    Clients and the server only exchange parameter vectors and scalar
    summaries; an actor never hands its data over to another one.

    :param  spec: architecture every participant trains
    :type   spec: fedcompare.models.PredictorSpec

    :param  train_config: optimizer constants and random streams
    :type   train_config: fedcompare.models.TrainConfig
    """
    def __init__(self, spec, train_config, *args, **kwargs):
        super(Actor, self).__init__(*args, **kwargs)

        self._set_spec(spec)
        self.train_config = train_config

    def _set_spec(self, spec):
        if not isinstance(spec, PredictorSpec):
            raise TypeError("spec arg should be a "
                            "fedcompare.models.PredictorSpec instance")
        self.spec = spec
