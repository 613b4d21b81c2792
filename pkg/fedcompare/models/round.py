# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import xworkflows


class RoundWorkflow(xworkflows.Workflow):
    """Lifecycle of one federated round

    created -> broadcast -> collected -> aggregated, or aborted from any
    non-final state.
    """
    states = (
        ('created', "Created"),
        ('broadcast', "Global weights sent to the clients"),
        ('collected', "Client updates received"),
        ('aggregated', "New global weights computed"),
        ('aborted', "Aborted"),
    )

    transitions = (
        ('distribute', 'created', 'broadcast'),
        ('collect', 'broadcast', 'collected'),
        ('aggregate', 'collected', 'aggregated'),
        ('abort', ('created', 'broadcast', 'collected'), 'aborted'),
    )

    initial_state = 'created'


class FederatedRound(xworkflows.WorkflowEnabled):
    """One round owned by the aggregation server

    :param  index: round number, starting at 0
    :param  global_before: weights broadcast to the clients
    :type   global_before: fedcompare.models.params.ParamVector
    """
    state = RoundWorkflow()

    def __init__(self, index, global_before):
        super().__init__()
        self.index = int(index)
        self.global_before = global_before
        self.global_after = None
        self.updates = ()
        self.failures = ()
        self.abort_reason = None

    def __repr__(self):
        return '<FederatedRound {} : {}>'.format(self.index, self.state.name)

    @xworkflows.transition()
    def distribute(self):
        pass

    @xworkflows.transition()
    def collect(self, updates, failures=()):
        """Stores the surviving updates and the (client_id, error) failures"""
        self.updates = tuple(updates)
        self.failures = tuple(failures)

    @xworkflows.transition()
    def aggregate(self, aggregator):
        """Computes the next global weights with ``aggregator(updates)``"""
        self.global_after = aggregator(self.updates)

    @xworkflows.transition()
    def abort(self, reason):
        self.abort_reason = reason