# -*- coding:utf-8 -*-

import unittest

import xworkflows

from fedcompare.models import (ClientUpdate, FederatedRound, ParamVector,
                               RoundHistory)


LAYOUT = [('w', (1,), 0)]


def params(value):
    return ParamVector([value], LAYOUT)


def completed(index, before=0.0, after=1.0):
    round_ = FederatedRound(index, params(before))
    round_.distribute()
    round_.collect([ClientUpdate(0, params(after), 10, round_index=index)])
    round_.aggregate(lambda _: params(after))
    return round_


class TestFederatedRound(unittest.TestCase):
    def setUp(self):
        self.round = FederatedRound(0, params(0.0))

    def tearDown(self):
        pass

    def test_initial_state(self):
        self.assertEqual(self.round.state.name, 'created')
        self.assertIsNone(self.round.global_after)

    def test_full_lifecycle(self):
        updates = [ClientUpdate(1, params(2.0), 1),
                   ClientUpdate(0, params(4.0), 1)]
        self.round.distribute()
        self.round.collect(updates, failures=[(2, ValueError('boom'))])
        self.round.aggregate(lambda ups: params(sum(
            u.params.values[0] for u in ups) / len(ups)))

        self.assertEqual(self.round.state.name, 'aggregated')
        self.assertEqual([u.client_id for u in self.round.updates], [1, 0])
        self.assertEqual(self.round.global_after, params(3.0))
        self.assertEqual(self.round.failures[0][0], 2)

    def test_cannot_aggregate_before_collecting(self):
        self.round.distribute()
        with self.assertRaises(xworkflows.InvalidTransitionError):
            self.round.aggregate(lambda ups: None)

    def test_abort(self):
        self.round.distribute()
        self.round.abort('client 3 diverged')

        self.assertEqual(self.round.state.name, 'aborted')
        self.assertEqual(self.round.abort_reason, 'client 3 diverged')
        with self.assertRaises(xworkflows.InvalidTransitionError):
            self.round.collect([])

    def test_aggregated_round_cannot_abort(self):
        round_ = completed(0)
        with self.assertRaises(xworkflows.InvalidTransitionError):
            round_.abort('late')


class TestRoundHistory(unittest.TestCase):
    def setUp(self):
        aborted = FederatedRound(2, params(2.0))
        aborted.abort('no client')
        self.history = RoundHistory([completed(0, 0.0, 1.0),
                                     completed(1, 1.0, 2.0), aborted])

    def test_iteration(self):
        self.assertEqual(len(self.history), 3)
        self.assertEqual([r.index for r in self.history], [0, 1, 2])

    def test_filter(self):
        self.assertEqual([r.index for r in
                          self.history.filter(state='aggregated')], [0, 1])
        self.assertEqual([r.index for r in self.history.filter(index=2)],
                         [2])
