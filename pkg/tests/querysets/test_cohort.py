# -*- coding:utf-8 -*-

import os
import unittest

from fedcompare.exceptions import DoesNotExistError
from fedcompare.fabric import generate_cohort
from fedcompare.querysets import CohortQuerySet
from fedcompare.querysets.cohort import SUMMARY_COLUMNS

from ..mocks import TemporaryDirectoryMixin
from ..mocks.cohort import tiny_specs


class TestCohortQuerySet(TemporaryDirectoryMixin, unittest.TestCase):
    def setUp(self):
        super(TestCohortQuerySet, self).setUp()
        self.qs = CohortQuerySet(output_dir=self.tmpdir)
        self.cohort = generate_cohort(tiny_specs(3, 40), 3, seed=5)
        for client_id, dataset in self.cohort.items():
            self.qs.create(client_id, dataset)

    def test_get(self):
        self.assertEqual(self.qs.get(1), self.cohort[1])
        with self.assertRaises(DoesNotExistError):
            self.qs.get(7)

    def test_all_and_filter(self):
        self.assertEqual(self.qs.client_ids(), [0, 1, 2])
        self.assertEqual(list(self.qs.all()), [0, 1, 2])
        self.assertEqual(list(self.qs.filter(client_ids=[2, 0])), [0, 2])

    def test_empty_directory(self):
        qs = CohortQuerySet(output_dir=os.path.join(self.tmpdir, 'other'))
        self.assertEqual(qs.client_ids(), [])

    def test_summary(self):
        path, rows = self.qs.create_summary(self.cohort)

        self.assertEqual(rows[0], (0, 24, 16, 40, '40.0'))
        with open(path) as stream:
            lines = stream.read().splitlines()
        self.assertEqual(lines[0], ','.join(SUMMARY_COLUMNS))
        self.assertEqual(lines[1], '0,24,16,40,40.0')
