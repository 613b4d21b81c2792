# -*- coding:utf-8 -*-

import os
import unittest

from fedcompare.exceptions import DoesNotExistError
from fedcompare.querysets.base import BaseQuerySet

from ..mocks import TemporaryDirectoryMixin


class TestBaseQuerySet(TemporaryDirectoryMixin, unittest.TestCase):

    def setUp(self):
        super(TestBaseQuerySet, self).setUp()
        self.base_qs = BaseQuerySet(output_dir=self.tmpdir)

    def test_get_method_not_implemented(self):
        with self.assertRaises(NotImplementedError):
            self.base_qs.get()

    def test_filter_method_not_implemented(self):
        with self.assertRaises(NotImplementedError):
            self.base_qs.filter()

    def test_all_method_not_implemented(self):
        with self.assertRaises(NotImplementedError):
            self.base_qs.all()

    def test_create_method_not_implemented(self):
        with self.assertRaises(NotImplementedError):
            self.base_qs.create()

    def test_paths(self):
        self.assertEqual(self.base_qs.path('a', 'b.csv'),
                         os.path.join(self.tmpdir, '', 'a', 'b.csv'))
        path = self.base_qs._writable(self.base_qs.path('x', 'y.csv'))
        self.assertTrue(os.path.isdir(os.path.dirname(path)))

    def test_missing_file(self):
        with self.assertRaises(DoesNotExistError):
            self.base_qs._existing(self.base_qs.path('nope.csv'), 'file')
