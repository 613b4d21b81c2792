# -*- coding: utf-8 -*-

import shutil
import tempfile


class TemporaryDirectoryMixin(object):
    """Gives every test a fresh ``self.tmpdir``"""
    def setUp(self):
        super(TemporaryDirectoryMixin, self).setUp()
        self.tmpdir = tempfile.mkdtemp(prefix='fedcompare-test-')

    def tearDown(self):
        shutil.rmtree(self.tmpdir, ignore_errors=True)
        super(TemporaryDirectoryMixin, self).tearDown()
