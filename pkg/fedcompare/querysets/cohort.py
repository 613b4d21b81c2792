# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import csv
import os
import re
from collections import OrderedDict

from fedcompare.fabric import read_dataset, write_dataset
from fedcompare.querysets.base import BaseQuerySet


CLIENT_FILE = re.compile(r'^client_(\d+)\.csv$')

SUMMARY_COLUMNS = ('client', 'n_neg', 'n_pos', 'n_total', 'overlap_pct')


class CohortQuerySet(BaseQuerySet):
    """Per-client dataset files of a synthetic cohort

    Files live at ``<output_dir>/cohort/client_<id>.csv``.
    """
    subdir = 'cohort'

    def get(self, client_id, *args, **kwargs):
        """Reads the dataset of *client_id*

        :raises: DoesNotExistError
        :rtype: fedcompare.models.LabeledDataset
        """
        path = self._existing(self.path('client_{}.csv'.format(client_id)),
                              'cohort file for client {}'.format(client_id))
        return read_dataset(path)

    def client_ids(self):
        if not os.path.isdir(self.root):
            return []
        matches = (CLIENT_FILE.match(name) for name in os.listdir(self.root))
        return sorted(int(m.group(1)) for m in matches if m)

    def all(self, *args, **kwargs):
        """client_id -> LabeledDataset for every stored client

        :rtype: OrderedDict
        """
        return OrderedDict((c, self.get(c)) for c in self.client_ids())

    def filter(self, client_ids=None, *args, **kwargs):
        wanted = set(client_ids) if client_ids is not None else None
        return OrderedDict((c, self.get(c)) for c in self.client_ids()
                           if wanted is None or c in wanted)

    def create(self, client_id, dataset, *args, **kwargs):
        path = self._writable(self.path('client_{}.csv'.format(client_id)))
        write_dataset(path, dataset)
        return path

    def create_summary(self, cohort):
        """Writes per-client class counts and overlap percentage

        :returns: (path, rows)
        """
        rows = [(client_id, d.n_neg, d.n_pos, len(d),
                 '{:.1f}'.format(100.0 * d.n_pos / len(d)))
                for client_id, d in cohort.items()]
        path = self._writable(self.path('summary.csv'))
        with open(path, 'w', newline='', encoding='utf-8') as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(SUMMARY_COLUMNS)
            writer.writerows(rows)
        return path, rows
