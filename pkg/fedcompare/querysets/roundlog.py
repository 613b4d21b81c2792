# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import csv

from fedcompare.exceptions import ParseError
from fedcompare.models import RoundLogRecord
from fedcompare.querysets.base import BaseQuerySet
from fedcompare.utils import format_float


COLUMNS = tuple(RoundLogRecord.fields())


class RoundLogQuerySet(BaseQuerySet):
    """Per-round, per-client log of a federated run

    Stored at ``<output_dir>/logs/round_log.csv``, one row per
    (round, client).
    """
    subdir = 'logs'
    filename = 'round_log.csv'

    def create(self, records, *args, **kwargs):
        path = self._writable(self.path(self.filename))
        with open(path, 'w', newline='', encoding='utf-8') as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(COLUMNS)
            for record in records:
                writer.writerow([
                    format_float(value) if isinstance(value, float) else value
                    for value in (getattr(record, c) for c in COLUMNS)])
        return path

    def all(self, *args, **kwargs):
        """
        :raises: DoesNotExistError, ParseError
        :rtype: list of RoundLogRecord
        """
        path = self._existing(self.path(self.filename), 'round log')
        records = []
        with open(path, newline='', encoding='utf-8') as stream:
            reader = csv.DictReader(stream)
            if tuple(reader.fieldnames or ()) != tuple(COLUMNS):
                raise ParseError('unexpected round log header',
                                 'line 1: {}'.format(reader.fieldnames))
            for line_num, row in enumerate(reader, start=2):
                try:
                    records.append(RoundLogRecord(**row))
                except (TypeError, ValueError) as err:
                    raise ParseError('invalid round log row',
                                     'line {}: {}'.format(line_num, err))
        return records

    def filter(self, round=None, client_id=None, *args, **kwargs):
        return [r for r in self.all()
                if (round is None or r.round == round) and
                (client_id is None or r.client_id == client_id)]
