# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.


class RoundHistory(object):
    """Federated rounds container

    RoundHistory holds the FederatedRound objects an aggregation server
    went through, in order. It is iterable and can be filtered
    on round attributes.

    :param  rounds: rounds to build the history upon
    :type   rounds: list of fedcompare.models.round.FederatedRound
    """
    def __init__(self, rounds=None):
        self.rounds = list(rounds or [])

    def __len__(self):
        return len(self.rounds)

    def __repr__(self):
        rounds_repr = '\n\t'.join(repr(r) for r in self.rounds)
        return '<RoundHistory\n\t%s\n>' % rounds_repr

    def __iter__(self):
        return iter(self.rounds)

    def append(self, round_):
        self.rounds.append(round_)

    def filter(self, **kwargs):
        """Filters the history on round attributes

        ``state`` is compared by name:

        .. code-block:: python

            >>> history.filter(state='aborted')  # doctest: +SKIP
            [<FederatedRound 3 : aborted>]

        :rtype: list
        """
        def matches(round_):
            for key, value in kwargs.items():
                actual = getattr(round_, key)
                if key == 'state':
                    actual = actual.name
                if actual != value:
                    return False
            return True

        return [r for r in self.rounds if matches(r)]
