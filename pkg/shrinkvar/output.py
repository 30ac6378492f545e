"""Reports and the files they are written to.

Every file embeds the effective configuration: CSV and plot data files
as `# section.option = value` comment lines ahead of the data, JSON
reports under `metadata.config`. Numbers are written with 17
significant digits.
"""

import collections
import csv
import datetime
import json
import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

NUMBER_FORMAT = '%.17g'


def config_items(config):
    """(section, option, value) triples of a RawConfigParser, in section
    and insertion order."""
    return [(section, name, value)
            for section in config.sections()
            for name, value in config.items(section)]


def config_dict(config):
    return collections.OrderedDict(
        (section, collections.OrderedDict(config.items(section)))
        for section in config.sections())


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return 'yes' if value else 'no'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return NUMBER_FORMAT % value
    return str(value)


def _json_value(value):
    """Plain JSON data; non-finite floats become null."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, dict):
        return collections.OrderedDict((str(k), _json_value(v))
                                       for k, v in value.items())
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in value]
    return value


class Report(object):
    """Named tables and verdicts produced by one run.

        :param config: Effective configuration (RawConfigParser)
        :param str command: Producing command
    """

    def __init__(self, config, command, version=None):
        if version is None:
            from shrinkvar import __version__ as version
        self.config = config
        self.metadata = collections.OrderedDict([
            ('version', version),
            ('command', command),
            ('config', config_dict(config)),
        ])
        self.tables = collections.OrderedDict()
        self.verdicts = []

    def add_table(self, name, columns, rows):
        """Add a table from its header and its rows; stored column-major."""
        columns = list(columns)
        data = collections.OrderedDict((c, []) for c in columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError("row %r does not match columns %r"
                                 % (row, columns))
            for c, v in zip(columns, row):
                data[c].append(v)
        self.tables[name] = data

    def rows(self, name):
        data = self.tables[name]
        return list(zip(*data.values()))

    def add_verdict(self, name, operation, passed, margin=None, status=None,
                    witness=None):
        """Record a check outcome. `operation` names the function that
        produced it."""
        if status is None:
            status = 'pass' if passed else 'fail'
        self.verdicts.append(collections.OrderedDict([
            ('name', name),
            ('operation', operation),
            ('passed', bool(passed)),
            ('status', status),
            ('margin', margin),
            ('witness', witness),
        ]))

    def add_audit(self, name, audit):
        """Record a ProofAudit."""
        self.add_verdict(name, audit.step, audit.passed,
                         margin=audit.worst_margin, witness=audit.witness)

    def extend(self, other, prefix=''):
        for name, data in other.tables.items():
            self.tables[prefix + name] = data
        for verdict in other.verdicts:
            verdict = collections.OrderedDict(verdict)
            verdict['name'] = prefix + verdict['name']
            self.verdicts.append(verdict)

    @property
    def passed(self):
        return all(v['passed'] for v in self.verdicts)

    def failures(self):
        return [v for v in self.verdicts if not v['passed']]

    def as_dict(self, created=None):
        metadata = collections.OrderedDict(self.metadata)
        if created is not None:
            metadata['created'] = created
        return collections.OrderedDict([
            ('metadata', _json_value(metadata)),
            ('tables', collections.OrderedDict(
                (name, collections.OrderedDict([
                    ('columns', list(data.keys())),
                    ('data', _json_value(data))]))
                for name, data in self.tables.items())),
            ('verdicts', _json_value(self.verdicts)),
        ])

    def to_json(self, f, timestamp=True):
        created = None
        if timestamp:
            created = datetime.datetime.now(datetime.timezone.utc) \
                                       .isoformat(timespec='seconds')
        json.dump(self.as_dict(created), f, indent=2)
        f.write('\n')


def write_config_header(f, config, extra=()):
    for section, name, value in config_items(config):
        f.write('# %s.%s = %s\n' % (section, name, value))
    for name, value in extra:
        f.write('# %s = %s\n' % (name, format_value(value)))


def write_csv(f, columns, rows, config, extra=()):
    """Write a header row and `rows` after the configuration comments."""
    write_config_header(f, config, extra)
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])


def write_plot_data(f, x, y, config, labels=('x', 'y'), extra=()):
    """Two whitespace separated columns, with the configuration and a
    `# x y` label line as comments."""
    write_config_header(f, config, extra)
    f.write('# %s %s\n' % tuple(labels))
    for a, b in zip(x, y):
        f.write('%s %s\n' % (format_value(float(a)), format_value(float(b))))


def read_csv(f):
    """Header and rows of a file written by `write_csv`, comment lines
    skipped; values are returned as strings."""
    lines = [line for line in f if not line.startswith('#')]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader]
