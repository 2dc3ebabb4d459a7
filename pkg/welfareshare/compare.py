"""Side-by-side comparison of every applicable mechanism on one instance"""

import logging

import pandas as pd

from welfareshare import settings
from welfareshare.core import check_anticore, check_domination
from welfareshare.decompose import (
    check_weak_decomposability, find_components_general, find_components_matching,
)
from welfareshare.exceptions import WelfareShareError
from welfareshare.mechanisms import MECHANISMS, applicable, run_mechanism
from welfareshare.model import MatchingInstance
from welfareshare.rivals import MechanismReport, MechanismRow, reasonable_from_above
from welfareshare.utils.rational import approx, format_rational
from welfareshare.welfare import SetFunctionOracle

logger = logging.getLogger('welfareshare')

FLAGS = ('in_anticore', 'dominates_disagreement', 'reasonable_from_above', 'weakly_decomposable')


def instance_partition(inst):
    """Components when they can be found within the configured bounds, else None"""
    try:
        if isinstance(inst, MatchingInstance) and inst.is_square:
            return find_components_matching(inst)
        if inst.n_agents <= settings.GENERAL_COMPONENT_BOUND:
            return find_components_general(inst)
    except WelfareShareError as e:
        logger.warning(f"Component search skipped: {e}")
    return None


def compare_mechanisms(inst, d, mechanisms=None, partition=None):
    """
    Run the mechanisms on one instance and flag each Solution.

    Mechanisms that fail (empty WS-core, wrong instance kind) keep a row with
    the error message instead of a Solution.
    """
    o = SetFunctionOracle(inst)
    partition = partition if partition is not None else instance_partition(inst)
    rows = []
    for name in mechanisms or MECHANISMS:
        if not applicable(name, inst):
            continue
        try:
            sol = run_mechanism(name, inst, d, oracle=o)
        except WelfareShareError as e:
            logger.warning(f"{name} failed: {e}")
            rows.append(MechanismRow(name, error=str(e)))
            continue
        flags = {
            'in_anticore': bool(check_anticore(o, sol.utilities)),
            'dominates_disagreement': bool(check_domination(sol.utilities, d)),
            'reasonable_from_above': reasonable_from_above(o, sol.utilities),
            'weakly_decomposable': (
                bool(check_weak_decomposability(inst, partition, sol)) if partition is not None else None
            ),
        }
        rows.append(MechanismRow(name, sol, flags))
    return MechanismReport(rows, d.utilities, inst.agent_ids)


def report_frame(report, exact=True):
    """pandas table: one row per mechanism, one column per agent utility, then the flags"""
    records = []
    for row in report.rows:
        record = {'mechanism': row.mechanism}
        for i, agent in enumerate(report.agent_ids):
            if row.solution is None:
                record[f"u[{agent}]"] = ''
            elif exact:
                record[f"u[{agent}]"] = format_rational(row.solution.utilities[i])
            else:
                record[f"u[{agent}]"] = '≈' + approx(row.solution.utilities[i], settings.DECIMAL_DIGITS)
        for flag in FLAGS:
            record[flag] = row.flags.get(flag)
        record['error'] = row.error
        records.append(record)
    return pd.DataFrame.from_records(records)
