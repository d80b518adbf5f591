"""Acceptance criteria 1-16, one test each.

Full sizes by default (several minutes).  Set ``HYBRIDNET_QUICK=1`` for the
reduced grid.  Each test writes its verdict line straight to the terminal.
"""

import dataclasses
import io
import os

import pytest

from hybridnet.acceptance import CRITERIA, run_criterion, verify_suite
from hybridnet.graph import Graph

QUICK = os.environ.get("HYBRIDNET_QUICK", "") not in ("", "0")


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    res = run_criterion(number, QUICK)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()


def _shortcut(inst):
    """Add the first missing edge: enough to break most value gaps."""
    g = inst.graph
    for u in g.nodes:
        for v in g.nodes:
            if u < v and not g.has_edge(u, v):
                h = Graph(g.n, list(g.edges) + [(u, v, 1)], directed=g.directed, weighted=g.weighted,
                          W=g.W, weight_exponent=g.weight_exponent)
                return dataclasses.replace(inst, graph=h)
    return inst


def test_corrupted_gadget_fixture_fails_by_name():
    buf = io.StringIO()
    status = verify_suite(quick=True, only=[12], stream=buf, mutate=_shortcut)
    lines = buf.getvalue().splitlines()
    assert status == 1
    assert lines[0].startswith("[FAIL] criterion 12 gadget claims")
    assert lines[-1].endswith("failed: 12")
