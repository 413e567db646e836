"""Commutator identities and Lie closure of the control generators."""
from __future__ import annotations

from condsqueeze.cli import lie_check_report

rep = lie_check_report()
for c in rep["identities"]:
    note = "" if c["printed_holds"] else f"  (quoted form off; ratio {c['printed_ratio']})"
    print(f"{c['label']:<18} residual {c['residual']:.1e}{note}")
print("q, p alone reach q^2:", rep["closure_qp"]["reached"]["q2"] is not None)
print("full set reaches:", rep["closure_full"]["reached"])
