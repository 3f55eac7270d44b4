"""
Estimating the constants
========================

A scan evaluates |deg f| / ((p - 1) E_p(f)) or |deg f| / (delta I_delta(f))
over map families and a grid that approaches the degenerate endpoint.  The
largest observed ratio is an empirical lower bound for the constant in
the corresponding degree estimate.  The same scan is available from the
command line as ``circdeg scan --config <file>``.
"""

import json

from circdeg.report import parse_config, render_csv, report_rows
from circdeg.verify import scan

config = parse_config(json.dumps({
    "families": ["power:d=1", "power:d=3", "perturbed:d=1,eps=0.3,m=5", "blaschke:a=0.9"],
    "regime": "op51",
    "p_grid": [1 + 2.0 ** -j for j in range(1, 9)],
    "N": 1024,
}))
report = scan(config, workers=4)
print(render_csv(report_rows(report)))
print("sup ratio:", report.sup_ratio, " (1/(4 pi) = 0.0795775)")
print("config digest:", report.config_digest)
