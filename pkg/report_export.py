"""
CSV and JSON reports for correlation runs.

Tabular results (trajectories, sweeps, verification runs, freezing scans) are
assembled as pandas DataFrames and written as CSV with a '#'-prefixed
metadata header echoing the run configuration. Single-state reports are JSON
objects carrying a schema version.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from bell_states import bd_spectrum, rank2_state, werner_state
from entropic_correlations import correlations_ent
from models import BellDiagonal, StateFamily, VerifySummary
from nonmarkov_dynamics import FreezingScanResult, Trajectory
from trace_correlations import (
    RANK2_BREAKS, WERNER_BREAK, correlations_td, marginal_baseline, rank2_reference,
    td_total, triangle_gap, werner_reference,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FLOAT_FORMAT = '%.12g'


def format_float(value: float) -> str:
    return FLOAT_FORMAT % value


def _comment_block(items: Dict[str, Any]) -> str:
    lines = []
    for key, value in items.items():
        if isinstance(value, float):
            value = format_float(value)
        lines.append(f"# {key}: {value}\n")
    return "".join(lines)


def render_csv(df: pd.DataFrame, metadata: Dict[str, Any],
               footer: Optional[Dict[str, Any]] = None) -> str:
    """
    Render a DataFrame as CSV text with metadata header and optional footer.

    Args:
        df: Table to write
        metadata: Configuration echoed as '# key: value' lines before the header
        footer: Extra '# key: value' lines after the data

    Returns:
        str: CSV text with LF line endings
    """
    body = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return _comment_block(metadata) + body + _comment_block(footer or {})


def emit(text: str, output: Optional[str]) -> None:
    """Write text to a file, or to stdout when no path is given."""
    if output is None:
        print(text, end='')
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
    logger.info(f"Wrote {path}")


def _times(values: Iterable[float]) -> str:
    return ",".join(format_float(t) for t in values)


# ---------------------------------------------------------------------------
# Single-state report
# ---------------------------------------------------------------------------

def correlations_report(r: BellDiagonal) -> Dict[str, Any]:
    """
    JSON-ready report for one state: both metric records, gap and baseline.
    """
    td = correlations_td(r)
    ent = correlations_ent(r)
    c_prime, t_prime = marginal_baseline(r)
    total = td_total(r)

    td_dict = td.to_dict()
    td_dict["gap"] = triangle_gap(r)
    td_dict["is_marginal_product"] = total.is_marginal_product
    ent_dict = ent.to_dict()
    ent_dict["gap"] = ent.quantum + ent.classical - ent.total

    return {
        "schema": SCHEMA_VERSION,
        "state": {
            "r": list(r.as_tuple()),
            "lambda": [float(v) for v in bd_spectrum(r).to_array()],
        },
        "trace_distance": td_dict,
        "relative_entropy": ent_dict,
        "marginal_baseline": {"c_prime": c_prime, "t_prime": t_prime},
    }


def render_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2) + "\n"


def correlations_frame(r: BellDiagonal) -> pd.DataFrame:
    """Single-row table form of correlations_report."""
    td = correlations_td(r)
    ent = correlations_ent(r)
    c_prime, t_prime = marginal_baseline(r)
    return pd.DataFrame([{
        "r11": r.r11, "r22": r.r22, "r33": r.r33,
        "D_td": td.quantum, "C_td": td.classical, "T_td": td.total,
        "D_ent": ent.quantum, "C_ent": ent.classical, "T_ent": ent.total,
        "gap_td": triangle_gap(r), "c_prime": c_prime, "t_prime": t_prime,
    }])


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    """One row per grid time with coefficients and both correlation hierarchies."""
    rows = []
    for t, state, td, ent in zip(traj.times, traj.states, traj.td_records, traj.ent_records):
        rows.append({
            "time": float(t),
            "r11": state.r11, "r22": state.r22, "r33": state.r33,
            "D_td": td.quantum, "C_td": td.classical, "T_td": td.total,
            "D_ent": ent.quantum, "C_ent": ent.classical, "T_ent": ent.total,
        })
    return pd.DataFrame(rows)


def trajectory_footer(traj: Trajectory) -> Dict[str, str]:
    return {
        "sudden_changes": _times(traj.sudden_changes),
        "classical_changes": _times(traj.classical_changes),
    }


def verify_frame(summary: VerifySummary) -> pd.DataFrame:
    return pd.DataFrame([{
        "r11": rec.state.r11, "r22": rec.state.r22, "r33": rec.state.r33,
        "analytic_T": rec.analytic_T, "oracle_T": rec.oracle_T,
        "analytic_D": rec.analytic_D, "oracle_D": rec.oracle_D, "near_vertex": rec.near_vertex,
    } for rec in summary.records])


def verify_footer(summary: VerifySummary) -> Dict[str, Any]:
    return {
        "samples": summary.samples,
        "max_abs_diff_T": summary.max_abs_diff_T,
        "max_abs_diff_D": summary.max_abs_diff_D,
        "undercut_count": summary.undercut_count,
        "off_vertex_undercut_count": summary.off_vertex_undercut_count,
        "agree_fraction_T": summary.agree_fraction_T,
        "passed": summary.passed,
    }


def sweep_frame(family: StateFamily, points: int) -> pd.DataFrame:
    """
    Trace-distance correlations along a one-parameter family on [0, 1].

    Reference columns hold the piecewise closed forms; branch_boundary marks
    the parameters where the total correlation changes branch (4/5 for
    Werner states, 1/2 and 3/4 for rank-2 states).
    """
    family = StateFamily(family)
    if family is StateFamily.WERNER:
        build, reference, breaks = werner_state, werner_reference, (WERNER_BREAK,)
    else:
        build, reference, breaks = rank2_state, rank2_reference, RANK2_BREAKS

    rows = []
    for x in np.linspace(0.0, 1.0, points):
        x = float(x)
        state = build(x)
        record = correlations_td(state)
        ref_d, ref_c, ref_t = reference(x)
        rows.append({
            "parameter": x,
            "D_td": record.quantum, "C_td": record.classical, "T_td": record.total,
            "D_ref": ref_d, "C_ref": ref_c, "T_ref": ref_t,
            "marginal_product": td_total(state).is_marginal_product,
            "branch_boundary": any(math.isclose(x, b, abs_tol=1e-12) for b in breaks),
        })
    return pd.DataFrame(rows)


def freezing_summary_frame(results: List[FreezingScanResult]) -> pd.DataFrame:
    return pd.DataFrame([{
        "lambda1p": res.lambda1p,
        "r11": res.initial.r11, "r22": res.initial.r22, "r33": res.initial.r33,
        "plateau": res.plateau,
        "first_change": np.nan if res.first_change is None else res.first_change,
    } for res in results])
