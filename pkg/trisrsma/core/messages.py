# trisrsma/core/messages.py

class ReportMessages:
    """Centralized CLI report templates"""

    SOLVE = """
TRIS-RSMA solve report (v{version})

Scheme:        {scheme}
Elements M:    {elements}
Users K / N:   {num_cus} / {num_pus}
Feasible:      {feasible}
Rank relaxed:  {rank_relaxed}

SE:            {se:.6g} bps/Hz
EE:            {ee:.6g} bps/W
R_tot:         {r_tot:.6g} bps
P_tot:         {p_tot:.6g} W
Iterations:    {iterations}
Rank ratio:    {rank_ratio:.6f}
"""

    SWEEP = """
TRIS-RSMA sweep report (v{version})

Kind:          {kind}
Grid points:   {points}
Realizations:  {realizations}
Schemes:       {schemes}
Rows:          {rows} ({flagged} flagged)
CSV:           {csv_path}
Summary:       {summary_path}
"""

    STATUS = """
Run status
- Uptime:       {uptime}
- Runs:         {runs}
- Flagged:      {flagged}
- Errors:       {errors}
- Peak memory:  {memory_mb:.1f} MB
"""
