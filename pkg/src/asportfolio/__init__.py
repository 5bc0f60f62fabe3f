"""Budget-aware algorithm portfolios for feature-based algorithm selection.

Modules: suite (test functions), sample (designs and the evaluation budget),
ela (landscape features), zoo (optimizers that fill the archive), archive
(run records and rankings), portfolio (subset selection, SBS, VBS), selector
(per-member regression forests), bench (cross-validation and statistics)
and cli (the end-to-end driver).
"""

__version__ = "0.1.0"
