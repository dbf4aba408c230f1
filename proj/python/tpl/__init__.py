"""Append-only treasury ledger with anchored commitments and observer views."""

try:
    from ._tpl import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:
    from _tpl import *  # noqa: F401,F403  (build-tree layout via PYTHONPATH)

__all__ = [
    "DEFAULT_CONFIRMATIONS",
    "SAT_PER_BTC",
    "Config",
    "Event",
    "Keys",
    "Ledger",
    "Receipt",
    "SimChain",
    "Snapshot",
    "TplError",
    "View",
    "ViewRow",
    "aggregate_supply_check",
    "gen_view",
    "run_experiment",
    "verify_view",
]
