"""Triple-entry ledger with reconciliation, audit analytics and simulated MPC audits."""

__version__ = "0.1.0"
