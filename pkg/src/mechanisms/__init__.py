"""Mechanisms, the robustification stages and exact auditors."""

from mechanisms.audit import (
    BicAudit,
    InterimTable,
    MechanismAudit,
    RevenueEstimate,
    audit_bic,
    audit_ir,
    audit_mechanism,
    interim_tables,
    profile_lotteries,
    revenue,
)
from mechanisms.bounds import eta_mu_bounds, exact_rho, revenue_deficit_bound, tv_rho_upper
from mechanisms.generators import (
    build_base_mechanism,
    random_menu_table,
    repair_payments,
    second_price_table,
)
from mechanisms.outcomes import (
    Lottery,
    Mechanism,
    Realization,
    deterministic,
    discount,
    draw,
    merge_lottery,
)
from mechanisms.robust import (
    AuctionOutcome,
    RobustMechanism,
    build_m1,
    build_m2,
    build_m_ell,
    build_robust,
    run_auction,
)
from mechanisms.stages import RoundDownMechanism, RoundUpMechanism, TVRobustMechanism
from mechanisms.tables import MechanismTable, load_table, mechanism_to_dict, table_from_dict
from mechanisms.valuations import ValuationSpec, bundle_items

__all__ = [
    "AuctionOutcome",
    "BicAudit",
    "InterimTable",
    "Lottery",
    "Mechanism",
    "MechanismAudit",
    "MechanismTable",
    "Realization",
    "RevenueEstimate",
    "RobustMechanism",
    "RoundDownMechanism",
    "RoundUpMechanism",
    "TVRobustMechanism",
    "ValuationSpec",
    "audit_bic",
    "audit_ir",
    "audit_mechanism",
    "build_base_mechanism",
    "build_m1",
    "build_m2",
    "build_m_ell",
    "build_robust",
    "bundle_items",
    "deterministic",
    "discount",
    "draw",
    "eta_mu_bounds",
    "exact_rho",
    "interim_tables",
    "load_table",
    "mechanism_to_dict",
    "merge_lottery",
    "profile_lotteries",
    "random_menu_table",
    "repair_payments",
    "revenue",
    "revenue_deficit_bound",
    "run_auction",
    "second_price_table",
    "table_from_dict",
    "tv_rho_upper",
]
