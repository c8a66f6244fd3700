"""
Relative-entropy correlations of Bell diagonal states.

Closed forms of the total, classical and quantum (discord) correlations
defined through the quantum relative entropy. They serve as the comparison
baseline for the trace-distance quantifiers along the channel trajectories.
"""

import logging

from bell_states import bd_spectrum, require_valid
from matrix_core import shannon_entropy
from models import BellDiagonal, CorrelationRecord, MetricTag, ProductState
from trace_correlations import closest_classical, sort_moduli

logger = logging.getLogger(__name__)

DISCORD_CLAMP_TOL = 1e-12


def ent_total(r: BellDiagonal) -> float:
    """T = 2 + sum lambda log2 lambda, i.e. 2 - S(rho)."""
    require_valid(r)
    return 2.0 - shannon_entropy(bd_spectrum(r).to_array())


def ent_classical(r: BellDiagonal) -> float:
    """
    Relative-entropy classical correlations.

    C = sum_± (1 ± R_max)/2 * log2(1 ± R_max), equivalently 1 - H((1 ± R_max)/2).
    Equals exactly 1 at R_max = 1 with 0 log 0 = 0.
    """
    require_valid(r)
    r_max = sort_moduli(r).r_max
    return 1.0 - shannon_entropy([(1.0 + r_max) / 2.0, (1.0 - r_max) / 2.0])


def ent_discord(r: BellDiagonal) -> float:
    """Relative-entropy discord T - C, clamped at zero."""
    value = ent_total(r) - ent_classical(r)
    if value < -DISCORD_CLAMP_TOL:
        logger.warning(f"Entropic discord {value:.3e} below zero for R = {r.as_tuple()}")
    return max(value, 0.0)


def correlations_ent(r: BellDiagonal) -> CorrelationRecord:
    """
    Bundle the relative-entropy quantifiers.

    The closest classical state is shared with the trace-distance hierarchy;
    the closest product state is the product of the maximally mixed marginals.
    """
    total = ent_total(r)
    classical = ent_classical(r)
    return CorrelationRecord(
        quantum=max(total - classical, 0.0),
        classical=classical,
        total=total,
        metric=MetricTag.RELATIVE_ENTROPY,
        closest_classical=closest_classical(r),
        closest_product_total=ProductState.maximally_mixed(),
    )
