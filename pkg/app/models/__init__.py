from app.models.cards import Card, Hand
from app.models.classes import CanonicalHand, EquivClass
from app.models.results import CEDistribution, DistributionEntry, HoldResult

__all__ = [
    "Card",
    "Hand",
    "CanonicalHand",
    "EquivClass",
    "HoldResult",
    "CEDistribution",
    "DistributionEntry",
]
