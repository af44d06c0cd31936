"""Categorical verdict vocabulary shared by every perspective."""

from enum import Enum


class Verdict(str, Enum):
    EQUALLY_DISTRIBUTED = "Equally distributed"
    UNEVENLY_DISTRIBUTED = "Unevenly distributed"
    MAINTAINER = "Ecosystem maintainer"
    CHANGER = "Ecosystem changer"
    BEHAVE_SIMILARLY = "Behave similarly"
    BEHAVE_DIFFERENTLY = "Behave differently"
    NON_DESTABILIZING = "Non-destabilizing"
    DESTABILIZING = "Destabilizing"
    INFLUENCE_SIMILARLY = "Influence similarly"
    INFLUENCE_DIFFERENTLY = "Influence differently"
    PROPORTIONATE = "Proportionate"
    HIGHLY_POPULATED = "Highly populated"
    DEPOPULATED = "Depopulated"
    NORMAL = "Normally stimulated"
    UNDER = "Understimulated"
    OVER = "Overstimulated"
    DISCUSS_SIMILARLY = "Discuss similarly"
    DISCUSS_DIFFERENTLY = "Discuss differently"
    INFLUENCER = "Influencer"
    NON_INFLUENCER = "Non-influencer"
    EQUALLY_VIRAL = "Equally viral"
    UNEVENLY_VIRAL = "Unevenly viral"

    def __str__(self) -> str:
        return self.value


def within(value: float, reference: float, epsilon_rel: float) -> bool:
    """|value - reference| <= epsilon_rel * |reference|, with 0 ~ 0."""
    if reference == 0:
        return abs(value) <= 1e-12 or epsilon_rel == float("inf")
    return abs(value - reference) <= epsilon_rel * abs(reference) + 1e-12 * abs(reference)


def all_near_grand_mean(means: list[float], grand: float, epsilon_rel: float) -> bool:
    return all(within(m, grand, epsilon_rel) for m in means)
