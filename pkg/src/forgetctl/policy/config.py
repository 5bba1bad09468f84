"""Declarative policy configuration: retention rules, protected categories,
deadline durations. Loaded from YAML; schema documented in the README."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..clock import days
from ..errors import ConfigUnparseable


@dataclass(frozen=True)
class RetentionRule:
    """A statutory obligation to keep one category of data for a period.

    Data under an unexpired retention rule cannot be erased: evaluation turns
    a matching rule into a clear legal-obligation exemption automatically.
    """

    category: str
    statute: str
    retain_days: float

    def __post_init__(self) -> None:
        if not self.category or not self.statute:
            raise ValueError("retention rule needs category and statute")
        if self.retain_days <= 0:
            raise ValueError("retention rule needs a positive duration")


@dataclass(frozen=True)
class DeadlinePolicy:
    ack_within: float = days(30)
    decide_within: float = days(30)

    def __post_init__(self) -> None:
        if self.ack_within > self.decide_within:
            raise ValueError("ack_within must not exceed decide_within")


@dataclass(frozen=True)
class PolicyConfig:
    retention_rules: tuple[RetentionRule, ...] = ()
    protected_categories: tuple[str, ...] = ("rtbf-audit-log",)
    deadlines: DeadlinePolicy = field(default_factory=DeadlinePolicy)

    def retention_rule_for(self, category: str) -> RetentionRule | None:
        for rule in self.retention_rules:
            if rule.category == category:
                return rule
        return None


def load_policy_config(path: Path | str) -> PolicyConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigUnparseable(f"{path}: {exc}") from exc
    if raw is None:
        return PolicyConfig()
    if not isinstance(raw, dict):
        raise ConfigUnparseable(f"{path}: top level must be a mapping")
    try:
        rules = tuple(
            RetentionRule(category=entry["category"], statute=entry["statute"],
                          retain_days=float(entry["retain_days"]))
            for entry in raw.get("retention_rules", [])
        )
        protected = tuple(raw.get("protected_categories", ["rtbf-audit-log"]))
        deadline_raw = raw.get("deadlines", {})
        deadlines = DeadlinePolicy(
            ack_within=days(float(deadline_raw.get("ack_within_days", 30))),
            decide_within=days(float(deadline_raw.get("decide_within_days", 30))),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigUnparseable(f"{path}: {exc}") from exc
    return PolicyConfig(retention_rules=rules, protected_categories=protected,
                        deadlines=deadlines)
