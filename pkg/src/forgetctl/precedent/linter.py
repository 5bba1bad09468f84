"""Configuration linter for the six erasure anti-patterns.

Each rule targets a practice that served systems well for decades and turns
hostile the moment erasure rights apply: personal identifiers as primary
keys, anonymize-and-keep deletion, untagged personal fields, shallow or
lawless deletion fan-out, bottomless trace logs, and verification demands
stiffer than registration ever was. Findings are advisory: a flagged config
is a risk surface, not a proven violation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from ..engine.documents import PII_FIELD_DENYLIST
from ..errors import ConfigUnparseable
from ..lifecycle.requests import level_rank

# identifier-shaped fields the schema rule refuses as unique keys
PII_KEY_DENYLIST = frozenset(PII_FIELD_DENYLIST) | {
    "name", "full-name", "phone-number", "email-address", "ssn",
    "national-id", "passport-number",
}

_SEVERITY = {1: "warning", 2: "error", 3: "error",
             4: "error", 5: "warning", 6: "error"}


@dataclass(frozen=True)
class AntiPatternFinding:
    pattern_id: int  # 1..6
    location: str    # config path, e.g. "schema.unique_key"
    message: str

    def __post_init__(self) -> None:
        if self.pattern_id not in _SEVERITY:
            raise ValueError(f"pattern_id must be 1..6, got {self.pattern_id}")

    @property
    def severity(self) -> str:
        return _SEVERITY[self.pattern_id]

    def to_payload(self) -> dict:
        return {"pattern_id": self.pattern_id, "location": self.location,
                "message": self.message, "severity": self.severity}


def load_system_config(path: Path) -> dict:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigUnparseable(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigUnparseable(f"{path}: top level must be a mapping")
    return raw


def lint(config: dict) -> list[AntiPatternFinding]:
    findings: list[AntiPatternFinding] = []
    schema = config.get("schema", {}) or {}
    deletion = config.get("deletion", {}) or {}
    logging_cfg = config.get("logging", {}) or {}
    verification = config.get("verification", {}) or {}

    # 1. personal data as a primary key
    unique_key = str(schema.get("unique_key", "") or "")
    if unique_key.lower() in PII_KEY_DENYLIST:
        findings.append(AntiPatternFinding(
            1, "schema.unique_key",
            f"unique key {unique_key!r} is a personal identifier; erasing a "
            f"row then breaks every reference to it"))

    # 2. anonymizing in place instead of deleting
    mode = str(deletion.get("mode", "") or "")
    if mode == "anonymize-in-place":
        findings.append(AntiPatternFinding(
            2, "deletion.mode",
            "records are anonymized and retained instead of erased; "
            "re-identification risk persists and anonymization itself "
            "needs a legal basis"))

    # 3. personal fields stored without tagging enforcement
    for i, field_cfg in enumerate(schema.get("fields", []) or []):
        name = str(field_cfg.get("name", ""))
        is_pii = bool(field_cfg.get("pii", False)) or \
            name.lower() in PII_FIELD_DENYLIST
        if is_pii and not field_cfg.get("tagging_enforced", False):
            findings.append(AntiPatternFinding(
                3, f"schema.fields[{i}].tagging_enforced",
                f"personal field {name!r} is stored without enforced subject "
                f"tagging; its owner cannot be located when erasure is asked"))

    # 4. mismanaged deletion depth: too shallow, or fanned out lawlessly
    depth = str(deletion.get("depth", "") or "")
    if depth in ("service-level-only", "deactivate-only"):
        findings.append(AntiPatternFinding(
            4, "deletion.depth",
            f"deletion depth {depth!r} hides records instead of erasing "
            f"them; the stored data survives"))
    propagation = deletion.get("external_propagation", {}) or {}
    if propagation.get("enabled", False) and \
            not str(propagation.get("legal_basis", "") or "").strip():
        findings.append(AntiPatternFinding(
            4, "deletion.external_propagation.legal_basis",
            "external deletion propagation is enabled with no legal basis; "
            "forwarding the request itself discloses the subject"))

    # 5. trace logging with no retention bound
    level = str(logging_cfg.get("level", "") or "")
    retention = logging_cfg.get("retention_days", None)
    unbounded = retention in (None, 0, "unlimited")
    if level == "trace" and unbounded:
        findings.append(AntiPatternFinding(
            5, "logging.retention_days",
            "trace-level logs with no expiry accumulate every value they "
            "ever saw; erased data lives on in the log"))

    # 6. verifying erasure harder than registration
    rights = str(verification.get("rights_level", "none") or "none")
    registration = str(verification.get("registration_level", "none") or "none")
    try:
        excessive = level_rank(rights) > level_rank(registration)
    except ValueError as exc:
        raise ConfigUnparseable(f"verification: {exc}") from exc
    if excessive:
        findings.append(AntiPatternFinding(
            6, "verification.rights_level",
            f"exercising rights demands {rights!r} while registration "
            f"accepted {registration!r}; the extra hurdle is an undue burden"))

    findings.sort(key=lambda f: (f.pattern_id, f.location))
    return findings


def lint_file(path: Path) -> list[AntiPatternFinding]:
    return lint(load_system_config(path))
