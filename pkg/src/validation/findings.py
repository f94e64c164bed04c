import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Tuple

from ..core.scenery import element_sort_key


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Finding:
    rule: str
    severity: Severity
    subjects: Tuple[str, ...]
    message: str
    code: str

    def __post_init__(self):
        object.__setattr__(self, 'subjects', tuple(self.subjects))

    def sort_key(self) -> Tuple:
        return self.rule, tuple(element_sort_key(s) for s in self.subjects), self.code, self.message

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def to_dict(self) -> dict:
        return {
            'rule': self.rule,
            'severity': self.severity.value,
            'subjects': list(self.subjects),
            'message': f"{self.code}: {self.message}",
        }

    def format(self) -> str:
        subjects = ",".join(self.subjects) or "-"
        return f"{self.rule} {self.severity.value} {subjects}: {self.code}: {self.message}"


def sort_findings(findings: Iterable[Finding]) -> List[Finding]:
    return sorted(set(findings), key=Finding.sort_key)


def errors(findings: Iterable[Finding]) -> List[Finding]:
    return [f for f in findings if f.is_error]


def findings_to_json(findings: Iterable[Finding]) -> str:
    return json.dumps([f.to_dict() for f in findings], indent=2)


def format_findings(findings: Iterable[Finding]) -> str:
    return "\n".join(f.format() for f in findings)
