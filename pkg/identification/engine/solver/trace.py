from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterator, List, Optional

import orjson


def _six_digits(value: Any) -> Any:
    if isinstance(value, float):
        return float(f"{value:.6g}")
    return value


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    cost: float
    constraint_norm: float
    step_norm: float
    factorization_ms: float
    cumulative_flops: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SolverTrace:
    """Per-iteration history of one solve, in iteration order."""
    records: List[IterationRecord] = field(default_factory=list)

    def append(self, record: IterationRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[IterationRecord]:
        return iter(self.records)

    @property
    def last(self) -> Optional[IterationRecord]:
        return self.records[-1] if self.records else None

    def to_jsonl(self, **extra: Any) -> bytes:
        """One JSON object per line, floats at six significant digits; `extra` fields lead every record."""
        lines = [orjson.dumps({key: _six_digits(value) for key, value in {**extra, **record.to_dict()}.items()})
                 for record in self.records]
        return b"".join(line + b"\n" for line in lines)
