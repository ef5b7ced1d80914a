"""Report records for the command line: rendering and round-tripping."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .verdicts import Certificate, Tier


@dataclass
class Report:
    claim: str
    params: dict
    tier: str
    verdict: str
    witness: dict = field(default_factory=dict)
    details: tuple = ()
    elapsed_ms: float = 0.0

    @staticmethod
    def from_certificate(cert: Certificate, elapsed_ms: float = 0.0) -> "Report":
        verdict = {True: "pass", False: "fail", None: "unknown"}[cert.ok]
        return Report(
            claim=cert.claim,
            params=dict(cert.params),
            tier=cert.tier.render(),
            verdict=verdict,
            witness=_plain(cert.witness),
            details=tuple(cert.details),
            elapsed_ms=elapsed_ms,
        )

    def passing(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> str:
        payload = {
            "claim": self.claim,
            "params": _plain(self.params),
            "tier": self.tier,
            "verdict": self.verdict,
            "witness": _plain(self.witness),
            "details": list(self.details),
            "elapsed_ms": round(self.elapsed_ms, 3),
        }
        return json.dumps(payload, sort_keys=True)

    @staticmethod
    def from_json(line: str) -> "Report":
        d = json.loads(line)
        return Report(
            claim=d["claim"],
            params=d["params"],
            tier=d["tier"],
            verdict=d["verdict"],
            witness=d["witness"],
            details=tuple(d["details"]),
            elapsed_ms=d["elapsed_ms"],
        )

    def render_text(self) -> str:
        head = f"[{self.verdict:>7}] {self.claim} ({self.tier})"
        if self.details:
            body = "".join(f"\n    - {d}" for d in self.details[:6])
            return head + body
        return head


def _plain(x):
    """Coerce witness payloads to JSON-able plain data, deterministically."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(str(v) for v in x)
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)
