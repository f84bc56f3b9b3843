"""Size limits for the exhaustive oracles (net enumeration, set cover, witness search).

``LSSKIT_ORACLE_LIMIT`` overrides the ambient-set limit for net enumeration and
the target-set limit for exact covers.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace

ENV_VAR = "LSSKIT_ORACLE_LIMIT"


@dataclass(frozen=True)
class OracleLimits:
    net_ambient: int = 20
    cover_target: int = 20
    cover_base: int = 64
    witness_points: int = 10
    witness_levels: int = 3
    # candidate A_x sets per point are all subsets of a star x levels
    witness_bits_per_point: int = 14
    witness_nodes: int = 2_000_000

    @classmethod
    def from_env(cls) -> "OracleLimits":
        raw = os.environ.get(ENV_VAR)
        if not raw:
            return cls()
        value = int(raw)
        if value < 1:
            raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
        return cls(net_ambient=value, cover_target=value)

    def with_(self, **changes) -> "OracleLimits":
        return replace(self, **changes)

    def as_dict(self) -> dict[str, int]:
        return {
            "net_ambient": self.net_ambient,
            "cover_target": self.cover_target,
            "cover_base": self.cover_base,
            "witness_points": self.witness_points,
            "witness_levels": self.witness_levels,
            "witness_bits_per_point": self.witness_bits_per_point,
            "witness_nodes": self.witness_nodes,
        }


def current(limits: OracleLimits | None = None) -> OracleLimits:
    return limits if limits is not None else OracleLimits.from_env()
