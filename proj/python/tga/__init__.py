"""Logic locking, the topology-guided attack and its countermeasure."""

import json

from ._tga import (
    AttackReport,
    KeyPrediction,
    LockedCircuit,
    Netlist,
    NetlistError,
    ParseError,
    attack,
    check_equivalence,
    complete_with_oracle,
    lock_cm,
    lock_rll,
    lock_sll,
    parse_key_file,
    score,
)

__all__ = [
    "AttackReport",
    "KeyPrediction",
    "LockedCircuit",
    "Netlist",
    "NetlistError",
    "ParseError",
    "attack",
    "check_equivalence",
    "complete_with_oracle",
    "key_map",
    "lock_cm",
    "lock_rll",
    "lock_sll",
    "parse_key_file",
    "record",
    "score",
]


def key_map(locked: Netlist, bits) -> dict:
    """Key assignment by key-input name from bits in key-input order."""
    names = locked.key_inputs
    if len(names) != len(bits):
        raise ValueError(f"{len(bits)} bits for {len(names)} key inputs")
    return dict(zip(names, map(bool, bits)))


def record(circuit: LockedCircuit) -> dict:
    return json.loads(circuit.record_json())
