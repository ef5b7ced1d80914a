"""Registries for catalog maps and partitions referenced from expressions."""

from __future__ import annotations

from .errors import UnknownMap, UnknownPartition

_MAPS: dict = {}
_PARTITIONS: dict = {}


def register_map(m) -> None:
    _MAPS[m.map_id] = m


def get_map(map_id: str):
    try:
        return _MAPS[map_id]
    except KeyError:
        raise UnknownMap(f"no registered map {map_id!r}") from None


def has_map(map_id: str) -> bool:
    return map_id in _MAPS


def map_ids():
    return sorted(_MAPS)


def register_partition(p) -> None:
    _PARTITIONS[p.pid] = p


def get_partition(pid: str):
    try:
        return _PARTITIONS[pid]
    except KeyError:
        raise UnknownPartition(f"no registered partition {pid!r}") from None


def has_partition(pid: str) -> bool:
    return pid in _PARTITIONS


def partition_ids():
    return sorted(_PARTITIONS)
