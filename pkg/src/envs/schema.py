"""
Feature schemas: named groups of observation slots.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple


@dataclass(frozen=True)
class FeatureGroup:
    """A contiguous block of observation slots."""

    name: str
    start: int
    length: int
    reducible: bool = False
    feature_names: Tuple[str, ...] = ()

    @property
    def stop(self) -> int:
        return self.start + self.length


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered, contiguous feature groups covering the whole observation."""

    name: str
    groups: Tuple[FeatureGroup, ...]

    def __post_init__(self):
        cursor = 0
        for group in self.groups:
            if group.start != cursor or group.length < 1:
                raise ValueError(f"Feature group '{group.name}' is not contiguous at index {cursor}")
            if group.feature_names and len(group.feature_names) != group.length:
                raise ValueError(f"Feature group '{group.name}' has {len(group.feature_names)} names for {group.length} slots")
            cursor = group.stop

    @property
    def total_length(self) -> int:
        return self.groups[-1].stop if self.groups else 0

    def group(self, name: str) -> FeatureGroup:
        for group in self.groups:
            if group.name == name:
                return group
        raise ValueError(f"Schema '{self.name}' has no group '{name}'")

    def slice(self, name: str) -> slice:
        group = self.group(name)
        return slice(group.start, group.stop)

    def reducible_indices(self) -> List[int]:
        indices = []
        for group in self.groups:
            if group.reducible:
                indices.extend(range(group.start, group.stop))
        return indices

    def feature_names(self) -> List[str]:
        names = []
        for group in self.groups:
            if group.feature_names:
                names.extend(group.feature_names)
            else:
                names.extend(f"{group.name}_{i}" for i in range(group.length))
        return names

    def group_of(self, index: int) -> str:
        for group in self.groups:
            if group.start <= index < group.stop:
                return group.name
        raise ValueError(f"Index {index} is outside schema '{self.name}'")


def build_schema(name: str, blocks: Sequence[Tuple[str, int, bool, Sequence[str]]]) -> FeatureSchema:
    """
    Lay out (name, length, reducible, feature_names) blocks back to back.

    Args:
        name: Schema name
        blocks: Group specifications in observation order

    Returns:
        The schema
    """
    groups = []
    cursor = 0
    for group_name, length, reducible, names in blocks:
        groups.append(FeatureGroup(group_name, cursor, int(length), bool(reducible), tuple(names)))
        cursor += int(length)
    return FeatureSchema(name=name, groups=tuple(groups))


def allegro_table1_schema() -> FeatureSchema:
    """The 75-feature observation of the four-finger hand with 13 tactile sensors."""
    tactile_names = (
        [f"tactile_lower_{i}" for i in range(3)]
        + [f"tactile_middle_{i}" for i in range(3)]
        + [f"tactile_tip_{i}" for i in range(3)]
        + [f"tactile_thumb_{i}" for i in range(3)]
        + ["tactile_palm"]
    )
    return build_schema(
        "allegro_table1",
        [
            ("joint_position", 16, False, ()),
            ("joint_velocity", 16, False, ()),
            ("joint_torque", 16, False, ()),
            ("object_quaternion", 4, False, ()),
            ("object_angular_velocity", 3, False, ()),
            ("target_position", 3, False, ()),
            ("target_quaternion", 4, False, ()),
            ("tactile", 13, True, tactile_names),
        ],
    )


SCHEMA_PRESETS: Dict[str, Callable[[], FeatureSchema]] = {
    "allegro_table1": allegro_table1_schema,
}


def get_schema(name: str) -> FeatureSchema:
    if name not in SCHEMA_PRESETS:
        raise ValueError(f"Unknown schema preset '{name}'. Valid presets: {sorted(SCHEMA_PRESETS)}")
    return SCHEMA_PRESETS[name]()
