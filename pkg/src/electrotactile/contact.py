"""God-object contact resolution for a single tracked fingertip.

The tracked fingertip position may move freely through scene geometry; its
avatar (the proxy drawn to the user) is constrained to stay on object
surfaces. Once contact begins, the proxy sticks to the face through which
the fingertip entered and slides along it until the fingertip leaves the
object volume. The tracked-vs-proxy distance is the interpenetration depth
that drives all downstream feedback.

Coordinates are meters in a right-handed, y-up frame.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

#: Interpenetration depth (m) mapped to full-scale feedback; deeper is clamped.
D_MAX = 0.03

#: Tolerance for "proxy lies on the surface" checks.
SURFACE_TOL = 1e-7

SCENE_FORMAT_VERSION = 1


class SceneError(ValueError):
    """Raised for degenerate or malformed scene geometry."""


@dataclass(frozen=True, slots=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite vector component: {self}")

    def __getitem__(self, axis: int) -> float:
        if axis == 0:
            return self.x
        if axis == 1:
            return self.y
        if axis == 2:
            return self.z
        raise IndexError(axis)

    def distance_to(self, other: "Vec3") -> float:
        dx = self.x - other.x
        dy = self.y - other.y
        dz = self.z - other.z
        return math.sqrt(dx * dx + dy * dy + dz * dz)

    def lerp(self, other: "Vec3", s: float) -> "Vec3":
        return Vec3(
            self.x + (other.x - self.x) * s,
            self.y + (other.y - self.y) * s,
            self.z + (other.z - self.z) * s,
        )

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.z]

    @classmethod
    def from_seq(cls, seq: Sequence[float]) -> "Vec3":
        if len(seq) != 3:
            raise ValueError(f"expected 3 components, got {len(seq)}")
        return cls(float(seq[0]), float(seq[1]), float(seq[2]))


@dataclass(frozen=True, slots=True)
class AxisAlignedBox:
    center: Vec3
    half_extents: Vec3

    def __post_init__(self):
        h = self.half_extents
        if not (h.x > 0.0 and h.y > 0.0 and h.z > 0.0):
            raise SceneError(f"box half_extents must be strictly positive, got {h}")

    def contains(self, p: Vec3) -> bool:
        """True when p is strictly inside the box volume."""
        c, h = self.center, self.half_extents
        return (
            abs(p.x - c.x) < h.x
            and abs(p.y - c.y) < h.y
            and abs(p.z - c.z) < h.z
        )

    def signed_distance(self, p: Vec3) -> float:
        """Positive outside, negative inside (distance to the boundary)."""
        c, h = self.center, self.half_extents
        qx = abs(p.x - c.x) - h.x
        qy = abs(p.y - c.y) - h.y
        qz = abs(p.z - c.z) - h.z
        outside = math.sqrt(max(qx, 0.0) ** 2 + max(qy, 0.0) ** 2 + max(qz, 0.0) ** 2)
        inside = min(max(qx, qy, qz), 0.0)
        return outside + inside


@dataclass(frozen=True, slots=True)
class HalfSpace:
    point: Vec3
    outward_normal: Vec3

    def __post_init__(self):
        n = self.outward_normal
        norm = math.sqrt(n.x * n.x + n.y * n.y + n.z * n.z)
        if abs(norm - 1.0) > 1e-9:
            raise SceneError(f"outward_normal must be unit length, |n|={norm!r}")

    def contains(self, p: Vec3) -> bool:
        """True when p is strictly below the boundary plane."""
        return self.signed_distance(p) < 0.0

    def signed_distance(self, p: Vec3) -> float:
        n, q = self.outward_normal, self.point
        return (p.x - q.x) * n.x + (p.y - q.y) * n.y + (p.z - q.z) * n.z


Shape = Union[AxisAlignedBox, HalfSpace]

#: Box face identifier: (axis index 0..2, side +1/-1). Half-space contacts use None.
Face = tuple[int, int]


@dataclass(frozen=True, slots=True)
class SceneObject:
    id: str
    shape: Shape


@dataclass(frozen=True, slots=True)
class FingertipState:
    real_pos: Vec3
    avatar_pos: Vec3
    in_contact: bool = False
    contact_object: Optional[str] = None
    contact_face: Optional[Face] = None

    @classmethod
    def free(cls, pos: Vec3) -> "FingertipState":
        return cls(real_pos=pos, avatar_pos=pos)


@dataclass(frozen=True, slots=True)
class InterpenetrationSample:
    t: float      # seconds since trial start
    d: float      # meters, tracked fingertip to constrained avatar
    d_hat: float  # d / D_MAX clamped to [0, 1]


def _box_entry_face(box: AxisAlignedBox, p: Vec3) -> Face:
    """Nearest face of a box to an interior point.

    Ties are broken by smallest axis index, positive side first, so corner
    and edge entries resolve deterministically.
    """
    c, h = box.center, box.half_extents
    best_face = (0, 1)
    best_depth = math.inf
    for axis in range(3):
        local = p[axis] - c[axis]
        half = h[axis]
        for sign, depth in ((1, half - local), (-1, half + local)):
            if depth < best_depth:
                best_depth = depth
                best_face = (axis, sign)
    return best_face


def _project_onto_box_face(box: AxisAlignedBox, p: Vec3, face: Face) -> Vec3:
    """Project p onto the plane of a box face, clamped to the face extent."""
    axis, sign = face
    c, h = box.center, box.half_extents
    out = [p.x, p.y, p.z]
    out[axis] = c[axis] + sign * h[axis]
    for other in range(3):
        if other == axis:
            continue
        lo = c[other] - h[other]
        hi = c[other] + h[other]
        out[other] = min(max(out[other], lo), hi)
    return Vec3(out[0], out[1], out[2])


def _project_onto_plane(hs: HalfSpace, p: Vec3) -> Vec3:
    d = hs.signed_distance(p)
    n = hs.outward_normal
    return Vec3(p.x - d * n.x, p.y - d * n.y, p.z - d * n.z)


def _containing_object(scene: Sequence[SceneObject], p: Vec3) -> Optional[SceneObject]:
    for obj in scene:
        if obj.shape.contains(p):
            return obj
    return None


def resolve_proxy(
    prev: FingertipState, real_pos: Vec3, scene: Sequence[SceneObject]
) -> FingertipState:
    """Advance the god-object proxy by one tracked sample.

    While the tracked point is strictly inside an object the proxy is the
    projection of the tracked point onto the face through which contact
    began (clamped to that face), so it slides along the entry face instead
    of teleporting across the object for deep penetrations. Contact ends
    exactly when the tracked point is no longer strictly inside.
    """
    inside = _containing_object(scene, real_pos)
    if inside is None:
        return FingertipState.free(real_pos)

    shape = inside.shape
    if isinstance(shape, HalfSpace):
        avatar = _project_onto_plane(shape, real_pos)
        return FingertipState(real_pos, avatar, True, inside.id, None)

    if prev.in_contact and prev.contact_object == inside.id and prev.contact_face is not None:
        face = prev.contact_face
    else:
        face = _box_entry_face(shape, real_pos)
    avatar = _project_onto_box_face(shape, real_pos, face)
    return FingertipState(real_pos, avatar, True, inside.id, face)


def interpenetration(state: FingertipState, t: float) -> InterpenetrationSample:
    """Measure tracked-vs-avatar distance and its normalized depth."""
    if not state.in_contact:
        return InterpenetrationSample(t=t, d=0.0, d_hat=0.0)
    d = state.real_pos.distance_to(state.avatar_pos)
    d_hat = min(max(d / D_MAX, 0.0), 1.0)
    return InterpenetrationSample(t=t, d=d, d_hat=d_hat)


def signed_distance(obj: SceneObject, p: Vec3) -> float:
    return obj.shape.signed_distance(p)


# --- scene description files -------------------------------------------------
#
# A scene file is a UTF-8 JSON document:
#   {"version": 1,
#    "objects": [
#      {"id": "cube", "shape": "box",
#       "center": [x, y, z], "half_extents": [hx, hy, hz]},
#      {"id": "table", "shape": "half_space",
#       "point": [x, y, z], "outward_normal": [nx, ny, nz]}]}
# All lengths in meters.


def scene_to_dict(objects: Sequence[SceneObject]) -> dict:
    out = []
    for obj in objects:
        if isinstance(obj.shape, AxisAlignedBox):
            out.append(
                {
                    "id": obj.id,
                    "shape": "box",
                    "center": obj.shape.center.as_list(),
                    "half_extents": obj.shape.half_extents.as_list(),
                }
            )
        else:
            out.append(
                {
                    "id": obj.id,
                    "shape": "half_space",
                    "point": obj.shape.point.as_list(),
                    "outward_normal": obj.shape.outward_normal.as_list(),
                }
            )
    return {"version": SCENE_FORMAT_VERSION, "objects": out}


def scene_from_dict(doc: dict) -> list[SceneObject]:
    if doc.get("version") != SCENE_FORMAT_VERSION:
        raise SceneError(f"unsupported scene format version: {doc.get('version')!r}")
    objects = []
    seen_ids = set()
    for entry in doc.get("objects", []):
        obj_id = str(entry.get("id", f"object{len(objects)}"))
        if obj_id in seen_ids:
            raise SceneError(f"duplicate object id: {obj_id}")
        seen_ids.add(obj_id)
        kind = entry.get("shape")
        if kind == "box":
            shape: Shape = AxisAlignedBox(
                center=Vec3.from_seq(entry["center"]),
                half_extents=Vec3.from_seq(entry["half_extents"]),
            )
        elif kind == "half_space":
            shape = HalfSpace(
                point=Vec3.from_seq(entry["point"]),
                outward_normal=Vec3.from_seq(entry["outward_normal"]),
            )
        else:
            raise SceneError(f"unknown shape kind: {kind!r}")
        objects.append(SceneObject(id=obj_id, shape=shape))
    return objects


def load_scene(path) -> list[SceneObject]:
    with open(path, encoding="utf-8") as fh:
        return scene_from_dict(json.load(fh))


def save_scene(objects: Sequence[SceneObject], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_dict(objects), fh, indent=2)
        fh.write("\n")
