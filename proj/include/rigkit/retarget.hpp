#pragma once

#include <optional>
#include <vector>

#include "rigkit/skeleton.hpp"

namespace rigkit {

// Maps each target joint to a source joint (or none). Mapped pairs respect
// ancestry: ancestors map to ancestors-or-self.
struct JointCorrespondence {
  std::vector<std::optional<int>> map;  // indexed by target joint
};

// Name equality first, then shared name tokens, then a depth-based
// topological fallback for isomorphic chains. Injective over source joints;
// candidates that would violate ancestry consistency are dropped.
// Deterministic.
JointCorrespondence build_correspondence(const Skeleton& src,
                                         const Skeleton& tgt);

// Rule-based baseline: mapped joints copy the source local rotation,
// unmapped joints stay at identity, and the root translation scales by the
// ratio of grounded rest heights so contact frames keep toes near the
// ground.
PoseTransforms retarget_pose(const PoseTransforms& src_pose,
                             const JointCorrespondence& correspondence,
                             const Skeleton& tgt, const Skeleton& src);

std::vector<PoseTransforms> retarget_clip(
    const std::vector<PoseTransforms>& src_clip,
    const JointCorrespondence& correspondence, const Skeleton& tgt,
    const Skeleton& src);

}  // namespace rigkit
