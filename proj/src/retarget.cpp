#include "rigkit/retarget.hpp"

#include <algorithm>
#include <cctype>

namespace rigkit {

namespace {

// Ancestor lookup table: anc[a][b] true when a is a strict ancestor of b.
std::vector<std::vector<bool>> ancestor_table(const Skeleton& s) {
  const size_t n = s.joint_count();
  std::vector<std::vector<bool>> anc(n, std::vector<bool>(n, false));
  for (size_t j = 0; j < n; ++j) {
    int p = s.parent[j];
    while (p >= 0) {
      anc[p][j] = true;
      p = s.parent[p];
    }
  }
  return anc;
}

std::vector<std::string> name_tokens(const std::string& name) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };
  for (size_t i = 0; i < name.size(); ++i) {
    const char c = name[i];
    if (!std::isalnum(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    // Split camelCase boundaries.
    if (std::isupper(static_cast<unsigned char>(c)) && i > 0 &&
        std::islower(static_cast<unsigned char>(name[i - 1]))) {
      flush();
    }
    current += static_cast<char>(
        std::tolower(static_cast<unsigned char>(c)));
  }
  flush();
  return tokens;
}

size_t shared_token_count(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  size_t count = 0;
  for (const std::string& t : a) {
    if (std::find(b.begin(), b.end(), t) != b.end()) ++count;
  }
  return count;
}

class CorrespondenceBuilder {
 public:
  CorrespondenceBuilder(const Skeleton& src, const Skeleton& tgt)
      : src_(src),
        tgt_(tgt),
        src_anc_(ancestor_table(src)),
        tgt_anc_(ancestor_table(tgt)),
        map_(tgt.joint_count()),
        claimed_(src.joint_count(), false) {}

  bool consistent(int jt, int js) const {
    for (size_t a = 0; a < map_.size(); ++a) {
      if (!map_[a].has_value() || static_cast<int>(a) == jt) continue;
      const int b = *map_[a];
      if (tgt_anc_[a][jt] && !(src_anc_[b][js] || b == js)) return false;
      if (tgt_anc_[jt][a] && !(src_anc_[js][b] || js == b)) return false;
    }
    return true;
  }

  bool accept(int jt, int js) {
    if (map_[jt].has_value() || claimed_[js] || !consistent(jt, js)) {
      return false;
    }
    map_[jt] = js;
    claimed_[js] = true;
    return true;
  }

  void match_by_name() {
    for (size_t jt = 0; jt < tgt_.joint_count(); ++jt) {
      for (size_t js = 0; js < src_.joint_count(); ++js) {
        if (!claimed_[js] && tgt_.names[jt] == src_.names[js]) {
          accept(static_cast<int>(jt), static_cast<int>(js));
          break;
        }
      }
    }
  }

  void match_by_tokens() {
    std::vector<std::vector<std::string>> src_tokens;
    for (const auto& n : src_.names) src_tokens.push_back(name_tokens(n));
    for (size_t jt = 0; jt < tgt_.joint_count(); ++jt) {
      if (map_[jt].has_value()) continue;
      const auto tokens = name_tokens(tgt_.names[jt]);
      int best = -1;
      size_t best_count = 0;
      for (size_t js = 0; js < src_.joint_count(); ++js) {
        if (claimed_[js]) continue;
        const size_t count = shared_token_count(tokens, src_tokens[js]);
        if (count > best_count) {
          best_count = count;
          best = static_cast<int>(js);
        }
      }
      if (best >= 0 && best_count > 0) {
        accept(static_cast<int>(jt), best);
      }
    }
  }

  void match_topologically() {
    accept(tgt_.root(), src_.root());
    const auto src_kids = src_.children();
    const auto tgt_kids = tgt_.children();
    // Walk mapped pairs breadth-first; zip children in index order when the
    // counts agree.
    std::vector<std::pair<int, int>> queue;
    for (size_t jt = 0; jt < map_.size(); ++jt) {
      if (map_[jt].has_value()) queue.emplace_back(static_cast<int>(jt), *map_[jt]);
    }
    for (size_t q = 0; q < queue.size(); ++q) {
      const auto [jt, js] = queue[q];
      const auto& tk = tgt_kids[jt];
      const auto& sk = src_kids[js];
      if (tk.size() != sk.size()) continue;
      for (size_t c = 0; c < tk.size(); ++c) {
        if (!map_[tk[c]].has_value() && accept(tk[c], sk[c])) {
          queue.emplace_back(tk[c], sk[c]);
        }
      }
    }
  }

  JointCorrespondence take() { return {std::move(map_)}; }

 private:
  const Skeleton& src_;
  const Skeleton& tgt_;
  std::vector<std::vector<bool>> src_anc_;
  std::vector<std::vector<bool>> tgt_anc_;
  std::vector<std::optional<int>> map_;
  std::vector<bool> claimed_;
};

}  // namespace

JointCorrespondence build_correspondence(const Skeleton& src,
                                         const Skeleton& tgt) {
  if (src.joint_count() == 0 || tgt.joint_count() == 0) {
    throw NoRootError("correspondence requires non-empty skeletons");
  }
  CorrespondenceBuilder builder(src, tgt);
  builder.match_by_name();
  builder.match_by_tokens();
  builder.match_topologically();
  return builder.take();
}

PoseTransforms retarget_pose(const PoseTransforms& src_pose,
                             const JointCorrespondence& correspondence,
                             const Skeleton& tgt, const Skeleton& src) {
  if (src_pose.local_rotation.size() != src.joint_count() ||
      correspondence.map.size() != tgt.joint_count()) {
    throw SizeMismatchError("retarget_pose inputs do not match skeletons");
  }
  const double src_height = std::max(skeleton_height(src), 1e-12);
  const double ratio = skeleton_height(tgt) / src_height;

  std::vector<Mat3> locals(tgt.joint_count(), Mat3::identity());
  for (size_t j = 0; j < tgt.joint_count(); ++j) {
    if (correspondence.map[j].has_value()) {
      locals[j] = src_pose.local_rotation[*correspondence.map[j]];
    }
  }
  return forward_kinematics(tgt, locals, src_pose.root_translation * ratio);
}

std::vector<PoseTransforms> retarget_clip(
    const std::vector<PoseTransforms>& src_clip,
    const JointCorrespondence& correspondence, const Skeleton& tgt,
    const Skeleton& src) {
  std::vector<PoseTransforms> out;
  out.reserve(src_clip.size());
  for (const PoseTransforms& pose : src_clip) {
    out.push_back(retarget_pose(pose, correspondence, tgt, src));
  }
  return out;
}

}  // namespace rigkit
