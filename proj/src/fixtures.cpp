#include "rigkit/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rigkit/rng.hpp"
#include "rigkit/rotation.hpp"

namespace rigkit {

namespace {

struct SkeletonSpec {
  std::vector<std::string> names;
  std::vector<int> parents;
  std::vector<Vec3> offsets;

  int add(const std::string& name, int parent, const Vec3& offset) {
    names.push_back(name);
    parents.push_back(parent);
    offsets.push_back(offset);
    return static_cast<int>(names.size()) - 1;
  }
};

Skeleton two_bone_cylinder_skeleton() {
  SkeletonSpec spec;
  const int base = spec.add("Base", -1, {0, 0, 0});
  const int mid = spec.add("Mid", base, {0, 1, 0});
  spec.add("Tip", mid, {0, 1, 0});
  return make_skeleton(spec.names, spec.parents, spec.offsets);
}

Skeleton biped_skeleton(bool branchy) {
  SkeletonSpec spec;
  const int hips = spec.add("Hips", -1, {0, 1.0, 0});
  const int spine = spec.add("Spine", hips, {0, 0.25, 0});
  const int chest = spec.add("Chest", spine, {0, 0.25, 0});
  const int neck = spec.add("Neck", chest, {0, 0.2, 0});
  spec.add("Head", neck, {0, 0.2, 0});

  const auto arm = [&](double side, const std::string& prefix) {
    const int shoulder =
        spec.add(prefix + "Shoulder", chest, {side * 0.2, 0.15, 0});
    const int upper = spec.add(prefix + "Arm", shoulder, {side * 0.25, 0, 0});
    const int fore = spec.add(prefix + "ForeArm", upper, {side * 0.3, 0, 0});
    const int hand = spec.add(prefix + "Hand", fore, {side * 0.25, 0, 0});
    if (branchy) {
      spec.add(prefix + "Hand_end", hand, {side * 0.1, 0, 0});
    }
  };
  arm(1.0, "Left");
  arm(-1.0, "Right");

  const auto leg = [&](double side, const std::string& prefix) {
    const int up = spec.add(prefix + "UpLeg", hips, {side * 0.13, -0.18, 0});
    const int low = spec.add(prefix + "Leg", up, {0, -0.4, 0});
    const int foot = spec.add(prefix + "Foot", low, {0, -0.37, 0});
    const int toe = spec.add(prefix + "ToeBase", foot, {0, -0.05, 0.15});
    if (branchy) {
      spec.add(prefix + "ToeBase_end", toe, {0, 0, 0.08});
    }
  };
  leg(1.0, "Left");
  leg(-1.0, "Right");
  return make_skeleton(spec.names, spec.parents, spec.offsets);
}

struct TubeBuilder {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<int> mirror;  // vertex index of the x-mirrored twin

  int ring_res = 8;

  // Appends a closed tube around segment a-b. Returns the first vertex index.
  // Each joint must end up strictly inside exactly one tube volume, otherwise
  // ray-parity SDF signs break where closed tubes overlap, so bone tubes are
  // inset at the parent end and extended past the child joint (see
  // add_bone_tube below).
  int add_tube(const Vec3& a, const Vec3& b, double radius, int rings) {
    const int base = static_cast<int>(vertices.size());
    const Vec3 axis = b - a;
    const double len = norm(axis);
    const Vec3 dir = len > 1e-12 ? axis / len : Vec3{0, 1, 0};
    const Vec3 ref = std::abs(dir.y) < 0.9 ? Vec3{0, 1, 0} : Vec3{0, 0, 1};
    const Vec3 u = normalized(cross(ref, dir));
    const Vec3 v = cross(dir, u);

    const int ring_count = rings + 1;
    for (int r = 0; r < ring_count; ++r) {
      const double t =
          ring_count > 1 ? static_cast<double>(r) / (ring_count - 1) : 0.0;
      const Vec3 center = a + axis * t;
      for (int k = 0; k < ring_res; ++k) {
        const double angle = 2.0 * M_PI * k / ring_res;
        vertices.push_back(center + u * (radius * std::cos(angle)) +
                           v * (radius * std::sin(angle)));
      }
    }
    for (int r = 0; r + 1 < ring_count; ++r) {
      for (int k = 0; k < ring_res; ++k) {
        const int k2 = (k + 1) % ring_res;
        const int a0 = base + r * ring_res + k;
        const int a1 = base + r * ring_res + k2;
        const int b0 = base + (r + 1) * ring_res + k;
        const int b1 = base + (r + 1) * ring_res + k2;
        faces.push_back({a0, a1, b1});
        faces.push_back({a0, b1, b0});
      }
    }
    const int cap_a = static_cast<int>(vertices.size());
    vertices.push_back(a);
    const int cap_b = static_cast<int>(vertices.size());
    vertices.push_back(b);
    for (int k = 0; k < ring_res; ++k) {
      const int k2 = (k + 1) % ring_res;
      faces.push_back({cap_a, base + k2, base + k});
      const int last = base + rings * ring_res;
      faces.push_back({cap_b, last + k, last + k2});
    }
    return base;
  }

  // Tube for the bone parent->child, covering the child joint only.
  void add_bone_tube(const Vec3& parent, const Vec3& child, double radius,
                     int rings) {
    const Vec3 axis = child - parent;
    const double len = std::max(norm(axis), 1e-9);
    const Vec3 dir = axis / len;
    const double ext = 0.8 * radius;
    const Vec3 start = parent + dir * std::min(ext, 0.45 * len);
    const Vec3 end = child + dir * ext;
    add_tube(start, end, radius, rings);
  }

  // Short fat tube around the root joint (no bone covers it otherwise).
  // Half-length stays below the 0.8 * radius bone-tube inset so the bulb
  // never touches the child tubes.
  void add_root_bulb(const Vec3& root, double radius, int rings) {
    const double half = 0.65 * radius;
    add_tube(root - Vec3{0, half, 0}, root + Vec3{0, half, 0}, 1.4 * radius,
             rings);
  }

  // Mirror indices for a tube whose geometry is symmetric about x = 0:
  // ring vertex k maps to ring vertex (R/2 - k) mod R when the ring basis has
  // u = +-x and v in the x = 0 plane, which holds for all self-paired bones.
  void record_self_mirror(int start) {
    const int count = static_cast<int>(vertices.size()) - start;
    const int ring_count = (count - 2) / ring_res;
    for (int r = 0; r < ring_count; ++r) {
      for (int k = 0; k < ring_res; ++k) {
        const int twin = ((ring_res / 2 - k) % ring_res + ring_res) % ring_res;
        mirror.push_back(start + r * ring_res + twin);
      }
    }
    mirror.push_back(start + ring_count * ring_res);      // cap a
    mirror.push_back(start + ring_count * ring_res + 1);  // cap b
  }

  // Appends the exact x-mirror of vertices [start, start + count) with the
  // same face topology.
  int add_mirrored(int start, int count, int face_start, int face_count) {
    const int base = static_cast<int>(vertices.size());
    for (int i = 0; i < count; ++i) {
      const Vec3& p = vertices[start + i];
      vertices.push_back({-p.x, p.y, p.z});
    }
    for (int f = 0; f < face_count; ++f) {
      const auto& face = faces[face_start + f];
      faces.push_back({face[0] - start + base, face[1] - start + base,
                       face[2] - start + base});
    }
    return base;
  }
};

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double den = norm_sq(ab);
  double t = den > 0.0 ? dot(p - a, ab) / den : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

// Distance from a point to the bones a joint drives: segments to children,
// or the joint itself for leaves.
std::vector<double> joint_distances(const Skeleton& s, const Vec3& p) {
  const auto kids = s.children();
  std::vector<double> d(s.joint_count());
  for (size_t j = 0; j < s.joint_count(); ++j) {
    if (kids[j].empty()) {
      d[j] = norm(p - s.rest_global[j]);
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int c : kids[j]) {
      best = std::min(best, point_segment_distance(p, s.rest_global[j],
                                                   s.rest_global[c]));
    }
    d[j] = best;
  }
  return d;
}

DenseMatrix falloff_weights(const Skeleton& s, const std::vector<Vec3>& verts,
                            double width, const std::vector<int>& mirror) {
  const size_t nj = s.joint_count();
  DenseMatrix w(verts.size(), nj, 0.0);
  for (size_t i = 0; i < verts.size(); ++i) {
    const auto d = joint_distances(s, verts[i]);
    // Two nearest bones blend; everything else stays zero.
    std::array<size_t, 2> nearest{0, 0};
    double d0 = std::numeric_limits<double>::infinity();
    double d1 = d0;
    for (size_t j = 0; j < nj; ++j) {
      if (d[j] < d0) {
        d1 = d0;
        nearest[1] = nearest[0];
        d0 = d[j];
        nearest[0] = j;
      } else if (d[j] < d1) {
        d1 = d[j];
        nearest[1] = j;
      }
    }
    double sum = 0.0;
    for (int k = 0; k < (nj > 1 ? 2 : 1); ++k) {
      const double sdist = std::clamp(d[nearest[k]] / width, 0.0, 1.0);
      const double smooth = sdist * sdist * (3.0 - 2.0 * sdist);
      const double value = 1.0 - smooth;
      w(i, nearest[k]) = value;
      sum += value;
    }
    if (sum <= 0.0) {
      w(i, nearest[0]) = 1.0;
    } else {
      for (int k = 0; k < (nj > 1 ? 2 : 1); ++k) {
        w(i, nearest[k]) /= sum;
      }
    }
  }
  // Mirror-symmetrize through the vertex map so rows are exactly
  // rho-permuted mirrors. A no-op away from the lateral plane; on-plane
  // vertices would otherwise resolve their left/right near-tie to one side.
  DenseMatrix out(w.rows, w.cols, 0.0);
  for (size_t i = 0; i < w.rows; ++i) {
    const size_t m = static_cast<size_t>(mirror[i]);
    for (size_t j = 0; j < nj; ++j) {
      out(i, j) = 0.5 * (w(i, j) + w(m, s.rho[j]));
    }
  }
  return out;
}

}  // namespace

SyntheticCharacter make_character(CharacterTemplate tmpl, uint64_t seed,
                                  const CharacterParams& params) {
  if (params.ring_resolution < 3 || params.rings_per_bone < 1 ||
      params.radius <= 0.0 || params.falloff_width <= 0.0) {
    throw InvalidConfigError("make_character: invalid params");
  }
  SyntheticCharacter out;
  switch (tmpl) {
    case CharacterTemplate::TwoBoneCylinder:
      out.skeleton = two_bone_cylinder_skeleton();
      break;
    case CharacterTemplate::BipedSimple:
      out.skeleton = biped_skeleton(false);
      break;
    case CharacterTemplate::BipedBranchy:
      out.skeleton = biped_skeleton(true);
      break;
  }
  const Skeleton& s = out.skeleton;

  TubeBuilder builder;
  builder.ring_res = params.ring_resolution;
  {
    const int start = static_cast<int>(builder.vertices.size());
    builder.add_root_bulb(s.rest_global[s.root()], params.radius,
                          params.rings_per_bone);
    builder.record_self_mirror(start);
  }
  std::vector<bool> done(s.joint_count(), false);
  for (size_t j = 0; j < s.joint_count(); ++j) {
    if (s.parent[j] < 0 || done[j]) continue;
    const int m = s.rho[j];
    if (m == static_cast<int>(j) || s.parent[m] < 0) {
      const int start = static_cast<int>(builder.vertices.size());
      builder.add_bone_tube(s.rest_global[s.parent[j]], s.rest_global[j],
                            params.radius, params.rings_per_bone);
      builder.record_self_mirror(start);
      done[j] = true;
      continue;
    }
    // Mirrored pair: build the +x side, then its exact reflection.
    const int left = s.rest_global[j].x >= s.rest_global[m].x
                         ? static_cast<int>(j)
                         : m;
    const int right = s.rho[left];
    const int vstart = static_cast<int>(builder.vertices.size());
    const int fstart = static_cast<int>(builder.faces.size());
    builder.add_bone_tube(s.rest_global[s.parent[left]], s.rest_global[left],
                          params.radius, params.rings_per_bone);
    const int vcount = static_cast<int>(builder.vertices.size()) - vstart;
    const int fcount = static_cast<int>(builder.faces.size()) - fstart;
    const int mstart = builder.add_mirrored(vstart, vcount, fstart, fcount);
    for (int i = 0; i < vcount; ++i) {
      builder.mirror.push_back(mstart + i);
    }
    for (int i = 0; i < vcount; ++i) {
      builder.mirror.push_back(vstart + i);
    }
    done[left] = true;
    done[right] = true;
  }

  out.mesh = make_mesh(std::move(builder.vertices), std::move(builder.faces));
  out.vertex_mirror = std::move(builder.mirror);
  out.gt_weights = falloff_weights(s, out.mesh.vertices,
                                   params.falloff_width, out.vertex_mirror);
  out.gt_clips.push_back(make_clip(s, ClipKind::RandomSmooth, 8, seed));
  return out;
}

namespace {

Vec3 random_unit_vector(Rng& rng) {
  const double z = 2.0 * rng.unit() - 1.0;
  const double phi = 2.0 * M_PI * rng.unit();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), z, r * std::sin(phi)};
}

bool name_matches_any(const std::string& name,
                      std::initializer_list<const char*> tokens) {
  std::string low = name;
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  for (const char* t : tokens) {
    if (low.find(t) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

std::vector<PoseTransforms> make_clip(const Skeleton& s, ClipKind kind,
                                      int frames, uint64_t seed,
                                      const ClipParams& params) {
  if (frames < 1 || params.max_angle < 0.0) {
    throw InvalidConfigError("make_clip: invalid config");
  }
  Rng rng(seed);
  const size_t nj = s.joint_count();

  // Per-joint oscillation (axis, amplitude, frequency); amplitude is capped
  // by max_angle so sin never exceeds the joint limit.
  std::vector<Vec3> axes(nj);
  std::vector<double> amps(nj, 0.0);
  std::vector<double> freqs(nj, 1.0);
  for (size_t j = 0; j < nj; ++j) {
    axes[j] = random_unit_vector(rng);
    const double amp = params.max_angle * (0.25 + 0.75 * rng.unit());
    freqs[j] = 1.0 + static_cast<double>(rng.index(2));
    switch (kind) {
      case ClipKind::RandomSmooth:
        amps[j] = amp;
        break;
      case ClipKind::Wave:
        if (name_matches_any(s.names[j], {"arm", "hand", "shoulder"})) {
          amps[j] = amp;
        } else if (name_matches_any(s.names[j], {"spine", "chest", "neck"})) {
          amps[j] = 0.2 * amp;
        }
        break;
      case ClipKind::Crouch:
        if (name_matches_any(s.names[j], {"leg", "foot", "knee"})) {
          axes[j] = {1, 0, 0};
          amps[j] = amp;
        } else if (name_matches_any(s.names[j], {"spine", "hips"})) {
          amps[j] = 0.3 * amp;
        }
        break;
    }
  }
  const double yaw_amp = kind == ClipKind::RandomSmooth
                             ? 0.5 * params.max_angle * rng.unit()
                             : 0.0;
  const double travel = params.root_travel * skeleton_height(s);

  std::vector<PoseTransforms> clip;
  clip.reserve(frames);
  for (int t = 0; t < frames; ++t) {
    const double tau =
        frames > 1 ? static_cast<double>(t) / (frames - 1) : 0.0;
    std::vector<Mat3> locals(nj, Mat3::identity());
    for (size_t j = 0; j < nj; ++j) {
      if (amps[j] == 0.0) continue;
      const double angle = amps[j] * std::sin(2.0 * M_PI * freqs[j] * tau);
      locals[j] = rotation_about_axis(axes[j], angle);
    }
    Vec3 root_translation{0, 0, 0};
    if (kind == ClipKind::Crouch) {
      root_translation.y = -0.25 * travel * (1.0 - std::cos(2.0 * M_PI * tau));
    } else {
      root_translation.x = 0.3 * travel * std::sin(2.0 * M_PI * tau);
      root_translation.z = 0.5 * travel * (1.0 - std::cos(2.0 * M_PI * tau));
    }
    const int root = s.root();
    if (yaw_amp != 0.0) {
      locals[root] =
          rotation_about_y(yaw_amp * std::sin(2.0 * M_PI * tau)) * locals[root];
    }
    clip.push_back(forward_kinematics(s, locals, root_translation));
  }
  return clip;
}

const char* character_template_name(CharacterTemplate tmpl) {
  switch (tmpl) {
    case CharacterTemplate::BipedSimple:
      return "biped_simple";
    case CharacterTemplate::BipedBranchy:
      return "biped_branchy";
    default:
      return "two_bone_cylinder";
  }
}

const char* clip_kind_name(ClipKind kind) {
  switch (kind) {
    case ClipKind::Wave:
      return "wave";
    case ClipKind::Crouch:
      return "crouch";
    default:
      return "random_smooth";
  }
}

}  // namespace rigkit
