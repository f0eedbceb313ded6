#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rigkit/animation.hpp"
#include "rigkit/fixtures.hpp"
#include "rigkit/io.hpp"
#include "rigkit/kernels.hpp"
#include "rigkit/metrics.hpp"
#include "rigkit/retarget.hpp"
#include "rigkit/solvers.hpp"

namespace fs = std::filesystem;
using namespace rigkit;

namespace {

constexpr const char* kVersion = "rigkit 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct SolverFileConfig {
  SkinningSolveConfig skin;
  RigSolveConfig rig;
  ContactConfig contact;
  std::string raw;  // file content, hashed into the manifest
};

// Key-value solver config: one "<key> <value>" pair per line, '#' comments.
// Unknown keys are rejected so typos do not silently fall back to defaults.
SolverFileConfig parse_solver_config(const std::string& text) {
  SolverFileConfig cfg;
  cfg.raw = text;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    double value = 0.0;
    if (!(ls >> value)) {
      throw ParseError("config key '" + key + "' has no numeric value",
                       line_no);
    }
    if (key == "skin.max_iterations") {
      cfg.skin.max_iterations = static_cast<int>(value);
    } else if (key == "skin.rel_tolerance") {
      cfg.skin.rel_tolerance = value;
    } else if (key == "skin.n_d") {
      cfg.skin.n_d = value;
    } else if (key == "skin.lambda_vtx") {
      cfg.skin.lambda_vtx = value;
    } else if (key == "skin.lambda_edge") {
      cfg.skin.lambda_edge = value;
    } else if (key == "skin.init_step") {
      cfg.skin.init_step = value;
    } else if (key == "skin.init_beta_scale") {
      cfg.skin.init_beta_scale = value;
    } else if (key == "skin.init_noise") {
      cfg.skin.init_noise = value;
    } else if (key == "skin.descriptor_knn") {
      cfg.skin.descriptor_knn = static_cast<int>(value);
    } else if (key == "skin.descriptor_blend") {
      cfg.skin.descriptor_blend = value;
    } else if (key == "rig.max_iterations") {
      cfg.rig.max_iterations = static_cast<int>(value);
    } else if (key == "rig.rel_tolerance") {
      cfg.rig.rel_tolerance = value;
    } else if (key == "rig.lambda_skel") {
      cfg.rig.lambda_skel = value;
    } else if (key == "rig.lambda_sdf") {
      cfg.rig.lambda_sdf = value;
    } else if (key == "rig.sdf_margin_fraction") {
      cfg.rig.sdf_margin_fraction = value;
    } else if (key == "rig.sdf_fd_step_fraction") {
      cfg.rig.sdf_fd_step_fraction = value;
    } else if (key == "rig.init_step") {
      cfg.rig.init_step = value;
    } else if (key == "contact.height_fraction") {
      cfg.contact.height_fraction = value;
    } else if (key == "contact.speed_threshold") {
      cfg.contact.speed_threshold = value;
    } else {
      throw ParseError("unknown config key '" + key + "'", line_no);
    }
  }
  return cfg;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, uint64_t seed,
                    const std::string& config_raw) {
  nlohmann::json j;
  j["command"] = command;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["seed"] = seed;
  j["config_hash"] = hex64(fnv1a64(config_raw));
  j["kernel_backend"] = kernels::backend_name(kernels::active_backend());
  j["version"] = kVersion;
  write_text_file((out_dir / "manifest.json").string(), j.dump(2) + "\n");
}

Skeleton load_skeleton_any(const std::string& path) {
  const std::string text = read_text_file(path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".bvh") {
    return parse_bvh(text).skeleton;
  }
  return read_skeleton_json(text);
}

// Rebuilds the clip's poses on the target skeleton. The BVH joint order may
// be a permutation of the target's (BVH files are depth-first); joints are
// matched by name and the parent structure must agree.
std::vector<PoseTransforms> poses_on_skeleton(const BvhDocument& doc,
                                              const Skeleton& target) {
  const Skeleton& bs = doc.skeleton;
  if (bs.joint_count() != target.joint_count()) {
    throw ShapeMismatchError(
        "motion skeleton does not match the target skeleton; retarget the "
        "clip first");
  }
  std::vector<int> to_target(bs.joint_count(), -1);
  std::vector<bool> taken(target.joint_count(), false);
  for (size_t j = 0; j < bs.joint_count(); ++j) {
    // Claim each target joint once so duplicated names cannot fold two
    // motion joints onto one target joint.
    for (size_t k = 0; k < target.joint_count(); ++k) {
      if (!taken[k] && target.names[k] == bs.names[j]) {
        to_target[j] = static_cast<int>(k);
        taken[k] = true;
        break;
      }
    }
    if (to_target[j] < 0) {
      throw ShapeMismatchError("motion joint '" + bs.names[j] +
                               "' is missing from the target skeleton");
    }
  }
  for (size_t j = 0; j < bs.joint_count(); ++j) {
    const int expected =
        bs.parent[j] < 0 ? -1 : to_target[bs.parent[j]];
    if (target.parent[to_target[j]] != expected) {
      throw ShapeMismatchError(
          "motion and target skeletons have different hierarchies");
    }
  }
  std::vector<PoseTransforms> out;
  out.reserve(doc.frames.size());
  for (size_t f = 0; f < doc.frames.size(); ++f) {
    const PoseTransforms raw = bvh_frame_to_pose(doc, f);
    std::vector<Mat3> locals(target.joint_count(), Mat3::identity());
    for (size_t j = 0; j < bs.joint_count(); ++j) {
      locals[to_target[j]] = raw.local_rotation[j];
    }
    out.push_back(forward_kinematics(target, locals, raw.root_translation));
  }
  return out;
}

std::string frame_filename(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04zu.obj", index);
  return buf;
}

std::vector<fs::path> sorted_frame_files(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".obj") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Error("no .obj frames found in " + dir);
  }
  return files;
}

DenseMatrix load_weights_for(const std::string& path, const Mesh& mesh,
                             const Skeleton& s) {
  const WeightsFile wf = read_weights(read_text_file(path));
  if (wf.weights.rows != mesh.vertices.size()) {
    throw ShapeMismatchError("weights rows do not match mesh vertices in " +
                             path);
  }
  if (wf.weights.cols != s.joint_count()) {
    throw ShapeMismatchError("weights columns do not match skeleton joints in " +
                             path);
  }
  return wf.weights;
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string out_dir;
  uint64_t seed = 0;
  std::string config_path;
};

SolverFileConfig load_config(const CommonOpts& common) {
  if (common.config_path.empty()) return {};
  return parse_solver_config(read_text_file(common.config_path));
}

int cmd_synth(const CommonOpts& common, const std::string& template_name,
              int frames, const std::string& clip_name, int ring_res,
              int rings, double radius) {
  CharacterTemplate tmpl;
  if (template_name == "biped_simple") {
    tmpl = CharacterTemplate::BipedSimple;
  } else if (template_name == "biped_branchy") {
    tmpl = CharacterTemplate::BipedBranchy;
  } else if (template_name == "two_bone_cylinder") {
    tmpl = CharacterTemplate::TwoBoneCylinder;
  } else {
    std::cerr << "unknown template: " << template_name << "\n";
    return kExitUsage;
  }
  ClipKind kind;
  if (clip_name == "wave") {
    kind = ClipKind::Wave;
  } else if (clip_name == "crouch") {
    kind = ClipKind::Crouch;
  } else if (clip_name == "random_smooth") {
    kind = ClipKind::RandomSmooth;
  } else {
    std::cerr << "unknown clip kind: " << clip_name << "\n";
    return kExitUsage;
  }

  CharacterParams params;
  params.ring_resolution = ring_res;
  params.rings_per_bone = rings;
  params.radius = radius;
  const SyntheticCharacter character = make_character(tmpl, common.seed, params);
  const auto clip = make_clip(character.skeleton, kind, frames, common.seed);

  const fs::path out(common.out_dir);
  fs::create_directories(out);
  write_text_file((out / "character.obj").string(),
                  write_obj(character.mesh.vertices, character.mesh.faces));
  write_text_file((out / "skeleton.json").string(),
                  write_skeleton_json(character.skeleton));
  write_text_file((out / "weights.txt").string(),
                  write_weights(character.gt_weights, character.skeleton.names));
  write_text_file((out / "clip.bvh").string(),
                  write_bvh(poses_to_bvh(character.skeleton, clip, 1.0 / 30.0)));
  write_manifest(out, "synth", {}, {"character.obj", "skeleton.json",
                                    "weights.txt", "clip.bvh"},
                 common.seed, template_name + "/" + clip_name);
  return kExitOk;
}

int cmd_augment(const CommonOpts& common, const std::string& skeleton_path,
                const AugmentConfig& cfg) {
  const Skeleton s = load_skeleton_any(skeleton_path);
  const Skeleton augmented = augment_skeleton(s, common.seed, cfg);
  const fs::path out(common.out_dir);
  fs::create_directories(out);
  write_text_file((out / "skeleton.json").string(),
                  write_skeleton_json(augmented));
  write_manifest(out, "augment", {skeleton_path}, {"skeleton.json"},
                 common.seed, "");
  return kExitOk;
}

int cmd_rig(const CommonOpts& common, const std::string& mesh_path,
            const std::string& skeleton_path,
            const std::string& gt_skeleton_path) {
  const SolverFileConfig cfg = load_config(common);
  const Mesh mesh = parse_obj(read_text_file(mesh_path));
  const Skeleton src = load_skeleton_any(skeleton_path);

  std::optional<std::vector<Vec3>> g_gt;
  std::vector<std::string> inputs{mesh_path, skeleton_path};
  if (!gt_skeleton_path.empty()) {
    g_gt = load_skeleton_any(gt_skeleton_path).rest_global;
    inputs.push_back(gt_skeleton_path);
  }

  RigSolveConfig rig_cfg = cfg.rig;
  rig_cfg.seed = common.seed;
  const RigSolution solution = solve_rig(mesh, src, rig_cfg, g_gt);

  const fs::path out(common.out_dir);
  fs::create_directories(out);
  write_text_file((out / "target_skeleton.json").string(),
                  write_skeleton_json(solution.target_skeleton));
  std::ostringstream diag;
  diag << "iterations " << solution.iterations << "\n";
  diag << "final_loss "
       << format_double(solution.loss_trace.empty() ? 0.0
                                                    : solution.loss_trace.back())
       << "\n";
  for (const auto& w : solution.warnings) diag << "warning " << w << "\n";
  diag << "loss_trace";
  for (double v : solution.loss_trace) diag << " " << format_double(v);
  diag << "\n";
  write_text_file((out / "rig_diagnostics.txt").string(), diag.str());
  write_manifest(out, "rig", inputs,
                 {"target_skeleton.json", "rig_diagnostics.txt"}, common.seed,
                 cfg.raw);
  return kExitOk;
}

int cmd_retarget(const CommonOpts& common, const std::string& motion_path,
                 const std::string& skeleton_path) {
  const BvhDocument doc = parse_bvh(read_text_file(motion_path));
  const Skeleton tgt = load_skeleton_any(skeleton_path);

  const JointCorrespondence corr = build_correspondence(doc.skeleton, tgt);
  const auto src_poses = bvh_to_poses(doc);
  const auto tgt_poses = retarget_clip(src_poses, corr, tgt, doc.skeleton);

  const fs::path out(common.out_dir);
  fs::create_directories(out);
  write_text_file((out / "motion.bvh").string(),
                  write_bvh(poses_to_bvh(tgt, tgt_poses, doc.frame_time)));
  write_manifest(out, "retarget", {motion_path, skeleton_path}, {"motion.bvh"},
                 common.seed, "");
  return kExitOk;
}

int cmd_skin(const CommonOpts& common, const std::string& mesh_path,
             const std::string& skeleton_path, const std::string& clip_path,
             const std::string& deformed_dir,
             const std::string& gt_weights_path, bool fit_from_gt,
             const std::string& descriptors_path) {
  const SolverFileConfig cfg = load_config(common);
  const Mesh mesh = parse_obj(read_text_file(mesh_path));
  const Skeleton skeleton = load_skeleton_any(skeleton_path);
  const BvhDocument clip_doc = parse_bvh(read_text_file(clip_path));
  const auto poses = poses_on_skeleton(clip_doc, skeleton);

  std::vector<std::string> inputs{mesh_path, skeleton_path, clip_path};
  std::optional<DescriptorField> descriptors;
  if (!descriptors_path.empty()) {
    descriptors = read_descriptors(read_text_file(descriptors_path));
    validate_descriptors(mesh, *descriptors);
    inputs.push_back(descriptors_path);
  }
  std::vector<DeformedMesh> gt_frames;
  if (fit_from_gt) {
    if (gt_weights_path.empty()) {
      std::cerr << "--fit-from-gt-weights-deform requires --gt-weights\n";
      return kExitUsage;
    }
    const DenseMatrix gt_weights =
        load_weights_for(gt_weights_path, mesh, skeleton);
    gt_frames = deform_clip(mesh, gt_weights, skeleton, poses);
    inputs.push_back(gt_weights_path);
  } else {
    if (deformed_dir.empty()) {
      std::cerr << "skin needs --deformed-dir or --fit-from-gt-weights-deform\n";
      return kExitUsage;
    }
    for (const auto& file : sorted_frame_files(deformed_dir)) {
      const Mesh frame = parse_obj(read_text_file(file.string()));
      gt_frames.push_back(DeformedMesh{frame.vertices});
    }
    inputs.push_back(deformed_dir);
  }
  if (gt_frames.size() != poses.size()) {
    throw ShapeMismatchError(
        "deformed frame count does not match clip frame count");
  }

  std::vector<TrainingSample> samples;
  samples.reserve(poses.size());
  for (size_t f = 0; f < poses.size(); ++f) {
    samples.push_back({std::move(gt_frames[f]), poses[f]});
  }

  SkinningSolveConfig skin_cfg = cfg.skin;
  skin_cfg.seed = common.seed;
  const SkinningSolution solution =
      solve_skinning(mesh, samples, skeleton, skin_cfg,
                     descriptors ? &*descriptors : nullptr);
  for (const auto& w : solution.warnings) {
    std::cerr << "warning: " << w << "\n";
  }

  const fs::path out(common.out_dir);
  fs::create_directories(out);
  write_text_file((out / "weights.txt").string(),
                  write_weights(solution.weights.weights, skeleton.names));
  std::ostringstream diag;
  diag << "iterations " << solution.iterations << "\n";
  diag << "identifiable " << (solution.identifiable ? 1 : 0) << "\n";
  diag << "final_loss "
       << format_double(solution.loss_trace.empty() ? 0.0
                                                    : solution.loss_trace.back())
       << "\n";
  for (const auto& w : solution.warnings) diag << "warning " << w << "\n";
  write_text_file((out / "skin_diagnostics.txt").string(), diag.str());
  write_manifest(out, "skin", inputs, {"weights.txt", "skin_diagnostics.txt"},
                 common.seed, cfg.raw);
  return kExitOk;
}

int cmd_deform(const CommonOpts& common, const std::string& mesh_path,
               const std::string& weights_path,
               const std::string& skeleton_path,
               const std::string& motion_path) {
  const Mesh mesh = parse_obj(read_text_file(mesh_path));
  const Skeleton skeleton = load_skeleton_any(skeleton_path);
  const DenseMatrix weights = load_weights_for(weights_path, mesh, skeleton);
  const BvhDocument doc = parse_bvh(read_text_file(motion_path));
  const auto poses = poses_on_skeleton(doc, skeleton);
  const auto frames = deform_clip(mesh, weights, skeleton, poses);

  const fs::path out(common.out_dir);
  fs::create_directories(out);
  std::vector<std::string> outputs;
  for (size_t f = 0; f < frames.size(); ++f) {
    const std::string name = frame_filename(f);
    write_text_file((out / name).string(),
                    write_obj(frames[f].vertices, mesh.faces));
    outputs.push_back(name);
  }
  write_manifest(out, "deform",
                 {mesh_path, weights_path, skeleton_path, motion_path},
                 outputs, common.seed, "");
  return kExitOk;
}

int cmd_eval(const CommonOpts& common, const std::string& pred_skeleton,
             const std::string& gt_skeleton, const std::string& pred_weights,
             const std::string& gt_weights, const std::string& pred_dir,
             const std::string& gt_dir, const std::string& mesh_path,
             bool table) {
  MetricReport report;
  std::vector<std::string> inputs;

  if (!pred_skeleton.empty() && !gt_skeleton.empty()) {
    const Skeleton pred = load_skeleton_any(pred_skeleton);
    const Skeleton gt = load_skeleton_any(gt_skeleton);
    report.cd_j2j = cd_j2j(joint_positions(pred), joint_positions(gt));
    report.cd_j2b = cd_j2b(joint_positions(pred), bone_segments(pred),
                           joint_positions(gt), bone_segments(gt));
    report.cd_b2b = cd_b2b(bone_segments(pred), bone_segments(gt));
    report.has_rigging = true;
    inputs.push_back(pred_skeleton);
    inputs.push_back(gt_skeleton);
  }

  if (!pred_weights.empty() && !gt_weights.empty()) {
    const WeightsFile pred = read_weights(read_text_file(pred_weights));
    const WeightsFile gt = read_weights(read_text_file(gt_weights));
    report.skinning_l1 = skinning_l1(pred.weights, gt.weights);
    report.has_skinning = true;
    inputs.push_back(pred_weights);
    inputs.push_back(gt_weights);
  }

  if (!pred_dir.empty() && !gt_dir.empty()) {
    if (mesh_path.empty()) {
      std::cerr << "eval with deformed frames requires --mesh for the edges\n";
      return kExitUsage;
    }
    const Mesh mesh = parse_obj(read_text_file(mesh_path));
    const auto pred_files = sorted_frame_files(pred_dir);
    const auto gt_files = sorted_frame_files(gt_dir);
    if (pred_files.size() != gt_files.size()) {
      throw ShapeMismatchError("pred and gt frame counts differ");
    }
    double ade_total = 0.0;
    size_t ade_count = 0;
    double cd_total = 0.0;
    double els_total = 0.0;
    for (size_t f = 0; f < pred_files.size(); ++f) {
      const DeformedMesh pred{
          parse_obj(read_text_file(pred_files[f].string())).vertices};
      const DeformedMesh gt{
          parse_obj(read_text_file(gt_files[f].string())).vertices};
      const DeformationErrors err = deformation_errors(pred, gt);
      ade_total += err.ade * static_cast<double>(pred.vertices.size());
      ade_count += pred.vertices.size();
      report.mde = std::max(report.mde, err.mde);
      cd_total += err.cd;
      int skipped = 0;
      els_total += els(pred, gt, mesh.edges, &skipped);
      report.skipped_edges += skipped;
    }
    // ADE pooled over all frames; CD and ELS averaged per frame.
    report.ade = ade_total / static_cast<double>(ade_count);
    report.cd = cd_total / static_cast<double>(pred_files.size());
    report.els = els_total / static_cast<double>(pred_files.size());
    report.frames = pred_files.size();
    report.has_deformation = true;
    inputs.push_back(pred_dir);
    inputs.push_back(gt_dir);
    inputs.push_back(mesh_path);
  }

  const fs::path out(common.out_dir);
  fs::create_directories(out);
  write_text_file((out / "report.txt").string(), write_metric_report(report));
  if (table) {
    std::cout << format_metric_table(report);
  }
  write_manifest(out, "eval", inputs, {"report.txt"}, common.seed, "");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rig, skin, deform and evaluate bipedal character meshes "
               "driven by skeletal motion"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts common;

  const auto add_common = [&common](CLI::App* sub, bool needs_out = true) {
    sub->add_option("--seed", common.seed, "random seed (default 0)");
    auto* out =
        sub->add_option("--out", common.out_dir, "output directory");
    if (needs_out) out->required();
    sub->add_option("--config", common.config_path,
                    "solver config file (key value lines)");
  };

  // synth
  std::string template_name = "biped_simple";
  int frames = 8;
  std::string clip_name = "random_smooth";
  int ring_res = 8;
  int rings = 3;
  double radius = 0.1;
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic character bundle with ground truth");
  synth->add_option("--template", template_name,
                    "biped_simple | biped_branchy | two_bone_cylinder");
  synth->add_option("--frames", frames, "clip length in frames");
  synth->add_option("--clip", clip_name, "wave | crouch | random_smooth");
  synth->add_option("--ring-res", ring_res, "vertices per tube ring");
  synth->add_option("--rings", rings, "interior rings per bone");
  synth->add_option("--radius", radius, "tube radius");
  add_common(synth);

  // augment
  std::string skeleton_path;
  AugmentConfig aug_cfg;
  auto* augment = app.add_subcommand(
      "augment", "randomly modify a skeleton's configuration");
  augment->add_option("--skeleton", skeleton_path, "skeleton json or bvh")
      ->required();
  augment->add_option("--insert", aug_cfg.insert_joints,
                      "midpoint joint insertions");
  augment->add_option("--remove", aug_cfg.remove_joints,
                      "interior joint removals");
  augment->add_option("--scale-min", aug_cfg.bone_scale_min,
                      "bone scale lower bound");
  augment->add_option("--scale-max", aug_cfg.bone_scale_max,
                      "bone scale upper bound");
  augment->add_option("--root-height-min", aug_cfg.root_height_min,
                      "root height scale lower bound");
  augment->add_option("--root-height-max", aug_cfg.root_height_max,
                      "root height scale upper bound");
  add_common(augment);

  // rig
  std::string mesh_path;
  std::string gt_skeleton_path;
  auto* rig = app.add_subcommand(
      "rig", "fit the source skeleton's offsets to a mesh");
  rig->add_option("--mesh", mesh_path, "mesh .obj")->required();
  rig->add_option("--skeleton", skeleton_path, "source skeleton json or bvh")
      ->required();
  rig->add_option("--gt-skeleton", gt_skeleton_path,
                  "ground-truth skeleton for the skeleton loss");
  add_common(rig);

  // retarget
  std::string motion_path;
  auto* retarget = app.add_subcommand(
      "retarget", "retarget a bvh clip onto a target skeleton");
  retarget->add_option("--motion", motion_path, "source motion .bvh")
      ->required();
  retarget->add_option("--skeleton", skeleton_path, "target skeleton json")
      ->required();
  add_common(retarget);

  // skin
  std::string clip_path;
  std::string deformed_dir;
  std::string gt_weights_path;
  bool fit_from_gt = false;
  auto* skin = app.add_subcommand(
      "skin", "solve skinning weights from deformed frames");
  skin->add_option("--mesh", mesh_path, "mesh .obj")->required();
  skin->add_option("--skeleton", skeleton_path, "target skeleton json")
      ->required();
  skin->add_option("--clip", clip_path, "training clip .bvh on the target")
      ->required();
  skin->add_option("--deformed-dir", deformed_dir,
                   "directory of ground-truth deformed frame .obj files");
  skin->add_option("--gt-weights", gt_weights_path,
                   "ground-truth weights for --fit-from-gt-weights-deform");
  skin->add_flag("--fit-from-gt-weights-deform", fit_from_gt,
                 "synthesize the training frames from --gt-weights");
  std::string descriptors_path;
  skin->add_option("--descriptors", descriptors_path,
                   "optional per-vertex descriptor file");
  add_common(skin);

  // deform
  std::string weights_path;
  auto* deform = app.add_subcommand(
      "deform", "apply LBS over a clip and write an obj sequence");
  deform->add_option("--mesh", mesh_path, "mesh .obj")->required();
  deform->add_option("--weights", weights_path, "skinning weights")->required();
  deform->add_option("--skeleton", skeleton_path, "skeleton json")->required();
  deform->add_option("--motion", motion_path, "clip .bvh")->required();
  add_common(deform);

  // eval
  std::string pred_skeleton;
  std::string pred_weights;
  std::string pred_dir;
  std::string gt_dir;
  std::string eval_gt_weights;
  bool table = false;
  auto* eval = app.add_subcommand("eval", "compute the metric suite");
  eval->add_option("--pred-skeleton", pred_skeleton, "predicted skeleton");
  eval->add_option("--gt-skeleton", gt_skeleton_path, "ground-truth skeleton");
  eval->add_option("--pred-weights", pred_weights, "predicted weights");
  eval->add_option("--gt-weights", eval_gt_weights, "ground-truth weights");
  eval->add_option("--pred-dir", pred_dir, "predicted deformed frames");
  eval->add_option("--gt-dir", gt_dir, "ground-truth deformed frames");
  eval->add_option("--mesh", mesh_path, "mesh .obj (edge set for ELS)");
  eval->add_flag("--table", table, "print an aligned metric table");
  add_common(eval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(common, template_name, frames, clip_name, ring_res,
                       rings, radius);
    }
    if (augment->parsed()) {
      return cmd_augment(common, skeleton_path, aug_cfg);
    }
    if (rig->parsed()) {
      return cmd_rig(common, mesh_path, skeleton_path, gt_skeleton_path);
    }
    if (retarget->parsed()) {
      return cmd_retarget(common, motion_path, skeleton_path);
    }
    if (skin->parsed()) {
      return cmd_skin(common, mesh_path, skeleton_path, clip_path,
                      deformed_dir, gt_weights_path, fit_from_gt,
                      descriptors_path);
    }
    if (deform->parsed()) {
      return cmd_deform(common, mesh_path, weights_path, skeleton_path,
                        motion_path);
    }
    if (eval->parsed()) {
      return cmd_eval(common, pred_skeleton, gt_skeleton_path, pred_weights,
                      eval_gt_weights, pred_dir, gt_dir, mesh_path, table);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const NonFiniteError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const UnidentifiableError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitUsage;
}
