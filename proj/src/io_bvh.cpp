#include <charconv>
#include <cmath>
#include <sstream>

#include "rigkit/io.hpp"
#include "rigkit/rotation.hpp"

namespace rigkit {

bool is_rotation_channel(BvhChannel c) {
  return c == BvhChannel::Xrotation || c == BvhChannel::Yrotation ||
         c == BvhChannel::Zrotation;
}

size_t BvhDocument::total_channels() const {
  size_t total = 0;
  for (const auto& ch : channel_layout) total += ch.size();
  return total;
}

namespace {

struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  int line = 1;
  std::string current;
  int current_line = 1;
  for (char c : text) {
    if (c == '\n' || std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) {
        tokens.push_back({current, current_line});
        current.clear();
      }
      if (c == '\n') ++line;
    } else {
      if (current.empty()) current_line = line;
      current += c;
    }
  }
  if (!current.empty()) tokens.push_back({current, current_line});
  return tokens;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }

  const Token& peek() const {
    if (done()) throw ParseError("unexpected end of file", last_line());
    return tokens_[pos_];
  }

  Token next() {
    const Token t = peek();
    ++pos_;
    return t;
  }

  void expect(const std::string& text) {
    const Token t = next();
    if (t.text != text) {
      throw ParseError("expected '" + text + "', got '" + t.text + "'", t.line);
    }
  }

  double number() {
    const Token t = next();
    double value = 0.0;
    const char* begin = t.text.data();
    const char* end = begin + t.text.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end) {
      throw ParseError("expected a number, got '" + t.text + "'", t.line);
    }
    return value;
  }

  int integer() {
    const Token t = next();
    int value = 0;
    const char* begin = t.text.data();
    const char* end = begin + t.text.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end) {
      throw ParseError("expected an integer, got '" + t.text + "'", t.line);
    }
    return value;
  }

  int last_line() const {
    return tokens_.empty() ? 1 : tokens_.back().line;
  }

 private:
  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

BvhChannel parse_channel(const Token& t) {
  if (t.text == "Xposition") return BvhChannel::Xposition;
  if (t.text == "Yposition") return BvhChannel::Yposition;
  if (t.text == "Zposition") return BvhChannel::Zposition;
  if (t.text == "Xrotation") return BvhChannel::Xrotation;
  if (t.text == "Yrotation") return BvhChannel::Yrotation;
  if (t.text == "Zrotation") return BvhChannel::Zrotation;
  throw UnsupportedChannelError("unknown channel tag '" + t.text + "'", t.line);
}

const char* channel_name(BvhChannel c) {
  switch (c) {
    case BvhChannel::Xposition:
      return "Xposition";
    case BvhChannel::Yposition:
      return "Yposition";
    case BvhChannel::Zposition:
      return "Zposition";
    case BvhChannel::Xrotation:
      return "Xrotation";
    case BvhChannel::Yrotation:
      return "Yrotation";
    default:
      return "Zrotation";
  }
}

struct HierarchyBuilder {
  std::vector<std::string> names;
  std::vector<int> parents;
  std::vector<Vec3> offsets;
  std::vector<std::vector<BvhChannel>> channels;

  int add(const std::string& name, int parent) {
    names.push_back(name);
    parents.push_back(parent);
    offsets.emplace_back();
    channels.emplace_back();
    return static_cast<int>(names.size()) - 1;
  }
};

void parse_joint_block(TokenStream& ts, HierarchyBuilder& hb, int joint) {
  ts.expect("{");
  ts.expect("OFFSET");
  hb.offsets[joint].x = ts.number();
  hb.offsets[joint].y = ts.number();
  hb.offsets[joint].z = ts.number();
  if (!ts.done() && ts.peek().text == "CHANNELS") {
    ts.next();
    const int count = ts.integer();
    for (int c = 0; c < count; ++c) {
      hb.channels[joint].push_back(parse_channel(ts.next()));
    }
  }
  while (true) {
    const Token t = ts.next();
    if (t.text == "}") break;
    if (t.text == "JOINT") {
      const Token name = ts.next();
      parse_joint_block(ts, hb, hb.add(name.text, joint));
    } else if (t.text == "End") {
      const Token site = ts.next();
      if (site.text != "Site") {
        throw ParseError("expected 'Site' after 'End'", site.line);
      }
      const int leaf = hb.add(hb.names[joint] + "_end", joint);
      ts.expect("{");
      ts.expect("OFFSET");
      hb.offsets[leaf].x = ts.number();
      hb.offsets[leaf].y = ts.number();
      hb.offsets[leaf].z = ts.number();
      ts.expect("}");
    } else {
      throw ParseError("unexpected token '" + t.text + "' in joint block",
                       t.line);
    }
  }
}

}  // namespace

BvhDocument parse_bvh(const std::string& text) {
  TokenStream ts(tokenize(text));
  ts.expect("HIERARCHY");
  ts.expect("ROOT");
  HierarchyBuilder hb;
  const Token root_name = ts.next();
  parse_joint_block(ts, hb, hb.add(root_name.text, -1));

  BvhDocument doc;
  doc.skeleton = make_skeleton(hb.names, hb.parents, hb.offsets);
  doc.channel_layout = hb.channels;

  ts.expect("MOTION");
  ts.expect("Frames:");
  const int frame_count = ts.integer();
  if (frame_count < 0) {
    throw ParseError("negative frame count", ts.last_line());
  }
  {
    const Token t = ts.next();
    if (t.text != "Frame") {
      throw ParseError("expected 'Frame Time:', got '" + t.text + "'", t.line);
    }
    const Token t2 = ts.next();
    if (t2.text != "Time:") {
      throw ParseError("expected 'Frame Time:', got '" + t2.text + "'",
                       t2.line);
    }
  }
  doc.frame_time = ts.number();
  if (!(doc.frame_time > 0.0)) {
    throw ParseError("frame time must be positive", ts.last_line());
  }

  const size_t width = doc.total_channels();
  doc.frames.reserve(frame_count);
  for (int f = 0; f < frame_count; ++f) {
    std::vector<double> row(width);
    for (size_t c = 0; c < width; ++c) {
      row[c] = ts.number();
    }
    doc.frames.push_back(std::move(row));
  }
  if (!ts.done()) {
    const Token t = ts.peek();
    throw ParseError("unexpected trailing content '" + t.text + "'", t.line);
  }
  return doc;
}

namespace {

void write_joint(std::ostringstream& out, const BvhDocument& doc,
                 const std::vector<std::vector<int>>& kids, int joint,
                 int depth) {
  const std::string indent(static_cast<size_t>(depth) * 2, ' ');
  const Skeleton& s = doc.skeleton;
  const bool end_site = kids[joint].empty() &&
                        doc.channel_layout[joint].empty() &&
                        s.names[joint].size() > 4 &&
                        s.names[joint].substr(s.names[joint].size() - 4) ==
                            "_end";
  if (end_site) {
    out << indent << "End Site\n" << indent << "{\n";
  } else {
    out << indent << (depth == 0 ? "ROOT " : "JOINT ") << s.names[joint]
        << "\n"
        << indent << "{\n";
  }
  out << indent << "  OFFSET " << format_double(s.offsets[joint].x) << " "
      << format_double(s.offsets[joint].y) << " "
      << format_double(s.offsets[joint].z) << "\n";
  if (!end_site) {
    const auto& ch = doc.channel_layout[joint];
    if (!ch.empty()) {
      out << indent << "  CHANNELS " << ch.size();
      for (BvhChannel c : ch) out << " " << channel_name(c);
      out << "\n";
    }
    for (int child : kids[joint]) {
      write_joint(out, doc, kids, child, depth + 1);
    }
  }
  out << indent << "}\n";
}

}  // namespace

std::string write_bvh(const BvhDocument& doc) {
  std::ostringstream out;
  out << "HIERARCHY\n";
  const auto kids = doc.skeleton.children();
  write_joint(out, doc, kids, doc.skeleton.root(), 0);
  out << "MOTION\n";
  out << "Frames: " << doc.frames.size() << "\n";
  out << "Frame Time: " << format_double(doc.frame_time) << "\n";
  for (const auto& row : doc.frames) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out << " ";
      out << format_double(row[c]);
    }
    out << "\n";
  }
  return out.str();
}

namespace {

Mat3 channel_rotation(BvhChannel c, double degrees) {
  const double rad = degrees * (M_PI / 180.0);
  switch (c) {
    case BvhChannel::Xrotation:
      return rotation_about_x(rad);
    case BvhChannel::Yrotation:
      return rotation_about_y(rad);
    default:
      return rotation_about_z(rad);
  }
}

}  // namespace

PoseTransforms bvh_frame_to_pose(const BvhDocument& doc, size_t frame) {
  if (frame >= doc.frames.size()) {
    throw IndexOutOfRangeError("bvh frame index out of range");
  }
  const Skeleton& s = doc.skeleton;
  const std::vector<double>& row = doc.frames[frame];
  std::vector<Mat3> locals(s.joint_count(), Mat3::identity());
  Vec3 root_translation{0, 0, 0};
  const int root = s.root();

  size_t cursor = 0;
  for (size_t j = 0; j < s.joint_count(); ++j) {
    Mat3 r = Mat3::identity();
    Vec3 pos{0, 0, 0};
    bool has_pos = false;
    for (BvhChannel c : doc.channel_layout[j]) {
      const double value = row[cursor++];
      switch (c) {
        case BvhChannel::Xposition:
          pos.x = value;
          has_pos = true;
          break;
        case BvhChannel::Yposition:
          pos.y = value;
          has_pos = true;
          break;
        case BvhChannel::Zposition:
          pos.z = value;
          has_pos = true;
          break;
        default:
          r = r * channel_rotation(c, value);
      }
    }
    locals[j] = r;
    if (has_pos && static_cast<int>(j) == root) {
      root_translation = pos;
    }
  }
  return forward_kinematics(s, locals, root_translation);
}

std::vector<PoseTransforms> bvh_to_poses(const BvhDocument& doc) {
  std::vector<PoseTransforms> poses;
  poses.reserve(doc.frames.size());
  for (size_t f = 0; f < doc.frames.size(); ++f) {
    poses.push_back(bvh_frame_to_pose(doc, f));
  }
  return poses;
}

namespace {

// Frame columns follow the depth-first hierarchy order of the written file,
// so the document skeleton must be in that order too.
std::vector<int> dfs_preorder(const Skeleton& s) {
  const auto kids = s.children();
  std::vector<int> order;
  order.reserve(s.joint_count());
  std::vector<int> stack{s.root()};
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    order.push_back(j);
    for (auto it = kids[j].rbegin(); it != kids[j].rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return order;
}

}  // namespace

BvhDocument poses_to_bvh(const Skeleton& skeleton,
                         const std::vector<PoseTransforms>& source_poses,
                         double frame_time) {
  const auto order = dfs_preorder(skeleton);
  std::vector<int> new_index(skeleton.joint_count());
  for (size_t k = 0; k < order.size(); ++k) {
    new_index[order[k]] = static_cast<int>(k);
  }
  std::vector<std::string> names;
  std::vector<int> parents;
  std::vector<Vec3> offsets;
  for (int old : order) {
    names.push_back(skeleton.names[old]);
    parents.push_back(skeleton.parent[old] < 0
                          ? -1
                          : new_index[skeleton.parent[old]]);
    offsets.push_back(skeleton.offsets[old]);
  }
  const Skeleton s = make_skeleton(std::move(names), std::move(parents),
                                   std::move(offsets));

  std::vector<PoseTransforms> poses;
  poses.reserve(source_poses.size());
  for (const PoseTransforms& pose : source_poses) {
    if (pose.local_rotation.size() != skeleton.joint_count()) {
      throw SizeMismatchError("pose joint count does not match skeleton");
    }
    PoseTransforms reordered;
    reordered.root_translation = pose.root_translation;
    reordered.local_rotation.reserve(order.size());
    for (int old : order) {
      reordered.local_rotation.push_back(pose.local_rotation[old]);
    }
    poses.push_back(std::move(reordered));
  }

  BvhDocument doc;
  doc.skeleton = s;
  doc.frame_time = frame_time;
  doc.channel_layout.assign(s.joint_count(), {});
  const auto kids = s.children();
  const int root = s.root();
  for (size_t j = 0; j < s.joint_count(); ++j) {
    const bool end_site = kids[j].empty() && s.names[j].size() > 4 &&
                          s.names[j].substr(s.names[j].size() - 4) == "_end";
    if (end_site) continue;
    if (static_cast<int>(j) == root) {
      doc.channel_layout[j] = {BvhChannel::Xposition, BvhChannel::Yposition,
                               BvhChannel::Zposition, BvhChannel::Zrotation,
                               BvhChannel::Xrotation, BvhChannel::Yrotation};
    } else {
      doc.channel_layout[j] = {BvhChannel::Zrotation, BvhChannel::Xrotation,
                               BvhChannel::Yrotation};
    }
  }

  const double to_deg = 180.0 / M_PI;
  for (const PoseTransforms& pose : poses) {
    std::vector<double> row;
    row.reserve(doc.total_channels());
    for (size_t j = 0; j < s.joint_count(); ++j) {
      if (doc.channel_layout[j].empty()) continue;
      if (static_cast<int>(j) == root) {
        row.push_back(pose.root_translation.x);
        row.push_back(pose.root_translation.y);
        row.push_back(pose.root_translation.z);
      }
      const auto zxy = matrix_to_euler_zxy(pose.local_rotation[j]);
      row.push_back(zxy[0] * to_deg);
      row.push_back(zxy[1] * to_deg);
      row.push_back(zxy[2] * to_deg);
    }
    doc.frames.push_back(std::move(row));
  }
  return doc;
}

}  // namespace rigkit
