#include <charconv>
#include <sstream>

#include "rigkit/io.hpp"

namespace rigkit {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> parts;
  std::istringstream in(line);
  std::string part;
  while (in >> part) parts.push_back(part);
  return parts;
}

double parse_float(const std::string& token, int line) {
  double value = 0.0;
  const auto res =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError("expected a number, got '" + token + "'", line);
  }
  return value;
}

// Face vertex references look like "i", "i/t", "i//n" or "i/t/n"; only the
// leading vertex index matters here.
int parse_face_index(const std::string& token, size_t vertex_count, int line) {
  const size_t slash = token.find('/');
  const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
  int idx = 0;
  const auto res = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (res.ec != std::errc() || res.ptr != head.data() + head.size() || idx == 0) {
    throw ParseError("invalid face index '" + token + "'", line);
  }
  // 1-based when positive, relative to the end when negative.
  const long resolved =
      idx > 0 ? idx - 1 : static_cast<long>(vertex_count) + idx;
  if (resolved < 0 || resolved >= static_cast<long>(vertex_count)) {
    throw IndexOutOfRangeError("face index " + std::to_string(idx) +
                               " out of range at line " + std::to_string(line));
  }
  return static_cast<int>(resolved);
}

}  // namespace

Mesh parse_obj(const std::string& text, std::vector<std::string>* warnings) {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto parts = split_ws(line);
    if (parts.empty() || parts[0][0] == '#') continue;
    if (parts[0] == "v") {
      if (parts.size() < 4) {
        throw ParseError("vertex record needs 3 coordinates", line_no);
      }
      vertices.emplace_back(parse_float(parts[1], line_no),
                            parse_float(parts[2], line_no),
                            parse_float(parts[3], line_no));
    } else if (parts[0] == "f") {
      if (parts.size() < 4) {
        throw ParseError("face record needs at least 3 vertices", line_no);
      }
      std::vector<int> poly;
      for (size_t k = 1; k < parts.size(); ++k) {
        poly.push_back(parse_face_index(parts[k], vertices.size(), line_no));
      }
      for (size_t k = 1; k + 1 < poly.size(); ++k) {
        faces.push_back({poly[0], poly[k], poly[k + 1]});
      }
    }
    // All other records (vn, vt, o, g, s, usemtl, mtllib, l, ...) ignored.
  }
  return make_mesh(std::move(vertices), std::move(faces), warnings);
}

std::string write_obj(const std::vector<Vec3>& vertices,
                      const std::vector<std::array<int, 3>>& faces) {
  std::ostringstream out;
  for (const Vec3& v : vertices) {
    out << "v " << format_double(v.x) << " " << format_double(v.y) << " "
        << format_double(v.z) << "\n";
  }
  for (const auto& f : faces) {
    out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
  }
  return out.str();
}

}  // namespace rigkit
