#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rigkit/io.hpp"

namespace rigkit {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open file: " + path);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write file: " + path);
  }
  out << content;
  if (!out) {
    throw Error("write failed: " + path);
  }
}

namespace {

double parse_number(const std::string& token, int line) {
  double value = 0.0;
  const auto res =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError("expected a number, got '" + token + "'", line);
  }
  return value;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> parts;
  std::istringstream in(line);
  std::string part;
  while (in >> part) parts.push_back(part);
  return parts;
}

std::vector<std::string> nonempty_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && split_ws(lines.back()).empty()) lines.pop_back();
  return lines;
}

}  // namespace

WeightsFile read_weights(const std::string& text) {
  const auto lines = nonempty_lines(text);
  if (lines.empty()) {
    throw ParseError("weights file is empty", 1);
  }
  WeightsFile out;
  out.joint_names = split_ws(lines[0]);
  if (out.joint_names.empty()) {
    throw ParseError("weights header has no joint names", 1);
  }
  const size_t cols = out.joint_names.size();
  const size_t rows = lines.size() - 1;
  out.weights = DenseMatrix(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    const int line_no = static_cast<int>(r) + 2;
    const auto parts = split_ws(lines[r + 1]);
    if (parts.size() != cols) {
      throw ParseError("weight row has " + std::to_string(parts.size()) +
                           " values, expected " + std::to_string(cols),
                       line_no);
    }
    double sum = 0.0;
    for (size_t c = 0; c < cols; ++c) {
      out.weights(r, c) = parse_number(parts[c], line_no);
      sum += out.weights(r, c);
    }
    if (std::abs(sum - 1.0) > 1e-4) {
      throw NotStochasticError("weight row " + std::to_string(r) +
                               " sums to " + format_double(sum));
    }
    if (sum != 1.0) {
      for (size_t c = 0; c < cols; ++c) {
        out.weights(r, c) /= sum;
      }
    }
  }
  return out;
}

std::string write_weights(const DenseMatrix& weights,
                          const std::vector<std::string>& joint_names) {
  if (joint_names.size() != weights.cols) {
    throw ShapeMismatchError("joint name count does not match weight columns");
  }
  for (size_t r = 0; r < weights.rows; ++r) {
    double sum = 0.0;
    for (size_t c = 0; c < weights.cols; ++c) sum += weights(r, c);
    if (std::abs(sum - 1.0) > 1e-6) {
      throw NotStochasticError("weight row " + std::to_string(r) +
                               " sums to " + format_double(sum));
    }
  }
  std::ostringstream out;
  for (size_t c = 0; c < joint_names.size(); ++c) {
    if (c) out << " ";
    out << joint_names[c];
  }
  out << "\n";
  for (size_t r = 0; r < weights.rows; ++r) {
    for (size_t c = 0; c < weights.cols; ++c) {
      if (c) out << " ";
      out << format_double(weights(r, c));
    }
    out << "\n";
  }
  return out.str();
}

Skeleton read_skeleton_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("skeleton json parse failure: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("names") || !j.contains("parents") ||
        !j.contains("offsets")) {
      throw SchemaError("skeleton json must have names, parents, offsets");
    }
    std::vector<std::string> names = j["names"].get<std::vector<std::string>>();
    std::vector<int> parents = j["parents"].get<std::vector<int>>();
    std::vector<Vec3> offsets;
    for (const auto& row : j["offsets"]) {
      if (!row.is_array() || row.size() != 3) {
        throw SchemaError("offsets must be [x,y,z] triples");
      }
      offsets.emplace_back(row[0].get<double>(), row[1].get<double>(),
                           row[2].get<double>());
    }
    std::optional<std::vector<int>> rho;
    if (j.contains("rho")) {
      rho = j["rho"].get<std::vector<int>>();
    }
    return make_skeleton(std::move(names), std::move(parents),
                         std::move(offsets), std::move(rho));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("skeleton json schema violation: ") +
                      e.what());
  }
}

std::string write_skeleton_json(const Skeleton& s) {
  nlohmann::json j;
  j["names"] = s.names;
  j["parents"] = s.parent;
  auto offsets = nlohmann::json::array();
  for (const Vec3& o : s.offsets) {
    offsets.push_back({o.x, o.y, o.z});
  }
  j["offsets"] = std::move(offsets);
  j["rho"] = s.rho;
  return j.dump(2) + "\n";
}

DescriptorField read_descriptors(const std::string& text) {
  const auto lines = nonempty_lines(text);
  if (lines.empty()) {
    throw ParseError("descriptor file is empty", 1);
  }
  const auto header = split_ws(lines[0]);
  if (header.size() != 2) {
    throw ParseError("descriptor header must be '<rows> <cols>'", 1);
  }
  const auto rows = static_cast<size_t>(parse_number(header[0], 1));
  const auto cols = static_cast<size_t>(parse_number(header[1], 1));
  if (lines.size() - 1 != rows) {
    throw ShapeMismatchError("descriptor file declares " +
                             std::to_string(rows) + " rows but has " +
                             std::to_string(lines.size() - 1));
  }
  DescriptorField d;
  d.values = DenseMatrix(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    const int line_no = static_cast<int>(r) + 2;
    const auto parts = split_ws(lines[r + 1]);
    if (parts.size() != cols) {
      throw ShapeMismatchError("descriptor row " + std::to_string(r) +
                               " has " + std::to_string(parts.size()) +
                               " values, expected " + std::to_string(cols));
    }
    for (size_t c = 0; c < cols; ++c) {
      d.values(r, c) = parse_number(parts[c], line_no);
    }
  }
  return d;
}

std::string write_descriptors(const DescriptorField& d) {
  std::ostringstream out;
  out << d.values.rows << " " << d.values.cols << "\n";
  for (size_t r = 0; r < d.values.rows; ++r) {
    for (size_t c = 0; c < d.values.cols; ++c) {
      if (c) out << " ";
      out << format_double(d.values(r, c));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace rigkit
