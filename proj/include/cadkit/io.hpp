#pragma once

// File formats: contour CSV, binary PGM (P5), FeatureMatrix CSV, vote/score
// matrix CSV. Numbers are written in shortest round-trip form.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cadkit/core.hpp"
#include "cadkit/features.hpp"
#include "cadkit/geometry.hpp"

namespace cadkit::io {

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size() && !s.empty();
}

[[noreturn]] inline void parse_fail(const std::filesystem::path& path, std::size_t line,
                                    const std::string& what) {
  throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line) + ": " + what);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes through a sibling temp file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

// --- contours --------------------------------------------------------------

inline std::string contour_to_csv(const Contour& c) {
  std::string s;
  for (const auto& p : c.points()) s += format_number(p.x) + "," + format_number(p.y) + "\n";
  return s;
}

inline std::vector<Point2> parse_contour_points(std::string_view text, const std::filesystem::path& path) {
  std::vector<Point2> pts;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    Point2 p;
    if (f.size() != 2 || !parse_double(f[0], p.x) || !parse_double(f[1], p.y)) {
      parse_fail(path, lineno, "expected 'x,y'");
    }
    pts.push_back(p);
  }
  return pts;
}

inline Contour read_contour(const std::filesystem::path& path) {
  auto pts = parse_contour_points(read_text(path), path);
  try {
    return Contour(std::move(pts));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

// --- PGM -------------------------------------------------------------------

/// Binary P5, 8- or 16-bit (big-endian), rescaled by maxval into [0, 1].
inline GrayImage parse_pgm(std::string_view data, const std::filesystem::path& path) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return std::string(data.substr(start, pos - start));
  };
  if (next_token() != "P5") throw Error(ErrorCode::ParseError, path.string() + ": not a binary PGM (P5)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, path.string() + ": malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
    throw Error(ErrorCode::ParseError, path.string() + ": invalid PGM header values");
  }
  ++pos;  // single whitespace before raster
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (data.size() < pos + count * bytes) throw Error(ErrorCode::ParseError, path.string() + ": truncated PGM raster");
  std::vector<double> px(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned v = static_cast<unsigned char>(data[pos + i * bytes]);
    if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(data[pos + i * bytes + 1]);
    px[i] = std::min(1.0, static_cast<double>(v) / maxval);
  }
  return GrayImage(w, h, std::move(px));
}

inline GrayImage read_pgm(const std::filesystem::path& path) { return parse_pgm(read_text(path), path); }

inline std::string pgm_bytes(const GrayImage& img, int maxval = 255) {
  std::string s = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n" +
                  std::to_string(maxval) + "\n";
  for (double v : img.pixels()) {
    const auto q = static_cast<unsigned>(std::lround(v * maxval));
    if (maxval > 255) s.push_back(static_cast<char>((q >> 8) & 0xFF));
    s.push_back(static_cast<char>(q & 0xFF));
  }
  return s;
}

// --- FeatureMatrix ---------------------------------------------------------

/// Header: [box_x,box_y,] feature names [,label].
inline std::string feature_matrix_to_csv(const FeatureMatrix& m) {
  std::string s;
  const bool boxes = !m.boxes.empty();
  std::vector<std::string> header;
  if (boxes) header = {"box_x", "box_y"};
  header.insert(header.end(), m.columns.begin(), m.columns.end());
  if (m.labels) header.emplace_back("label");
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    std::string line;
    if (boxes) line = std::to_string(m.boxes[r].x) + "," + std::to_string(m.boxes[r].y);
    for (double v : m.rows[r]) line += (line.empty() ? "" : ",") + format_number(v);
    if (m.labels) line += "," + label_name(m.labels->kind, m.labels->values[r]);
    s += line + "\n";
  }
  return s;
}

inline FeatureMatrix parse_feature_matrix(std::string_view text, const std::filesystem::path& path) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header row");
  const auto header = split(line);
  FeatureMatrix m;
  int box_x = -1, box_y = -1, label = -1;
  std::vector<std::size_t> feature_idx;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "box_x") box_x = static_cast<int>(i);
    else if (header[i] == "box_y") box_y = static_cast<int>(i);
    else if (header[i] == "label") label = static_cast<int>(i);
    else {
      m.columns.push_back(header[i]);
      feature_idx.push_back(i);
    }
  }
  if ((box_x < 0) != (box_y < 0)) parse_fail(path, 1, "box_x and box_y must appear together");
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) {
      parse_fail(path, lineno, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    }
    std::vector<double> row;
    for (auto i : feature_idx) {
      double v = 0.0;
      if (!parse_double(f[i], v)) parse_fail(path, lineno, "bad number '" + f[i] + "'");
      row.push_back(v);
    }
    m.rows.push_back(std::move(row));
    if (box_x >= 0) {
      double bx = 0, by = 0;
      if (!parse_double(f[static_cast<std::size_t>(box_x)], bx) || !parse_double(f[static_cast<std::size_t>(box_y)], by)) {
        parse_fail(path, lineno, "bad box coordinate");
      }
      m.boxes.push_back({static_cast<int>(bx), static_cast<int>(by)});
    }
    if (label >= 0) {
      const auto& name = f[static_cast<std::size_t>(label)];
      LabelKind kind;
      int value;
      if (name == "benign" || name == "malignant") {
        kind = LabelKind::diagnosis;
        value = name == "malignant" ? 1 : 0;
      } else if (auto t = parse_shape_type(name)) {
        kind = LabelKind::shape_type;
        value = static_cast<int>(*t);
      } else {
        parse_fail(path, lineno, "unknown label '" + name + "'");
      }
      if (!m.labels) m.labels = LabelColumn{kind, {}};
      if (m.labels->kind != kind) parse_fail(path, lineno, "mixed label kinds");
      m.labels->values.push_back(value);
    }
  }
  return m;
}

inline FeatureMatrix read_feature_matrix(const std::filesystem::path& path) {
  return parse_feature_matrix(read_text(path), path);
}

// --- vote / score matrices ---------------------------------------------------

/// Rows are instances, columns experts; the final column is the +1/-1 truth.
struct VoteMatrix {
  std::vector<std::vector<double>> values;  // votes (+1/-1) or scores in [0,1]
  std::vector<int> truth;
  bool is_votes = true;

  std::size_t experts() const { return values.empty() ? 0 : values.front().size(); }

  std::vector<std::vector<int>> votes() const {
    std::vector<std::vector<int>> out;
    for (const auto& r : values) {
      std::vector<int> v;
      for (double x : r) v.push_back(is_votes ? (x > 0 ? 1 : -1) : (x >= 0.5 ? 1 : -1));
      out.push_back(std::move(v));
    }
    return out;
  }
};

inline std::string vote_matrix_to_csv(const std::vector<std::vector<int>>& votes, std::span<const int> truth) {
  std::string s;
  const std::size_t k = votes.empty() ? 0 : votes.front().size();
  for (std::size_t i = 0; i < k; ++i) s += "e" + std::to_string(i + 1) + ",";
  s += "truth\n";
  for (std::size_t t = 0; t < votes.size(); ++t) {
    for (int v : votes[t]) s += std::to_string(v) + ",";
    s += std::to_string(truth[t]) + "\n";
  }
  return s;
}

/// Accepts an optional header row. All-{-1,+1} entries are read as votes,
/// otherwise entries must be scores in [0, 1].
inline VoteMatrix parse_vote_matrix(std::string_view text, const std::filesystem::path& path) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0, width = 0;
  VoteMatrix vm;
  bool all_votes = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    double probe = 0.0;
    if (lineno == 1 && !parse_double(f[0], probe)) continue;  // header
    if (f.size() < 2) parse_fail(path, lineno, "need at least one expert column plus truth");
    if (width == 0) width = f.size();
    if (f.size() != width) parse_fail(path, lineno, "ragged row");
    std::vector<double> row;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
      double v = 0.0;
      if (!parse_double(f[i], v)) parse_fail(path, lineno, "bad number '" + f[i] + "'");
      if (v != 1.0 && v != -1.0) all_votes = false;
      if (v < -1.0 || v > 1.0) parse_fail(path, lineno, "value out of range");
      row.push_back(v);
    }
    double t = 0.0;
    if (!parse_double(f.back(), t) || (t != 1.0 && t != -1.0)) parse_fail(path, lineno, "truth must be +1 or -1");
    vm.values.push_back(std::move(row));
    vm.truth.push_back(t > 0 ? 1 : -1);
  }
  if (vm.values.empty()) throw Error(ErrorCode::ParseError, path.string() + ": no data rows");
  vm.is_votes = all_votes;
  if (!all_votes) {
    for (const auto& r : vm.values)
      for (double v : r)
        if (v < 0.0) throw Error(ErrorCode::ParseError, path.string() + ": scores must lie in [0,1]");
  }
  return vm;
}

inline VoteMatrix read_vote_matrix(const std::filesystem::path& path) {
  return parse_vote_matrix(read_text(path), path);
}

}  // namespace cadkit::io
