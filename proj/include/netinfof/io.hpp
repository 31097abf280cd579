#pragma once

// File formats:
//   edge list     text, one "u<TAB>v" pair per line, 0-based, '#' comments
//   dense matrix  8-byte magic, uint64 rows, uint64 cols, uint64 element
//                 width (8), then row-major little-endian doubles
//   CSV matrix    comma- or whitespace-separated numbers, one row per line
//   labels        one integer class id per line, in node order
//   config        key=value lines, '#' comments

#include "netinfof/act.hpp"
#include "netinfof/synth.hpp"

#include "json.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace netinfof {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr char kMatrixMagic[8] = {'N', 'I', 'F', 'M', 'A', 'T', '0', '1'};

namespace detail {

inline std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  std::string s = hash == std::string::npos ? line : line.substr(0, hash);
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::ifstream open_in(const fs::path& p, bool binary = false) {
  std::ifstream in(p, binary ? std::ios::binary : std::ios::in);
  if (!in) throw InputError("cannot open " + p.string());
  return in;
}

inline std::ofstream open_out(const fs::path& p, bool binary = false) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw ResourceError("cannot write " + p.string());
  return out;
}

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFU) << (8 * (7 - i));
    return r;
  }
  return v;
}

}  // namespace detail

struct EdgeFile {
  EdgeList edges;
  NodeId num_nodes = 0;  // 1 + largest id seen
};

inline EdgeFile read_edge_list(const fs::path& path) {
  auto in = detail::open_in(path);
  EdgeFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::strip_comment(line);
    if (s.empty()) continue;
    std::istringstream ss(s);
    long long u = -1;
    long long v = -1;
    std::string extra;
    if (!(ss >> u >> v) || (ss >> extra) || u < 0 || v < 0 ||
        u > std::numeric_limits<NodeId>::max() || v > std::numeric_limits<NodeId>::max())
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected two non-negative node ids");
    out.edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    out.num_nodes = std::max<NodeId>(out.num_nodes, static_cast<NodeId>(std::max(u, v) + 1));
  }
  return out;
}

inline void write_edge_list(const fs::path& path, std::span<const Edge> edges) {
  auto out = detail::open_out(path);
  out << "# u\tv\n";
  for (const Edge& e : edges) out << e.u << '\t' << e.v << '\n';
  if (!out) throw ResourceError("failed writing " + path.string());
}

inline void write_dense(const fs::path& path, const Matrix& m) {
  auto out = detail::open_out(path, true);
  out.write(kMatrixMagic, sizeof(kMatrixMagic));
  for (std::uint64_t v : {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols()),
                          std::uint64_t{8}}) {
    const std::uint64_t le = detail::to_le(v);
    out.write(reinterpret_cast<const char*>(&le), 8);
  }
  std::vector<std::uint64_t> row(static_cast<std::size_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = detail::to_le(std::bit_cast<std::uint64_t>(m(i, j)));
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 8));
  }
  if (!out) throw ResourceError("failed writing " + path.string());
}

inline Matrix read_dense(const fs::path& path) {
  auto in = detail::open_in(path, true);
  char magic[8];
  std::uint64_t hdr[3];
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
  if (!in || std::memcmp(magic, kMatrixMagic, 8) != 0)
    throw InputError(path.string() + ": not a dense matrix file");
  const std::uint64_t rows = detail::to_le(hdr[0]);
  const std::uint64_t cols = detail::to_le(hdr[1]);
  if (detail::to_le(hdr[2]) != 8) throw InputError(path.string() + ": element width must be 8");
  const auto expected = 32 + rows * cols * 8;
  if (fs::file_size(path) != expected) throw InputError(path.string() + ": size does not match header");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::vector<std::uint64_t> row(cols);
  for (std::uint64_t i = 0; i < rows; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(cols * 8));
    for (std::uint64_t j = 0; j < cols; ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = std::bit_cast<double>(detail::to_le(row[j]));
  }
  if (!in) throw InputError(path.string() + ": truncated");
  return m;
}

inline Matrix read_csv_matrix(const fs::path& path) {
  auto in = detail::open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = detail::strip_comment(line);
    if (s.empty()) continue;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream ss(s);
    std::vector<double> r;
    std::string tok;
    while (ss >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0')
        throw InputError(path.string() + ":" + std::to_string(lineno) + ": not a number: " + tok);
      r.push_back(v);
    }
    if (!rows.empty() && r.size() != rows.front().size())
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw InputError(path.string() + ": empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

/// Binary when the file starts with the matrix magic, CSV otherwise.
inline FeatureMatrix read_features(const fs::path& path) {
  char magic[8] = {};
  {
    auto in = detail::open_in(path, true);
    in.read(magic, 8);
  }
  FeatureMatrix f;
  f.data = std::memcmp(magic, kMatrixMagic, 8) == 0 ? read_dense(path) : read_csv_matrix(path);
  return f;
}

inline std::vector<int> read_labels(const fs::path& path) {
  auto in = detail::open_in(path);
  std::vector<int> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::strip_comment(line);
    if (s.empty()) continue;
    std::istringstream ss(s);
    long long v = -1;
    std::string extra;
    if (!(ss >> v) || (ss >> extra) || v < 0 || v > std::numeric_limits<int>::max())
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected a non-negative class id");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

inline void write_labels(const fs::path& path, std::span<const int> labels) {
  auto out = detail::open_out(path);
  for (int v : labels) out << v << '\n';
  if (!out) throw ResourceError("failed writing " + path.string());
}

/// Flat key=value pairs. Later keys override earlier ones.
inline std::map<std::string, std::string> read_config(const fs::path& path) {
  auto in = detail::open_in(path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::strip_comment(line);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    out[detail::strip_comment(s.substr(0, eq))] = detail::strip_comment(s.substr(eq + 1));
  }
  return out;
}

// ---------------------------------------------------------------- JSON

inline Json to_json(const CompatMatrix& c) {
  return Json{{"kind", compat_kind_name(c.kind)},
              {"dim", c.dim()},
              {"mask_density", c.mask_density()},
              {"energy_kept", c.energy_kept},
              {"converged", c.converged},
              {"iterations", c.iterations}};
}

/// Matrix in the dense format plus a JSON sidecar next to it.
inline void write_compat(const fs::path& path, const CompatMatrix& c) {
  write_dense(path, c.values);
  auto out = detail::open_out(fs::path(path).replace_extension(".json"));
  out << to_json(c).dump(2) << '\n';
}

inline Json to_json(const ScoreReport& r) {
  Json comps = Json::object();
  for (Component c : kAllComponents) {
    const ComponentScore& s = r[c];
    Json params = Json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    params["effective_bins"] = s.effective_bins;
    params["samples"] = s.samples;
    comps[std::string(component_name(c))] = {{"score", s.score}, {"accuracy_bound", s.accuracy_bound}, {"params", params}};
  }
  Json timings = Json::object();
  for (const auto& [k, v] : r.timings) timings[k] = v;
  return Json{{"task", task_name(r.task)}, {"components", comps}, {"seed", r.seed}, {"timings", timings}};
}

inline Json to_json(const SynthSpec& s) {
  return Json{{"name", s.name},
              {"task", task_name(s.task)},
              {"num_nodes", s.num_nodes},
              {"num_features", s.num_features},
              {"num_classes", s.num_classes},
              {"structure", structure_name(s.structure)},
              {"features_lp", link_features_name(s.features_lp)},
              {"features_nc", node_features_name(s.features_nc)},
              {"target_density", s.target_density},
              {"clique_size_range", {s.clique_min, s.clique_max}},
              {"noise_rate", s.noise_rate},
              {"feature_noise", s.feature_noise},
              {"class_noise", s.class_noise},
              {"walk_trials", s.walk_trials},
              {"pairing", s.pairing == Pairing::Xor ? "xor" : "cyclic"},
              {"seed", s.seed}};
}

/// Mean and sample standard deviation.
inline std::pair<double, double> mean_std(std::span<const double> v) {
  if (v.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0};
}

/// Writes edges.tsv, features.bin, labels.txt and manifest.json.
inline void write_dataset(const fs::path& dir, const SynthDataset& d) {
  fs::create_directories(dir);
  write_edge_list(dir / "edges.tsv", d.graph.edges());
  write_dense(dir / "features.bin", d.features.data);
  write_labels(dir / "labels.txt", d.labels);
  Json m = to_json(d.spec);
  m["num_edges"] = d.graph.num_edges();
  auto out = detail::open_out(dir / "manifest.json");
  out << m.dump(2) << '\n';
}

/// 64-bit FNV-1a of a string, as 16 hex digits.
inline std::string content_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string file_hash(const fs::path& p) {
  auto in = detail::open_in(p, true);
  std::ostringstream ss;
  ss << in.rdbuf();
  return content_hash(ss.str());
}

}  // namespace netinfof
