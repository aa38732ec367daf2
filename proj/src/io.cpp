#include "heterolab/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "heterolab/error.hpp"

namespace heterolab::io {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string where(const fs::path& p, std::size_t line) {
  return p.string() + ":" + std::to_string(line);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool have = false;
  for (char ch : line) {
    if (ch == ',' || ch == '\t' || ch == ' ' || ch == ';') {
      if (ch == ',' || ch == ';' || have) {
        out.push_back(cur);
        cur.clear();
        have = false;
      }
      continue;
    }
    if (ch == '\r') continue;
    cur.push_back(ch);
    have = true;
  }
  if (have) out.push_back(cur);
  return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_double(const std::string& s, double& out) {
  // from_chars for double is available in libstdc++ 11.
  return parse_number(s, out);
}

std::ifstream open_in(const fs::path& p, bool binary = false) {
  std::ifstream in(p, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open " + p.string());
  return in;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

Manifest read_manifest(const fs::path& dir) {
  const fs::path path = dir / "graph.json";
  if (!fs::exists(path)) throw IoError("missing file " + path.string());
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  Manifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kBundleFormatVersion) {
      throw ValidationError(path.string() + ": unknown format_version " +
                            std::to_string(m.format_version));
    }
    m.n = j.at("n").get<std::size_t>();
    m.num_classes = j.at("num_classes").get<std::size_t>();
    m.has_features = j.at("has_features").get<bool>();
    m.l = j.at("l").get<std::size_t>();
    m.label_names = j.value("label_names", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (!m.label_names.empty() && m.label_names.size() != m.num_classes) {
    throw ValidationError(path.string() + ": label_names has " +
                          std::to_string(m.label_names.size()) + " entries for " +
                          std::to_string(m.num_classes) + " classes");
  }
  return m;
}

Bundle load_bundle_with_names(const fs::path& dir) {
  const Manifest m = read_manifest(dir);

  const fs::path labels_path = dir / "labels.tsv";
  std::ifstream lin = open_in(labels_path);
  std::vector<ClassId> labels;
  labels.reserve(m.n);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lin, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto fields = split_fields(line);
    std::uint32_t y = 0;
    if (fields.size() != 1 || !parse_number(fields[0], y)) {
      throw ValidationError(where(labels_path, lineno) + ": malformed label line");
    }
    if (y >= m.num_classes) {
      throw ValidationError(where(labels_path, lineno) + ": label " + std::to_string(y) +
                            " out of range for " + std::to_string(m.num_classes) + " classes");
    }
    labels.push_back(y);
  }
  if (labels.size() != m.n) {
    throw ValidationError(labels_path.string() + ": expected " + std::to_string(m.n) +
                          " labels, found " + std::to_string(labels.size()));
  }

  const fs::path edges_path = dir / "edges.tsv";
  std::ifstream ein = open_in(edges_path);
  std::vector<Edge> edges;
  lineno = 0;
  while (std::getline(ein, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto fields = split_fields(line);
    Edge e;
    if (fields.size() != 2 || !parse_number(fields[0], e.u) || !parse_number(fields[1], e.v)) {
      throw ValidationError(where(edges_path, lineno) + ": malformed edge line");
    }
    if (e.u >= m.n || e.v >= m.n) {
      throw ValidationError(where(edges_path, lineno) + ": node id out of range");
    }
    if (e.u == e.v) throw ValidationError(where(edges_path, lineno) + ": self-loop");
    edges.push_back(e);
  }

  std::optional<Matrix> features;
  const fs::path feat_path = dir / "features.f32";
  if (m.has_features) {
    if (!fs::exists(feat_path)) throw IoError("missing file " + feat_path.string());
    const std::uintmax_t expected = 4ull * m.n * m.l;
    const std::uintmax_t actual = fs::file_size(feat_path);
    if (actual != expected) {
      throw ValidationError(feat_path.string() + ": expected " + std::to_string(expected) +
                            " bytes (4*n*l), found " + std::to_string(actual));
    }
    std::ifstream fin = open_in(feat_path, true);
    std::vector<unsigned char> bytes(expected);
    fin.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(expected));
    if (!fin) throw IoError("short read on " + feat_path.string());
    Matrix x(m.n, m.l);
    auto xs = x.values();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const unsigned char* b = bytes.data() + 4 * i;
      const std::uint32_t bits = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                                 (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
      xs[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    features = std::move(x);
  }

  Bundle b;
  b.graph = build_graph(edges, std::move(labels), std::move(features), m.num_classes);
  b.label_names = m.label_names;
  if (b.label_names.empty()) {
    for (std::size_t c = 0; c < m.num_classes; ++c) b.label_names.push_back(std::to_string(c));
  }
  return b;
}

LabeledGraph load_bundle(const fs::path& dir) { return load_bundle_with_names(dir).graph; }

void save_bundle(const LabeledGraph& g, const fs::path& dir,
                 const std::vector<std::string>& label_names) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::string> names = label_names;
  if (names.empty()) {
    for (std::size_t c = 0; c < g.num_classes(); ++c) names.push_back(std::to_string(c));
  }
  if (names.size() != g.num_classes()) {
    throw ValidationError("label_names must have one entry per class");
  }
  json manifest = {{"format_version", kBundleFormatVersion},
                   {"n", g.num_nodes()},
                   {"num_classes", g.num_classes()},
                   {"has_features", g.has_features()},
                   {"l", g.feature_dim()},
                   {"label_names", names}};
  write_text(dir / "graph.json", manifest.dump(2) + "\n");

  std::string edges;
  for (const Edge& e : g.edge_list()) {
    edges += std::to_string(e.u);
    edges += '\t';
    edges += std::to_string(e.v);
    edges += '\n';
  }
  write_text(dir / "edges.tsv", edges);

  std::string labels;
  for (ClassId y : g.labels()) {
    labels += std::to_string(y);
    labels += '\n';
  }
  write_text(dir / "labels.tsv", labels);

  const fs::path feat_path = dir / "features.f32";
  if (g.has_features()) {
    const auto xs = g.features().values();
    std::string bytes(xs.size() * 4, '\0');
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(xs[i]));
      for (int k = 0; k < 4; ++k) bytes[4 * i + k] = static_cast<char>((bits >> (8 * k)) & 0xff);
    }
    write_text(feat_path, bytes);
  } else if (fs::exists(feat_path)) {
    fs::remove(feat_path);
  }
}

CsvImportResult import_csv(const CsvImportOptions& options) {
  CsvImportResult result;

  std::vector<std::string> node_names;
  std::vector<std::string> label_strings;
  std::unordered_map<std::string, NodeId> node_index;
  {
    std::ifstream in = open_in(options.labels);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if ((options.header && lineno == 1) || blank(line)) continue;
      auto f = split_fields(line);
      if (f.size() != 2) {
        throw ValidationError(where(options.labels, lineno) + ": expected 'node,label'");
      }
      if (!node_index.emplace(f[0], static_cast<NodeId>(node_names.size())).second) {
        throw ValidationError(where(options.labels, lineno) + ": duplicate node '" + f[0] + "'");
      }
      node_names.push_back(f[0]);
      label_strings.push_back(f[1]);
    }
  }

  std::set<std::string> distinct(label_strings.begin(), label_strings.end());
  std::vector<std::string> names(distinct.begin(), distinct.end());
  const bool numeric = std::all_of(names.begin(), names.end(), [](const std::string& s) {
    long long v;
    return parse_number(s, v);
  });
  if (numeric) {
    std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
      long long x = 0, y = 0;
      parse_number(a, x);
      parse_number(b, y);
      return x < y;
    });
  }
  std::map<std::string, ClassId> label_index;
  for (std::size_t c = 0; c < names.size(); ++c) label_index[names[c]] = static_cast<ClassId>(c);
  std::vector<ClassId> labels;
  labels.reserve(label_strings.size());
  for (const auto& s : label_strings) labels.push_back(label_index.at(s));

  std::vector<Edge> edges;
  std::set<std::pair<NodeId, NodeId>> seen;
  {
    std::ifstream in = open_in(options.edges);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if ((options.header && lineno == 1) || blank(line)) continue;
      auto f = split_fields(line);
      if (f.size() != 2) {
        throw ValidationError(where(options.edges, lineno) + ": expected 'u,v'");
      }
      auto a = node_index.find(f[0]);
      auto b = node_index.find(f[1]);
      if (a == node_index.end() || b == node_index.end()) {
        throw ValidationError(where(options.edges, lineno) + ": edge references unknown node");
      }
      if (a->second == b->second) {
        if (options.drop_self_loops) {
          ++result.dropped_self_loops;
          continue;
        }
        throw ValidationError(where(options.edges, lineno) + ": self-loop on node '" + f[0] +
                              "' (use --drop-self-loops)");
      }
      auto key = std::minmax(a->second, b->second);
      if (!seen.insert({key.first, key.second}).second) {
        ++result.duplicate_edges;
        continue;
      }
      edges.push_back({a->second, b->second});
    }
  }

  std::optional<Matrix> features;
  if (options.features) {
    std::ifstream in = open_in(*options.features);
    std::string line;
    std::size_t lineno = 0;
    std::size_t l = 0;
    std::vector<char> filled(node_names.size(), 0);
    std::vector<std::vector<double>> rows(node_names.size());
    while (std::getline(in, line)) {
      ++lineno;
      if ((options.header && lineno == 1) || blank(line)) continue;
      auto f = split_fields(line);
      if (f.size() < 2) {
        throw ValidationError(where(*options.features, lineno) + ": expected 'node,f1,...'");
      }
      if (l == 0) l = f.size() - 1;
      if (f.size() - 1 != l) {
        throw ValidationError(where(*options.features, lineno) + ": expected " +
                              std::to_string(l) + " feature columns");
      }
      auto it = node_index.find(f[0]);
      if (it == node_index.end()) {
        throw ValidationError(where(*options.features, lineno) + ": unknown node '" + f[0] + "'");
      }
      std::vector<double> row(l);
      for (std::size_t k = 0; k < l; ++k) {
        if (!parse_double(f[k + 1], row[k]) || !std::isfinite(row[k])) {
          throw ValidationError(where(*options.features, lineno) + ": bad feature value '" +
                                f[k + 1] + "'");
        }
      }
      rows[it->second] = std::move(row);
      filled[it->second] = 1;
    }
    for (std::size_t i = 0; i < node_names.size(); ++i) {
      if (!filled[i]) {
        throw ValidationError(options.features->string() + ": no features for node '" +
                              node_names[i] + "'");
      }
    }
    Matrix x(node_names.size(), l);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::copy(rows[i].begin(), rows[i].end(), x.row(i).begin());
    }
    features = std::move(x);
  }

  result.bundle.graph = build_graph(edges, std::move(labels), std::move(features), names.size());
  result.bundle.label_names = std::move(names);
  return result;
}

std::vector<NeighborDistribution> load_distributions(const std::string& spec,
                                                     std::size_t num_classes) {
  if (spec == "circulant-2hop") return circulant_two_hop(num_classes);
  json j;
  try {
    if (!spec.empty() && spec.front() == '{') {
      j = json::parse(spec);
    } else {
      j = json::parse(read_text(spec));
    }
  } catch (const json::exception& e) {
    throw ValidationError("distribution spec: " + std::string(e.what()));
  }
  std::vector<NeighborDistribution> out;
  try {
    const auto classes = j.at("classes").get<std::size_t>();
    if (classes != num_classes) {
      throw ValidationError("distribution spec is for " + std::to_string(classes) +
                            " classes, graph has " + std::to_string(num_classes));
    }
    const auto rows = j.at("dists").get<std::vector<std::vector<double>>>();
    if (rows.size() != classes) {
      throw ValidationError("distribution spec needs one row per class");
    }
    for (const auto& r : rows) {
      if (r.size() != classes) throw ValidationError("distribution row has wrong length");
      out.emplace_back(r);
    }
  } catch (const json::exception& e) {
    throw ValidationError("distribution spec: " + std::string(e.what()));
  }
  return out;
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto f = split_fields(line);
    if (cols == 0) cols = f.size();
    if (f.size() != cols) throw ValidationError(where(path, lineno) + ": ragged row");
    for (const auto& s : f) {
      double v;
      if (!parse_double(s, v)) {
        throw ValidationError(where(path, lineno) + ": bad number '" + s + "'");
      }
      data.push_back(v);
    }
    ++rows;
  }
  return Matrix(rows, cols, std::move(data));
}

}  // namespace heterolab::io
