#include "kcone/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace kcone {

namespace {

std::string bare_message(const GeometryError& e) {
  std::string what = e.what();
  const std::string prefix = std::string(e.name()) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

[[noreturn]] void parse_fail(std::string_view source, const std::string& message) {
  throw GeometryError(ErrorKind::ParseError, std::string(source) + ": " + message);
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

int require_int(const Json& doc, const char* key, std::string_view source) {
  if (!doc.contains(key)) parse_fail(source, std::string("missing field \"") + key + "\"");
  const Json& v = doc[key];
  if (!v.is_number_integer()) parse_fail(source, std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

Vectord point_from_json(const Json& j, int N, std::string_view source, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != N)
    parse_fail(source, where + " must be an array of " + std::to_string(N) + " numbers");
  Vectord t(N);
  for (int i = 0; i < N; ++i) {
    if (!j[i].is_number()) parse_fail(source, where + " must contain numbers");
    t[i] = j[i].get<double>();
  }
  return t;
}

std::vector<Vectord> points_from_json(const Json& doc, const char* key, int N, std::string_view source) {
  std::vector<Vectord> out;
  if (!doc.contains(key)) return out;
  const Json& list = doc[key];
  if (!list.is_array()) parse_fail(source, std::string("field \"") + key + "\" must be an array");
  for (std::size_t i = 0; i < list.size(); ++i)
    out.push_back(point_from_json(list[i], N, source, std::string(key) + "[" + std::to_string(i) + "]"));
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

TensorFile parse_tensor_file(std::string_view text, std::string_view source) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    parse_fail(source, "line " + std::to_string(line) + ", column " + std::to_string(column) + " (byte " +
                           std::to_string(e.byte) + "): " + e.what());
  }
  if (!doc.is_object()) parse_fail(source, "top level must be an object");

  const int n = require_int(doc, "n", source);
  const int N = require_int(doc, "N", source);
  if (n < 1 || N < 1) parse_fail(source, "n and N must be positive");
  if (!doc.contains("entries") || !doc["entries"].is_array()) parse_fail(source, "missing array field \"entries\"");

  std::vector<IntersectionTensor<double>::Entry> entries;
  std::set<std::vector<int>> seen;
  const Json& list = doc["entries"];
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = "entries[" + std::to_string(k) + "]";
    const Json& e = list[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_array() || !e[1].is_number())
      parse_fail(source, where + " must be [[i1, ..., in], value]");
    std::vector<int> index;
    for (const auto& i : e[0]) {
      if (!i.is_number_integer()) parse_fail(source, where + ": indices must be integers");
      index.push_back(i.get<int>());
    }
    if (static_cast<int>(index.size()) != n) parse_fail(source, where + ": multi-index length differs from n");
    if (!std::is_sorted(index.begin(), index.end())) parse_fail(source, where + ": multi-index is not sorted");
    if (!seen.insert(index).second) parse_fail(source, where + ": duplicate multi-index");
    entries.push_back({std::move(index), e[1].get<double>()});
  }

  std::optional<IntersectionTensor<double>> tensor;
  try {
    tensor.emplace(n, N, std::move(entries));
  } catch (const GeometryError& e) {
    parse_fail(source, bare_message(e));
  }

  TensorFile file{std::move(*tensor), {}, {}, {}, Json::object()};
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) parse_fail(source, "field \"name\" must be a string");
    file.name = doc["name"].get<std::string>();
  }
  file.kahler_points = points_from_json(doc, "kahler_points", N, source);
  file.boundary_points = points_from_json(doc, "boundary_points", N, source);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (key == "n" || key == "N" || key == "entries" || key == "name" || key == "kahler_points" ||
        key == "boundary_points")
      continue;
    file.extra[key] = it.value();
  }

  for (std::size_t i = 0; i < file.kahler_points.size(); ++i) {
    try {
      metric_at(file.tensor, kahler_point(file.kahler_points[i]));
    } catch (const GeometryError& e) {
      throw GeometryError(e.kind(),
                          std::string(source) + ": kahler_points[" + std::to_string(i) + "]: " + bare_message(e));
    }
  }
  return file;
}

TensorFile load_tensor_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GeometryError(ErrorKind::ParseError, path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_tensor_file(buffer.str(), path);
}

IntersectionTensor<double> load_tensor(const std::string& path) { return load_tensor_file(path).tensor; }

Json to_json(const TensorFile& file) {
  Json j = Json::object();
  if (!file.name.empty()) j["name"] = file.name;
  j["n"] = file.tensor.degree();
  j["N"] = file.tensor.rank();
  Json entries = Json::array();
  for (const auto& e : file.tensor.entries()) entries.push_back(Json::array({e.index, e.value}));
  j["entries"] = std::move(entries);
  auto points = [](const std::vector<Vectord>& ps) {
    Json a = Json::array();
    for (const auto& p : ps) a.push_back(to_json(p));
    return a;
  };
  if (!file.kahler_points.empty()) j["kahler_points"] = points(file.kahler_points);
  if (!file.boundary_points.empty()) j["boundary_points"] = points(file.boundary_points);
  for (auto it = file.extra.begin(); it != file.extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

std::string serialize_tensor_file(const TensorFile& file) { return to_json(file).dump(2) + "\n"; }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, end);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string format_vector(const Vectord& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s + "]";
}

std::string format_matrix(const Matrixd& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += (i ? ", " : "") + format_vector(m.row(i).transpose());
  return s + "]";
}

Vectord parse_vector(std::string_view text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view field = text.substr(pos, comma - pos);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
      throw GeometryError(ErrorKind::InvalidArgument, "cannot parse \"" + std::string(text) + "\" as a vector");
    values.push_back(value);
    pos = comma + 1;
  }
  return Eigen::Map<const Vectord>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Json to_json(const Vectord& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const Matrixd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vectord(m.row(i).transpose())));
  return a;
}

Json to_json(const Signature& s) { return {{"positive", s.positive}, {"negative", s.negative}, {"null", s.null}}; }

Json to_json(const CurvatureAtPoint<double>& curv) {
  const int N = static_cast<int>(curv.metric.rows());
  Json j;
  j["point"] = to_json(curv.base.t);
  j["metric"] = to_json(curv.metric);
  j["condition"] = curv.condition;
  auto array3 = [N](const Array3<double>& a) {
    Json out = Json::array();
    for (int i = 0; i < N; ++i) {
      Json rows = Json::array();
      for (int k = 0; k < N; ++k) {
        Json row = Json::array();
        for (int l = 0; l < N; ++l) row.push_back(a(i, k, l));
        rows.push_back(std::move(row));
      }
      out.push_back(std::move(rows));
    }
    return out;
  };
  j["christoffel_first"] = array3(curv.christoffel_first);
  j["christoffel_second"] = array3(curv.christoffel_second);
  if (curv.has_riemann()) {
    Json r = Json::array();
    for (int a = 0; a < N; ++a) {
      Json ra = Json::array();
      for (int b = 0; b < N; ++b) {
        Json rb = Json::array();
        for (int c = 0; c < N; ++c) {
          Json rc = Json::array();
          for (int d = 0; d < N; ++d) rc.push_back(curv.riemann(a, b, c, d));
          rb.push_back(std::move(rc));
        }
        ra.push_back(std::move(rb));
      }
      r.push_back(std::move(ra));
    }
    j["riemann"] = std::move(r);
  }
  return j;
}

Json to_json(const GeodesicPath& path) {
  Json samples = Json::array();
  for (const auto& s : path.samples)
    samples.push_back({{"s", s.s}, {"point", to_json(s.point)}, {"velocity", to_json(s.velocity)}, {"speed", s.speed}});
  return {{"status", status_name(path.status)},
          {"end", to_json(path.end().point)},
          {"arclength", path.end().s},
          {"max_speed_drift", path.max_speed_drift},
          {"rejected_steps", path.rejected_steps},
          {"samples", std::move(samples)}};
}

Json to_json(const LengthBoundReport& r) {
  return {{"length", r.length}, {"bound", r.bound}, {"slack", r.slack}, {"pass", r.pass}};
}

Json to_json(const BoundaryRayReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back({{"t_min", row.t_min}, {"length", row.length}, {"bound", row.bound}});
  return {{"verdict", verdict_name(r.verdict)}, {"boundary_volume", r.boundary_volume}, {"rows", std::move(rows)}};
}

Json to_json(const LorentzModel& m) {
  return {{"dimension", m.dimension}, {"signature", to_json(m.signature)}, {"gram", to_json(m.gram)},
          {"basis", to_json(m.basis)}};
}

Json to_json(const IsometryReport& r) {
  return {{"samples", r.samples},
          {"max_metric_residual", r.max_metric_residual},
          {"max_group_residual", r.max_group_residual},
          {"pass", r.pass}};
}

Json to_json(const FullConeReport& r) {
  Json failures = Json::array();
  for (const auto& f : r.failures) failures.push_back(to_json(f));
  return {{"samples", r.samples}, {"positive_fraction", r.positive_fraction}, {"failures", std::move(failures)}};
}

Json to_json(const maass::TorusReport& r) {
  return {{"samples", r.samples},
          {"max_residual", r.max_residual},
          {"det_form_signature", to_json(r.det_form_signature)},
          {"pass", r.pass}};
}

Json to_json(const maass::VerifyReport& r) {
  return {{"samples", r.samples},
          {"tolerance", r.tolerance},
          {"max_curvature_residual", r.max_curvature_residual},
          {"max_adjoint_residual", r.max_adjoint_residual},
          {"max_jacobi_residual", r.max_jacobi_residual},
          {"max_bracket_hermitian_residual", r.max_bracket_hermitian_residual},
          {"max_trace_term", r.max_trace_term},
          {"max_compatibility_residual", r.max_compatibility_residual},
          {"max_sectional", r.max_sectional},
          {"worked_sectional", r.worked_sectional},
          {"torus", to_json(r.torus)},
          {"pass", r.pass}};
}

Json to_json(const PlaneSample& s) {
  return {{"point_index", s.point_index}, {"sample_index", s.sample_index}, {"u", to_json(s.u)},
          {"v", to_json(s.v)}, {"k", s.k}};
}

Json to_json(const ScanReport& r, bool include_samples) {
  Json j;
  j["tensor"] = r.tensor_id;
  j["points"] = static_cast<int>(r.points.size());
  j["skipped_points"] = r.skipped_points;
  j["positive_definite_fraction"] = r.positive_definite_fraction;
  if (!r.samples.empty()) {
    j["planes"] = static_cast<int>(r.samples.size());
    j["k_min"] = r.k_min;
    j["k_max"] = r.k_max;
    j["raw_k_max"] = r.raw_k_max;
    j["min_plane"] = to_json(r.min_plane);
    j["max_plane"] = to_json(r.max_plane);
    j["histogram"] = {{"lower", r.histogram.lower}, {"upper", r.histogram.upper}, {"counts", r.histogram.counts}};
  }
  Json sig = Json::array();
  for (const auto& e : r.signature) sig.push_back({{"point", to_json(e.point)}, {"signature", to_json(e.signature)}});
  j["signature"] = std::move(sig);
  if (include_samples) {
    Json samples = Json::array();
    for (const auto& s : r.samples) samples.push_back(to_json(s));
    j["samples"] = std::move(samples);
  }
  return j;
}

Table to_table(const GeodesicPath& path) {
  Table t;
  t.header.push_back("s");
  const int N = path.samples.empty() ? 0 : static_cast<int>(path.samples.front().point.size());
  for (int i = 0; i < N; ++i) t.header.push_back("t_" + std::to_string(i));
  t.header.push_back("speed");
  for (const auto& s : path.samples) {
    std::vector<double> row{s.s};
    for (int i = 0; i < N; ++i) row.push_back(s.point[i]);
    row.push_back(s.speed);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table to_table(const BoundaryRayReport& r) {
  Table t{{"t_min", "length", "bound"}, {}};
  for (const auto& row : r.rows) t.rows.push_back({row.t_min, row.length, row.bound});
  return t;
}

Table to_table(const ScanReport& r) {
  if (r.samples.empty()) {
    Table t{{"point", "positive", "negative", "null"}, {}};
    for (std::size_t i = 0; i < r.signature.size(); ++i) {
      const auto& s = r.signature[i].signature;
      t.rows.push_back({double(i), double(s.positive), double(s.negative), double(s.null)});
    }
    return t;
  }
  Table t{{"point", "sample", "k"}, {}};
  for (const auto& s : r.samples) t.rows.push_back({double(s.point_index), double(s.sample_index), s.k});
  return t;
}

ReportFormat parse_format(std::string_view name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  throw GeometryError(ErrorKind::InvalidArgument, "unknown format \"" + std::string(name) + "\"");
}

std::string render_json(const Json& report) { return report.dump(2) + "\n"; }

std::string render_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + csv_escape(table.header[i]);
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += "\n";
  }
  return out;
}

void emit_report(const Json& report, const std::optional<Table>& table, const std::string& path,
                 ReportFormat format) {
  std::string text;
  if (format == ReportFormat::csv) {
    if (!table) throw GeometryError(ErrorKind::InvalidArgument, "this report has no CSV form");
    text = render_csv(*table);
  } else {
    text = render_json(report);
  }
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GeometryError(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
}

}  // namespace kcone
