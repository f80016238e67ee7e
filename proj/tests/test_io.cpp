#include "kcone/geodesics.hpp"
#include "kcone/io.hpp"
#include "kcone/scanner.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace kcone;
using kcone::testing::fixture;
using kcone::testing::fixture_names;
using kcone::testing::fixture_path;

namespace {

std::string error_message(const auto& f, ErrorKind expected) {
  try {
    f();
  } catch (const GeometryError& e) {
    if (e.kind() != expected) return std::string("wrong kind: ") + e.name();
    return e.what();
  }
  return "no exception";
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("kcone_test_io_" + name);
}

const char* kMinimal = R"({"n": 2, "N": 2, "entries": [[[0, 0], 1.0], [[1, 1], -1.0]]})";

}  // namespace

TEST_CASE("every shipped fixture loads and passes its validations") {
  const auto names = fixture_names();
  CHECK(names.size() >= 10);
  for (const auto& name : names) {
    const auto f = fixture(name);
    CHECK(f.name == name);
    for (const auto& t : f.kahler_points) {
      CHECK(volume(f.tensor, t) > 0.0);
      CHECK(is_positive_definite(metric_at(f.tensor, volume_point(t)).g));
    }
  }
  // the N = 1 families for n = 1..4
  for (const char* name : {"rank1_n1", "rank1_n2", "quintic_like", "rank1_n4"}) {
    const auto f = fixture(name);
    CHECK(f.tensor.rank() == 1);
  }
}

TEST_CASE("load, serialize, load is a fixpoint") {
  for (const auto& name : fixture_names()) {
    const auto first = fixture(name);
    const std::string text = serialize_tensor_file(first);
    const auto second = parse_tensor_file(text, name);
    CHECK(serialize_tensor_file(second) == text);
    CHECK(second.tensor.entries().size() == first.tensor.entries().size());
    for (std::size_t i = 0; i < first.tensor.entries().size(); ++i) {
      CHECK(second.tensor.entries()[i].index == first.tensor.entries()[i].index);
      CHECK(second.tensor.entries()[i].value == first.tensor.entries()[i].value);
    }
    CHECK(second.kahler_points == first.kahler_points);
    CHECK(second.boundary_points == first.boundary_points);
    CHECK(second.extra == first.extra);
  }
}

TEST_CASE("unknown fields are preserved in order") {
  const std::string text =
      R"({"zeta": {"k": [1, 2]}, "n": 1, "N": 1, "entries": [[[0], 2.0]], "alpha": "x", "name": "tiny"})";
  const auto f = parse_tensor_file(text);
  REQUIRE(f.extra.size() == 2);
  CHECK(f.extra.begin().key() == "zeta");
  CHECK(f.extra["alpha"] == "x");
  const auto again = parse_tensor_file(serialize_tensor_file(f));
  CHECK(again.extra == f.extra);
  CHECK(again.name == "tiny");
}

TEST_CASE("malformed tensor files are parse errors") {
  auto parse = [](std::string text) { return [text] { parse_tensor_file(text, "case.json"); }; };
  const std::string duplicate = R"({"n": 2, "N": 2, "entries": [[[0, 1], 1.0], [[0, 1], 2.0]]})";
  CHECK(error_message(parse(duplicate), ErrorKind::ParseError).find("duplicate") != std::string::npos);
  const std::string unsorted = R"({"n": 2, "N": 2, "entries": [[[1, 0], 1.0]]})";
  CHECK(error_message(parse(unsorted), ErrorKind::ParseError).find("not sorted") != std::string::npos);
  const std::string short_index = R"({"n": 2, "N": 2, "entries": [[[1], 1.0]]})";
  CHECK(error_message(parse(short_index), ErrorKind::ParseError).find("entries[0]") != std::string::npos);
  const std::string out_of_range = R"({"n": 2, "N": 2, "entries": [[[0, 2], 1.0]]})";
  CHECK(error_message(parse(out_of_range), ErrorKind::ParseError).find("case.json") != std::string::npos);
  const std::string missing = R"({"n": 2, "entries": []})";
  CHECK(error_message(parse(missing), ErrorKind::ParseError).find("\"N\"") != std::string::npos);
  const std::string bad_point = R"({"n": 2, "N": 2, "entries": [[[0, 0], 1.0]], "kahler_points": [[1.0]]})";
  CHECK(error_message(parse(bad_point), ErrorKind::ParseError).find("kahler_points[0]") != std::string::npos);
  CHECK(error_message(parse("[1, 2]"), ErrorKind::ParseError).find("object") != std::string::npos);
}

TEST_CASE("syntax errors report line, column and byte offset") {
  const std::string text = "{\n  \"n\": 2,\n  \"N\": 2,\n  \"entries\": [[[0, 0], 1.0],, ]\n}\n";
  const std::string message = error_message([&] { parse_tensor_file(text, "broken.json"); }, ErrorKind::ParseError);
  CHECK(message.find("broken.json") != std::string::npos);
  CHECK(message.find("line 4") != std::string::npos);
  CHECK(message.find("byte") != std::string::npos);
  const std::string missing_file =
      error_message([] { load_tensor_file("/nonexistent/kcone.json"); }, ErrorKind::ParseError);
  CHECK(missing_file.find("cannot open") != std::string::npos);
}

TEST_CASE("listed Kahler points are validated on load") {
  const std::string volume_negative =
      R"({"n": 2, "N": 2, "entries": [[[0, 0], 1.0], [[1, 1], -1.0]], "kahler_points": [[1.0, 2.0]]})";
  const std::string m1 = error_message([&] { parse_tensor_file(volume_negative, "v.json"); },
                                       ErrorKind::VolumeNotPositive);
  CHECK(m1.find("kahler_points[0]") != std::string::npos);
  // volume-positive but not positive-definite
  const std::string indefinite =
      R"({"n": 3, "N": 2, "entries": [[[0, 0, 0], 1.0], [[1, 1, 1], -1.0]], "kahler_points": [[1.0, -0.5]]})";
  CHECK(error_message([&] { parse_tensor_file(indefinite, "p.json"); }, ErrorKind::NotPositiveDefinite)
            .find("p.json") != std::string::npos);
  // boundary points are metadata only
  const std::string boundary =
      R"({"n": 2, "N": 2, "entries": [[[0, 0], 1.0], [[1, 1], -1.0]], "boundary_points": [[1.0, 1.0]]})";
  CHECK(parse_tensor_file(boundary).boundary_points.size() == 1);
  CHECK(parse_tensor_file(kMinimal).kahler_points.empty());
}

TEST_CASE("number formatting re-parses exactly") {
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(3.0) == "3.0");
  CHECK(format_number(-2.0) == "-2.0");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  std::mt19937_64 rng(111);
  std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
  std::uniform_int_distribution<int> exponent(-300, 300);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(mantissa(rng), exponent(rng));
    const std::string s = format_number(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
  Vectord v(2);
  v << 1.0, -0.25;
  CHECK(format_vector(v) == "[1.0, -0.25]");
  Matrixd m(1, 1);
  m << 3.0;
  CHECK(format_matrix(m) == "[[3.0]]");
}

TEST_CASE("vector arguments") {
  const Vectord v = parse_vector("2,1");
  REQUIRE(v.size() == 2);
  CHECK(v[0] == 2.0);
  CHECK(v[1] == 1.0);
  CHECK(parse_vector("-1e-3, 4.5")[0] == -1e-3);
  CHECK(parse_vector("7").size() == 1);
  for (const char* bad : {"", "1,,2", "a,b", "1,2,", "1 2"})
    CHECK(error_message([&] { parse_vector(bad); }, ErrorKind::InvalidArgument).find("vector") != std::string::npos);
}

TEST_CASE("report formats") {
  CHECK(parse_format("json") == ReportFormat::json);
  CHECK(parse_format("csv") == ReportFormat::csv);
  CHECK(error_message([] { parse_format("xml"); }, ErrorKind::InvalidArgument).find("xml") != std::string::npos);

  const auto c = fixture("blowup_p2").tensor;
  const std::vector<double> t_min = {0.1, 0.01};
  Vectord alpha(2), omega(2);
  alpha << 1.0, 0.0;
  omega << 2.0, 1.0;
  const auto ray = boundary_ray_study(c, alpha, omega, t_min);
  const Table table = to_table(ray);
  const std::string csv = render_csv(table);
  CHECK(csv.rfind("t_min,length,bound\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(render_json(to_json(ray)).back() == '\n');
  CHECK(to_json(ray)["verdict"] == verdict_name(ray.verdict));
  CHECK(error_message([] { emit_report(Json::object(), std::nullopt, temp_path("nocsv").string(), ReportFormat::csv); },
                      ErrorKind::InvalidArgument)
            .find("CSV") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs") {
  const auto f = fixture("synthetic_n3_b");
  auto run = [&](const std::string& file, ReportFormat format) {
    ScanOptions options;
    options.planes_per_point = 10;
    options.optimize = true;
    options.seed = 5;
    options.threads = 3;
    const auto points = sample_cone_points(f.tensor, f.kahler_points, 4, 0.1, 5, true);
    const auto report = scan_sectional(f.tensor, points, options, f.name);
    emit_report(to_json(report, true), to_table(report), temp_path(file).string(), format);
    return read_file(temp_path(file));
  };
  const std::string a = run("a.json", ReportFormat::json);
  const std::string b = run("b.json", ReportFormat::json);
  CHECK(!a.empty());
  CHECK(a == b);
  CHECK(Json::parse(a)["tensor"] == f.name);
  CHECK(run("a.csv", ReportFormat::csv) == run("b.csv", ReportFormat::csv));
  for (const char* name : {"a.json", "b.json", "a.csv", "b.csv"}) std::filesystem::remove(temp_path(name));
}
