#include "kcone/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace kcone;

struct Options {
  std::string input;
  std::vector<std::string> points;
  std::vector<std::string> vectors;
  std::vector<double> t_min;
  std::uint64_t seed = 0;
  int samples = 0;
  int point_count = 8;
  int threads = 1;
  double tol = 0.0;
  double length = 1.0;
  double spread = 0.1;
  bool optimize = false;
  bool claim_kahler = false;
  bool full = false;
  std::string out;
  std::string format;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Vectord parse_arg(const std::string& text, const char* flag) {
  try {
    return parse_vector(text);
  } catch (const GeometryError&) {
    throw UsageError(std::string(flag) + ": cannot parse \"" + text + "\" as comma-separated numbers");
  }
}

std::vector<Vectord> parsed(const std::vector<std::string>& texts, const char* flag) {
  std::vector<Vectord> out;
  for (const auto& t : texts) out.push_back(parse_arg(t, flag));
  return out;
}

Vectord one(const std::vector<std::string>& texts, const char* flag) {
  if (texts.size() != 1) throw UsageError(std::string("exactly one ") + flag + " is required");
  return parse_arg(texts.front(), flag);
}

double tol_or(const Options& o, double fallback) { return o.tol > 0.0 ? o.tol : fallback; }
int samples_or(const Options& o, int fallback) { return o.samples > 0 ? o.samples : fallback; }

ReportFormat report_format(const Options& o) {
  if (o.format.empty()) return ReportFormat::json;
  if (o.format == "text") throw UsageError("this command has no text form; use json or csv");
  return parse_format(o.format);
}

// Scalar and matrix results print bare unless a format is requested.
void emit_value(const Options& o, const Json& report, const std::string& text) {
  if (o.format.empty() || o.format == "text") {
    if (o.out.empty() || o.out == "-") {
      std::cout << text << "\n";
      return;
    }
  }
  emit_report(report, std::nullopt, o.out, o.format == "csv" ? ReportFormat::csv : ReportFormat::json);
}

ConePoint<double> cone_point(const Options& o, Vectord t) {
  return o.claim_kahler ? kahler_point(std::move(t)) : volume_point(std::move(t));
}

std::vector<Vectord> anchors_for(const Options& o, const TensorFile& file) {
  auto given = parsed(o.points, "--point");
  if (!given.empty()) return given;
  if (!file.kahler_points.empty()) return file.kahler_points;
  throw UsageError("no --point given and the tensor file lists no kahler_points");
}

int run(const std::string& command, const Options& o) {
  if (command == "maass-verify") {
    const auto report = maass::maass_verify(samples_or(o, 100), o.seed);
    emit_report(to_json(report), std::nullopt, o.out, report_format(o));
    return report.pass ? 0 : 1;
  }

  const TensorFile file = load_tensor_file(o.input);
  const auto& c = file.tensor;

  if (command == "vol") {
    const Vectord t = one(o.points, "--point");
    detail::check_dimension(c, t, "point");
    const double vol = volume(c, t);
    require_positive_volume(vol);
    emit_value(o, {{"point", to_json(t)}, {"vol", vol}}, format_number(vol));
  } else if (command == "metric") {
    const Vectord t = one(o.points, "--point");
    const auto m = metric_at(c, cone_point(o, t));
    emit_value(o, {{"point", to_json(t)},
                   {"vol", m.vol},
                   {"metric", to_json(m.g)},
                   {"signature", to_json(signature_of(m.g))}},
               format_matrix(m.g));
  } else if (command == "curvature") {
    const auto curv = riemann_at(c, cone_point(o, one(o.points, "--point")));
    emit_report(to_json(curv), std::nullopt, o.out, report_format(o));
  } else if (command == "sectional") {
    const auto vs = parsed(o.vectors, "--vector");
    if (vs.size() != 2) throw UsageError("sectional needs exactly two --vector values");
    const double k = sectional(c, cone_point(o, one(o.points, "--point")), vs[0], vs[1]);
    emit_value(o, {{"u", to_json(vs[0])}, {"v", to_json(vs[1])}, {"k", k}}, format_number(k));
  } else if (command == "geodesic") {
    const auto path =
        geodesic_shoot(c, cone_point(o, one(o.points, "--point")), one(o.vectors, "--vector"), o.length,
                       tol_or(o, 1e-10));
    emit_report(to_json(path), to_table(path), o.out, report_format(o));
  } else if (command == "length-check") {
    const auto pts = parsed(o.points, "--point");
    if (pts.size() < 2) throw UsageError("length-check needs at least two --point values");
    const auto report = length_bound_check(c, pts);
    emit_report(to_json(report), std::nullopt, o.out, report_format(o));
    return report.pass ? 0 : 1;
  } else if (command == "boundary-ray") {
    Vectord alpha;
    if (!o.points.empty()) {
      alpha = one(o.points, "--point");
    } else if (!file.boundary_points.empty()) {
      alpha = file.boundary_points.front();
    } else {
      throw UsageError("no --point given and the tensor file lists no boundary_points");
    }
    Vectord omega;
    if (!o.vectors.empty()) {
      omega = one(o.vectors, "--vector");
    } else if (!file.kahler_points.empty()) {
      omega = file.kahler_points.front();
    } else {
      throw UsageError("no --vector given and the tensor file lists no kahler_points");
    }
    std::vector<double> sequence = o.t_min;
    if (sequence.empty())
      for (int k = 1; k <= samples_or(o, 8); ++k) sequence.push_back(std::pow(10.0, -k));
    const auto report = boundary_ray_study(c, alpha, omega, sequence, tol_or(o, 1e-12));
    emit_report(to_json(report), to_table(report), o.out, report_format(o));
  } else if (command == "lorentz-verify") {
    const Vectord omega0 = anchors_for(o, file).front();
    const auto model = reduce_to_standard(c, omega0);
    const int count = samples_or(o, 200);
    const auto pts = sample_positive_component(c.rank(), count, o.seed);
    const auto iso = lorentz_isometry_check(model, pts, o.seed, tol_or(o, 1e-8));
    const auto cone = full_cone_check(c, model, pts);
    Json report{{"model", to_json(model)}, {"isometry", to_json(iso)}, {"full_cone", to_json(cone)},
                {"pass", iso.pass && cone.positive_fraction == 1.0}};
    emit_report(report, std::nullopt, o.out, report_format(o));
    return report["pass"].get<bool>() ? 0 : 1;
  } else if (command == "scan") {
    const auto anchors = anchors_for(o, file);
    const auto pts = sample_cone_points(c, anchors, o.point_count, o.spread, o.seed, true);
    ScanOptions options;
    options.planes_per_point = samples_or(o, 100);
    options.optimize = o.optimize;
    options.seed = o.seed;
    options.threads = o.threads;
    const auto report = scan_sectional(c, pts, options, file.name.empty() ? o.input : file.name);
    emit_report(to_json(report, o.full), to_table(report), o.out, report_format(o));
  } else if (command == "signature") {
    auto pts = parsed(o.points, "--point");
    if (pts.empty()) {
      if (file.kahler_points.empty()) throw UsageError("no --point given and the tensor file lists no kahler_points");
      pts = sample_cone_points(c, file.kahler_points, samples_or(o, 100), o.spread, o.seed, false);
    }
    const auto report = signature_profile(c, pts, file.name.empty() ? o.input : file.name);
    emit_report(to_json(report), to_table(report), o.out, report_format(o));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hessian geometry of volume cones from intersection tensors"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_file) {
    if (needs_file) sub->add_option("tensor", o.input, "tensor JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "random seed")->default_val(0);
    sub->add_option("--out", o.out, "output path (default: standard output)");
    sub->add_option("--format", o.format, "json, csv, or text")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--tol", o.tol, "tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--samples", o.samples, "sample count")->check(CLI::PositiveNumber);
  };
  auto add_points = [&](CLI::App* sub) {
    sub->add_option("--point", o.points, "point as comma-separated coordinates; repeatable")->allow_extra_args(false);
  };
  auto add_vectors = [&](CLI::App* sub) {
    sub->add_option("--vector", o.vectors, "tangent vector as comma-separated coordinates; repeatable")
        ->allow_extra_args(false);
  };
  auto add_kahler = [&](CLI::App* sub) {
    sub->add_flag("--kahler", o.claim_kahler, "assert the point is Kahler; requires g positive-definite");
  };

  struct Spec {
    const char* name;
    const char* help;
  };
  const std::vector<Spec> specs = {
      {"vol", "volume at a point"},
      {"metric", "metric matrix at a point"},
      {"curvature", "Christoffel symbols and Riemann tensor at a point"},
      {"sectional", "sectional curvature of the plane of two vectors"},
      {"geodesic", "shoot a unit-speed geodesic"},
      {"length-check", "compare a polyline's length with the volume bound"},
      {"boundary-ray", "length study of a ray approaching the boundary"},
      {"lorentz-verify", "reduce a surface form to standard coordinates and check its isometries"},
      {"maass-verify", "matrix-model curvature identities"},
      {"scan", "sample sectional curvature over random planes"},
      {"signature", "metric signature at sample points"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& s : specs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, std::string(s.name) != "maass-verify");
    subs[s.name] = sub;
  }
  for (const char* name : {"vol", "metric", "curvature", "sectional", "geodesic", "length-check", "boundary-ray",
                           "lorentz-verify", "scan", "signature"})
    add_points(subs[name]);
  for (const char* name : {"sectional", "geodesic", "boundary-ray"}) add_vectors(subs[name]);
  for (const char* name : {"metric", "curvature", "sectional", "geodesic"}) add_kahler(subs[name]);
  subs["geodesic"]->add_option("--length", o.length, "arclength")->check(CLI::NonNegativeNumber);
  subs["boundary-ray"]->add_option("--t-min", o.t_min, "decreasing t_min values in (0, 1); repeatable");
  for (const char* name : {"scan", "signature"})
    subs[name]->add_option("--spread", o.spread, "relative perturbation of the anchors")->check(CLI::NonNegativeNumber);
  subs["scan"]->add_option("--points", o.point_count, "number of sampled points")->check(CLI::PositiveNumber);
  subs["scan"]->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  subs["scan"]->add_flag("--optimize", o.optimize, "refine the largest curvature by plane search");
  subs["scan"]->add_flag("--samples-out", o.full, "include every plane sample in the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    return run(command, o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << e.name() << "\n" << e.what() << "\n";
    return 1;
  }
}
