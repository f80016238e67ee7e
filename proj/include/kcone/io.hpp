#pragma once

#include "kcone/cone_metric.hpp"
#include "kcone/curvature.hpp"
#include "kcone/geodesics.hpp"
#include "kcone/intersection_tensor.hpp"
#include "kcone/lorentz_surface.hpp"
#include "kcone/maass_verify.hpp"
#include "kcone/scanner.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kcone {

using Json = nlohmann::ordered_json;

struct TensorFile {
  IntersectionTensor<double> tensor;
  std::string name;
  std::vector<Vectord> kahler_points;
  std::vector<Vectord> boundary_points;
  /// fields not recognised by this loader, kept verbatim
  Json extra = Json::object();
};

/// Parses the tensor document; `source` labels error messages. Syntax errors
/// report line, column and byte offset. Kahler points are validated
/// (Vol > 0, g positive-definite).
TensorFile parse_tensor_file(std::string_view text, std::string_view source = "<input>");
TensorFile load_tensor_file(const std::string& path);
IntersectionTensor<double> load_tensor(const std::string& path);

Json to_json(const TensorFile& file);
std::string serialize_tensor_file(const TensorFile& file);

/// Shortest decimal that reads back to the same double; integral values keep
/// a trailing ".0".
std::string format_number(double x);
std::string format_vector(const Vectord& v);
std::string format_matrix(const Matrixd& m);

/// Parses "1,2.5,-3".
Vectord parse_vector(std::string_view text);

Json to_json(const Vectord& v);
Json to_json(const Matrixd& m);
Json to_json(const Signature& s);
Json to_json(const CurvatureAtPoint<double>& curv);
Json to_json(const GeodesicPath& path);
Json to_json(const LengthBoundReport& report);
Json to_json(const BoundaryRayReport& report);
Json to_json(const LorentzModel& model);
Json to_json(const IsometryReport& report);
Json to_json(const FullConeReport& report);
Json to_json(const maass::TorusReport& report);
Json to_json(const maass::VerifyReport& report);
Json to_json(const PlaneSample& sample);
Json to_json(const ScanReport& report, bool include_samples = false);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table to_table(const GeodesicPath& path);
Table to_table(const BoundaryRayReport& report);
Table to_table(const ScanReport& report);

enum class ReportFormat { json, csv };

ReportFormat parse_format(std::string_view name);

std::string render_json(const Json& report);
std::string render_csv(const Table& table);

/// Writes the report to `path`, or to standard output when path is empty or
/// "-". CSV needs a table; reports without one raise InvalidArgument.
void emit_report(const Json& report, const std::optional<Table>& table, const std::string& path,
                 ReportFormat format);

}  // namespace kcone
