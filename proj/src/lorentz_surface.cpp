#include "kcone/lorentz_surface.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

namespace kcone {

double LorentzModel::q(const Vectord& s) const {
  return s.dot(eta.asDiagonal() * s);
}

Matrixd bilinear_gram(const IntersectionTensor<double>& c) {
  if (c.degree() != 2) throw GeometryError(ErrorKind::InvalidArgument, "surface model needs a degree-2 tensor");
  const int N = c.rank();
  Matrixd m = Matrixd::Zero(N, N);
  for (const auto& e : c.entries()) {
    m(e.index[0], e.index[1]) = e.value;
    m(e.index[1], e.index[0]) = e.value;
  }
  return m;
}

IntersectionTensor<double> standard_quadratic_tensor(int dimension) {
  std::vector<IntersectionTensor<double>::Entry> entries;
  entries.push_back({{0, 0}, 2.0});
  for (int j = 1; j < dimension; ++j) entries.push_back({{j, j}, -2.0});
  return IntersectionTensor<double>(2, dimension, std::move(entries));
}

LorentzModel reduce_to_standard(const IntersectionTensor<double>& c, const Vectord& omega0) {
  LorentzModel model;
  model.gram = bilinear_gram(c);
  const int N = c.rank();
  if (omega0.size() != N) throw GeometryError(ErrorKind::DimensionMismatch, "omega0 does not match the tensor rank");
  const double vol0 = volume(c, omega0);
  require_positive_volume(vol0);

  model.dimension = N;
  model.signature = signature_of(model.gram);
  if (!(model.signature == Signature{1, N - 1, 0}))
    throw GeometryError(ErrorKind::WrongSignature, "intersection form does not have signature (1, N-1)");

  model.basis.resize(N, N);
  model.basis.col(0) = omega0 / std::sqrt(vol0);
  if (N > 1) {
    // Euclidean-orthonormal basis of the M-orthogonal complement of omega0,
    // then diagonalize the (negative-definite) restricted form.
    const Vectord normal = model.gram * model.basis.col(0);
    Eigen::HouseholderQR<Matrixd> qr(normal);
    const Matrixd complement = Matrixd(qr.householderQ()).rightCols(N - 1);
    const Matrixd restricted = complement.transpose() * model.gram * complement;
    Eigen::SelfAdjointEigenSolver<Matrixd> eig(restricted);
    const Vectord lambda = eig.eigenvalues();
    if (!(lambda.maxCoeff() < 0.0))
      throw GeometryError(ErrorKind::WrongSignature, "form is not negative-definite on primitive classes");
    for (int j = 0; j < N - 1; ++j)
      model.basis.col(j + 1) = complement * eig.eigenvectors().col(j) * std::sqrt(2.0 / -lambda[j]);
  }
  model.inverse_basis = model.basis.partialPivLu().inverse();
  model.eta = Vectord::Constant(N, -1.0);
  model.eta[0] = 1.0;
  return model;
}

Matrixd random_lorentz_element(int dimension, std::mt19937_64& rng, double spread) {
  std::normal_distribution<double> gauss(0.0, spread);
  Matrixd a = Matrixd::Zero(dimension, dimension);
  for (int i = 0; i < dimension; ++i)
    for (int j = i + 1; j < dimension; ++j) {
      a(i, j) = gauss(rng);
      a(j, i) = -a(i, j);
    }
  Vectord eta = Vectord::Constant(dimension, -1.0);
  eta[0] = 1.0;
  const Matrixd generator = eta.asDiagonal() * a;
  return generator.exp();
}

std::vector<Vectord> sample_positive_component(int dimension, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Vectord> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vectord s(dimension);
    s[0] = std::exp(0.5 * gauss(rng));
    if (dimension > 1) {
      Vectord dir(dimension - 1);
      for (int j = 0; j < dimension - 1; ++j) dir[j] = gauss(rng);
      const double radius = 0.95 * s[0] * std::pow(uniform(rng), 1.0 / (dimension - 1));
      s.tail(dimension - 1) = radius * dir.normalized();
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

void accumulate_isometry(const IntersectionTensor<double>& q, const LorentzModel& model, const Vectord& s,
                         const Matrixd& lorentz, double dilation, IsometryReport& report) {
  const Matrixd element = dilation * lorentz;
  const Matrixd eta = model.eta.asDiagonal();
  report.max_group_residual =
      std::max(report.max_group_residual, (lorentz.transpose() * eta * lorentz - eta).cwiseAbs().maxCoeff());
  ++report.samples;
  const Vectord image = element * s;
  if (!(volume(q, image) > 0.0)) {
    // not a symmetry of the cone at all
    report.max_metric_residual = std::numeric_limits<double>::infinity();
    return;
  }
  const Matrixd g = metric_at(q, volume_point<double>(s)).g;
  const Matrixd moved = metric_at(q, volume_point<double>(image)).g;
  const Matrixd pulled = element.transpose() * moved * element;
  report.max_metric_residual =
      std::max(report.max_metric_residual, (pulled - g).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
}

}  // namespace

IsometryReport lorentz_isometry_check(const LorentzModel& model, std::span<const Vectord> samples,
                                      std::uint64_t seed, double tolerance) {
  const auto q = standard_quadratic_tensor(model.dimension);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  IsometryReport report;
  for (const auto& s : samples) {
    const Matrixd lorentz = random_lorentz_element(model.dimension, rng);
    accumulate_isometry(q, model, s, lorentz, std::exp(0.3 * gauss(rng)), report);
  }
  report.pass = report.samples > 0 && report.max_metric_residual < tolerance && report.max_group_residual < tolerance;
  return report;
}

IsometryReport lorentz_isometry_check(const LorentzModel& model, std::span<const Vectord> samples,
                                      const Matrixd& lorentz, double dilation, double tolerance) {
  if (lorentz.rows() != model.dimension || lorentz.cols() != model.dimension)
    throw GeometryError(ErrorKind::ShapeMismatch, "group element does not match the model dimension");
  const auto q = standard_quadratic_tensor(model.dimension);
  IsometryReport report;
  for (const auto& s : samples) accumulate_isometry(q, model, s, lorentz, dilation, report);
  report.pass = report.samples > 0 && report.max_metric_residual < tolerance && report.max_group_residual < tolerance;
  return report;
}

FullConeReport full_cone_check(const IntersectionTensor<double>& c, const LorentzModel& model,
                               std::span<const Vectord> samples) {
  FullConeReport report;
  int positive = 0;
  for (const auto& s : samples) {
    if (!(model.q(s) > 0.0 && s[0] > 0.0))
      throw GeometryError(ErrorKind::InvalidArgument, "sample lies outside the positive component");
    const Matrixd g = metric_at(c, volume_point<double>(model.to_original(s))).g;
    if (is_positive_definite(g)) ++positive;
    else report.failures.push_back(s);
    ++report.samples;
  }
  report.positive_fraction = report.samples > 0 ? double(positive) / report.samples : 0.0;
  return report;
}

}  // namespace kcone
