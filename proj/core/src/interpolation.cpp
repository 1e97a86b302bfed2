#include "sparseloc/interpolation.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "sparseloc/csv.hpp"
#include "sparseloc/predicates.hpp"

namespace sparseloc {

FieldSpec FieldSpec::over_bounds(const Rect& bounds, double spacing) {
  if (!(spacing > 0.0)) throw DomainError("field spacing must be > 0");
  FieldSpec s;
  s.origin = bounds.min;
  s.spacing = spacing;
  s.nx = static_cast<int>(std::floor(bounds.width() / spacing + 1e-9)) + 1;
  s.ny = static_cast<int>(std::floor(bounds.height() / spacing + 1e-9)) + 1;
  return s;
}

void InterpolatedField::write_csv(std::ostream& out) const {
  csv::Matrix m;
  m.rows = static_cast<std::size_t>(spec.ny);
  m.cols = static_cast<std::size_t>(spec.nx);
  m.values = values;
  csv::write_matrix(out, m);
}

ScatteredData deduplicate(std::span<const Sample> samples, Diagnostics* diag) {
  std::map<std::pair<double, double>, std::size_t> slot;
  ScatteredData out;
  std::vector<std::size_t> counts;
  for (const auto& s : samples) {
    const auto [it, inserted] = slot.try_emplace({s.x, s.y}, out.points.size());
    if (inserted) {
      out.points.push_back(s.position());
      out.values.push_back(s.rssi);
      counts.push_back(1);
    } else {
      out.values[it->second] += s.rssi;
      ++counts[it->second];
    }
  }
  std::size_t merged = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 1) {
      out.values[i] /= static_cast<double>(counts[i]);
      merged += counts[i] - 1;
    }
  }
  if (merged && diag) diag->warn("averaged " + std::to_string(merged) + " samples at duplicate positions");
  return out;
}

namespace {

void require_spread(const ScatteredData& d) {
  if (d.points.size() < 3) throw EstimationError("interpolation needs at least three distinct positions");
  for (std::size_t k = 2; k < d.points.size(); ++k)
    if (predicates::orient2d(d.points[0], d.points[1], d.points[k]) != 0) return;
  throw EstimationError("interpolation input is collinear");
}

}  // namespace

double biharmonic_green(double r) {
  if (r == 0.0) return 0.0;
  return r * r * (std::log(r) - 1.0);
}

BiharmonicSpline::BiharmonicSpline(ScatteredData data) : data_(std::move(data)) {
  require_spread(data_);
  const auto n = static_cast<Eigen::Index>(data_.points.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = biharmonic_green(distance(data_.points[static_cast<std::size_t>(i)],
                                                 data_.points[static_cast<std::size_t>(j)]));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  const Eigen::Map<const Eigen::VectorXd> w(data_.values.data(), n);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
  if (!(lu.rcond() > 1e-14)) throw EstimationError("biharmonic system is singular");
  const Eigen::VectorXd alpha = lu.solve(w);
  residual_ = (g * alpha - w).lpNorm<Eigen::Infinity>();
  if (!std::isfinite(residual_) || residual_ > 1e-6 * std::max(1.0, w.lpNorm<Eigen::Infinity>()))
    throw EstimationError("biharmonic system is singular");
  alpha_.assign(alpha.data(), alpha.data() + n);
}

double BiharmonicSpline::operator()(Vec2 p) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < alpha_.size(); ++j) sum += alpha_[j] * biharmonic_green(distance(p, data_.points[j]));
  return sum;
}

CloughTocher::CloughTocher(ScatteredData data) : data_(std::move(data)) {
  require_spread(data_);
  try {
    tri_ = delaunay_triangulate(data_.points);
  } catch (const DomainError& e) {
    throw EstimationError(std::string("degenerate triangulation: ") + e.what());
  }

  // Unique undirected edges.
  std::set<std::pair<int, int>> edges;
  for (const auto& t : tri_.triangles)
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(t[k], t[(k + 1) % 3]));

  // Each edge carries the cubic Hermite curve through its end values with the
  // end-point directional derivatives; its curvature energy is
  // 4/L^3 (a^2 + ab + b^2 - 3D(a + b) + 3D^2), a = e.g_i, b = e.g_j, D = f_j - f_i.
  const auto n = static_cast<Eigen::Index>(data_.points.size());
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);
  auto add_block = [&](int r, int c, double s, Vec2 e) {
    trip.emplace_back(2 * r, 2 * c, s * e.x * e.x);
    trip.emplace_back(2 * r, 2 * c + 1, s * e.x * e.y);
    trip.emplace_back(2 * r + 1, 2 * c, s * e.y * e.x);
    trip.emplace_back(2 * r + 1, 2 * c + 1, s * e.y * e.y);
  };
  for (auto [i, j] : edges) {
    const Vec2 e = data_.points[static_cast<std::size_t>(j)] - data_.points[static_cast<std::size_t>(i)];
    const double len = norm(e);
    const double l3 = len * len * len;
    const double df = data_.values[static_cast<std::size_t>(j)] - data_.values[static_cast<std::size_t>(i)];
    add_block(i, i, 8.0 / l3, e);
    add_block(j, j, 8.0 / l3, e);
    add_block(i, j, 4.0 / l3, e);
    add_block(j, i, 4.0 / l3, e);
    const double r = 12.0 * df / l3;
    rhs(2 * i) += r * e.x;
    rhs(2 * i + 1) += r * e.y;
    rhs(2 * j) += r * e.x;
    rhs(2 * j + 1) += r * e.y;
  }
  Eigen::SparseMatrix<double> h(2 * n, 2 * n);
  h.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(h);
  if (solver.info() != Eigen::Success) throw EstimationError("gradient estimation failed");
  const Eigen::VectorXd g = solver.solve(rhs);
  grad_.resize(data_.points.size());
  for (Eigen::Index i = 0; i < n; ++i) grad_[static_cast<std::size_t>(i)] = {g(2 * i), g(2 * i + 1)};
}

double CloughTocher::evaluate(int triangle, const std::array<double, 3>& b) const {
  const auto& v = tri_.triangles[static_cast<std::size_t>(triangle)];
  const Vec2 p1 = tri_.points[static_cast<std::size_t>(v[0])];
  const Vec2 p2 = tri_.points[static_cast<std::size_t>(v[1])];
  const Vec2 p3 = tri_.points[static_cast<std::size_t>(v[2])];
  const double f1 = data_.values[static_cast<std::size_t>(v[0])];
  const double f2 = data_.values[static_cast<std::size_t>(v[1])];
  const double f3 = data_.values[static_cast<std::size_t>(v[2])];
  const Vec2 g1 = grad_[static_cast<std::size_t>(v[0])];
  const Vec2 g2 = grad_[static_cast<std::size_t>(v[1])];
  const Vec2 g3 = grad_[static_cast<std::size_t>(v[2])];
  const Vec2 e12 = p2 - p1, e23 = p3 - p2, e31 = p1 - p3;

  const double df12 = dot(g1, e12), df21 = -dot(g2, e12);
  const double df23 = dot(g2, e23), df32 = -dot(g3, e23);
  const double df31 = dot(g3, e31), df13 = -dot(g1, e31);

  // Bezier ordinates of the three cubic sub-patches meeting at the centroid.
  const double c3000 = f1, c2100 = (df12 + 3 * c3000) / 3, c2010 = (df13 + 3 * c3000) / 3;
  const double c0300 = f2, c1200 = (df21 + 3 * c0300) / 3, c0210 = (df23 + 3 * c0300) / 3;
  const double c0030 = f3, c1020 = (df31 + 3 * c0030) / 3, c0120 = (df32 + 3 * c0030) / 3;
  const double c2001 = (c2100 + c2010 + c3000) / 3;
  const double c0201 = (c1200 + c0300 + c0210) / 3;
  const double c0021 = (c1020 + c0120 + c0030) / 3;

  // Cross-boundary derivative toward the neighbouring centroid is forced linear
  // along each edge; on the hull the direction falls back to the own centroid.
  std::array<double, 3> gk{};
  const auto& nb = tri_.neighbors[static_cast<std::size_t>(triangle)];
  for (int k = 0; k < 3; ++k) {
    if (nb[k] < 0) {
      gk[k] = -0.5;
      continue;
    }
    const auto& w = tri_.triangles[static_cast<std::size_t>(nb[k])];
    const Vec2 centroid = (1.0 / 3.0) * (tri_.points[static_cast<std::size_t>(w[0])] +
                                         tri_.points[static_cast<std::size_t>(w[1])] +
                                         tri_.points[static_cast<std::size_t>(w[2])]);
    const auto c = tri_.barycentric(triangle, centroid);
    if (k == 0)
      gk[k] = (2 * c[2] + c[1] - 1) / (2 - 3 * c[2] - 3 * c[1]);
    else if (k == 1)
      gk[k] = (2 * c[0] + c[2] - 1) / (2 - 3 * c[0] - 3 * c[2]);
    else
      gk[k] = (2 * c[1] + c[0] - 1) / (2 - 3 * c[1] - 3 * c[0]);
  }

  const double c0111 = (gk[0] * (-c0300 + 3 * c0210 - 3 * c0120 + c0030) + (-c0300 + 2 * c0210 - c0120 + c0021 + c0201)) / 2;
  const double c1011 = (gk[1] * (-c0030 + 3 * c1020 - 3 * c2010 + c3000) + (-c0030 + 2 * c1020 - c2010 + c2001 + c0021)) / 2;
  const double c1101 = (gk[2] * (-c3000 + 3 * c2100 - 3 * c1200 + c0300) + (-c3000 + 2 * c2100 - c1200 + c2001 + c0201)) / 2;

  const double c1002 = (c1101 + c1011 + c2001) / 3;
  const double c0102 = (c1101 + c0111 + c0201) / 3;
  const double c0012 = (c1011 + c0111 + c0021) / 3;
  const double c0003 = (c1002 + c0102 + c0012) / 3;

  // Split barycentrics: the sub-triangle is the one whose outer vertex has the
  // smallest coordinate; b4 weights the centroid.
  const double minval = std::min({b[0], b[1], b[2]});
  const double b1 = b[0] - minval, b2 = b[1] - minval, b3 = b[2] - minval, b4 = 3 * minval;

  return b1 * b1 * b1 * c3000 + 3 * b1 * b1 * b2 * c2100 + 3 * b1 * b1 * b3 * c2010 + 3 * b1 * b1 * b4 * c2001 +
         3 * b1 * b2 * b2 * c1200 + 6 * b1 * b2 * b4 * c1101 + 3 * b1 * b3 * b3 * c1020 + 6 * b1 * b3 * b4 * c1011 +
         3 * b1 * b4 * b4 * c1002 + b2 * b2 * b2 * c0300 + 3 * b2 * b2 * b3 * c0210 + 3 * b2 * b2 * b4 * c0201 +
         3 * b2 * b3 * b3 * c0120 + 6 * b2 * b3 * b4 * c0111 + 3 * b2 * b4 * b4 * c0102 + b3 * b3 * b3 * c0030 +
         3 * b3 * b3 * b4 * c0021 + 3 * b3 * b4 * b4 * c0012 + b4 * b4 * b4 * c0003;
}

double CloughTocher::operator()(Vec2 p) const {
  const auto loc = tri_.locate(p);
  if (!loc) return std::numeric_limits<double>::quiet_NaN();
  return evaluate(loc->triangle, loc->bary);
}

InterpolatedField interpolate_biharmonic(std::span<const Sample> samples, const FieldSpec& spec, Diagnostics* diag) {
  if (!(spec.spacing > 0.0)) throw DomainError("field spacing must be > 0");
  const BiharmonicSpline spline(deduplicate(samples, diag));
  InterpolatedField field{spec, {}};
  field.values.resize(static_cast<std::size_t>(spec.nx) * spec.ny);
  for (int j = 0; j < spec.ny; ++j)
    for (int i = 0; i < spec.nx; ++i) field.values[static_cast<std::size_t>(j) * spec.nx + i] = spline(spec.node(i, j));
  return field;
}

InterpolatedField interpolate_cubic(std::span<const Sample> samples, const FieldSpec& spec, Diagnostics* diag) {
  if (!(spec.spacing > 0.0)) throw DomainError("field spacing must be > 0");
  const CloughTocher ct(deduplicate(samples, diag));
  const Triangulation& tri = ct.triangulation();
  InterpolatedField field{spec, {}};
  field.values.assign(static_cast<std::size_t>(spec.nx) * spec.ny, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> done(field.values.size(), 0);
  constexpr double tol = 1e-12;
  for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
    const auto& v = tri.triangles[t];
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (int k : v) {
      const Vec2 p = tri.points[static_cast<std::size_t>(k)];
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    const int i0 = std::max(0, static_cast<int>(std::floor((x0 - spec.origin.x) / spec.spacing)));
    const int i1 = std::min(spec.nx - 1, static_cast<int>(std::ceil((x1 - spec.origin.x) / spec.spacing)));
    const int j0 = std::max(0, static_cast<int>(std::floor((y0 - spec.origin.y) / spec.spacing)));
    const int j1 = std::min(spec.ny - 1, static_cast<int>(std::ceil((y1 - spec.origin.y) / spec.spacing)));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const std::size_t idx = static_cast<std::size_t>(j) * spec.nx + i;
        if (done[idx]) continue;
        const auto b = tri.barycentric(static_cast<int>(t), spec.node(i, j));
        if (b[0] < -tol || b[1] < -tol || b[2] < -tol) continue;
        field.values[idx] = ct.evaluate(static_cast<int>(t), b);
        done[idx] = 1;
      }
    }
  }
  return field;
}

Estimate estimate_field_argmax(const InterpolatedField& field, std::string method_label) {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    const double v = field.values[k];
    if (std::isnan(v)) continue;
    if (!best || v > field.values[*best]) best = k;
  }
  if (!best) throw EstimationError("interpolated field has no defined node");
  const int i = static_cast<int>(*best % static_cast<std::size_t>(field.spec.nx));
  const int j = static_cast<int>(*best / static_cast<std::size_t>(field.spec.nx));
  return {std::move(method_label), field.spec.node(i, j), field.values[*best], std::nullopt};
}

}  // namespace sparseloc
