#include "hxd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "hxd/ahce.hpp"
#include "hxd/parallel.hpp"

namespace hxd {

namespace {

// Clamped uniform knot vector on [0,1]: degree+1 copies of each end.
double knot(int i, int intervals, int degree) {
  const int interior = i - degree;
  if (interior <= 0) return 0.0;
  if (interior >= intervals) return 1.0;
  return static_cast<double>(interior) / intervals;
}

// Non-zero B-spline values of `degree` at x: returns the span index `span`
// such that basis functions span-degree .. span are active.
int basis_values(double x, int intervals, int degree, double* out) {
  int cell = std::clamp(static_cast<int>(std::floor(x * intervals)), 0, intervals - 1);
  const int span = cell + degree;
  double left[4], right[4];
  out[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = x - knot(span + 1 - j, intervals, degree);
    right[j] = knot(span + j, intervals, degree) - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    out[j] = saved;
  }
  return span;
}

// Pool adjacent violators, unit weights.
void make_monotone(std::vector<double>& v) {
  std::vector<double> mean;
  std::vector<int> count;
  for (double x : v) {
    mean.push_back(x);
    count.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
      const double m = (mean[mean.size() - 2] * count[count.size() - 2] + mean.back() * count.back()) /
                       (count[count.size() - 2] + count.back());
      const int c = count[count.size() - 2] + count.back();
      mean.pop_back();
      count.pop_back();
      mean.back() = m;
      count.back() = c;
    }
  }
  std::size_t k = 0;
  for (std::size_t b = 0; b < mean.size(); ++b)
    for (int c = 0; c < count[b]; ++c) v[k++] = mean[b];
}

SplineCdf fit_margin(std::vector<double> xs, int intervals) {
  std::sort(xs.begin(), xs.end());
  if (xs.back() - xs.front() <= 0.0) throw std::invalid_argument("bsde_fit: constant coordinate");
  const int m = intervals + 3;
  const int free = m - 2;  // first and last coefficients are pinned to 0 and 1
  const double n = static_cast<double>(xs.size());

  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(free, free);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(free);
  double b[4];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double target = (static_cast<double>(i) + 0.5) / n;
    const int span = basis_values(xs[i], intervals, 3, b);
    double y = target;
    for (int r = 0; r <= 3; ++r) {
      const int idx = span - 3 + r;
      if (idx == m - 1) y -= b[r];
    }
    for (int r = 0; r <= 3; ++r) {
      const int ir = span - 3 + r - 1;
      if (ir < 0 || ir >= free) continue;
      rhs(ir) += b[r] * y;
      for (int c = 0; c <= 3; ++c) {
        const int ic = span - 3 + c - 1;
        if (ic < 0 || ic >= free) continue;
        normal(ir, ic) += b[r] * b[c];
      }
    }
  }
  // Light second-difference penalty on the full coefficient vector keeps
  // spans without data well posed.
  const double lambda = 1e-6 * n / intervals;
  auto full = [&](int k) { return k - 1; };  // full index -> free index
  for (int k = 0; k + 2 < m; ++k) {
    const int idx[3] = {k, k + 1, k + 2};
    const double w[3] = {1.0, -2.0, 1.0};
    for (int r = 0; r < 3; ++r) {
      const int ir = full(idx[r]);
      if (ir < 0 || ir >= free) continue;
      for (int c = 0; c < 3; ++c) {
        const int ic = full(idx[c]);
        const double v = lambda * w[r] * w[c];
        if (ic >= 0 && ic < free) normal(ir, ic) += v;
        else if (idx[c] == m - 1) rhs(ir) -= v;  // pinned value 1
      }
    }
  }
  const Eigen::VectorXd sol = normal.ldlt().solve(rhs);
  std::vector<double> coeffs(static_cast<std::size_t>(m));
  coeffs.front() = 0.0;
  coeffs.back() = 1.0;
  for (int k = 0; k < free; ++k) coeffs[static_cast<std::size_t>(k + 1)] = std::clamp(sol(k), 0.0, 1.0);
  make_monotone(coeffs);
  return SplineCdf(intervals, std::move(coeffs));
}

}  // namespace

double default_kde_scale(const SampleMatrix& samples) {
  if (samples.rows() < 2) throw std::invalid_argument("default_kde_scale: at least two observations are required");
  double total = 0.0;
  const double n = static_cast<double>(samples.rows());
  for (std::size_t j = 0; j < samples.dim(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < samples.rows(); ++i) mean += samples(i, j);
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < samples.rows(); ++i) ss += (samples(i, j) - mean) * (samples(i, j) - mean);
    total += std::sqrt(ss / (n - 1.0));
  }
  return total / static_cast<double>(samples.dim());
}

KdeModel kde_fit(const SampleMatrix& samples, double bandwidth_scale, KdeBandwidthRule rule) {
  if (samples.rows() < 2) throw std::invalid_argument("kde_fit: at least two observations are required");
  if (samples.dim() < 1) throw std::invalid_argument("kde_fit: observations need at least one coordinate");
  if (!(bandwidth_scale > 0.0)) throw std::invalid_argument("kde_fit: bandwidth scale must be > 0");
  const double n = static_cast<double>(samples.rows());
  const double d = static_cast<double>(samples.dim());
  const double rate = rule == KdeBandwidthRule::Standard ? std::pow(n, -1.0 / (d + 4.0)) : std::pow(n, 4.0 / d);
  return KdeModel{samples, bandwidth_scale * rate};
}

double kde_eval(const KdeModel& model, Point x) {
  const SampleMatrix& s = model.samples;
  if (x.size() != s.dim()) throw std::invalid_argument("kde_eval: dimension mismatch");
  const double h = model.bandwidth;
  const double inv2h2 = 0.5 / (h * h);
  double total = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double q = 0.0;
    for (std::size_t j = 0; j < s.dim(); ++j) {
      const double u = x[j] - s(i, j);
      q += u * u;
    }
    total += std::exp(-q * inv2h2);
  }
  const double norm = std::pow(h * std::sqrt(2.0 * std::numbers::pi), static_cast<double>(s.dim()));
  return total / (static_cast<double>(s.rows()) * norm);
}

std::vector<double> kde_eval_many(const KdeModel& model, const SampleMatrix& points) {
  std::vector<double> out(points.rows());
  parallel_for(points.rows(), [&](std::size_t i) { out[i] = kde_eval(model, points.row(i)); });
  return out;
}

SplineCdf::SplineCdf(int intervals, std::vector<double> coefficients)
    : intervals_(intervals), coeffs_(std::move(coefficients)) {
  if (intervals_ < 1) throw std::invalid_argument("SplineCdf: need at least one interval");
  if (coeffs_.size() != static_cast<std::size_t>(intervals_ + 3))
    throw std::invalid_argument("SplineCdf: expected intervals + 3 coefficients");
  for (std::size_t i = 0; i + 1 < coeffs_.size(); ++i) {
    const int k = static_cast<int>(i);
    const double width = knot(k + 4, intervals_, 3) - knot(k + 1, intervals_, 3);
    deriv_coeffs_.push_back(3.0 * (coeffs_[i + 1] - coeffs_[i]) / width);
  }
}

double SplineCdf::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double b[4];
  const int span = basis_values(x, intervals_, 3, b);
  double v = 0.0;
  for (int r = 0; r <= 3; ++r) v += coeffs_[static_cast<std::size_t>(span - 3 + r)] * b[r];
  return v;
}

double SplineCdf::pdf(double x) const {
  if (x < 0.0 || x > 1.0) return 0.0;
  // F' is a quadratic spline on the knot vector without its end copies
  double b[3];
  const int span = basis_values(x, intervals_, 2, b);
  double v = 0.0;
  for (int r = 0; r <= 2; ++r) v += deriv_coeffs_[static_cast<std::size_t>(span - 2 + r)] * b[r];
  return v;
}

BsdeModel bsde_fit(const SampleMatrix& samples, std::optional<int> intervals) {
  if (samples.rows() < 4) throw std::invalid_argument("bsde_fit: at least four observations are required");
  check_samples(samples);
  const int k = intervals.value_or(static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples.rows())))));
  if (k < 1) throw std::invalid_argument("bsde_fit: need at least one interval");
  BsdeModel model;
  for (std::size_t j = 0; j < samples.dim(); ++j) {
    std::vector<double> xs(samples.rows());
    for (std::size_t i = 0; i < samples.rows(); ++i) xs[i] = samples(i, j);
    model.margins.push_back(fit_margin(std::move(xs), k));
  }
  return model;
}

double bsde_eval(const BsdeModel& model, Point x) {
  if (x.size() != model.margins.size()) throw std::invalid_argument("bsde_eval: dimension mismatch");
  double p = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) p *= model.margins[j].pdf(x[j]);
  return p;
}

std::vector<double> bsde_eval_many(const BsdeModel& model, const SampleMatrix& points) {
  std::vector<double> out(points.rows());
  parallel_for(points.rows(), [&](std::size_t i) { out[i] = bsde_eval(model, points.row(i)); });
  return out;
}

}  // namespace hxd
