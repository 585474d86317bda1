#include "edgesync/bho.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace edgesync {

void SearchBox::validate() const {
  for (std::size_t d = 0; d < lo.size(); ++d) {
    if (!(lo[d] < hi[d]))
      throw ValidationError("search box bounds must satisfy lower < upper");
  }
}

HyperParams SearchBox::to_params(const Eigen::Vector3d& unit) const {
  auto span = [&](int d) { return lo[static_cast<std::size_t>(d)] +
                                  unit[d] * (hi[static_cast<std::size_t>(d)] -
                                             lo[static_cast<std::size_t>(d)]); };
  HyperParams h;
  h.learning_rate = std::pow(10.0, span(0));
  h.momentum = span(1);
  h.weight_decay = std::pow(10.0, span(2));
  return h;
}

Eigen::Vector3d SearchBox::to_unit(const HyperParams& h) const {
  auto unit = [&](double v, int d) {
    const double u = (v - lo[static_cast<std::size_t>(d)]) /
                     (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]);
    return std::clamp(u, 0.0, 1.0);
  };
  return {unit(std::log10(h.learning_rate), 0), unit(h.momentum, 1),
          unit(std::log10(h.weight_decay), 2)};
}

bool SearchBox::contains(const HyperParams& h) const {
  const double eps = 1e-12;
  return std::log10(h.learning_rate) >= lo[0] - eps &&
         std::log10(h.learning_rate) <= hi[0] + eps &&
         h.momentum >= lo[1] - eps && h.momentum <= hi[1] + eps &&
         std::log10(h.weight_decay) >= lo[2] - eps &&
         std::log10(h.weight_decay) <= hi[2] + eps;
}

void EiConfig::validate() const {
  if (candidate_count < 1) throw ValidationError("candidate_count must be >= 1");
  if (init_points < 1) throw ValidationError("init_points must be >= 1");
  if (max_iters < 0) throw ValidationError("max_iters must be >= 0");
  if (!(improvement_threshold > 0.0))
    throw ValidationError("improvement_threshold must be > 0");
  if (!(xi >= 0.0)) throw ValidationError("xi must be non-negative");
  if (!(gp_length_scale > 0.0) || !(gp_noise > 0.0))
    throw ValidationError("gp_length_scale and gp_noise must be > 0");
}

namespace {

double kernel_value(const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b,
                    const Eigen::VectorXd& length_scales) {
  const Eigen::ArrayXd scaled =
      (a - b).array() / length_scales.array();
  return std::exp(-0.5 * scaled.square().sum());
}

}  // namespace

GpSurrogate GpSurrogate::fit(Eigen::MatrixXd points,
                             const Eigen::VectorXd& values,
                             const Eigen::VectorXd& length_scales,
                             double noise) {
  if (points.rows() < 1)
    throw ValidationError("GP fit needs at least one observation");
  if (points.rows() != values.size())
    throw ValidationError("GP fit: point/value count mismatch");
  if (length_scales.size() != points.cols())
    throw ValidationError("GP fit: length scale dimension mismatch");

  GpSurrogate gp;
  gp.points_ = std::move(points);
  gp.length_scales_ = length_scales;
  gp.noise_ = noise;
  gp.value_mean_ = values.mean();
  const double var =
      (values.array() - gp.value_mean_).square().sum() /
      static_cast<double>(values.size());
  const double sd = std::sqrt(var);
  gp.value_scale_ = sd > 1e-12 ? sd : 1.0;  // constant objectives stay sane
  gp.values_std_ = (values.array() - gp.value_mean_) / gp.value_scale_;

  const Eigen::Index n = gp.points_.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0 + noise;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      k(i, j) = k(j, i) =
          kernel_value(gp.points_.row(i), gp.points_.row(j), length_scales);
    }
  }
  gp.llt_.compute(k);
  if (gp.llt_.info() != Eigen::Success)
    throw ValidationError(
        "GP kernel factorization failed; increase the observation noise floor");
  gp.alpha_ = gp.llt_.solve(gp.values_std_);
  return gp;
}

GpSurrogate GpSurrogate::fit(Eigen::MatrixXd points,
                             const Eigen::VectorXd& values,
                             double length_scale, double noise) {
  const Eigen::Index dim = points.cols();
  return fit(std::move(points), values,
             Eigen::VectorXd::Constant(dim, length_scale), noise);
}

Eigen::VectorXd GpSurrogate::kernel_row(
    const Eigen::Ref<const Eigen::VectorXd>& q) const {
  Eigen::VectorXd k(points_.rows());
  for (Eigen::Index i = 0; i < points_.rows(); ++i)
    k[i] = kernel_value(points_.row(i), q, length_scales_);
  return k;
}

GpPosterior gp_posterior(const GpSurrogate& surrogate,
                         const Eigen::Ref<const Eigen::VectorXd>& query) {
  if (query.size() != surrogate.dim())
    throw ValidationError("gp_posterior: query dimension mismatch");
  const Eigen::VectorXd k_star = surrogate.kernel_row(query);
  const Eigen::VectorXd v = surrogate.factorization().solve(k_star);
  GpPosterior post;
  post.mean = k_star.dot(surrogate.alpha());
  post.variance = std::max(0.0, 1.0 - k_star.dot(v));
  return post;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }
double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

}  // namespace

double expected_improvement(double mean, double stddev, double f_best,
                            double xi) {
  const double margin = mean - f_best - xi;
  if (!(stddev > 0.0)) return std::max(margin, 0.0);
  const double z = margin / stddev;
  return std::max(0.0, margin * normal_cdf(z) + stddev * normal_pdf(z));
}

double expected_improvement(const GpSurrogate& surrogate,
                            const Eigen::Ref<const Eigen::VectorXd>& query,
                            double f_best, double xi) {
  const GpPosterior post = gp_posterior(surrogate, query);
  return expected_improvement(post.mean, std::sqrt(post.variance), f_best, xi);
}

namespace {

struct ObjectiveLog {
  std::vector<UnitObservation> history;
  double best_value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_point;

  bool any_finite() const { return best_point.size() > 0; }

  void add(const Eigen::VectorXd& point, double value) {
    const bool finite = std::isfinite(value);
    history.push_back({point, value, finite});
    if (finite && (!any_finite() || value > best_value)) {
      best_value = value;
      best_point = point;
    }
  }

  // Values as the surrogate sees them: non-finite entries replaced by the
  // worst finite value observed so far (or zero before any finite value).
  Eigen::VectorXd surrogate_values() const {
    double worst = 0.0;
    bool have = false;
    for (const auto& o : history) {
      if (o.finite && (!have || o.value < worst)) {
        worst = o.value;
        have = true;
      }
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(history.size()));
    for (std::size_t i = 0; i < history.size(); ++i)
      v[static_cast<Eigen::Index>(i)] =
          history[i].finite ? history[i].value : worst;
    return v;
  }

  Eigen::MatrixXd surrogate_points(int dim) const {
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(history.size()), dim);
    for (std::size_t i = 0; i < history.size(); ++i)
      pts.row(static_cast<Eigen::Index>(i)) = history[i].point.transpose();
    return pts;
  }
};

}  // namespace

UnitOptimizeResult optimize_unit(
    const std::function<double(const Eigen::VectorXd&)>& objective, int dim,
    const EiConfig& cfg, RngSeed seed,
    const std::vector<Eigen::VectorXd>& initial_guesses) {
  cfg.validate();
  if (dim < 1) throw ValidationError("optimize_unit: dim must be >= 1");

  Rng rng(split_seed(seed, "bho"));
  ObjectiveLog log;

  for (const Eigen::VectorXd& g : initial_guesses) {
    if (g.size() != dim)
      throw ValidationError("optimize_unit: initial guess dimension mismatch");
    log.add(g, objective(g));
  }

  // Latin hypercube start: one sample per stratum and dimension.
  {
    const int n = cfg.init_points;
    std::vector<std::vector<int>> strata(static_cast<std::size_t>(dim));
    for (auto& perm : strata) {
      perm.resize(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(perm);
    }
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd p(dim);
      for (int d = 0; d < dim; ++d)
        p[d] = (strata[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] +
                rng.uniform()) /
               static_cast<double>(n);
      log.add(p, objective(p));
    }
  }

  // best-so-far trace; entry 0 is the post-initialization best, then one
  // entry per BO iteration
  std::vector<double> best_trace{log.any_finite() ? log.best_value : 0.0};
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    GpSurrogate gp = [&] {
      double noise = cfg.gp_noise;
      for (int attempt = 0;; ++attempt, noise *= 10.0) {
        try {
          return GpSurrogate::fit(log.surrogate_points(dim),
                                  log.surrogate_values(), cfg.gp_length_scale,
                                  noise);
        } catch (const ValidationError&) {
          if (attempt >= 3) throw;
        }
      }
    }();

    const double f_best_std =
        log.any_finite() ? (log.best_value - gp.value_mean()) / gp.value_scale()
                         : 0.0;

    Eigen::VectorXd best_candidate(dim);
    double best_ei = -1.0;
    for (int c = 0; c < cfg.candidate_count; ++c) {
      Eigen::VectorXd p(dim);
      for (int d = 0; d < dim; ++d) p[d] = rng.uniform();
      const double ei = expected_improvement(gp, p, f_best_std, cfg.xi);
      if (ei > best_ei) {
        best_ei = ei;
        best_candidate = p;
      }
    }

    log.add(best_candidate, objective(best_candidate));
    best_trace.push_back(log.any_finite() ? log.best_value : 0.0);

    const std::size_t t = best_trace.size() - 1;  // BO iterations so far
    if (t >= 5 &&
        best_trace[t] - best_trace[t - 5] < cfg.improvement_threshold) {
      break;  // best value stalled across the last 5 iterations
    }
  }

  UnitOptimizeResult out;
  out.history = std::move(log.history);
  if (log.any_finite()) {
    out.best_point = log.best_point;
    out.best_value = log.best_value;
  } else {
    out.best_point = Eigen::VectorXd::Constant(dim, 0.5);
    out.best_value = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

OptimizeResult optimize(
    const std::function<double(const HyperParams&)>& objective,
    const SearchBox& box, const EiConfig& cfg, RngSeed seed,
    const std::vector<HyperParams>& initial_guesses) {
  box.validate();
  std::vector<Eigen::VectorXd> unit_guesses;
  unit_guesses.reserve(initial_guesses.size());
  for (const HyperParams& h : initial_guesses)
    unit_guesses.push_back(box.to_unit(h));

  const UnitOptimizeResult unit = optimize_unit(
      [&](const Eigen::VectorXd& u) {
        return objective(box.to_params(Eigen::Vector3d(u[0], u[1], u[2])));
      },
      3, cfg, seed, unit_guesses);

  OptimizeResult out;
  out.best = box.to_params(
      Eigen::Vector3d(unit.best_point[0], unit.best_point[1], unit.best_point[2]));
  out.best_value = unit.best_value;
  out.history.reserve(unit.history.size());
  for (const UnitObservation& o : unit.history) {
    out.history.push_back(
        {box.to_params(Eigen::Vector3d(o.point[0], o.point[1], o.point[2])),
         o.value, o.finite});
  }
  return out;
}

}  // namespace edgesync
