#include "edgesync/drift_stream.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace edgesync {

void FeatureStream::validate() const {
  if (classes < 2 || dim < 1) throw ValidationError("stream: bad dimensions");
  if (!(rate_hz > 0.0)) throw ValidationError("stream: rate must be positive");
  const std::size_t n = times.size();
  if (labels.size() != n || static_cast<std::size_t>(features.rows()) != n)
    throw ValidationError("stream: column lengths disagree");
  if (features.cols() != dim) throw ValidationError("stream: feature width != D");
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= classes)
      throw ValidationError("stream: label out of range at record " +
                            std::to_string(i + 1));
    if (i > 0 && !(times[i] > times[i - 1]))
      throw ValidationError("stream: non-increasing timestamp at record " +
                            std::to_string(i + 1));
  }
}

double DriftSchedule::total_duration() const {
  double total = 0.0;
  for (const DriftPhase& p : phases) total += p.duration_s;
  return total;
}

void DriftSchedule::validate() const {
  if (classes < 2 || dim < 1) throw ValidationError("schedule: bad dimensions");
  if (!(rate_hz > 0.0)) throw ValidationError("schedule: rate must be positive");
  if (phases.empty()) throw ValidationError("schedule: no phases");
  for (const DriftPhase& p : phases) {
    if (!(p.duration_s > 0.0))
      throw ValidationError("schedule: phase durations must be positive");
    if (p.class_means.rows() != classes || p.class_means.cols() != dim)
      throw ValidationError("schedule: class mean shape mismatch");
    if (p.class_priors.size() != classes)
      throw ValidationError("schedule: prior length mismatch");
    if (std::abs(p.class_priors.sum() - 1.0) > 1e-9 ||
        p.class_priors.minCoeff() < 0.0)
      throw ValidationError("schedule: priors must be a distribution");
    if (p.cov_scale < 0.0)
      throw ValidationError("schedule: cov_scale must be non-negative");
    if (p.global_shift.size() != dim)
      throw ValidationError("schedule: shift length mismatch");
    if (p.blend_in_s < 0.0 || p.blend_in_s > p.duration_s)
      throw ValidationError("schedule: blend_in_s outside [0, duration]");
  }
}

DriftPhase DriftSchedule::params_at(double t) const {
  double start = 0.0;
  std::size_t j = 0;
  for (; j + 1 < phases.size(); ++j) {
    if (t < start + phases[j].duration_s) break;
    start += phases[j].duration_s;
  }
  const DriftPhase& cur = phases[j];
  const double local = t - start;
  if (j == 0 || cur.blend_in_s <= 0.0 || local >= cur.blend_in_s) return cur;

  const DriftPhase& prev = phases[j - 1];
  const double w = local / cur.blend_in_s;
  DriftPhase eff = cur;
  eff.class_means = (1.0 - w) * prev.class_means + w * cur.class_means;
  eff.class_priors = (1.0 - w) * prev.class_priors + w * cur.class_priors;
  eff.global_shift = (1.0 - w) * prev.global_shift + w * cur.global_shift;
  eff.cov_scale = (1.0 - w) * prev.cov_scale + w * cur.cov_scale;
  return eff;
}

FeatureStream generate(const DriftSchedule& schedule, RngSeed seed) {
  schedule.validate();
  const double duration = schedule.total_duration();
  const auto n = static_cast<std::size_t>(duration * schedule.rate_hz + 1e-9);
  const double dt = 1.0 / schedule.rate_hz;

  FeatureStream stream;
  stream.classes = schedule.classes;
  stream.dim = schedule.dim;
  stream.rate_hz = schedule.rate_hz;
  stream.name = schedule.name;
  stream.times.resize(n);
  stream.labels.resize(n);
  stream.features.resize(static_cast<Eigen::Index>(n), schedule.dim);

  Rng rng(split_seed(seed, "drift-stream"));
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k + 1) * dt;
    const DriftPhase eff = schedule.params_at(std::min(t, duration - 1e-12));

    const double u = rng.uniform();
    int label = schedule.classes - 1;
    double cum = 0.0;
    for (int c = 0; c < schedule.classes; ++c) {
      cum += eff.class_priors[c];
      if (u < cum) {
        label = c;
        break;
      }
    }

    Eigen::VectorXd x = eff.class_means.row(label).transpose() + eff.global_shift;
    for (int d = 0; d < schedule.dim; ++d) x[d] += eff.cov_scale * rng.normal();

    stream.times[k] = t;
    stream.labels[k] = label;
    stream.features.row(static_cast<Eigen::Index>(k)) = x.transpose();
  }
  return stream;
}

void save_stream(const FeatureStream& stream, const std::string& path) {
  stream.validate();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot open " + tmp + " for writing");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", stream.rate_hz);
    out << "EDGESYNC-STREAM v1 C=" << stream.classes << " D=" << stream.dim
        << " rate=" << buf << " n=" << stream.size() << "\n";
    for (std::size_t i = 0; i < stream.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", stream.times[i]);
      out << buf << ',' << stream.labels[i];
      for (int d = 0; d < stream.dim; ++d) {
        std::snprintf(buf, sizeof buf, "%.17g",
                      stream.features(static_cast<Eigen::Index>(i), d));
        out << ',' << buf;
      }
      out << '\n';
    }
    if (!out) throw ValidationError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

FeatureStream load_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open stream file " + path);

  std::string header;
  if (!std::getline(in, header)) parse_fail(path, 1, "empty file");

  FeatureStream stream;
  std::size_t expected = 0;
  {
    std::istringstream hs(header);
    std::string magic, version, ctok, dtok, rtok, ntok;
    hs >> magic >> version >> ctok >> dtok >> rtok >> ntok;
    if (magic != "EDGESYNC-STREAM" || version != "v1" ||
        ctok.rfind("C=", 0) != 0 || dtok.rfind("D=", 0) != 0 ||
        rtok.rfind("rate=", 0) != 0 || ntok.rfind("n=", 0) != 0)
      parse_fail(path, 1, "bad stream header");
    try {
      stream.classes = std::stoi(ctok.substr(2));
      stream.dim = std::stoi(dtok.substr(2));
      stream.rate_hz = std::stod(rtok.substr(5));
      expected = std::stoul(ntok.substr(2));
    } catch (const std::exception&) {
      parse_fail(path, 1, "unparseable header field");
    }
  }
  if (stream.classes < 2 || stream.dim < 1 || !(stream.rate_hz > 0))
    parse_fail(path, 1, "bad header values");

  stream.times.reserve(expected);
  stream.labels.reserve(expected);
  stream.features.resize(static_cast<Eigen::Index>(expected), stream.dim);

  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (stream.times.size() == expected)
      parse_fail(path, lineno, "more records than header count");

    std::istringstream ls(line);
    std::string field;
    if (!std::getline(ls, field, ',')) parse_fail(path, lineno, "missing time");
    double t = 0.0;
    int label = 0;
    try {
      t = std::stod(field);
      if (!std::getline(ls, field, ',')) parse_fail(path, lineno, "missing label");
      label = std::stoi(field);
    } catch (const std::exception&) {
      parse_fail(path, lineno, "unparseable record");
    }
    if (label < 0 || label >= stream.classes)
      parse_fail(path, lineno, "label out of range [0," +
                                   std::to_string(stream.classes) + ")");
    if (!stream.times.empty() && !(t > stream.times.back()))
      parse_fail(path, lineno, "non-increasing timestamp");

    const auto row = static_cast<Eigen::Index>(stream.times.size());
    for (int d = 0; d < stream.dim; ++d) {
      if (!std::getline(ls, field, ','))
        parse_fail(path, lineno, "record has fewer than D features");
      try {
        stream.features(row, d) = std::stod(field);
      } catch (const std::exception&) {
        parse_fail(path, lineno, "unparseable feature value");
      }
    }
    if (std::getline(ls, field, ','))
      parse_fail(path, lineno, "record has more than D features");

    stream.times.push_back(t);
    stream.labels.push_back(label);
  }
  if (stream.times.size() != expected)
    parse_fail(path, lineno,
               "truncated stream: expected " + std::to_string(expected) +
                   " records, found " + std::to_string(stream.times.size()));
  stream.validate();
  return stream;
}

namespace {

// Geometry snapshots are fixed constants of the catalog: the tag picks the
// deterministic draw, independent of the caller's seed.
Eigen::MatrixXd geometry(const std::string& tag, int classes, int dim,
                         double radius) {
  Rng rng(split_seed(RngSeed{0x5EED5CA7A106ULL}, tag));
  Eigen::MatrixXd means(classes, dim);
  for (int c = 0; c < classes; ++c) {
    Eigen::VectorXd g(dim);
    for (int d = 0; d < dim; ++d) g[d] = rng.normal();
    means.row(c) = (radius / g.norm()) * g.transpose();
  }
  return means;
}

Eigen::MatrixXd rotate_classes(const Eigen::MatrixXd& means, int by) {
  Eigen::MatrixXd out(means.rows(), means.cols());
  for (Eigen::Index c = 0; c < means.rows(); ++c)
    out.row(c) = means.row((c + by) % means.rows());
  return out;
}

constexpr double kMeanRadius = 2.4;
constexpr double kCovScale = 1.0;

DriftPhase make_phase(double duration, Eigen::MatrixXd means,
                      Eigen::VectorXd priors, int dim, double blend = 0.0,
                      double cov = kCovScale) {
  DriftPhase p;
  p.duration_s = duration;
  p.class_means = std::move(means);
  p.cov_scale = cov;
  p.class_priors = std::move(priors);
  p.global_shift = Eigen::VectorXd::Zero(dim);
  p.blend_in_s = blend;
  return p;
}

Eigen::VectorXd uniform_priors(int classes) {
  return Eigen::VectorXd::Constant(classes, 1.0 / classes);
}

Eigen::VectorXd skewed_priors(int classes, int favored) {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(classes, 0.3 / (classes - 1));
  p[favored % classes] = 0.7;
  return p / p.sum();
}

}  // namespace

const std::vector<std::string>& benchmark_schedule_names() {
  static const std::vector<std::string> names{
      "slow_drift", "fast_drift", "abrupt_shift", "class_imbalance_shift",
      "stationary"};
  return names;
}

namespace {

// stagger in [0,1) shifts a schedule's phase timing so a fleet built from the
// same regime drifts asynchronously, the way distinct cameras would.
// stagger 0 is the canonical catalog schedule.
DriftSchedule staggered_schedule(const std::string& name, double duration_s,
                                 int classes, int dim, double stagger) {
  if (!(duration_s > 0.0))
    throw ValidationError("schedule duration must be positive");
  if (stagger < 0.0 || stagger >= 1.0)
    throw ValidationError("schedule stagger must lie in [0,1)");
  DriftSchedule s;
  s.classes = classes;
  s.dim = dim;
  s.name = name;
  const Eigen::VectorXd uni = uniform_priors(classes);

  if (name == "stationary") {
    s.phases.push_back(make_phase(
        duration_s, geometry("stationary/0", classes, dim, kMeanRadius), uni,
        dim));
  } else if (name == "slow_drift") {
    const int n = 5;
    const double seg = duration_s / n;
    const int rot = static_cast<int>(stagger * n);
    for (int j = 0; j < n; ++j) {
      s.phases.push_back(make_phase(
          seg,
          geometry("slow/" + std::to_string((j + rot) % n), classes, dim,
                   kMeanRadius),
          uni, dim, j == 0 ? 0.0 : seg));
    }
  } else if (name == "fast_drift") {
    const int n = 10;
    const double seg = duration_s / n;
    const int rot = static_cast<int>(stagger * n);
    for (int j = 0; j < n; ++j) {
      s.phases.push_back(make_phase(
          seg,
          geometry("fast/" + std::to_string((j + rot) % n), classes, dim,
                   kMeanRadius),
          uni, dim, j == 0 ? 0.0 : seg));
    }
  } else if (name == "abrupt_shift") {
    const Eigen::MatrixXd base =
        geometry("abrupt/0", classes, dim, kMeanRadius);
    const double cut = (0.3 + 0.4 * stagger) * duration_s;
    s.phases.push_back(make_phase(cut, base, uni, dim));
    s.phases.push_back(
        make_phase(duration_s - cut, rotate_classes(base, 1), uni, dim));
  } else if (name == "class_imbalance_shift") {
    const Eigen::MatrixXd base =
        geometry("imbalance/0", classes, dim, kMeanRadius);
    const double seg = duration_s / 3.0;
    const int rot = static_cast<int>(stagger * 3.0);
    const Eigen::VectorXd priors[3] = {uni, skewed_priors(classes, 2),
                                       skewed_priors(classes, 5)};
    for (int j = 0; j < 3; ++j)
      s.phases.push_back(make_phase(seg, base, priors[(j + rot) % 3], dim));
  } else {
    throw ValidationError("unknown schedule name: " + name);
  }
  return s;
}

}  // namespace

DriftSchedule benchmark_schedule(const std::string& name, double duration_s,
                                 int classes, int dim) {
  return staggered_schedule(name, duration_s, classes, dim, 0.0);
}

std::vector<FeatureStream> standard_benchmark_suite(RngSeed seed,
                                                    double duration_s,
                                                    int classes, int dim) {
  std::vector<FeatureStream> streams;
  for (const std::string& name : benchmark_schedule_names()) {
    streams.push_back(generate(benchmark_schedule(name, duration_s, classes, dim),
                               split_seed(seed, "suite/" + name)));
  }
  return streams;
}

DriftSchedule mixed_schedule(double offset_fraction, double duration_s,
                             int classes, int dim) {
  if (!(duration_s > 0.0))
    throw ValidationError("schedule duration must be positive");
  if (offset_fraction < 0.0 || offset_fraction >= 1.0)
    throw ValidationError("offset_fraction must lie in [0,1)");

  const Eigen::VectorXd uni = uniform_priors(classes);
  const Eigen::MatrixXd g0 = geometry("mixed/0", classes, dim, kMeanRadius);
  const Eigen::MatrixXd g1 = geometry("mixed/1", classes, dim, kMeanRadius);
  const Eigen::MatrixXd g2 = geometry("mixed/2", classes, dim, kMeanRadius);
  const Eigen::MatrixXd g3 = geometry("mixed/3", classes, dim, kMeanRadius);

  // fractions of the total duration; rotated by the camera offset
  std::vector<DriftPhase> base;
  base.push_back(make_phase(0.15 * duration_s, g0, uni, dim));
  base.push_back(make_phase(0.20 * duration_s, g1, uni, dim, 0.20 * duration_s));
  base.push_back(make_phase(0.15 * duration_s, rotate_classes(g1, 2), uni, dim));
  base.push_back(make_phase(0.20 * duration_s, g2, skewed_priors(classes, 1),
                            dim, 0.20 * duration_s));
  base.push_back(make_phase(0.15 * duration_s, g2, uni, dim));
  base.push_back(make_phase(0.15 * duration_s, g3, uni, dim, 0.15 * duration_s));

  const auto rot =
      static_cast<std::size_t>(offset_fraction * static_cast<double>(base.size()));
  DriftSchedule s;
  s.classes = classes;
  s.dim = dim;
  s.name = "mixed";
  for (std::size_t j = 0; j < base.size(); ++j)
    s.phases.push_back(base[(j + rot) % base.size()]);
  return s;
}

std::vector<FeatureStream> build_streams(const std::string& source, int cameras,
                                         RngSeed seed, double duration_s,
                                         int classes, int dim) {
  if (cameras < 1) throw ValidationError("need at least one camera");
  std::vector<FeatureStream> streams;

  if (source == "catalog") {
    // reuse the catalog regimes across the fleet with staggered phase timing
    // and independent sampling, the analogue of giving every camera its own
    // video of a shared scene type
    const auto& names = benchmark_schedule_names();
    for (int i = 0; i < cameras; ++i) {
      const std::string& name = names[static_cast<std::size_t>(i) % names.size()];
      const double stagger = static_cast<double>(i) / cameras;
      FeatureStream st = generate(
          staggered_schedule(name, duration_s, classes, dim, stagger),
          split_seed(seed, "cam/" + std::to_string(i)));
      st.name = name + "#" + std::to_string(i);
      streams.push_back(std::move(st));
    }
    return streams;
  }

  if (source == "mixed") {
    for (int i = 0; i < cameras; ++i) {
      const double offset = static_cast<double>(i) / cameras;
      FeatureStream st = generate(mixed_schedule(offset, duration_s, classes, dim),
                                  split_seed(seed, "cam/" + std::to_string(i)));
      st.name = "mixed#" + std::to_string(i);
      streams.push_back(std::move(st));
    }
    return streams;
  }

  // otherwise a directory of stream files
  namespace fs = std::filesystem;
  if (!fs::is_directory(source))
    throw ValidationError("stream source is neither a known catalog nor a directory: " +
                          source);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(source)) {
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (static_cast<int>(files.size()) < cameras)
    throw ValidationError("stream directory holds " +
                          std::to_string(files.size()) + " files but " +
                          std::to_string(cameras) + " cameras are configured");
  for (int i = 0; i < cameras; ++i)
    streams.push_back(load_stream(files[static_cast<std::size_t>(i)]));
  return streams;
}

double bayes_reference_accuracy(const DriftSchedule& schedule, double t0,
                                double t1, int draws, RngSeed seed) {
  schedule.validate();
  if (!(t1 > t0) || draws < 1)
    throw ValidationError("bayes_reference_accuracy: bad window");
  Rng rng(split_seed(seed, "bayes-ref"));
  int correct = 0;
  for (int i = 0; i < draws; ++i) {
    const double t = rng.uniform(t0, t1);
    const DriftPhase eff = schedule.params_at(t);

    const double u = rng.uniform();
    int label = schedule.classes - 1;
    double cum = 0.0;
    for (int c = 0; c < schedule.classes; ++c) {
      cum += eff.class_priors[c];
      if (u < cum) {
        label = c;
        break;
      }
    }
    Eigen::VectorXd x = eff.class_means.row(label).transpose() + eff.global_shift;
    for (int d = 0; d < schedule.dim; ++d) x[d] += eff.cov_scale * rng.normal();

    // exact posterior: argmax_c ln prior_c - ||x - mu_c - shift||^2 / (2 s^2)
    const double s2 = eff.cov_scale * eff.cov_scale;
    int best = 0;
    double best_score = 0.0;
    for (int c = 0; c < schedule.classes; ++c) {
      const double dist2 =
          (x - eff.class_means.row(c).transpose() - eff.global_shift)
              .squaredNorm();
      double score = s2 > 0.0 ? -dist2 / (2.0 * s2) : -dist2;
      if (eff.class_priors[c] > 0.0)
        score += std::log(eff.class_priors[c]);
      else
        score = -std::numeric_limits<double>::infinity();
      if (c == 0 || score > best_score) {
        best = c;
        best_score = score;
      }
    }
    if (best == label) ++correct;
  }
  return static_cast<double>(correct) / draws;
}

}  // namespace edgesync
