#include "dba/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace dba {

double dba_fidelity(const Eigen::Ref<const Eigen::VectorXd>& coefficients, double intercept,
                    const Eigen::Ref<const Eigen::MatrixXd>& points,
                    const Eigen::Ref<const Eigen::VectorXi>& labels) {
  if (points.rows() == 0) throw std::invalid_argument("dba_fidelity: empty sample");
  if (labels.size() != points.rows())
    throw std::invalid_argument("dba_fidelity: label count mismatch");
  Eigen::Index agree = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double g = coefficients.dot(points.row(i)) + intercept;
    const int predicted = g >= 0.0 ? 1 : -1;  // tie to +1
    if (predicted == labels[i]) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(points.rows());
}

double dba_fidelity(const Explanation& explanation, const SimulationSample& sample) {
  return dba_fidelity(explanation.coefficients, explanation.intercept, sample.points,
                      sample.labels);
}

double class_balance(const Eigen::Ref<const Eigen::VectorXi>& labels) {
  if (labels.size() == 0) throw std::invalid_argument("class_balance: empty sample");
  return static_cast<double>((labels.array() == 1).count()) /
         static_cast<double>(labels.size());
}

double class_balance(const SimulationSample& sample) { return class_balance(sample.labels); }

std::pair<double, double> cosine_similarity_pm(const Eigen::Ref<const Eigen::VectorXd>& beta,
                                               const std::vector<Hyperplane>& hyperplanes,
                                               const Eigen::Ref<const Eigen::VectorXd>& x0) {
  if (hyperplanes.empty()) throw std::invalid_argument("cosine_similarity_pm: no hyperplanes");
  const double beta_norm = beta.norm();
  if (!(beta_norm > 0.0)) throw std::invalid_argument("cosine_similarity_pm: zero beta");

  double best = 0.0;
  double nearest_cos = 0.0;
  double nearest_distance = std::numeric_limits<double>::infinity();
  for (const auto& plane : hyperplanes) {
    if (plane.coefficients.size() != beta.size())
      throw std::invalid_argument("cosine_similarity_pm: dimension mismatch");
    const double cos =
        std::abs(plane.coefficients.dot(beta)) / (plane.coefficients.norm() * beta_norm);
    best = std::max(best, cos);
    const double dist = plane.distance(x0);
    if (dist < nearest_distance) {
      nearest_distance = dist;
      nearest_cos = cos;
    }
  }
  return {nearest_cos, best};
}

std::vector<std::pair<double, double>> probability_curve(
    const Classifier& f, const Eigen::Ref<const Eigen::VectorXd>& x0,
    const Eigen::Ref<const Eigen::VectorXd>& direction, double s_max, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("probability_curve: step must be > 0");
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("probability_curve: zero direction");

  std::vector<std::pair<double, double>> curve;
  for (double s = 0.0; s <= s_max + 1e-12; s += step) {
    const Eigen::VectorXd x = x0 + (s / norm) * direction;
    const double p = f.has_probability() ? f.probability(x) : (f.label(x) + 1) / 2.0;
    curve.emplace_back(s, p);
  }
  return curve;
}

namespace {

bool is_att_method(const std::string& method) {
  return method == "dba-att" || method == "lime-att";
}

struct RunContext {
  const Dataset& train;
  const Classifier& f;
  const EvalConfig& config;
  const Codec* codec;
  const std::vector<Annotator>* annotators;
  Eigen::VectorXd train_means, train_sds;
  Eigen::MatrixXd latent_train;  // encoded training points, when a codec runs
  Eigen::VectorXd latent_means, latent_sds;
  bool need_latent = false;
};

// All requested methods for one test point, in config order.
std::vector<PointRecord> evaluate_point(const RunContext& ctx, int point_index,
                                        const Eigen::VectorXd& x0) {
  const EvalConfig& cfg = ctx.config;
  std::vector<PointRecord> records;

  CounterRng point_rng = CounterRng(cfg.seed, "evaluation").split(
      static_cast<std::uint64_t>(point_index));

  // One input-space detection anchors the probe reach for the tab methods.
  std::optional<BoundaryDetection> detection;
  std::optional<BoundaryDetection> latent_detection;
  std::optional<Eigen::VectorXd> z0;

  auto input_gamma0 = [&]() -> double {
    if (!detection) detection = detect(ctx.train, x0, ctx.f, cfg.dba);
    return detection->distance + cfg.gamma.extra;
  };

  auto latent_setup = [&]() {
    if (z0) return;
    z0 = ctx.codec->encode(x0);
    Dataset latent_set{ctx.latent_train, ctx.train.labels, {}};
    const LatentClassifier latent_f(*ctx.codec, ctx.f);
    latent_detection = detect(latent_set, *z0, latent_f, cfg.dba);
  };

  for (const auto& method : cfg.methods) {
    PointRecord rec;
    rec.point = point_index;
    rec.method = method;

    {
      if (method == "dba-tab") {
        DbaResult result =
            tune_and_explain(ctx.train, x0, ctx.f, cfg.dba,
                             point_rng.split("dba-tab"), detection ? &*detection : nullptr);
        if (!detection) detection = result.detection;
        rec.fidelity = dba_fidelity(result.explanation, result.sample);
        rec.balance = class_balance(result.sample);
        rec.chosen_r = result.explanation.chosen_r;
        rec.distance = boundary_distance_with_policy(
            ctx.f, x0, result.explanation.coefficients, input_gamma0(), cfg.gamma,
            cfg.dba.bisect_tol, cfg.dba.bisect_max_iter);
        if (!cfg.hyperplanes.empty()) {
          const auto [cm, cp] =
              cosine_similarity_pm(result.explanation.coefficients, cfg.hyperplanes, x0);
          rec.cos_minus = cm;
          rec.cos_plus = cp;
        }
        rec.warnings = std::move(result.explanation.warnings);
      } else if (method == "lime-tab") {
        LimeResult result =
            lime_explain(ctx.train_means, ctx.train_sds, x0, ctx.f, cfg.lime,
                         point_rng.split("lime-tab"), ctx.train.feature_names);
        rec.r2 = result.explanation.weighted_r2;
        rec.balance = class_balance(result.labels);
        rec.distance = boundary_distance_with_policy(
            ctx.f, x0, result.explanation.coefficients, input_gamma0(), cfg.gamma,
            cfg.dba.bisect_tol, cfg.dba.bisect_max_iter);
        if (!cfg.hyperplanes.empty()) {
          const auto [cm, cp] =
              cosine_similarity_pm(result.explanation.coefficients, cfg.hyperplanes, x0);
          rec.cos_minus = cm;
          rec.cos_plus = cp;
        }
        rec.warnings = std::move(result.explanation.warnings);
      } else if (method == "dba-att") {
        latent_setup();
        AttExplainResult result =
            explain_att(ctx.train, x0, ctx.f, *ctx.codec, *ctx.annotators, cfg.dba,
                        point_rng.split("dba-att"), &ctx.latent_train,
                        latent_detection ? &*latent_detection : nullptr);
        const LatentClassifier latent_f(*ctx.codec, ctx.f);
        rec.fidelity = dba_fidelity(result.explanation.coefficients,
                                    result.explanation.intercept, result.attribute_sample,
                                    result.sample.labels);
        rec.balance = class_balance(result.sample);
        rec.chosen_r = result.explanation.chosen_r;
        rec.distance = boundary_distance_with_policy(
            latent_f, *z0, result.explanation.latent_direction,
            latent_detection->distance + cfg.gamma.extra, cfg.gamma, cfg.dba.bisect_tol,
            cfg.dba.bisect_max_iter);
        if (!cfg.hyperplanes.empty() &&
            result.explanation.coefficients.size() == cfg.hyperplanes.front().coefficients.size()) {
          const auto [cm, cp] =
              cosine_similarity_pm(result.explanation.coefficients, cfg.hyperplanes, x0);
          rec.cos_minus = cm;
          rec.cos_plus = cp;
        }
        rec.warnings = std::move(result.explanation.warnings);
      } else if (method == "lime-att") {
        latent_setup();
        LimeAttResult result =
            lime_att_explain(ctx.latent_means, ctx.latent_sds, x0, ctx.f, *ctx.codec,
                             *ctx.annotators, cfg.lime, point_rng.split("lime-att"));
        const LatentClassifier latent_f(*ctx.codec, ctx.f);
        rec.r2 = result.r2;
        rec.balance = class_balance(result.labels);
        rec.distance = boundary_distance_with_policy(
            latent_f, *z0, result.explanation.latent_direction,
            latent_detection->distance + cfg.gamma.extra, cfg.gamma, cfg.dba.bisect_tol,
            cfg.dba.bisect_max_iter);
        if (!cfg.hyperplanes.empty() &&
            result.explanation.coefficients.size() == cfg.hyperplanes.front().coefficients.size()) {
          const auto [cm, cp] =
              cosine_similarity_pm(result.explanation.coefficients, cfg.hyperplanes, x0);
          rec.cos_minus = cm;
          rec.cos_plus = cp;
        }
        rec.warnings = std::move(result.explanation.warnings);
      } else {
        throw std::invalid_argument("evaluate_run: unknown method '" + method + "'");
      }
    }

    rec.failed = !rec.distance.has_value();
    records.push_back(std::move(rec));
  }
  return records;
}

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

nlohmann::json record_to_json(const PointRecord& rec) {
  nlohmann::json j;
  j["point"] = rec.point;
  j["method"] = rec.method;
  auto set = [&j](const char* key, const std::optional<double>& v) {
    if (v)
      j[key] = *v;
    else
      j[key] = nullptr;
  };
  set("fidelity", rec.fidelity);
  set("r2", rec.r2);
  set("class_balance", rec.balance);
  set("boundary_distance", rec.distance);
  set("cosine_minus", rec.cos_minus);
  set("cosine_plus", rec.cos_plus);
  set("chosen_r", rec.chosen_r);
  j["failed_to_cross"] = rec.failed;
  j["warnings"] = rec.warnings;
  return j;
}

}  // namespace

EvaluationReport evaluate_run(const Dataset& train,
                              const Eigen::Ref<const Eigen::MatrixXd>& test_candidates,
                              int count, const Classifier& f, const EvalConfig& config,
                              const Codec* codec,
                              const std::vector<Annotator>* annotators) {
  train.validate();
  if (test_candidates.cols() != train.dim())
    throw std::invalid_argument("evaluate_run: candidate dimension mismatch");
  if (config.methods.empty()) throw std::invalid_argument("evaluate_run: no methods");

  const bool any_att =
      std::any_of(config.methods.begin(), config.methods.end(), is_att_method);
  if (any_att && (!codec || !annotators || annotators->empty()))
    throw std::invalid_argument("evaluate_run: attribute methods need a codec and annotators");

  RunContext ctx{train, f, config, codec, annotators, {}, {}, {}, {}, {}, any_att};
  ctx.train_means = train.points.colwise().mean();
  ctx.train_sds = (train.points.rowwise() - ctx.train_means.transpose())
                      .array()
                      .square()
                      .colwise()
                      .mean()
                      .sqrt();
  if (any_att) {
    ctx.latent_train.resize(train.n(), codec->latent_dim());
    for (Eigen::Index i = 0; i < train.n(); ++i)
      ctx.latent_train.row(i) = codec->encode(train.points.row(i).transpose()).transpose();
    ctx.latent_means = ctx.latent_train.colwise().mean();
    ctx.latent_sds = (ctx.latent_train.rowwise() - ctx.latent_means.transpose())
                         .array()
                         .square()
                         .colwise()
                         .mean()
                         .sqrt();
  }

  // Deterministic candidate order: Fisher-Yates with the run seed.
  std::vector<int> order(static_cast<std::size_t>(test_candidates.rows()));
  std::iota(order.begin(), order.end(), 0);
  CounterRng shuffle_rng(config.seed, "point-selection");
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(shuffle_rng.next_u64() % i);
    std::swap(order[i - 1], order[j]);
  }

  const bool filter = any_att && config.filter_label_stable;
  std::vector<int> selected;
  for (int idx : order) {
    if (count > 0 && static_cast<int>(selected.size()) >= count) break;
    if (filter) {
      const Eigen::VectorXd x = test_candidates.row(idx).transpose();
      if (f.label(codec->decode(codec->encode(x))) != f.label(x)) continue;
    }
    selected.push_back(idx);
  }
  if (selected.empty()) throw std::runtime_error("evaluate_run: empty admissible test set");

  std::vector<std::vector<PointRecord>> per_point(selected.size());
  const bool parallel_ok = config.jobs > 1 && f.concurrent_safe() &&
                           (!any_att || codec->concurrent_safe());
  if (parallel_ok) {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t slot = next.fetch_add(1);
        if (slot >= selected.size()) return;
        per_point[slot] = evaluate_point(
            ctx, selected[slot], test_candidates.row(selected[slot]).transpose());
      }
    };
    std::vector<std::thread> pool;
    const int threads = std::min<int>(config.jobs, static_cast<int>(selected.size()));
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  } else {
    for (std::size_t slot = 0; slot < selected.size(); ++slot)
      per_point[slot] = evaluate_point(ctx, selected[slot],
                                       test_candidates.row(selected[slot]).transpose());
  }

  EvaluationReport report;
  report.config_echo = config.config_echo;
  report.explained_points = selected;
  for (auto& batch : per_point)
    for (auto& rec : batch) report.records.push_back(std::move(rec));

  // Distance means only count points where no requested method failed.
  std::vector<bool> any_failed(selected.size(), false);
  for (std::size_t slot = 0; slot < selected.size(); ++slot)
    for (const auto& rec : per_point[slot])
      if (rec.failed) any_failed[slot] = true;

  for (const auto& method : config.methods) {
    MethodSummary summary;
    summary.method = method;
    std::vector<double> fid, r2, bal, dist, cm, cp;
    int failures = 0;
    for (std::size_t slot = 0; slot < selected.size(); ++slot) {
      for (const auto& rec : report.records) {
        if (rec.method != method || rec.point != selected[slot]) continue;
        ++summary.points;
        if (rec.fidelity) fid.push_back(*rec.fidelity);
        if (rec.r2) r2.push_back(*rec.r2);
        if (rec.balance) bal.push_back(*rec.balance);
        if (rec.cos_minus) cm.push_back(*rec.cos_minus);
        if (rec.cos_plus) cp.push_back(*rec.cos_plus);
        if (rec.failed) ++failures;
        if (!any_failed[slot] && rec.distance) dist.push_back(*rec.distance);
      }
    }
    summary.mean_fidelity = mean_of(fid);
    summary.mean_r2 = mean_of(r2);
    summary.mean_balance = mean_of(bal);
    summary.mean_distance = mean_of(dist);
    summary.distance_points = static_cast<int>(dist.size());
    summary.mean_cos_minus = mean_of(cm);
    summary.mean_cos_plus = mean_of(cp);
    summary.failure_pct =
        summary.points > 0 ? 100.0 * failures / static_cast<double>(summary.points) : 0.0;
    report.summaries.push_back(std::move(summary));
  }
  return report;
}

std::string EvaluationReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = schema_version;
  if (!config_echo.empty()) {
    nlohmann::json cfg = nlohmann::json::parse(config_echo, nullptr, false);
    j["config"] = cfg.is_discarded() ? nlohmann::json(config_echo) : cfg;
  } else {
    j["config"] = nullptr;
  }
  j["explained_points"] = explained_points;
  j["records"] = nlohmann::json::array();
  for (const auto& rec : records) j["records"].push_back(record_to_json(rec));
  j["summaries"] = nlohmann::json::array();
  for (const auto& s : summaries) {
    nlohmann::json row;
    row["method"] = s.method;
    row["points"] = s.points;
    auto set = [&row](const char* key, const std::optional<double>& v) {
      if (v)
        row[key] = *v;
      else
        row[key] = nullptr;
    };
    set("mean_fidelity", s.mean_fidelity);
    set("mean_r2", s.mean_r2);
    set("mean_class_balance", s.mean_balance);
    set("mean_boundary_distance", s.mean_distance);
    row["distance_points"] = s.distance_points;
    set("mean_cosine_minus", s.mean_cos_minus);
    set("mean_cosine_plus", s.mean_cos_plus);
    row["failure_to_cross_pct"] = s.failure_pct;
    j["summaries"].push_back(std::move(row));
  }
  return j.dump(2);
}

std::string EvaluationReport::to_csv_table() const {
  std::ostringstream out;
  out.precision(10);
  out << "method,dba_fidelity,r2_fidelity,class_balance,boundary_distance,"
         "cosine_similarity_minus,cosine_similarity_plus,failure_to_cross_pct\n";
  for (const auto& s : summaries) {
    auto cell = [&out](const std::optional<double>& v) {
      out << ',';
      if (v) out << *v;
    };
    out << s.method;
    cell(s.mean_fidelity);
    cell(s.mean_r2);
    cell(s.mean_balance);
    cell(s.mean_distance);
    cell(s.mean_cos_minus);
    cell(s.mean_cos_plus);
    out << ',' << s.failure_pct << '\n';
  }
  return out.str();
}

}  // namespace dba
