// Command-line front end: dataset generation, single-point explanations,
// evaluation runs, r-grid sweeps and codec stability diagnostics.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dba/baselines.hpp"
#include "dba/classifiers.hpp"
#include "dba/codec.hpp"
#include "dba/csv.hpp"
#include "dba/datagen.hpp"
#include "dba/dba_att.hpp"
#include "dba/dba_tab.hpp"
#include "dba/evaluation.hpp"
#include "dba/standardizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kConfigSchema = "dba-config/1";
constexpr const char* kExplanationSchema = "dba-explanation/1";

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
  return values;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.begin(), v.end());
}

void write_text(const fs::path& path, const std::string& text, bool force) {
  if (!force && fs::exists(path))
    throw std::runtime_error("output '" + path.string() + "' exists (use --force)");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("DBA_OUT_DIR")) return fs::path(env);
  return fs::path(".");
}

// ---------------------------------------------------------------------------
// Run configuration: defaults < config file < command-line flags, validated
// against a fixed key/type list; unknown keys are rejected.

struct RunConfig {
  std::string data;
  std::string test_data;
  std::string label_column = "label";
  std::string classifier = "ground-truth";
  std::string codec = "identity";
  std::string annotations;  // separate annotation CSV; empty = att_ columns
  double annotator_lambda = 0.1;
  bool standardize = true;
  std::vector<std::string> methods{"dba-tab", "lime-tab"};
  int points = 50;
  std::uint64_t seed = 0;
  int jobs = 1;
  dba::DbaParams dba;
  dba::LimeParams lime;
  dba::GammaPolicy gamma;
  bool filter_label_stable = true;
  double curve_step = 0.05;
  bool curves = false;
  std::string hyperplanes = "auto";  // auto | airis | none

  json to_json() const {
    json j;
    j["schema_version"] = kConfigSchema;
    j["data"] = data;
    j["test_data"] = test_data;
    j["label_column"] = label_column;
    j["classifier"] = classifier;
    j["codec"] = codec;
    j["annotations"] = annotations;
    j["annotator_lambda"] = annotator_lambda;
    j["standardize"] = standardize;
    j["methods"] = methods;
    j["points"] = points;
    j["seed"] = seed;
    j["jobs"] = jobs;
    j["dba"] = {{"k", dba.k},
                {"m", dba.m},
                {"r_grid", dba.r_grid},
                {"bisect_tol", dba.bisect_tol},
                {"bisect_max_iter", dba.bisect_max_iter}};
    json lime_j;
    lime_j["m"] = lime.m;
    lime_j["sigma"] = lime.sigma ? json(*lime.sigma) : json(nullptr);
    j["lime"] = lime_j;
    j["gamma"] = {{"extra", gamma.extra}, {"doublings", gamma.doublings}};
    j["filter_label_stable"] = filter_label_stable;
    j["curve_step"] = curve_step;
    j["curves"] = curves;
    j["hyperplanes"] = hyperplanes;
    return j;
  }
};

void expect_keys(const json& j, const char* where, const std::vector<std::string>& known) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::runtime_error(std::string("config: unknown key '") + key + "' in " + where);
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  json j = json::parse(in);

  expect_keys(j, "top level",
              {"schema_version", "data", "test_data", "label_column", "classifier", "codec",
               "annotations", "annotator_lambda", "standardize", "methods", "points", "seed",
               "jobs", "dba", "lime", "gamma", "filter_label_stable", "curve_step", "curves",
               "hyperplanes"});
  if (!j.contains("schema_version") || j["schema_version"] != kConfigSchema)
    throw std::runtime_error("config: schema_version must be '" + std::string(kConfigSchema) +
                             "'");

  RunConfig cfg;
  auto get = [&](const char* key, auto& target) {
    if (j.contains(key) && !j[key].is_null())
      target = j[key].get<std::decay_t<decltype(target)>>();
  };
  get("data", cfg.data);
  get("test_data", cfg.test_data);
  get("label_column", cfg.label_column);
  get("classifier", cfg.classifier);
  get("codec", cfg.codec);
  get("annotations", cfg.annotations);
  get("annotator_lambda", cfg.annotator_lambda);
  get("standardize", cfg.standardize);
  get("methods", cfg.methods);
  get("points", cfg.points);
  get("seed", cfg.seed);
  get("jobs", cfg.jobs);
  get("filter_label_stable", cfg.filter_label_stable);
  get("curve_step", cfg.curve_step);
  get("curves", cfg.curves);
  get("hyperplanes", cfg.hyperplanes);

  if (j.contains("dba")) {
    expect_keys(j["dba"], "dba", {"k", "m", "r_grid", "bisect_tol", "bisect_max_iter"});
    const json& d = j["dba"];
    if (d.contains("k")) cfg.dba.k = d["k"].get<int>();
    if (d.contains("m")) cfg.dba.m = d["m"].get<int>();
    if (d.contains("r_grid")) cfg.dba.r_grid = d["r_grid"].get<std::vector<double>>();
    if (d.contains("bisect_tol")) cfg.dba.bisect_tol = d["bisect_tol"].get<double>();
    if (d.contains("bisect_max_iter")) cfg.dba.bisect_max_iter = d["bisect_max_iter"].get<int>();
  }
  if (j.contains("lime")) {
    expect_keys(j["lime"], "lime", {"m", "sigma"});
    const json& l = j["lime"];
    if (l.contains("m")) cfg.lime.m = l["m"].get<int>();
    if (l.contains("sigma") && !l["sigma"].is_null()) cfg.lime.sigma = l["sigma"].get<double>();
  }
  if (j.contains("gamma")) {
    expect_keys(j["gamma"], "gamma", {"extra", "doublings"});
    const json& g = j["gamma"];
    if (g.contains("extra")) cfg.gamma.extra = g["extra"].get<double>();
    if (g.contains("doublings")) cfg.gamma.doublings = g["doublings"].get<int>();
  }
  return cfg;
}

// Fill cfg fields from the file wherever the user did not pass the flag.
void apply_file_config(RunConfig& cfg, const RunConfig& file, const CLI::App* sub) {
  auto passed = [&](const std::string& flag) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  if (!passed("--data")) cfg.data = file.data;
  if (!passed("--test-data")) cfg.test_data = file.test_data;
  if (!passed("--label-column")) cfg.label_column = file.label_column;
  if (!passed("--classifier")) cfg.classifier = file.classifier;
  if (!passed("--codec")) cfg.codec = file.codec;
  if (!passed("--annotations")) cfg.annotations = file.annotations;
  if (!passed("--annotator-lambda")) cfg.annotator_lambda = file.annotator_lambda;
  if (!passed("--raw-space")) cfg.standardize = file.standardize;
  if (!passed("--methods")) cfg.methods = file.methods;
  if (!passed("--points")) cfg.points = file.points;
  if (!passed("--seed")) cfg.seed = file.seed;
  if (!passed("--jobs")) cfg.jobs = file.jobs;
  if (!passed("--k")) cfg.dba.k = file.dba.k;
  if (!passed("--m")) cfg.dba.m = file.dba.m;
  if (!passed("--r-grid")) cfg.dba.r_grid = file.dba.r_grid;
  cfg.dba.bisect_tol = file.dba.bisect_tol;
  cfg.dba.bisect_max_iter = file.dba.bisect_max_iter;
  if (!passed("--lime-m")) cfg.lime.m = file.lime.m;
  if (!passed("--sigma")) cfg.lime.sigma = file.lime.sigma;
  cfg.gamma = file.gamma;
  if (!passed("--no-label-filter")) cfg.filter_label_stable = file.filter_label_stable;
  if (!passed("--curve-step")) cfg.curve_step = file.curve_step;
  if (!passed("--curves")) cfg.curves = file.curves;
  if (!passed("--hyperplanes")) cfg.hyperplanes = file.hyperplanes;
}

// ---------------------------------------------------------------------------
// Working space: loaded training data, optional standardization, classifier,
// codec and annotators assembled from their spec strings.

struct Workspace {
  dba::LoadedDataset loaded;  // raw features as stored in the file
  dba::Dataset working;       // standardized unless config says raw
  std::optional<dba::Standardizer> standardizer;
  std::unique_ptr<dba::Classifier> classifier;
  std::unique_ptr<dba::Codec> codec;
  std::vector<dba::Annotator> annotators;
  std::vector<dba::Hyperplane> hyperplanes;

  Eigen::VectorXd to_working(const Eigen::VectorXd& raw) const {
    return standardizer ? standardizer->apply(raw) : raw;
  }
  Eigen::MatrixXd to_working_rows(const Eigen::MatrixXd& raw) const {
    return standardizer ? standardizer->apply_rows(raw) : raw;
  }
};

std::unique_ptr<dba::Classifier> make_classifier(const std::string& spec, const Workspace& ws) {
  if (spec == "ground-truth") {
    if (ws.working.dim() != 5)
      throw std::runtime_error("classifier: ground-truth expects the 5 AIris features");
    return std::make_unique<dba::AirisRuleClassifier>(ws.standardizer);
  }
  if (spec.rfind("linear:", 0) == 0) {
    const auto rest = spec.substr(7);
    const auto sep = rest.rfind(':');
    if (sep == std::string::npos)
      throw std::runtime_error("classifier: linear spec is linear:w1,w2,...:b");
    return std::make_unique<dba::LinearClassifier>(to_vector(parse_doubles(rest.substr(0, sep))),
                                                   std::stod(rest.substr(sep + 1)));
  }
  if (spec.rfind("kernel:", 0) == 0) {
    const double h = std::stod(spec.substr(7));
    return std::make_unique<dba::KernelSmootherClassifier>(ws.working.points, ws.working.labels,
                                                           h);
  }
  if (spec.rfind("scored-csv:", 0) == 0)
    return std::make_unique<dba::ScoredCsvClassifier>(
        dba::ScoredCsvClassifier::from_csv(spec.substr(11)));
  if (spec.rfind("subprocess:", 0) == 0)
    return std::make_unique<dba::SubprocessClassifier>(spec.substr(11));
  throw std::runtime_error("classifier: unknown spec '" + spec + "'");
}

std::unique_ptr<dba::Codec> make_codec(const std::string& spec, const Workspace& ws) {
  if (spec == "identity") return std::make_unique<dba::IdentityCodec>(ws.working.dim());
  if (spec == "affine")
    return std::make_unique<dba::AffineCodec>(dba::AffineCodec::fit(ws.working.points));
  if (spec.rfind("affine:", 0) == 0)
    return std::make_unique<dba::AffineCodec>(
        dba::AffineCodec::fit(ws.working.points, std::stol(spec.substr(7))));
  if (spec.rfind("subprocess:", 0) == 0)
    return std::make_unique<dba::SubprocessCodec>(spec.substr(11), ws.working.dim());
  throw std::runtime_error("codec: unknown spec '" + spec + "'");
}

bool needs_codec(const std::vector<std::string>& methods) {
  for (const auto& m : methods)
    if (m == "dba-att" || m == "lime-att") return true;
  return false;
}

Workspace build_workspace(const RunConfig& cfg, bool with_codec) {
  if (cfg.data.empty()) throw std::runtime_error("config: no training data given (--data)");
  Workspace ws;
  ws.loaded = dba::load_dataset(cfg.data, cfg.label_column, "att_");
  ws.working = ws.loaded.data;
  if (cfg.standardize) {
    ws.standardizer = dba::fit_standardizer(ws.loaded.data);
    ws.working.points = ws.standardizer->apply_rows(ws.loaded.data.points);
  }
  ws.classifier = make_classifier(cfg.classifier, ws);

  if (with_codec) {
    ws.codec = make_codec(cfg.codec, ws);

    Eigen::MatrixXi annotation_values = ws.loaded.attributes;
    std::vector<std::string> annotation_names = ws.loaded.attribute_names;
    if (!cfg.annotations.empty()) {
      auto [values, names] = dba::load_annotations(cfg.annotations, ws.working.n());
      annotation_values = std::move(values);
      annotation_names = std::move(names);
    }
    if (annotation_values.cols() == 0)
      throw std::runtime_error(
          "attribute methods need annotations: att_ columns in the data or --annotations");

    Eigen::MatrixXd latent(ws.working.n(), ws.codec->latent_dim());
    for (Eigen::Index i = 0; i < ws.working.n(); ++i)
      latent.row(i) = ws.codec->encode(ws.working.points.row(i).transpose()).transpose();
    for (Eigen::Index j = 0; j < annotation_values.cols(); ++j)
      ws.annotators.push_back(
          dba::train_annotator(latent, annotation_values.col(j), cfg.annotator_lambda,
                               annotation_names[static_cast<std::size_t>(j)]));
  }

  const bool airis = ws.loaded.data.feature_names == dba::airis_feature_names();
  if (cfg.hyperplanes == "airis" || (cfg.hyperplanes == "auto" && airis && cfg.standardize)) {
    if (!airis)
      throw std::runtime_error("hyperplanes: 'airis' needs the PL,PW,SL,SW,C feature layout");
    const auto [h1, h2] = dba::standardized_hyperplanes();
    ws.hyperplanes = {h1, h2};
  } else if (cfg.hyperplanes != "none" && cfg.hyperplanes != "auto") {
    throw std::runtime_error("hyperplanes: expected auto|airis|none");
  }
  return ws;
}

// ---------------------------------------------------------------------------
// Subcommands.

json dataset_sidecar(const json& generator, std::uint64_t seed, const dba::Dataset& data) {
  json j;
  j["schema_version"] = "dba-dataset/1";
  j["generator"] = generator;
  j["seed"] = seed;
  j["n"] = data.n();
  j["class_balance"] = static_cast<double>((data.labels.array() == 1).count()) /
                       static_cast<double>(data.n());
  return j;
}

int cmd_gen_moons(int n, double noise, std::uint64_t seed, const std::string& out, bool force) {
  const auto data = dba::gen_moons(n, noise, seed);
  const fs::path csv_path = out.empty() ? default_out_dir() / "moons.csv" : fs::path(out);
  if (!force && fs::exists(csv_path))
    throw std::runtime_error("output '" + csv_path.string() + "' exists (use --force)");
  if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
  dba::write_dataset_csv(csv_path.string(), data);

  const json generator = {{"name", "moons"}, {"n", n}, {"noise", noise}};
  write_text(csv_path.string() + ".meta.json", dataset_sidecar(generator, seed, data).dump(2) + "\n",
             true);
  std::cout << csv_path.string() << "\n";
  return 0;
}

int cmd_gen_airis_tab(int n, std::uint64_t seed, const std::string& out, bool force) {
  const auto airis = dba::gen_airis_tab(n, seed);
  const fs::path csv_path = out.empty() ? default_out_dir() / "airis_tab.csv" : fs::path(out);
  if (!force && fs::exists(csv_path))
    throw std::runtime_error("output '" + csv_path.string() + "' exists (use --force)");
  if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
  dba::write_dataset_csv(csv_path.string(), airis.data, "label", airis.attributes,
                         airis.attribute_names);

  json ranges = json::array();
  for (const auto& r : dba::airis_ranges()) ranges.push_back({{"lo", r.lo}, {"hi", r.hi}});
  const json generator = {{"name", "airis-tab"}, {"n", n}, {"ranges", ranges}};
  write_text(csv_path.string() + ".meta.json",
             dataset_sidecar(generator, seed, airis.data).dump(2) + "\n", true);
  std::cout << csv_path.string() << "\n";
  return 0;
}

json r_distances_json(const std::vector<std::pair<double, std::optional<double>>>& table) {
  json arr = json::array();
  for (const auto& [r, dist] : table) {
    json row;
    row["r"] = r;
    row["distance"] = dist ? json(*dist) : json(nullptr);
    arr.push_back(std::move(row));
  }
  return arr;
}

void dump_sample_csv(const fs::path& path, const dba::SimulationSample& sample) {
  std::ofstream out(path);
  out.precision(17);
  for (Eigen::Index j = 0; j < sample.points.cols(); ++j) out << "x" << j << ",";
  out << "label\n";
  for (Eigen::Index i = 0; i < sample.points.rows(); ++i) {
    for (Eigen::Index j = 0; j < sample.points.cols(); ++j) out << sample.points(i, j) << ",";
    out << sample.labels[i] << "\n";
  }
}

Eigen::MatrixXd latent_training_matrix(const Workspace& ws) {
  Eigen::MatrixXd latent(ws.working.n(), ws.codec->latent_dim());
  for (Eigen::Index i = 0; i < ws.working.n(); ++i)
    latent.row(i) = ws.codec->encode(ws.working.points.row(i).transpose()).transpose();
  return latent;
}

json explain_one(const RunConfig& cfg, const Workspace& ws, const std::string& method,
                 int point_index, const Eigen::VectorXd& x0, const std::string& sample_dump) {
  json j;
  j["schema_version"] = kExplanationSchema;
  j["config"] = cfg.to_json();
  j["method"] = method;
  j["point_index"] = point_index;
  j["x0"] = from_vector(x0);

  dba::CounterRng rng =
      dba::CounterRng(cfg.seed, "explain").split(static_cast<std::uint64_t>(point_index));

  if (method == "dba-tab") {
    const auto result =
        dba::tune_and_explain(ws.working, x0, *ws.classifier, cfg.dba, rng.split("dba-tab"));
    j["coefficients"] = from_vector(result.explanation.coefficients);
    j["intercept"] = result.explanation.intercept;
    j["feature_names"] = ws.working.feature_names;
    j["boundary_point"] = from_vector(result.detection.boundary_point);
    j["bisected_point"] = from_vector(result.detection.bisected_point);
    j["chosen_r"] = result.explanation.chosen_r;
    j["sample_size"] = result.explanation.sample_size;
    j["r_distances"] = r_distances_json(result.explanation.r_distances);
    j["fidelity"] = dba::dba_fidelity(result.explanation, result.sample);
    j["class_balance"] = dba::class_balance(result.sample);
    j["warnings"] = result.explanation.warnings;
    if (!sample_dump.empty()) dump_sample_csv(sample_dump, result.sample);
  } else if (method == "lime-tab") {
    const Eigen::VectorXd means = ws.working.points.colwise().mean();
    const Eigen::VectorXd sds = (ws.working.points.rowwise() - means.transpose())
                                    .array()
                                    .square()
                                    .colwise()
                                    .mean()
                                    .sqrt();
    const auto result = dba::lime_explain(means, sds, x0, *ws.classifier, cfg.lime,
                                          rng.split("lime-tab"), ws.working.feature_names);
    j["coefficients"] = from_vector(result.explanation.coefficients);
    j["intercept"] = result.explanation.intercept;
    j["feature_names"] = ws.working.feature_names;
    j["weighted_r2"] =
        result.explanation.weighted_r2 ? json(*result.explanation.weighted_r2) : json(nullptr);
    j["sample_size"] = result.explanation.sample_size;
    j["class_balance"] = dba::class_balance(result.labels);
    j["warnings"] = result.explanation.warnings;
  } else if (method == "dba-att") {
    const auto result = dba::explain_att(ws.working, x0, *ws.classifier, *ws.codec,
                                         ws.annotators, cfg.dba, rng.split("dba-att"));
    j["coefficients"] = from_vector(result.explanation.coefficients);
    j["raw_coefficients"] = from_vector(result.explanation.raw_coefficients);
    j["intercept"] = result.explanation.intercept;
    j["attribute_names"] = result.explanation.attribute_names;
    j["attribute_means"] = from_vector(result.explanation.attribute_means);
    j["attribute_sds"] = from_vector(result.explanation.attribute_sds);
    j["latent_boundary_point"] = from_vector(result.explanation.latent_boundary_point);
    j["latent_direction"] = from_vector(result.explanation.latent_direction);
    j["chosen_r"] = result.explanation.chosen_r;
    j["sample_size"] = result.explanation.sample_size;
    j["r_distances"] = r_distances_json(result.explanation.r_distances);
    j["fidelity"] =
        dba::dba_fidelity(result.explanation.coefficients, result.explanation.intercept,
                          result.attribute_sample, result.sample.labels);
    j["class_balance"] = dba::class_balance(result.sample);
    j["warnings"] = result.explanation.warnings;
    if (!sample_dump.empty()) dump_sample_csv(sample_dump, result.sample);
  } else if (method == "lime-att") {
    const Eigen::MatrixXd latent = latent_training_matrix(ws);
    const Eigen::VectorXd means = latent.colwise().mean();
    const Eigen::VectorXd sds =
        (latent.rowwise() - means.transpose()).array().square().colwise().mean().sqrt();
    const auto result = dba::lime_att_explain(means, sds, x0, *ws.classifier, *ws.codec,
                                              ws.annotators, cfg.lime, rng.split("lime-att"));
    j["coefficients"] = from_vector(result.explanation.coefficients);
    j["raw_coefficients"] = from_vector(result.explanation.raw_coefficients);
    j["intercept"] = result.explanation.intercept;
    j["attribute_names"] = result.explanation.attribute_names;
    j["latent_direction"] = from_vector(result.explanation.latent_direction);
    j["weighted_r2"] = result.r2 ? json(*result.r2) : json(nullptr);
    j["sample_size"] = result.explanation.sample_size;
    j["class_balance"] = dba::class_balance(result.labels);
    j["warnings"] = result.explanation.warnings;
  } else {
    throw std::runtime_error("explain: unknown method '" + method + "'");
  }
  return j;
}

int cmd_explain(const RunConfig& cfg, const std::string& method, const std::vector<int>& points,
                const std::string& x_literal, const std::string& out,
                bool dump_sample, bool force) {
  Workspace ws = build_workspace(cfg, method == "dba-att" || method == "lime-att");

  std::vector<std::pair<int, Eigen::VectorXd>> targets;
  if (!x_literal.empty()) {
    const Eigen::VectorXd raw = to_vector(parse_doubles(x_literal));
    if (raw.size() != ws.loaded.data.dim()) throw std::runtime_error("--x has wrong dimension");
    targets.emplace_back(-1, ws.to_working(raw));
  }
  if (!points.empty()) {
    Eigen::MatrixXd source = ws.loaded.data.points;
    if (!cfg.test_data.empty())
      source = dba::load_dataset(cfg.test_data, cfg.label_column, "att_").data.points;
    for (int idx : points) {
      if (idx < 0 || idx >= source.rows())
        throw std::runtime_error("--point index " + std::to_string(idx) + " out of range");
      targets.emplace_back(idx, ws.to_working(source.row(idx).transpose()));
    }
  }
  if (targets.empty()) throw std::runtime_error("explain: give --point or --x");

  const fs::path out_dir = out.empty() ? default_out_dir() : fs::path(out);
  fs::create_directories(out_dir);
  for (const auto& [idx, x0] : targets) {
    const std::string stem =
        "explain_" + method + "_" + (idx < 0 ? std::string("x") : std::to_string(idx));
    const std::string dump = dump_sample ? (out_dir / (stem + "_sample.csv")).string() : "";
    const json payload = explain_one(cfg, ws, method, idx, x0, dump);
    write_text(out_dir / (stem + ".json"), payload.dump(2) + "\n", force);
    std::cout << (out_dir / (stem + ".json")).string() << "\n";
  }
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& out, bool force) {
  Workspace ws = build_workspace(cfg, needs_codec(cfg.methods));

  Eigen::MatrixXd candidates;
  if (cfg.test_data.empty()) {
    candidates = ws.working.points;
  } else {
    const auto test = dba::load_dataset(cfg.test_data, cfg.label_column, "att_");
    candidates = ws.to_working_rows(test.data.points);
  }

  dba::EvalConfig eval;
  eval.methods = cfg.methods;
  eval.dba = cfg.dba;
  eval.lime = cfg.lime;
  eval.seed = cfg.seed;
  eval.gamma = cfg.gamma;
  eval.filter_label_stable = cfg.filter_label_stable;
  eval.jobs = cfg.jobs;
  eval.hyperplanes = ws.hyperplanes;
  eval.config_echo = cfg.to_json().dump();

  const auto report =
      dba::evaluate_run(ws.working, candidates, cfg.points, *ws.classifier, eval,
                        ws.codec.get(), ws.annotators.empty() ? nullptr : &ws.annotators);

  const fs::path out_dir = out.empty() ? default_out_dir() : fs::path(out);
  fs::create_directories(out_dir);
  write_text(out_dir / "report.json", report.to_json() + "\n", force);
  write_text(out_dir / "report_table.csv", report.to_csv_table(), force);

  if (cfg.curves) {
    // Probability along each method's winning direction (latent-space walk
    // for the attribute methods), for external plotting.
    std::ostringstream curves;
    curves.precision(17);
    curves << "point,method,space,s,probability\n";

    Eigen::MatrixXd latent;
    Eigen::VectorXd latent_means, latent_sds;
    if (ws.codec) {
      latent = latent_training_matrix(ws);
      latent_means = latent.colwise().mean();
      latent_sds =
          (latent.rowwise() - latent_means.transpose()).array().square().colwise().mean().sqrt();
    }

    for (int idx : report.explained_points) {
      const Eigen::VectorXd x0 = candidates.row(idx).transpose();
      const auto det = dba::detect(ws.working, x0, *ws.classifier, cfg.dba);
      const double reach = 2.0 * (det.distance + cfg.gamma.extra);
      for (const auto& method : cfg.methods) {
        dba::CounterRng rng =
            dba::CounterRng(cfg.seed, "evaluation").split(static_cast<std::uint64_t>(idx));
        if (method == "dba-tab" || method == "lime-tab") {
          Eigen::VectorXd direction;
          if (method == "dba-tab") {
            const auto result = dba::tune_and_explain(ws.working, x0, *ws.classifier, cfg.dba,
                                                      rng.split("dba-tab"), &det);
            direction = result.explanation.coefficients;
          } else {
            const Eigen::VectorXd means = ws.working.points.colwise().mean();
            const Eigen::VectorXd sds = (ws.working.points.rowwise() - means.transpose())
                                            .array()
                                            .square()
                                            .colwise()
                                            .mean()
                                            .sqrt();
            const auto result = dba::lime_explain(means, sds, x0, *ws.classifier, cfg.lime,
                                                  rng.split("lime-tab"));
            direction = result.explanation.coefficients;
          }
          direction *= -ws.classifier->label(x0);
          for (const auto& [s, p] :
               dba::probability_curve(*ws.classifier, x0, direction, reach, cfg.curve_step))
            curves << idx << "," << method << ",input," << s << "," << p << "\n";
        } else if (ws.codec) {
          const dba::LatentClassifier latent_f(*ws.codec, *ws.classifier);
          const Eigen::VectorXd z0 = ws.codec->encode(x0);
          Eigen::VectorXd direction;
          if (method == "dba-att") {
            const auto result =
                dba::explain_att(ws.working, x0, *ws.classifier, *ws.codec, ws.annotators,
                                 cfg.dba, rng.split("dba-att"), &latent);
            direction = result.explanation.latent_direction;
          } else {
            const auto result =
                dba::lime_att_explain(latent_means, latent_sds, x0, *ws.classifier, *ws.codec,
                                      ws.annotators, cfg.lime, rng.split("lime-att"));
            direction = result.explanation.latent_direction;
          }
          direction *= -latent_f.label(z0);
          const auto z_det = dba::detect(
              dba::Dataset{latent, ws.working.labels, {}}, z0, latent_f, cfg.dba);
          const double z_reach = 2.0 * (z_det.distance + cfg.gamma.extra);
          for (const auto& [s, p] :
               dba::probability_curve(latent_f, z0, direction, z_reach, cfg.curve_step))
            curves << idx << "," << method << ",latent," << s << "," << p << "\n";
        }
      }
    }
    write_text(out_dir / "curves.csv", curves.str(), force);
  }

  std::cout << (out_dir / "report.json").string() << "\n";
  std::cout << report.to_csv_table();
  return 0;
}

int cmd_sweep_r(const RunConfig& cfg, int point, const std::string& out, bool force) {
  Workspace ws = build_workspace(cfg, false);
  if (point < 0 || point >= ws.working.n())
    throw std::runtime_error("--point index out of range");
  const Eigen::VectorXd x0 = ws.working.points.row(point).transpose();

  dba::CounterRng rng =
      dba::CounterRng(cfg.seed, "explain").split(static_cast<std::uint64_t>(point));
  const auto result =
      dba::tune_and_explain(ws.working, x0, *ws.classifier, cfg.dba, rng.split("dba-tab"));

  json j;
  j["schema_version"] = "dba-sweep/1";
  j["config"] = cfg.to_json();
  j["point_index"] = point;
  j["chosen_r"] = result.explanation.chosen_r;
  j["detection_distance"] = result.detection.distance;
  j["r_distances"] = r_distances_json(result.explanation.r_distances);
  j["warnings"] = result.explanation.warnings;

  const fs::path out_dir = out.empty() ? default_out_dir() : fs::path(out);
  fs::create_directories(out_dir);
  const std::string stem = "sweep_r_" + std::to_string(point);
  write_text(out_dir / (stem + ".json"), j.dump(2) + "\n", force);

  std::ostringstream csv;
  csv.precision(17);
  csv << "r,distance\n";
  for (const auto& [r, dist] : result.explanation.r_distances) {
    csv << r << ",";
    if (dist) csv << *dist;
    csv << "\n";
  }
  write_text(out_dir / (stem + ".csv"), csv.str(), force);
  std::cout << (out_dir / (stem + ".json")).string() << "\n";
  return 0;
}

int cmd_stability(const RunConfig& cfg, const std::string& out, bool force) {
  Workspace ws = build_workspace(cfg, false);
  ws.codec = make_codec(cfg.codec, ws);

  Eigen::MatrixXd points;
  if (cfg.test_data.empty()) {
    points = ws.working.points;
  } else {
    const auto test = dba::load_dataset(cfg.test_data, cfg.label_column, "att_");
    points = ws.to_working_rows(test.data.points);
  }

  json j;
  j["schema_version"] = "dba-stability/1";
  j["config"] = cfg.to_json();
  j["codec"] = ws.codec->name();
  j["n"] = points.rows();
  j["label_stability"] = dba::label_stability(*ws.codec, *ws.classifier, points);
  if (ws.classifier->has_probability())
    j["probability_stability"] = dba::probability_stability(*ws.codec, *ws.classifier, points);
  else
    j["probability_stability"] = nullptr;

  const fs::path out_dir = out.empty() ? default_out_dir() : fs::path(out);
  fs::create_directories(out_dir);
  write_text(out_dir / "stability.json", j.dump(2) + "\n", force);
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local decision boundary approximation toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::string out;
  bool force = false;

  auto add_common = [&](CLI::App* cmd, bool with_methods) {
    cmd->add_option("--config", config_path, "JSON config file (dba-config/1)");
    cmd->add_option("--data", cfg.data, "training CSV");
    cmd->add_option("--test-data", cfg.test_data, "held-out CSV for test points");
    cmd->add_option("--label-column", cfg.label_column, "label column name");
    cmd->add_option("--classifier", cfg.classifier,
                    "ground-truth | linear:w,..:b | kernel:h | scored-csv:path | subprocess:cmd");
    cmd->add_option("--codec", cfg.codec, "identity | affine[:l] | subprocess:cmd");
    cmd->add_option("--annotations", cfg.annotations, "separate annotation CSV");
    cmd->add_option("--annotator-lambda", cfg.annotator_lambda, "annotator L2 penalty");
    cmd->add_flag("--raw-space{false}", cfg.standardize, "operate on raw features");
    cmd->add_option("--seed", cfg.seed, "top-level seed");
    cmd->add_option("--k", cfg.dba.k, "opposite-class neighbors");
    cmd->add_option("--m", cfg.dba.m, "simulation sample size");
    cmd->add_option("--lime-m", cfg.lime.m, "LIME sample size");
    cmd->add_option_function<double>(
        "--sigma", [&cfg](const double& v) { cfg.lime.sigma = v; },
        "LIME kernel width (default 0.75*sqrt(d))");
    cmd->add_option_function<std::string>(
        "--r-grid", [&cfg](const std::string& s) { cfg.dba.r_grid = parse_doubles(s); },
        "comma-separated r grid");
    cmd->add_option("--hyperplanes", cfg.hyperplanes, "auto | airis | none");
    cmd->add_option("--out", out, "output directory (default $DBA_OUT_DIR or .)");
    cmd->add_flag("--force", force, "overwrite existing outputs");
    if (with_methods)
      cmd->add_option("--methods", cfg.methods, "methods to evaluate")->delimiter(',');
  };

  auto* gen_moons = app.add_subcommand("gen-moons", "generate the two-moons dataset");
  int moons_n = 1000;
  double moons_noise = 0.15;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  bool gen_force = false;
  gen_moons->add_option("--n", moons_n, "number of points");
  gen_moons->add_option("--noise", moons_noise, "Gaussian noise sd");
  gen_moons->add_option("--seed", gen_seed, "seed");
  gen_moons->add_option("--out", gen_out, "output CSV path");
  gen_moons->add_flag("--force", gen_force, "overwrite");

  auto* gen_airis = app.add_subcommand("gen-airis-tab", "generate tabular AIris data");
  int airis_n = 4000;
  gen_airis->add_option("--n", airis_n, "number of rows");
  gen_airis->add_option("--seed", gen_seed, "seed");
  gen_airis->add_option("--out", gen_out, "output CSV path");
  gen_airis->add_flag("--force", gen_force, "overwrite");

  auto* explain = app.add_subcommand("explain", "explain single points");
  std::string method = "dba-tab";
  std::vector<int> point_indices;
  std::string x_literal;
  bool dump_sample = false;
  explain->add_option("--method", method, "dba-tab | lime-tab | dba-att | lime-att");
  explain->add_option("--point", point_indices, "row index to explain (repeatable)");
  explain->add_option("--x", x_literal, "literal point, comma-separated raw features");
  explain->add_flag("--dump-sample", dump_sample, "also dump the winning sample as CSV");
  add_common(explain, false);

  auto* evaluate = app.add_subcommand("evaluate", "aggregate evaluation run");
  evaluate->add_option("--points", cfg.points, "number of test points to explain");
  evaluate->add_option("--jobs", cfg.jobs, "parallel workers (classifier permitting)");
  evaluate->add_flag("--curves", cfg.curves, "dump probability-curve CSV");
  evaluate->add_option("--curve-step", cfg.curve_step, "curve step size");
  evaluate->add_flag("--no-label-filter{false}", cfg.filter_label_stable,
                     "admit label-unstable test points");
  add_common(evaluate, true);

  auto* sweep = app.add_subcommand("sweep-r", "dump the per-r tuning table for one point");
  int sweep_point = 0;
  sweep->add_option("--point", sweep_point, "row index");
  add_common(sweep, false);

  auto* stability = app.add_subcommand("stability", "codec stability diagnostics");
  add_common(stability, false);

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config_path.empty()) {
      const RunConfig file_cfg = load_config_file(config_path);
      apply_file_config(cfg, file_cfg, sub);
    }

    if (gen_moons->parsed())
      return cmd_gen_moons(moons_n, moons_noise, gen_seed, gen_out, gen_force);
    if (gen_airis->parsed()) return cmd_gen_airis_tab(airis_n, gen_seed, gen_out, gen_force);
    if (explain->parsed())
      return cmd_explain(cfg, method, point_indices, x_literal, out, dump_sample, force);
    if (evaluate->parsed()) return cmd_evaluate(cfg, out, force);
    if (sweep->parsed()) return cmd_sweep_r(cfg, sweep_point, out, force);
    if (stability->parsed()) return cmd_stability(cfg, out, force);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
