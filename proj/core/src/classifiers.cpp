#include "dba/classifiers.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dba {

int AirisRuleClassifier::label(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != 5)
    throw std::invalid_argument("airis-rule: expected 5 features, got " +
                                std::to_string(x.size()));
  const Eigen::VectorXd raw = standardizer_ ? standardizer_->inverse(x) : Eigen::VectorXd(x);
  return airis_class_rule(AirisParams::from_vector(raw));
}

LinearClassifier::LinearClassifier(Eigen::VectorXd w, double b)
    : weights_(std::move(w)), bias_(b) {
  if (weights_.size() == 0 || weights_.isZero(0.0))
    throw std::invalid_argument("linear classifier: zero weight vector");
}

double LinearClassifier::probability(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double t = margin(x);
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

KernelSmootherClassifier::KernelSmootherClassifier(Eigen::MatrixXd reference_points,
                                                   const Eigen::VectorXi& labels,
                                                   double bandwidth)
    : refs_(std::move(reference_points)), bandwidth_(bandwidth) {
  if (refs_.rows() == 0) throw std::invalid_argument("kernel smoother: empty reference set");
  if (labels.size() != refs_.rows())
    throw std::invalid_argument("kernel smoother: label count mismatch");
  if (!(bandwidth_ > 0.0)) throw std::invalid_argument("kernel smoother: bandwidth must be > 0");
  targets_ = (labels.cast<double>().array() + 1.0) / 2.0;
}

double KernelSmootherClassifier::probability(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != refs_.cols())
    throw std::invalid_argument("kernel smoother: dimension mismatch");
  Eigen::VectorXd neg_sq = -(refs_.rowwise() - x.transpose()).rowwise().squaredNorm() /
                           (2.0 * bandwidth_ * bandwidth_);
  // Shift by the max exponent so far-away queries do not underflow to 0/0.
  const double shift = neg_sq.maxCoeff();
  const Eigen::VectorXd w = (neg_sq.array() - shift).exp();
  return targets_.dot(w) / w.sum();
}

ScoredCsvClassifier::ScoredCsvClassifier(Eigen::MatrixXd points, Eigen::VectorXd probabilities)
    : points_(std::move(points)), probs_(std::move(probabilities)) {
  if (points_.rows() == 0) throw std::invalid_argument("scored-csv: empty sample");
  if (probs_.size() != points_.rows())
    throw std::invalid_argument("scored-csv: probability count mismatch");
  for (Eigen::Index i = 0; i < probs_.size(); ++i)
    if (probs_[i] < 0.0 || probs_[i] > 1.0)
      throw std::invalid_argument("scored-csv: probability outside [0,1] at row " +
                                  std::to_string(i));
}

ScoredCsvClassifier ScoredCsvClassifier::from_csv(const std::string& path,
                                                  const std::string& probability_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scored-csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("scored-csv: '" + path + "' is empty");
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  auto it = std::find(names.begin(), names.end(), probability_column);
  if (it == names.end())
    throw std::runtime_error("scored-csv: column '" + probability_column + "' not found");
  const std::size_t pcol = static_cast<std::size_t>(it - names.begin());

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("scored-csv: non-numeric cell at line " +
                                 std::to_string(lineno));
      }
    }
    if (row.size() != names.size())
      throw std::runtime_error("scored-csv: ragged row at line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("scored-csv: no data rows in '" + path + "'");

  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(names.size() - 1));
  Eigen::VectorXd probs(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::Index jj = 0;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (j == pcol)
        probs[static_cast<Eigen::Index>(i)] = rows[i][j];
      else
        pts(static_cast<Eigen::Index>(i), jj++) = rows[i][j];
    }
  }
  return ScoredCsvClassifier(std::move(pts), std::move(probs));
}

double ScoredCsvClassifier::probability(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != points_.cols())
    throw std::invalid_argument("scored-csv: dimension mismatch");
  Eigen::Index best = 0;
  (points_.rowwise() - x.transpose()).rowwise().squaredNorm().minCoeff(&best);
  return probs_[best];
}

SubprocessClassifier::SubprocessClassifier(const std::string& command)
    : process_(std::make_unique<LineProcess>(command)) {}

double SubprocessClassifier::probability(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  nlohmann::json request;
  request["x"] = std::vector<double>(x.begin(), x.end());
  const std::string reply = process_->round_trip(request.dump());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(reply);
  } catch (const std::exception&) {
    throw std::runtime_error("subprocess classifier: invalid JSON reply '" + reply + "'");
  }
  if (!j.contains("p") || !j["p"].is_number())
    throw std::runtime_error("subprocess classifier: reply missing numeric 'p'");
  const double p = j["p"].get<double>();
  if (p < 0.0 || p > 1.0)
    throw std::runtime_error("subprocess classifier: probability outside [0,1]");
  return p;
}

}  // namespace dba
