#include "dba/standardizer.hpp"

#include <stdexcept>

#include <json.hpp>

namespace dba {

namespace {
void check_dim(const Standardizer& s, Eigen::Index got) {
  if (got != s.dim())
    throw std::invalid_argument("standardizer: vector length " + std::to_string(got) +
                                " does not match fitted dimension " +
                                std::to_string(s.dim()));
}
}  // namespace

Eigen::VectorXd Standardizer::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(*this, x.size());
  return (x - means).cwiseQuotient(sds);
}

Eigen::VectorXd Standardizer::inverse(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  check_dim(*this, z.size());
  return z.cwiseProduct(sds) + means;
}

Eigen::MatrixXd Standardizer::apply_rows(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  check_dim(*this, X.cols());
  return (X.rowwise() - means.transpose()).array().rowwise() / sds.transpose().array();
}

Eigen::MatrixXd Standardizer::inverse_rows(const Eigen::Ref<const Eigen::MatrixXd>& Z) const {
  check_dim(*this, Z.cols());
  return (Z.array().rowwise() * sds.transpose().array()).rowwise() + means.transpose().array();
}

std::string Standardizer::to_json() const {
  nlohmann::json j;
  j["means"] = std::vector<double>(means.begin(), means.end());
  j["sds"] = std::vector<double>(sds.begin(), sds.end());
  j["feature_names"] = feature_names;
  return j.dump();
}

Standardizer Standardizer::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Standardizer s;
  const auto means = j.at("means").get<std::vector<double>>();
  const auto sds = j.at("sds").get<std::vector<double>>();
  if (means.size() != sds.size())
    throw std::invalid_argument("standardizer: means/sds size mismatch in JSON");
  s.means = Eigen::Map<const Eigen::VectorXd>(means.data(), static_cast<Eigen::Index>(means.size()));
  s.sds = Eigen::Map<const Eigen::VectorXd>(sds.data(), static_cast<Eigen::Index>(sds.size()));
  if (j.contains("feature_names")) s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (Eigen::Index i = 0; i < s.sds.size(); ++i)
    if (!(s.sds[i] > 0.0))
      throw std::invalid_argument("standardizer: non-positive sd in JSON");
  return s;
}

Standardizer fit_standardizer(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              std::vector<std::string> feature_names) {
  if (X.rows() < 2) throw std::invalid_argument("standardizer: need at least 2 rows");
  Standardizer s;
  s.means = X.colwise().mean();
  // Population convention: divide by n.
  const Eigen::MatrixXd centered = X.rowwise() - s.means.transpose();
  s.sds = centered.array().square().colwise().mean().sqrt();
  for (Eigen::Index j = 0; j < s.sds.size(); ++j)
    if (!(s.sds[j] > 0.0)) {
      const std::string name = feature_names.empty() ? "column " + std::to_string(j)
                                                     : "column '" + feature_names[static_cast<std::size_t>(j)] + "'";
      throw std::invalid_argument("standardizer: constant " + name + " (sd = 0)");
    }
  s.feature_names = std::move(feature_names);
  return s;
}

Standardizer fit_standardizer(const Dataset& data) {
  return fit_standardizer(data.points, data.feature_names);
}

}  // namespace dba
