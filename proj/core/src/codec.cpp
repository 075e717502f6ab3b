#include "dba/codec.hpp"

#include <stdexcept>

#include <json.hpp>

namespace dba {

AffineCodec AffineCodec::fit(const Eigen::Ref<const Eigen::MatrixXd>& X, Eigen::Index latent) {
  if (X.rows() < 2) throw std::invalid_argument("affine codec: need at least 2 rows");
  const Eigen::Index dim = X.cols();
  if (latent < 0) latent = dim;
  if (latent < 1 || latent > dim)
    throw std::invalid_argument("affine codec: latent dimension must be in [1, dim]");

  AffineCodec codec;
  codec.input_dim_ = dim;
  codec.mean_ = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - codec.mean_.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(X.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("affine codec: eigendecomposition failed");

  // Eigenvalues come back ascending; keep the top `latent` by variance.
  codec.components_.resize(dim, latent);
  codec.scales_.resize(latent);
  for (Eigen::Index j = 0; j < latent; ++j) {
    const Eigen::Index src = dim - 1 - j;
    const double variance = std::max(eig.eigenvalues()[src], 1e-12);
    codec.components_.col(j) = eig.eigenvectors().col(src);
    codec.scales_[j] = std::sqrt(variance);
  }
  return codec;
}

Eigen::VectorXd AffineCodec::encode(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != input_dim_) throw std::invalid_argument("affine codec: encode dim mismatch");
  return (components_.transpose() * (x - mean_)).cwiseQuotient(scales_);
}

Eigen::VectorXd AffineCodec::decode(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  if (z.size() != latent_dim()) throw std::invalid_argument("affine codec: decode dim mismatch");
  return components_ * z.cwiseProduct(scales_) + mean_;
}

std::string AffineCodec::name() const {
  return "affine[" + std::to_string(latent_dim()) + "/" + std::to_string(input_dim_) + "]";
}

SubprocessCodec::SubprocessCodec(const std::string& command, Eigen::Index input_dim)
    : process_(std::make_unique<LineProcess>(command)), input_dim_(input_dim) {
  latent_dim_ = call("encode", Eigen::VectorXd::Zero(input_dim_)).size();
  if (latent_dim_ < 1) throw std::runtime_error("subprocess codec: empty latent vector");
}

Eigen::VectorXd SubprocessCodec::call(const std::string& op,
                                      const Eigen::Ref<const Eigen::VectorXd>& v) const {
  nlohmann::json request;
  request["op"] = op;
  request["v"] = std::vector<double>(v.begin(), v.end());
  const std::string reply = process_->round_trip(request.dump());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(reply);
  } catch (const std::exception&) {
    throw std::runtime_error("subprocess codec: invalid JSON reply '" + reply + "'");
  }
  if (!j.contains("v") || !j["v"].is_array())
    throw std::runtime_error("subprocess codec: reply missing array 'v'");
  const auto values = j["v"].get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

Eigen::VectorXd SubprocessCodec::encode(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != input_dim_) throw std::invalid_argument("subprocess codec: encode dim mismatch");
  return call("encode", x);
}

Eigen::VectorXd SubprocessCodec::decode(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  if (z.size() != latent_dim_) throw std::invalid_argument("subprocess codec: decode dim mismatch");
  const Eigen::VectorXd x = call("decode", z);
  if (x.size() != input_dim_)
    throw std::runtime_error("subprocess codec: decoded vector has wrong dimension");
  return x;
}

}  // namespace dba
