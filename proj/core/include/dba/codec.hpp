#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "dba/classifier.hpp"
#include "dba/subprocess.hpp"

namespace dba {

// Encoder/decoder pair between input space X and a latent space Z in which
// Euclidean distance is treated as meaningful.
class Codec {
 public:
  virtual ~Codec() = default;
  virtual Eigen::VectorXd encode(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
  virtual Eigen::VectorXd decode(const Eigen::Ref<const Eigen::VectorXd>& z) const = 0;
  virtual Eigen::Index latent_dim() const = 0;
  virtual std::string name() const = 0;
  virtual bool concurrent_safe() const { return true; }
};

class IdentityCodec final : public Codec {
 public:
  explicit IdentityCodec(Eigen::Index dim) : dim_(dim) {}
  Eigen::VectorXd encode(const Eigen::Ref<const Eigen::VectorXd>& x) const override {
    return x;
  }
  Eigen::VectorXd decode(const Eigen::Ref<const Eigen::VectorXd>& z) const override {
    return z;
  }
  Eigen::Index latent_dim() const override { return dim_; }
  std::string name() const override { return "identity"; }

 private:
  Eigen::Index dim_;
};

// PCA whitening learned from data: z = D^(-1/2) V^T (x - mu) over the top
// `latent` principal components, decode is the transposed map. With
// latent < dim the round trip is lossy, which makes this codec double as a
// label-stability stress case.
class AffineCodec final : public Codec {
 public:
  static AffineCodec fit(const Eigen::Ref<const Eigen::MatrixXd>& X, Eigen::Index latent = -1);

  Eigen::VectorXd encode(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::VectorXd decode(const Eigen::Ref<const Eigen::VectorXd>& z) const override;
  Eigen::Index latent_dim() const override { return scales_.size(); }
  std::string name() const override;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd components_;  // dim x latent, orthonormal columns
  Eigen::VectorXd scales_;      // sqrt of component variances
  Eigen::Index input_dim_ = 0;
};

// External codec over the line protocol: {"op":"encode"|"decode","v":[...]}
// in, {"v":[...]} out. Serial.
class SubprocessCodec final : public Codec {
 public:
  SubprocessCodec(const std::string& command, Eigen::Index input_dim);

  Eigen::VectorXd encode(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::VectorXd decode(const Eigen::Ref<const Eigen::VectorXd>& z) const override;
  Eigen::Index latent_dim() const override { return latent_dim_; }
  std::string name() const override { return "subprocess"; }
  bool concurrent_safe() const override { return false; }

 private:
  Eigen::VectorXd call(const std::string& op, const Eigen::Ref<const Eigen::VectorXd>& v) const;

  mutable std::unique_ptr<LineProcess> process_;
  Eigen::Index input_dim_;
  Eigen::Index latent_dim_ = 0;
};

// Classifier view of f through a codec: labels in Z via z -> decode -> f.
class LatentClassifier final : public Classifier {
 public:
  LatentClassifier(const Codec& codec, const Classifier& f) : codec_(codec), f_(f) {}

  int label(const Eigen::Ref<const Eigen::VectorXd>& z) const override {
    return f_.label(codec_.decode(z));
  }
  bool has_probability() const override { return f_.has_probability(); }
  double probability(const Eigen::Ref<const Eigen::VectorXd>& z) const override {
    return f_.probability(codec_.decode(z));
  }
  bool probability_consistent() const override { return f_.probability_consistent(); }
  bool concurrent_safe() const override {
    return codec_.concurrent_safe() && f_.concurrent_safe();
  }
  std::string name() const override { return f_.name() + "@" + codec_.name(); }

 private:
  const Codec& codec_;
  const Classifier& f_;
};

}  // namespace dba
