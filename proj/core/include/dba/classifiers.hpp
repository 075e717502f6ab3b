#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>

#include "dba/classifier.hpp"
#include "dba/datagen.hpp"
#include "dba/standardizer.hpp"
#include "dba/subprocess.hpp"

namespace dba {

// Deterministic AIris ground-truth rule. Queries are in raw parameter space
// by default; constructed with a Standardizer it accepts standardized inputs
// and unstandardizes internally (the space is recorded in name()).
class AirisRuleClassifier final : public Classifier {
 public:
  explicit AirisRuleClassifier(std::optional<Standardizer> standardizer = {})
      : standardizer_(std::move(standardizer)) {}

  int label(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  bool has_probability() const override { return true; }
  double probability(const Eigen::Ref<const Eigen::VectorXd>& x) const override {
    return label(x) == 1 ? 1.0 : 0.0;  // image is exactly {0,1}
  }
  std::string name() const override {
    return standardizer_ ? "airis-rule[standardized]" : "airis-rule[raw]";
  }

 private:
  std::optional<Standardizer> standardizer_;
};

// f(x) = sign(w.x + b), ties to +1; c = sigmoid(w.x + b).
class LinearClassifier final : public Classifier {
 public:
  LinearClassifier(Eigen::VectorXd w, double b);

  int label(const Eigen::Ref<const Eigen::VectorXd>& x) const override {
    return margin(x) >= 0.0 ? 1 : -1;
  }
  bool has_probability() const override { return true; }
  double probability(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  std::string name() const override { return "linear"; }

  double margin(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return weights_.dot(x) + bias_;
  }
  const Eigen::VectorXd& weights() const { return weights_; }
  double bias() const { return bias_; }
  // Analytic distance from x to the decision plane.
  double plane_distance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return std::abs(margin(x)) / weights_.norm();
  }

 private:
  Eigen::VectorXd weights_;
  double bias_;
};

// Nadaraya-Watson smoother over a reference sample with Gaussian kernel
// K(x,xi) = exp(-|x-xi|^2 / (2 h^2)); c(x) is the kernel-weighted mean of the
// reference labels taken as {0,1}.
class KernelSmootherClassifier final : public Classifier {
 public:
  // labels in {-1,+1} are stored as {0,1} targets.
  KernelSmootherClassifier(Eigen::MatrixXd reference_points, const Eigen::VectorXi& labels,
                           double bandwidth);

  bool has_probability() const override { return true; }
  double probability(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  std::string name() const override { return "kernel-smoother"; }

  double bandwidth() const { return bandwidth_; }

 private:
  Eigen::MatrixXd refs_;    // n x d
  Eigen::VectorXd targets_; // {0,1}
  double bandwidth_;
};

// Precomputed probabilities on a scored sample: c(x) is the probability of
// the nearest scored point (Euclidean). Adapter for external models whose
// predictions were exported to CSV.
class ScoredCsvClassifier final : public Classifier {
 public:
  ScoredCsvClassifier(Eigen::MatrixXd points, Eigen::VectorXd probabilities);
  static ScoredCsvClassifier from_csv(const std::string& path,
                                      const std::string& probability_column = "p");

  bool has_probability() const override { return true; }
  double probability(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  std::string name() const override { return "scored-csv"; }

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd probs_;
};

// External model scored over a line protocol: request {"x":[...]} on stdin,
// response {"p":0.73} on stdout, one JSON document per line. Serial.
class SubprocessClassifier final : public Classifier {
 public:
  explicit SubprocessClassifier(const std::string& command);

  bool has_probability() const override { return true; }
  double probability(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  bool concurrent_safe() const override { return false; }
  std::string name() const override { return "subprocess"; }

 private:
  mutable std::unique_ptr<LineProcess> process_;
};

}  // namespace dba
