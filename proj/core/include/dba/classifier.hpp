#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dba {

// Black-box binary classifier contract. Hard labels live in {-1,+1};
// a probability c(x) in [0,1] for the +1 class is optional. The tie
// c(x) = 0.5 resolves to +1 uniformly across all implementations.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual int label(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return probability(x) >= 0.5 ? 1 : -1;
  }

  virtual bool has_probability() const { return false; }

  virtual double probability(const Eigen::Ref<const Eigen::VectorXd>&) const {
    throw std::logic_error(name() + ": no probability function available");
  }

  // Whether f(x) = +1 <=> c(x) > 0.5 is guaranteed wherever c(x) != 0.5.
  virtual bool probability_consistent() const { return has_probability(); }

  // Implementations that are not safe for concurrent queries (e.g. a
  // subprocess pipe) return false; the pipeline then stays serial.
  virtual bool concurrent_safe() const { return true; }

  virtual std::string name() const = 0;
};

}  // namespace dba
