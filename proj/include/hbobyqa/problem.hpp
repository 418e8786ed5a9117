#pragma once

// Objectives with partial derivative availability, bound constraints and the
// training-set bookkeeping shared by every model builder.
//
// Direction indices are 0-based throughout the C++ API. The CLI and the CSV
// files use 1-based indices.

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "hbobyqa/errors.hpp"

namespace hbobyqa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexPair = std::pair<int, int>;

class Bounds {
 public:
  Bounds() = default;
  Bounds(Vector lower, Vector upper);

  /// Box [-inf, inf]^n.
  static Bounds unbounded(std::size_t n);

  std::size_t dimension() const { return static_cast<std::size_t>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains(const Vector& x, double tol = 0.0) const;
  Vector clip(const Vector& x) const;

 private:
  Vector lower_;
  Vector upper_;
};

/// Index sets of known first and second order partial derivatives.
/// Second order pairs are normalized to (i <= j).
class DerivativeAvailability {
 public:
  DerivativeAvailability() = default;
  DerivativeAvailability(std::size_t n, std::vector<int> first_order,
                         std::vector<IndexPair> second_order = {});

  static DerivativeAvailability none(std::size_t n) { return DerivativeAvailability(n, {}); }

  std::size_t dimension() const { return n_; }
  const std::vector<int>& first_order() const { return first_; }
  const std::vector<IndexPair>& second_order() const { return second_; }
  std::size_t kd() const { return first_.size(); }

  bool has_first(int i) const;
  bool has_second(int i, int j) const;

 private:
  std::size_t n_ = 0;
  std::vector<int> first_;
  std::vector<IndexPair> second_;
};

/// The objective together with its oracles. The derivative oracles are only
/// ever called through partial()/second_partial(), which enforce availability.
struct ObjectiveSpec {
  std::size_t dimension = 0;
  Bounds bounds;
  DerivativeAvailability availability;
  std::function<double(const Vector&)> value;
  std::function<double(const Vector&, int)> first_derivative;
  std::function<double(const Vector&, int, int)> second_derivative;

  double partial(const Vector& x, int i) const;
  double second_partial(const Vector& x, int i, int j) const;
};

struct EvaluationRecord {
  Vector point;
  double value = 0.0;
  std::map<int, double> gradient;
  std::map<IndexPair, double> hessian;

  double gradient_entry(int i) const;
  double hessian_entry(int i, int j) const;
};

class EvaluationBudget {
 public:
  explicit EvaluationBudget(std::size_t max_evaluations) : max_(max_evaluations) {}

  std::size_t max_evaluations() const { return max_; }
  std::size_t used() const { return used_; }
  std::size_t remaining() const { return max_ - used_; }
  bool exhausted() const { return used_ >= max_; }

  void charge();

 private:
  std::size_t max_;
  std::size_t used_ = 0;
};

/// Evaluates value and every available derivative at x. Only the value call
/// is billed.
EvaluationRecord evaluate(const ObjectiveSpec& spec, const Vector& x, EvaluationBudget& budget);

/// Point identity: infinity-norm distance below 1e-14 * max(1, |x|_inf).
bool same_point(const Vector& a, const Vector& b);

class TrainingSet {
 public:
  TrainingSet() = default;
  explicit TrainingSet(std::vector<EvaluationRecord> records);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t dimension() const;
  const EvaluationRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<EvaluationRecord>& records() const { return records_; }

  std::size_t incumbent_index() const;
  const EvaluationRecord& incumbent_record() const { return records_[incumbent_index()]; }

  /// True if some stored point equals x (see same_point), ignoring `skip`.
  bool contains_point(const Vector& x, std::size_t skip = static_cast<std::size_t>(-1)) const;

  /// Index of the point with largest Euclidean distance to the incumbent.
  std::size_t farthest_from_incumbent() const;

 private:
  void recompute_incumbent();

  std::vector<EvaluationRecord> records_;
  // Insertion sequence numbers; ties in value go to the earliest insertion.
  std::vector<std::size_t> inserted_;
  std::size_t next_insertion_ = 0;
  std::size_t incumbent_ = 0;

  friend TrainingSet replace_point(const TrainingSet&, std::size_t, EvaluationRecord);
};

struct Incumbent {
  std::size_t index;
  Vector point;
  double value;
};

Incumbent incumbent(const TrainingSet& ts);

TrainingSet replace_point(const TrainingSet& ts, std::size_t outgoing_index,
                          EvaluationRecord incoming);

}  // namespace hbobyqa
