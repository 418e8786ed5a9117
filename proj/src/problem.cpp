#include "hbobyqa/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hbobyqa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::WrongSetSize: return "WrongSetSize";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateModelDecrease: return "DegenerateModelDecrease";
    case ErrorCode::UnavailableDerivative: return "UnavailableDerivative";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Bounds::Bounds(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw Error(ErrorCode::InvalidArgument, "bounds of different length");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] <= upper_[i])) {
      throw Error(ErrorCode::InvalidArgument, "lower bound exceeds upper bound in coordinate " +
                                                  std::to_string(i));
    }
  }
}

Bounds Bounds::unbounded(std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  return Bounds(Vector::Constant(static_cast<Eigen::Index>(n), -inf),
                Vector::Constant(static_cast<Eigen::Index>(n), inf));
}

bool Bounds::contains(const Vector& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower_[i] - tol && x[i] <= upper_[i] + tol)) return false;
  }
  return true;
}

Vector Bounds::clip(const Vector& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

DerivativeAvailability::DerivativeAvailability(std::size_t n, std::vector<int> first_order,
                                               std::vector<IndexPair> second_order)
    : n_(n), first_(std::move(first_order)), second_(std::move(second_order)) {
  const int dim = static_cast<int>(n);
  for (int i : first_) {
    if (i < 0 || i >= dim) {
      throw Error(ErrorCode::InvalidArgument, "first order index out of range: " + std::to_string(i));
    }
  }
  std::sort(first_.begin(), first_.end());
  first_.erase(std::unique(first_.begin(), first_.end()), first_.end());

  for (auto& [i, j] : second_) {
    if (i < 0 || i >= dim || j < 0 || j >= dim) {
      throw Error(ErrorCode::InvalidArgument, "second order pair out of range");
    }
    if (i > j) std::swap(i, j);
  }
  std::sort(second_.begin(), second_.end());
  second_.erase(std::unique(second_.begin(), second_.end()), second_.end());
}

bool DerivativeAvailability::has_first(int i) const {
  return std::binary_search(first_.begin(), first_.end(), i);
}

bool DerivativeAvailability::has_second(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(second_.begin(), second_.end(), IndexPair{i, j});
}

double ObjectiveSpec::partial(const Vector& x, int i) const {
  if (!availability.has_first(i) || !first_derivative) {
    throw Error(ErrorCode::UnavailableDerivative,
                "first derivative in direction " + std::to_string(i) + " is not available");
  }
  return first_derivative(x, i);
}

double ObjectiveSpec::second_partial(const Vector& x, int i, int j) const {
  if (!availability.has_second(i, j) || !second_derivative) {
    throw Error(ErrorCode::UnavailableDerivative, "second derivative (" + std::to_string(i) + ", " +
                                                      std::to_string(j) + ") is not available");
  }
  return second_derivative(x, std::min(i, j), std::max(i, j));
}

double EvaluationRecord::gradient_entry(int i) const {
  auto it = gradient.find(i);
  if (it == gradient.end()) {
    throw Error(ErrorCode::MissingDerivative, "record has no gradient entry " + std::to_string(i));
  }
  return it->second;
}

double EvaluationRecord::hessian_entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = hessian.find({i, j});
  if (it == hessian.end()) {
    throw Error(ErrorCode::MissingDerivative, "record has no second derivative entry");
  }
  return it->second;
}

void EvaluationBudget::charge() {
  if (exhausted()) throw Error(ErrorCode::BudgetExhausted, "evaluation budget exhausted");
  ++used_;
}

EvaluationRecord evaluate(const ObjectiveSpec& spec, const Vector& x, EvaluationBudget& budget) {
  if (static_cast<std::size_t>(x.size()) != spec.dimension) {
    throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
  }
  if (!spec.bounds.contains(x)) throw Error(ErrorCode::OutOfBounds, "point violates bounds");
  if (budget.exhausted()) throw Error(ErrorCode::BudgetExhausted, "evaluation budget exhausted");

  EvaluationRecord rec;
  rec.point = x;
  rec.value = spec.value(x);
  budget.charge();
  for (int i : spec.availability.first_order()) rec.gradient[i] = spec.partial(x, i);
  for (const auto& [i, j] : spec.availability.second_order()) {
    rec.hessian[{i, j}] = spec.second_partial(x, i, j);
  }
  return rec;
}

bool same_point(const Vector& a, const Vector& b) {
  const double scale = std::max({1.0, a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()});
  return (a - b).lpNorm<Eigen::Infinity>() < 1e-14 * scale;
}

TrainingSet::TrainingSet(std::vector<EvaluationRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (contains_point(records_[i].point, i)) {
      throw Error(ErrorCode::DuplicatePoint, "training points must be pairwise distinct");
    }
    inserted_.push_back(next_insertion_++);
  }
  recompute_incumbent();
}

std::size_t TrainingSet::dimension() const {
  return records_.empty() ? 0 : static_cast<std::size_t>(records_.front().point.size());
}

std::size_t TrainingSet::incumbent_index() const {
  if (records_.empty()) throw Error(ErrorCode::EmptySet, "training set is empty");
  return incumbent_;
}

bool TrainingSet::contains_point(const Vector& x, std::size_t skip) const {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (i != skip && same_point(records_[i].point, x)) return true;
  }
  return false;
}

std::size_t TrainingSet::farthest_from_incumbent() const {
  const Vector& xopt = incumbent_record().point;
  std::size_t best = incumbent_;
  double best_dist = -1.0;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const double d = (records_[i].point - xopt).norm();
    if (d > best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

void TrainingSet::recompute_incumbent() {
  incumbent_ = 0;
  for (std::size_t i = 1; i < records_.size(); ++i) {
    const double v = records_[i].value;
    const double best = records_[incumbent_].value;
    if (v < best || (v == best && inserted_[i] < inserted_[incumbent_])) incumbent_ = i;
  }
}

Incumbent incumbent(const TrainingSet& ts) {
  const std::size_t i = ts.incumbent_index();
  return {i, ts[i].point, ts[i].value};
}

TrainingSet replace_point(const TrainingSet& ts, std::size_t outgoing_index,
                          EvaluationRecord incoming) {
  if (outgoing_index >= ts.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "outgoing index " + std::to_string(outgoing_index));
  }
  if (ts.contains_point(incoming.point, outgoing_index)) {
    throw Error(ErrorCode::DuplicatePoint, "incoming point already in the training set");
  }
  TrainingSet out = ts;
  out.records_[outgoing_index] = std::move(incoming);
  out.inserted_[outgoing_index] = out.next_insertion_++;
  out.recompute_incumbent();
  return out;
}

}  // namespace hbobyqa
