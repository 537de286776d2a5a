#include "peer/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace peer {

namespace {

void check_shapes(const Matrix& a, const Matrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInputError(std::string(where) + ": shape mismatch");
  }
}

double ratio_or_zero(double num, double den) {
  return den == 0.0 ? 0.0 : num / den;
}

}  // namespace

double estimation_error(const Matrix& c_hat, const Matrix& c_star) {
  check_shapes(c_hat, c_star, "estimation_error");
  const double pq = static_cast<double>(c_hat.rows() * c_hat.cols());
  return (c_hat - c_star).squaredNorm() / pq;
}

double prediction_error(const Matrix& x, const Matrix& c_hat,
                        const Matrix& c_star) {
  check_shapes(c_hat, c_star, "prediction_error");
  if (x.cols() != c_hat.rows()) {
    throw InvalidInputError("prediction_error: X columns do not match p");
  }
  const double nq = static_cast<double>(x.rows() * c_hat.cols());
  return (x * (c_hat - c_star)).squaredNorm() / nq;
}

std::pair<double, double> selection_rates(
    const std::vector<std::vector<Index>>& estimated_supports,
    const std::vector<std::vector<Index>>& true_supports, Index p) {
  if (p < 1) {
    throw InvalidInputError("selection_rates: p must be positive");
  }
  const std::size_t r_star = true_supports.size();
  Index tp = 0, fp = 0, tn = 0, fn = 0;
  std::vector<char> est_flag(static_cast<std::size_t>(p));
  std::vector<char> true_flag(static_cast<std::size_t>(p));
  for (std::size_t k = 0; k < r_star; ++k) {
    std::fill(est_flag.begin(), est_flag.end(), 0);
    std::fill(true_flag.begin(), true_flag.end(), 0);
    if (k < estimated_supports.size()) {
      for (Index j : estimated_supports[k]) {
        if (j < 0 || j >= p) {
          throw InvalidInputError("selection_rates: support index out of range");
        }
        est_flag[static_cast<std::size_t>(j)] = 1;
      }
    }
    for (Index j : true_supports[k]) {
      if (j < 0 || j >= p) {
        throw InvalidInputError("selection_rates: support index out of range");
      }
      true_flag[static_cast<std::size_t>(j)] = 1;
    }
    for (Index j = 0; j < p; ++j) {
      const bool e = est_flag[static_cast<std::size_t>(j)] != 0;
      const bool t = true_flag[static_cast<std::size_t>(j)] != 0;
      tp += e && t;
      fp += e && !t;
      tn += !e && !t;
      fn += !e && t;
    }
  }
  const double fpr = ratio_or_zero(static_cast<double>(fp),
                                   static_cast<double>(tn + fp));
  const double fnr = ratio_or_zero(static_cast<double>(fn),
                                   static_cast<double>(tp + fn));
  return {fpr, fnr};
}

SummaryStats summarize(const std::vector<FitScore>& scores) {
  if (scores.empty()) {
    throw InvalidInputError("summarize: empty score list");
  }
  constexpr double FitScore::* kFields[] = {
      &FitScore::er_c, &FitScore::er_xc, &FitScore::fpr, &FitScore::fnr,
      &FitScore::runtime_seconds};
  const double count = static_cast<double>(scores.size());

  SummaryStats out;
  for (auto field : kFields) {
    double sum = 0.0;
    for (const auto& s : scores) sum += s.*field;
    const double mean = sum / count;
    double sq = 0.0;
    for (const auto& s : scores) {
      const double d = s.*field - mean;
      sq += d * d;
    }
    const double sd = scores.size() > 1 ? std::sqrt(sq / (count - 1.0)) : 0.0;
    out.mean.*field = mean;
    out.sd.*field = sd;
  }
  return out;
}

}  // namespace peer
