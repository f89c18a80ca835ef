#ifndef SDG_ARRIVAL_HPP_
#define SDG_ARRIVAL_HPP_

#include <map>
#include <variant>
#include <vector>

#include "sdg/core.hpp"
#include "sdg/rng.hpp"

namespace sdg {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LambdaBounds {
  double lambda_min = 1e-6;  // arrivals/hour
  double lambda_max = 1000.0;

  double clamp(double v) const {
    return v < lambda_min ? lambda_min : (v > lambda_max ? lambda_max : v);
  }
};

struct LambdaTable {
  std::map<SlotKey, double> values;  // arrivals/hour, complete over the grid
  LambdaBounds bounds;

  double at(const SlotKey& key) const {
    auto it = values.find(key);
    if (it == values.end()) return bounds.lambda_min;
    return it->second;
  }
};

// Fourier series on log-rate, 24h periodic, one curve per (month, daytype).
struct FourierCurve {
  double a0 = 0.0;
  std::vector<double> a;  // cos coefficients, k = 1..K
  std::vector<double> b;  // sin coefficients

  double log_rate_at_hour(double h) const {
    double y = a0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      double w = 2.0 * 3.141592653589793238462643383 * double(k + 1) * h / 24.0;
      y += a[k] * std::cos(w) + b[k] * std::sin(w);
    }
    return y;
  }
};

struct LambdaCurve {
  std::map<std::pair<int, Daytype>, FourierCurve> curves;
  int order = 4;
  LambdaBounds bounds;

  double at(int month, Daytype dt, double hour_of_day) const;
};

struct NegBinom {
  double r;  // > 0
  double p;  // in (0,1)
};

// Per-slot count distribution; Poisson(lambda*T) unless the key is listed.
struct CountFamily {
  std::map<SlotKey, NegBinom> negbinom;

  bool is_negbinom(const SlotKey& key) const {
    return negbinom.contains(key);
  }
};

enum class IatBoundaryPolicy { Naive, Restart };

struct ArrivalModel {
  std::variant<LambdaTable, LambdaCurve> rate;
  CountFamily counts;
  TimeGrid grid;
  IatBoundaryPolicy iat_boundary = IatBoundaryPolicy::Restart;

  bool is_table() const { return std::holds_alternative<LambdaTable>(rate); }
  const LambdaBounds& bounds() const {
    return is_table() ? std::get<LambdaTable>(rate).bounds
                      : std::get<LambdaCurve>(rate).bounds;
  }
};

// lambda_hat = arrivals / exposure hours, clamped. Unobserved cells fall back
// to the (month, daytype) pooled rate, then the global rate, then lambda_min.
LambdaTable fit_lambda_piecewise(
    const std::map<SlotKey, std::vector<int>>& counts,
    const std::map<SlotKey, double>& observed_hours, const TimeGrid& grid,
    const LambdaBounds& bounds);

// Least squares of the order-K Fourier basis against log lambda at slot
// centers; evaluation exponentiates and clamps.
LambdaCurve fit_lambda_curve(const LambdaTable& table, const TimeGrid& grid,
                             int order);

double eval_lambda(const ArrivalModel& model, Timestamp t);

// Sample variance (n-1 denominator) over sample mean; 1.0 when n == 1.
double overdispersion_ratio(const std::vector<int>& counts);

// Method of moments. Throws FitError when not overdispersed.
NegBinom fit_negbinom(const std::vector<int>& counts);

struct OverdispersionConfig {
  double ratio_threshold = 1.5;
  std::size_t min_occurrences = 30;
};

CountFamily fit_count_family(const std::map<SlotKey, std::vector<int>>& counts,
                             const OverdispersionConfig& cfg);

std::vector<Timestamp> sample_arrivals_iat(const ArrivalModel& model,
                                           const Horizon& horizon, Rng& rng);

std::vector<Timestamp> sample_arrivals_counts(const ArrivalModel& model,
                                              const Horizon& horizon, Rng& rng);

}  // namespace sdg

#endif  // SDG_ARRIVAL_HPP_
