#include "sdg/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace sdg {

namespace {

double lambda_for_key(const ArrivalModel& model, const SlotKey& key) {
  if (model.is_table()) {
    const auto& table = std::get<LambdaTable>(model.rate);
    return table.bounds.clamp(table.at(key));
  }
  const auto& curve = std::get<LambdaCurve>(model.rate);
  double hour = (key.slot + 0.5) * model.grid.slot_hours();
  return curve.at(key.month, key.daytype, hour);
}

std::pair<double, double> mean_var(const std::vector<int>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean =
      std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  double ss = 0.0;
  for (int x : xs) ss += (x - mean) * (x - mean);
  double var = xs.size() > 1 ? ss / double(xs.size() - 1) : 0.0;
  return {mean, var};
}

Horizon enclosing_horizon(const std::vector<Session>& sessions) {
  Timestamp lo = sessions.front().arrival();
  Timestamp hi = sessions.front().arrival();
  for (const auto& s : sessions) {
    lo = std::min(lo, s.arrival());
    hi = std::max(hi, s.arrival());
  }
  return Horizon(day_start(lo), day_start(hi) + kSecondsPerDay);
}

}  // namespace

double ks_statistic_exponential(std::span<const double> data, double lambda) {
  if (data.empty()) throw std::invalid_argument("empty sample");
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  std::vector<double> sorted(data.begin(), data.end());
  for (double x : sorted)
    if (!(x > 0.0)) throw std::invalid_argument("non-positive data in KS sample");
  std::sort(sorted.begin(), sorted.end());
  const double n = double(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double f = 1.0 - std::exp(-lambda * sorted[i]);
    d = std::max(d, std::max((double(i) + 1.0) / n - f, f - double(i) / n));
  }
  return d;
}

double kolmogorov_q(double z) {
  if (z <= 0.0) return 1.0;
  if (z < 1.18) {
    // Jacobi-transformed series: fast and accurate for small z, where the
    // direct alternating series loses precision.
    double y = std::exp(-1.23370055013616983 / (z * z));  // exp(-pi^2/(8 z^2))
    double cdf = 2.50662827463100050 / z *
                 (y + std::pow(y, 9.0) + std::pow(y, 25.0) + std::pow(y, 49.0));
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 1000; ++k) {
    double term = std::exp(-2.0 * double(k) * double(k) * z * z);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n) {
  if (d <= 0.0) return 1.0;
  double rn = std::sqrt(double(n));
  double z = (rn + 0.12 + 0.11 / rn) * d;
  return kolmogorov_q(z);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::fabs(double(i) / double(sa.size()) -
                              double(j) / double(sb.size())));
  }
  return d;
}

ArrivalFitReport validate_arrival_fit(const ArrivalModel& model,
                                      const TrainingBuckets& buckets) {
  ArrivalFitReport report;
  for (const auto& [key, iats] : buckets.iats) {
    std::vector<double> positive;
    positive.reserve(iats.size());
    for (double x : iats)
      if (x > 0.0) positive.push_back(x);
    if (positive.size() < 2) {
      report.omitted.push_back(key);
      continue;
    }
    double lambda = lambda_for_key(model, key);
    double d = ks_statistic_exponential(positive, lambda);
    report.per_slot[key] =
        KsResult{d, ks_pvalue(d, positive.size()), positive.size()};
  }
  return report;
}

ValidationReport compare_real_synthetic(const std::vector<Session>& real,
                                        const std::vector<Session>& synth,
                                        const TimeGrid& grid) {
  if (real.empty() || synth.empty())
    throw std::invalid_argument("both session lists must be non-empty");

  ValidationReport report{};

  auto count_r = bucket_counts(real, grid, enclosing_horizon(real)).counts;
  auto count_s = bucket_counts(synth, grid, enclosing_horizon(synth)).counts;

  std::vector<SlotKey> keys;
  for (const auto& [k, v] : count_r) keys.push_back(k);
  for (const auto& [k, v] : count_s) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  static const std::vector<int> kEmpty;
  for (const auto& k : keys) {
    auto rit = count_r.find(k);
    auto sit = count_s.find(k);
    auto [mr, vr] = mean_var(rit == count_r.end() ? kEmpty : rit->second);
    auto [ms, vs] = mean_var(sit == count_s.end() ? kEmpty : sit->second);
    report.counts[k] = CountComparison{mr, vr, ms, vs};
  }

  std::vector<double> dur_r, dur_s, en_r, en_s;
  for (const auto& s : real) {
    dur_r.push_back(connected_hours(s));
    en_r.push_back(s.energy_kwh());
  }
  for (const auto& s : synth) {
    dur_s.push_back(connected_hours(s));
    en_s.push_back(s.energy_kwh());
  }
  report.duration_ks = ks_two_sample(dur_r, dur_s);
  report.energy_ks = ks_two_sample(en_r, en_s);
  return report;
}

std::string report_to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["ks_per_slot"] = nlohmann::json::array();
  for (const auto& [key, ks] : report.arrival.per_slot) {
    j["ks_per_slot"].push_back({{"month", key.month},
                                {"daytype", daytype_name(key.daytype)},
                                {"slot", key.slot},
                                {"d", ks.statistic},
                                {"p", ks.p_value},
                                {"n", ks.n}});
  }
  j["counts"] = nlohmann::json::array();
  for (const auto& [key, c] : report.counts) {
    j["counts"].push_back({{"month", key.month},
                           {"daytype", daytype_name(key.daytype)},
                           {"slot", key.slot},
                           {"mean_real", c.mean_real},
                           {"var_real", c.var_real},
                           {"mean_synth", c.mean_synth},
                           {"var_synth", c.var_synth}});
  }
  j["duration_ks"] = report.duration_ks;
  j["energy_ks"] = report.energy_ks;
  return j.dump(2);
}

}  // namespace sdg
