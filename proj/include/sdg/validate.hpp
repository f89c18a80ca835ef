#ifndef SDG_VALIDATE_HPP_
#define SDG_VALIDATE_HPP_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sdg/arrival.hpp"
#include "sdg/core.hpp"
#include "sdg/ingest.hpp"

namespace sdg {

struct KsResult {
  double statistic;  // in [0,1]
  double p_value;    // in [0,1]
  std::size_t n;
};

// Exact sup-distance between the empirical CDF and Exp(lambda).
double ks_statistic_exponential(std::span<const double> data, double lambda);

// Asymptotic two-sided p-value via the Kolmogorov series with the
// small-sample effective-n correction.
double ks_pvalue(double d, std::size_t n);

// Q(z) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 z^2)
double kolmogorov_q(double z);

double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Exponential-IAT goodness of fit per slot; cells with < 2 IATs are omitted
// and listed separately.
struct ArrivalFitReport {
  std::map<SlotKey, KsResult> per_slot;
  std::vector<SlotKey> omitted;  // too few IATs
};

ArrivalFitReport validate_arrival_fit(const ArrivalModel& model,
                                      const TrainingBuckets& buckets);

struct CountComparison {
  double mean_real;
  double var_real;
  double mean_synth;
  double var_synth;
};

struct ValidationReport {
  ArrivalFitReport arrival;
  std::map<SlotKey, CountComparison> counts;
  double duration_ks;
  double energy_ks;
};

ValidationReport compare_real_synthetic(const std::vector<Session>& real,
                                        const std::vector<Session>& synth,
                                        const TimeGrid& grid);

// JSON with fixed keys: ks_per_slot, counts, duration_ks, energy_ks.
std::string report_to_json(const ValidationReport& report);

}  // namespace sdg

#endif  // SDG_VALIDATE_HPP_
