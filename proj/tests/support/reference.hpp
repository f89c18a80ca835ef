// Ground-truth reference generator for tests. Independent of the library's
// sampling path: std::mt19937_64 plus standard-library distributions, driven
// directly by known parameters.
#ifndef SDG_TESTS_REFERENCE_HPP_
#define SDG_TESTS_REFERENCE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "sdg/core.hpp"

namespace sdg::testing {

struct RefMixture {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> stddevs;

  double sample_positive(std::mt19937_64& rng) const {
    std::discrete_distribution<std::size_t> pick(weights.begin(),
                                                 weights.end());
    for (;;) {
      std::size_t j = pick(rng);
      std::normal_distribution<double> normal(means[j], stddevs[j]);
      double x = normal(rng);
      if (x > 0.0) return x;
    }
  }
};

struct ReferenceTruth {
  // arrivals/hour as a function of (month 1-12, weekend?, slot)
  std::function<double(int, bool, int)> lambda;
  TimeGrid grid{60};
  RefMixture duration;  // hours
  RefMixture energy;    // kWh
};

// Flat-profile default truth used across tests: lambda 2/h, duration around
// 3 h, energy around 8 kWh.
inline ReferenceTruth flat_truth() {
  ReferenceTruth t;
  t.lambda = [](int, bool, int) { return 2.0; };
  t.duration = RefMixture{{1.0}, {3.0}, {0.8}};
  t.energy = RefMixture{{1.0}, {8.0}, {2.0}};
  return t;
}

inline std::vector<Session> generate_reference(const ReferenceTruth& truth,
                                               const Horizon& horizon,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Session> out;
  const std::int64_t slot_secs = std::int64_t(truth.grid.slot_minutes) * 60;
  std::size_t id = 0;
  for (Timestamp day = day_start(horizon.start); day < horizon.end;
       day += kSecondsPerDay) {
    int month = month_of(day);
    bool weekend = daytype_of(day) == Daytype::Weekend;
    for (int slot = 0; slot < truth.grid.slots_per_day(); ++slot) {
      Timestamp lo = day + slot * slot_secs;
      if (lo < horizon.start || lo + slot_secs > horizon.end) continue;
      double mean = truth.lambda(month, weekend, slot) * truth.grid.slot_hours();
      std::poisson_distribution<int> pois(mean);
      int n = pois(rng);
      std::vector<Timestamp> times;
      for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::int64_t> within(0, slot_secs - 1);
        times.push_back(lo + within(rng));
      }
      std::sort(times.begin(), times.end());
      for (Timestamp t : times) {
        double dur_h = truth.duration.sample_positive(rng);
        double en = truth.energy.sample_positive(rng);
        Timestamp dep =
            t + std::max<std::int64_t>(1, std::llround(dur_h * 3600.0));
        char buf[24];
        std::snprintf(buf, sizeof(buf), "ref-%06zu", ++id);
        out.push_back(*Session::make(buf, t, dep, en));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Session& a, const Session& b) {
                     return a.arrival() < b.arrival();
                   });
  return out;
}

}  // namespace sdg::testing

#endif  // SDG_TESTS_REFERENCE_HPP_
