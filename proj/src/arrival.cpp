#include "sdg/arrival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sdg {

namespace {

constexpr double kPi = 3.141592653589793238462643383;

double hour_of_day(Timestamp t) {
  return double(t - day_start(t)) / 3600.0;
}

struct Moments {
  double mean;
  double variance;  // n-1 denominator, 0 when n == 1
  std::size_t n;
};

Moments count_moments(const std::vector<int>& counts) {
  if (counts.empty()) throw FitError("empty count sample");
  double mean = std::accumulate(counts.begin(), counts.end(), 0.0) /
                double(counts.size());
  double ss = 0.0;
  for (int c : counts) ss += (c - mean) * (c - mean);
  double var = counts.size() > 1 ? ss / double(counts.size() - 1) : 0.0;
  return {mean, var, counts.size()};
}

// Strictly increasing second-resolution output; collisions get bumped.
void finalize_arrivals(std::vector<Timestamp>& out, const Horizon& horizon) {
  std::sort(out.begin(), out.end());
  std::vector<Timestamp> unique;
  unique.reserve(out.size());
  for (Timestamp t : out) {
    if (!unique.empty() && t <= unique.back()) t = unique.back() + 1;
    if (t >= horizon.end) break;
    unique.push_back(t);
  }
  out = std::move(unique);
}

}  // namespace

double LambdaCurve::at(int month, Daytype dt, double hour) const {
  auto it = curves.find({month, dt});
  if (it == curves.end()) return bounds.lambda_min;
  return bounds.clamp(std::exp(it->second.log_rate_at_hour(hour)));
}

LambdaTable fit_lambda_piecewise(
    const std::map<SlotKey, std::vector<int>>& counts,
    const std::map<SlotKey, double>& observed_hours, const TimeGrid& grid,
    const LambdaBounds& bounds) {
  bool any = false;
  for (const auto& [key, c] : counts)
    if (!c.empty()) any = true;
  if (!any) throw FitError("no training counts");

  std::map<SlotKey, double> fitted;
  std::map<std::pair<int, Daytype>, std::pair<double, double>> pool;  // arr, hrs
  double global_arrivals = 0.0, global_hours = 0.0;

  for (const auto& [key, c] : counts) {
    auto it = observed_hours.find(key);
    if (it == observed_hours.end() || it->second <= 0.0)
      throw FitError("count bucket without positive observed hours");
    double arrivals = std::accumulate(c.begin(), c.end(), 0.0);
    fitted[key] = bounds.clamp(arrivals / it->second);
    auto& [pa, ph] = pool[{key.month, key.daytype}];
    pa += arrivals;
    ph += it->second;
    global_arrivals += arrivals;
    global_hours += it->second;
  }

  double global_rate = bounds.clamp(global_arrivals / global_hours);

  LambdaTable table;
  table.bounds = bounds;
  for (int month = 1; month <= 12; ++month) {
    for (Daytype dt : {Daytype::Weekday, Daytype::Weekend}) {
      for (int slot = 0; slot < grid.slots_per_day(); ++slot) {
        SlotKey key{month, dt, slot};
        auto it = fitted.find(key);
        if (it != fitted.end()) {
          table.values[key] = it->second;
          continue;
        }
        auto pit = pool.find({month, dt});
        if (pit != pool.end() && pit->second.second > 0.0) {
          table.values[key] =
              bounds.clamp(pit->second.first / pit->second.second);
        } else {
          table.values[key] = global_rate;
        }
      }
    }
  }
  return table;
}

LambdaCurve fit_lambda_curve(const LambdaTable& table, const TimeGrid& grid,
                             int order) {
  const int n = grid.slots_per_day();
  if (order < 0 || 2 * order + 1 > n)
    throw FitError("Fourier order too high for the slot grid");

  LambdaCurve curve;
  curve.order = order;
  curve.bounds = table.bounds;

  for (int month = 1; month <= 12; ++month) {
    for (Daytype dt : {Daytype::Weekday, Daytype::Weekend}) {
      std::vector<double> y(n);
      for (int slot = 0; slot < n; ++slot) {
        auto it = table.values.find(SlotKey{month, dt, slot});
        if (it == table.values.end())
          throw FitError("lambda table incomplete");
        y[slot] = std::log(it->second);
      }
      // Slot centers are a uniform grid over one period, so the Fourier
      // basis is orthogonal and the least-squares solution is a direct
      // projection.
      FourierCurve fc;
      fc.a0 = std::accumulate(y.begin(), y.end(), 0.0) / n;
      fc.a.resize(order);
      fc.b.resize(order);
      for (int k = 1; k <= order; ++k) {
        double ca = 0.0, cb = 0.0;
        for (int i = 0; i < n; ++i) {
          double w = 2.0 * kPi * k * (i + 0.5) / n;
          ca += y[i] * std::cos(w);
          cb += y[i] * std::sin(w);
        }
        fc.a[k - 1] = 2.0 * ca / n;
        fc.b[k - 1] = 2.0 * cb / n;
      }
      curve.curves[{month, dt}] = fc;
    }
  }
  return curve;
}

double eval_lambda(const ArrivalModel& model, Timestamp t) {
  if (model.is_table()) {
    const auto& table = std::get<LambdaTable>(model.rate);
    return table.bounds.clamp(table.at(slot_key_of(t, model.grid)));
  }
  const auto& curve = std::get<LambdaCurve>(model.rate);
  return curve.at(month_of(t), daytype_of(t), hour_of_day(t));
}

double overdispersion_ratio(const std::vector<int>& counts) {
  auto m = count_moments(counts);
  if (m.mean <= 0.0) throw FitError("zero mean count sample");
  if (m.n == 1) return 1.0;
  return m.variance / m.mean;
}

NegBinom fit_negbinom(const std::vector<int>& counts) {
  auto m = count_moments(counts);
  if (m.mean <= 0.0) throw FitError("zero mean count sample");
  if (!(m.variance > m.mean)) throw FitError("sample is not overdispersed");
  return NegBinom{m.mean * m.mean / (m.variance - m.mean),
                  m.mean / m.variance};
}

CountFamily fit_count_family(const std::map<SlotKey, std::vector<int>>& counts,
                             const OverdispersionConfig& cfg) {
  CountFamily family;
  for (const auto& [key, c] : counts) {
    if (c.size() < cfg.min_occurrences) continue;
    auto m = count_moments(c);
    if (m.mean <= 0.0) continue;
    if (m.variance / m.mean > cfg.ratio_threshold)
      family.negbinom[key] = fit_negbinom(c);
  }
  return family;
}

std::vector<Timestamp> sample_arrivals_iat(const ArrivalModel& model,
                                           const Horizon& horizon, Rng& rng) {
  std::vector<Timestamp> out;
  const std::int64_t slot_secs = std::int64_t(model.grid.slot_minutes) * 60;
  double t = double(horizon.start);  // continuous seconds

  if (model.iat_boundary == IatBoundaryPolicy::Naive) {
    // The documented pitfall: a large gap drawn under a low rate jumps over
    // later slots regardless of their rates.
    for (;;) {
      double rate = eval_lambda(model, Timestamp(t));
      t += rng.exponential(rate) * 3600.0;
      if (t >= double(horizon.end)) break;
      out.push_back(Timestamp(std::llround(t)));
    }
  } else {
    for (;;) {
      Timestamp now = Timestamp(t);
      Timestamp slot_end =
          day_start(now) +
          ((now - day_start(now)) / slot_secs + 1) * slot_secs;
      // Rate at the slot midpoint so curve models behave piecewise-constant.
      Timestamp mid = slot_end - slot_secs / 2;
      double rate = eval_lambda(model, mid);
      double next = t + rng.exponential(rate) * 3600.0;
      if (next >= double(slot_end)) {
        // Memorylessness: restart the draw at the boundary under the next
        // slot's rate.
        t = double(slot_end);
        if (t >= double(horizon.end)) break;
        continue;
      }
      t = next;
      if (t >= double(horizon.end)) break;
      out.push_back(Timestamp(std::llround(t)));
    }
  }
  finalize_arrivals(out, horizon);
  return out;
}

std::vector<Timestamp> sample_arrivals_counts(const ArrivalModel& model,
                                              const Horizon& horizon,
                                              Rng& rng) {
  std::vector<Timestamp> out;
  const std::int64_t slot_secs = std::int64_t(model.grid.slot_minutes) * 60;
  for (Timestamp day = day_start(horizon.start); day < horizon.end;
       day += kSecondsPerDay) {
    for (int slot = 0; slot < model.grid.slots_per_day(); ++slot) {
      Timestamp lo = day + slot * slot_secs;
      Timestamp hi = lo + slot_secs;
      if (lo < horizon.start || hi > horizon.end) continue;
      SlotKey key{month_of(day), daytype_of(day), slot};
      std::uint64_t n;
      auto nb = model.counts.negbinom.find(key);
      if (nb != model.counts.negbinom.end()) {
        n = rng.negative_binomial(nb->second.r, nb->second.p);
      } else {
        double rate = eval_lambda(model, lo + slot_secs / 2);
        n = rng.poisson(rate * model.grid.slot_hours());
      }
      for (std::uint64_t i = 0; i < n; ++i) {
        double s = rng.uniform(double(lo), double(hi));
        out.push_back(Timestamp(std::llround(s)));
      }
    }
  }
  finalize_arrivals(out, horizon);
  return out;
}

}  // namespace sdg
