#include "sdg/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sdg/ingest.hpp"

namespace sdg {

namespace {

std::string sequential_id(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "syn-%06zu", i + 1);
  return buf;
}

ScalarSummary summarize_scalar(std::vector<double> xs) {
  ScalarSummary s;
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(ss / double(xs.size() - 1)) : 0.0;
  auto q = [&](double p) {
    double pos = p * double(xs.size() - 1);
    std::size_t lo = std::size_t(pos);
    std::size_t hi = std::min(lo + 1, xs.size() - 1);
    double frac = pos - double(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
  };
  s.p5 = q(0.05);
  s.p50 = q(0.50);
  s.p95 = q(0.95);
  return s;
}

}  // namespace

std::vector<Session> generate_sessions(const SdgModel& model,
                                       const GenerationConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<Timestamp> arrivals =
      cfg.arrival_mode == ArrivalMode::Iat
          ? sample_arrivals_iat(model.arrival, cfg.horizon, rng)
          : sample_arrivals_counts(model.arrival, cfg.horizon, rng);

  std::vector<Session> out;
  out.reserve(arrivals.size());
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    Timestamp t = arrivals[i];
    MixKey key = mix_key_of(t, model.grid);

    double duration_h = sample_gmm_positive(model.connected.at(key), rng);
    for (int redraw = 0;
         duration_h > cfg.max_duration_hours && redraw < 100; ++redraw) {
      duration_h = sample_gmm_positive(model.connected.at(key), rng);
    }
    duration_h = std::min(duration_h, cfg.max_duration_hours);

    double energy = sample_gmm_positive(model.energy.at(key), rng);

    Timestamp dep = t + std::max<std::int64_t>(
                            1, std::llround(duration_h * 3600.0));
    auto s = Session::make(sequential_id(i), t, dep, energy);
    out.push_back(std::move(*s));
  }
  return out;
}

Summary summarize(const std::vector<Session>& sessions, const TimeGrid& grid) {
  Summary s;
  s.total_sessions = sessions.size();
  std::vector<double> durations, energies;
  for (const auto& sess : sessions) {
    durations.push_back(connected_hours(sess));
    energies.push_back(sess.energy_kwh());
  }
  s.duration = summarize_scalar(std::move(durations));
  s.energy = summarize_scalar(std::move(energies));

  if (!sessions.empty()) {
    Timestamp lo = sessions.front().arrival(), hi = lo;
    for (const auto& sess : sessions) {
      lo = std::min(lo, sess.arrival());
      hi = std::max(hi, sess.arrival());
    }
    Horizon horizon(day_start(lo), day_start(hi) + kSecondsPerDay);
    auto cb = bucket_counts(sessions, grid, horizon);
    for (const auto& [key, counts] : cb.counts) {
      double mean = std::accumulate(counts.begin(), counts.end(), 0.0) /
                    double(counts.size());
      double ss = 0.0;
      for (int c : counts) ss += (c - mean) * (c - mean);
      double var =
          counts.size() > 1 ? ss / double(counts.size() - 1) : 0.0;
      s.count_mean_var[key] = {mean, var};
    }
  }
  return s;
}

}  // namespace sdg
