#include "sdg/mixture.hpp"

#include "sdg/fastmath.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <set>

namespace sdg {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double log_normal_pdf(double x, double mean, double stddev) {
  double z = (x - mean) / stddev;
  return -0.5 * (kLogTwoPi + z * z) - std::log(stddev);
}

struct SampleStats {
  double mean;
  double var;  // population
};

SampleStats sample_stats(std::span<const double> data) {
  double mean = std::accumulate(data.begin(), data.end(), 0.0) /
                double(data.size());
  double ss = 0.0;
  for (double x : data) ss += (x - mean) * (x - mean);
  return {mean, ss / double(data.size())};
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  double pos = q * double(sorted.size() - 1);
  std::size_t lo = std::size_t(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - double(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

EmFit em_run(std::span<const double> data, int k, const EmConfig& cfg,
             Gmm init) {
  const std::size_t n = data.size();
  auto stats = sample_stats(data);
  const double floor_var =
      std::max(cfg.variance_floor_factor * stats.var, 1e-12);

  Gmm g = std::move(init);
  if (cfg.ll_trace) cfg.ll_trace->clear();
  std::vector<double> resp(n * std::size_t(k));
  std::vector<double> row_max(n);
  double prev_ll = -std::numeric_limits<double>::infinity();
  double ll = prev_ll;

  std::vector<double> lhead(k), lquad(k);
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    // E-step; per-component constants hoisted out of the point loop
    for (int j = 0; j < k; ++j) {
      lhead[j] = std::log(g.weights[j]) - std::log(g.stddevs[j]) -
                 0.5 * kLogTwoPi;
      lquad[j] = -0.5 / (g.stddevs[j] * g.stddevs[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double max_lp = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        double dx = data[i] - g.means[j];
        double lp = lhead[j] + lquad[j] * dx * dx;
        resp[i * k + j] = lp;
        max_lp = std::max(max_lp, lp);
      }
      row_max[i] = max_lp;
    }
    // shift rows so the largest exponent is 0, clamp the rest to keep every
    // input finite, then exponentiate the whole matrix in one batched call
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j)
        resp[i * k + j] = std::max(resp[i * k + j] - row_max[i], -700.0);
    detail::exp_batch(resp.data(), resp.size());
    ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int j = 0; j < k; ++j) sum += resp[i * k + j];
      ll += row_max[i] + std::log(sum);
      double inv = 1.0 / sum;
      for (int j = 0; j < k; ++j) resp[i * k + j] *= inv;
    }

    if (cfg.ll_trace) cfg.ll_trace->push_back(ll);
    double rel = std::fabs(ll - prev_ll) / (std::fabs(ll) + 1e-300);
    if (iter > 0 && rel < cfg.tol) break;
    prev_ll = ll;

    // M-step
    for (int j = 0; j < k; ++j) {
      double nj = 0.0, sx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nj += resp[i * k + j];
        sx += resp[i * k + j] * data[i];
      }
      if (nj <= 1e-300) {
        // Dead component; park it on the sample mean with floor variance.
        g.weights[j] = 1e-12;
        g.means[j] = stats.mean;
        g.stddevs[j] = std::sqrt(std::max(stats.var, floor_var));
        continue;
      }
      double mu = sx / nj;
      double sv = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        sv += resp[i * k + j] * (data[i] - mu) * (data[i] - mu);
      g.weights[j] = nj / double(n);
      g.means[j] = mu;
      g.stddevs[j] = std::sqrt(std::max(sv / nj, floor_var));
    }
    double wsum = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
    for (double& w : g.weights) w /= wsum;
  }
  return {std::move(g), ll};
}

}  // namespace

EmFit em_fit(std::span<const double> data, int k, const EmConfig& cfg,
             Rng& rng) {
  if (k < 1) throw MixtureError("k must be >= 1");
  if (data.size() < std::size_t(k))
    throw MixtureError("insufficient data for requested k");

  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  auto stats = sample_stats(data);
  double spread = std::sqrt(std::max(stats.var, 1e-12));

  EmFit best{{}, -std::numeric_limits<double>::infinity()};
  int restarts = std::max(cfg.restarts, 1);
  for (int r = 0; r < restarts; ++r) {
    Gmm init;
    init.weights.assign(k, 1.0 / k);
    init.stddevs.assign(k, spread);
    for (int j = 0; j < k; ++j) {
      double mu = quantile_sorted(sorted, (j + 0.5) / k);
      if (r > 0) mu += rng.normal(0.0, 0.1 * spread);
      init.means.push_back(mu);
    }
    EmFit fit = em_run(data, k, cfg, std::move(init));
    if (fit.log_likelihood > best.log_likelihood) best = std::move(fit);
  }
  return best;
}

double gmm_bic(const Gmm& g, double log_likelihood, std::size_t n) {
  double params = 3.0 * double(g.k()) - 1.0;
  return -2.0 * log_likelihood + params * std::log(double(n));
}

Gmm select_k(std::span<const double> data, const EmConfig& cfg, Rng& rng) {
  if (data.size() < 2) throw MixtureError("insufficient data");
  int k_cap = std::max(1, std::min(cfg.k_max, int(data.size() / 10)));

  Gmm best;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_cap; ++k) {
    EmFit fit = em_fit(data, k, cfg, rng);
    double bic = gmm_bic(fit.model, fit.log_likelihood, data.size());
    if (bic < best_bic) {
      best_bic = bic;
      best = std::move(fit.model);
    }
  }
  return best;
}

double gmm_logpdf(const Gmm& g, double x) {
  double max_lp = -std::numeric_limits<double>::infinity();
  std::vector<double> lps(g.k());
  for (std::size_t j = 0; j < g.k(); ++j) {
    lps[j] = std::log(g.weights[j]) +
             log_normal_pdf(x, g.means[j], g.stddevs[j]);
    max_lp = std::max(max_lp, lps[j]);
  }
  double sum = 0.0;
  for (double lp : lps) sum += std::exp(lp - max_lp);
  return max_lp + std::log(sum);
}

double sample_gmm_positive(const Gmm& g, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    double u = rng.uniform();
    std::size_t j = 0;
    double acc = 0.0;
    for (; j < g.k(); ++j) {
      acc += g.weights[j];
      if (u <= acc) break;
    }
    if (j == g.k()) j = g.k() - 1;
    double x = rng.normal(g.means[j], g.stddevs[j]);
    if (x > 0.0) return x;
  }
  double smallest = std::numeric_limits<double>::infinity();
  for (double m : g.means)
    if (m > 0.0) smallest = std::min(smallest, m);
  if (std::isfinite(smallest)) return smallest;
  throw MixtureError("degenerate mixture: cannot produce a positive sample");
}

MixtureBank fit_mixture_bank(const std::map<MixKey, std::vector<double>>& data,
                             MixtureKind kind, const EmConfig& cfg,
                             std::uint64_t seed) {
  MixtureBank bank;
  bank.kind = kind;

  std::vector<double> all;
  std::map<int, std::vector<double>> by_month;
  for (const auto& [key, values] : data) {
    all.insert(all.end(), values.begin(), values.end());
    auto& mv = by_month[key.month];
    mv.insert(mv.end(), values.begin(), values.end());
  }
  if (all.empty()) throw MixtureError("no training data for mixture bank");

  auto cell_tag = [kind](int month, int slot) {
    return std::uint64_t(kind == MixtureKind::Energy ? 1 : 0) * 1000000 +
           std::uint64_t(month) * 10000 + std::uint64_t(slot);
  };

  // Seeds derive from cell identity, never from scheduling order, so the
  // bank is identical regardless of how the parallel fits interleave.
  EmConfig worker_cfg = cfg;
  worker_cfg.ll_trace = nullptr;
  auto fit_pool = [&, worker_cfg](std::span<const double> values,
                                  std::uint64_t tag) {
    Rng rng(Rng::derive_seed(seed, tag));
    if (values.size() >= 2) return select_k(values, worker_cfg, rng);
    return Gmm{{1.0}, {values[0]}, {std::max(1e-6 * values[0], 1e-12)}};
  };

  std::future<Gmm> pooled_future = std::async(
      std::launch::async, [&] { return fit_pool(all, cell_tag(0, 9999)); });

  // Month pools exist only to back cells too small for their own fit, so
  // skip the (expensive) pool fit for months where every cell is large.
  std::set<int> months_needing_pool;
  for (const auto& [key, values] : data)
    if (values.size() < cfg.min_cell_n) months_needing_pool.insert(key.month);

  std::map<int, std::future<Gmm>> month_futures;
  for (const auto& [month, values] : by_month) {
    if (values.size() >= cfg.min_cell_n && months_needing_pool.contains(month)) {
      int m = month;
      month_futures[m] = std::async(std::launch::async, [&, m] {
        return fit_pool(by_month.at(m), cell_tag(m, 9999));
      });
    }
  }

  std::map<MixKey, std::future<Gmm>> cell_futures;
  for (const auto& [key, values] : data) {
    if (values.size() < cfg.min_cell_n) continue;
    MixKey k = key;
    cell_futures[k] = std::async(std::launch::async, [&, k, worker_cfg] {
      Rng rng(Rng::derive_seed(seed, cell_tag(k.month, k.slot)));
      return select_k(data.at(k), worker_cfg, rng);
    });
  }

  bank.pooled_fallback = pooled_future.get();
  std::map<int, Gmm> month_fits;
  for (auto& [month, fut] : month_futures) month_fits[month] = fut.get();
  for (auto& [key, fut] : cell_futures) bank.models[key] = fut.get();

  for (const auto& [key, values] : data) {
    if (bank.models.contains(key)) continue;
    if (auto it = month_fits.find(key.month); it != month_fits.end())
      bank.models[key] = it->second;
    // otherwise the cell resolves to pooled_fallback at lookup time
  }
  return bank;
}

}  // namespace sdg
