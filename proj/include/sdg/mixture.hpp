#ifndef SDG_MIXTURE_HPP_
#define SDG_MIXTURE_HPP_

#include <map>
#include <span>
#include <vector>

#include "sdg/core.hpp"
#include "sdg/rng.hpp"

namespace sdg {

struct MixtureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Gmm {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> stddevs;

  std::size_t k() const { return weights.size(); }
};

enum class MixtureKind { ConnectedTime, Energy };

inline const char* mixture_kind_name(MixtureKind kind) {
  return kind == MixtureKind::ConnectedTime ? "connected_time" : "energy";
}

struct MixtureBank {
  MixtureKind kind = MixtureKind::ConnectedTime;
  std::map<MixKey, Gmm> models;
  Gmm pooled_fallback;

  const Gmm& at(const MixKey& key) const {
    auto it = models.find(key);
    return it == models.end() ? pooled_fallback : it->second;
  }
};

struct EmConfig {
  int max_iter = 500;
  double tol = 1e-8;  // relative log-likelihood change
  int restarts = 5;
  int k_max = 8;
  double variance_floor_factor = 1e-6;
  std::size_t min_cell_n = 50;
  // When set, receives the per-iteration log-likelihoods of the most recent
  // EM run (diagnostics; cleared at each run).
  std::vector<double>* ll_trace = nullptr;
};

struct EmFit {
  Gmm model;
  double log_likelihood;
};

// Classic EM with quantile-spread initialization; best of cfg.restarts runs.
EmFit em_fit(std::span<const double> data, int k, const EmConfig& cfg, Rng& rng);

// BIC = -2*LL + (3k - 1)*ln n over k = 1..min(k_max, n/10).
Gmm select_k(std::span<const double> data, const EmConfig& cfg, Rng& rng);

// log sum_j w_j phi(x; mu_j, sigma_j), log-sum-exp stabilized.
double gmm_logpdf(const Gmm& g, double x);

double gmm_bic(const Gmm& g, double log_likelihood, std::size_t n);

// Component draw, rejecting non-positive values (up to 1000 attempts).
double sample_gmm_positive(const Gmm& g, Rng& rng);

// Cells with >= min_cell_n points get their own fit; smaller cells fall back
// to the month pool, then the global pool.
MixtureBank fit_mixture_bank(const std::map<MixKey, std::vector<double>>& data,
                             MixtureKind kind, const EmConfig& cfg,
                             std::uint64_t seed);

}  // namespace sdg

#endif  // SDG_MIXTURE_HPP_
