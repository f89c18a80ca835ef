#ifndef SDG_TRAIN_HPP_
#define SDG_TRAIN_HPP_

#include <vector>

#include "sdg/generator.hpp"
#include "sdg/ingest.hpp"
#include "sdg/validate.hpp"

namespace sdg {

enum class LambdaMode { Piecewise, Smooth };
enum class CountModel { Iat, Poisson, Auto };

struct TrainConfig {
  TimeGrid grid{60};
  LambdaBounds bounds;
  LambdaMode lambda_mode = LambdaMode::Piecewise;
  int fourier_order = 4;
  CountModel count_model = CountModel::Auto;
  OverdispersionConfig overdispersion;
  IatBoundaryPolicy iat_boundary = IatBoundaryPolicy::Restart;
  EmConfig em;
  std::uint64_t seed = 0;
};

struct TrainOutput {
  SdgModel model;
  TrainingBuckets buckets;
  std::size_t connected_cells_fitted = 0;
  std::size_t energy_cells_fitted = 0;
  std::size_t negbinom_cells = 0;
  double ks_pass_rate = 0.0;  // share of tested cells with p >= 0.05
  std::size_t ks_cells_tested = 0;
};

// Full fit: arrival rates, count family, both mixture banks, plus the
// exponential-IAT goodness-of-fit summary.
TrainOutput train_model(const std::vector<Session>& sessions,
                        const Horizon& horizon, const TrainConfig& cfg);

}  // namespace sdg

#endif  // SDG_TRAIN_HPP_
