#include "sdg/train.hpp"

#include <ctime>

namespace sdg {

namespace {

std::string now_iso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  return buf;
}

}  // namespace

TrainOutput train_model(const std::vector<Session>& sessions,
                        const Horizon& horizon, const TrainConfig& cfg) {
  TrainOutput out{SdgModel{ArrivalModel{LambdaTable{}, CountFamily{}, cfg.grid},
                           MixtureBank{}, MixtureBank{}, cfg.grid, ModelMeta{}},
                  TrainingBuckets{}};

  out.buckets = make_training_buckets(sessions, cfg.grid, horizon);

  LambdaTable table = fit_lambda_piecewise(
      out.buckets.counts, out.buckets.observed_slot_hours, cfg.grid,
      cfg.bounds);

  out.model.arrival.grid = cfg.grid;
  out.model.arrival.iat_boundary = cfg.iat_boundary;
  if (cfg.lambda_mode == LambdaMode::Smooth) {
    out.model.arrival.rate =
        fit_lambda_curve(table, cfg.grid, cfg.fourier_order);
  } else {
    out.model.arrival.rate = table;
  }

  if (cfg.count_model == CountModel::Auto) {
    out.model.arrival.counts =
        fit_count_family(out.buckets.counts, cfg.overdispersion);
    out.negbinom_cells = out.model.arrival.counts.negbinom.size();
  }

  out.model.connected =
      fit_mixture_bank(out.buckets.durations, MixtureKind::ConnectedTime,
                       cfg.em, Rng::derive_seed(cfg.seed, 0xC0));
  out.model.energy =
      fit_mixture_bank(out.buckets.energies, MixtureKind::Energy, cfg.em,
                       Rng::derive_seed(cfg.seed, 0xE0));
  for (const auto& [key, values] : out.buckets.durations)
    if (values.size() >= cfg.em.min_cell_n) ++out.connected_cells_fitted;
  for (const auto& [key, values] : out.buckets.energies)
    if (values.size() >= cfg.em.min_cell_n) ++out.energy_cells_fitted;

  out.model.meta.schema_version = "1";
  out.model.meta.trained_at = now_iso8601();
  out.model.meta.n_training_sessions = sessions.size();

  auto fit_report = validate_arrival_fit(out.model.arrival, out.buckets);
  out.ks_cells_tested = fit_report.per_slot.size();
  if (out.ks_cells_tested > 0) {
    std::size_t pass = 0;
    for (const auto& [key, ks] : fit_report.per_slot)
      if (ks.p_value >= 0.05) ++pass;
    out.ks_pass_rate = double(pass) / double(out.ks_cells_tested);
  }
  return out;
}

}  // namespace sdg
