#ifndef SDG_GENERATOR_HPP_
#define SDG_GENERATOR_HPP_

#include <map>
#include <string>
#include <vector>

#include "sdg/arrival.hpp"
#include "sdg/core.hpp"
#include "sdg/mixture.hpp"

namespace sdg {

struct ModelMeta {
  std::string schema_version = "1";
  std::string trained_at;  // ISO-8601, informational
  std::uint64_t n_training_sessions = 0;
};

// The shareable bundle: fitted parameters only, never training records.
struct SdgModel {
  ArrivalModel arrival;
  MixtureBank connected;  // hours
  MixtureBank energy;     // kWh
  TimeGrid grid;
  ModelMeta meta;
};

enum class ArrivalMode { Iat, Counts };

struct GenerationConfig {
  Horizon horizon;
  std::uint64_t seed = 0;
  ArrivalMode arrival_mode = ArrivalMode::Counts;
  double max_duration_hours = 168.0;
};

std::vector<Session> generate_sessions(const SdgModel& model,
                                       const GenerationConfig& cfg);

struct ScalarSummary {
  double mean = 0.0;
  double stddev = 0.0;
  double p5 = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
};

struct Summary {
  std::size_t total_sessions = 0;
  std::map<SlotKey, std::pair<double, double>> count_mean_var;
  ScalarSummary duration;
  ScalarSummary energy;
};

Summary summarize(const std::vector<Session>& sessions, const TimeGrid& grid);

}  // namespace sdg

#endif  // SDG_GENERATOR_HPP_
