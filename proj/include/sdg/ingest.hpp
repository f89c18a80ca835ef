#ifndef SDG_INGEST_HPP_
#define SDG_INGEST_HPP_

#include <iosfwd>
#include <map>
#include <vector>

#include "sdg/core.hpp"

namespace sdg {

enum class RecordFault {
  MalformedTimestamp,
  NegativeDuration,
  NonPositiveEnergy,
  MissingField,
};

struct SessionRecordError {
  long line_number;  // 1-based, header is line 1
  RecordFault reason;
};

enum class ParsePolicy { Strict, SkipBad };

struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseResult {
  std::vector<Session> sessions;  // sorted by arrival (stable)
  std::vector<SessionRecordError> errors;
};

// CSV schema (fixed): header row then
//   session_id,arrival_time,departure_time,energy_kwh
// timestamps ISO-8601 YYYY-MM-DDTHH:MM:SS. Extra columns ignored.
// Under Strict the first bad row throws IngestError.
ParseResult parse_sessions(std::istream& in, ParsePolicy policy);

void write_sessions_csv(std::ostream& out, const std::vector<Session>& sessions);

struct TrainingBuckets {
  std::map<SlotKey, std::vector<double>> iats;        // hours
  std::map<SlotKey, std::vector<int>> counts;         // arrivals per slot occurrence
  std::map<SlotKey, double> observed_slot_hours;
  std::map<MixKey, std::vector<double>> durations;    // hours
  std::map<MixKey, std::vector<double>> energies;     // kWh
};

// Each consecutive pair contributes its gap (hours) to the bucket of the
// EARLIER arrival's slot.
std::map<SlotKey, std::vector<double>> bucket_iats(
    const std::vector<Session>& sessions, const TimeGrid& grid);

struct CountBuckets {
  std::map<SlotKey, std::vector<int>> counts;
  std::map<SlotKey, double> observed_hours;
};

// Zero counts for empty slot occurrences are recorded. Throws IngestError if
// any arrival falls outside the horizon.
CountBuckets bucket_counts(const std::vector<Session>& sessions,
                           const TimeGrid& grid, const Horizon& horizon);

struct MixtureBuckets {
  std::map<MixKey, std::vector<double>> durations;
  std::map<MixKey, std::vector<double>> energies;
};

MixtureBuckets bucket_mixture_data(const std::vector<Session>& sessions,
                                   const TimeGrid& grid);

TrainingBuckets make_training_buckets(const std::vector<Session>& sessions,
                                      const TimeGrid& grid,
                                      const Horizon& horizon);

}  // namespace sdg

#endif  // SDG_INGEST_HPP_
