#include "sdg/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace sdg {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

const char kHeader[] = "session_id,arrival_time,departure_time,energy_kwh";

std::optional<double> parse_energy(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

ParseResult parse_sessions(std::istream& in, ParsePolicy policy) {
  ParseResult result;
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty input: header row required");
  line = strip_cr(line);
  auto header = split_csv(line);
  if (header.size() < 4 || header[0] != "session_id" ||
      header[1] != "arrival_time" || header[2] != "departure_time" ||
      header[3] != "energy_kwh") {
    throw IngestError("bad CSV header, expected: " + std::string(kHeader));
  }

  long line_no = 1;
  auto bad = [&](RecordFault fault) {
    if (policy == ParsePolicy::Strict) {
      throw IngestError("bad record at line " + std::to_string(line_no));
    }
    result.errors.push_back({line_no, fault});
  };

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() < 4) {
      bad(RecordFault::MissingField);
      continue;
    }
    auto arr = parse_timestamp(fields[1]);
    auto dep = parse_timestamp(fields[2]);
    if (!arr || !dep) {
      bad(RecordFault::MalformedTimestamp);
      continue;
    }
    auto energy = parse_energy(fields[3]);
    if (!energy) {
      bad(RecordFault::MissingField);
      continue;
    }
    if (*dep <= *arr) {
      bad(RecordFault::NegativeDuration);
      continue;
    }
    if (!(*energy > 0.0)) {
      bad(RecordFault::NonPositiveEnergy);
      continue;
    }
    auto s = Session::make(fields[0], *arr, *dep, *energy);
    if (!s) {
      bad(RecordFault::NonPositiveEnergy);
      continue;
    }
    result.sessions.push_back(std::move(*s));
  }

  std::stable_sort(result.sessions.begin(), result.sessions.end(),
                   [](const Session& a, const Session& b) {
                     return a.arrival() < b.arrival();
                   });
  return result;
}

void write_sessions_csv(std::ostream& out, const std::vector<Session>& sessions) {
  out << kHeader << '\n';
  for (const auto& s : sessions) {
    std::ostringstream energy;
    energy.precision(17);
    double e = s.energy_kwh();
    // shortest representation that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
      std::ostringstream probe;
      probe.precision(prec);
      probe << e;
      if (std::stod(probe.str()) == e) {
        energy << probe.str();
        break;
      }
    }
    out << s.id() << ',' << format_timestamp(s.arrival()) << ','
        << format_timestamp(s.departure()) << ',' << energy.str() << '\n';
  }
}

std::map<SlotKey, std::vector<double>> bucket_iats(
    const std::vector<Session>& sessions, const TimeGrid& grid) {
  std::map<SlotKey, std::vector<double>> out;
  for (std::size_t i = 1; i < sessions.size(); ++i) {
    double gap_h =
        double(sessions[i].arrival() - sessions[i - 1].arrival()) / 3600.0;
    out[slot_key_of(sessions[i - 1].arrival(), grid)].push_back(gap_h);
  }
  return out;
}

CountBuckets bucket_counts(const std::vector<Session>& sessions,
                           const TimeGrid& grid, const Horizon& horizon) {
  for (const auto& s : sessions) {
    if (s.arrival() < horizon.start || s.arrival() >= horizon.end)
      throw IngestError("arrival outside horizon: " +
                        format_timestamp(s.arrival()));
  }

  CountBuckets out;
  const std::int64_t slot_secs = std::int64_t(grid.slot_minutes) * 60;
  std::size_t idx = 0;
  for (Timestamp day = day_start(horizon.start); day < horizon.end;
       day += kSecondsPerDay) {
    int month = month_of(day);
    Daytype dt = daytype_of(day);
    for (int slot = 0; slot < grid.slots_per_day(); ++slot) {
      Timestamp lo = day + slot * slot_secs;
      Timestamp hi = lo + slot_secs;
      if (hi <= horizon.start || lo >= horizon.end) continue;
      // Horizons are whole days in practice; partial edge slots would skew
      // exposure, so only full slots inside the horizon are counted.
      if (lo < horizon.start || hi > horizon.end) continue;
      int n = 0;
      while (idx < sessions.size() && sessions[idx].arrival() < hi) {
        ++n;
        ++idx;
      }
      SlotKey key{month, dt, slot};
      out.counts[key].push_back(n);
      out.observed_hours[key] += grid.slot_hours();
    }
  }
  return out;
}

MixtureBuckets bucket_mixture_data(const std::vector<Session>& sessions,
                                   const TimeGrid& grid) {
  MixtureBuckets out;
  for (const auto& s : sessions) {
    MixKey key = mix_key_of(s.arrival(), grid);
    out.durations[key].push_back(connected_hours(s));
    out.energies[key].push_back(s.energy_kwh());
  }
  return out;
}

TrainingBuckets make_training_buckets(const std::vector<Session>& sessions,
                                      const TimeGrid& grid,
                                      const Horizon& horizon) {
  TrainingBuckets b;
  b.iats = bucket_iats(sessions, grid);
  auto cb = bucket_counts(sessions, grid, horizon);
  b.counts = std::move(cb.counts);
  b.observed_slot_hours = std::move(cb.observed_hours);
  auto mb = bucket_mixture_data(sessions, grid);
  b.durations = std::move(mb.durations);
  b.energies = std::move(mb.energies);
  return b;
}

}  // namespace sdg
