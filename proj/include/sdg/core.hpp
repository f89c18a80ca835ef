#ifndef SDG_CORE_HPP_
#define SDG_CORE_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sdg {

// Naive local wall-clock time, second resolution, seconds since 1970-01-01T00:00:00.
using Timestamp = std::int64_t;

constexpr std::int64_t kSecondsPerDay = 86400;

enum class Daytype : std::uint8_t { Weekday = 0, Weekend = 1 };

inline const char* daytype_name(Daytype d) {
  return d == Daytype::Weekday ? "weekday" : "weekend";
}

struct CivilTime {
  int year;
  int month;  // 1-12
  int day;    // 1-31
  int hour;
  int minute;
  int second;
};

Timestamp to_timestamp(const CivilTime& c);
CivilTime to_civil(Timestamp t);

// ISO-8601 "YYYY-MM-DDTHH:MM:SS". Returns nullopt on any malformed or
// out-of-range field.
std::optional<Timestamp> parse_timestamp(const std::string& text);
std::string format_timestamp(Timestamp t);

// "YYYY-MM-DD" -> midnight timestamp.
std::optional<Timestamp> parse_date(const std::string& text);

Daytype daytype_of(Timestamp t);
int month_of(Timestamp t);

struct TimeGrid {
  int slot_minutes = 60;

  explicit TimeGrid(int minutes = 60) : slot_minutes(minutes) {
    if (minutes <= 0 || 1440 % minutes != 0)
      throw std::invalid_argument("slot_minutes must divide 1440 evenly");
  }
  int slots_per_day() const { return 1440 / slot_minutes; }
  double slot_hours() const { return slot_minutes / 60.0; }

  bool operator==(const TimeGrid&) const = default;
};

struct SlotKey {
  int month;        // 1-12
  Daytype daytype;
  int slot;         // 0 .. slots_per_day-1

  auto operator<=>(const SlotKey&) const = default;
};

struct MixKey {
  int month;
  int slot;

  auto operator<=>(const MixKey&) const = default;
};

// [start, end) in whole days; both at midnight.
struct Horizon {
  Timestamp start;
  Timestamp end;

  Horizon(Timestamp s, Timestamp e) : start(s), end(e) {
    if (e <= s) throw std::invalid_argument("horizon end must be after start");
  }
  double hours() const { return double(end - start) / 3600.0; }
};

class Session {
 public:
  static std::optional<Session> make(std::string id, Timestamp arrival,
                                     Timestamp departure, double energy_kwh) {
    if (departure <= arrival) return std::nullopt;
    if (!(energy_kwh > 0.0) || !std::isfinite(energy_kwh)) return std::nullopt;
    return Session(std::move(id), arrival, departure, energy_kwh);
  }

  const std::string& id() const { return id_; }
  Timestamp arrival() const { return arrival_; }
  Timestamp departure() const { return departure_; }
  double energy_kwh() const { return energy_kwh_; }

  bool operator==(const Session&) const = default;

 private:
  Session(std::string id, Timestamp a, Timestamp d, double e)
      : id_(std::move(id)), arrival_(a), departure_(d), energy_kwh_(e) {}

  std::string id_;
  Timestamp arrival_;
  Timestamp departure_;
  double energy_kwh_;
};

SlotKey slot_key_of(Timestamp t, const TimeGrid& grid);
MixKey mix_key_of(Timestamp t, const TimeGrid& grid);

inline double connected_hours(const Session& s) {
  return double(s.departure() - s.arrival()) / 3600.0;
}

// Midnight of the calendar day containing t.
inline Timestamp day_start(Timestamp t) {
  std::int64_t d = t / kSecondsPerDay;
  if (t < 0 && t % kSecondsPerDay != 0) --d;
  return d * kSecondsPerDay;
}

}  // namespace sdg

#endif  // SDG_CORE_HPP_
