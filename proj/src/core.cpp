#include "sdg/core.hpp"

#include <cstdio>

namespace sdg {

namespace {

using days_t = std::chrono::sys_days;

bool valid_civil(const CivilTime& c) {
  if (c.month < 1 || c.month > 12) return false;
  if (c.hour < 0 || c.hour > 23) return false;
  if (c.minute < 0 || c.minute > 59) return false;
  if (c.second < 0 || c.second > 59) return false;
  std::chrono::year_month_day ymd{std::chrono::year{c.year},
                                  std::chrono::month{unsigned(c.month)},
                                  std::chrono::day{unsigned(c.day)}};
  return ymd.ok();
}

}  // namespace

Timestamp to_timestamp(const CivilTime& c) {
  std::chrono::year_month_day ymd{std::chrono::year{c.year},
                                  std::chrono::month{unsigned(c.month)},
                                  std::chrono::day{unsigned(c.day)}};
  days_t d{ymd};
  return Timestamp(d.time_since_epoch().count()) * kSecondsPerDay +
         c.hour * 3600 + c.minute * 60 + c.second;
}

CivilTime to_civil(Timestamp t) {
  Timestamp ds = day_start(t);
  auto d = days_t{std::chrono::days{ds / kSecondsPerDay}};
  std::chrono::year_month_day ymd{d};
  int sec = int(t - ds);
  return CivilTime{int(ymd.year()), int(unsigned(ymd.month())),
                   int(unsigned(ymd.day())), sec / 3600, (sec / 60) % 60,
                   sec % 60};
}

std::optional<Timestamp> parse_timestamp(const std::string& text) {
  CivilTime c{};
  char extra = '\0';
  int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%c", &c.year, &c.month,
                      &c.day, &c.hour, &c.minute, &c.second, &extra);
  if (n != 6 || text.size() != 19) return std::nullopt;
  if (!valid_civil(c)) return std::nullopt;
  return to_timestamp(c);
}

std::string format_timestamp(Timestamp t) {
  CivilTime c = to_civil(t);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", c.year,
                c.month, c.day, c.hour, c.minute, c.second);
  return buf;
}

std::optional<Timestamp> parse_date(const std::string& text) {
  CivilTime c{};
  char extra = '\0';
  int n = std::sscanf(text.c_str(), "%d-%d-%d%c", &c.year, &c.month, &c.day,
                      &extra);
  if (n != 3 || text.size() != 10) return std::nullopt;
  if (!valid_civil(c)) return std::nullopt;
  return to_timestamp(c);
}

Daytype daytype_of(Timestamp t) {
  auto d = days_t{std::chrono::days{day_start(t) / kSecondsPerDay}};
  std::chrono::weekday w{d};
  return (w == std::chrono::Saturday || w == std::chrono::Sunday)
             ? Daytype::Weekend
             : Daytype::Weekday;
}

int month_of(Timestamp t) { return to_civil(t).month; }

SlotKey slot_key_of(Timestamp t, const TimeGrid& grid) {
  int minutes = int((t - day_start(t)) / 60);
  return SlotKey{month_of(t), daytype_of(t), minutes / grid.slot_minutes};
}

MixKey mix_key_of(Timestamp t, const TimeGrid& grid) {
  SlotKey k = slot_key_of(t, grid);
  return MixKey{k.month, k.slot};
}

}  // namespace sdg
