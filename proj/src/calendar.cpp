#include "cdrev/calendar.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace cdrev {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) {
    --q;
  }
  return q;
}

int parse_fixed_digits(std::string_view text, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("malformed " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

DatasetCalendar::DatasetCalendar(std::chrono::sys_days epoch_start, int utc_offset_minutes,
                                 int n_weeks)
    : epoch_start_(epoch_start), utc_offset_minutes_(utc_offset_minutes), n_weeks_(n_weeks) {
  if (n_weeks < 1) {
    throw std::invalid_argument("calendar needs at least one whole week");
  }
  if (utc_offset_minutes < -24 * 60 || utc_offset_minutes > 24 * 60) {
    throw std::invalid_argument("utc offset out of range");
  }
}

std::int64_t DatasetCalendar::range_begin() const {
  return static_cast<std::int64_t>(epoch_start_.time_since_epoch().count()) * kSecondsPerDay -
         static_cast<std::int64_t>(utc_offset_minutes_) * 60;
}

std::int64_t DatasetCalendar::range_end() const {
  return range_begin() + static_cast<std::int64_t>(n_weeks_) * kDaysPerWeek * kSecondsPerDay;
}

std::optional<SlotIndex> DatasetCalendar::slot_of(std::int64_t timestamp) const {
  if (!contains(timestamp)) {
    return std::nullopt;
  }
  const std::int64_t elapsed = timestamp - range_begin();
  const std::int64_t day = elapsed / kSecondsPerDay;
  return SlotIndex{static_cast<int>(day / kDaysPerWeek), static_cast<int>(day % kDaysPerWeek),
                   static_cast<int>((elapsed % kSecondsPerDay) / kSecondsPerHour)};
}

std::int64_t DatasetCalendar::slot_start(SlotIndex slot) const {
  return range_begin() +
         (static_cast<std::int64_t>(slot.week) * kDaysPerWeek + slot.dow) * kSecondsPerDay +
         static_cast<std::int64_t>(slot.hour) * kSecondsPerHour;
}

std::optional<DayIndex> DatasetCalendar::day_of(std::chrono::sys_days date) const {
  const auto days = (date - epoch_start_).count();
  if (days < 0 || days >= static_cast<long>(n_weeks_) * kDaysPerWeek) {
    return std::nullopt;
  }
  return DayIndex{static_cast<int>(days / kDaysPerWeek), static_cast<int>(days % kDaysPerWeek)};
}

std::chrono::sys_days DatasetCalendar::date_of(DayIndex day) const {
  return epoch_start_ + std::chrono::days{day.week * kDaysPerWeek + day.dow};
}

int parse_utc_offset(std::string_view text) {
  if (text.size() != 6 || (text[0] != '+' && text[0] != '-') || text[3] != ':') {
    throw std::invalid_argument("utc offset must look like ±HH:MM, got '" + std::string(text) + "'");
  }
  const int hours = parse_fixed_digits(text.substr(1, 2), "utc offset");
  const int minutes = parse_fixed_digits(text.substr(4, 2), "utc offset");
  if (hours > 23 || minutes > 59) {
    throw std::invalid_argument("utc offset out of range: '" + std::string(text) + "'");
  }
  const int total = hours * 60 + minutes;
  return text[0] == '-' ? -total : total;
}

std::string format_utc_offset(int minutes) {
  const char sign = minutes < 0 ? '-' : '+';
  const int m = minutes < 0 ? -minutes : minutes;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", sign, m / 60, m % 60);
  return buf;
}

std::chrono::sys_days parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw std::invalid_argument("date must look like YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const int y = parse_fixed_digits(text.substr(0, 4), "date");
  const int m = parse_fixed_digits(text.substr(5, 2), "date");
  const int d = parse_fixed_digits(text.substr(8, 2), "date");
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw std::invalid_argument("invalid calendar date '" + std::string(text) + "'");
  }
  return std::chrono::sys_days{ymd};
}

std::string format_iso_date(std::chrono::sys_days date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::chrono::sys_days local_date(std::int64_t timestamp, int utc_offset_minutes) {
  const std::int64_t local = timestamp + static_cast<std::int64_t>(utc_offset_minutes) * 60;
  return std::chrono::sys_days{std::chrono::days{floor_div(local, kSecondsPerDay)}};
}

}  // namespace cdrev
