#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cdrev {

inline constexpr int kDaysPerWeek = 7;
inline constexpr int kHoursPerDay = 24;
inline constexpr int kSlotsPerWeek = kDaysPerWeek * kHoursPerDay;
inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

/// A calendar day relative to the dataset start: week i, day-of-week j.
struct DayIndex {
  int week = 0;
  int dow = 0;
  friend auto operator<=>(const DayIndex&, const DayIndex&) = default;
};

/// An hourly time slot (week i, day-of-week j, hour k).
struct SlotIndex {
  int week = 0;
  int dow = 0;
  int hour = 0;
  friend auto operator<=>(const SlotIndex&, const SlotIndex&) = default;

  /// Position within a week, 0..167.
  constexpr int slot_of_week() const { return dow * kHoursPerDay + hour; }
};

/// Maps epoch-second timestamps onto (week, dow, hour) indices.
///
/// Week 0 starts at local midnight of `epoch_start`. The day-of-week index
/// counts days from the start of each week, so j = 0 is the weekday of
/// `epoch_start`. Local time is UTC plus a fixed offset.
class DatasetCalendar {
 public:
  DatasetCalendar(std::chrono::sys_days epoch_start, int utc_offset_minutes, int n_weeks);

  std::chrono::sys_days epoch_start() const { return epoch_start_; }
  int utc_offset_minutes() const { return utc_offset_minutes_; }
  int n_weeks() const { return n_weeks_; }
  int n_slots() const { return n_weeks_ * kSlotsPerWeek; }

  /// First covered epoch second (inclusive).
  std::int64_t range_begin() const;
  /// One past the last covered epoch second.
  std::int64_t range_end() const;
  bool contains(std::int64_t timestamp) const {
    return timestamp >= range_begin() && timestamp < range_end();
  }

  /// Slot of a timestamp, or nullopt outside the covered range.
  std::optional<SlotIndex> slot_of(std::int64_t timestamp) const;
  /// Epoch second at which a slot begins.
  std::int64_t slot_start(SlotIndex slot) const;

  std::optional<DayIndex> day_of(std::chrono::sys_days date) const;
  std::chrono::sys_days date_of(DayIndex day) const;

 private:
  std::chrono::sys_days epoch_start_;
  int utc_offset_minutes_;
  int n_weeks_;
};

/// Parses "+HH:MM" / "-HH:MM" into minutes east of UTC.
int parse_utc_offset(std::string_view text);
std::string format_utc_offset(int minutes);

/// Parses an ISO "YYYY-MM-DD" date.
std::chrono::sys_days parse_iso_date(std::string_view text);
std::string format_iso_date(std::chrono::sys_days date);

/// Local calendar date of an epoch-second timestamp.
std::chrono::sys_days local_date(std::int64_t timestamp, int utc_offset_minutes);

}  // namespace cdrev
