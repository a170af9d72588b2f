#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cdrev/calendar.hpp"
#include "cdrev/model.hpp"

namespace cdrev {

/// Per-antenna hourly call counts C(i, j, k) over the calendar.
///
/// Dense layout: one block of n_weeks * 168 counters per antenna, ordered by
/// (week, dow, hour).
class ActivityCube {
 public:
  ActivityCube(DatasetCalendar calendar, std::size_t n_antennas);

  const DatasetCalendar& calendar() const { return calendar_; }
  std::size_t n_antennas() const { return n_antennas_; }
  int n_weeks() const { return calendar_.n_weeks(); }

  std::uint32_t count(AntennaId antenna, SlotIndex slot) const { return counts_[offset(antenna, slot)]; }
  std::uint32_t& count(AntennaId antenna, SlotIndex slot) { return counts_[offset(antenna, slot)]; }

  std::span<const std::uint32_t> antenna_counts(AntennaId antenna) const;
  std::span<std::uint32_t> antenna_counts(AntennaId antenna);

  std::uint64_t total() const;

  std::size_t offset(AntennaId antenna, SlotIndex slot) const {
    return static_cast<std::size_t>(index_of(antenna)) * calendar_.n_slots() +
           static_cast<std::size_t>(slot.week) * kSlotsPerWeek + slot.slot_of_week();
  }

  friend bool operator==(const ActivityCube& a, const ActivityCube& b) {
    return a.n_antennas_ == b.n_antennas_ && a.counts_ == b.counts_;
  }

 private:
  DatasetCalendar calendar_;
  std::size_t n_antennas_;
  std::vector<std::uint32_t> counts_;
};

/// Event index E(i, j, k) = C(i, j, k) / mean over all weeks of C(., j, k).
///
/// Slots whose (antenna, j, k) baseline is zero are undefined; they are stored
/// as NaN and reported as nullopt by at().
class EventIndexSeries {
 public:
  EventIndexSeries(DatasetCalendar calendar, std::size_t n_antennas);

  const DatasetCalendar& calendar() const { return calendar_; }
  std::size_t n_antennas() const { return n_antennas_; }
  int n_weeks() const { return calendar_.n_weeks(); }

  std::optional<double> at(AntennaId antenna, SlotIndex slot) const;

  /// Raw values for one antenna in (week, dow, hour) order; NaN = undefined.
  std::span<const double> antenna_values(AntennaId antenna) const;
  std::span<double> antenna_values(AntennaId antenna);

  friend bool operator==(const EventIndexSeries&, const EventIndexSeries&);

 private:
  DatasetCalendar calendar_;
  std::size_t n_antennas_;
  std::vector<double> values_;
};

/// A run of flagged slots on one antenna and one local day.
struct DetectedEvent {
  AntennaId antenna{};
  DayIndex date;
  int start_hour = 0;
  int end_hour = 0;  // exclusive
  double peak_index = 0.0;
  std::vector<SlotIndex> slots;

  friend bool operator==(const DetectedEvent&, const DetectedEvent&) = default;
};

struct DetectionResult {
  std::vector<DetectedEvent> events;
  /// Antennas with no defined index value at all.
  std::vector<AntennaId> skipped;
  /// Per-antenna threshold; nullopt for skipped antennas.
  std::vector<std::optional<double>> thresholds;

  friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

/// Thrown by percentile_threshold when no defined value is present.
class SilentAntennaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Counts located records per (antenna, week, dow, hour). Throws
/// std::out_of_range for a record outside the calendar or an antenna id
/// beyond `n_antennas`.
ActivityCube aggregate(std::span<const CallRecord> records, const DatasetCalendar& calendar,
                       std::size_t n_antennas);

EventIndexSeries event_index(const ActivityCube& cube);

/// Nearest-rank percentile: the ceil(p * N)-th smallest of the N defined
/// (non-NaN) values. p must lie in (0, 1].
double percentile_threshold(std::span<const double> values, double p);

/// Flags slots whose index strictly exceeds the per-antenna percentile
/// threshold and merges same-day consecutive hours into events.
DetectionResult detect_events(const EventIndexSeries& series, double p = 0.99);

/// Serial reference kernels, kept for cross-checking the parallel ones.
namespace serial {
ActivityCube aggregate(std::span<const CallRecord> records, const DatasetCalendar& calendar,
                       std::size_t n_antennas);
EventIndexSeries event_index(const ActivityCube& cube);
DetectionResult detect_events(const EventIndexSeries& series, double p = 0.99);
}  // namespace serial

}  // namespace cdrev
