#include "cdrev/activity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cdrev {

namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

// ceil(p * n), snapping products that are within rounding error of an integer
// (0.99 * 100 must give rank 99, not 100).
std::size_t nearest_rank(double p, std::size_t n) {
  const double exact = p * static_cast<double>(n);
  const double nearest = std::round(exact);
  const double rank = std::abs(exact - nearest) < 1e-9 * std::max(1.0, exact) ? nearest : std::ceil(exact);
  return std::clamp<std::size_t>(static_cast<std::size_t>(rank), 1, n);
}

// Flags and merges one antenna's slots against its threshold.
void flag_antenna(AntennaId antenna, std::span<const double> values, double threshold,
                  std::vector<DetectedEvent>& out) {
  DetectedEvent* open = nullptr;
  int last_day = -1;
  int last_hour = -2;
  for (std::size_t s = 0; s < values.size(); ++s) {
    const double e = values[s];
    if (std::isnan(e) || !(e > threshold)) {
      open = nullptr;
      continue;
    }
    const int day = static_cast<int>(s / kHoursPerDay);
    const int hour = static_cast<int>(s % kHoursPerDay);
    const SlotIndex slot{day / kDaysPerWeek, day % kDaysPerWeek, hour};
    if (open != nullptr && day == last_day && hour == last_hour + 1) {
      open->end_hour = hour + 1;
      open->peak_index = std::max(open->peak_index, e);
      open->slots.push_back(slot);
    } else {
      out.push_back(DetectedEvent{antenna, DayIndex{slot.week, slot.dow}, hour, hour + 1, e, {slot}});
      open = &out.back();
    }
    last_day = day;
    last_hour = hour;
  }
}

}  // namespace

ActivityCube::ActivityCube(DatasetCalendar calendar, std::size_t n_antennas)
    : calendar_(calendar),
      n_antennas_(n_antennas),
      counts_(n_antennas * static_cast<std::size_t>(calendar.n_slots()), 0) {}

std::span<const std::uint32_t> ActivityCube::antenna_counts(AntennaId antenna) const {
  const std::size_t n = calendar_.n_slots();
  return std::span<const std::uint32_t>(counts_).subspan(index_of(antenna) * n, n);
}

std::span<std::uint32_t> ActivityCube::antenna_counts(AntennaId antenna) {
  const std::size_t n = calendar_.n_slots();
  return std::span<std::uint32_t>(counts_).subspan(index_of(antenna) * n, n);
}

std::uint64_t ActivityCube::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

EventIndexSeries::EventIndexSeries(DatasetCalendar calendar, std::size_t n_antennas)
    : calendar_(calendar),
      n_antennas_(n_antennas),
      values_(n_antennas * static_cast<std::size_t>(calendar.n_slots()), kUndefined) {}

std::optional<double> EventIndexSeries::at(AntennaId antenna, SlotIndex slot) const {
  const double v = antenna_values(antenna)[static_cast<std::size_t>(slot.week) * kSlotsPerWeek +
                                           slot.slot_of_week()];
  if (std::isnan(v)) {
    return std::nullopt;
  }
  return v;
}

std::span<const double> EventIndexSeries::antenna_values(AntennaId antenna) const {
  const std::size_t n = calendar_.n_slots();
  return std::span<const double>(values_).subspan(index_of(antenna) * n, n);
}

std::span<double> EventIndexSeries::antenna_values(AntennaId antenna) {
  const std::size_t n = calendar_.n_slots();
  return std::span<double>(values_).subspan(index_of(antenna) * n, n);
}

bool operator==(const EventIndexSeries& a, const EventIndexSeries& b) {
  if (a.n_antennas_ != b.n_antennas_ || a.values_.size() != b.values_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    const double x = a.values_[i];
    const double y = b.values_[i];
    if (!(x == y || (std::isnan(x) && std::isnan(y)))) {
      return false;
    }
  }
  return true;
}

ActivityCube aggregate(std::span<const CallRecord> records, const DatasetCalendar& calendar,
                       std::size_t n_antennas) {
  ActivityCube cube(calendar, n_antennas);
  const auto n = static_cast<std::int64_t>(records.size());
  std::int64_t first_bad = n;

#pragma omp parallel for schedule(static) reduction(min : first_bad)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    const auto slot = calendar.slot_of(r.timestamp);
    if (!slot || index_of(r.antenna) >= n_antennas) {
      first_bad = std::min(first_bad, i);
      continue;
    }
    std::uint32_t& cell = cube.count(r.antenna, *slot);
#pragma omp atomic
    ++cell;
  }

  if (first_bad < n) {
    throw std::out_of_range("record " + std::to_string(first_bad) + " (timestamp " +
                            std::to_string(records[first_bad].timestamp) +
                            ") lies outside the calendar or references an unknown antenna");
  }
  return cube;
}

EventIndexSeries event_index(const ActivityCube& cube) {
  EventIndexSeries series(cube.calendar(), cube.n_antennas());
  const int n_weeks = cube.n_weeks();
  const auto families = static_cast<std::int64_t>(cube.n_antennas()) * kSlotsPerWeek;

#pragma omp parallel for schedule(static)
  for (std::int64_t f = 0; f < families; ++f) {
    const auto antenna = static_cast<AntennaId>(f / kSlotsPerWeek);
    const auto slot_of_week = static_cast<std::size_t>(f % kSlotsPerWeek);
    const auto counts = cube.antenna_counts(antenna);
    auto values = series.antenna_values(antenna);

    std::uint64_t sum = 0;
    for (int w = 0; w < n_weeks; ++w) {
      sum += counts[static_cast<std::size_t>(w) * kSlotsPerWeek + slot_of_week];
    }
    if (sum == 0) {
      continue;  // stays undefined
    }
    const double baseline = static_cast<double>(sum) / n_weeks;
    for (int w = 0; w < n_weeks; ++w) {
      const std::size_t at = static_cast<std::size_t>(w) * kSlotsPerWeek + slot_of_week;
      values[at] = counts[at] / baseline;
    }
  }
  return series;
}

double percentile_threshold(std::span<const double> values, double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("percentile must lie in (0, 1]");
  }
  std::vector<double> defined;
  defined.reserve(values.size());
  std::copy_if(values.begin(), values.end(), std::back_inserter(defined),
               [](double v) { return !std::isnan(v); });
  if (defined.empty()) {
    throw SilentAntennaError("no defined index values (silent antenna)");
  }
  const std::size_t rank = nearest_rank(p, defined.size());
  std::nth_element(defined.begin(), defined.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   defined.end());
  return defined[rank - 1];
}

DetectionResult detect_events(const EventIndexSeries& series, double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("percentile must lie in (0, 1]");
  }
  const auto n_antennas = static_cast<std::int64_t>(series.n_antennas());
  std::vector<std::vector<DetectedEvent>> per_antenna(n_antennas);
  std::vector<std::optional<double>> thresholds(n_antennas);

#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t a = 0; a < n_antennas; ++a) {
    const auto antenna = static_cast<AntennaId>(a);
    const auto values = series.antenna_values(antenna);
    const bool any_defined =
        std::any_of(values.begin(), values.end(), [](double v) { return !std::isnan(v); });
    if (!any_defined) {
      continue;
    }
    const double threshold = percentile_threshold(values, p);
    thresholds[a] = threshold;
    flag_antenna(antenna, values, threshold, per_antenna[a]);
  }

  DetectionResult result;
  result.thresholds = std::move(thresholds);
  for (std::int64_t a = 0; a < n_antennas; ++a) {
    if (!result.thresholds[a]) {
      result.skipped.push_back(static_cast<AntennaId>(a));
    }
    for (auto& e : per_antenna[a]) {
      result.events.push_back(std::move(e));
    }
  }
  return result;
}

}  // namespace cdrev
