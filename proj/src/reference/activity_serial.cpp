// Straight-line versions of the activity kernels. No OpenMP, no shared
// helpers with activity.cpp beyond the public types.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cdrev/activity.hpp"

namespace cdrev::serial {

ActivityCube aggregate(std::span<const CallRecord> records, const DatasetCalendar& calendar,
                       std::size_t n_antennas) {
  ActivityCube cube(calendar, n_antennas);
  for (const auto& r : records) {
    const auto slot = calendar.slot_of(r.timestamp);
    if (!slot || index_of(r.antenna) >= n_antennas) {
      throw std::out_of_range("record outside calendar or antenna range");
    }
    ++cube.count(r.antenna, *slot);
  }
  return cube;
}

EventIndexSeries event_index(const ActivityCube& cube) {
  EventIndexSeries series(cube.calendar(), cube.n_antennas());
  const int n = cube.n_weeks();
  for (std::size_t a = 0; a < cube.n_antennas(); ++a) {
    const auto antenna = static_cast<AntennaId>(a);
    auto values = series.antenna_values(antenna);
    for (int j = 0; j < kDaysPerWeek; ++j) {
      for (int k = 0; k < kHoursPerDay; ++k) {
        std::uint64_t sum = 0;
        for (int l = 0; l < n; ++l) {
          sum += cube.count(antenna, {l, j, k});
        }
        if (sum == 0) continue;
        const double baseline = static_cast<double>(sum) / n;
        for (int i = 0; i < n; ++i) {
          values[static_cast<std::size_t>(i) * kSlotsPerWeek + SlotIndex{i, j, k}.slot_of_week()] =
              cube.count(antenna, {i, j, k}) / baseline;
        }
      }
    }
  }
  return series;
}

DetectionResult detect_events(const EventIndexSeries& series, double p) {
  DetectionResult result;
  for (std::size_t a = 0; a < series.n_antennas(); ++a) {
    const auto antenna = static_cast<AntennaId>(a);
    const auto values = series.antenna_values(antenna);

    std::vector<double> sorted;
    for (double v : values) {
      if (!std::isnan(v)) sorted.push_back(v);
    }
    if (sorted.empty()) {
      result.skipped.push_back(antenna);
      result.thresholds.emplace_back();
      continue;
    }
    std::sort(sorted.begin(), sorted.end());
    const double threshold = percentile_threshold(sorted, p);
    result.thresholds.emplace_back(threshold);

    for (int i = 0; i < series.n_weeks(); ++i) {
      for (int j = 0; j < kDaysPerWeek; ++j) {
        int k = 0;
        while (k < kHoursPerDay) {
          auto flagged = [&](int hour) {
            const auto e = series.at(antenna, {i, j, hour});
            return e && *e > threshold;
          };
          if (!flagged(k)) {
            ++k;
            continue;
          }
          DetectedEvent ev{antenna, {i, j}, k, k, 0.0, {}};
          while (k < kHoursPerDay && flagged(k)) {
            ev.peak_index = std::max(ev.peak_index, *series.at(antenna, {i, j, k}));
            ev.slots.push_back({i, j, k});
            ++k;
          }
          ev.end_hour = k;
          result.events.push_back(std::move(ev));
        }
      }
    }
  }
  return result;
}

}  // namespace cdrev::serial
