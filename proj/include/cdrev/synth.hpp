#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cdrev/calendar.hpp"
#include "cdrev/model.hpp"

namespace cdrev {

/// Mean background calls per antenna-hour, indexed [dow][hour].
using BaselineProfile = std::array<std::array<double, kHoursPerDay>, kDaysPerWeek>;

BaselineProfile flat_profile(double mean);
/// Daily cosine swing between `low` (04:00) and `high` (16:00), same every day.
BaselineProfile diurnal_profile(double low, double high);

/// A large event injected into the synthetic corpus.
struct PlantedEvent {
  std::uint32_t antenna = 0;
  DayIndex day;
  int start_hour = 18;
  int end_hour = 22;
  double intensity_multiplier = 5.0;
  std::uint32_t n_attendees = 0;
  double social_fraction = 0.5;

  friend bool operator==(const PlantedEvent&, const PlantedEvent&) = default;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::uint32_t n_users = 20000;
  double client_fraction = 0.6;
  std::uint32_t n_antennas = 10;
  int n_weeks = 13;
  std::chrono::sys_days epoch_start{std::chrono::year{2011} / 11 / 7};
  int utc_offset_minutes = -180;
  BaselineProfile baseline_profile = diurnal_profile(50.0, 150.0);
  /// Each user draws this many random acquaintances; background calls go
  /// to acquaintances, so the contact graph has mean degree ~2x this.
  std::uint32_t contacts_per_user = 4;
  std::vector<PlantedEvent> events;
  std::map<std::uint32_t, double> group_size_distribution{{2, 0.60}, {3, 0.25}, {4, 0.10}, {7, 0.05}};

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
  std::uint32_t n_clients() const;
  DatasetCalendar calendar() const;
};

struct SynthOutput {
  Corpus corpus;
  UserSet clients;
  std::vector<PlantedEvent> truth;
  /// Per planted event: every sampled attendee.
  std::vector<UserSet> attendees;
  /// Per planted event: the social groups (each of size >= 2).
  std::vector<std::vector<std::vector<UserId>>> groups;
};

/// Generates a corpus. Identical configs give identical output.
///
/// Background: for every (antenna, week, dow, hour) a Poisson count with mean
/// baseline_profile[dow][hour] (std::poisson_distribution over mt19937_64,
/// one derived seed per antenna). Each call is located at a client whose home
/// is that antenna and goes to one of the client's acquaintances.
///
/// Events: every attendee places one call at the event antenna at a uniform
/// time inside the window; a further Poisson number of calls per hour with
/// mean max(0, (m - 1) * baseline - n_attendees / hours) tops the expected slot
/// volume up to m * baseline. The first round(social_fraction * n) attendees
/// are cut into groups whose members call each other once, from home, on a
/// different day.
SynthOutput generate(const SynthConfig& config);

SynthConfig parse_synth_config(std::string_view json_text);
std::string synth_config_to_json(const SynthConfig& config);

/// Ground truth: `antenna,week,dow,start_hour,end_hour,multiplier,n_attendees`.
void write_truth(std::ostream& out, const SynthOutput& output);
/// Group membership: `event,group,user`.
void write_groups(std::ostream& out, const SynthOutput& output);

}  // namespace cdrev
