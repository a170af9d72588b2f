#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "cdrev/model.hpp"

namespace cdrev {

/// (user, k) pairs with k = |neighbors(user) ∩ U| >= 1, sorted by user.
using ContactCounts = std::vector<std::pair<UserId, std::uint32_t>>;

struct AttendanceRow {
  std::uint64_t numerator = 0;    // users in U with k contacts in U
  std::uint64_t denominator = 0;  // users in G with k contacts in U
  double p = 0.0;

  friend bool operator==(const AttendanceRow&, const AttendanceRow&) = default;
};

/// Rows keyed by k >= 1; k values with an empty denominator are absent.
struct AttendanceTable {
  std::map<std::uint32_t, AttendanceRow> rows;

  friend bool operator==(const AttendanceTable&, const AttendanceTable&) = default;
};

/// Rows keyed by K = 1 .. max k; each row counts users with at least K contacts in U.
using CumulativeTable = std::map<std::uint32_t, AttendanceRow>;

struct InferenceOptions {
  /// Restrict the denominator population to client users.
  bool clients_only = false;
};

struct FitPoint {
  double k = 0.0;
  double p = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r = 0.0;
  std::size_t n_points = 0;
  /// True when the response has zero variance and r was set to 0.
  bool degenerate = false;
};

ContactCounts contact_counts(const ContactGraph& graph, const UserSet& attenders);

/// Throws std::invalid_argument if `attenders` is empty.
AttendanceTable attendance_probability(const ContactGraph& graph, const UserSet& attenders,
                                       InferenceOptions options = {});

/// Throws std::invalid_argument if `attenders` is empty.
CumulativeTable cumulative_attendance_probability(const ContactGraph& graph,
                                                  const UserSet& attenders,
                                                  InferenceOptions options = {});

/// Ordinary least squares of p on k with Pearson r. Needs two distinct k.
LinearFit linear_fit(std::span<const FitPoint> points);

/// (k, p) rows whose denominator is at least `min_denominator`.
std::vector<FitPoint> fit_points(const AttendanceTable& table, std::uint64_t min_denominator = 5);

namespace serial {
ContactCounts contact_counts(const ContactGraph& graph, const UserSet& attenders);
}  // namespace serial

}  // namespace cdrev
