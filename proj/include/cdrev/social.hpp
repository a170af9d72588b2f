#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "cdrev/calendar.hpp"
#include "cdrev/model.hpp"

namespace cdrev {

/// An antenna, a local day and a half-open local hour range [start, end).
struct EventWindow {
  AntennaId antenna{};
  DayIndex date;
  int start_hour = 18;
  int end_hour = 22;

  /// Throws std::invalid_argument unless 0 <= start < end <= 24.
  void validate() const;
};

/// Subgraph of G induced by a set of attenders U.
struct InducedSubgraph {
  UserSet attenders;
  std::vector<Edge> edges;              // (lo, hi), ascending
  std::vector<std::uint32_t> degree;    // aligned with attenders.ids()

  std::uint32_t degree_of(UserId u) const;
  /// Attenders with at least one attending neighbor.
  UserSet social_attenders() const;
  /// Attenders with no attending neighbor.
  UserSet singlets() const;
};

struct ComponentHistogram {
  std::map<std::size_t, std::size_t> sizes;  // component size (>= 2) -> count
  std::size_t singlets = 0;

  /// Largest component, counting a singlet as size 1; 0 when empty.
  std::size_t max_component() const;
};

struct SubgraphSummary {
  std::size_t attenders = 0;
  std::size_t social_attenders = 0;
  std::size_t singlets = 0;
  std::size_t max_component = 0;
};

/// Client users located at the window's antenna during its hours.
UserSet attenders(std::span<const CallRecord> records, const EventWindow& window,
                  const UserSet& clients, const DatasetCalendar& calendar);

InducedSubgraph induce_subgraph(const ContactGraph& graph, const UserSet& attenders);

ComponentHistogram component_size_histogram(const InducedSubgraph& sub);

SubgraphSummary summarize(const InducedSubgraph& sub);

}  // namespace cdrev
