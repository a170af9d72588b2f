#include "cdrev/social.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cdrev {

void EventWindow::validate() const {
  if (!(0 <= start_hour && start_hour < end_hour && end_hour <= kHoursPerDay)) {
    throw std::invalid_argument("event window must satisfy 0 <= start < end <= 24");
  }
}

std::uint32_t InducedSubgraph::degree_of(UserId u) const {
  const auto& ids = attenders.ids();
  const auto it = std::lower_bound(ids.begin(), ids.end(), u);
  if (it == ids.end() || *it != u) {
    return 0;
  }
  return degree[static_cast<std::size_t>(it - ids.begin())];
}

UserSet InducedSubgraph::social_attenders() const {
  std::vector<UserId> out;
  for (std::size_t i = 0; i < degree.size(); ++i) {
    if (degree[i] > 0) out.push_back(attenders.ids()[i]);
  }
  return UserSet(std::move(out));
}

UserSet InducedSubgraph::singlets() const {
  std::vector<UserId> out;
  for (std::size_t i = 0; i < degree.size(); ++i) {
    if (degree[i] == 0) out.push_back(attenders.ids()[i]);
  }
  return UserSet(std::move(out));
}

std::size_t ComponentHistogram::max_component() const {
  if (!sizes.empty()) {
    return sizes.rbegin()->first;
  }
  return singlets > 0 ? 1 : 0;
}

UserSet attenders(std::span<const CallRecord> records, const EventWindow& window,
                  const UserSet& clients, const DatasetCalendar& calendar) {
  window.validate();
  const SlotIndex first{window.date.week, window.date.dow, window.start_hour};
  const std::int64_t lo = calendar.slot_start(first);
  const std::int64_t hi = lo + (window.end_hour - window.start_hour) * kSecondsPerHour;

  std::vector<UserId> present;
  for (const auto& r : records) {
    if (r.antenna == window.antenna && r.timestamp >= lo && r.timestamp < hi &&
        clients.contains(r.located_user)) {
      present.push_back(r.located_user);
    }
  }
  return UserSet(std::move(present));
}

InducedSubgraph induce_subgraph(const ContactGraph& graph, const UserSet& attenders) {
  InducedSubgraph sub;
  sub.attenders = attenders;
  sub.degree.assign(attenders.size(), 0);
  const auto& ids = attenders.ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (UserId v : graph.neighbors(ids[i])) {
      if (attenders.contains(v)) {
        ++sub.degree[i];
        if (ids[i] < v) sub.edges.emplace_back(ids[i], v);
      }
    }
  }
  std::sort(sub.edges.begin(), sub.edges.end());
  return sub;
}

ComponentHistogram component_size_histogram(const InducedSubgraph& sub) {
  const auto& ids = sub.attenders.ids();
  const auto position = [&](UserId u) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), u) - ids.begin());
  };

  // Union-find over attender positions.
  std::vector<std::size_t> parent(ids.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (auto [u, v] : sub.edges) {
    const auto ru = find(position(u));
    const auto rv = find(position(v));
    if (ru != rv) parent[std::max(ru, rv)] = std::min(ru, rv);
  }

  std::vector<std::size_t> component_size(ids.size(), 0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ++component_size[find(i)];
  }
  ComponentHistogram hist;
  for (std::size_t size : component_size) {
    if (size == 1) {
      ++hist.singlets;
    } else if (size >= 2) {
      ++hist.sizes[size];
    }
  }
  return hist;
}

SubgraphSummary summarize(const InducedSubgraph& sub) {
  const auto social = sub.social_attenders().size();
  return SubgraphSummary{sub.attenders.size(), social, sub.attenders.size() - social,
                         component_size_histogram(sub).max_component()};
}

}  // namespace cdrev
