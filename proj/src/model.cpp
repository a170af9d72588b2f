#include "cdrev/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace cdrev {

CallRecord make_call_record(UserId located, UserId other, Direction direction,
                            std::int64_t timestamp, AntennaId antenna) {
  if (located == other) {
    throw std::invalid_argument("self-call: located user equals other party");
  }
  return CallRecord{located, other, direction, timestamp, antenna};
}

TvgEdge to_tvg_edge(const CallRecord& record) {
  const bool outgoing = record.direction == Direction::outgoing;
  return TvgEdge{
      .caller = outgoing ? record.located_user : record.other_party,
      .t_caller = record.timestamp,
      .callee = outgoing ? record.other_party : record.located_user,
      .t_callee = record.timestamp,
      .antenna = record.antenna,
  };
}

ContactGraph ContactGraph::from_edges(std::span<const Edge> edges,
                                      std::span<const UserId> extra_nodes,
                                      const UserSet& clients) {
  std::vector<Edge> canonical;
  canonical.reserve(edges.size());
  std::vector<UserId> nodes(extra_nodes.begin(), extra_nodes.end());
  for (auto [u, v] : edges) {
    if (u == v) {
      throw std::invalid_argument("contact graph cannot hold a self-loop");
    }
    canonical.emplace_back(std::min(u, v), std::max(u, v));
    nodes.push_back(u);
    nodes.push_back(v);
  }
  std::sort(canonical.begin(), canonical.end());
  canonical.erase(std::unique(canonical.begin(), canonical.end()), canonical.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  ContactGraph g;
  const std::size_t universe = nodes.empty() ? 0 : index_of(nodes.back()) + 1;
  g.nodes_ = std::move(nodes);
  g.is_node_.assign(universe, false);
  g.is_client_.assign(universe, false);
  for (UserId u : g.nodes_) {
    g.is_node_[index_of(u)] = true;
    g.is_client_[index_of(u)] = clients.contains(u);
  }

  std::vector<std::uint32_t> degree(universe, 0);
  for (auto [u, v] : canonical) {
    ++degree[index_of(u)];
    ++degree[index_of(v)];
  }
  g.offsets_.assign(universe + 1, 0);
  for (std::size_t i = 0; i < universe; ++i) {
    g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  }
  g.neighbors_.resize(canonical.size() * 2);
  std::vector<std::uint32_t> cursor(g.offsets_.begin(), g.offsets_.begin() + universe);
  for (auto [u, v] : canonical) {
    g.neighbors_[cursor[index_of(u)]++] = v;
    g.neighbors_[cursor[index_of(v)]++] = u;
  }
  for (std::size_t i = 0; i < universe; ++i) {
    std::sort(g.neighbors_.begin() + g.offsets_[i], g.neighbors_.begin() + g.offsets_[i + 1]);
  }
  return g;
}

bool ContactGraph::contains(UserId u) const {
  return index_of(u) < is_node_.size() && is_node_[index_of(u)];
}

std::span<const UserId> ContactGraph::neighbors(UserId u) const {
  const auto i = index_of(u);
  if (i >= is_node_.size()) {
    return {};
  }
  return std::span<const UserId>(neighbors_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

bool ContactGraph::has_edge(UserId u, UserId v) const {
  const auto adj = neighbors(u);
  return std::binary_search(adj.begin(), adj.end(), v);
}

bool ContactGraph::is_client(UserId u) const {
  return index_of(u) < is_client_.size() && is_client_[index_of(u)];
}

std::vector<Edge> ContactGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (UserId u : nodes_) {
    for (UserId v : neighbors(u)) {
      if (u < v) {
        out.emplace_back(u, v);
      }
    }
  }
  return out;
}

ContactGraph build_contact_graph(std::span<const CallRecord> records, const UserSet& clients) {
  std::vector<Edge> pairs;
  pairs.reserve(records.size());
  for (const auto& r : records) {
    pairs.emplace_back(r.located_user, r.other_party);
  }
  return ContactGraph::from_edges(pairs, {}, clients);
}

std::vector<CallRecord> tvg_slice(std::span<const CallRecord> records, AntennaId antenna,
                                  TimeInterval interval) {
  if (!(interval.lo < interval.hi)) {
    throw std::invalid_argument("tvg_slice needs a non-empty interval [lo, hi)");
  }
  std::vector<CallRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out), [&](const CallRecord& r) {
    return r.antenna == antenna && r.timestamp >= interval.lo && r.timestamp < interval.hi;
  });
  return out;
}

DatasetCalendar calendar_from_records(std::span<const CallRecord> records, int utc_offset_minutes,
                                      std::optional<std::chrono::sys_days> epoch_start) {
  if (records.empty()) {
    throw std::invalid_argument("cannot derive a calendar from an empty corpus");
  }
  const auto [lo, hi] = std::minmax_element(
      records.begin(), records.end(),
      [](const CallRecord& a, const CallRecord& b) { return a.timestamp < b.timestamp; });
  const auto first = epoch_start.value_or(local_date(lo->timestamp, utc_offset_minutes));
  const auto last = local_date(hi->timestamp, utc_offset_minutes);
  const auto days = (last - first).count() + 1;
  const auto weeks = days / kDaysPerWeek;
  if (weeks < 1) {
    throw std::invalid_argument("corpus spans less than one whole week");
  }
  return DatasetCalendar(first, utc_offset_minutes, static_cast<int>(weeks));
}

}  // namespace cdrev
