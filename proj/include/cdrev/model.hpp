#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cdrev/calendar.hpp"
#include "cdrev/ids.hpp"

namespace cdrev {

/// Call direction as seen from the located user.
enum class Direction : std::uint8_t { outgoing, incoming };

/// One located call leg. The antenna belongs to `located_user`.
struct CallRecord {
  UserId located_user{};
  UserId other_party{};
  Direction direction = Direction::outgoing;
  std::int64_t timestamp = 0;
  AntennaId antenna{};

  friend bool operator==(const CallRecord&, const CallRecord&) = default;
};

/// Builds a record, rejecting self-calls.
CallRecord make_call_record(UserId located, UserId other, Direction direction,
                            std::int64_t timestamp, AntennaId antenna);

/// Time-varying graph edge <caller, t_caller, callee, t_callee, antenna>.
struct TvgEdge {
  UserId caller{};
  std::int64_t t_caller = 0;
  UserId callee{};
  std::int64_t t_callee = 0;
  AntennaId antenna{};

  friend bool operator==(const TvgEdge&, const TvgEdge&) = default;
};

TvgEdge to_tvg_edge(const CallRecord& record);

/// Records plus the symbol tables that give their ids a name.
struct Corpus {
  Dictionary<UserId> users;
  Dictionary<AntennaId> antennas;
  std::vector<CallRecord> records;
};

using Edge = std::pair<UserId, UserId>;

/// Undirected simple graph of users who communicated at least once.
///
/// Adjacency is stored as CSR indexed by UserId; neighbor lists are sorted.
class ContactGraph {
 public:
  ContactGraph() = default;

  /// Builds a graph from an arbitrary edge list. Self-loops are rejected,
  /// duplicate and reversed edges collapse. `extra_nodes` adds isolated users.
  static ContactGraph from_edges(std::span<const Edge> edges,
                                 std::span<const UserId> extra_nodes = {},
                                 const UserSet& clients = {});

  const std::vector<UserId>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  bool contains(UserId u) const;
  std::span<const UserId> neighbors(UserId u) const;
  std::size_t degree(UserId u) const { return neighbors(u).size(); }
  bool has_edge(UserId u, UserId v) const;
  bool is_client(UserId u) const;

  /// All edges as (lo, hi) pairs in ascending order.
  std::vector<Edge> edges() const;

  /// One past the largest user index the graph can answer for.
  std::size_t universe() const { return is_node_.size(); }

  friend bool operator==(const ContactGraph&, const ContactGraph&) = default;

 private:
  std::vector<UserId> nodes_;
  std::vector<bool> is_node_;
  std::vector<bool> is_client_;
  std::vector<std::uint32_t> offsets_;
  std::vector<UserId> neighbors_;
};

ContactGraph build_contact_graph(std::span<const CallRecord> records, const UserSet& clients);

/// Half-open interval of epoch seconds [lo, hi).
struct TimeInterval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

/// Records at `antenna` with lo <= timestamp < hi, in input order.
std::vector<CallRecord> tvg_slice(std::span<const CallRecord> records, AntennaId antenna,
                                  TimeInterval interval);

/// Calendar whose week 0 starts at the local date of the earliest record
/// (or `epoch_start` when given) and which keeps only whole weeks.
DatasetCalendar calendar_from_records(std::span<const CallRecord> records,
                                      int utc_offset_minutes,
                                      std::optional<std::chrono::sys_days> epoch_start = {});

}  // namespace cdrev
