// Scatter from the attender side: every attender adds one to each neighbor.

#include <map>

#include "cdrev/inference.hpp"

namespace cdrev::serial {

ContactCounts contact_counts(const ContactGraph& graph, const UserSet& attenders) {
  std::map<UserId, std::uint32_t> k;
  for (UserId u : attenders) {
    for (UserId v : graph.neighbors(u)) {
      ++k[v];
    }
  }
  return ContactCounts(k.begin(), k.end());
}

}  // namespace cdrev::serial
