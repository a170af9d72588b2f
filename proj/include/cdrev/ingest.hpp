#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cdrev/model.hpp"

namespace cdrev {

inline constexpr std::string_view kCdrHeader = "located_user,other_party,direction,timestamp,antenna";

struct LineError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct IngestReport {
  static constexpr std::size_t kMaxErrors = 20;

  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<LineError> first_errors;
};

struct ParsedCdr {
  Corpus corpus;
  IngestReport report;
};

/// Thrown when a stream cannot be read at all (as opposed to a bad line).
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a CDR file. Malformed lines are rejected and counted; a missing or
/// wrong header, or an unreadable stream, throws IngestError.
ParsedCdr parse_cdr(std::istream& in);

/// Reads a client roster: one identifier per line, blank lines skipped.
std::set<std::string> load_client_set(std::istream& in);

/// Interns roster names into `users` and returns them as a UserSet.
UserSet resolve_clients(Dictionary<UserId>& users, const std::set<std::string>& names);

void write_cdr(std::ostream& out, const Corpus& corpus);
void write_client_roster(std::ostream& out, const Dictionary<UserId>& users, const UserSet& clients);

}  // namespace cdrev
