#include "cdrev/ingest.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <optional>
#include <ostream>

namespace cdrev {

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
}

// Splits on commas into exactly five fields; returns nullopt on any other count.
std::optional<std::array<std::string_view, 5>> split_fields(std::string_view line) {
  std::array<std::string_view, 5> fields;
  std::size_t start = 0;
  for (std::size_t f = 0; f < 5; ++f) {
    const auto comma = line.find(',', start);
    if (f < 4) {
      if (comma == std::string_view::npos) return std::nullopt;
      fields[f] = line.substr(start, comma - start);
      start = comma + 1;
    } else {
      if (comma != std::string_view::npos) return std::nullopt;
      fields[f] = line.substr(start);
    }
  }
  return fields;
}

}  // namespace

ParsedCdr parse_cdr(std::istream& in) {
  if (!in) {
    throw IngestError("CDR stream is not readable");
  }
  ParsedCdr out;
  auto& report = out.report;
  auto& corpus = out.corpus;

  std::string line;
  if (!std::getline(in, line)) {
    throw IngestError("CDR stream is empty; expected header '" + std::string(kCdrHeader) + "'");
  }
  strip_cr(line);
  if (line != kCdrHeader) {
    throw IngestError("unexpected CDR header '" + line + "'");
  }

  std::size_t line_no = 1;
  auto reject = [&](std::string reason) {
    ++report.rejected;
    if (report.first_errors.size() < IngestReport::kMaxErrors) {
      report.first_errors.push_back({line_no, std::move(reason)});
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    const auto fields = split_fields(line);
    if (!fields) {
      reject("expected 5 comma-separated fields");
      continue;
    }
    const auto [located, other, direction, ts_text, antenna] = *fields;
    if (located.empty() || other.empty() || antenna.empty()) {
      reject("empty identifier");
      continue;
    }
    Direction dir;
    if (direction == "out") {
      dir = Direction::outgoing;
    } else if (direction == "in") {
      dir = Direction::incoming;
    } else {
      reject("direction must be 'out' or 'in'");
      continue;
    }
    std::int64_t ts = 0;
    const auto [ptr, ec] = std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(), ts);
    if (ec != std::errc{} || ptr != ts_text.data() + ts_text.size() || ts_text.empty()) {
      reject("timestamp is not a decimal integer");
      continue;
    }
    if (located == other) {
      reject("self-call");
      continue;
    }
    corpus.records.push_back(CallRecord{corpus.users.intern(located), corpus.users.intern(other),
                                        dir, ts, corpus.antennas.intern(antenna)});
    ++report.accepted;
  }
  if (in.bad()) {
    throw IngestError("read error after line " + std::to_string(line_no));
  }
  return out;
}

std::set<std::string> load_client_set(std::istream& in) {
  if (!in) {
    throw IngestError("client roster stream is not readable");
  }
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (!line.empty()) {
      out.insert(line);
    }
  }
  if (in.bad()) {
    throw IngestError("read error in client roster");
  }
  return out;
}

UserSet resolve_clients(Dictionary<UserId>& users, const std::set<std::string>& names) {
  std::vector<UserId> ids;
  ids.reserve(names.size());
  for (const auto& n : names) {
    ids.push_back(users.intern(n));
  }
  return UserSet(std::move(ids));
}

void write_cdr(std::ostream& out, const Corpus& corpus) {
  std::string buf;
  buf.reserve(1 << 16);
  buf.append(kCdrHeader).push_back('\n');
  char num[24];
  for (const auto& r : corpus.records) {
    buf.append(corpus.users.name(r.located_user)).push_back(',');
    buf.append(corpus.users.name(r.other_party)).push_back(',');
    buf.append(r.direction == Direction::outgoing ? "out," : "in,");
    const auto res = std::to_chars(num, num + sizeof num, r.timestamp);
    buf.append(num, res.ptr).push_back(',');
    buf.append(corpus.antennas.name(r.antenna)).push_back('\n');
    if (buf.size() > (1 << 16) - 256) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_client_roster(std::ostream& out, const Dictionary<UserId>& users,
                         const UserSet& clients) {
  for (UserId u : clients) {
    out << users.name(u) << '\n';
  }
}

}  // namespace cdrev
