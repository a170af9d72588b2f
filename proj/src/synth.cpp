#include "cdrev/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace cdrev {

namespace {

using Rng = std::mt19937_64;

// Stream tags for derived seeds.
constexpr std::uint64_t kPopulationStream = 0x1;
constexpr std::uint64_t kAntennaStream = 0x100000;
constexpr std::uint64_t kEventStream = 0x200000000ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ stream));
}

std::uint32_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::uint32_t>(0, static_cast<std::uint32_t>(n - 1))(rng);
}

std::uint32_t poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::uint32_t>(mean)(rng);
}

std::string padded_name(char prefix, std::uint32_t i, std::uint32_t count) {
  const int width = count <= 1 ? 1 : static_cast<int>(std::to_string(count - 1).size());
  std::string digits = std::to_string(i);
  return prefix + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0') + digits;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Social and spatial structure shared by all generation stages.
struct Population {
  std::vector<std::uint32_t> clients;                    // sorted user indices
  std::vector<std::vector<std::uint32_t>> acquaintances; // per user
  std::vector<std::uint32_t> home;                       // per client position
  std::vector<std::vector<std::uint32_t>> residents;     // per antenna, client user indices
};

Population build_population(const SynthConfig& cfg) {
  Population pop;
  Rng rng = derived_rng(cfg.seed, kPopulationStream);
  const std::uint32_t n = cfg.n_users;

  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  pop.clients.assign(order.begin(), order.begin() + cfg.n_clients());
  std::sort(pop.clients.begin(), pop.clients.end());

  pop.acquaintances.resize(n);
  if (n >= 2) {
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t c = 0; c < cfg.contacts_per_user; ++c) {
        std::uint32_t v = uniform_index(rng, n - 1);
        if (v >= u) ++v;
        pop.acquaintances[u].push_back(v);
        pop.acquaintances[v].push_back(u);
      }
    }
  }

  pop.residents.resize(cfg.n_antennas);
  if (cfg.n_antennas > 0) {
    for (std::uint32_t c : pop.clients) {
      const auto a = uniform_index(rng, cfg.n_antennas);
      pop.home.push_back(a);
      pop.residents[a].push_back(c);
    }
  }
  return pop;
}

std::uint32_t pick_partner(Rng& rng, const Population& pop, std::uint32_t user, std::uint32_t n_users) {
  const auto& known = pop.acquaintances[user];
  if (!known.empty()) {
    return known[uniform_index(rng, known.size())];
  }
  std::uint32_t v = uniform_index(rng, n_users - 1);
  return v >= user ? v + 1 : v;
}

CallRecord make_call(Rng& rng, std::uint32_t located, std::uint32_t other, std::int64_t ts,
                     std::uint32_t antenna) {
  const auto dir = std::bernoulli_distribution(0.5)(rng) ? Direction::outgoing : Direction::incoming;
  return make_call_record(static_cast<UserId>(located), static_cast<UserId>(other), dir, ts,
                          static_cast<AntennaId>(antenna));
}

std::vector<CallRecord> background_for_antenna(const SynthConfig& cfg, const Population& pop,
                                               const DatasetCalendar& calendar, std::uint32_t antenna) {
  std::vector<CallRecord> out;
  if (pop.clients.empty() || cfg.n_users < 2) return out;
  Rng rng = derived_rng(cfg.seed, kAntennaStream + antenna);
  const auto& locals = pop.residents[antenna].empty() ? pop.clients : pop.residents[antenna];
  std::uniform_int_distribution<std::int64_t> second(0, kSecondsPerHour - 1);
  for (int w = 0; w < cfg.n_weeks; ++w) {
    for (int d = 0; d < kDaysPerWeek; ++d) {
      for (int h = 0; h < kHoursPerDay; ++h) {
        const std::int64_t start = calendar.slot_start({w, d, h});
        const auto count = poisson(rng, cfg.baseline_profile[d][h]);
        for (std::uint32_t c = 0; c < count; ++c) {
          const auto located = locals[uniform_index(rng, locals.size())];
          const auto other = pick_partner(rng, pop, located, cfg.n_users);
          out.push_back(make_call(rng, located, other, start + second(rng), antenna));
        }
      }
    }
  }
  return out;
}

std::uint32_t draw_group_size(Rng& rng, const std::map<std::uint32_t, double>& dist) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (const auto& [size, prob] : dist) {
    if (u < prob) return size;
    u -= prob;
  }
  return dist.rbegin()->first;
}

}  // namespace

BaselineProfile flat_profile(double mean) {
  BaselineProfile p;
  for (auto& day : p) day.fill(mean);
  return p;
}

BaselineProfile diurnal_profile(double low, double high) {
  BaselineProfile p;
  for (auto& day : p) {
    for (int h = 0; h < kHoursPerDay; ++h) {
      const double phase = 2.0 * std::numbers::pi * (h - 16) / kHoursPerDay;
      day[h] = low + (high - low) * 0.5 * (1.0 + std::cos(phase));
    }
  }
  return p;
}

std::uint32_t SynthConfig::n_clients() const {
  return static_cast<std::uint32_t>(std::llround(client_fraction * n_users));
}

DatasetCalendar SynthConfig::calendar() const {
  return DatasetCalendar(epoch_start, utc_offset_minutes, n_weeks);
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid synth config: " + msg); };
  if (!(client_fraction >= 0.0 && client_fraction <= 1.0)) fail("client_fraction must lie in [0, 1]");
  if (n_weeks < 2) fail("n_weeks must be at least 2");
  for (const auto& day : baseline_profile) {
    for (double m : day) {
      if (!(m >= 0.0) || !std::isfinite(m)) fail("baseline means must be finite and >= 0");
    }
  }
  if (group_size_distribution.empty()) fail("group_size_distribution is empty");
  double total = 0.0;
  for (const auto& [size, prob] : group_size_distribution) {
    if (size < 2) fail("group sizes must be >= 2");
    if (!(prob >= 0.0)) fail("group size probabilities must be >= 0");
    total += prob;
  }
  if (std::abs(total - 1.0) > 1e-9) fail("group_size_distribution must sum to 1");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const std::string tag = "event " + std::to_string(i) + ": ";
    if (e.antenna >= n_antennas) fail(tag + "antenna out of range");
    if (e.day.week < 0 || e.day.week >= n_weeks) fail(tag + "week out of range");
    if (e.day.dow < 0 || e.day.dow >= kDaysPerWeek) fail(tag + "dow out of range");
    if (!(0 <= e.start_hour && e.start_hour < e.end_hour && e.end_hour <= kHoursPerDay)) {
      fail(tag + "window must satisfy 0 <= start < end <= 24");
    }
    if (!(e.intensity_multiplier > 1.0) || !std::isfinite(e.intensity_multiplier)) {
      fail(tag + "intensity_multiplier must exceed 1");
    }
    if (!(e.social_fraction >= 0.0 && e.social_fraction <= 1.0)) fail(tag + "social_fraction must lie in [0, 1]");
    if (e.n_attendees > n_users) fail(tag + "n_attendees exceeds n_users");
    if (e.n_attendees > n_clients()) fail(tag + "n_attendees exceeds the number of clients");
    if (e.n_attendees > 0 && n_users < 2) fail(tag + "attendees need at least two users to call");
  }
}

SynthOutput generate(const SynthConfig& cfg) {
  cfg.validate();
  const auto calendar = cfg.calendar();
  const Population pop = build_population(cfg);

  SynthOutput out;
  for (std::uint32_t u = 0; u < cfg.n_users; ++u) out.corpus.users.intern(padded_name('u', u, cfg.n_users));
  for (std::uint32_t a = 0; a < cfg.n_antennas; ++a) out.corpus.antennas.intern(padded_name('a', a, cfg.n_antennas));
  {
    std::vector<UserId> ids;
    for (auto c : pop.clients) ids.push_back(static_cast<UserId>(c));
    out.clients = UserSet(std::move(ids));
  }

  // Background, one independent stream per antenna.
  const auto n_antennas = static_cast<std::int64_t>(cfg.n_antennas);
  std::vector<std::vector<CallRecord>> per_antenna(cfg.n_antennas);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t a = 0; a < n_antennas; ++a) {
    per_antenna[a] = background_for_antenna(cfg, pop, calendar, static_cast<std::uint32_t>(a));
  }
  auto& records = out.corpus.records;
  std::size_t total = 0;
  for (const auto& chunk : per_antenna) total += chunk.size();
  records.reserve(total);
  for (auto& chunk : per_antenna) {
    records.insert(records.end(), chunk.begin(), chunk.end());
    std::vector<CallRecord>().swap(chunk);
  }

  std::vector<std::uint32_t> client_pool(pop.clients);
  for (std::size_t e = 0; e < cfg.events.size(); ++e) {
    const auto& ev = cfg.events[e];
    Rng rng = derived_rng(cfg.seed, kEventStream + e);
    out.truth.push_back(ev);

    // Partial Fisher-Yates over the client pool.
    std::vector<std::uint32_t> chosen;
    for (std::uint32_t i = 0; i < ev.n_attendees; ++i) {
      const auto j = i + uniform_index(rng, client_pool.size() - i);
      std::swap(client_pool[i], client_pool[j]);
      chosen.push_back(client_pool[i]);
    }
    {
      std::vector<UserId> ids;
      for (auto c : chosen) ids.push_back(static_cast<UserId>(c));
      out.attendees.push_back(UserSet(std::move(ids)));
    }

    const int hours = ev.end_hour - ev.start_hour;
    const std::int64_t window_lo = calendar.slot_start({ev.day.week, ev.day.dow, ev.start_hour});
    const std::int64_t window_len = hours * kSecondsPerHour;
    std::uniform_int_distribution<std::int64_t> in_window(0, window_len - 1);
    for (auto a : chosen) {
      records.push_back(make_call(rng, a, pick_partner(rng, pop, a, cfg.n_users),
                                  window_lo + in_window(rng), ev.antenna));
    }
    std::uniform_int_distribution<std::int64_t> second(0, kSecondsPerHour - 1);
    for (int h = ev.start_hour; h < ev.end_hour; ++h) {
      const double base = cfg.baseline_profile[ev.day.dow][h];
      const double mean = (ev.intensity_multiplier - 1.0) * base - static_cast<double>(ev.n_attendees) / hours;
      const auto count = chosen.empty() ? 0 : poisson(rng, mean);
      const std::int64_t start = calendar.slot_start({ev.day.week, ev.day.dow, h});
      for (std::uint32_t c = 0; c < count; ++c) {
        const auto a = chosen[uniform_index(rng, chosen.size())];
        records.push_back(make_call(rng, a, pick_partner(rng, pop, a, cfg.n_users), start + second(rng), ev.antenna));
      }
    }

    // Social groups, wired with one off-event call per member pair.
    const auto n_social = static_cast<std::uint32_t>(std::llround(ev.social_fraction * ev.n_attendees));
    std::vector<std::vector<UserId>> groups;
    std::uint32_t next = 0;
    while (n_social - next >= 2) {
      auto size = std::min(draw_group_size(rng, cfg.group_size_distribution), n_social - next);
      if (n_social - next - size == 1) {
        // Never strand a single member: grow or shrink to a configured size.
        if (cfg.group_size_distribution.contains(size + 1)) {
          ++size;
        } else if (size > 2 && cfg.group_size_distribution.contains(size - 1)) {
          --size;
        }
      }
      std::vector<UserId> group;
      for (std::uint32_t i = 0; i < size; ++i) group.push_back(static_cast<UserId>(chosen[next + i]));
      next += size;
      groups.push_back(std::move(group));
    }
    const std::int64_t event_day_lo = calendar.slot_start({ev.day.week, ev.day.dow, 0});
    std::uniform_int_distribution<std::int64_t> any_second(calendar.range_begin(),
                                                           calendar.range_end() - 1 - kSecondsPerDay);
    for (const auto& group : groups) {
      for (std::size_t i = 0; i < group.size(); ++i) {
        for (std::size_t j = i + 1; j < group.size(); ++j) {
          const auto u = index_of(group[i]);
          const auto v = index_of(group[j]);
          std::int64_t ts = any_second(rng);
          if (ts >= event_day_lo) ts += kSecondsPerDay;  // skip the event day
          const auto pos = std::lower_bound(pop.clients.begin(), pop.clients.end(), u) - pop.clients.begin();
          records.push_back(make_call(rng, u, v, ts, pop.home[static_cast<std::size_t>(pos)]));
        }
      }
    }
    out.groups.push_back(std::move(groups));
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const CallRecord& a, const CallRecord& b) { return a.timestamp < b.timestamp; });
  return out;
}

SynthConfig parse_synth_config(std::string_view json_text) {
  using nlohmann::json;
  SynthConfig cfg;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    static const std::vector<std::string> known = {
        "seed", "n_users", "client_fraction", "n_antennas", "n_weeks", "epoch_start", "utc_offset",
        "baseline_profile", "contacts_per_user", "events", "group_size_distribution"};
    for (const auto& [key, _] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    }
    auto count = [&](const json& node, const char* key, auto fallback) {
      if (!node.contains(key)) return static_cast<decltype(fallback)>(fallback);
      const auto v = node.at(key).get<std::int64_t>();
      if (v < 0 || v > static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max())) {
        throw std::invalid_argument(std::string(key) + " must be a non-negative integer");
      }
      return static_cast<decltype(fallback)>(v);
    };
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.n_users = count(j, "n_users", cfg.n_users);
    cfg.client_fraction = j.value("client_fraction", cfg.client_fraction);
    cfg.n_antennas = count(j, "n_antennas", cfg.n_antennas);
    cfg.n_weeks = count(j, "n_weeks", cfg.n_weeks);
    cfg.contacts_per_user = count(j, "contacts_per_user", cfg.contacts_per_user);
    if (j.contains("epoch_start")) cfg.epoch_start = parse_iso_date(j.at("epoch_start").get<std::string>());
    if (j.contains("utc_offset")) cfg.utc_offset_minutes = parse_utc_offset(j.at("utc_offset").get<std::string>());

    if (j.contains("baseline_profile")) {
      const auto& b = j.at("baseline_profile");
      if (b.is_number()) {
        cfg.baseline_profile = flat_profile(b.get<double>());
      } else if (b.is_object()) {
        cfg.baseline_profile = diurnal_profile(b.at("low").get<double>(), b.at("high").get<double>());
      } else if (b.is_array() && b.size() == kDaysPerWeek) {
        for (int d = 0; d < kDaysPerWeek; ++d) {
          if (b[d].size() != kHoursPerDay) throw std::invalid_argument("baseline_profile rows need 24 values");
          for (int h = 0; h < kHoursPerDay; ++h) cfg.baseline_profile[d][h] = b[d][h].get<double>();
        }
      } else {
        throw std::invalid_argument("baseline_profile must be a number, {low, high}, or a 7x24 array");
      }
    }

    if (j.contains("group_size_distribution")) {
      cfg.group_size_distribution.clear();
      for (const auto& [key, prob] : j.at("group_size_distribution").items()) {
        cfg.group_size_distribution[static_cast<std::uint32_t>(std::stoul(key))] = prob.get<double>();
      }
    }

    if (j.contains("events")) {
      for (const auto& e : j.at("events")) {
        PlantedEvent ev;
        ev.antenna = count(e, "antenna", ev.antenna);
        ev.day.week = count(e, "week", ev.day.week);
        ev.day.dow = count(e, "dow", ev.day.dow);
        ev.start_hour = count(e, "start_hour", ev.start_hour);
        ev.end_hour = count(e, "end_hour", ev.end_hour);
        ev.intensity_multiplier = e.value("intensity_multiplier", ev.intensity_multiplier);
        ev.n_attendees = count(e, "n_attendees", ev.n_attendees);
        ev.social_fraction = e.value("social_fraction", ev.social_fraction);
        cfg.events.push_back(ev);
      }
    }
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("malformed synth config: ") + ex.what());
  }
  cfg.validate();
  return cfg;
}

std::string synth_config_to_json(const SynthConfig& cfg) {
  using nlohmann::json;
  json j;
  j["seed"] = cfg.seed;
  j["n_users"] = cfg.n_users;
  j["client_fraction"] = cfg.client_fraction;
  j["n_antennas"] = cfg.n_antennas;
  j["n_weeks"] = cfg.n_weeks;
  j["epoch_start"] = format_iso_date(cfg.epoch_start);
  j["utc_offset"] = format_utc_offset(cfg.utc_offset_minutes);
  j["baseline_profile"] = cfg.baseline_profile;
  j["contacts_per_user"] = cfg.contacts_per_user;
  json groups = json::object();
  for (const auto& [size, prob] : cfg.group_size_distribution) groups[std::to_string(size)] = prob;
  j["group_size_distribution"] = groups;
  j["events"] = json::array();
  for (const auto& e : cfg.events) {
    j["events"].push_back({{"antenna", e.antenna},
                           {"week", e.day.week},
                           {"dow", e.day.dow},
                           {"start_hour", e.start_hour},
                           {"end_hour", e.end_hour},
                           {"intensity_multiplier", e.intensity_multiplier},
                           {"n_attendees", e.n_attendees},
                           {"social_fraction", e.social_fraction}});
  }
  return j.dump(2);
}

void write_truth(std::ostream& out, const SynthOutput& output) {
  out << "antenna,week,dow,start_hour,end_hour,multiplier,n_attendees\n";
  for (const auto& e : output.truth) {
    out << output.corpus.antennas.name(static_cast<AntennaId>(e.antenna)) << ',' << e.day.week << ','
        << e.day.dow << ',' << e.start_hour << ',' << e.end_hour << ','
        << format_double(e.intensity_multiplier) << ',' << e.n_attendees << '\n';
  }
}

void write_groups(std::ostream& out, const SynthOutput& output) {
  out << "event,group,user\n";
  for (std::size_t e = 0; e < output.groups.size(); ++e) {
    for (std::size_t g = 0; g < output.groups[e].size(); ++g) {
      for (UserId u : output.groups[e][g]) {
        out << e << ',' << g << ',' << output.corpus.users.name(u) << '\n';
      }
    }
  }
}

}  // namespace cdrev
