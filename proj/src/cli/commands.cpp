#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdrev/activity.hpp"
#include "cdrev/cli.hpp"
#include "cdrev/inference.hpp"
#include "cdrev/ingest.hpp"
#include "cdrev/social.hpp"
#include "cdrev/synth.hpp"

namespace cdrev::cli {

namespace fs = std::filesystem;

namespace {

/// Failure that maps to a specific exit code.
struct CommandError : std::runtime_error {
  CommandError(ExitCode code, const std::string& msg) : std::runtime_error(msg), code(code) {}
  ExitCode code;
};

/// What a command was asked to do; written next to its outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::string output_dir;
  std::map<std::string, std::string> parameters;
  std::vector<std::string> outputs;

  void check_inputs() const {
    for (const auto& p : inputs) {
      if (!fs::exists(p)) throw CommandError(kFailure, "input does not exist: " + p);
    }
  }
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Writes through a temp file and renames into place; the final file either
// holds the complete content or does not exist.
template <typename Fn>
void write_atomically(RunManifest& manifest, const std::string& name, Fn&& fill) {
  const fs::path target = fs::path(manifest.output_dir) / name;
  const fs::path tmp = fs::path(target.string() + ".tmp");
  std::uintmax_t written = 0;
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CommandError(kFailure, "cannot open " + tmp.string() + " for writing");
    fill(f);
    f.flush();
    written = static_cast<std::uintmax_t>(f.tellp());
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw CommandError(kFailure, "write failed for " + target.string());
    }
  }
  fs::rename(tmp, target);
  if (!fs::exists(target) || fs::file_size(target) != written) {
    throw CommandError(kFailure, "validation failed for " + target.string());
  }
  manifest.outputs.push_back(name);
}

void write_manifest(RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["inputs"] = manifest.inputs;
  j["parameters"] = manifest.parameters;
  j["outputs"] = manifest.outputs;
  write_atomically(manifest, "manifest.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CommandError(kFailure, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Window {
  int start = 18;
  int end = 22;
};

Window parse_window(const std::string& text) {
  const auto colon = text.find(':');
  auto bad = [&] { return CommandError(kUsage, "--window must be HH:HH with start < end <= 24, got '" + text + "'"); };
  if (colon == std::string::npos) throw bad();
  Window w;
  const auto a = text.substr(0, colon);
  const auto b = text.substr(colon + 1);
  const auto ra = std::from_chars(a.data(), a.data() + a.size(), w.start);
  const auto rb = std::from_chars(b.data(), b.data() + b.size(), w.end);
  if (a.empty() || b.empty() || ra.ec != std::errc{} || rb.ec != std::errc{} ||
      ra.ptr != a.data() + a.size() || rb.ptr != b.data() + b.size()) {
    throw bad();
  }
  if (!(0 <= w.start && w.start < w.end && w.end <= kHoursPerDay)) throw bad();
  return w;
}

struct LoadedData {
  Corpus corpus;
  UserSet clients;
  std::optional<DatasetCalendar> calendar;
};

// Parses the CDR (and roster), derives the calendar and drops records that
// fall in a truncated partial trailing week.
LoadedData load_inputs(const std::string& cdr_path, const std::string& roster_path,
                       const std::string& utc_offset, const std::string& epoch_start,
                       std::ostream& err) {
  LoadedData data;
  {
    std::ifstream in(cdr_path, std::ios::binary);
    if (!in) throw CommandError(kFailure, "cannot read " + cdr_path);
    auto parsed = parse_cdr(in);
    const auto& report = parsed.report;
    if (report.rejected > 0) {
      err << cdr_path << ": rejected " << report.rejected << " line(s)\n";
      for (const auto& e : report.first_errors) {
        err << "  line " << e.line << ": " << e.reason << '\n';
      }
    }
    data.corpus = std::move(parsed.corpus);
  }
  if (!roster_path.empty()) {
    std::ifstream in(roster_path, std::ios::binary);
    if (!in) throw CommandError(kFailure, "cannot read " + roster_path);
    data.clients = resolve_clients(data.corpus.users, load_client_set(in));
  }

  int offset = 0;
  std::optional<std::chrono::sys_days> start;
  try {
    offset = parse_utc_offset(utc_offset);
    if (!epoch_start.empty()) start = parse_iso_date(epoch_start);
  } catch (const std::invalid_argument& e) {
    throw CommandError(kUsage, e.what());
  }
  auto& records = data.corpus.records;
  if (records.empty()) {
    return data;
  }
  data.calendar = calendar_from_records(records, offset, start);
  const auto before = records.size();
  std::erase_if(records, [&](const CallRecord& r) { return !data.calendar->contains(r.timestamp); });
  if (records.size() != before) {
    err << "note: " << (before - records.size())
        << " record(s) outside the whole-week calendar were dropped\n";
  }
  return data;
}

EventWindow resolve_window(const LoadedData& data, const std::string& antenna,
                           const std::string& date, const Window& w) {
  const auto id = data.corpus.antennas.find(antenna);
  if (!id) throw CommandError(kFailure, "unknown antenna '" + antenna + "'");
  if (!data.calendar) throw CommandError(kFailure, "empty corpus");
  std::chrono::sys_days day;
  try {
    day = parse_iso_date(date);
  } catch (const std::invalid_argument& e) {
    throw CommandError(kUsage, e.what());
  }
  const auto idx = data.calendar->day_of(day);
  if (!idx) throw CommandError(kFailure, "date " + date + " lies outside the dataset calendar");
  EventWindow window{*id, *idx, w.start, w.end};
  return window;
}

void write_index_series(std::ostream& o, const EventIndexSeries& series, AntennaId antenna) {
  o << "week,dow,hour,E\n";
  for (int i = 0; i < series.n_weeks(); ++i) {
    for (int j = 0; j < kDaysPerWeek; ++j) {
      for (int k = 0; k < kHoursPerDay; ++k) {
        const auto e = series.at(antenna, {i, j, k});
        o << i << ',' << j << ',' << k << ',' << (e ? format_double(*e) : "nan") << '\n';
      }
    }
  }
}

void write_events(std::ostream& o, const DetectionResult& result, const Corpus& corpus,
                  std::optional<AntennaId> only = {}) {
  o << "antenna,week,dow,start_hour,end_hour,peak_index\n";
  for (const auto& e : result.events) {
    if (only && e.antenna != *only) continue;
    o << corpus.antennas.name(e.antenna) << ',' << e.date.week << ',' << e.date.dow << ','
      << e.start_hour << ',' << e.end_hour << ',' << format_double(e.peak_index) << '\n';
  }
}

void write_summary(std::ostream& o, const SubgraphSummary& s) {
  o << "attenders,social_attenders,singlets,max_component\n"
    << s.attenders << ',' << s.social_attenders << ',' << s.singlets << ',' << s.max_component << '\n';
}

void prepare_output_dir(const RunManifest& manifest) {
  std::error_code ec;
  fs::create_directories(manifest.output_dir, ec);
  if (ec) throw CommandError(kFailure, "cannot create output directory " + manifest.output_dir);
}

// ---- commands ---------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

void cmd_generate(const GenerateArgs& args, std::ostream& out) {
  RunManifest manifest{"generate", {args.config}, args.out, {}, {}};
  manifest.check_inputs();
  SynthConfig cfg;
  try {
    cfg = parse_synth_config(read_file(args.config));
    if (args.seed) cfg.seed = *args.seed;
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw CommandError(kFailure, e.what());
  }
  manifest.parameters["seed"] = std::to_string(cfg.seed);

  const auto result = generate(cfg);
  prepare_output_dir(manifest);
  write_atomically(manifest, "cdr.csv", [&](std::ostream& o) { write_cdr(o, result.corpus); });
  write_atomically(manifest, "clients.txt",
                   [&](std::ostream& o) { write_client_roster(o, result.corpus.users, result.clients); });
  write_atomically(manifest, "truth.csv", [&](std::ostream& o) { write_truth(o, result); });
  write_atomically(manifest, "groups.csv", [&](std::ostream& o) { write_groups(o, result); });
  write_manifest(manifest);
  out << "records=" << result.corpus.records.size() << " users=" << cfg.n_users
      << " clients=" << result.clients.size() << " antennas=" << cfg.n_antennas
      << " weeks=" << cfg.n_weeks << " events=" << result.truth.size() << '\n';
}

struct CommonArgs {
  std::string cdr;
  std::string roster;
  std::string out = ".";
  std::string utc_offset = "-03:00";
  std::string epoch_start;
};

struct DetectArgs {
  CommonArgs common;
  double percentile = 0.99;
  std::string dump_index;
};

RunManifest base_manifest(const char* command, const CommonArgs& c) {
  RunManifest m{command, {c.cdr}, c.out, {}, {}};
  if (!c.roster.empty()) m.inputs.push_back(c.roster);
  m.parameters["utc_offset"] = c.utc_offset;
  if (!c.epoch_start.empty()) m.parameters["epoch_start"] = c.epoch_start;
  return m;
}

struct Detection {
  LoadedData data;
  std::optional<EventIndexSeries> series;
  DetectionResult result;
};

Detection run_detection(const CommonArgs& c, double percentile, std::ostream& err) {
  if (!(percentile > 0.0 && percentile <= 1.0)) {
    throw CommandError(kUsage, "--percentile must lie in (0, 1]");
  }
  Detection d{load_inputs(c.cdr, c.roster, c.utc_offset, c.epoch_start, err), {}, {}};
  if (!d.data.calendar) throw CommandError(kFailure, "no records to analyse");
  const auto cube = aggregate(d.data.corpus.records, *d.data.calendar, d.data.corpus.antennas.size());
  d.series = event_index(cube);
  d.result = detect_events(*d.series, percentile);
  for (AntennaId a : d.result.skipped) {
    err << "skipped silent antenna " << d.data.corpus.antennas.name(a) << '\n';
  }
  return d;
}

void cmd_detect(const DetectArgs& args, std::ostream& out, std::ostream& err) {
  auto manifest = base_manifest("detect", args.common);
  manifest.parameters["percentile"] = format_double(args.percentile);
  manifest.check_inputs();
  const auto d = run_detection(args.common, args.percentile, err);

  std::optional<AntennaId> dump;
  if (!args.dump_index.empty()) {
    dump = d.data.corpus.antennas.find(args.dump_index);
    if (!dump) throw CommandError(kFailure, "unknown antenna '" + args.dump_index + "'");
    manifest.parameters["dump_index"] = args.dump_index;
  }
  prepare_output_dir(manifest);
  write_atomically(manifest, "events.csv", [&](std::ostream& o) { write_events(o, d.result, d.data.corpus); });
  if (dump) {
    write_atomically(manifest, "index_" + args.dump_index + ".csv",
                     [&](std::ostream& o) { write_index_series(o, *d.series, *dump); });
  }
  write_manifest(manifest);
  out << "antennas=" << d.data.corpus.antennas.size() << " weeks=" << d.data.calendar->n_weeks()
      << " events=" << d.result.events.size() << " skipped=" << d.result.skipped.size() << '\n';
}

struct ReportArgs {
  CommonArgs common;
  double percentile = 0.99;
  std::string antenna;
};

void cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  auto manifest = base_manifest("report", args.common);
  manifest.parameters["percentile"] = format_double(args.percentile);
  manifest.parameters["antenna"] = args.antenna;
  manifest.check_inputs();
  const auto d = run_detection(args.common, args.percentile, err);
  const auto id = d.data.corpus.antennas.find(args.antenna);
  if (!id) throw CommandError(kFailure, "unknown antenna '" + args.antenna + "'");

  prepare_output_dir(manifest);
  write_atomically(manifest, "index_" + args.antenna + ".csv",
                   [&](std::ostream& o) { write_index_series(o, *d.series, *id); });
  write_atomically(manifest, "events_" + args.antenna + ".csv",
                   [&](std::ostream& o) { write_events(o, d.result, d.data.corpus, id); });
  write_manifest(manifest);
  const auto& threshold = d.result.thresholds[index_of(*id)];
  out << "antenna=" << args.antenna << " threshold=" << (threshold ? format_double(*threshold) : "undefined")
      << '\n';
}

struct WindowArgs {
  CommonArgs common;
  std::string antenna;
  std::string date;
  std::string window = "18:22";
  std::uint64_t min_denominator = 5;
  bool clients_only = false;
};

struct WindowAnalysis {
  LoadedData data;
  EventWindow window;
  ContactGraph graph;
  InducedSubgraph sub;
};

WindowAnalysis analyse_window(const WindowArgs& args, std::ostream& err) {
  const auto w = parse_window(args.window);
  WindowAnalysis a{load_inputs(args.common.cdr, args.common.roster, args.common.utc_offset,
                               args.common.epoch_start, err),
                   {}, {}, {}};
  a.window = resolve_window(a.data, args.antenna, args.date, w);
  a.graph = build_contact_graph(a.data.corpus.records, a.data.clients);
  const auto present = attenders(a.data.corpus.records, a.window, a.data.clients, *a.data.calendar);
  if (present.empty()) {
    throw CommandError(kFailure, "no attenders at " + args.antenna + " on " + args.date + " " + args.window);
  }
  a.sub = induce_subgraph(a.graph, present);
  return a;
}

RunManifest window_manifest(const char* command, const WindowArgs& args) {
  auto m = base_manifest(command, args.common);
  m.parameters["antenna"] = args.antenna;
  m.parameters["date"] = args.date;
  m.parameters["window"] = args.window;
  return m;
}

void cmd_subgraph(const WindowArgs& args, std::ostream& out, std::ostream& err) {
  auto manifest = window_manifest("subgraph", args);
  manifest.check_inputs();
  const auto a = analyse_window(args, err);
  const auto hist = component_size_histogram(a.sub);
  const auto summary = summarize(a.sub);
  const auto& users = a.data.corpus.users;

  prepare_output_dir(manifest);
  write_atomically(manifest, "subgraph_edges.csv", [&](std::ostream& o) {
    o << "u,v\n";
    for (auto [u, v] : a.sub.edges) o << users.name(u) << ',' << users.name(v) << '\n';
  });
  write_atomically(manifest, "subgraph_summary.csv", [&](std::ostream& o) { write_summary(o, summary); });
  write_atomically(manifest, "components.csv", [&](std::ostream& o) {
    o << "size,count\n";
    if (hist.singlets > 0) o << "1," << hist.singlets << '\n';
    for (const auto& [size, count] : hist.sizes) o << size << ',' << count << '\n';
  });
  write_manifest(manifest);
  out << "attenders=" << summary.attenders << " social_attenders=" << summary.social_attenders
      << " singlets=" << summary.singlets << " max_component=" << summary.max_component << '\n';
}

void cmd_infer(const WindowArgs& args, std::ostream& out, std::ostream& err) {
  auto manifest = window_manifest("infer", args);
  manifest.parameters["min_denominator"] = std::to_string(args.min_denominator);
  manifest.parameters["clients_only"] = args.clients_only ? "true" : "false";
  manifest.check_inputs();
  const auto a = analyse_window(args, err);
  const InferenceOptions options{args.clients_only};
  const auto table = attendance_probability(a.graph, a.sub.attenders, options);
  const auto cumulative = cumulative_attendance_probability(a.graph, a.sub.attenders, options);
  const auto points = fit_points(table, args.min_denominator);
  std::optional<LinearFit> fit;
  try {
    fit = linear_fit(points);
  } catch (const std::invalid_argument&) {
    err << "warning: fewer than two k values with denominator >= " << args.min_denominator
        << "; fit not estimable\n";
  }

  prepare_output_dir(manifest);
  write_atomically(manifest, "subgraph_summary.csv", [&](std::ostream& o) { write_summary(o, summarize(a.sub)); });
  write_atomically(manifest, "attendance.csv", [&](std::ostream& o) {
    o << "k,numerator,denominator,p\n";
    for (const auto& [k, row] : table.rows) {
      o << k << ',' << row.numerator << ',' << row.denominator << ',' << format_double(row.p) << '\n';
    }
  });
  write_atomically(manifest, "cumulative.csv", [&](std::ostream& o) {
    o << "K,p\n";
    for (const auto& [k, row] : cumulative) o << k << ',' << format_double(row.p) << '\n';
  });
  write_atomically(manifest, "fit.csv", [&](std::ostream& o) {
    o << "slope,intercept,r,n_points\n";
    if (fit) {
      o << format_double(fit->slope) << ',' << format_double(fit->intercept) << ',' << format_double(fit->r)
        << ',' << fit->n_points << '\n';
    } else {
      o << "nan,nan,nan," << points.size() << '\n';
    }
  });
  write_manifest(manifest);
  out << "attenders=" << a.sub.attenders.size() << " k_rows=" << table.rows.size();
  if (fit) out << " slope=" << format_double(fit->slope) << " r=" << format_double(fit->r);
  out << '\n';
}

void add_common(CLI::App* cmd, CommonArgs& c, bool roster_required) {
  cmd->add_option("--cdr", c.cdr, "CDR file")->required();
  auto* roster = cmd->add_option("--roster", c.roster, "client roster file");
  if (roster_required) roster->required();
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--utc-offset", c.utc_offset, "fixed local offset, ±HH:MM")->capture_default_str();
  cmd->add_option("--epoch-start", c.epoch_start, "local date of week 0 (YYYY-MM-DD); default: first record");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Large-event detection and social analysis over call-detail records", "cdrev"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "write a synthetic CDR corpus with planted events");
  generate_cmd->add_option("--config", gen.config, "synthetic corpus config (JSON)")->required();
  generate_cmd->add_option("--out", gen.out, "output directory")->capture_default_str();
  generate_cmd->add_option("--seed", gen.seed, "override the config seed");

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand("detect", "flag large events from antenna activity");
  add_common(detect_cmd, det.common, false);
  detect_cmd->add_option("--percentile", det.percentile, "detection percentile p")->capture_default_str();
  detect_cmd->add_option("--dump-index", det.dump_index, "also write the index series of this antenna");

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "write the event index series of one antenna");
  add_common(report_cmd, rep.common, false);
  report_cmd->add_option("--antenna", rep.antenna, "antenna id")->required();
  report_cmd->add_option("--percentile", rep.percentile, "detection percentile p")->capture_default_str();

  WindowArgs sg;
  auto* subgraph_cmd = app.add_subcommand("subgraph", "induced contact subgraph of an event window");
  add_common(subgraph_cmd, sg.common, true);
  subgraph_cmd->add_option("--antenna", sg.antenna, "event antenna")->required();
  subgraph_cmd->add_option("--date", sg.date, "event date, YYYY-MM-DD")->required();
  subgraph_cmd->add_option("--window", sg.window, "local hours HH:HH")->capture_default_str();

  WindowArgs inf;
  auto* infer_cmd = app.add_subcommand("infer", "attendance probability given attending contacts");
  add_common(infer_cmd, inf.common, true);
  infer_cmd->add_option("--antenna", inf.antenna, "event antenna")->required();
  infer_cmd->add_option("--date", inf.date, "event date, YYYY-MM-DD")->required();
  infer_cmd->add_option("--window", inf.window, "local hours HH:HH")->capture_default_str();
  infer_cmd->add_option("--min-denominator", inf.min_denominator, "drop k rows below this denominator from the fit")
      ->capture_default_str();
  infer_cmd->add_flag("--clients-only", inf.clients_only, "restrict the denominator population to clients");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*generate_cmd) cmd_generate(gen, out);
    if (*detect_cmd) cmd_detect(det, out, err);
    if (*report_cmd) cmd_report(rep, out, err);
    if (*subgraph_cmd) cmd_subgraph(sg, out, err);
    if (*infer_cmd) cmd_infer(inf, out, err);
  } catch (const CommandError& e) {
    err << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace cdrev::cli
