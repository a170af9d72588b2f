// Serial reference kernels vs. their OpenMP counterparts on a synthetic corpus.

#include <benchmark/benchmark.h>

#include "cdrev/activity.hpp"
#include "cdrev/inference.hpp"
#include "cdrev/social.hpp"
#include "cdrev/synth.hpp"

namespace {

using namespace cdrev;

const SynthOutput& corpus() {
  static const SynthOutput out = [] {
    SynthConfig cfg;
    cfg.seed = 1;
    cfg.n_users = 50000;
    cfg.n_antennas = 20;
    cfg.n_weeks = 13;
    cfg.baseline_profile = diurnal_profile(20.0, 60.0);
    cfg.events = {PlantedEvent{3, {9, 2}, 18, 22, 8.0, 1500, 0.5}};
    return generate(cfg);
  }();
  return out;
}

const SynthConfig& config() {
  static const SynthConfig cfg = [] {
    SynthConfig c;
    c.n_weeks = 13;
    return c;
  }();
  return cfg;
}

void BM_AggregateParallel(benchmark::State& state) {
  const auto& c = corpus();
  for (auto _ : state) {
    benchmark::DoNotOptimize(aggregate(c.corpus.records, config().calendar(), c.corpus.antennas.size()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.corpus.records.size()));
}

void BM_AggregateSerial(benchmark::State& state) {
  const auto& c = corpus();
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::aggregate(c.corpus.records, config().calendar(), c.corpus.antennas.size()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.corpus.records.size()));
}

void BM_IndexAndDetectParallel(benchmark::State& state) {
  const auto& c = corpus();
  const auto cube = aggregate(c.corpus.records, config().calendar(), c.corpus.antennas.size());
  for (auto _ : state) benchmark::DoNotOptimize(detect_events(event_index(cube)));
}

void BM_IndexAndDetectSerial(benchmark::State& state) {
  const auto& c = corpus();
  const auto cube = aggregate(c.corpus.records, config().calendar(), c.corpus.antennas.size());
  for (auto _ : state) benchmark::DoNotOptimize(serial::detect_events(serial::event_index(cube)));
}

struct GraphFixture {
  ContactGraph graph;
  UserSet attending;
};

const GraphFixture& graph_fixture() {
  static const GraphFixture f = [] {
    const auto& c = corpus();
    return GraphFixture{build_contact_graph(c.corpus.records, c.clients), c.attendees.front()};
  }();
  return f;
}

void BM_ContactCountsParallel(benchmark::State& state) {
  const auto& f = graph_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(contact_counts(f.graph, f.attending));
}

void BM_ContactCountsSerial(benchmark::State& state) {
  const auto& f = graph_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(serial::contact_counts(f.graph, f.attending));
}

BENCHMARK(BM_AggregateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndexAndDetectParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndexAndDetectSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ContactCountsParallel)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ContactCountsSerial)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
