#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "gen.hpp"
#include "letterkit/facts.hpp"
#include "letterkit/markup.hpp"
#include "letterkit/ner.hpp"

using namespace letterkit;

namespace {

std::string big_document(std::size_t min_bytes) {
    std::mt19937 rng(42);
    std::string doc;
    while (doc.size() < min_bytes) doc += testsupport::random_document(rng);
    return doc;
}

void bm_parse(benchmark::State& state) {
    const auto doc = big_document(static_cast<std::size_t>(state.range(0)));
    const auto registry = markup::default_dialect();
    for (auto _ : state) {
        auto stream = markup::parse_document(doc, registry);
        benchmark::DoNotOptimize(stream.items.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * doc.size()));
}

void bm_roundtrip(benchmark::State& state) {
    const auto doc = big_document(static_cast<std::size_t>(state.range(0)));
    const auto registry = markup::default_dialect();
    for (auto _ : state) {
        auto out = markup::serialize_markup(markup::parse_document(doc, registry));
        benchmark::DoNotOptimize(out.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * doc.size()));
}

void bm_build_caches(benchmark::State& state) {
    std::mt19937 rng(7);
    const auto base =
        testsupport::synthetic_persons(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto caches = facts::build_caches(base.triples, {});
        benchmark::DoNotOptimize(caches.persons.data());
    }
}

void bm_name_lookup(benchmark::State& state) {
    std::mt19937 rng(7);
    const auto base =
        testsupport::synthetic_persons(rng, static_cast<std::size_t>(state.range(0)));
    const auto caches = facts::build_caches(base.triples, {});
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& name = base.last_names[i++ % base.last_names.size()];
        auto hits = facts::persons_by_name(caches, name);
        benchmark::DoNotOptimize(hits.data());
    }
}

void bm_detect_persons(benchmark::State& state) {
    std::mt19937 rng(7);
    const auto base = testsupport::synthetic_persons(rng, 5000);
    const auto caches = facts::build_caches(base.triples, {});
    const auto toks = testsupport::planted_corpus(
        rng, base, static_cast<std::size_t>(state.range(0)), "bench");
    ner::NerConfig config;
    config.window_radius = 10;
    config.creation_year = 1800;
    for (auto _ : state) {
        auto ids = ner::detect_persons(toks, caches, config, nullptr);
        benchmark::DoNotOptimize(ids.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * toks.size()));
}

BENCHMARK(bm_parse)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_roundtrip)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_build_caches)->Arg(1000)->Arg(10000);
BENCHMARK(bm_name_lookup)->Arg(10000)->Arg(100000);
BENCHMARK(bm_detect_persons)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
