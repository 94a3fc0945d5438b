// Microbenchmarks for the hot path: the follow kernel (sharded and not), its
// VJPs, and a whole-sample forward/backward. Run with --benchmark_filter=...
// to narrow.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dkgqa/model.hpp"
#include "dkgqa/reified.hpp"
#include "dkgqa/synthetic.hpp"
#include "dkgqa/tape.hpp"
#include "dkgqa/triple_store.hpp"

using namespace dkgqa;

namespace {

struct Workload {
    ReifiedMatrices m;
    std::vector<double> x;
    std::vector<double> r;
};

Workload make_workload(std::size_t n_triples) {
    const std::size_t n_e = 2000, n_r = 32;
    std::mt19937_64 rng(n_triples);
    TripleStore store;
    for (std::size_t i = 0; i < n_e; ++i) store.intern_entity("e" + std::to_string(i));
    for (std::size_t i = 0; i < n_r; ++i) store.intern_relation("r" + std::to_string(i));
    std::uniform_int_distribution<std::uint32_t> pe(0, n_e - 1);
    std::uniform_int_distribution<std::uint32_t> pr(0, n_r - 1);
    while (store.n_triples() < n_triples) store.add_triple(pe(rng), pr(rng), pe(rng));

    Workload w;
    w.m = reify(store);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    w.x.resize(n_e);
    w.r.resize(n_r);
    for (auto& v : w.x) v = unit(rng);
    for (auto& v : w.r) v = unit(rng);
    return w;
}

const Workload& workload(std::size_t n_triples) {
    static const Workload small = make_workload(10000);
    static const Workload large = make_workload(100000);
    return n_triples == 10000 ? small : large;
}

void bm_follow(benchmark::State& state) {
    const Workload& w = workload(static_cast<std::size_t>(state.range(0)));
    std::vector<double> out(w.m.n_entities);
    for (auto _ : state) {
        follow(w.m, w.x, w.r, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(w.m.n_triples()));
}
BENCHMARK(bm_follow)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void bm_follow_sharded(benchmark::State& state) {
    const Workload& w = workload(100000);
    const ShardedMatrices sm = shard(w.m, static_cast<std::size_t>(state.range(0)));
    std::vector<double> out(w.m.n_entities);
    for (auto _ : state) {
        follow(sm, w.x, w.r, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(w.m.n_triples()));
}
BENCHMARK(bm_follow_sharded)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

void bm_follow_vjp(benchmark::State& state) {
    const Workload& w = workload(100000);
    std::vector<double> grad(w.m.n_entities, 1.0);
    std::vector<double> dx(w.m.n_entities), dr(w.m.n_relations);
    for (auto _ : state) {
        std::fill(dx.begin(), dx.end(), 0.0);
        std::fill(dr.begin(), dr.end(), 0.0);
        follow_vjp_x(w.m, w.r, grad, dx);
        follow_vjp_r(w.m, w.x, grad, dr);
        benchmark::DoNotOptimize(dx.data());
        benchmark::DoNotOptimize(dr.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(w.m.n_triples()));
}
BENCHMARK(bm_follow_vjp)->Unit(benchmark::kMicrosecond);

struct SampleWorkload {
    TripleStore store;
    ShardedMatrices kg;
    TokenVocab vocab;
    ModelParams params;
    QuestionSample sample;
    std::vector<double> targets;
};

const SampleWorkload& sample_workload() {
    static const SampleWorkload w = [] {
        SyntheticData data = generate_synthetic(GeneratorSpec{}, 1);
        SampleWorkload s;
        s.store = add_inverse_relations(data.kg);
        s.kg = shard(reify(s.store), 1);
        s.vocab = build_vocab(data.train);
        for (const auto& q : data.train) {
            if (q.entities.size() == 2) {
                s.sample = q;
                break;
            }
        }
        ModelConfig mc;
        mc.variant = kVariantIntersect;
        mc.dim = 32;
        mc.max_hops = 2;
        mc.n_entities = s.store.n_entities();
        mc.n_relations = s.store.n_relations();
        mc.vocab_size = s.vocab.size();
        s.params = init_params(mc, 3);
        s.targets = answer_targets(s.store.n_entities(), s.sample);
        return s;
    }();
    return w;
}

void bm_forward(benchmark::State& state) {
    const SampleWorkload& w = sample_workload();
    for (auto _ : state) {
        GradTape tape;
        const ForwardTrace trace =
            forward_sample(tape, w.params, nullptr, w.kg, w.vocab, w.sample);
        benchmark::DoNotOptimize(tape.value(trace.y).data());
    }
}
BENCHMARK(bm_forward)->Unit(benchmark::kMicrosecond);

void bm_forward_backward(benchmark::State& state) {
    const SampleWorkload& w = sample_workload();
    ModelParams grads = make_params(w.params.config);
    for (auto _ : state) {
        GradTape tape;
        const ForwardTrace trace =
            forward_sample(tape, w.params, &grads, w.kg, w.vocab, w.sample);
        tape.backward(tape.multilabel_loss(w.targets, trace.y));
        benchmark::DoNotOptimize(grads.token_embeddings.data.data());
    }
}
BENCHMARK(bm_forward_backward)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
