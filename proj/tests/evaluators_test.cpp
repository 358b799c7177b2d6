#include "strata/evaluators.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace strata;

TEST(Roofline, HandCases) {
    EXPECT_EQ(roofline_compute(256, 64, 0, 0), 0);
    // compute bound: max(1024/256, 64/64) = 4
    EXPECT_EQ(roofline_compute(256, 64, 1024, 64), 4);
    // memory bound: max(64/256, 1024/64) = 16
    EXPECT_EQ(roofline_compute(256, 64, 64, 1024), 16);
    EXPECT_THROW(roofline_compute(0, 64, 10, 0), EvalError);
    EXPECT_THROW(roofline_compute(4, 0, 10, 16), EvalError);
}

TEST(Roofline, MatchesAnalyticMaxRandomized) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> d(1, 1 << 20);
    for (int trial = 0; trial < 2000; ++trial) {
        std::int64_t thr = d(rng) % 512 + 1, bw = d(rng) % 512 + 1;
        std::int64_t ops = d(rng), bytes = d(rng);
        // independently coded reference: ceil(max(a, b)) over exact rationals
        Rat a = Rat(ops) / thr, b = Rat(bytes) / bw;
        Rat mx = a > b ? a : b;
        BigInt expect = numerator(mx) / denominator(mx);
        if (numerator(mx) % denominator(mx) != 0) expect += 1;
        EXPECT_EQ(BigInt(roofline_compute(thr, bw, ops, bytes)), expect);
    }
}

TEST(Roofline, Monotonicity) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> d(1, 10000);
    for (int trial = 0; trial < 500; ++trial) {
        std::int64_t thr = d(rng), bw = d(rng), ops = d(rng), bytes = d(rng);
        EXPECT_LE(roofline_compute(thr, bw, ops, bytes), roofline_compute(thr, bw, ops + 13, bytes + 7));
        EXPECT_GE(roofline_compute(thr, bw, ops, bytes), roofline_compute(thr + 5, bw + 5, ops, bytes));
    }
}

TEST(LinkTransfer, HandCases) {
    TopologySpec spec{TopologyPattern::mesh2d, 1, 2, RoutingPolicy::dimension_order};
    // zero volume: latency only
    EXPECT_EQ(link_transfer(spec, 3, 0, Rat(1)), 6);
    // contended first phase of the shared-link walk: 50 bytes at half bandwidth
    TopologySpec flat{TopologyPattern::bus, 1, 0, RoutingPolicy::dimension_order};
    EXPECT_EQ(link_transfer(flat, 1, 50, Rat(1, 2)), 100);
    // 3 hops, latency 2, 128 bytes at 64 B/cycle: 6 + 2
    TopologySpec m{TopologyPattern::mesh2d, 64, 2, RoutingPolicy::dimension_order};
    EXPECT_EQ(link_transfer(m, 3, 128, Rat(64)), 8);
    EXPECT_THROW(link_transfer(m, 1, 128, Rat(0)), EvalError);
}

TEST(AllReduce, ClosedFormCases) {
    // S = 0: only latency terms, T = nL
    EXPECT_EQ(all_reduce_latency(5, 3, 0, 7), Rat(15));
    // n = 1: ring terms vanish, T = L + 2S/B
    EXPECT_EQ(all_reduce_latency(1, 3, 64, 8), Rat(3) + Rat(128, 8));
    // frozen regression instance
    EXPECT_EQ(all_reduce_latency(4, 1, 4096, 1024), Rat(15));
    EXPECT_THROW(all_reduce_latency(0, 1, 1, 1), EvalError);
}

TEST(AllReduce, MatchesFormulaRandomized) {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<std::int64_t> d(1, 100000);
    for (int trial = 0; trial < 1000; ++trial) {
        std::int64_t n = d(rng) % 64 + 1;
        Rat L(d(rng) % 1000, d(rng) % 7 + 1);
        Rat S(d(rng), 1);
        Rat B(d(rng) % 4096 + 1, d(rng) % 3 + 1);
        Rat expect = Rat(n - 1) * L + Rat(n - 1) * S / (Rat(n) * B) + L + Rat(2) * S / B;
        EXPECT_EQ(all_reduce_latency(n, L, S, B), expect);
    }
}

TEST(AllReduce, Monotonicity) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::int64_t> d(1, 10000);
    for (int trial = 0; trial < 500; ++trial) {
        std::int64_t n = d(rng) % 16 + 1;
        Rat L(d(rng) % 100), S(d(rng)), B(d(rng) % 512 + 1);
        EXPECT_LE(all_reduce_latency(n, L, S, B), all_reduce_latency(n, L, S + 97, B));
        EXPECT_GE(all_reduce_latency(n, L, S, B), all_reduce_latency(n, L, S, B + 13));
    }
}

TEST(StorageFootprint, HandCases) {
    // single producer at 5, single access at 9
    auto f = storage_footprint(128, Rat(5), Rat(9));
    EXPECT_EQ(f.start, Rat(5));
    EXPECT_EQ(f.end, Rat(9));
    EXPECT_EQ(f.duration(), Rat(4));
    // producers {3,7}, accesses {10,6}: survival spans [3,10]
    auto g = storage_footprint(128, std::min(Rat(3), Rat(7)), std::max(Rat(10), Rat(6)));
    EXPECT_EQ(g.start, Rat(3));
    EXPECT_EQ(g.end, Rat(10));
    EXPECT_THROW(storage_footprint(1, Rat(5), Rat(4)), EvalError);
}

TEST(Registry, BuiltinsAndBindings) {
    const auto& reg = EvaluatorRegistry::builtin();
    EXPECT_EQ(reg.names(), default_evaluator_names());
    SpacePoint p;
    p.id = "c";
    p.kind = PointKind::compute;
    p.params["throughput"] = 256;
    p.params["mem_bandwidth"] = 64;
    Task t;
    t.id = "k";
    t.kind = TaskKind::compute;
    t.ops = 1024;
    t.bytes_in = 64;
    EXPECT_EQ(reg.get("roofline").duration(p, t), Rat(4));
    EXPECT_THROW(reg.get("none").duration(p, t), EvalError);
    EXPECT_THROW(reg.get("missing"), EvalError);
}

TEST(Registry, AllReduceEvaluator) {
    SpacePoint p;
    p.id = "nvl";
    p.kind = PointKind::communication;
    p.topology = TopologySpec{TopologyPattern::fully_connected, 1024, 1, RoutingPolicy::dimension_order};
    p.params["group_size"] = 4;
    Task t;
    t.id = "ar";
    t.kind = TaskKind::communication;
    t.volume = 4096;
    EXPECT_EQ(EvaluatorRegistry::builtin().get("allreduce").duration(p, t), Rat(15));
}
