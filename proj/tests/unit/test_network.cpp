#include "chiralsync/errors.hpp"
#include "chiralsync/network.hpp"
#include "chiralsync/runner.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace chiralsync;

namespace {

bool has_violation(const ValidationReport& r, const std::string& text) {
    return std::find(r.violations.begin(), r.violations.end(), text) != r.violations.end();
}

}  // namespace

TEST(Validate, Fig2DimerIsValid) {
    const auto net = NetworkSpec::from_edges(2, {{0, 1}}, {1.0, 1.9}, {0.045, 0.0}, 0.05);
    EXPECT_TRUE(validate_network(net).ok());
}

TEST(Validate, BidirectionalPair) {
    auto net = NetworkSpec::from_edges(3, {}, {1, 2, 3}, {0, 0, 0}, 0.05);
    net.set_edge(1, 2);
    net.set_edge(2, 1);
    const auto r = validate_network(net);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_violation(r, "bidirectional pair (1,2)"));
}

TEST(Validate, SelfLoop) {
    auto net = NetworkSpec::from_edges(3, {}, {1, 2, 3}, {0, 0, 0}, 0.05);
    net.set_edge(1, 1);
    EXPECT_TRUE(has_violation(validate_network(net), "self-loop at 1"));
    EXPECT_THROW(require_valid(net), ValidationError);
}

TEST(Validate, ReportsEveryViolation) {
    auto net = NetworkSpec::from_edges(3, {}, {1, -2, 3}, {0, -1, 0}, 0.05);
    net.set_edge(0, 0);
    net.set_edge(0, 1);
    net.set_edge(1, 0);
    EXPECT_GE(validate_network(net).violations.size(), 4u);
}

TEST(Validate, MarginalDimerStillValid) {
    const auto net = NetworkSpec::from_edges(2, {{0, 1}}, {1.0, 1.9}, {0.05, 0.0}, 0.05);
    EXPECT_TRUE(validate_network(net).ok());
}

TEST(Degree, TrimerOutCentre) {
    MotifParams p{{1.5, 2.0, 2.5}, {0.045}, 0.05};
    const auto d = degree_profile(motif(Motif::trimer_out, p));
    EXPECT_EQ(d.out_degree[1], 2u);
    EXPECT_EQ(d.in_degree[1], 0u);
    EXPECT_DOUBLE_EQ(d.gamma_total[1], 0.1);
}

TEST(Degree, IsolatedNode) {
    const auto d = degree_profile(NetworkSpec::from_edges(1, {}, {1.0}, {0.0}, 0.05));
    EXPECT_EQ(d.out_degree[0], 0u);
    EXPECT_EQ(d.in_degree[0], 0u);
    EXPECT_EQ(d.gamma_total[0], 0.0);
}

TEST(Degree, ChainMiddle) {
    const auto d = degree_profile(recipes::fig5_chain());
    EXPECT_EQ(d.out_degree[2], 1u);
    EXPECT_EQ(d.in_degree[2], 1u);
    EXPECT_DOUBLE_EQ(d.gamma_total[2], 0.1);
}

TEST(Motifs, Chain) {
    const auto net = recipes::fig5_chain();
    ASSERT_EQ(net.n_nodes, 5u);
    EXPECT_EQ(net.edge_count(), 4u);
    for (std::size_t i = 0; i + 1 < 5; ++i) EXPECT_TRUE(net.edge(i, i + 1));
    EXPECT_TRUE(validate_network(net).ok());
}

TEST(Motifs, Branching) {
    const auto net = recipes::fig6_branching();
    ASSERT_EQ(net.n_nodes, 7u);
    EXPECT_EQ(net.edge_count(), 6u);
    EXPECT_TRUE(net.edge(0, 1));
    EXPECT_TRUE(net.edge(1, 2));
    EXPECT_TRUE(net.edge(2, 3));
    EXPECT_TRUE(net.edge(2, 4));
    EXPECT_TRUE(net.edge(3, 5));
    EXPECT_TRUE(net.edge(4, 6));
    EXPECT_DOUBLE_EQ(net.frequencies.front(), 1.2);
    EXPECT_DOUBLE_EQ(net.frequencies.back(), 2.2);
    const auto d = degree_profile(net);
    EXPECT_EQ(d.out_degree[5], 0u);
    EXPECT_EQ(d.out_degree[6], 0u);
}

TEST(Motifs, Names) {
    for (auto m : {Motif::dimer, Motif::trimer_out, Motif::trimer_in, Motif::trimer_through, Motif::nonloop_ring,
                   Motif::loop_ring, Motif::chain, Motif::branching})
        EXPECT_EQ(motif_from_name(motif_name(m)), m);
    EXPECT_THROW(motif_from_name("square"), ValidationError);
}

TEST(Motifs, LoopRingIsOriented) {
    MotifParams p{{1.5, 2.0, 2.5}, {0.045}, 0.05};
    const auto net = motif(Motif::loop_ring, p);
    EXPECT_TRUE(net.edge(0, 1) && net.edge(1, 2) && net.edge(2, 0));
    EXPECT_TRUE(validate_network(net).ok());
}

TEST(Random, Fig7Class) {
    const auto net = random_oriented_network(recipes::fig7_network(3));
    ASSERT_EQ(net.n_nodes, 15u);
    EXPECT_TRUE(validate_network(net).ok());
    for (std::size_t i = 0; i < 15; ++i) {
        EXPECT_GE(net.frequencies[i], 1.2);
        EXPECT_LE(net.frequencies[i], 4.0);
        for (std::size_t j = i + 1; j < 15; ++j) EXPECT_GT(std::abs(net.frequencies[i] - net.frequencies[j]), net.gamma);
    }
}

TEST(Random, SingleNode) {
    RandomNetworkParams p;
    p.n = 1;
    const auto net = random_oriented_network(p);
    EXPECT_EQ(net.n_nodes, 1u);
    EXPECT_EQ(net.edge_count(), 0u);
}

TEST(Random, Deterministic) {
    for (std::uint64_t seed : {0u, 7u, 123u})
        EXPECT_EQ(random_oriented_network(recipes::fig7_network(seed)),
                  random_oriented_network(recipes::fig7_network(seed)));
    EXPECT_NE(random_oriented_network(recipes::fig7_network(1)), random_oriented_network(recipes::fig7_network(2)));
}

TEST(Random, ImpossibleGapThrows) {
    RandomNetworkParams p;
    p.n = 15;
    p.eps_min = 1.0;
    p.eps_max = 1.1;
    EXPECT_THROW(random_oriented_network(p), ValidationError);
}

TEST(Random, AttemptBudgetThrows) {
    RandomNetworkParams p;
    p.n = 15;
    p.eps_min = 1.2;
    p.eps_max = 2.0;
    p.max_attempts = 10;
    EXPECT_THROW(random_oriented_network(p), NumericalError);
}

// Property: every generated network is oriented with a zero diagonal.
TEST(Random, AlwaysOriented) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RandomNetworkParams p;
        p.n = 10;
        p.edge_prob = 0.5;
        p.eps_max = 6.0;
        p.seed = seed;
        const auto net = random_oriented_network(p);
        for (std::size_t i = 0; i < net.n_nodes; ++i) {
            EXPECT_FALSE(net.edge(i, i));
            for (std::size_t j = 0; j < net.n_nodes; ++j) EXPECT_FALSE(net.edge(i, j) && net.edge(j, i));
        }
    }
}

TEST(Json, RoundTrip) {
    auto net = random_oriented_network(recipes::fig7_network(5));
    EXPECT_EQ(network_from_json(network_to_json(net)), net);
    const auto dimer = recipes::fig2_dimer();
    EXPECT_EQ(network_from_json(network_to_json(dimer)), dimer);
}

TEST(Json, RejectsMalformed) {
    EXPECT_THROW(network_from_json("{\"n_nodes\": 2}"), ValidationError);
    EXPECT_THROW(network_from_json("not json"), ValidationError);
}
