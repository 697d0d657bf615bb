#include "doctest.h"

#include <random>

#include "cand/error.hpp"
#include "cand/knowledge.hpp"
#include "cand/knowledge_io.hpp"
#include "oracles.hpp"

using namespace cand;

namespace {

Assignment at(int concept_id, int minute) { return {concept_id, static_cast<std::size_t>(minute / 15), minute, 1.0}; }

}  // namespace

TEST_CASE("interval buckets") {
    IntervalRelations r;
    CHECK(r.relation_for(0) == 0);
    CHECK(r.relation_for(29) == 0);
    CHECK(r.relation_for(30) == 1);
    CHECK(r.relation_for(45) == 1);
    CHECK(r.relation_for(90) == 3);
    CHECK(r.relation_for(400) == 3);
    CHECK_THROWS(validate(IntervalRelations{{0, 60, 30}}));
    CHECK_THROWS(validate(IntervalRelations{{10, 30}}));
}

TEST_CASE("domain triplets from worked examples") {
    auto ks = build_domain_ks("X1", {{at(1, 0), at(2, 45)}});
    REQUIRE(ks.triplets.size() == 1);
    CHECK(ks.contains({1, 1, 2}));

    CHECK(build_domain_ks("X1", {{at(1, 0)}}).triplets.empty());

    ks = build_domain_ks("X1", {{at(1, 0), at(2, 30), at(3, 120)}});
    CHECK(ks.triplets.size() == 3);
    CHECK(ks.contains({1, 1, 2}));
    CHECK(ks.contains({1, 3, 3}));
    CHECK(ks.contains({2, 3, 3}));
    CHECK(ks.concepts == std::vector<int>{1, 2, 3});
}

TEST_CASE("domain structure equals brute force on random small instances") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const int n_concepts = 2 + static_cast<int>(rng() % 9);  // up to 10
        SetAssignments sets(1 + rng() % 4);
        for (auto& s : sets) {
            const std::size_t windows = 2 + rng() % 10;
            for (std::size_t w = 0; w < windows; ++w)
                for (std::size_t k = 0, n = rng() % 3; k < n; ++k)
                    s.push_back(at(static_cast<int>(rng() % n_concepts), static_cast<int>(w * 15)));
            std::sort(s.begin(), s.end(), [](const Assignment& a, const Assignment& b) {
                return std::tie(a.start_minute, a.concept_id) < std::tie(b.start_minute, b.concept_id);
            });
            s.erase(std::unique(s.begin(), s.end()), s.end());
        }
        std::vector<int> concepts(n_concepts);
        std::iota(concepts.begin(), concepts.end(), 0);
        const auto ks = build_domain_ks("X1", sets);
        CHECK(ks.triplets == oracle::domain_triplets(sets, concepts, {0, 30, 60, 90}));
    }
}

TEST_CASE("dominant relation prefers the most frequent, then the lowest") {
    const auto ks = build_domain_ks("X1", {{at(1, 0), at(2, 30)}, {at(1, 0), at(2, 30)}, {at(1, 0), at(2, 90)}});
    CHECK(ks.dominant_relation(1, 2) == 1);
    CHECK_FALSE(ks.dominant_relation(2, 1).has_value());
    const auto tie = build_domain_ks("X1", {{at(1, 0), at(2, 90)}, {at(1, 0), at(2, 30)}});
    CHECK(tie.dominant_relation(1, 2) == 1);
}

TEST_CASE("transition probabilities count immediate successors only") {
    auto w = transition_probabilities({{at(1, 0), at(2, 15), at(1, 30)}});
    CHECK(w.probability(1, 2) == 1.0);
    CHECK(w.probability(2, 1) == 1.0);
    CHECK(w.probability(1, 1) == 0.0);

    w = transition_probabilities({{at(1, 0), at(2, 15)}, {at(1, 0), at(3, 15)}});
    CHECK(w.probability(1, 2) == 0.5);
    CHECK(w.probability(1, 3) == 0.5);
    CHECK(w.successors(2) == nullptr);

    // concepts sharing a minute are co-located, not successors of each other
    w = transition_probabilities({{at(1, 0), at(2, 0), at(3, 15)}});
    CHECK(w.probability(1, 2) == 0.0);
    CHECK(w.probability(1, 3) == 1.0);
    CHECK(w.probability(2, 3) == 1.0);
    for (const auto& [from, row] : w.rows) {
        double sum = 0.0;
        for (const auto& [to, p] : row) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("co-occurrence is Jaccard over sets") {
    // c in sets {0,1}, c' in sets {1,2}
    const SetAssignments first{{at(5, 0)}, {at(5, 0)}, {}};
    const SetAssignments second{{}, {at(7, 0)}, {at(7, 0)}};
    auto l = cooccurrence_likelihood(first, second);
    CHECK(l.at({5, 7}) == doctest::Approx(1.0 / 3.0));

    l = cooccurrence_likelihood({{at(1, 0)}, {at(1, 0)}}, {{at(2, 0)}, {at(2, 0)}});
    CHECK(l.at({1, 2}) == 1.0);

    l = cooccurrence_likelihood({{at(1, 0)}, {}}, {{}, {at(2, 0)}});
    CHECK(l.empty());
}

TEST_CASE("correlation bins are equal width and right closed") {
    CHECK(correlation_bin(0.2, 1.0, 5) == 0);
    CHECK(correlation_bin(1.0, 1.0, 5) == 4);
    CHECK(correlation_bin(0.21, 1.0, 5) == 1);
    CHECK(correlation_bin(0.5, 0.5, 1) == 0);

    const auto cross = build_cross_ks({{{1, 2}, 0.2}, {{1, 3}, 1.0}, {{4, 2}, 0.55}}, 5);
    CHECK(cross.n_types() == 5);
    REQUIRE(cross.triplets.size() == 3);
    CHECK(cross.correlation_between({0, 1}, {1, 2}) == 0);
    CHECK(cross.correlation_between({1, 2}, {0, 1}) == 0);  // undirected
    CHECK(cross.correlation_between({0, 1}, {1, 3}) == 4);
    CHECK(cross.correlation_between({0, 4}, {1, 2}) == 2);
    CHECK_FALSE(cross.correlation_between({0, 4}, {1, 3}).has_value());
    CHECK(cross.head_concepts == std::set<int>{1, 4});
    CHECK(cross.in_cross(1, 3));
    CHECK_FALSE(cross.in_cross(0, 3));
    CHECK_THROWS_AS(build_cross_ks({{{1, 2}, 0.5}}, 0), ConfigError);
}

TEST_CASE("knowledge json round trip") {
    std::array<SetAssignments, 2> a;
    a[0] = {{at(1, 0), at(2, 30)}, {at(2, 0), at(1, 60)}};
    a[1] = {{at(3, 0)}, {at(3, 15), at(4, 30)}};
    const auto bundle = build_knowledge(a, {"X1", "X2"});
    const auto back = knowledge_from_json(to_json(bundle));
    CHECK(back.domains[0].triplets == bundle.domains[0].triplets);
    CHECK(back.domains[1].channel == "X2");
    CHECK(back.transitions[0].rows == bundle.transitions[0].rows);
    REQUIRE(back.cross.triplets.size() == bundle.cross.triplets.size());
    for (std::size_t i = 0; i < back.cross.triplets.size(); ++i) {
        CHECK(back.cross.triplets[i].correlation == bundle.cross.triplets[i].correlation);
        CHECK(back.cross.triplets[i].likelihood == bundle.cross.triplets[i].likelihood);
    }
    auto j = to_json(bundle);
    j["kind"] = "model";
    CHECK_THROWS_AS(knowledge_from_json(j), ArtifactError);
}
