#include "doctest.h"

#include <sstream>

#include "cand/error.hpp"
#include "cand/representation.hpp"

using namespace cand;

namespace {

using Ids = std::array<std::vector<int>, 2>;

Assignment at(int concept_id, int minute) { return {concept_id, static_cast<std::size_t>(minute / 15), minute, 1.0}; }

DomainKS ks_with(std::vector<DomainTriplet> triplets) {
    DomainKS ks;
    ks.channel = "X1";
    for (const auto& t : triplets) ks.triplets[t] = 1;
    return ks;
}

std::vector<double> concat(const EmbeddingStore& s, std::size_t channel, const DomainTriplet& t) {
    std::vector<double> out;
    for (auto slot : {s.concept_slot(channel, t.head), s.relation_slot(channel, t.relation), s.concept_slot(channel, t.tail)}) {
        const auto v = s.vector(slot);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

EmbeddingStore seeded_store(std::size_t dim, Ids ids, std::size_t correlations = 1) {
    EmbeddingStore s(dim, ids, {4, 4}, correlations);
    s.initialize_uniform(5);
    return s;
}

}  // namespace

TEST_CASE("occurred triplets follow the knowledge structure") {
    const std::vector<Assignment> two{at(1, 0), at(2, 45)};
    auto occ = occurred_triplets(two, ks_with({{1, 1, 2}}));
    REQUIRE(occ.size() == 1);
    CHECK(occ[0].triplet == DomainTriplet{1, 1, 2});
    CHECK(occ[0].head_minute == 0);
    CHECK(occ[0].tail_minute == 45);

    CHECK(occurred_triplets(two, ks_with({{1, 0, 2}})).empty());
    CHECK(occurred_triplets(two, ks_with({})).empty());

    const std::vector<Assignment> three{at(3, 90), at(1, 0), at(2, 30)};
    occ = occurred_triplets(three, ks_with({{1, 1, 2}, {1, 3, 3}, {2, 2, 3}}));
    REQUIRE(occ.size() == 3);
    CHECK(occ[0].triplet == DomainTriplet{1, 1, 2});
    CHECK(occ[1].triplet == DomainTriplet{1, 3, 3});
    CHECK(occ[2].triplet == DomainTriplet{2, 2, 3});
}

TEST_CASE("triplet importance decays with age") {
    CHECK(triplet_importance(3, 3, 0.8) == 1.0);
    CHECK(triplet_importance(1, 3, 0.8) == doctest::Approx(0.64).epsilon(1e-15));
    CHECK(triplet_importance(1, 5, 1.0) == 1.0);
    CHECK_THROWS_AS(triplet_importance(0, 3, 0.8), InvalidArgument);
    CHECK_THROWS_AS(triplet_importance(4, 3, 0.8), InvalidArgument);
    CHECK_THROWS_AS(triplet_importance(1, 3, 0.0), InvalidArgument);
}

TEST_CASE("series representation pools weighted concatenations") {
    const auto store = seeded_store(3, Ids{std::vector<int>{1, 2, 3}, std::vector<int>{1}});
    const DomainTriplet t1{1, 1, 2}, t2{2, 0, 3};

    CHECK(series_representation({}, store, 0, 0.8) == std::vector<double>(18, 0.0));

    const std::vector<TripletOccurrence> one{{t1, 0, 45}};
    CHECK(series_representation(one, store, 0, 0.8) == concat(store, 0, t1));

    const std::vector<TripletOccurrence> both{{t1, 0, 45}, {t2, 45, 60}};
    const auto psi = series_representation(both, store, 0, 0.8);
    const auto a = concat(store, 0, t1), b = concat(store, 0, t2);
    REQUIRE(psi.size() == 18);
    for (std::size_t i = 0; i < psi.size(); ++i) CHECK(psi[i] == doctest::Approx((0.8 * a[i] + b[i]) / 2).epsilon(1e-14));
}

TEST_CASE("full representation concatenates channels in order") {
    const std::vector<double> x{1, 2}, y{3};
    CHECK(full_representation(x, y) == std::vector<double>{1, 2, 3});
}

TEST_CASE("representer works on observed prefixes") {
    const auto flat = [](double v) { return std::vector<double>{v, v, v}; };
    std::array<ShapeletDictionary, 2> dicts;
    for (std::size_t c = 0; c < 2; ++c)
        dicts[c] = ShapeletDictionary{c ? "X2" : "X1", 3, {{0, flat(0)}, {1, flat(5)}}};
    MeasurementSet set{"S", {}, Label::deteriorating};
    set.channels.push_back({"S", "X1", {0, 0, 0, 5, 5, 5, 0, 0, 0}});
    set.channels.push_back({"S", "X2", {5, 5, 5, 5, 5, 5, 0, 0, 0}});

    const AssignOptions opt{0.7, 1};
    std::array<SetAssignments, 2> assigned;
    for (std::size_t c = 0; c < 2; ++c) assigned[c] = {assign_concepts(set.channel(c).values, dicts[c], opt)};
    const auto bundle = build_knowledge(assigned, {"X1", "X2"});
    const auto store = seeded_store(32, Ids{std::vector<int>{0, 1}, std::vector<int>{0, 1}}, bundle.cross.n_types());
    const Representer rep(dicts, bundle, store, 0.8, opt);

    CHECK(rep.dimension() == 384);
    CHECK(rep(set).size() == 384);
    CHECK(rep(set, 3) == std::vector<double>(384, 0.0));

    // after two windows only the first pair has occurred on each channel
    const auto early = rep(set, 6);
    auto expected = concat(store, 0, {0, 0, 1});
    const auto second = concat(store, 1, {1, 0, 1});
    expected.insert(expected.end(), second.begin(), second.end());
    CHECK(early == expected);

    const auto whole = rep(set);
    const auto manual = full_representation(series_representation(rep.occurrences(set, 0, 9), store, 0, 0.8),
                                            series_representation(rep.occurrences(set, 1, 9), store, 1, 0.8));
    CHECK(whole == manual);
    CHECK(rep.occurrences(set, 0, 9).size() == 3);
    CHECK_THROWS_AS(rep(set, 10), InvalidArgument);
    CHECK_THROWS_AS(Representer(dicts, bundle, store, 1.5), ConfigError);
}

TEST_CASE("features csv layout") {
    std::vector<FeatureRow> rows{{"A", 30, {0.5, -1.0}, Label::deteriorating}, {"B", 60, {0.0, 2.0}, Label::unknown}};
    std::ostringstream out;
    write_features_csv(out, rows);
    CHECK(out.str() == "set_id,observed_minutes,f0,f1,label\nA,30,0.5,-1,deteriorating\nB,60,0,2,\n");

    rows[0].label = Label::unknown;
    std::ostringstream bare;
    write_features_csv(bare, rows);
    CHECK(bare.str().find("label") == std::string::npos);

    rows[1].features.push_back(1.0);
    std::ostringstream bad;
    CHECK_THROWS_AS(write_features_csv(bad, rows), InvalidArgument);
}
