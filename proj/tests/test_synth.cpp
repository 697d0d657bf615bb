#include "doctest.h"

#include <algorithm>
#include <map>

#include "cand/error.hpp"
#include "cand/distance.hpp"
#include "cand/pipeline.hpp"
#include "cand/synth.hpp"

using namespace cand;

namespace {

SynthConfig small(double noise) {
    SynthConfig c;
    c.n_sets = 20;
    c.length = 240;
    c.noise = noise;
    c.seed = 3;
    return c;
}

std::array<ShapeletDictionary, 2> motif_dictionaries(const SynthStructure& s, std::size_t length) {
    std::array<ShapeletDictionary, 2> d;
    for (std::size_t ch = 0; ch < 2; ++ch) {
        d[ch] = ShapeletDictionary{ch ? "X2" : "X1", length, {}};
        for (std::size_t m = 0; m < s.motifs[ch].size(); ++m) d[ch].shapelets.push_back({static_cast<int>(m), s.motifs[ch][m]});
    }
    return d;
}

KnowledgeBundle knowledge_of(const Dataset& data, const std::array<ShapeletDictionary, 2>& dicts) {
    std::array<SetAssignments, 2> a;
    for (const auto& set : data)
        for (std::size_t ch = 0; ch < 2; ++ch) a[ch].push_back(assign_concepts(set.channel(ch).values, dicts[ch], {0.7, 1}));
    return build_knowledge(a, {"X1", "X2"});
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
    const auto a = generate(small(0.1));
    const auto b = generate(small(0.1));
    REQUIRE(a.dataset.size() == 20);
    for (std::size_t i = 0; i < a.dataset.size(); ++i) {
        CHECK(a.dataset[i].set_id == b.dataset[i].set_id);
        CHECK(a.dataset[i].channel(1).values == b.dataset[i].channel(1).values);
    }
    CHECK(to_json(a.truth) == to_json(b.truth));
    auto other = small(0.1);
    other.seed = 4;
    CHECK(generate(other).dataset[0].channel(0).values != a.dataset[0].channel(0).values);

    const auto det = std::count_if(a.dataset.begin(), a.dataset.end(),
                                   [](const MeasurementSet& s) { return s.label == Label::deteriorating; });
    CHECK(det == 8);
    CHECK(a.dataset[0].length() == 240);
}

TEST_CASE("noise-free series contain the planted motifs exactly") {
    const auto out = generate(small(0.0));
    for (std::size_t i = 0; i < out.dataset.size(); ++i)
        for (const auto& p : out.truth.sets[i].planted) {
            const auto& motif = out.truth.structure.motifs[p.channel][static_cast<std::size_t>(p.motif)];
            const auto& v = out.dataset[i].channel(p.channel).values;
            CHECK(p.start_minute % 15 == 0);
            CHECK(std::equal(motif.begin(), motif.end(), v.begin() + static_cast<std::ptrdiff_t>(p.start_minute)));
        }
}

TEST_CASE("full coupling always produces the partner motif") {
    auto cfg = small(0.1);
    cfg.coupling = 1.0;
    const auto out = generate(cfg);
    for (const auto& set : out.truth.sets) {
        const std::size_t cls = set.label == Label::deteriorating ? 0 : 1;
        for (const auto& c : out.truth.structure.couplings[cls]) {
            const bool first = std::any_of(set.planted.begin(), set.planted.end(), [&](const PlantedMotif& p) {
                return p.channel == 0 && p.motif == c.first;
            });
            if (!first) continue;
            CHECK(std::find(set.cooccurring.begin(), set.cooccurring.end(), std::pair{c.first, c.second}) !=
                  set.cooccurring.end());
        }
    }
}

TEST_CASE("oracle checks on a hand-built scenario") {
    auto cfg = small(0.0);
    cfg.motifs = 2;
    cfg.class_motifs = 2;
    cfg.coupled_pairs = 1;
    auto s = default_structure(cfg);
    for (std::size_t cls = 0; cls < 2; ++cls) {
        s.initial[cls][0] = {1.0, 0.0};
        s.transitions[cls][0] = {{1.0, 0.0}, {1.0, 0.0}};
        s.initial[cls][1] = {0.5, 0.5};
        s.transitions[cls][1] = {{0.5, 0.5}, {0.5, 0.5}};
        s.couplings[cls] = {{0, 1, 1.0}};
    }
    const auto out = generate(cfg, s);
    const auto dicts = motif_dictionaries(out.truth.structure, cfg.motif_length);
    const auto knowledge = knowledge_of(out.dataset, dicts);
    const auto r = oracle_checks(out.truth, dicts, knowledge, 1e-9);
    CHECK(r.motif_recovery == 1.0);
    CHECK(r.high_transitions == 10);  // 2 on channel 0, every 0.5 entry on channel 1
    CHECK(r.transition_fidelity == 1.0);
    CHECK(r.full_couplings == 2);
    CHECK(r.coupling_fidelity == 1.0);

    s.transitions[0][0] = {{0.5, 0.5}};
    CHECK_THROWS_AS(generate(cfg, s), ConfigError);
}

TEST_CASE("synth configuration is validated") {
    auto c = small(0.1);
    c.motif_length = 300;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small(0.1);
    c.gap_probabilities = {0.5, 0.5, 0.5, 0.0};
    CHECK_THROWS_AS(generate(c), ConfigError);
    c = small(0.1);
    c.class_motifs = 13;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small(-1.0);
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("zero noise with exact-size discovery recovers planted occurrences") {
    // back-to-back motifs leave no filler windows competing for centroids
    auto cfg = small(0.0);
    cfg.n_sets = 40;
    cfg.gap_probabilities = {1.0, 0.0, 0.0, 0.0};
    const auto out = generate(cfg);
    ShapeletConfig shp;
    shp.counts = {cfg.motifs, cfg.motifs};
    const auto dicts = discover_dictionaries(out.dataset, shp, 5);
    const auto report = oracle_checks(out.truth, dicts, knowledge_of(out.dataset, dicts), 1e-6);
    CHECK(report.motif_recovery == 1.0);

    std::size_t found = 0, total = 0;
    for (std::size_t i = 0; i < out.dataset.size(); ++i)
        for (std::size_t ch = 0; ch < 2; ++ch) {
            const auto assigned = assign_concepts(out.dataset[i].channel(ch).values, dicts[ch]);
            for (const auto& p : out.truth.sets[i].planted) {
                if (p.channel != ch) continue;
                ++total;
                const auto& motif = out.truth.structure.motifs[ch][static_cast<std::size_t>(p.motif)];
                found += std::any_of(assigned.begin(), assigned.end(), [&](const Assignment& a) {
                    return a.start_minute == static_cast<int>(p.start_minute) &&
                           combined_distance(dicts[ch].by_id(a.concept_id).values, motif) < 1e-6;
                });
            }
        }
    CHECK(static_cast<double>(found) >= 0.95 * static_cast<double>(total));
}

TEST_CASE("dominant planted transitions carry the largest successor counts") {
    auto cfg = small(0.0);
    cfg.motifs = 3;
    cfg.class_motifs = 3;
    cfg.coupled_pairs = 1;
    cfg.dominant_probability = 0.9;
    cfg.deteriorating_fraction = 1.0;
    cfg.gap_probabilities = {1.0, 0.0, 0.0, 0.0};
    const auto out = generate(cfg);
    const auto dicts = motif_dictionaries(out.truth.structure, cfg.motif_length);
    const auto ks = knowledge_of(out.dataset, dicts).domains[0];

    std::map<std::pair<int, int>, std::size_t> successions;
    for (const auto& set : out.truth.sets) {
        std::vector<PlantedMotif> chain;
        for (const auto& p : set.planted)
            if (p.channel == 0) chain.push_back(p);
        for (std::size_t k = 1; k < chain.size(); ++k) ++successions[{chain[k - 1].motif, chain[k].motif}];
    }
    const auto& planted = out.truth.structure.transitions[0][0];
    std::size_t best = 0;
    DomainTriplet argmax;
    for (const auto& [t, count] : ks.triplets) {
        if (t.relation != 0) continue;
        CHECK(count == successions[{t.head, t.tail}]);
        if (count > best) {
            best = count;
            argmax = t;
        }
    }
    CHECK(planted[static_cast<std::size_t>(argmax.head)][static_cast<std::size_t>(argmax.tail)] == 0.9);
    for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t y = 0; y < 3; ++y)
            for (std::size_t x2 = 0; x2 < 3; ++x2)
                for (std::size_t y2 = 0; y2 < 3; ++y2)
                    if (planted[x][y] == 0.9 && planted[x2][y2] < 0.9)
                        CHECK(successions[{int(x), int(y)}] > successions[{int(x2), int(y2)}]);
}
