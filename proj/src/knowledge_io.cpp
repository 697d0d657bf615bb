#include "cand/knowledge_io.hpp"

#include "cand/artifact.hpp"

namespace cand {

using nlohmann::json;

namespace {

json relations_json(const IntervalRelations& rel) {
    json out = json::array();
    for (std::size_t i = 0; i < rel.size(); ++i) {
        json hi = i + 1 < rel.size() ? json(rel.lower_bounds[i + 1]) : json(nullptr);
        out.push_back({{"id", i}, {"lo", rel.lower_bounds[i]}, {"hi", hi}});
    }
    return out;
}

}  // namespace

json to_json(const KnowledgeBundle& bundle) {
    json doc = artifact_header("knowledge");
    doc["channels"] = {bundle.domains[0].channel, bundle.domains[1].channel};
    json domains = json::array();
    json transitions = json::array();
    for (std::size_t c = 0; c < 2; ++c) {
        const auto& ks = bundle.domains[c];
        json triplets = json::array();
        for (const auto& [t, count] : ks.triplets)
            triplets.push_back({{"head", t.head}, {"rel", t.relation}, {"tail", t.tail}, {"count", count}});
        domains.push_back({{"channel", ks.channel},
                           {"relations", relations_json(ks.relations)},
                           {"concepts", ks.concepts},
                           {"triplets", std::move(triplets)}});
        json rows = json::array();
        for (const auto& [from, row] : bundle.transitions[c].rows)
            for (const auto& [to, p] : row) rows.push_back({{"from", from}, {"to", to}, {"prob", p}});
        transitions.push_back({{"channel", ks.channel}, {"rows", std::move(rows)}});
    }
    doc["domain_ks"] = std::move(domains);
    doc["transitions"] = std::move(transitions);

    json correlations = json::array();
    for (const auto& c : bundle.cross.correlations) correlations.push_back({{"id", c.id}, {"lo", c.lo}, {"hi", c.hi}});
    json triplets = json::array();
    for (const auto& t : bundle.cross.triplets)
        triplets.push_back({{"head", t.head}, {"corr", t.correlation}, {"tail", t.tail}, {"likelihood", t.likelihood}});
    doc["cross_ks"] = {{"correlations", std::move(correlations)}, {"triplets", std::move(triplets)}};
    return doc;
}

KnowledgeBundle knowledge_from_json(const json& doc) {
    check_artifact(doc, "knowledge");
    try {
        KnowledgeBundle bundle;
        const auto& domains = doc.at("domain_ks");
        const auto& transitions = doc.at("transitions");
        if (domains.size() != 2 || transitions.size() != 2)
            throw ArtifactError("knowledge artifact must describe exactly two channels");
        for (std::size_t c = 0; c < 2; ++c) {
            auto& ks = bundle.domains[c];
            const auto& d = domains[c];
            ks.channel = d.at("channel").get<std::string>();
            ks.relations.lower_bounds.clear();
            for (const auto& r : d.at("relations")) ks.relations.lower_bounds.push_back(r.at("lo").get<int>());
            ks.concepts = d.at("concepts").get<std::vector<int>>();
            for (const auto& t : d.at("triplets"))
                ks.triplets[{t.at("head").get<int>(), t.at("rel").get<int>(), t.at("tail").get<int>()}] =
                    t.at("count").get<std::size_t>();
            for (const auto& r : transitions[c].at("rows"))
                bundle.transitions[c].rows[r.at("from").get<int>()][r.at("to").get<int>()] = r.at("prob").get<double>();
        }
        const auto& cross = doc.at("cross_ks");
        for (const auto& c : cross.at("correlations"))
            bundle.cross.correlations.push_back({c.at("id").get<int>(), c.at("lo").get<double>(), c.at("hi").get<double>()});
        for (const auto& t : cross.at("triplets")) {
            CrossTriplet ct{t.at("head").get<int>(), t.at("corr").get<int>(), t.at("tail").get<int>(),
                            t.at("likelihood").get<double>()};
            bundle.cross.head_concepts.insert(ct.head);
            bundle.cross.tail_concepts.insert(ct.tail);
            bundle.cross.triplets.push_back(ct);
        }
        std::sort(bundle.cross.triplets.begin(), bundle.cross.triplets.end(),
                  [](const CrossTriplet& a, const CrossTriplet& b) {
                      return std::pair{a.head, a.tail} < std::pair{b.head, b.tail};
                  });
        return bundle;
    } catch (const json::exception& e) {
        throw ArtifactError(std::string("malformed knowledge artifact: ") + e.what());
    }
}

}  // namespace cand
