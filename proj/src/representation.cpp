#include "cand/representation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include "cand/error.hpp"
#include "cand/series_io.hpp"

namespace cand {

std::vector<TripletOccurrence> occurred_triplets(std::span<const Assignment> assignments, const DomainKS& ks) {
    std::vector<TripletOccurrence> out;
    for (const auto& a : assignments)
        for (const auto& b : assignments) {
            if (a.start_minute >= b.start_minute) continue;
            const int rel = ks.relations.relation_for(b.start_minute - a.start_minute);
            const DomainTriplet t{a.concept_id, rel, b.concept_id};
            if (ks.contains(t))
                out.push_back({t, static_cast<std::size_t>(a.start_minute), static_cast<std::size_t>(b.start_minute)});
        }
    std::sort(out.begin(), out.end(), [](const TripletOccurrence& x, const TripletOccurrence& y) {
        return std::tie(x.tail_minute, x.head_minute, x.triplet.head, x.triplet.tail) <
               std::tie(y.tail_minute, y.head_minute, y.triplet.head, y.triplet.tail);
    });
    return out;
}

double triplet_importance(std::size_t n, std::size_t total, double rho) {
    if (n < 1 || n > total) throw InvalidArgument("triplet_importance: n must lie in [1, total]");
    if (!(rho > 0.0 && rho <= 1.0)) throw InvalidArgument("triplet_importance: rho must lie in (0, 1]");
    return std::pow(rho, static_cast<double>(total - n));
}

std::vector<double> series_representation(std::span<const TripletOccurrence> occurrences, const EmbeddingStore& store,
                                          std::size_t channel, double rho) {
    const std::size_t w = store.width();
    std::vector<double> psi(3 * w, 0.0);
    const std::size_t total = occurrences.size();
    if (total == 0) return psi;
    const double inv = 1.0 / static_cast<double>(total);
    for (std::size_t n = 1; n <= total; ++n) {
        const auto& t = occurrences[n - 1].triplet;
        const double mu = triplet_importance(n, total, rho) * inv;
        const std::array<std::span<const double>, 3> parts{store.vector(store.concept_slot(channel, t.head)),
                                                            store.vector(store.relation_slot(channel, t.relation)),
                                                            store.vector(store.concept_slot(channel, t.tail))};
        for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < w; ++i) psi[p * w + i] += mu * parts[p][i];
    }
    return psi;
}

std::vector<double> full_representation(std::span<const double> first, std::span<const double> second) {
    std::vector<double> out(first.begin(), first.end());
    out.insert(out.end(), second.begin(), second.end());
    return out;
}

Representer::Representer(const std::array<ShapeletDictionary, 2>& dicts, const KnowledgeBundle& knowledge,
                         const EmbeddingStore& store, double rho, AssignOptions assign)
    : dicts_(&dicts), knowledge_(&knowledge), store_(&store), rho_(rho), assign_(assign) {
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
}

std::vector<TripletOccurrence> Representer::occurrences(const MeasurementSet& set, std::size_t channel,
                                                        std::size_t observed_minutes) const {
    const auto& values = set.channel(channel).values;
    if (observed_minutes > values.size())
        throw InvalidArgument("cannot observe " + std::to_string(observed_minutes) + " minutes of a " +
                              std::to_string(values.size()) + "-minute series");
    const auto& dict = (*dicts_)[channel];
    if (observed_minutes < dict.length) return {};
    const std::span<const double> prefix(values.data(), observed_minutes);
    const auto assignments = assign_concepts(prefix, dict, assign_);
    return occurred_triplets(assignments, knowledge_->domains[channel]);
}

std::vector<double> Representer::operator()(const MeasurementSet& set, std::size_t observed_minutes) const {
    std::array<std::vector<double>, 2> psi;
    for (std::size_t c = 0; c < 2; ++c)
        psi[c] = series_representation(occurrences(set, c, observed_minutes), *store_, c, rho_);
    return full_representation(psi[0], psi[1]);
}

void write_features_csv(std::ostream& out, std::span<const FeatureRow> rows) {
    const std::size_t n = rows.empty() ? 0 : rows.front().features.size();
    const bool labelled = std::any_of(rows.begin(), rows.end(), [](const FeatureRow& r) { return r.label != Label::unknown; });
    out << "set_id,observed_minutes";
    for (std::size_t i = 0; i < n; ++i) out << ",f" << i;
    if (labelled) out << ",label";
    out << '\n';
    for (const auto& r : rows) {
        if (r.features.size() != n) throw InvalidArgument("feature rows differ in width");
        out << r.set_id << ',' << r.observed_minutes;
        for (double v : r.features) out << ',' << format_double(v);
        if (labelled) out << ',' << (r.label == Label::unknown ? std::string() : std::string(to_string(r.label)));
        out << '\n';
    }
}

}  // namespace cand
