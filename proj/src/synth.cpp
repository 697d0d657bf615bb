#include "cand/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "cand/distance.hpp"
#include "cand/error.hpp"
#include "cand/random.hpp"

namespace cand {

using nlohmann::json;

void validate(const SynthConfig& c) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("synth: " + what);
    };
    require(c.n_sets >= 1, "n_sets must be at least 1");
    require(c.motif_length >= 2, "motif length must be at least 2");
    require(c.motif_length <= c.length, "motifs of length " + std::to_string(c.motif_length) +
                                            " do not fit series of length " + std::to_string(c.length));
    require(c.motifs >= 2, "at least two motifs per channel are required");
    require(c.class_motifs >= 2 && c.class_motifs <= c.motifs, "class_motifs must lie in [2, motifs]");
    require(c.coupled_pairs <= c.class_motifs, "coupled_pairs cannot exceed class_motifs");
    require(c.noise >= 0.0 && std::isfinite(c.noise), "noise must be a non-negative number");
    require(c.deteriorating_fraction >= 0.0 && c.deteriorating_fraction <= 1.0,
            "deteriorating_fraction must lie in [0,1]");
    require(c.dominant_probability >= 0.0 && c.dominant_probability <= 1.0,
            "dominant_probability must lie in [0,1]");
    require(c.coupling >= 0.0 && c.coupling <= 1.0, "coupling must lie in [0,1]");
    double total = 0.0;
    for (double p : c.gap_probabilities) {
        require(p >= 0.0, "gap probabilities must be non-negative");
        total += p;
    }
    require(std::abs(total - 1.0) < 1e-9, "gap probabilities must sum to 1");
}

void validate(const SynthStructure& s, const SynthConfig& config) {
    for (std::size_t ch = 0; ch < 2; ++ch) {
        if (s.motifs[ch].empty()) throw ConfigError("synth: channel without motifs");
        for (const auto& m : s.motifs[ch])
            if (m.size() != config.motif_length) throw ConfigError("synth: motif length differs from motif_length");
        const std::size_t n = s.motifs[ch].size();
        for (std::size_t cls = 0; cls < 2; ++cls) {
            const auto& matrix = s.transitions[cls][ch];
            if (matrix.size() != n || s.initial[cls][ch].size() != n)
                throw ConfigError("synth: transition matrix shape does not match the motif count");
            auto check_row = [&](const std::vector<double>& row) {
                if (row.size() != n) throw ConfigError("synth: transition row has the wrong length");
                double sum = 0.0;
                for (double p : row) {
                    if (p < 0.0) throw ConfigError("synth: negative transition probability");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("synth: transition rows must sum to 1");
            };
            for (const auto& row : matrix) check_row(row);
            check_row(s.initial[cls][ch]);
        }
    }
    for (const auto& list : s.couplings)
        for (const auto& c : list) {
            if (c.probability < 0.0 || c.probability > 1.0) throw ConfigError("synth: coupling must lie in [0,1]");
            if (c.first < 0 || c.second < 0 || static_cast<std::size_t>(c.first) >= s.motifs[0].size() ||
                static_cast<std::size_t>(c.second) >= s.motifs[1].size())
                throw ConfigError("synth: coupling refers to an unknown motif");
        }
}

namespace {

// Residual norm of the least-squares line through `v`; motifs must stand out
// from the linear filler between them.
double line_residual(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += v[i];
        sxx += x * x;
        sxy += x * v[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double e = v[i] - (icept + slope * static_cast<double>(i));
        r += e * e;
    }
    return std::sqrt(r);
}

std::vector<std::vector<double>> make_motifs(std::size_t count, std::size_t length, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(1.5, 2.5), freq(0.6, 2.0), phase(0.0, 2.0 * std::numbers::pi),
        trend(-1.0, 1.0);
    std::vector<std::vector<double>> out;
    double separation = 4.0;
    std::size_t failures = 0;
    while (out.size() < count) {
        const double a = amp(rng), f = freq(rng), p = phase(rng), b = trend(rng);
        std::vector<double> m(length);
        for (std::size_t k = 0; k < length; ++k) {
            const double x = static_cast<double>(k) / static_cast<double>(length - 1);
            m[k] = a * std::sin(2.0 * std::numbers::pi * f * x + p) + b * (x - 0.5);
        }
        bool ok = line_residual(m) >= 0.5 * separation;
        for (const auto& other : out)
            if (ok && combined_distance(m, other) < separation) ok = false;
        if (ok) {
            out.push_back(std::move(m));
        } else if (++failures % 200 == 0) {
            separation *= 0.95;
        }
    }
    return out;
}

}  // namespace

SynthStructure default_structure(const SynthConfig& config) {
    validate(config);
    std::mt19937_64 rng(derive_seed(config.seed, {0x5e}));
    SynthStructure s;
    const std::size_t n = config.motifs;
    const std::size_t k = config.class_motifs;
    std::array<std::array<std::vector<int>, 2>, 2> members;  // [class][channel], in cycle order
    for (std::size_t ch = 0; ch < 2; ++ch) {
        s.motifs[ch] = make_motifs(n, config.motif_length, rng);
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        // Class 0 visits the first k motifs, class 1 the last k; the middle is shared.
        members[0][ch].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        members[1][ch].assign(order.end() - static_cast<std::ptrdiff_t>(k), order.end());
        for (std::size_t cls = 0; cls < 2; ++cls) {
            auto& cycle = members[cls][ch];
            std::shuffle(cycle.begin(), cycle.end(), rng);
            auto& matrix = s.transitions[cls][ch];
            matrix.assign(n, std::vector<double>(n, 0.0));
            auto& init = s.initial[cls][ch];
            init.assign(n, 0.0);
            for (int m : cycle) init[static_cast<std::size_t>(m)] = 1.0 / static_cast<double>(k);
            std::set<int> inside(cycle.begin(), cycle.end());
            for (std::size_t x = 0; x < n; ++x) {
                auto& row = matrix[x];
                if (!inside.count(static_cast<int>(x))) {
                    row = init;
                    continue;
                }
                const auto pos = std::find(cycle.begin(), cycle.end(), static_cast<int>(x)) - cycle.begin();
                const int next = cycle[static_cast<std::size_t>(pos + 1) % k];
                const double rest = k > 2 ? (1.0 - config.dominant_probability) / static_cast<double>(k - 2) : 0.0;
                for (int m : cycle)
                    if (m != static_cast<int>(x) && m != next) row[static_cast<std::size_t>(m)] = rest;
                row[static_cast<std::size_t>(next)] = k > 2 ? config.dominant_probability : 1.0;
            }
        }
    }
    for (std::size_t cls = 0; cls < 2; ++cls) {
        auto a = members[cls][0];
        auto b = members[cls][1];
        std::shuffle(a.begin(), a.end(), rng);
        std::shuffle(b.begin(), b.end(), rng);
        for (std::size_t i = 0; i < config.coupled_pairs; ++i) s.couplings[cls].push_back({a[i], b[i], config.coupling});
    }
    return s;
}

SynthOutput generate(const SynthConfig& config) { return generate(config, default_structure(config)); }

namespace {

// Start-to-start spacing in minutes for each interval bucket, on the 15-minute grid.
std::size_t sample_spacing(const SynthConfig& config, std::mt19937_64& rng) {
    static const std::array<std::vector<std::size_t>, 4> choices{
        std::vector<std::size_t>{15}, {30, 45}, {60, 75}, {90, 105, 120}};
    std::discrete_distribution<std::size_t> bucket(config.gap_probabilities.begin(), config.gap_probabilities.end());
    const auto& options = choices[bucket(rng)];
    const std::size_t spacing = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    return std::max(spacing, config.motif_length);
}

std::vector<PlantedMotif> plant_channel(const SynthConfig& config, const SynthStructure& s, std::size_t cls,
                                        std::size_t ch, std::mt19937_64& rng) {
    std::vector<PlantedMotif> out;
    const auto& init = s.initial[cls][ch];
    int motif = static_cast<int>(std::discrete_distribution<std::size_t>(init.begin(), init.end())(rng));
    // The chain starts at minute 0 so no window is pure lead-in; later
    // starts stay on the matching grid because spacings are multiples of 15.
    std::size_t start = 0;
    while (start + config.motif_length <= config.length) {
        out.push_back({motif, ch, start});
        const auto& row = s.transitions[cls][ch][static_cast<std::size_t>(motif)];
        motif = static_cast<int>(std::discrete_distribution<std::size_t>(row.begin(), row.end())(rng));
        start += sample_spacing(config, rng);
    }
    return out;
}

std::vector<double> render(const SynthConfig& config, const SynthStructure& s, const std::vector<PlantedMotif>& planted,
                           std::size_t ch, std::mt19937_64& rng) {
    const std::size_t len = config.motif_length;
    std::vector<double> v(config.length, 0.0);
    if (planted.empty()) return v;
    auto shape = [&](const PlantedMotif& p) -> const std::vector<double>& {
        return s.motifs[ch][static_cast<std::size_t>(p.motif)];
    };
    for (std::size_t t = 0; t < planted.front().start_minute; ++t) v[t] = shape(planted.front()).front();
    for (std::size_t i = 0; i < planted.size(); ++i) {
        const auto& m = shape(planted[i]);
        std::copy(m.begin(), m.end(), v.begin() + static_cast<std::ptrdiff_t>(planted[i].start_minute));
        const std::size_t end = planted[i].start_minute + len - 1;
        if (i + 1 < planted.size()) {
            const std::size_t next = planted[i + 1].start_minute;
            const double a = m.back(), b = shape(planted[i + 1]).front();
            for (std::size_t t = end + 1; t < next; ++t)
                v[t] = a + (b - a) * static_cast<double>(t - end) / static_cast<double>(next - end);
        } else {
            for (std::size_t t = end + 1; t < config.length; ++t) v[t] = m.back();
        }
    }
    if (config.noise > 0.0) {
        std::normal_distribution<double> noise(0.0, config.noise);
        for (double& x : v) x += noise(rng);
    }
    return v;
}

}  // namespace

SynthOutput generate(const SynthConfig& config, const SynthStructure& structure) {
    validate(config);
    validate(structure, config);
    SynthOutput out;
    out.truth.structure = structure;

    const auto n_det = static_cast<std::size_t>(std::llround(config.deteriorating_fraction * static_cast<double>(config.n_sets)));
    std::vector<Label> labels(config.n_sets, Label::recovering);
    std::fill_n(labels.begin(), n_det, Label::deteriorating);
    std::mt19937_64 label_rng(derive_seed(config.seed, {0x1a}));
    std::shuffle(labels.begin(), labels.end(), label_rng);

    const int width = static_cast<int>(std::to_string(config.n_sets).size());
    for (std::size_t i = 0; i < config.n_sets; ++i) {
        std::mt19937_64 rng(derive_seed(config.seed, {1, i}));
        std::string id = std::to_string(i + 1);
        id = "S" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(id.size()))), '0') + id;
        const std::size_t cls = labels[i] == Label::deteriorating ? 0 : 1;

        std::array<std::vector<PlantedMotif>, 2> planted{plant_channel(config, structure, cls, 0, rng),
                                                         plant_channel(config, structure, cls, 1, rng)};
        // Coupling: force the partner into channel 1 at the occurrence
        // nearest in time to the channel-0 motif.
        std::set<std::size_t> forced;
        SetTruth truth{id, labels[i], {}, {}};
        for (const auto& c : structure.couplings[cls]) {
            const auto first = std::find_if(planted[0].begin(), planted[0].end(),
                                            [&](const PlantedMotif& p) { return p.motif == c.first; });
            const double draw = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            if (first == planted[0].end()) continue;
            const bool present = std::any_of(planted[1].begin(), planted[1].end(),
                                             [&](const PlantedMotif& p) { return p.motif == c.second; });
            if (!present && draw < c.probability) {
                std::size_t best = planted[1].size();
                std::size_t best_gap = std::numeric_limits<std::size_t>::max();
                for (std::size_t j = 0; j < planted[1].size(); ++j) {
                    if (forced.count(j)) continue;
                    const std::size_t a = planted[1][j].start_minute, b = first->start_minute;
                    const std::size_t gap = a > b ? a - b : b - a;
                    if (gap < best_gap) {
                        best_gap = gap;
                        best = j;
                    }
                }
                if (best < planted[1].size()) {
                    planted[1][best].motif = c.second;
                    forced.insert(best);
                }
            }
            const bool now_present = std::any_of(planted[1].begin(), planted[1].end(),
                                                 [&](const PlantedMotif& p) { return p.motif == c.second; });
            if (now_present) truth.cooccurring.emplace_back(c.first, c.second);
        }

        MeasurementSet set{id, {}, labels[i]};
        for (std::size_t ch = 0; ch < 2; ++ch) {
            set.channels.push_back({id, ch == 0 ? "X1" : "X2", render(config, structure, planted[ch], ch, rng)});
            truth.planted.insert(truth.planted.end(), planted[ch].begin(), planted[ch].end());
        }
        out.dataset.push_back(std::move(set));
        out.truth.sets.push_back(std::move(truth));
    }
    return out;
}

json to_json(const GroundTruth& truth) {
    json doc;
    doc["format_version"] = 1;
    doc["kind"] = "synth_truth";
    json motifs = json::array();
    for (std::size_t ch = 0; ch < 2; ++ch) motifs.push_back(truth.structure.motifs[ch]);
    doc["motifs"] = motifs;
    json transitions = json::array();
    for (std::size_t cls = 0; cls < 2; ++cls)
        transitions.push_back({{"label", to_string(cls == 0 ? Label::deteriorating : Label::recovering)},
                               {"channels", {truth.structure.transitions[cls][0], truth.structure.transitions[cls][1]}},
                               {"initial", {truth.structure.initial[cls][0], truth.structure.initial[cls][1]}}});
    doc["transitions"] = transitions;
    json couplings = json::array();
    for (std::size_t cls = 0; cls < 2; ++cls)
        for (const auto& c : truth.structure.couplings[cls])
            couplings.push_back({{"label", to_string(cls == 0 ? Label::deteriorating : Label::recovering)},
                                 {"first", c.first},
                                 {"second", c.second},
                                 {"probability", c.probability}});
    doc["couplings"] = couplings;
    json sets = json::array();
    for (const auto& s : truth.sets) {
        json planted = json::array();
        for (const auto& p : s.planted)
            planted.push_back({{"motif", p.motif}, {"channel", p.channel}, {"start_minute", p.start_minute}});
        json pairs = json::array();
        for (const auto& [a, b] : s.cooccurring) pairs.push_back({a, b});
        sets.push_back({{"set_id", s.set_id}, {"label", to_string(s.label)}, {"planted", planted}, {"cooccurring", pairs}});
    }
    doc["sets"] = sets;
    return doc;
}

namespace {

// Nearest shapelet to a motif: (concept id, distance).
std::pair<int, double> nearest_shapelet(const std::vector<double>& motif, const ShapeletDictionary& dict) {
    std::pair<int, double> best{-1, std::numeric_limits<double>::infinity()};
    for (const auto& s : dict.shapelets) {
        if (s.values.size() != motif.size()) continue;
        const double d = combined_distance(motif, s.values);
        if (d < best.second) best = {s.concept_id, d};
    }
    return best;
}

}  // namespace

OracleReport oracle_checks(const GroundTruth& truth, const std::array<ShapeletDictionary, 2>& dicts,
                           const KnowledgeBundle& knowledge, double noise_bound) {
    OracleReport report;
    const auto& s = truth.structure;
    std::array<std::set<int>, 2> used;
    for (const auto& set : truth.sets)
        for (const auto& p : set.planted) used[p.channel].insert(p.motif);

    std::array<std::vector<int>, 2> best_id;
    std::size_t recovered = 0, total = 0;
    for (std::size_t ch = 0; ch < 2; ++ch) {
        for (const auto& m : s.motifs[ch]) {
            const auto [id, d] = nearest_shapelet(m, dicts[ch]);
            best_id[ch].push_back(id);
            (void)d;
        }
        for (int m : used[ch]) {
            ++total;
            if (nearest_shapelet(s.motifs[ch][static_cast<std::size_t>(m)], dicts[ch]).second <= noise_bound)
                ++recovered;
        }
    }
    report.motif_recovery = total ? static_cast<double>(recovered) / static_cast<double>(total) : 1.0;

    std::size_t present = 0;
    for (std::size_t cls = 0; cls < 2; ++cls)
        for (std::size_t ch = 0; ch < 2; ++ch) {
            const auto& matrix = s.transitions[cls][ch];
            for (std::size_t x = 0; x < matrix.size(); ++x) {
                if (s.initial[cls][ch][x] <= 0.0 || !used[ch].count(static_cast<int>(x))) continue;
                for (std::size_t y = 0; y < matrix[x].size(); ++y) {
                    if (matrix[x][y] < 0.5) continue;
                    ++report.high_transitions;
                    if (knowledge.domains[ch].dominant_relation(best_id[ch][x], best_id[ch][y])) ++present;
                }
            }
        }
    report.transition_fidelity =
        report.high_transitions ? static_cast<double>(present) / static_cast<double>(report.high_transitions) : 1.0;

    std::size_t top = 0;
    const int top_id = static_cast<int>(knowledge.cross.n_types()) - 1;
    for (const auto& list : s.couplings)
        for (const auto& c : list) {
            if (c.probability < 1.0) continue;
            ++report.full_couplings;
            const auto a = best_id[0][static_cast<std::size_t>(c.first)];
            const auto b = best_id[1][static_cast<std::size_t>(c.second)];
            if (knowledge.cross.correlation_between({0, a}, {1, b}) == top_id) ++top;
        }
    report.coupling_fidelity =
        report.full_couplings ? static_cast<double>(top) / static_cast<double>(report.full_couplings) : 1.0;
    return report;
}

json to_json(const OracleReport& r) {
    return {{"motif_recovery", r.motif_recovery},
            {"transition_fidelity", r.transition_fidelity},
            {"coupling_fidelity", r.coupling_fidelity},
            {"high_transitions", r.high_transitions},
            {"full_couplings", r.full_couplings}};
}

}  // namespace cand
