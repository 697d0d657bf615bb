#include "cand/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "cand/artifact.hpp"
#include "cand/config.hpp"
#include "cand/error.hpp"
#include "cand/series_io.hpp"

namespace cand {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'C', 'A', 'N', 'D', 'M', 'D', 'L', '1'};

json complex_json(std::span<const double> v) {
    const std::size_t d = v.size() / 2;
    return {{"re", std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(d))},
            {"im", std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(d), v.end())}};
}

void read_complex(const json& j, std::span<double> out) {
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    const std::size_t d = out.size() / 2;
    if (re.size() != d || im.size() != d) throw ArtifactError("embedding vector has the wrong dimension");
    std::copy(re.begin(), re.end(), out.begin());
    std::copy(im.begin(), im.end(), out.begin() + static_cast<std::ptrdiff_t>(d));
}

std::string key(const std::string& channel, int id) { return channel + ":" + std::to_string(id); }

std::pair<std::string, int> split_key(const std::string& k) {
    const auto colon = k.rfind(':');
    if (colon == std::string::npos) throw ArtifactError("malformed embedding key '" + k + "'");
    try {
        return {k.substr(0, colon), std::stoi(k.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ArtifactError("malformed embedding key '" + k + "'");
    }
}

json history_json(const std::vector<EpochLog>& history) {
    json out = json::array();
    for (const auto& e : history)
        out.push_back({{"epoch", e.epoch}, {"cross_loss", e.cross_loss}, {"domain_loss", e.domain_loss},
                       {"infer_loss", e.infer_loss}, {"ranks", e.ranks}});
    return out;
}

std::vector<EpochLog> history_from_json(const json& j) {
    std::vector<EpochLog> out;
    for (const auto& e : j)
        out.push_back({e.at("epoch").get<std::size_t>(), e.at("cross_loss").get<double>(),
                       e.at("domain_loss").get<double>(), e.at("infer_loss").get<double>(),
                       e.at("ranks").get<std::size_t>()});
    return out;
}

// Header fields shared by both encodings (everything but the big arrays).
json header_json(const TrainedModel& m) {
    json pairs = json::array();
    for (const auto& [h, t] : m.pairs) pairs.push_back({h, t});
    return {{"config", to_json(m.config)},
            {"channels", m.channels},
            {"pairs", pairs},
            {"pair_correlation", m.pair_correlation},
            {"history", history_json(m.history)}};
}

void read_header(const json& j, TrainedModel& m) {
    m.config = train_config_from_json(j.at("config"));
    m.channels = j.at("channels").get<std::array<std::string, 2>>();
    for (const auto& p : j.at("pairs")) m.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    m.pair_correlation = j.at("pair_correlation").get<std::vector<int>>();
    m.history = history_from_json(j.at("history"));
    if (m.pairs.size() != m.pair_correlation.size()) throw ArtifactError("model pair tables differ in length");
}

void finish(TrainedModel& m) {
    if (m.mf.pair_count != m.pairs.size()) throw ArtifactError("MF pair count does not match the model's pairs");
    if (m.mf.type_count != kViewCount * m.store.correlation_count())
        throw ArtifactError("MF type count does not match the correlation count");
    m.strengths = compute_strengths(m.mf, m.pair_correlation, m.store.correlation_count(), m.config.strength_scope);
}

template <typename T>
void put(std::ostream& out, T value) {
    static_assert(std::endian::native == std::endian::little, "binary models assume a little-endian host");
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw ArtifactError("truncated binary model");
    return value;
}

void put_doubles(std::ostream& out, std::span<const double> v) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void get_doubles(std::istream& in, std::span<double> v) {
    if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double))))
        throw ArtifactError("truncated binary model");
}

}  // namespace

TrainedModel make_trained_model(TrainResult result, const KnowledgeBundle& knowledge, const TrainConfig& config) {
    TrainedModel m;
    m.config = config;
    m.channels = {knowledge.domains[0].channel, knowledge.domains[1].channel};
    for (const auto& t : knowledge.cross.triplets) {
        m.pairs.emplace_back(t.head, t.tail);
        m.pair_correlation.push_back(t.correlation);
    }
    m.store = std::move(result.store);
    m.mf = std::move(result.mf);
    m.strengths = std::move(result.strengths);
    m.history = std::move(result.history);
    return m;
}

json to_json(const TrainedModel& m) {
    json doc = artifact_header("model");
    doc.update(header_json(m));
    doc["dim"] = m.store.dim();
    json concepts = json::object(), relations = json::object(), correlations = json::object();
    for (std::size_t c = 0; c < 2; ++c) {
        for (int id : m.store.concepts(c)) concepts[key(m.channels[c], id)] = complex_json(m.store.vector(m.store.concept_slot(c, id)));
        for (std::size_t r = 0; r < m.store.relation_count(c); ++r)
            relations[key(m.channels[c], static_cast<int>(r))] =
                complex_json(m.store.vector(m.store.relation_slot(c, static_cast<int>(r))));
    }
    for (std::size_t a = 0; a < m.store.correlation_count(); ++a)
        correlations[std::to_string(a)] = complex_json(m.store.vector(m.store.correlation_slot(static_cast<int>(a))));
    doc["concepts"] = std::move(concepts);
    doc["relations"] = std::move(relations);
    doc["correlations"] = std::move(correlations);
    json pairs = json::array(), types = json::array();
    for (std::size_t i = 0; i < m.mf.pair_count; ++i) pairs.push_back(std::vector<double>(m.mf.pair(i).begin(), m.mf.pair(i).end()));
    for (std::size_t i = 0; i < m.mf.type_count; ++i) types.push_back(std::vector<double>(m.mf.type(i).begin(), m.mf.type(i).end()));
    doc["mf"] = {{"dim", m.mf.dim}, {"pairs", pairs}, {"types", types}};
    return doc;
}

TrainedModel model_from_json(const json& doc) {
    check_artifact(doc, "model");
    TrainedModel m;
    try {
        read_header(doc, m);
        const auto dim = doc.at("dim").get<std::size_t>();
        std::array<std::vector<int>, 2> ids;
        std::array<std::size_t, 2> rel_counts{0, 0};
        auto channel_index = [&](const std::string& name) -> std::size_t {
            if (name == m.channels[0]) return 0;
            if (name == m.channels[1]) return 1;
            throw ArtifactError("embedding key names unknown channel '" + name + "'");
        };
        for (const auto& [k, v] : doc.at("concepts").items()) {
            const auto [ch, id] = split_key(k);
            ids[channel_index(ch)].push_back(id);
        }
        for (auto& list : ids) std::sort(list.begin(), list.end());
        for (const auto& [k, v] : doc.at("relations").items()) {
            const auto [ch, r] = split_key(k);
            auto& n = rel_counts[channel_index(ch)];
            n = std::max(n, static_cast<std::size_t>(r) + 1);
        }
        const std::size_t n_corr = doc.at("correlations").size();
        m.store = EmbeddingStore(dim, ids, rel_counts, n_corr);
        for (const auto& [k, v] : doc.at("concepts").items()) {
            const auto [ch, id] = split_key(k);
            read_complex(v, m.store.vector(m.store.concept_slot(channel_index(ch), id)));
        }
        for (const auto& [k, v] : doc.at("relations").items()) {
            const auto [ch, r] = split_key(k);
            read_complex(v, m.store.vector(m.store.relation_slot(channel_index(ch), r)));
        }
        for (std::size_t a = 0; a < n_corr; ++a)
            read_complex(doc.at("correlations").at(std::to_string(a)), m.store.vector(m.store.correlation_slot(static_cast<int>(a))));
        const auto& mf = doc.at("mf");
        m.mf.dim = mf.at("dim").get<std::size_t>();
        m.mf.pair_count = mf.at("pairs").size();
        m.mf.type_count = mf.at("types").size();
        for (const auto& row : mf.at("pairs")) {
            const auto v = row.get<std::vector<double>>();
            if (v.size() != m.mf.dim) throw ArtifactError("MF vector has the wrong dimension");
            m.mf.pairs.insert(m.mf.pairs.end(), v.begin(), v.end());
        }
        for (const auto& row : mf.at("types")) {
            const auto v = row.get<std::vector<double>>();
            if (v.size() != m.mf.dim) throw ArtifactError("MF vector has the wrong dimension");
            m.mf.types.insert(m.mf.types.end(), v.begin(), v.end());
        }
    } catch (const json::exception& e) {
        throw ArtifactError(std::string("malformed model artifact: ") + e.what());
    } catch (const ConfigError& e) {
        throw ArtifactError(std::string("model carries an invalid config: ") + e.what());
    }
    finish(m);
    return m;
}

void write_model_binary(std::ostream& out, const TrainedModel& m) {
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kFormatVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.store.dim()));
    json header = header_json(m);
    header["concepts"] = {m.store.concepts(0), m.store.concepts(1)};
    header["relation_counts"] = {m.store.relation_count(0), m.store.relation_count(1)};
    header["correlations"] = m.store.correlation_count();
    header["mf"] = {m.mf.dim, m.mf.pair_count, m.mf.type_count};
    const std::string text = header.dump();
    put<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_doubles(out, m.store.parameters());
    put_doubles(out, m.mf.pairs);
    put_doubles(out, m.mf.types);
}

TrainedModel read_model_binary(std::istream& in) {
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw ArtifactError("not a binary model (bad magic)");
    const auto version = get<std::uint32_t>(in);
    if (version != static_cast<std::uint32_t>(kFormatVersion))
        throw ArtifactError("unsupported binary model version " + std::to_string(version));
    const auto dim = get<std::uint32_t>(in);
    const auto size = get<std::uint64_t>(in);
    if (size > (1ull << 32)) throw ArtifactError("binary model header is implausibly large");
    std::string text(size, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(size))) throw ArtifactError("truncated binary model");
    TrainedModel m;
    try {
        const json header = json::parse(text);
        read_header(header, m);
        m.store = EmbeddingStore(dim, header.at("concepts").get<std::array<std::vector<int>, 2>>(),
                                 header.at("relation_counts").get<std::array<std::size_t, 2>>(),
                                 header.at("correlations").get<std::size_t>());
        const auto mf = header.at("mf").get<std::array<std::size_t, 3>>();
        m.mf.dim = mf[0];
        m.mf.pair_count = mf[1];
        m.mf.type_count = mf[2];
    } catch (const json::exception& e) {
        throw ArtifactError(std::string("malformed binary model header: ") + e.what());
    } catch (const ConfigError& e) {
        throw ArtifactError(std::string("model carries an invalid config: ") + e.what());
    }
    get_doubles(in, m.store.parameters());
    m.mf.pairs.resize(m.mf.dim * m.mf.pair_count);
    m.mf.types.resize(m.mf.dim * m.mf.type_count);
    get_doubles(in, m.mf.pairs);
    get_doubles(in, m.mf.types);
    finish(m);
    return m;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
    if (path.extension() == ".bin") {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ArtifactError("cannot write " + path.string());
        write_model_binary(out, model);
        if (!out) throw ArtifactError("failed writing " + path.string());
    } else {
        write_json_file(path, to_json(model));
    }
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArtifactError("cannot open " + path.string());
    char head[8] = {};
    in.read(head, sizeof(head));
    const bool binary = in.gcount() == 8 && std::memcmp(head, kMagic, 8) == 0;
    in.clear();
    in.seekg(0);
    if (binary) return read_model_binary(in);
    return model_from_json(read_json_file(path));
}

void write_strengths_csv(std::ostream& out, const TrainedModel& m) {
    out << "head,tail,correlation,view,strength\n";
    for (std::size_t u = 0; u < m.pairs.size(); ++u) {
        const int a = m.pair_correlation[u];
        for (std::size_t v = 0; v < kViewCount; ++v) {
            const AmbiguityType type{a, static_cast<View>(v)};
            out << m.channels[0] << ':' << m.pairs[u].first << ',' << m.channels[1] << ':' << m.pairs[u].second << ','
                << a << ',' << to_string(type.view) << ',' << format_double(m.strengths.strength(u, type)) << '\n';
        }
    }
}

}  // namespace cand
