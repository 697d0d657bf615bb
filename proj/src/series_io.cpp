#include "cand/series_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cand/error.hpp"

namespace cand {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    for (auto& f : fields) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
        while (!f.empty() && f.front() == ' ') f.erase(f.begin());
    }
    return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw DataError("line " + std::to_string(line_no) + ": cannot parse number '" + text + "'");
    return value;
}

long parse_long(const std::string& text, std::size_t line_no) {
    long value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw DataError("line " + std::to_string(line_no) + ": cannot parse integer '" + text + "'");
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArtifactError("cannot open " + path.string() + " for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArtifactError("cannot open " + path.string() + " for writing");
    return out;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ArtifactError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = open_output(path);
    out << j.dump(1) << '\n';
}

Dataset read_series_csv(std::istream& in, const std::vector<std::string>& channels) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("series CSV is empty");
    if (split_csv_line(line) != std::vector<std::string>{"set_id", "channel", "minute", "value"})
        throw DataError("series CSV header must be set_id,channel,minute,value");

    // set_id -> channel index -> minute -> value, preserving first-seen set order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::map<long, double>>> readings;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4) throw DataError("line " + std::to_string(line_no) + ": expected 4 fields");
        const auto ch = std::find(channels.begin(), channels.end(), f[1]);
        if (ch == channels.end()) throw DataError("line " + std::to_string(line_no) + ": unknown channel " + f[1]);
        auto [it, fresh] = readings.try_emplace(f[0], channels.size());
        if (fresh) order.push_back(f[0]);
        const long minute = parse_long(f[2], line_no);
        if (minute < 0) throw DataError("line " + std::to_string(line_no) + ": negative minute");
        if (!it->second[static_cast<std::size_t>(ch - channels.begin())]
                 .emplace(minute, parse_double(f[3], line_no))
                 .second)
            throw DataError("line " + std::to_string(line_no) + ": duplicate reading");
    }

    Dataset out;
    for (const auto& id : order) {
        MeasurementSet set{id, {}, Label::unknown};
        for (std::size_t c = 0; c < channels.size(); ++c) {
            const auto& minutes = readings[id][c];
            if (minutes.empty()) throw DataError("set " + id + " lacks channel " + channels[c]);
            TimeSeries ts{id, channels[c], {}};
            long expect = 0;
            for (const auto& [minute, value] : minutes) {
                if (minute != expect) throw DataError("set " + id + "/" + channels[c] + ": minutes must be 0..T-1");
                ts.values.push_back(value);
                ++expect;
            }
            set.channels.push_back(std::move(ts));
        }
        validate(set);
        out.push_back(std::move(set));
    }
    return out;
}

Dataset read_series_csv(const std::filesystem::path& path, const std::vector<std::string>& channels) {
    auto in = open_input(path);
    return read_series_csv(in, channels);
}

void write_series_csv(std::ostream& out, const Dataset& dataset) {
    out << "set_id,channel,minute,value\n";
    for (const auto& set : dataset)
        for (const auto& ch : set.channels)
            for (std::size_t t = 0; t < ch.values.size(); ++t)
                out << set.set_id << ',' << ch.channel << ',' << t << ',' << format_double(ch.values[t]) << '\n';
}

void write_series_csv(const std::filesystem::path& path, const Dataset& dataset) {
    auto out = open_output(path);
    write_series_csv(out, dataset);
}

std::map<std::string, Label> read_labels_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"set_id", "label"})
        throw DataError("labels CSV header must be set_id,label");
    std::map<std::string, Label> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 2) throw DataError("labels line " + std::to_string(line_no) + ": expected 2 fields");
        const Label label = parse_label(f[1]);
        if (label == Label::unknown)
            throw DataError("labels line " + std::to_string(line_no) + ": label must be deteriorating or recovering");
        labels[f[0]] = label;
    }
    return labels;
}

std::map<std::string, Label> read_labels_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_labels_csv(in);
}

void write_labels_csv(std::ostream& out, const Dataset& dataset) {
    out << "set_id,label\n";
    for (const auto& set : dataset)
        if (set.label != Label::unknown) out << set.set_id << ',' << to_string(set.label) << '\n';
}

void write_labels_csv(const std::filesystem::path& path, const Dataset& dataset) {
    auto out = open_output(path);
    write_labels_csv(out, dataset);
}

void apply_labels(Dataset& dataset, const std::map<std::string, Label>& labels) {
    for (auto& set : dataset)
        if (auto it = labels.find(set.set_id); it != labels.end()) set.label = it->second;
}

nlohmann::json to_json(const ShapeletDictionary& dict) {
    nlohmann::json shapelets = nlohmann::json::array();
    for (const auto& s : dict.shapelets) shapelets.push_back({{"id", s.concept_id}, {"values", s.values}});
    return {{"channel", dict.channel}, {"length", dict.length}, {"shapelets", std::move(shapelets)}};
}

ShapeletDictionary dictionary_from_json(const nlohmann::json& j) {
    try {
        ShapeletDictionary dict;
        dict.channel = j.at("channel").get<std::string>();
        for (const auto& s : j.at("shapelets"))
            dict.shapelets.push_back({s.at("id").get<int>(), s.at("values").get<std::vector<double>>()});
        if (j.contains("length"))
            dict.length = j.at("length").get<std::size_t>();
        else if (!dict.shapelets.empty())
            dict.length = dict.shapelets.front().values.size();
        validate(dict);
        return dict;
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError(std::string("malformed shapelet dictionary: ") + e.what());
    }
}

}  // namespace cand
