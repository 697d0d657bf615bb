#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "commands.hpp"
#include "cand/artifact.hpp"
#include "cand/config.hpp"
#include "cand/error.hpp"
#include "cand/model_io.hpp"
#include "cand/series_io.hpp"

using namespace cand;
namespace fs = std::filesystem;

namespace {

Assignment at(int concept_id, int minute) { return {concept_id, static_cast<std::size_t>(minute / 15), minute, 1.0}; }

TrainedModel tiny_model() {
    std::array<SetAssignments, 2> a;
    a[0] = {{at(1, 0), at(2, 15), at(3, 60)}, {at(2, 0), at(1, 30), at(3, 45)}};
    a[1] = {{at(5, 0), at(6, 30)}, {at(6, 0), at(7, 15)}};
    const auto bundle = build_knowledge(a, {"X1", "X2"}, {IntervalRelations{}, 3});
    TrainConfig c;
    c.dim = 4;
    c.epochs = 3;
    c.negatives = 2;
    c.walks_per_concept = 2;
    c.walk_length = 3;
    c.mf_dim = 3;
    c.seed = 9;
    return make_trained_model(train(bundle, c), bundle, c);
}

std::string binary_of(const TrainedModel& m) {
    std::ostringstream out(std::ios::binary);
    write_model_binary(out, m);
    return out.str();
}

int call(std::vector<std::string> args) {
    args.insert(args.begin(), "cand");
    std::vector<char*> argv;
    for (auto& s : args) argv.push_back(s.data());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    fs::path path = fs::temp_directory_path() / ("cand_cli_" + std::to_string(::getpid()));
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("config json round trip and strict keys") {
    const auto desk = desk_preset();
    const auto back = config_from_json(to_json(desk), full_preset());
    CHECK(to_json(back) == to_json(desk));
    CHECK(back.train.dim == 32);

    const auto partial = config_from_json(nlohmann::json{{"train", {{"epochs", 7}}}}, desk);
    CHECK(partial.train.epochs == 7);
    CHECK(partial.train.dim == desk.train.dim);

    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"train", {{"bogus", 1}}}}, desk), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"colour", 1}}, desk), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"seed", "seven"}}, desk), ConfigError);
    CHECK_THROWS_AS(preset("laptop"), ConfigError);
    CHECK(to_json(synth_config_from_json(to_json(desk.synth))) == to_json(desk.synth));
    CHECK(to_json(train_config_from_json(to_json(desk.train))) == to_json(desk.train));
}

TEST_CASE("model json and binary round trips are exact") {
    const auto model = tiny_model();
    const auto from_json = model_from_json(to_json(model));
    CHECK(to_json(from_json) == to_json(model));
    CHECK(from_json.store == model.store);

    const auto bytes = binary_of(model);
    CHECK(bytes.rfind("CANDMDL1", 0) == 0);
    std::istringstream in(bytes, std::ios::binary);
    const auto from_binary = read_model_binary(in);
    CHECK(from_binary.store == model.store);
    CHECK(binary_of(from_binary) == bytes);
    CHECK(to_json(from_binary) == to_json(model));

    std::istringstream cut(bytes.substr(0, bytes.size() / 2), std::ios::binary);
    CHECK_THROWS_AS(read_model_binary(cut), ArtifactError);
    std::istringstream junk("not a model", std::ios::binary);
    CHECK_THROWS_AS(read_model_binary(junk), ArtifactError);

    std::ostringstream csv;
    write_strengths_csv(csv, model);
    CHECK(csv.str().rfind("head,tail,correlation,view,strength\n", 0) == 0);
}

TEST_CASE("command line pipeline and exit codes") {
    const TempDir dir;
    auto config = desk_preset();
    config.synth.n_sets = 12;
    config.synth.length = 120;
    config.shapelets.counts = {6, 6};
    config.train.dim = 4;
    config.train.epochs = 2;
    config.train.walks_per_concept = 2;
    config.train.mf_dim = 3;
    write_json_file(dir / "config.json", to_json(config));
    const std::vector<std::string> base{"--config", dir / "config.json", "-q"};
    auto with = [&](std::vector<std::string> extra) {
        auto args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        return call(args);
    };
    const std::vector<std::string> artifacts{"--series", dir / "series.csv", "--labels", dir / "labels.csv",
                                             "--shapelets", dir / "shapelets.json", "--knowledge", dir / "ks.json",
                                             "--model", dir / "model.bin"};
    auto plus = [&](std::vector<std::string> extra) {
        auto args = artifacts;
        args.insert(args.end(), extra.begin(), extra.end());
        return args;
    };

    REQUIRE(with({"synth", "--out-dir", dir.path.string()}) == 0);
    CHECK(fs::exists(dir / "truth.json"));
    REQUIRE(with({"shapelets", "--series", dir / "series.csv", "--out", dir / "shapelets.json"}) == 0);
    REQUIRE(with({"build-ks", "--series", dir / "series.csv", "--shapelets", dir / "shapelets.json", "--out",
                  dir / "ks.json"}) == 0);
    REQUIRE(with({"train", "--knowledge", dir / "ks.json", "--out", dir / "model.bin"}) == 0);
    auto fit = plus({"--out", dir / "clf.json"});
    fit.insert(fit.begin(), "fit");
    REQUIRE(with(fit) == 0);
    auto mon = plus({"--classifier", dir / "clf.json", "--out", dir / "monitor.jsonl"});
    mon.insert(mon.begin(), "monitor");
    CHECK(with(mon) == 0);
    std::ifstream lines(dir / "monitor.jsonl");
    std::set<std::string> sets;
    for (std::string line; std::getline(lines, line);) {
        const auto j = nlohmann::json::parse(line);
        sets.insert(j.at("set_id").get<std::string>());
        CHECK(j.at("t").get<std::size_t>() % 30 == 0);
    }
    CHECK(sets.size() == 12);

    auto rep = plus({"--out", dir / "features.csv", "--prefixes"});
    rep.insert(rep.begin(), "represent");
    CHECK(with(rep) == 0);
    auto trace = plus({"--classifier", dir / "clf.json", "--set", "S01", "--out", dir / "trace.jsonl",
                       "--strengths-csv", dir / "strengths.csv"});
    trace.insert(trace.begin(), "trace");
    CHECK(with(trace) == 0);
    CHECK(fs::file_size(dir / "strengths.csv") > 0);
    CHECK(with({"evaluate", "--series", dir / "series.csv", "--labels", dir / "labels.csv", "--out",
                dir / "metrics.json", "--folds", "2", "--prune", "0,0.5", "--delay-start", "0,0.5",
                "--shuffled-control"}) == 0);
    const auto metrics = read_json_file(dir / "metrics.json");
    CHECK(metrics.dump().find("shuffled") != std::string::npos);

    // artifact problems exit with 2, validation problems with 3
    CHECK(with({"train", "--knowledge", dir / "missing.json", "--out", dir / "m.bin"}) == 2);
    CHECK(with({"train", "--knowledge", dir / "shapelets.json", "--out", dir / "m.bin"}) == 2);
    CHECK(call({"synth"}) == 3);
    CHECK(call({"--preset", "laptop", "synth", "--out-dir", dir / "x"}) == 3);
    write_json_file(dir / "bad.json", nlohmann::json{{"train", {{"bogus", 1}}}});
    CHECK(call({"--config", dir / "bad.json", "synth", "--out-dir", dir / "x"}) == 3);
}
