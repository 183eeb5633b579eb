// End-to-end coverage of the installed command-line surface: file formats,
// exit codes and reproducibility of the shipped binary.
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "graspdec/io.hpp"

using namespace graspdec;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("graspdec_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args, const fs::path& log) {
    std::string command = std::string(GRASPDEC_CLI_PATH) + " " + args + " >" + log.string() +
                          " 2>&1";
    int status = std::system(command.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

std::set<std::string> dir_digests(const fs::path& dir) {
    std::set<std::string> digests;
    for (const auto& entry : fs::directory_iterator(dir)) {
        digests.insert(entry.path().filename().string() + ":" + sha256_file(entry.path()));
    }
    return digests;
}

}  // namespace

TEST_CASE("simulate writes a 50-trial session with a manifest") {
    TempDir dir;
    fs::path out = dir.path / "sess";
    REQUIRE(run_cli("simulate -o " + out.string() + " --seed 11", dir.path / "log.txt") == 0);

    for (const char* name :
         {"recording.csv", "meta.json", "events.jsonl", "ground_truth.json", "manifest.json"}) {
        CHECK(fs::exists(out / name));
    }

    EventLog events = read_events_jsonl(out / "events.jsonl");
    std::set<int> trials;
    for (const auto& ev : events) {
        if (ev.trial_id >= 0) trials.insert(ev.trial_id);
    }
    CHECK(trials.size() == 50);

    json manifest = read_json_file(out / "manifest.json");
    CHECK(manifest.at("command") == "simulate");
    CHECK(manifest.at("seed") == 11);
    CHECK(manifest.at("outputs").size() == 4);
}

TEST_CASE("simulate is byte-reproducible under a fixed seed") {
    TempDir dir;
    fs::path a = dir.path / "a", b = dir.path / "b";
    REQUIRE(run_cli("simulate -o " + a.string() + " --seed 21", dir.path / "log.txt") == 0);
    REQUIRE(run_cli("simulate -o " + b.string() + " --seed 21", dir.path / "log.txt") == 0);
    CHECK(dir_digests(a) == dir_digests(b));

    fs::path c = dir.path / "c";
    REQUIRE(run_cli("simulate -o " + c.string() + " --seed 22", dir.path / "log.txt") == 0);
    CHECK(dir_digests(a) != dir_digests(c));
}

TEST_CASE("simulate with a missing output parent exits 3") {
    TempDir dir;
    fs::path out = dir.path / "no" / "such" / "parent";
    CHECK(run_cli("simulate -o " + out.string() + " --seed 1", dir.path / "log.txt") == 3);
}

TEST_CASE("simulate with a malformed config exits 2") {
    TempDir dir;
    write_text_file(dir.path / "config.json", "{broken");
    CHECK(run_cli("simulate " + (dir.path / "config.json").string() + " -o " +
                      (dir.path / "out").string(),
                  dir.path / "log.txt") == 2);
}

TEST_CASE("pipeline restricted to alpha emits exactly one band") {
    TempDir dir;
    fs::path sess = dir.path / "sess", out = dir.path / "out";
    REQUIRE(run_cli("simulate -o " + sess.string() + " --seed 31", dir.path / "log.txt") == 0);
    REQUIRE(run_cli("pipeline " + sess.string() + " -o " + out.string() +
                        " --bands alpha --seed 31",
                    dir.path / "log.txt") == 0);

    SubjectRunResult result = subject_result_from_json(read_json_file(out / "accuracy.json"));
    REQUIRE(result.entries.size() == 2);  // observation + movement
    for (const auto& [band, phase, acc] : result.entries) {
        CHECK(band == BandName::Alpha);
        CHECK(acc >= 0.0);
        CHECK(acc <= 100.0);
    }
    CHECK(fs::exists(out / "csp_alpha_observation.json"));
    CHECK(fs::exists(out / "csp_alpha_movement.json"));
    CHECK(!fs::exists(out / "csp_beta_observation.json"));
    CHECK(fs::exists(out / "features.csv"));
    CHECK(fs::exists(out / "filters.json"));
}

TEST_CASE("pipeline rejects a corrupted recording with a located diagnostic") {
    TempDir dir;
    fs::path sess = dir.path / "sess";
    REQUIRE(run_cli("simulate -o " + sess.string() + " --seed 41", dir.path / "log.txt") == 0);

    // corrupt the Pz value (field 5 after the sample column) of sample 499
    std::ifstream in(sess / "recording.csv");
    std::string line, content;
    int row = 0;
    while (std::getline(in, line)) {
        if (row == 500) {  // header + 500 rows => sample index 499
            std::vector<std::string> fields;
            std::string field;
            for (char ch : line) {
                if (ch == ',') {
                    fields.push_back(field);
                    field.clear();
                } else {
                    field += ch;
                }
            }
            fields.push_back(field);
            fields[5] = "nan";
            line.clear();
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (i > 0) line += ",";
                line += fields[i];
            }
        }
        content += line + "\n";
        ++row;
    }
    in.close();
    write_text_file(sess / "recording.csv", content);

    fs::path log = dir.path / "log.txt";
    CHECK(run_cli("pipeline " + sess.string() + " -o " + (dir.path / "out").string(), log) == 2);
    std::string message = slurp(log);
    CHECK(message.find("Pz") != std::string::npos);
    CHECK(message.find("499") != std::string::npos);  // sample index within the channel row
}

TEST_CASE("report renders identical numbers in csv and md") {
    TempDir dir;
    for (int s = 1; s <= 2; ++s) {
        SubjectRunResult result;
        result.subject_id = "s" + std::to_string(s);
        result.entries = {{BandName::Alpha, Phase::Observation, 80.0},
                          {BandName::Alpha, Phase::Movement, 60.0}};
        write_json_file(dir.path / ("acc" + std::to_string(s) + ".json"),
                        subject_result_to_json(result));
    }
    std::string files = (dir.path / "acc1.json").string() + " " + (dir.path / "acc2.json").string();

    fs::path out_csv = dir.path / "out_csv", out_md = dir.path / "out_md";
    REQUIRE(run_cli("report " + files + " --format csv -o " + out_csv.string(),
                    dir.path / "log.txt") == 0);
    REQUIRE(run_cli("report " + files + " --format md -o " + out_md.string(),
                    dir.path / "log.txt") == 0);

    std::string csv = slurp(out_csv / "report.csv");
    std::string md = slurp(out_md / "report.md");
    CHECK(csv.find("80") != std::string::npos);
    CHECK(csv.find("60") != std::string::npos);
    CHECK(md.find("**80**") != std::string::npos);
    CHECK(md.find("**60**") != std::string::npos);
    CHECK(fs::exists(out_csv / "manifest.json"));
}

TEST_CASE("report rejects mismatched subject columns") {
    TempDir dir;
    SubjectRunResult a, b;
    a.subject_id = "a";
    a.entries = {{BandName::Alpha, Phase::Observation, 70.0}};
    b.subject_id = "b";
    b.entries = {{BandName::Beta, Phase::Observation, 70.0}};
    write_json_file(dir.path / "a.json", subject_result_to_json(a));
    write_json_file(dir.path / "b.json", subject_result_to_json(b));
    CHECK(run_cli("report " + (dir.path / "a.json").string() + " " + (dir.path / "b.json").string(),
                  dir.path / "log.txt") == 2);
}

TEST_CASE("topomap exports bounded reproducible grids and honors the minimum resolution") {
    TempDir dir;
    fs::path sess = dir.path / "sess", out = dir.path / "out";
    REQUIRE(run_cli("simulate -o " + sess.string() + " --seed 51", dir.path / "log.txt") == 0);
    REQUIRE(run_cli("pipeline " + sess.string() + " -o " + out.string() + " --bands alpha",
                    dir.path / "log.txt") == 0);

    fs::path maps_a = dir.path / "maps_a", maps_b = dir.path / "maps_b";
    std::string model = (out / "csp_alpha_observation.json").string();
    REQUIRE(run_cli("topomap " + model + " -o " + maps_a.string() + " --resolution 64",
                    dir.path / "log.txt") == 0);
    REQUIRE(run_cli("topomap " + model + " -o " + maps_b.string() + " --resolution 64",
                    dir.path / "log.txt") == 0);
    CHECK(dir_digests(maps_a) == dir_digests(maps_b));

    json index = read_json_file(maps_a / "maps_index.json");
    CHECK(index.at("maps").size() == 8);
    int selected = 0;
    for (const auto& entry : index.at("maps")) selected += entry.at("selected").get<bool>() ? 1 : 0;
    CHECK(selected == 4);

    json grid = read_json_file(maps_a / "csp_map_0.json");
    for (const auto& grid_row : grid.at("values")) {
        for (const auto& cell : grid_row) {
            if (cell.is_null()) continue;
            CHECK(cell.get<double>() >= -0.5);
            CHECK(cell.get<double>() <= 0.5);
        }
    }

    CHECK(run_cli("topomap " + model + " -o " + (dir.path / "maps_c").string() + " --resolution 4",
                  dir.path / "log.txt") == 2);
    CHECK(run_cli("topomap " + (dir.path / "missing.json").string() + " -o " +
                      (dir.path / "maps_d").string(),
                  dir.path / "log.txt") == 3);
}
