// SPDX-License-Identifier: Apache-2.0
//
// subthz-chan: sub-THz channel measurement post-processing and drop synthesis
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "subthz/report.hpp"
#include "subthz/synthesis.hpp"
#include "tmpdir.hpp"

using namespace subthz;
using Catch::Approx;

namespace {

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string("\"") + SUBTHZ_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::vector<std::string> lines_of(const std::string &s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("report bundle on a synthetic campaign") {
    TempDir tmp;
    const auto manifest = render_campaign(SynthesisParams{}, 13, 42, tmp.path() / "campaign");
    RunConfig cfg;
    cfg.manifest = manifest;
    cfg.out_dir = tmp.path() / "report";
    cfg.seed = 42;
    const auto bundle = run_pipeline(cfg);

    for (const char *name : {"table_delay.csv", "table_angular.csv", "pathloss_scatter.csv", "report.json",
                             "xpd_boresight.csv", "xpd_reflection.csv"}) {
        REQUIRE(bundle.count(name));
        CHECK(slurp(cfg.out_dir / name) == bundle.at(name));
    }

    const auto delay = lines_of(bundle.at("table_delay.csv"));
    REQUIRE(delay.size() == 9);
    CHECK(delay[0] == "Delay Spread (ns),Min,Max,Mean,Median,90%");
    CHECK(delay[1].rfind("Omni RMSDS-20 dB,", 0) == 0);
    CHECK(delay[2].rfind("Omni RMSDS-30 dB,", 0) == 0);
    CHECK(delay[8].rfind("Dir MDS-30 dB,", 0) == 0);
    const auto angular = lines_of(bundle.at("table_angular.csv"));
    REQUIRE(angular.size() == 9);
    CHECK(angular[1].rfind("# AOA SL-20 dB,", 0) == 0);
    // Fixed four-decimal numerics.
    CHECK(delay[1].find('.') != std::string::npos);
    for (std::size_t k = 1; k < delay.size(); ++k) {
        std::istringstream row(delay[k]);
        std::string cell;
        std::getline(row, cell, ',');
        while (std::getline(row, cell, ',')) {
            const auto dot = cell.find('.');
            REQUIRE(dot != std::string::npos);
            REQUIRE(cell.size() - dot - 1 == 4);
        }
    }

    const auto j = nlohmann::json::parse(bundle.at("report.json"));
    CHECK(j["config"]["manifest"] == "manifest.json");
    CHECK(j["config"]["thresholds_db"] == nlohmann::json::array({20.0, 30.0}));
    CHECK(j["config"]["seed"] == 42);
    REQUIRE(j["inputs"].size() == 27);
    CHECK(j["inputs"][0]["file"] == "manifest.json");
    CHECK(j["inputs"][0]["sha256"] == sha256_hex(slurp(manifest)));
    CHECK(j["inputs"][0]["sha256"].get<std::string>().size() == 64);
    CHECK(j["n_locations"]["VV"] == 13);
    CHECK(j["pathloss"]["omni"]["VV"]["n_samples"] == 11);
    CHECK(j["pathloss"]["omni"]["VV"]["ple"].get<double>() == Approx(1.86).margin(0.3));
    CHECK(j["pathloss"]["omni"]["CIX"]["xpd_db"].is_number());
    CHECK(j["delay"].size() == 2);
    CHECK(j["angular"].size() == 2);
    CHECK(j["xpd"].is_array());
}

TEST_CASE("report honours a single threshold and format selection") {
    TempDir tmp;
    const auto manifest = render_campaign(SynthesisParams{}, 13, 7, tmp.path() / "campaign");
    RunConfig cfg;
    cfg.manifest = manifest;
    cfg.out_dir = tmp.path() / "report";
    cfg.thresholds_db = {30.0};
    const auto bundle = run_pipeline(cfg);
    const auto delay = bundle.at("table_delay.csv");
    CHECK(delay.find("20 dB") == std::string::npos);
    CHECK(lines_of(delay).size() == 5);
    CHECK(lines_of(bundle.at("table_angular.csv")).size() == 5);
    CHECK(nlohmann::json::parse(bundle.at("report.json"))["delay"].size() == 1);

    cfg.emit_csv = false;
    cfg.out_dir = tmp.path() / "json_only";
    const auto json_only = run_pipeline(cfg);
    CHECK(json_only.size() == 1);
    CHECK(json_only.count("report.json"));

    cfg.emit_json = false;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg.emit_json = true;
    cfg.thresholds_db = {};
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg.thresholds_db = {-3.0};
    CHECK_THROWS_AS(cfg.validate(), validation_error);
}

TEST_CASE("report bundle is byte-identical across reruns") {
    TempDir tmp;
    const auto m1 = render_campaign(SynthesisParams{}, 13, 42, tmp.path() / "a");
    const auto m2 = render_campaign(SynthesisParams{}, 13, 42, tmp.path() / "b");
    for (const auto &entry : std::filesystem::directory_iterator(tmp.path() / "a"))
        REQUIRE(slurp(entry.path()) == slurp(tmp.path() / "b" / entry.path().filename()));
    RunConfig cfg;
    cfg.manifest = m1;
    cfg.out_dir = tmp.path() / "r1";
    const auto r1 = run_pipeline(cfg);
    cfg.manifest = m2;
    cfg.out_dir = tmp.path() / "r2";
    const auto r2 = run_pipeline(cfg);
    CHECK(r1 == r2);
}

TEST_CASE("fixed4 formatting") {
    CHECK(fixed4(1.0) == "1.0000");
    CHECK(fixed4(-0.00001) == "0.0000");
    CHECK(fixed4(103.92344) == "103.9234");
    CHECK(threshold_label(20.0) == "20 dB");
    CHECK(threshold_label(22.5) == "22.5 dB");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("CLI subcommands and exit codes") {
    TempDir tmp;
    const auto dir = tmp.path();
    const auto m = (dir / "c" / "manifest.json").string();

    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("report --out " + (dir / "x").string()) == 2);
    CHECK(run_cli("--help") == 0);

    REQUIRE(run_cli("synth --n 13 --seed 42 --out " + (dir / "c").string()) == 0);
    CHECK(std::filesystem::exists(m));
    CHECK(run_cli("ingest --manifest " + m) == 0);
    CHECK(run_cli("fit pathloss --manifest " + m + " --pol VV --kind omni") == 0);
    CHECK(run_cli("fit pathloss --manifest " + m + " --pol VH --kind omni --out " + (dir / "fit").string()) == 0);
    CHECK(std::filesystem::exists(dir / "fit" / "fit_VH_omni.json"));
    CHECK(run_cli("stats delay --manifest " + m + " --threshold-db 30") == 0);
    CHECK(run_cli("stats angular --manifest " + m) == 0);
    CHECK(run_cli("pas dump --manifest " + m + " --tx TX1 --rx RX001 --side AOA") == 0);
    CHECK(run_cli("pas dump --manifest " + m + " --tx TX9 --rx RX001") == 2);
    CHECK(run_cli("xpd report --manifest " + m) == 0);
    CHECK(run_cli("report --manifest " + m + " --seed 42 --out " + (dir / "r").string()) == 0);
    CHECK(std::filesystem::exists(dir / "r" / "report.json"));
    CHECK(run_cli("report --manifest " + m + " --format json --out " + (dir / "rj").string()) == 0);
    CHECK_FALSE(std::filesystem::exists(dir / "rj" / "table_delay.csv"));

    // The library pipeline and the CLI write the same bundle.
    RunConfig cfg;
    cfg.manifest = m;
    cfg.seed = 42;
    cfg.out_dir = dir / "lib";
    for (const auto &[name, content] : run_pipeline(cfg)) CHECK(slurp(dir / "r" / name) == content);

    // I/O: missing manifest.
    CHECK(run_cli("report --manifest " + (dir / "nope.json").string() + " --out " + (dir / "y").string()) == 4);

    // Degenerate fit: one location leaves a single path-loss sample.
    REQUIRE(run_cli("synth --n 1 --seed 3 --out " + (dir / "one").string()) == 0);
    CHECK(run_cli("report --manifest " + (dir / "one" / "manifest.json").string() + " --out " + (dir / "z").string()) == 3);

    // Validation: bad field in the manifest and a bad parameter file.
    auto text = slurp(m);
    const auto pos = text.find("\"VV\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 4, "\"XX\"");
    detail::write_file(dir / "c" / "bad.json", text);
    CHECK(run_cli("ingest --manifest " + (dir / "c" / "bad.json").string()) == 2);
    detail::write_file(dir / "params.json", R"({"lobe_count_law": {"mean": 9, "min": 1, "max": 7}})");
    CHECK(run_cli("synth --params " + (dir / "params.json").string() + " --out " + (dir / "w").string()) == 2);
    detail::write_file(dir / "params2.json", "{not json");
    CHECK(run_cli("synth --params " + (dir / "params2.json").string() + " --out " + (dir / "w").string()) == 2);
}
