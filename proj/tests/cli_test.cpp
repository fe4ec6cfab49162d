#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "doctest.h"
#include "hotspots/cli.hpp"
#include "hotspots/errors.hpp"

using namespace hotspots;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hotspots");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hotspots_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / ("hotspots_cli_test_" + name);
    std::ofstream(p) << content;
    return p;
}

void check_manifest_complete(const fs::path& dir) {
    const Json m = read_json(dir / "manifest.json");
    std::set<std::string> listed, on_disk;
    for (const Json& f : m.at("files")) listed.insert(f.at("path").get<std::string>());
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename() != "manifest.json") on_disk.insert(e.path().filename().string());
    CHECK(listed == on_disk);
    CHECK(m.at("config_hash") == fnv1a_hex(m.at("config").dump()));
}

}  // namespace

TEST_CASE("solve on the 10x1 rectangle reports pi^2 / 100") {
    const fs::path dir = fresh_dir("solve");
    const Result r = cli({"solve", "--domain", "rectangle", "--N", "10", "--h", "0.05", "-o", dir.string()});
    REQUIRE(r.code == kExitPass);
    const Json j = read_json(dir / "solve.json");
    CHECK(std::abs(j.at("mu1").get<double>() - 0.0986960) / 0.0986960 < 0.01);
    CHECK(j.at("seed") == 1);
    check_manifest_complete(dir);
    fs::remove_all(dir);
}

TEST_CASE("verify main_theorem on the disk passes with sqrt 2 for the orthogonal pair") {
    const fs::path dir = fresh_dir("disk");
    const Result r = cli({"verify", "--lemma", "main_theorem", "--domain", "disk", "--seed", "8", "-o", dir.string()});
    REQUIRE(r.code == kExitPass);
    CHECK(r.out.find("PASS main_theorem") != std::string::npos);
    const Json reports = read_json(dir / "reports.json");
    REQUIRE(reports.size() == 1);
    const double c = reports[0].at("fitted_constants").at("c_rep_orthogonal_pair").get<double>();
    CHECK(std::abs(c - std::numbers::sqrt2) / std::numbers::sqrt2 < 0.02);
    CHECK(reports[0].at("seed") == 8);
    check_manifest_complete(dir);
    fs::remove_all(dir);
}

TEST_CASE("malformed JSON config exits 2 and writes nothing") {
    const fs::path dir = fresh_dir("malformed");
    const fs::path cfg = write_file("malformed.json", "{\"command\": \"solve\", \"domain\": {");
    const Result r = cli({"solve", "--config", cfg.string(), "-o", dir.string()});
    CHECK(r.code == kExitInputError);
    CHECK(r.err.find("malformed JSON") != std::string::npos);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("config errors name the field and exit 2") {
    const fs::path dir = fresh_dir("bad");
    const auto expect = [&](std::vector<std::string> args, const std::string& field) {
        args.push_back("-o");
        args.push_back(dir.string());
        const Result r = cli(args);
        CHECK(r.code == kExitInputError);
        CHECK_MESSAGE(r.err.find(field) != std::string::npos, r.err);
        CHECK_FALSE(fs::exists(dir));
    };
    expect({"solve", "--domain", "rectangle", "--N", "10", "--h", "-1"}, "h:");
    expect({"solve", "--domain", "rectangle"}, "N:");
    expect({"solve"}, "domain:");
    expect({"verify", "--domain", "disk"}, "lemma:");
    expect({"verify", "--domain", "disk", "--lemma", "lemma7"}, "lemma:");
    expect({"simulate", "--domain", "disk", "--n-paths", "0"}, "n_paths:");
    expect({"simulate", "--domain", "disk", "--start", "1"}, "start:");
    expect({"verify", "--domain", "disk", "--lemma", "lemma2", "--delta", "2"}, "delta:");
    expect({"sweep", "--lemma", "nodal_width"}, "family:");
    expect({"solve", "--domain", "blob", "--N", "3"}, "domain:");
    expect({"solve", "--domain", "disk", "--backend", "gpu"}, "backend:");
    expect({"solve", "--domain", "disk", "--bogus"}, "bogus");
    expect({"frobnicate"}, "subcommand");

    const fs::path cfg = write_file("unknown_key.json", R"({"command": "solve", "domain": {"kind": "disk", "radius": 1}, "hh": 0.1})");
    expect({"solve", "--config", cfg.string()}, "hh:");
    const fs::path cfg2 = write_file("bad_domain.json", R"({"command": "solve", "domain": {"kind": "disk", "radius": -1}})");
    expect({"solve", "--config", cfg2.string()}, "domain.radius");
}

TEST_CASE("input errors found while running exit 2 without artifacts") {
    const fs::path dir = fresh_dir("input");
    // start outside the domain
    const Result r = cli({"simulate", "--domain", "rectangle", "--N", "2", "--start", "5,5", "--n-paths", "10", "-o", dir.string()});
    CHECK(r.code == kExitInputError);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("eigensolver non-convergence exits 3") {
    const fs::path dir = fresh_dir("noconv");
    const Result r = cli({"solve", "--domain", "ellipse", "--N", "4", "--eigen-max-iterations", "1", "-o", dir.string()});
    CHECK(r.code == kExitNonConvergence);
    CHECK(r.err.find("no convergence") != std::string::npos);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("failed verification exits 1 and still writes reports") {
    const fs::path dir = fresh_dir("fail");
    const Result r = cli({"verify", "--lemma", "main_theorem", "--domain", "ellipse", "--N", "4", "--c-max", "0.01", "-o", dir.string()});
    CHECK(r.code == kExitVerificationFailed);
    const Json reports = read_json(dir / "reports.json");
    CHECK(reports[0].at("pass") == false);
    check_manifest_complete(dir);
    fs::remove_all(dir);
}

TEST_CASE("flags override the config file") {
    const fs::path dir = fresh_dir("override");
    const fs::path cfg = write_file("override.json", R"({"command": "solve", "domain": {"kind": "rectangle", "length": 4, "height": 1}, "h": 0.2, "seed": 3})");
    const Result r = cli({"solve", "--config", cfg.string(), "--h", "0.1", "-o", dir.string()});
    REQUIRE(r.code == kExitPass);
    const Json j = read_json(dir / "solve.json");
    CHECK(j.at("h") == 0.1);
    CHECK(j.at("seed") == 3);
    CHECK(j.at("domain").at("length") == 4.0);
    const Json m = read_json(dir / "manifest.json");
    CHECK(m.at("config").at("h") == 0.1);
    fs::remove_all(dir);
}

TEST_CASE("identical config and seed give byte-identical CSV output across backends") {
    const fs::path a = fresh_dir("repro_a"), b = fresh_dir("repro_b"), c = fresh_dir("repro_c");
    const std::vector<std::string> base = {"simulate", "--domain", "ellipse", "--N", "3", "--k", "64", "--t", "0.5", "--n-paths", "500", "--seed", "21"};
    for (const auto& [dir, backend] : {std::pair{a, "openmp"}, std::pair{b, "openmp"}, std::pair{c, "serial"}}) {
        auto run = base;
        run.insert(run.end(), {"--backend", backend, "-o", dir.string()});
        REQUIRE(cli(run).code == kExitPass);
    }
    const std::string ea = slurp(a / "endpoints.csv");
    CHECK(ea == slurp(b / "endpoints.csv"));
    CHECK(ea == slurp(c / "endpoints.csv"));
    CHECK(std::count(ea.begin(), ea.end(), '\n') == 501);

    auto args = base;
    args.back() = "22";
    args.insert(args.end(), {"-o", b.string()});
    fs::remove_all(b);
    REQUIRE(cli(args).code == kExitPass);
    CHECK(ea != slurp(b / "endpoints.csv"));
    for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("hotspots, heat-kernel and feynman-kac commands write their tables") {
    const fs::path dir = fresh_dir("cmds");
    REQUIRE(cli({"hotspots", "--domain", "rectangle", "--N", "4", "--dump-mesh", "--dump-eigenfunction", "-o", dir.string()}).code == kExitPass);
    const Json h = read_json(dir / "hotspots.json");
    CHECK(h.at("hot_spots").at("max").size() >= 1);
    CHECK(fs::exists(dir / "mesh_nodes.csv"));
    CHECK(fs::exists(dir / "eigenfunction.csv"));
    CHECK(slurp(dir / "hotspots.csv").rfind("set,x,y,value,node\n", 0) == 0);
    check_manifest_complete(dir);
    fs::remove_all(dir);

    REQUIRE(cli({"heat-kernel", "--domain", "rectangle", "--N", "2", "--t", "0.1", "--n-paths", "2000", "--dump-endpoints", "-o",
                 dir.string()})
                .code == kExitPass);
    const std::string table = slurp(dir / "heat_kernel.csv");
    CHECK(table.rfind("cell,cx,cy,area,count,density\n", 0) == 0);
    CHECK(read_json(dir / "heat_kernel.json").at("n_paths") == 2000);
    CHECK(fs::exists(dir / "endpoints.csv"));
    check_manifest_complete(dir);
    fs::remove_all(dir);

    const Result fk = cli({"feynman-kac", "--domain", "rectangle", "--N", "3", "--t", "0.2", "--dt", "2e-4", "--n-paths", "4000", "-o",
                           dir.string()});
    CHECK((fk.code == kExitPass || fk.code == kExitVerificationFailed));
    const Json j = read_json(dir / "feynman_kac.json");
    CHECK(j.at("pass").get<bool>() == (fk.code == kExitPass));
    CHECK(j.at("n_paths") == 4000);
    fs::remove_all(dir);
}

TEST_CASE("sweep tabulates one row per family member") {
    const fs::path dir = fresh_dir("sweep");
    const Result r = cli({"sweep", "--lemma", "nodal_width", "--family", "rectangles", "--params", "4,6,8", "-o", dir.string()});
    REQUIRE(r.code == kExitPass);
    const std::string table = slurp(dir / "sweep.csv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 4);
    CHECK(table.rfind("member,domain,pass,", 0) == 0);
    const Json reports = read_json(dir / "reports.json");
    REQUIRE(reports.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(reports[i].at("seed") == path_seed(1, i));
    check_manifest_complete(dir);
    fs::remove_all(dir);

    const fs::path dir2 = fresh_dir("scaling");
    REQUIRE(cli({"verify", "--lemma", "eigenvalue_scaling", "--family", "rectangles", "--params", "2,3,4,5", "-o", dir2.string()}).code ==
            kExitPass);
    fs::remove_all(dir2);
}

TEST_CASE("config schema lists exactly the accepted keys") {
    const Json schema = Json::parse(slurp(fs::path(HOTSPOTS_SOURCE_DIR) / "schemas" / "config.schema.json"));
    std::set<std::string> in_schema, accepted(config_keys().begin(), config_keys().end());
    for (const auto& [k, _] : schema.at("properties").items()) in_schema.insert(k);
    CHECK(in_schema == accepted);
}

TEST_CASE("config round-trips through its canonical JSON") {
    const Json j = {{"command", "verify"},
                    {"lemma", "hitting_time"},
                    {"domain", {{"kind", "ellipse"}, {"semi_major", 16}, {"semi_minor", 1}}},
                    {"n_paths", 100},
                    {"offset", 2.5},
                    {"sources", {{1, 1}, {2, 1}}},
                    {"times", {0.5, 1}},
                    {"seed", 77},
                    {"backend", "serial"}};
    const RunConfig c = parse_run_config(j);
    const Json canonical = to_json(c);
    const RunConfig again = parse_run_config(canonical);
    CHECK(to_json(again) == canonical);
    CHECK(again.seed == 77);
    CHECK(again.backend == Backend::serial);
    CHECK(*again.offset == 2.5);
    CHECK(again.sources.size() == 2);
}
