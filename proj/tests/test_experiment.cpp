#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "freent/errors.hpp"
#include "freent/experiment.hpp"
#include "freent/potential.hpp"

using freent::ExperimentConfig;
using freent::ResultManifest;
using freent::ValidationError;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

// Scratch directory wiped on scope exit; the pid keeps parallel ctest
// invocations apart.
struct TempDir {
    fs::path path;
    explicit TempDir(const char* tag) {
        path = fs::temp_directory_path() /
               (std::string("freent_") + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    REQUIRE(bool(out << text));
}

json manifest_on_disk(const std::string& run_dir) {
    return json::parse(slurp(fs::path(run_dir) / "manifest.json"));
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string("\"") + FREENT_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("defaults materialize into the merged configuration") {
    const ExperimentConfig cfg = freent::make_config("volume", json::object());
    CHECK(cfg.command == "volume");
    CHECK(cfg.params.at("n") == 1);
    CHECK(cfg.params.at("eps") == 0.5);
    CHECK(cfg.params.at("degree") == 3);
    CHECK(cfg.params.at("k") == 2);
    CHECK(cfg.params.at("samples") == 20000);
    CHECK(cfg.params.at("estimator") == "both");
    CHECK(cfg.params.at("seed") == 0);
    CHECK(cfg.params.at("workers") == 1);

    // every command carries a seed even when the caller never set one
    for (const char* cmd : {"gue-norms", "ht-check", "gamma-measure", "volume",
                            "covering", "dimension", "trace-pinning"})
        CHECK(freent::make_config(cmd, json::object()).params.contains("seed"));

    // capacity has no default domain, so the schema's required list fires
    CHECK_THROWS_AS(freent::make_config("capacity", json::object()),
                    ValidationError);
    CHECK_THROWS_AS(freent::make_config("no-such-command", json::object()),
                    ValidationError);
}

TEST_CASE("flags override defaults and the config file overrides flags") {
    TempDir tmp("cfgfile");
    const fs::path file = tmp.path / "run.json";
    spit(file, R"({"command": "volume", "k": 3, "samples": 512})");

    const ExperimentConfig cfg =
        freent::make_config("volume", {{"k", 4}, {"seed", 7}}, file.string());
    CHECK(cfg.params.at("k") == 3);        // file beats the flag
    CHECK(cfg.params.at("samples") == 512);
    CHECK(cfg.params.at("seed") == 7);     // flag beats the default
    CHECK(cfg.params.at("estimator") == "both");

    // the file's command tag must match the invoked command
    spit(file, R"({"command": "covering", "k": 3})");
    CHECK_THROWS_AS(freent::make_config("volume", json::object(), file.string()),
                    ValidationError);

    spit(file, "{\"k\": 3");
    CHECK_THROWS_AS(freent::make_config("volume", json::object(), file.string()),
                    ValidationError);
    spit(file, "[1, 2]");
    CHECK_THROWS_AS(freent::make_config("volume", json::object(), file.string()),
                    ValidationError);
    CHECK_THROWS_AS(freent::make_config("volume", json::object(),
                                        (tmp.path / "absent.json").string()),
                    ValidationError);
}

TEST_CASE("configurations reject unknown keys and out-of-range values") {
    CHECK_THROWS_AS(freent::make_config("volume", {{"bogus", 1}}), ValidationError);
    CHECK_THROWS_AS(freent::make_config("volume", {{"k", 40}}), ValidationError);
    CHECK_THROWS_AS(freent::make_config("volume", {{"k", 0}}), ValidationError);
    CHECK_THROWS_AS(freent::make_config("volume", {{"estimator", "frobenius"}}),
                    ValidationError);
    CHECK_THROWS_AS(freent::make_config("volume", {{"eps", -0.5}}), ValidationError);
    CHECK_THROWS_AS(freent::make_config("volume", {{"samples", "many"}}),
                    ValidationError);
    // integer-valued floats pass the integer check, true fractions do not
    CHECK(freent::make_config("volume", {{"k", 2.0}}).params.at("k") == 2.0);
    CHECK_THROWS_AS(freent::make_config("volume", {{"k", 2.5}}), ValidationError);

    // semantic checks beyond the schema
    CHECK_THROWS_AS(
        freent::make_config("covering", {{"radius", 0.5}, {"eps", {0.9, 0.2}}}),
        ValidationError);
    CHECK_THROWS_AS(
        freent::make_config("dimension", {{"eps_grid", {0.1, 0.2, 0.4}}}),
        ValidationError);
    CHECK_THROWS_AS(
        freent::make_config("capacity", {{"intervals", "[1,-1]"}, {"grid", 100}}),
        ValidationError);
    CHECK_THROWS_AS(freent::make_config("ht-check", {{"poly", "X9"}}),
                    ValidationError);
    // a preset and an inline spec at once is ambiguous
    CHECK_THROWS_AS(
        freent::make_config(
            "volume",
            {{"preset", "vacuous"},
             {"spec",
              json::parse(R"({"n":1,"m":0,"k":2,"epsilon":0.5,"M":2.0,
                              "constraints":[]})")}}),
        ValidationError);
}

TEST_CASE("config hashes pin the full effective configuration") {
    const ExperimentConfig base = freent::make_config("volume", json::object());
    const std::string h = freent::hash_config(base);
    REQUIRE(h.size() == 16);
    for (char c : h)
        CHECK((std::isdigit(static_cast<unsigned char>(c)) ||
               (c >= 'a' && c <= 'f')));

    // setting a parameter to its default value changes nothing
    CHECK(freent::hash_config(freent::make_config("volume", {{"k", 2}})) == h);
    // any effective change moves the hash
    CHECK(freent::hash_config(freent::make_config("volume", {{"seed", 1}})) != h);
    CHECK(freent::hash_config(freent::make_config("volume", {{"k", 3}})) != h);
    // the command participates, so equal parameter objects cannot collide
    const json dom = {{"intervals", "[-1,1]"}, {"grid", 100}};
    CHECK(freent::hash_config(freent::make_config("capacity", dom)) !=
          freent::hash_config(freent::make_config("eqmeasure", dom)));
    // hashing is pure
    CHECK(freent::hash_config(base) == h);
}

TEST_CASE("schema validation names the failing path") {
    const json schema = json::parse(R"({
        "type": "object",
        "additionalProperties": false,
        "required": ["mode", "count"],
        "properties": {
            "mode":  {"type": "string", "enum": ["fast", "slow"]},
            "count": {"type": "integer", "minimum": 1, "maximum": 8},
            "scale": {"type": "number", "exclusiveMinimum": 0},
            "taps":  {"type": "array", "items": {"type": "integer"}}
        }
    })");
    auto ok = [&](const json& v) {
        freent::validate_against_schema(v, schema, "cfg");
    };
    CHECK_NOTHROW(ok({{"mode", "fast"}, {"count", 3}}));
    CHECK_THROWS_AS(ok({{"mode", "fast"}}), ValidationError);                // required
    CHECK_THROWS_AS(ok({{"mode", "warp"}, {"count", 3}}), ValidationError);  // enum
    CHECK_THROWS_AS(ok({{"mode", "fast"}, {"count", 9}}), ValidationError);  // maximum
    CHECK_THROWS_AS(ok({{"mode", "fast"}, {"count", 3}, {"scale", 0.0}}),
                    ValidationError);                                        // exclusive
    CHECK_THROWS_AS(ok({{"mode", "fast"}, {"count", 3}, {"taps", {1, "x"}}}),
                    ValidationError);                                        // items
    CHECK_THROWS_AS(ok({{"mode", "fast"}, {"count", 3}, {"extra", 1}}),
                    ValidationError);                                        // closed

    try {
        ok({{"mode", "fast"}, {"count", 3}, {"taps", {1, "x"}}});
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("cfg.taps[1]") != std::string::npos);
    }

    const json dangling = json::parse(R"({"$ref": "#/$defs/nowhere"})");
    CHECK_THROWS_AS(freent::validate_against_schema(json(1), dangling, "cfg"),
                    ValidationError);

    // the shipped documents parse and describe themselves as objects
    CHECK(freent::config_schema().at("type") == "object");
    CHECK(freent::manifest_schema().at("type") == "object");
}

TEST_CASE("capacity pipeline writes a manifest and reruns byte-identically") {
    TempDir a("run_a");
    TempDir b("run_b");
    const ExperimentConfig cfg = freent::make_config(
        "capacity", {{"intervals", "[-1,1]"}, {"grid", 400}});

    const ResultManifest r1 = freent::run_experiment(cfg, a.str());
    const ResultManifest r2 = freent::run_experiment(cfg, b.str());

    // the run directory embeds the config hash
    CHECK(r1.run_dir ==
          (fs::path(a.str()) / ("capacity-" + freent::hash_config(cfg))).string());
    CHECK(fs::exists(fs::path(r1.run_dir) / "manifest.json"));
    REQUIRE(!r1.data_files.empty());
    for (const auto& f : r1.data_files) CHECK(fs::exists(fs::path(r1.run_dir) / f));

    // the unit interval has capacity 1/2
    CHECK(r1.outputs.at("capacity").get<double>() == doctest::Approx(0.5).epsilon(4e-3));
    CHECK(std::abs(r1.outputs.at("kappa").get<double>() -
                   (freent::theta() - std::log(2.0))) < 5e-3);

    // identical configuration, identical files: only the timing block may move
    json m1 = manifest_on_disk(r1.run_dir);
    json m2 = manifest_on_disk(r2.run_dir);
    CHECK(m1.contains("timing"));
    m1.erase("timing");
    m2.erase("timing");
    CHECK(m1 == m2);
    for (const auto& f : r1.data_files)
        CHECK(slurp(fs::path(r1.run_dir) / f) == slurp(fs::path(r2.run_dir) / f));

    CHECK(m1.at("config_hash") == freent::hash_config(cfg));
    CHECK(m1.at("kernels").get<std::string>().size() > 0);
    CHECK(m1.at("config").at("grid") == 400);
}

TEST_CASE("seeded volume pipeline is deterministic across reruns") {
    TempDir a("vol_a");
    TempDir b("vol_b");
    const ExperimentConfig cfg = freent::make_config(
        "volume", {{"preset", "interval:-2,2"}, {"eps", 0.1}, {"k", 2},
                   {"samples", 4000}, {"seed", 1}});

    const ResultManifest r1 = freent::run_experiment(cfg, a.str());
    const ResultManifest r2 = freent::run_experiment(cfg, b.str());
    json m1 = manifest_on_disk(r1.run_dir);
    json m2 = manifest_on_disk(r2.run_dir);
    m1.erase("timing");
    m2.erase("timing");
    CHECK(m1 == m2);
    for (const auto& f : r1.data_files)
        CHECK(slurp(fs::path(r1.run_dir) / f) == slurp(fs::path(r2.run_dir) / f));

    // both estimators ran and produced finite numbers on this window
    REQUIRE(r1.outputs.at("estimates").size() == 2);
    for (const auto& e : r1.outputs.at("estimates"))
        CHECK(std::isfinite(e.at("raw_log_vol").get<double>()));
}

TEST_CASE("acceptance pipeline results do not depend on the worker count") {
    TempDir a("wk_a");
    TempDir b("wk_b");
    const json common = {{"k", 30}, {"samples", 300}, {"seed", 2}};
    json p1 = common;
    p1["workers"] = 1;
    json p4 = common;
    p4["workers"] = 4;

    const ResultManifest r1 =
        freent::run_experiment(freent::make_config("gamma-measure", p1), a.str());
    const ResultManifest r4 =
        freent::run_experiment(freent::make_config("gamma-measure", p4), b.str());

    CHECK(r1.outputs == r4.outputs);
    REQUIRE(r1.data_files == r4.data_files);
    for (const auto& f : r1.data_files)
        CHECK(slurp(fs::path(r1.run_dir) / f) == slurp(fs::path(r4.run_dir) / f));
}

TEST_CASE("environment variable selects the default output directory") {
    const char* old = std::getenv("FREENT_OUTDIR");
    const std::string saved = old ? old : "";

    ::setenv("FREENT_OUTDIR", "/tmp/freent_alt_out", 1);
    CHECK(freent::default_outdir() == "/tmp/freent_alt_out");
    ::setenv("FREENT_OUTDIR", "", 1);
    CHECK(freent::default_outdir() == "out");
    ::unsetenv("FREENT_OUTDIR");
    CHECK(freent::default_outdir() == "out");

    if (old) ::setenv("FREENT_OUTDIR", saved.c_str(), 1);
}

TEST_CASE("command line exit codes separate config errors from runtime errors") {
    TempDir tmp("cli");

    // invalid configuration: dimension above the supported cap
    CHECK(run_cli("volume --k 40 --outdir " + tmp.str()) == 2);
    // unknown subcommand never reaches the pipeline
    CHECK(run_cli("summon --outdir " + tmp.str()) == 2);
    // a valid tiny run exits 0 and leaves the manifest where it promised
    CHECK(run_cli("capacity --intervals \"[-1,1]\" --grid 120 --outdir " +
                  tmp.str()) == 0);
    const ExperimentConfig tiny = freent::make_config(
        "capacity", {{"intervals", "[-1,1]"}, {"grid", 120}});
    CHECK(fs::exists(tmp.path / ("capacity-" + freent::hash_config(tiny)) /
                     "manifest.json"));
    // config file wins over the conflicting flag, so the run lands under the
    // file's hash
    const fs::path file = tmp.path / "cfg.json";
    spit(file, R"({"command": "capacity", "grid": 150})");
    CHECK(run_cli("capacity --intervals \"[-1,1]\" --grid 300 --config " +
                  file.string() + " --outdir " + tmp.str()) == 0);
    const ExperimentConfig filed = freent::make_config(
        "capacity", {{"intervals", "[-1,1]"}, {"grid", 150}});
    CHECK(fs::exists(tmp.path / ("capacity-" + freent::hash_config(filed)) /
                     "manifest.json"));
    const ExperimentConfig flagged = freent::make_config(
        "capacity", {{"intervals", "[-1,1]"}, {"grid", 300}});
    CHECK(!fs::exists(tmp.path / ("capacity-" + freent::hash_config(flagged))));
    // an unwritable output directory is a runtime failure, not a config one
    CHECK(run_cli("capacity --intervals \"[-1,1]\" --grid 120 --outdir "
                  "/proc/freent_denied") == 3);
}
