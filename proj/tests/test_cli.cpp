#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = sadic::cli::run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    return lines;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sadic_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string kData = SADIC_DATA_DIR;

}  // namespace

TEST_CASE("validate") {
    const auto ok = run({"validate", "thue_morse", kData + "/block_4x3.json"});
    REQUIRE(ok.status == 0);
    const auto j = json::parse(ok.out);
    CHECK(j["valid"] == true);
    CHECK(j["_header"]["version"] == SADIC_VERSION);
    CHECK(j["substitutions"][0]["q_difference"] == "1 - z");
    CHECK(j["substitutions"][1]["expansion"] == json::array({4, 3}));

    const auto bad = run({"validate", std::string(SADIC_TEST_DATA_DIR) + "/bad_letter.json"});
    CHECK(bad.status == 1);
    const auto e = json::parse(bad.out);
    CHECK(e["error"]["kind"] == "validation");
    REQUIRE(e["error"]["issues"].size() == 1);
    CHECK(e["error"]["issues"][0].get<std::string>().find("cell (1)") != std::string::npos);

    const auto missing = run({"validate", "no_such_substitution"});
    CHECK(missing.status == 1);
    CHECK(json::parse(missing.out).contains("error"));
}

TEST_CASE("usage errors and help") {
    const auto unknown = run({"validate", "thue_morse", "--bogus"});
    CHECK(unknown.status == 1);
    CHECK(json::parse(unknown.out)["error"]["kind"] == "usage");
    CHECK(run({}).status == 1);
    const auto help = run({"--help"});
    CHECK(help.status == 0);
    CHECK(help.out.find("criterion") != std::string::npos);
}

TEST_CASE("fourier-eval") {
    const auto r = run({"fourier-eval", "--sub", "thue_morse", "--t", "0.25", "--grid", "4"});
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("# sadic ", 0) == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "t1,re_1_1,im_1_1,re_1_2,im_1_2,re_2_1,im_2_1,re_2_2,im_2_2");
    std::vector<double> v;
    std::stringstream ss(lines[1]);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    REQUIRE(v.size() == 9);
    CHECK(v[0] == 0.25);
    CHECK(v[1] == 1.0);
    CHECK(std::abs(v[3]) < 1e-15);
    CHECK(v[4] == doctest::Approx(1.0));
    CHECK(run({"fourier-eval", "--sub", "thue_morse", "--t", "0.1,0.2"}).status == 1);
}

TEST_CASE("mahler") {
    const auto r = run({"mahler", "--poly", "substitution:thue_morse", "--method", "jensen"});
    REQUIRE(r.status == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "polynomial,value,stderr,method,samples,excluded_cells");
    CHECK(lines[1].rfind("\"1 - z\",0,0,jensen_roots", 0) == 0);

    const auto q = run({"mahler", "--poly", "1 - z1*z2", "--method", "quad", "--grid", "128", "--seed", "3"});
    REQUIRE(q.status == 0);
    CHECK(data_lines(q.out)[1].find("tensor_quadrature") != std::string::npos);
    CHECK(run({"mahler", "--poly", "1 - z1*z2", "--method", "quad", "--grid", "128", "--seed", "3"}).out == q.out);

    const auto zero = run({"mahler", "--poly", "z - z"});
    CHECK(zero.status == 1);
    CHECK(json::parse(zero.out)["error"]["kind"] == "numerical");
    CHECK(run({"mahler", "--poly", "1 - z1*z2*z3", "--method", "quad", "--grid", "1024"}).status == 2);
}

TEST_CASE("criterion and lyapunov") {
    const std::vector<std::string> args{"criterion",  "--subs",      "thue_morse,period_doubling",
                                        "--directive", "bernoulli:0.5,0.5", "--steps",
                                        "2000",       "--t-samples", "20"};
    const auto r = run(args);
    REQUIRE(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(std::abs(j["margin"].get<double>() - 0.34657) < 0.05);
    CHECK(j["verdict"] == "positive_margin");
    CHECK(j["_header"]["config"]["seed"] == 20240607);
    CHECK(run(args).out == r.out);

    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "2"});
    CHECK(json::parse(run(threaded).out)["per_t_margins"] == j["per_t_margins"]);

    auto reseeded = args;
    reseeded.insert(reseeded.end(), {"--seed", "5"});
    CHECK(json::parse(run(reseeded).out)["per_t_margins"] != j["per_t_margins"]);

    const auto l = run({"lyapunov", "--subs", "thue_morse", "--directive", "constant:1", "--steps", "1000",
                        "--t-samples", "5", "--inverse"});
    REQUIRE(l.status == 0);
    const auto lines = data_lines(l.out);
    REQUIRE(lines.size() == 1 + 5 + 5);
    CHECK(lines[0] == "quantity,sample,t1,value,stderr,closed_form");
    CHECK(lines[6].rfind("chi_plus_B,summary,,", 0) == 0);
    CHECK(lines[10].rfind("log_det_rate_C,summary,,", 0) == 0);

    const auto mismatch = run({"criterion", "--subs", "thue_morse", "--directive", "word:12", "--steps", "1000"});
    CHECK(mismatch.status == 1);
}

TEST_CASE("simulate writes reproducible artifacts") {
    const auto dir = scratch("simulate");
    const std::string prefix = (dir / "tm").string();
    const std::vector<std::string> args{"simulate", "--subs", "thue_morse,period_doubling", "--directive", "word:12",
                                        "--level", "10", "--radius", "3", "--out", prefix};
    const auto r = run(args);
    REQUIRE(r.status == 0);
    const auto summary = json::parse(r.out);
    CHECK(summary["extent"] == json::array({1024}));

    const std::vector<std::string> suffixes{".patch.rle", ".correlations.csv", ".diffraction.csv", ".plot.gp"};
    std::vector<std::string> first;
    for (const auto& s : suffixes) {
        const auto text = slurp(prefix + s);
        CHECK(text.rfind("# sadic ", 0) == 0);
        CHECK(text.find("# config: ") != std::string::npos);
        first.push_back(text);
    }
    CHECK(data_lines(first[1])[0] == "i,j,z1,count,freq");
    CHECK(data_lines(first[1]).size() == 1 + 4 * 7);
    CHECK(data_lines(first[2]).size() == 1 + 1024);

    REQUIRE(run(args).status == 0);
    for (std::size_t k = 0; k < suffixes.size(); ++k) CHECK(slurp(prefix + suffixes[k]) == first[k]);

    CHECK(run({"simulate", "--subs", "thue_morse", "--level", "30", "--max-cells", "4096", "--out", prefix}).status == 2);
    CHECK(run({"simulate", "--subs", "thue_morse", "--level", "4"}).status == 1);
}

TEST_CASE("supertile cache") {
    const auto dir = scratch("cache");
    const auto cache = dir / "cache";
    ::setenv("SADIC_CACHE_DIR", cache.c_str(), 1);
    const std::string prefix = (dir / "b").string();
    const std::vector<std::string> args{"simulate", "--subs", kData + "/block_4x3.json", "--level", "3",
                                        "--radius", "2", "--weights", "1,0:1", "--out", prefix};
    REQUIRE(run(args).status == 0);
    const auto diffraction = slurp(prefix + ".diffraction.csv");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(cache)) ++entries;
    CHECK(entries == 1);
    REQUIRE(run(args).status == 0);
    CHECK(slurp(prefix + ".diffraction.csv") == diffraction);
    ::unsetenv("SADIC_CACHE_DIR");
    REQUIRE(run(args).status == 0);
    CHECK(slurp(prefix + ".diffraction.csv") == diffraction);
}
