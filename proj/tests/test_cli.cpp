#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "fdr/cli.hpp"

using namespace fdr;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / ("fdr_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

double comment_value(const std::string& text, const std::string& key) {
    for (const auto& l : lines(text))
        if (l.rfind("# " + key + "=", 0) == 0) return std::stod(l.substr(key.size() + 3));
    throw std::runtime_error("missing comment " + key);
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> v;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, ',');) v.push_back(f);
    if (!s.empty() && s.back() == ',') v.emplace_back();
    return v;
}

}  // namespace

TEST_CASE("simulate: suction at 30 L/min") {
    const Run r = run({"simulate", "--type", "B", "--qin-lpm", "30"});
    CHECK(r.code == 0);
    const auto l = lines(r.out);
    REQUIRE(l.size() == 2);
    CHECK(l[0].find("p_out_kpa") != std::string::npos);
    CHECK(l[0].find("p_out_pa") != std::string::npos);
    CHECK(split(l[1])[6] == "suction");
}

TEST_CASE("simulate: rest state") {
    const Run r = run({"simulate", "--type", "B", "--qin-lpm", "0"});
    CHECK(r.code == 0);
    CHECK(lines(r.out)[1] == "0,0,0,0,0,0,neutral,0,0,0,0,0");
}

TEST_CASE("simulate: unknown type") {
    const Run r = run({"simulate", "--type", "Z", "--qin-lpm", "10"});
    CHECK(r.code == 2);
    CHECK(r.err.find("A, B, C, D, E, F, G, H, I, J, K") != std::string::npos);
}

TEST_CASE("simulate: json") {
    const Run r = run({"simulate", "--type", "B", "--qin-lpm", "10", "--format", "json"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("mode") == "blowing");
    CHECK(j.at("si").at("q_in_m3s").get<double>() == doctest::Approx(10.0 / 60000.0));
}

TEST_CASE("sweep: grid, summary and determinism") {
    const fs::path dir = scratch_dir();
    const fs::path a = dir / "a.csv", b = dir / "b.csv", p = dir / "p.csv";
    REQUIRE(run({"sweep", "--type", "B", "--from-lpm", "0", "--to-lpm", "30", "--step-lpm", "0.1", "--out", a}).code == 0);
    REQUIRE(run({"sweep", "--type", "B", "--from-lpm", "0", "--to-lpm", "30", "--step-lpm", "0.1", "--out", b}).code == 0);
    setenv("FDR_WORKERS", "4", 1);
    REQUIRE(run({"sweep", "--type", "B", "--out", p}).code == 0);
    unsetenv("FDR_WORKERS");

    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(text == slurp(p));
    CHECK(text.back() == '\n');

    const auto l = lines(text);
    CHECK(l[0] == "q_in_lpm,p_in_kpa,p_chamber_kpa,a_fg_mm2,a_fg_over_a_ex,p_out_kpa,mode");
    int data = 0;
    for (std::size_t i = 1; i < l.size(); ++i) {
        if (l[i].rfind("#", 0) == 0) continue;
        ++data;
        CHECK(split(l[i]).size() == 7);
    }
    CHECK(data == 301);
    CHECK(comment_value(text, "sign_changes") == 1);
    fs::remove_all(dir);
}

TEST_CASE("sweep: numbers carry at most 9 significant digits") {
    const Run r = run({"sweep", "--type", "D", "--step-lpm", "0.7", "--si"});
    REQUIRE(r.code == 0);
    const std::regex number(R"(-?\d+(\.\d+)?(e[-+]\d+)?)");
    const auto l = lines(r.out);
    CHECK(split(l[0]).size() == 12);
    for (std::size_t i = 1; i < l.size(); ++i) {
        if (l[i].rfind("#", 0) == 0) continue;
        for (const auto& f : split(l[i])) {
            if (!std::regex_match(f, number)) continue;
            std::string digits;
            for (char c : f.substr(0, f.find('e')))
                if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
            digits.erase(0, digits.find_first_not_of('0'));
            CHECK(digits.size() <= 9);
        }
    }
}

TEST_CASE("sweep: lower gate switches earlier") {
    const Run f = run({"sweep", "--type", "F"});
    const Run b = run({"sweep", "--type", "B"});
    REQUIRE(f.code == 0);
    REQUIRE(b.code == 0);
    CHECK(comment_value(f.out, "switching_q_lpm") < comment_value(b.out, "switching_q_lpm"));
}

TEST_CASE("sweep: invalid range is a config error") {
    CHECK(run({"sweep", "--type", "B", "--from-lpm", "30", "--to-lpm", "0"}).code == 2);
    CHECK(run({"sweep", "--type", "B", "--step-lpm", "0"}).code == 2);
    CHECK(run({"sweep", "--type", "B", "--format", "xml"}).code == 2);
    CHECK(run({"sweep", "--type", "B", "--device", "x.json"}).code == 2);
    CHECK(run({"sweep"}).code == 2);
    setenv("FDR_WORKERS", "zero", 1);
    CHECK(run({"sweep", "--type", "B"}).code == 2);
    unsetenv("FDR_WORKERS");
}

TEST_CASE("compare: width ordering") {
    const Run r = run({"compare", "--types", "A,B,C"});
    REQUIRE(r.code == 0);
    const auto l = lines(r.out);
    REQUIRE(l.size() == 4);
    const double a = std::stod(split(l[1])[2]), b = std::stod(split(l[2])[2]), c = std::stod(split(l[3])[2]);
    CHECK(a > b);
    CHECK(b > c);
}

TEST_CASE("compare: curves file") {
    const fs::path dir = scratch_dir();
    const Run r = run({"compare", "--types", "B,F", "--curves-out", dir / "curves.csv", "--format", "json"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).at("ordering").size() == 2);
    CHECK(lines(slurp(dir / "curves.csv")).size() == 1 + 2 * 301);
    fs::remove_all(dir);
}

TEST_CASE("friction: ordering at the lightest load") {
    const Run r = run({"friction", "--type", "B", "--weight-n", "0.157", "--qin-lpm", "0,10,20,30"});
    REQUIRE(r.code == 0);
    const auto l = lines(r.out);
    REQUIRE(l.size() == 5);
    auto mu = [&](int i) { return std::stod(split(l[i])[4]); };
    CHECK(mu(2) < mu(1));
    CHECK(mu(1) < mu(3));
    CHECK(mu(3) < mu(4));
    CHECK(run({"friction", "--type", "B"}).code == 2);
    CHECK(run({"friction", "--type", "B", "--weight-n", "1", "--weight-gf", "100"}).code == 2);
}

TEST_CASE("calibrate: published points") {
    const fs::path dir = scratch_dir();
    const Run r = run({"calibrate", "--data", "published", "--out", dir / "fit.json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "fit.json"));
    CHECK(j.at("rms").at("p_in_kpa").get<double>() <= 2.5);
    // the report doubles as a coefficient file
    const Run s = run({"simulate", "--type", "B", "--qin-lpm", "30", "--coeffs", dir / "fit.json"});
    CHECK(s.code == 0);
    const Run csv = run({"calibrate", "--format", "csv"});
    CHECK(csv.code == 0);
    CHECK(csv.out.find("# rms_p_in_kpa=") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("calibrate: closure fit round trip through files") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream f(dir / "b.csv");
        f << "q_in_lpm,p_in_kpa,p_out_kpa,a_fg_mm2\n";
        for (int q = 0; q <= 30; q += 2) {
            const Run s = run({"simulate", "--type", "B", "--qin-lpm", std::to_string(q)});
            const auto v = split(lines(s.out)[1]);
            f << v[0] << ',' << v[1] << ',' << v[5] << ',' << v[3] << '\n';
        }
    }
    const Run r = run({"calibrate", "--fit", "closures", "--type", "B", "--data", dir / "b.csv", "--max-evals", "60"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).at("fitted").size() == 4);
    fs::remove_all(dir);
}

TEST_CASE("calibrate: fit errors exit with 4") {
    const Run r = run({"calibrate", "--fit", "closures", "--type", "B", "--data", "published"});
    CHECK(r.code == 4);
    CHECK(r.err.find("p_out") != std::string::npos);
    CHECK(run({"calibrate", "--fit", "closures", "--data", "published"}).code == 2);
    CHECK(run({"calibrate", "--data", "/nonexistent.csv"}).code == 2);
}

TEST_CASE("optimize: height objective") {
    const Run r = run({"optimize", "--type", "B", "--objective", "switching-p-in", "--h-mm", "1.8,2.0"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("h_mm").get<double>() == doctest::Approx(1.8).epsilon(1e-3));
    CHECK(run({"optimize", "--type", "B", "--objective", "fastest"}).code == 2);
    CHECK(run({"optimize", "--type", "B", "--objective", "match-curve"}).code == 2);
}

TEST_CASE("bad coefficient file is a config error") {
    const fs::path dir = scratch_dir();
    std::ofstream(dir / "c.json") << R"({"eta": "lots"})";
    CHECK(run({"simulate", "--type", "B", "--qin-lpm", "5", "--coeffs", dir / "c.json"}).code == 2);
    std::ofstream(dir / "d.json") << R"({"label": 3})";
    CHECK(run({"simulate", "--device", dir / "d.json", "--qin-lpm", "5"}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("help lists units for every numeric flag") {
    const std::regex unit(R"(\[(L/min|kPa|mm|mm\^2|N|gf|cm\^2|dimensionless|count)\])");
    const std::map<std::string, std::vector<std::string>> numeric = {
        {"simulate", {"--qin-lpm"}},
        {"sweep", {"--from-lpm", "--to-lpm", "--step-lpm"}},
        {"compare", {"--from-lpm", "--to-lpm", "--step-lpm"}},
        {"calibrate", {"--max-evals"}},
        {"optimize",
         {"--weight", "--target-p-in-kpa", "--q-star-lpm", "--from-lpm", "--to-lpm", "--step-lpm", "--curve-step-lpm",
          "--w-mm", "--t-mm", "--h-mm", "--ane-mm2", "--start", "--max-evals", "--simplex-step"}},
        {"friction", {"--weight-n", "--weight-gf", "--mu0-s", "--mu0-k", "--a-eff-cm2", "--qin-lpm"}},
    };
    for (const auto& [cmd, flags] : numeric) {
        const Run r = run({cmd, "--help"});
        CHECK(r.code == 0);
        for (const auto& flag : flags) {
            CAPTURE(cmd);
            CAPTURE(flag);
            const auto at = r.out.find("  " + flag + " ");
            REQUIRE(at != std::string::npos);
            const auto next = r.out.find("\n  --", at + 1);
            const std::string block = r.out.substr(at, next == std::string::npos ? std::string::npos : next - at);
            CHECK(std::regex_search(block, unit));
        }
    }
}
