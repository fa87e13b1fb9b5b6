#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

using Json = nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr interleaved
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SELFAFFINE_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, got);
    int rc = pclose(pipe);
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

std::string config(const std::string& name) {
    return std::string(SELFAFFINE_CONFIG_DIR) + "/" + name;
}

Json parse_report(const CliResult& r) {
    CAPTURE(r.output);
    REQUIRE(r.exit_code == 0);
    return Json::parse(r.output);
}

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = "/tmp/selfaffine_cli_" + name;
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("classify reports the exact verdict record") {
    auto rep = parse_report(run_cli("classify --config " + config("diag_neg09.cfg")));
    CHECK(rep["schema_version"] == 1);
    CHECK(rep["tool"]["name"] == "selfaffine");
    CHECK(rep["mode"] == "exact");
    const auto& u = rep["verdicts"]["uniqueness"];
    CHECK(u["verdict"] == "FiniteNonEmpty");
    CHECK(u["rule"] == "RationalEqualModuli");
    CHECK(u["q"] == 1);
    CHECK(u["sign_conflict"] == true);
    CHECK(u["beta_exact"] == "100/81");
    CHECK(u["confidence"] == "exact");
    const auto& in = rep["verdicts"]["interior"];
    CHECK(in["verdict"] == "NonEmptyByTheorem");
    CHECK(in["det_abs_exact"] == "81/100");
    CHECK(rep["verdicts"]["connectivity"]["verdict"] == "PathConnected");
    // The echoed input reproduces the run.
    CHECK(rep["input"].get<std::string>().find("block real modulus=-9/10") != std::string::npos);
}

TEST_CASE("classify covers the spectral dispatch rules") {
    auto rule = [&](const std::string& cfg) {
        auto rep = parse_report(run_cli("classify --config " + config(cfg)));
        const auto& u = rep["verdicts"]["uniqueness"];
        return u["rule"].get<std::string>() + "/" + u["verdict"].get<std::string>();
    };
    CHECK(rule("jordan_half.cfg") == "Jordan/PositiveHausdorffDim");
    CHECK(rule("rot_09_irr.cfg") == "IrrationalAngle/PositiveHausdorffDim");
    CHECK(rule("diag_06_08.cfg") == "DistinctModuli/PositiveHausdorffDim");
    CHECK(rule("rot_095_half.cfg") == "RationalEqualModuli/FiniteNonEmpty");
    CHECK(rule("lambda_11_20.cfg") == "RationalEqualModuli/PositiveHausdorffDim");
}

TEST_CASE("malformed configs fail with exit 1 naming the offender") {
    auto path = write_temp("bad.cfg", "bananas 3\n");
    auto r = run_cli("classify --config " + path);
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("bananas") != std::string::npos);
    std::remove(path.c_str());

    auto missing = run_cli("classify --config /tmp/selfaffine_no_such_file.cfg");
    CHECK(missing.exit_code == 1);
}

TEST_CASE("strict mode turns Unknown verdicts into exit 2") {
    const std::string args = "classify --config " + config("diag_06_08.cfg");
    CHECK(run_cli(args).exit_code == 0);  // connectivity Unknown, det 12/25 < 1/2
    auto strict = run_cli(args + " --strict");
    CHECK(strict.exit_code == 2);
}

TEST_CASE("unique emits the N_n table as CSV") {
    auto r = run_cli("unique --lambda 4/5 --length 6 --node-budget 300 --format csv");
    CAPTURE(r.output);
    REQUIRE(r.exit_code == 0);
    std::string expect = "n,count\n";
    for (int n = 1; n <= 6; ++n) expect += std::to_string(n) + ",2\n";
    CHECK(r.output == expect);
}

TEST_CASE("certify reports a replayable collision witness") {
    auto rep = parse_report(run_cli("unique --lambda 1/2 --address '+(-)'"));
    const auto& c = rep["verdicts"]["certification"];
    CHECK(c["status"] == "CollisionFound");
    CHECK(c["exact"] == true);
    const auto& w = c["witness"];
    CHECK(w["shift"] == 0);
    CHECK(w["periodic"] == true);
    CHECK(w["head_flips"] == Json::array({0}));
    CHECK(w["cycle_flips"] == Json::array({1}));
    REQUIRE(c["shifts"].is_array());
    CHECK(c["shifts"].size() >= 1);
}

TEST_CASE("project evaluates periodic addresses exactly") {
    auto rep = parse_report(run_cli("project --lambda 1/2 --address '(+)'"));
    const auto& p = rep["verdicts"]["projection"];
    CHECK(p["exact_point"] == Json::array({"2"}));
    CHECK(p["exact_point_decimal"] == Json::array({2.0}));
    CHECK(p["radius"].get<double>() > 0);
}

TEST_CASE("constants produce the requested enclosure width") {
    auto rep = parse_report(run_cli("constants --precision 1e-8"));
    const auto& kl = rep["constants"]["komornik_loreti"];
    const double lo = kl["lo"], hi = kl["hi"];
    CHECK(hi - lo <= 1e-8);
    CHECK(lo <= 1.7872316501829659);
    CHECK(hi >= 1.7872316501829659);
    const auto& g = rep["constants"]["golden_ratio"];
    CHECK(g["lo"].get<double>() <= 1.6180339887498949);
    CHECK(g["hi"].get<double>() >= 1.6180339887498949);
}

TEST_CASE("decompose-check verifies the subdivision identity exactly") {
    auto rep = parse_report(
        run_cli("decompose-check --config " + config("matrix_diag.cfg") + " --blocks 2 --depth 6"));
    const auto& d = rep["verdicts"]["decomposition"];
    CHECK(d["equal"] == true);
    CHECK(d["exact"] == true);
    CHECK(d["blocks"] == 2);
    CHECK(d["depth"] == 6);
}

TEST_CASE("render writes a PGM with the expected lit pixels") {
    const std::string img = "/tmp/selfaffine_cli_render.pgm";
    auto rep = parse_report(run_cli("render --config " + config("lambda_25.cfg") +
                                    " --depth 1 --width 8 --height 3 "
                                    "--viewport -2,2,-1,1 --output " +
                                    img));
    CHECK(rep["verdicts"]["render"]["source"] == "cylinders");
    std::ifstream in(img, std::ios::binary);
    REQUIRE(in.good());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string header = "P5\n8 3\n255\n";
    REQUIRE(data.rfind(header, 0) == 0);
    const std::string pixels = data.substr(header.size());
    REQUIRE(pixels.size() == 24);
    int lit = 0;
    for (unsigned char px : pixels) lit += px == 255;
    CHECK(lit == 2);  // depth-1 centers are exactly -u and +u
    std::remove(img.c_str());
}

TEST_CASE("reports are written atomically to the output path") {
    const std::string out = "/tmp/selfaffine_cli_report.json";
    auto r = run_cli("classify --config " + config("lambda_45.cfg") + " --output " + out);
    REQUIRE(r.exit_code == 0);
    std::ifstream in(out);
    REQUIRE(in.good());
    Json rep = Json::parse(in);
    CHECK(rep["verdicts"]["uniqueness"]["verdict"] == "FiniteNonEmpty");
    std::ifstream tmp(out + ".tmp");
    CHECK_FALSE(tmp.good());  // no temp file left behind
    std::remove(out.c_str());
}

TEST_CASE("decimal matrix inputs are float mode and refuse --exact") {
    auto rep = parse_report(run_cli("classify --config " + config("matrix_rot09.cfg")));
    CHECK(rep["mode"] == "float");
    CHECK(rep["verdicts"]["uniqueness"]["confidence"] == "heuristic");
    CHECK(rep["verdicts"]["eigenstructure"]["provenance"] == "heuristic_from_matrix");
    auto refuse = run_cli("classify --config " + config("matrix_rot09.cfg") + " --exact");
    CHECK(refuse.exit_code == 1);
    CHECK(refuse.output.find("exact mode") != std::string::npos);
}

TEST_CASE("enumerate emits words alongside the count") {
    auto rep = parse_report(run_cli("enumerate --lambda 2/5 --length 3"));
    const auto& e = rep["verdicts"]["enumeration"];
    CHECK(e["count"] == 8);
    CHECK(e["undetermined"] == 0);
    REQUIRE(e["words"].is_array());
    CHECK(e["words"].size() == 8);
    CHECK(e["words"][0] == "+++");
}

}  // TEST_SUITE
