#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "selfaffine/attractor.hpp"
#include "selfaffine/classifier.hpp"
#include "selfaffine/report.hpp"
#include "selfaffine/uniqueness.hpp"

namespace sa = selfaffine;

namespace {

struct Options {
    std::string config;
    std::string output;
    std::string format;  // json | csv | pgm (per-command default when empty)
    std::uint64_t seed = 1;
    int depth = -1;  // -1: per-command default
    int depth_cap = 64;
    double precision = 1e-8;
    std::uint64_t node_budget = 0;  // 0 = per-command default
    bool exact = false;
    bool floatmode = false;
    bool strict = false;

    // command-specific
    std::string address;
    std::string lambda;
    std::string viewport;
    std::string x0;
    int length = 0;
    int blocks = 0;
    int width = 800, height = 800;
    std::size_t points = 200000;
    bool hitcount = false;
    bool search = false;
    double cert_r = 0, cert_h = 0;
};

struct LoadedInput {
    sa::ParsedInput parsed;
    std::string echo;
};

LoadedInput load_config(const Options& opt) {
    if (opt.config.empty()) throw std::invalid_argument("--config is required for this command");
    std::ifstream in(opt.config);
    if (!in) throw std::invalid_argument("cannot read config file: " + opt.config);
    std::stringstream buf;
    buf << in.rdbuf();
    LoadedInput li{sa::parse_spec(buf.str()), buf.str()};
    if (opt.exact && !li.parsed.is_spec() && !li.parsed.raw().exact)
        throw std::invalid_argument("exact mode requires rational matrix entries");
    return li;
}

// Materialize a concrete system, honoring --exact/--float.
sa::RawSystem system_from(const LoadedInput& li, const Options& opt) {
    if (li.parsed.is_spec()) {
        if (opt.exact)
            throw std::invalid_argument(
                "exact mode needs a matrix config; block specs realize as float systems");
        return sa::realize_matrix(li.parsed.spec());
    }
    sa::RawSystem sys = li.parsed.raw();
    if (opt.exact && !sys.exact)
        throw std::invalid_argument("exact mode requires rational matrix entries");
    if (opt.floatmode && sys.exact) return sa::make_raw_system_float(sys.M, sys.u);
    return sys;
}

sa::RawSystem lambda_system(const std::string& text) {
    sa::ParsedNumber num = sa::parse_number(text);
    sa::Mat<sa::Rational> M(1);
    M.at(0, 0) = num.value;
    sa::Vec<sa::Rational> u(1);
    u[0] = 1;
    return sa::make_raw_system(M, u, !num.was_decimal);
}

bool strict_trigger(const sa::Json& j) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if ((k == "verdict" || k == "status") && v.is_string()) {
                std::string s = v.get<std::string>();
                if (s == "Unknown" || s == "Undetermined" || s == "Inconclusive" ||
                    s == "PrecisionExhausted")
                    return true;
            }
            if (strict_trigger(v)) return true;
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (strict_trigger(v)) return true;
        }
    }
    return false;
}

int finish(sa::RunReport& rep, const Options& opt,
           std::chrono::steady_clock::time_point start) {
    rep.timing_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    std::string text = rep.to_json().dump(2) + "\n";
    if (!opt.output.empty() && (opt.format.empty() || opt.format == "json")) {
        sa::write_file_atomic(opt.output, text);
        rep.artifacts.push_back(opt.output);
    } else {
        std::cout << text;
    }
    return opt.strict && strict_trigger(rep.verdicts) ? 2 : 0;
}

void attach_constants(sa::RunReport& rep, const sa::UniquenessClass& cls) {
    if (cls.golden_used) rep.constants["golden_ratio"] = sa::describe(*cls.golden_used);
    if (cls.komornik_loreti_used)
        rep.constants["komornik_loreti"] = sa::describe(*cls.komornik_loreti_used);
}

int cmd_classify(const Options& opt) {
    auto start = std::chrono::steady_clock::now();
    LoadedInput li = load_config(opt);
    sa::RunReport rep;
    rep.command = "classify";
    rep.input_echo = li.echo;
    for (const auto& w : li.parsed.warnings) rep.verdicts["warnings"].push_back(w);

    sa::SpectralSpec spec;
    if (li.parsed.is_spec()) {
        spec = li.parsed.spec();
        rep.mode = "exact";
        rep.verdicts["interior"] = sa::describe(sa::interior_verdict(spec));
        rep.verdicts["connectivity"] = sa::describe(sa::connectivity_verdict(spec));
    } else {
        const sa::RawSystem& sys = li.parsed.raw();
        rep.mode = sys.exact && !opt.floatmode ? "exact" : "float";
        spec = sa::eigenstructure(sys);
        rep.verdicts["eigenstructure"] = sa::describe(spec);
        rep.verdicts["interior"] = sa::describe(sa::interior_verdict(sys));
        rep.verdicts["connectivity"] = sa::describe(sa::connectivity_verdict(sys));
    }
    sa::validate_spec(spec);
    try {
        sa::UniquenessClass cls = sa::classify_uniqueness(spec);
        rep.verdicts["uniqueness"] = sa::describe(cls);
        attach_constants(rep, cls);
    } catch (const sa::PrecisionExhausted& e) {
        rep.verdicts["uniqueness"] =
            sa::Json{{"verdict", "PrecisionExhausted"}, {"detail", e.what()}};
    }
    return finish(rep, opt, start);
}

int cmd_interior(const Options& opt) {
    auto start = std::chrono::steady_clock::now();
    LoadedInput li = load_config(opt);
    sa::RunReport rep;
    rep.command = "interior";
    rep.input_echo = li.echo;
    if (li.parsed.is_spec()) {
        rep.mode = "exact";
        rep.verdicts["interior"] = sa::describe(sa::interior_verdict(li.parsed.spec()));
    } else {
        rep.mode = li.parsed.raw().exact && !opt.floatmode ? "exact" : "float";
        rep.verdicts["interior"] = sa::describe(sa::interior_verdict(li.parsed.raw()));
    }
    if (opt.search || opt.cert_r > 0) {
        sa::RawSystem sys = system_from(li, opt);
        if (opt.cert_r > 0) {
            double h = opt.cert_h > 0 ? opt.cert_h : opt.cert_r / 8;
            int depth = opt.depth > 0 ? opt.depth : 8;
            sa::Vec<double> x0(sys.d);
            if (!opt.x0.empty()) {
                std::stringstream ss(opt.x0);
                std::string tok;
                int i = 0;
                while (std::getline(ss, tok, ',') && i < sys.d) x0[i++] = std::stod(tok);
            }
            rep.verdicts["certificate"] =
                sa::describe(sa::interior_certificate(sys, x0, opt.cert_r, depth, h));
        } else {
            int max_depth = opt.depth > 0 ? opt.depth : 24;
            auto found = sa::interior_search(sys, max_depth);
            if (found)
                rep.verdicts["certificate"] = sa::describe(*found);
            else
                rep.verdicts["certificate"] =
                    sa::Json{{"status", "Inconclusive"},
                             {"note", "no certified ball found up to depth " +
                                          std::to_string(max_depth)}};
        }
    }
    return finish(rep, opt, start);
}

int cmd_connectivity(const Options& opt) {
    auto start = std::chrono::steady_clock::now();
    LoadedInput li = load_config(opt);
    sa::RunReport rep;
    rep.command = "connectivity";
    rep.input_echo = li.echo;
    if (li.parsed.is_spec()) {
        rep.mode = "exact";
        rep.verdicts["connectivity"] = sa::describe(sa::connectivity_verdict(li.parsed.spec()));
        rep.verdicts["interior"] = sa::describe(sa::interior_verdict(li.parsed.spec()));
    } else {
        rep.mode = li.parsed.raw().exact && !opt.floatmode ? "exact" : "float";
        rep.verdicts["connectivity"] = sa::describe(sa::connectivity_verdict(li.parsed.raw()));
        rep.verdicts["interior"] = sa::describe(sa::interior_verdict(li.parsed.raw()));
    }
    return finish(rep, opt, start);
}

sa::Viewport parse_viewport(const std::string& text) {
    std::stringstream ss(text);
    std::string tok;
    double v[4];
    int i = 0;
    while (std::getline(ss, tok, ',') && i < 4) v[i++] = std::stod(tok);
    if (i != 4) throw std::invalid_argument("viewport needs xmin,xmax,ymin,ymax");
    return {v[0], v[1], v[2], v[3]};
}

int cmd_render(const Options& opt) {
    auto start = std::chrono::steady_clock::now();
    if (opt.output.empty()) throw std::invalid_argument("render requires --output for the image");
    LoadedInput li = load_config(opt);
    sa::RawSystem sys = system_from(li, opt);
    std::vector<sa::Vec<double>> pts;
    int depth = opt.depth;
    if (depth > 0) {
        pts = sa::cylinder_cloud(sys, depth).centers;
    } else {
        pts = sa::chaos_game(sys, opt.points, opt.seed);
    }
    sa::Viewport vp;
    if (!opt.viewport.empty()) {
        vp = parse_viewport(opt.viewport);
    } else {
        double t0 = sa::tail_bound(sys, 0);
        vp = {-t0, t0, -t0, t0};
    }
    sa::Pgm img = sa::render_image(pts, vp, opt.width, opt.height,
                                   opt.hitcount ? sa::RenderMode::HitCount
                                                : sa::RenderMode::Binary);
    sa::write_file_atomic(opt.output, img.serialize());

    sa::RunReport rep;
    rep.command = "render";
    rep.input_echo = li.echo;
    rep.mode = sys.exact ? "exact" : "float";
    rep.verdicts["render"] = sa::Json{{"points", pts.size()},
                                      {"width", opt.width},
                                      {"height", opt.height},
                                      {"source", depth > 0 ? "cylinders" : "chaos"},
                                      {"seed", opt.seed},
                                      {"viewport", {vp.xmin, vp.xmax, vp.ymin, vp.ymax}}};
    rep.artifacts.push_back(opt.output);
    rep.timing_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    std::cout << rep.to_json().dump(2) << "\n";
    return 0;
}

sa::RawSystem unique_system(const Options& opt) {
    if (!opt.lambda.empty()) return lambda_system(opt.lambda);
    LoadedInput li = load_config(opt);
    return system_from(li, opt);
}

int cmd_unique(const Options& opt) {
    auto start = std::chrono::steady_clock::now();
    if (opt.address.empty() && opt.length == 0)
        throw std::invalid_argument("unique needs --address or --length");
    sa::RawSystem sys = unique_system(opt);
    sa::RunReport rep;
    rep.command = "unique";
    rep.input_echo = opt.lambda.empty() ? load_config(opt).echo : "lambda " + opt.lambda;
    rep.mode = sys.exact ? "exact" : "float";

    if (!opt.address.empty()) {
        sa::Address a = sa::parse_address(opt.address);
        sa::Certification cert = sa::certify_address(
            sys, a, opt.depth_cap, opt.node_budget ? opt.node_budget : 10000000);
        rep.verdicts["address"] = sa::format_address(a);
        rep.verdicts["certification"] = sa::describe(cert);
        return finish(rep, opt, start);
    }

    // --length: table of N_n for n = 1..length
    std::vector<std::uint64_t> counts;
    sa::Json rows = sa::Json::array();
    std::string csv = "n,count\n";
    for (int n = 1; n <= opt.length; ++n) {
        sa::Enumeration e = sa::enumerate_unique_periodic(
            sys, n, opt.depth_cap, opt.node_budget ? opt.node_budget : 2000);
        counts.push_back(e.count);
        rows.push_back(sa::Json{{"n", n}, {"count", e.count}, {"undetermined", e.undetermined}});
        csv += std::to_string(n) + "," + std::to_string(e.count) + "\n";
    }
    std::string fmt = opt.format.empty() ? "csv" : opt.format;
    if (fmt == "csv") {
        if (opt.output.empty())
            std::cout << csv;
        else
            sa::write_file_atomic(opt.output, csv);
        return 0;
    }
    rep.verdicts["counts"] = rows;
    return finish(rep, opt, start);
}

int cmd_enumerate(const Options& opt) {
    auto start = std::chrono::steady_clock::now();
    if (opt.length < 1) throw std::invalid_argument("enumerate needs --length >= 1");
    sa::RawSystem sys = unique_system(opt);
    sa::Enumeration e = sa::enumerate_unique_periodic(
        sys, opt.length, opt.depth_cap, opt.node_budget ? opt.node_budget : 2000);
    std::string fmt = opt.format.empty() ? "json" : opt.format;
    if (fmt == "csv") {
        std::string csv = "word\n";
        for (const auto& w : e.words) csv += w + "\n";
        if (opt.output.empty())
            std::cout << csv;
        else
            sa::write_file_atomic(opt.output, csv);
        return 0;
    }
    sa::RunReport rep;
    rep.command = "enumerate";
    rep.input_echo = opt.lambda.empty() ? load_config(opt).echo : "lambda " + opt.lambda;
    rep.mode = sys.exact ? "exact" : "float";
    rep.verdicts["enumeration"] = sa::Json{{"n", e.n},
                                           {"count", e.count},
                                           {"undetermined", e.undetermined},
                                           {"words", e.words}};
    return finish(rep, opt, start);
}

int cmd_constants(const Options& opt) {
    auto start = std::chrono::steady_clock::now();
    sa::RunReport rep;
    rep.command = "constants";
    rep.input_echo = "precision " + sa::format_double17(opt.precision);
    rep.mode = "exact";
    sa::Enclosure kl = sa::komornik_loreti(opt.precision);
    sa::Enclosure g = sa::golden_ratio(opt.precision);
    rep.constants["komornik_loreti"] = sa::describe(kl);
    rep.constants["golden_ratio"] = sa::describe(g);
    return finish(rep, opt, start);
}

int cmd_decompose_check(const Options& opt) {
    auto start = std::chrono::steady_clock::now();
    if (opt.blocks < 1) throw std::invalid_argument("decompose-check needs --blocks >= 1");
    LoadedInput li = load_config(opt);
    sa::RawSystem sys = system_from(li, opt);
    int depth = opt.depth > 0 ? opt.depth : 3 * opt.blocks;
    sa::RunReport rep;
    rep.command = "decompose-check";
    rep.input_echo = li.echo;
    rep.mode = sys.exact ? "exact" : "float";
    rep.verdicts["decomposition"] =
        sa::describe(sa::minkowski_decomposition_check(sys, opt.blocks, depth));
    return finish(rep, opt, start);
}

int cmd_project(const Options& opt) {
    auto start = std::chrono::steady_clock::now();
    if (opt.address.empty()) throw std::invalid_argument("project needs --address");
    sa::RawSystem sys = unique_system(opt);
    sa::Address a = sa::parse_address(opt.address);
    int depth = opt.depth > 0 ? opt.depth : 32;
    sa::Projection p = sa::project_address(sys, a, depth);
    sa::RunReport rep;
    rep.command = "project";
    rep.input_echo = opt.lambda.empty() ? load_config(opt).echo : "lambda " + opt.lambda;
    rep.mode = sys.exact ? "exact" : "float";
    sa::Json pj;
    pj["address"] = sa::format_address(a);
    pj["depth"] = depth;
    pj["point"] = sa::Json::array();
    for (int i = 0; i < sys.d; ++i) pj["point"].push_back(p.point[i]);
    pj["radius"] = p.radius;
    if (sys.exact && a.periodic()) {
        sa::Vec<sa::Rational> x = sa::project_exact_periodic(sys, a);
        sa::Json ex = sa::Json::array(), exd = sa::Json::array();
        for (int i = 0; i < sys.d; ++i) {
            ex.push_back(sa::to_string(x[i]));
            exd.push_back(sa::to_double(x[i]));
        }
        pj["exact_point"] = ex;
        pj["exact_point_decimal"] = exd;
    }
    rep.verdicts["projection"] = pj;
    return finish(rep, opt, start);
}

}  // namespace

int main(int argc, char** argv) {
    sa::apply_thread_env();
    Options opt;
    CLI::App app{"Two-digit self-affine attractor toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", opt.config, "input config file");
    app.add_option("--output", opt.output, "output file (written atomically)");
    app.add_option("--format", opt.format, "json | csv | pgm")
        ->check(CLI::IsMember({"json", "csv", "pgm"}));
    app.add_option("--seed", opt.seed, "RNG seed");
    app.add_option("--depth", opt.depth, "depth / expansion length");
    app.add_option("--depth-cap", opt.depth_cap, "certification depth cap");
    app.add_option("--precision", opt.precision, "target enclosure width");
    app.add_option("--node-budget", opt.node_budget, "search node budget per shift class");
    auto* fexact = app.add_flag("--exact", opt.exact, "require exact rational arithmetic");
    app.add_flag("--float", opt.floatmode, "force float arithmetic")->excludes(fexact);
    app.add_flag("--strict", opt.strict, "exit 2 on Unknown/Undetermined verdicts");

    auto* classify = app.add_subcommand("classify", "uniqueness-set classification");
    auto* interior = app.add_subcommand("interior", "interior verdict and covering certificates");
    interior->add_flag("--search", opt.search, "search for a certified interior ball");
    interior->add_option("--radius", opt.cert_r, "certificate ball radius");
    interior->add_option("--spacing", opt.cert_h, "certificate grid spacing");
    interior->add_option("--x0", opt.x0, "certificate center, comma-separated");
    auto* connectivity = app.add_subcommand("connectivity", "connectivity verdict");
    auto* render = app.add_subcommand("render", "attractor image (PGM)");
    render->add_option("--width", opt.width, "image width");
    render->add_option("--height", opt.height, "image height");
    render->add_option("--points", opt.points, "chaos-game sample count");
    render->add_option("--viewport", opt.viewport, "xmin,xmax,ymin,ymax");
    render->add_flag("--hitcount", opt.hitcount, "grayscale hit counts instead of binary");
    auto* unique = app.add_subcommand("unique", "certify addresses / count unique words");
    unique->add_option("--address", opt.address, "address like '+-(+-)'");
    unique->add_option("--length", opt.length, "table of N_n for n = 1..length");
    unique->add_option("--lambda", opt.lambda, "1D shortcut: contraction ratio");
    auto* enumerate = app.add_subcommand("enumerate", "unique periodic words of one length");
    enumerate->add_option("--length", opt.length, "word length n")->required();
    enumerate->add_option("--lambda", opt.lambda, "1D shortcut: contraction ratio");
    auto* constants = app.add_subcommand("constants", "certified constant enclosures");
    auto* decompose = app.add_subcommand("decompose-check", "Minkowski decomposition identity");
    decompose->add_option("--blocks", opt.blocks, "number of factors")->required();
    auto* project = app.add_subcommand("project", "evaluate an address");
    project->add_option("--address", opt.address, "address like '+-(+-)'")->required();
    project->add_option("--lambda", opt.lambda, "1D shortcut: contraction ratio");

    CLI11_PARSE(app, argc, argv);

    try {
        if (classify->parsed()) return cmd_classify(opt);
        if (interior->parsed()) return cmd_interior(opt);
        if (connectivity->parsed()) return cmd_connectivity(opt);
        if (render->parsed()) return cmd_render(opt);
        if (unique->parsed()) return cmd_unique(opt);
        if (enumerate->parsed()) return cmd_enumerate(opt);
        if (constants->parsed()) return cmd_constants(opt);
        if (decompose->parsed()) return cmd_decompose_check(opt);
        if (project->parsed()) return cmd_project(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}
