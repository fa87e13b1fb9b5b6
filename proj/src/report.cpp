#include "selfaffine/report.hpp"

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace selfaffine {

std::string tool_name() { return "selfaffine"; }
std::string tool_version() { return "0.1.0"; }

int apply_thread_env() {
    const char* env = std::getenv("SELFAFFINE_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) return 0;
    omp_set_num_threads(static_cast<int>(n));
    return static_cast<int>(n);
}

void write_file_atomic(const std::string& path, const std::string& data) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
    }
}

namespace {

const char* kind_name(BlockKind k) {
    switch (k) {
        case BlockKind::RealPositive: return "real+";
        case BlockKind::RealNegative: return "real-";
        case BlockKind::Jordan: return "jordan";
        case BlockKind::Rotation: return "rotation";
    }
    return "?";
}

Json describe(const AngleTag& a) {
    Json j;
    switch (a.type) {
        case AngleTag::Type::None: j["type"] = "none"; break;
        case AngleTag::Type::RationalPi:
            j["type"] = "rational_pi";
            j["p"] = a.p;
            j["s"] = a.s;
            break;
        case AngleTag::Type::Irrational:
            j["type"] = "irrational";
            break;
    }
    if (a.type != AngleTag::Type::None) j["radians"] = a.value();
    return j;
}

}  // namespace

Json describe(const SpectralSpec& spec) {
    Json blocks = Json::array();
    for (const auto& b : spec.blocks) {
        Json j;
        j["kind"] = kind_name(b.kind);
        j["modulus"] = b.modulus;
        if (spec.provenance == SpectralSpec::Provenance::Exact)
            j["modulus_exact"] = to_string(b.modulus_exact);
        if (b.angle.type != AngleTag::Type::None) j["angle"] = describe(b.angle);
        if (b.size > 1) j["size"] = b.size;
        blocks.push_back(std::move(j));
    }
    return Json{{"blocks", std::move(blocks)},
                {"dimension", spec.dimension()},
                {"provenance", spec.provenance == SpectralSpec::Provenance::Exact
                                   ? "exact"
                                   : "heuristic_from_matrix"},
                {"tolerance", spec.tolerance}};
}

Json describe(const UniquenessClass& c) {
    Json j;
    switch (c.verdict) {
        case UniquenessVerdict::FiniteNonEmpty: j["verdict"] = "FiniteNonEmpty"; break;
        case UniquenessVerdict::InfiniteCountable: j["verdict"] = "InfiniteCountable"; break;
        case UniquenessVerdict::UncountableZeroDim: j["verdict"] = "UncountableZeroDim"; break;
        case UniquenessVerdict::PositiveHausdorffDim: j["verdict"] = "PositiveHausdorffDim"; break;
    }
    switch (c.rule) {
        case ClassifierRule::Jordan: j["rule"] = "Jordan"; break;
        case ClassifierRule::IrrationalAngle: j["rule"] = "IrrationalAngle"; break;
        case ClassifierRule::DistinctModuli: j["rule"] = "DistinctModuli"; break;
        case ClassifierRule::RationalEqualModuli: j["rule"] = "RationalEqualModuli"; break;
    }
    j["confidence"] = c.confidence == Confidence::Exact ? "exact" : "heuristic";
    if (c.rule == ClassifierRule::RationalEqualModuli) {
        j["beta"] = c.beta;
        if (c.beta_exact) j["beta_exact"] = to_string(*c.beta_exact);
        j["q"] = c.q;
        j["sign_conflict"] = c.sign_conflict;
        j["block_signs"] = c.block_signs;
    }
    return j;
}

Json describe(const InteriorVerdict& v) {
    Json j;
    switch (v.verdict) {
        case InteriorVerdict::V::NonEmptyByTheorem: j["verdict"] = "NonEmptyByTheorem"; break;
        case InteriorVerdict::V::EmptyNullSet: j["verdict"] = "EmptyNullSet"; break;
        case InteriorVerdict::V::Unknown: j["verdict"] = "Unknown"; break;
    }
    j["dimension"] = v.d;
    j["det_abs"] = v.det_abs;
    if (v.det_abs_exact) j["det_abs_exact"] = to_string(*v.det_abs_exact);
    j["threshold_nonempty"] = v.threshold_hi;
    j["threshold_empty"] = v.threshold_lo;
    return j;
}

Json describe(Connectivity c) {
    return Json{{"verdict", c == Connectivity::PathConnected ? "PathConnected" : "Unknown"}};
}

Json describe(const Enclosure& e) {
    return Json{{"lo", e.lo}, {"hi", e.hi}, {"width", e.width()}};
}

Json describe(const Certification& c) {
    Json j;
    switch (c.status) {
        case Certification::Status::UniqueCertified: j["status"] = "UniqueCertified"; break;
        case Certification::Status::CollisionFound: j["status"] = "CollisionFound"; break;
        case Certification::Status::Undetermined: j["status"] = "Undetermined"; break;
    }
    j["exact"] = c.exact;
    j["depth_cap"] = c.depth_cap;
    j["node_budget"] = c.node_budget;
    if (c.witness) {
        const Witness& w = *c.witness;
        Json wj{{"shift", w.shift}, {"head_flips", w.head_flips}, {"periodic", w.periodic}};
        if (w.periodic) {
            wj["cycle_begin"] = w.cycle_begin;
            wj["cycle_end"] = w.cycle_end;
            wj["cycle_flips"] = w.cycle_flips;
        }
        j["witness"] = std::move(wj);
    }
    Json stats = Json::array();
    for (const auto& s : c.shifts)
        stats.push_back(Json{{"shift", s.shift},
                             {"nodes", s.nodes},
                             {"prunes", s.prunes},
                             {"max_depth", s.max_depth},
                             {"exhausted", s.exhausted}});
    j["shifts"] = std::move(stats);
    return j;
}

Json describe(const InteriorCertificate& c) {
    Json j;
    j["status"] =
        c.status == InteriorCertificate::Status::Certified ? "Certified" : "Inconclusive";
    j["depth"] = c.depth;
    j["r"] = c.r;
    j["h"] = c.h;
    j["sigma_min"] = c.sigma_min;
    j["effective_radius"] = c.effective_radius;
    j["lattice_points"] = c.lattice_points;
    j["uncovered"] = c.uncovered;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

Json describe(const DecompositionReport& r) {
    Json j{{"equal", r.equal}, {"exact", r.exact}, {"depth", r.depth}, {"blocks", r.blocks}};
    if (r.first_mismatch_index) j["first_mismatch_index"] = *r.first_mismatch_index;
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

Json RunReport::to_json() const {
    return Json{{"schema_version", 1},
                {"tool", Json{{"name", tool_name()}, {"version", tool_version()}}},
                {"command", command},
                {"input", input_echo},
                {"mode", mode},
                {"verdicts", verdicts},
                {"constants", constants},
                {"artifacts", artifacts},
                {"timing_ms", timing_ms}};
}

}  // namespace selfaffine
