#include "selfaffine/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

namespace selfaffine {

double AngleTag::value() const {
    switch (type) {
        case Type::RationalPi:
            return static_cast<double>(p) / static_cast<double>(s) * M_PI;
        case Type::Irrational:
            return radians;
        default:
            return 0;
    }
}

int SpectralBlock::dim() const {
    int base = kind == BlockKind::Jordan ? size : 1;
    return is_complex() || kind == BlockKind::Rotation ? 2 * base : base;
}

int SpectralSpec::dimension() const {
    int d = 0;
    for (const auto& b : blocks) d += b.dim();
    return d;
}

double spectral_radius(const Mat<double>& M) {
    Eigen::MatrixXd A(M.d, M.d);
    for (std::size_t r = 0; r < M.d; ++r)
        for (std::size_t c = 0; c < M.d; ++c) A(r, c) = M.at(r, c);
    return A.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

void validate_system(const Mat<double>& M, const Vec<double>& u, bool det_nonzero) {
    bool uz = true;
    for (std::size_t i = 0; i < u.dim(); ++i)
        if (u[i] != 0) uz = false;
    if (uz) throw std::invalid_argument("digit vector u must be nonzero");
    if (!det_nonzero) throw std::invalid_argument("matrix must be invertible (det != 0)");
    double rho = spectral_radius(M);
    if (!(rho < 1.0))
        throw std::invalid_argument("spectral radius must be < 1 (got " + format_double17(rho) +
                                    ")");
}

}  // namespace

RawSystem make_raw_system(Mat<Rational> M, Vec<Rational> u, bool exact) {
    RawSystem sys;
    sys.d = static_cast<int>(M.d);
    if (u.dim() != M.d) throw std::invalid_argument("u dimension does not match matrix");
    // GMP comparisons misbehave on non-canonical fractions, and callers can
    // construct those directly with mpq_class(n, d).
    for (std::size_t i = 0; i < M.d; ++i) {
        u[i].canonicalize();
        for (std::size_t j = 0; j < M.d; ++j) M.at(i, j).canonicalize();
    }
    sys.M = to_double_mat(M);
    sys.u = to_double_vec(u);
    validate_system(sys.M, sys.u, determinant(M) != 0);
    sys.exact = exact;
    if (exact) {
        sys.M_exact = std::move(M);
        sys.u_exact = std::move(u);
    }
    return sys;
}

RawSystem make_raw_system_float(Mat<double> M, Vec<double> u) {
    RawSystem sys;
    sys.d = static_cast<int>(M.d);
    if (u.dim() != M.d) throw std::invalid_argument("u dimension does not match matrix");
    validate_system(M, u, determinant(M) != 0.0);
    sys.exact = false;
    sys.M = std::move(M);
    sys.u = std::move(u);
    return sys;
}

// ---------------------------------------------------------------------------
// Configuration parsing
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

// key=value pair; throws naming the token when '=' is missing.
std::pair<std::string, std::string> split_kv(const std::string& tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
        throw std::invalid_argument("expected key=value, got '" + tok + "'");
    return {tok.substr(0, eq), tok.substr(eq + 1)};
}

AngleTag parse_angle(const std::string& text, std::vector<std::string>& warnings) {
    AngleTag tag;
    if (text.rfind("irrational:", 0) == 0) {
        double v = std::stod(text.substr(11));
        if (!(v > 0 && v < M_PI))
            throw std::invalid_argument("angle must lie in (0, pi): '" + text + "'");
        tag.type = AngleTag::Type::Irrational;
        tag.radians = v;
        return tag;
    }
    if (text.size() < 3 || text.substr(text.size() - 2) != "pi")
        throw std::invalid_argument("angle must end in 'pi' or use irrational:<radians>: '" +
                                    text + "'");
    Rational frac = parse_number(text.substr(0, text.size() - 2)).value;
    if (!(frac > 0 && frac < 1))
        throw std::invalid_argument("angle fraction must lie in (0,1): '" + text + "'");
    tag.type = AngleTag::Type::RationalPi;
    tag.p = static_cast<long>(frac.get_num().get_si());
    tag.s = static_cast<long>(frac.get_den().get_si());
    // parse_number canonicalizes, so a reducible surface form like 2/4pi has
    // already been reduced; warn when the text disagrees with the fraction.
    std::string canonical = frac.get_str() + "pi";
    if (canonical != text && text.find('/') != std::string::npos)
        warnings.push_back("angle fraction '" + text + "' reduced to " + canonical);
    return tag;
}

SpectralBlock parse_block_line(const std::vector<std::string>& toks,
                               std::vector<std::string>& warnings) {
    if (toks.size() < 2) throw std::invalid_argument("block line missing kind");
    const std::string& kind = toks[1];
    SpectralBlock b;
    bool force_negative = false, force_positive = false;
    if (kind == "real")
        b.kind = BlockKind::RealPositive;
    else if (kind == "real+")
        b.kind = BlockKind::RealPositive, force_positive = true;
    else if (kind == "real-")
        b.kind = BlockKind::RealNegative, force_negative = true;
    else if (kind == "jordan")
        b.kind = BlockKind::Jordan;
    else if (kind == "rotation")
        b.kind = BlockKind::Rotation;
    else
        throw std::invalid_argument("unknown block kind '" + kind + "'");

    bool saw_modulus = false, saw_size = false;
    for (std::size_t i = 2; i < toks.size(); ++i) {
        auto [key, value] = split_kv(toks[i]);
        if (key == "modulus" || key == "r" || key == "k") {
            Rational v = parse_number(value).value;
            if (v < 0) {
                if (force_negative || force_positive)
                    throw std::invalid_argument("signed modulus not allowed with kind '" + kind +
                                                "'");
                if (b.kind == BlockKind::RealPositive) b.kind = BlockKind::RealNegative;
                else if (b.kind != BlockKind::RealNegative)
                    throw std::invalid_argument("modulus must be positive for kind '" + kind +
                                                "'");
                v = -v;
            }
            if (!(v > 0 && v < 1))
                throw std::invalid_argument("modulus not in (0,1): '" + value + "'");
            b.modulus_exact = v;
            b.modulus = to_double(v);
            saw_modulus = true;
        } else if (key == "angle") {
            if (b.kind != BlockKind::Rotation && b.kind != BlockKind::Jordan)
                throw std::invalid_argument("key 'angle' only valid on rotation/jordan blocks");
            b.angle = parse_angle(value, warnings);
        } else if (key == "size") {
            if (b.kind != BlockKind::Jordan)
                throw std::invalid_argument("key 'size' only valid on jordan blocks");
            b.size = std::stoi(value);
            saw_size = true;
        } else {
            throw std::invalid_argument("unknown block key '" + key + "'");
        }
    }
    if (!saw_modulus) throw std::invalid_argument("block missing key 'modulus'");
    if (b.kind == BlockKind::Rotation && b.angle.type == AngleTag::Type::None)
        throw std::invalid_argument("rotation block missing key 'angle'");
    if (b.kind == BlockKind::Jordan && (!saw_size || b.size < 2))
        throw std::invalid_argument("jordan block requires size >= 2");
    return b;
}

}  // namespace

ParsedInput parse_spec(const std::string& text) {
    ParsedInput out;
    std::vector<SpectralBlock> blocks;

    bool in_matrix = false;
    int want_d = 0;
    std::vector<std::vector<ParsedNumber>> rows;
    std::vector<ParsedNumber> uvec;
    std::string mode;  // "", "exact", "float"

    std::istringstream in(text);
    std::string raw_line;
    while (std::getline(in, raw_line)) {
        if (auto hash = raw_line.find('#'); hash != std::string::npos)
            raw_line = raw_line.substr(0, hash);
        auto toks = tokenize(raw_line);
        if (toks.empty()) continue;
        const std::string& head = toks[0];

        if (head == "block") {
            if (in_matrix)
                throw std::invalid_argument("cannot mix 'block' lines with a matrix section");
            blocks.push_back(parse_block_line(toks, out.warnings));
        } else if (head == "matrix") {
            if (!blocks.empty())
                throw std::invalid_argument("cannot mix a matrix section with 'block' lines");
            if (in_matrix) throw std::invalid_argument("duplicate 'matrix' line");
            in_matrix = true;
            if (toks.size() != 2) throw std::invalid_argument("matrix line must be 'matrix d=N'");
            auto [key, value] = split_kv(toks[1]);
            if (key != "d") throw std::invalid_argument("matrix line must be 'matrix d=N'");
            want_d = std::stoi(value);
            if (want_d < 1 || want_d > 16)
                throw std::invalid_argument("matrix dimension out of range: d=" + value);
        } else if (head == "row" || head == "u") {
            if (!in_matrix)
                throw std::invalid_argument("'" + head + "' line outside a matrix section");
            std::vector<ParsedNumber> nums;
            for (std::size_t i = 1; i < toks.size(); ++i) nums.push_back(parse_number(toks[i]));
            if (static_cast<int>(nums.size()) != want_d)
                throw std::invalid_argument("'" + head + "' line needs exactly " +
                                            std::to_string(want_d) + " entries");
            if (head == "row")
                rows.push_back(std::move(nums));
            else if (uvec.empty())
                uvec = std::move(nums);
            else
                throw std::invalid_argument("duplicate 'u' line");
        } else if (head == "mode") {
            if (toks.size() != 2 || (toks[1] != "exact" && toks[1] != "float"))
                throw std::invalid_argument("mode must be 'exact' or 'float'");
            mode = toks[1];
        } else {
            throw std::invalid_argument("unknown directive '" + head + "'");
        }
    }

    if (in_matrix) {
        if (static_cast<int>(rows.size()) != want_d)
            throw std::invalid_argument("matrix section needs exactly " + std::to_string(want_d) +
                                        " 'row' lines");
        if (uvec.empty()) throw std::invalid_argument("matrix section missing 'u' line");
        bool any_decimal = false;
        for (const auto& r : rows)
            for (const auto& n : r) any_decimal |= n.was_decimal;
        for (const auto& n : uvec) any_decimal |= n.was_decimal;
        if (mode == "exact" && any_decimal)
            throw std::invalid_argument("decimal entries force float mode; write rationals a/b");
        bool exact = mode.empty() ? !any_decimal : mode == "exact";
        Mat<Rational> M(want_d);
        Vec<Rational> u(want_d);
        for (int r = 0; r < want_d; ++r)
            for (int c = 0; c < want_d; ++c) M.at(r, c) = rows[r][c].value;
        for (int i = 0; i < want_d; ++i) u[i] = uvec[i].value;
        out.value = make_raw_system(std::move(M), std::move(u), exact);
        return out;
    }

    if (blocks.empty()) throw std::invalid_argument("configuration defines no system");
    SpectralSpec spec;
    spec.blocks = std::move(blocks);
    spec.provenance = SpectralSpec::Provenance::Exact;
    out.value = std::move(spec);
    return out;
}

// ---------------------------------------------------------------------------
// Krylov / eigenstructure
// ---------------------------------------------------------------------------

KrylovResult krylov_cyclic_check(const RawSystem& sys) {
    KrylovResult res;
    if (sys.exact) {
        std::vector<Vec<Rational>> cols;
        Vec<Rational> v = sys.u_exact;
        for (int k = 0; k < sys.d; ++k) {
            cols.push_back(v);
            v = sys.M_exact * v;
        }
        res.rank = column_rank(cols, Rational(0));
    } else {
        std::vector<Vec<double>> cols;
        Vec<double> v = sys.u;
        for (int k = 0; k < sys.d; ++k) {
            cols.push_back(v);
            v = sys.M * v;
        }
        res.rank = column_rank(cols, 1e-9);
    }
    res.cyclic = res.rank == static_cast<std::size_t>(sys.d);
    return res;
}

RationalApprox best_rational_approx(double t, long cap) {
    if (cap < 1) throw std::invalid_argument("denominator cap must be >= 1");
    // Continued-fraction expansion with a final semiconvergent: the best
    // approximation with denominator <= cap is the last convergent that fits
    // or the largest semiconvergent built from the last two.
    long h_prev = 1, k_prev = 0;            // h_{-1}/k_{-1}
    long h_cur = static_cast<long>(std::floor(t)), k_cur = 1;
    double x = t - std::floor(t);
    for (int iter = 0; iter < 64; ++iter) {
        if (x < 1e-15) break;
        x = 1.0 / x;
        double ai = std::floor(x);
        if (ai > 1e15) break;
        x -= ai;
        long a = static_cast<long>(ai);
        long h_next = a * h_cur + h_prev;
        long k_next = a * k_cur + k_prev;
        if (k_next > cap) {
            long j = (cap - k_prev) / k_cur;  // largest semiconvergent within cap
            if (j > 0) {
                long hs = j * h_cur + h_prev, ks = j * k_cur + k_prev;
                if (std::fabs(t - double(hs) / double(ks)) <
                    std::fabs(t - double(h_cur) / double(k_cur))) {
                    h_cur = hs;
                    k_cur = ks;
                }
            }
            break;
        }
        h_prev = h_cur;
        k_prev = k_cur;
        h_cur = h_next;
        k_cur = k_next;
    }
    RationalApprox out;
    long g = std::gcd(std::labs(h_cur), k_cur);
    if (g > 1) h_cur /= g, k_cur /= g;
    out.p = h_cur;
    out.s = k_cur;
    out.error = std::fabs(t - double(h_cur) / double(k_cur));
    return out;
}

namespace {

std::size_t rank_double(const Mat<double>& A, double abs_tol) {
    std::vector<Vec<double>> cols;
    for (std::size_t c = 0; c < A.d; ++c) {
        Vec<double> v(A.d);
        for (std::size_t r = 0; r < A.d; ++r) v[r] = A.at(r, c);
        cols.push_back(std::move(v));
    }
    return column_rank(cols, abs_tol);  // column_rank scales by the largest entry
}

}  // namespace

SpectralSpec eigenstructure(const RawSystem& sys, long angle_denominator_cap, double tolerance) {
    if (!krylov_cyclic_check(sys).cyclic)
        throw std::invalid_argument("eigenstructure requires a cyclic system");

    Eigen::MatrixXd A(sys.d, sys.d);
    for (int r = 0; r < sys.d; ++r)
        for (int c = 0; c < sys.d; ++c) A(r, c) = sys.M.at(r, c);
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed to converge");

    double scale = std::max(1.0, sys.M.inf_norm());
    double radius =
        std::max(tolerance, 64.0 * std::sqrt(std::numeric_limits<double>::epsilon()) * scale);

    // Representatives: all real eigenvalues, one of each conjugate pair.
    struct Rep {
        std::complex<double> z;
        bool complex_pair;
    };
    std::vector<Rep> reps;
    for (int i = 0; i < sys.d; ++i) {
        std::complex<double> z = es.eigenvalues()[i];
        if (z.imag() > 0)
            reps.push_back({z, true});
        else if (z.imag() == 0)
            reps.push_back({z, false});
    }

    // Single-linkage clustering at distance `radius`.
    std::vector<int> group(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) group[i] = static_cast<int>(i);
    auto find = [&](int i) {
        while (group[i] != i) i = group[i] = group[group[i]];
        return i;
    };
    for (std::size_t i = 0; i < reps.size(); ++i)
        for (std::size_t j = i + 1; j < reps.size(); ++j)
            if (std::abs(reps[i].z - reps[j].z) <= radius) group[find(int(i))] = find(int(j));

    SpectralSpec spec;
    spec.provenance = SpectralSpec::Provenance::HeuristicFromMatrix;
    spec.tolerance = tolerance;

    std::vector<int> roots;
    for (std::size_t i = 0; i < reps.size(); ++i)
        if (find(int(i)) == int(i)) roots.push_back(int(i));

    for (int root : roots) {
        std::complex<double> sum{0, 0};
        int m = 0;
        bool any_complex = false, any_real = false;
        for (std::size_t i = 0; i < reps.size(); ++i)
            if (find(int(i)) == root) {
                sum += reps[i].z;
                ++m;
                (reps[i].complex_pair ? any_complex : any_real) = true;
            }
        if (any_complex && any_real)
            throw std::runtime_error(
                "ill-conditioned eigenstructure: real/complex ambiguity within tolerance");
        std::complex<double> mu = sum / double(m);

        SpectralBlock b;
        if (!any_complex) {
            double lam = mu.real();
            b.kind = lam >= 0 ? BlockKind::RealPositive : BlockKind::RealNegative;
            b.modulus = std::fabs(lam);
            if (m > 1) {
                Mat<double> shifted = sys.M;
                for (int i = 0; i < sys.d; ++i) shifted.at(i, i) -= lam;
                std::size_t nullity = sys.d - rank_double(shifted, radius);
                if (nullity != 1)
                    throw std::runtime_error(
                        "ill-conditioned eigenstructure: repeated eigenvalue is not a clean "
                        "Jordan chain");
                b.kind = BlockKind::Jordan;
                b.size = m;
            }
        } else {
            b.modulus = std::abs(mu);
            double t = std::arg(mu) / M_PI;  // in (0,1): Im(mu) > 0
            RationalApprox ra = best_rational_approx(t, angle_denominator_cap);
            if (ra.error <= tolerance && ra.p > 0) {
                b.angle.type = AngleTag::Type::RationalPi;
                b.angle.p = ra.p;
                b.angle.s = ra.s;
            } else {
                b.angle.type = AngleTag::Type::Irrational;
                b.angle.radians = std::arg(mu);
            }
            if (m == 1) {
                b.kind = BlockKind::Rotation;
            } else {
                // Real quadratic divisor M^2 - 2Re(mu) M + |mu|^2 I has
                // nullity 2 exactly when the pair heads one Jordan chain.
                Mat<double> quad = sys.M * sys.M;
                for (int r = 0; r < sys.d; ++r) {
                    for (int c = 0; c < sys.d; ++c) quad.at(r, c) -= 2 * mu.real() * sys.M.at(r, c);
                    quad.at(r, r) += std::norm(mu);
                }
                std::size_t nullity = sys.d - rank_double(quad, radius);
                if (nullity != 2)
                    throw std::runtime_error(
                        "ill-conditioned eigenstructure: repeated complex pair is not a clean "
                        "Jordan chain");
                b.kind = BlockKind::Jordan;
                b.size = m;
            }
        }
        b.modulus_exact = rational_from_double(b.modulus);
        spec.blocks.push_back(std::move(b));
    }

    std::sort(spec.blocks.begin(), spec.blocks.end(), [](const auto& x, const auto& y) {
        if (x.modulus != y.modulus) return x.modulus < y.modulus;
        if (x.angle.value() != y.angle.value()) return x.angle.value() < y.angle.value();
        return static_cast<int>(x.kind) < static_cast<int>(y.kind);
    });
    return spec;
}

long minimal_real_power(const SpectralSpec& spec) {
    long q = 1;
    for (const auto& b : spec.blocks) {
        switch (b.angle.type) {
            case AngleTag::Type::None:
                break;  // real eigenvalue: q_j = 1
            case AngleTag::Type::RationalPi:
                q = std::lcm(q, b.angle.s);
                break;
            case AngleTag::Type::Irrational:
                throw std::invalid_argument("q undefined: block has an irrational angle");
        }
    }
    return q;
}

int sign_of_power(const SpectralBlock& block, long q) {
    if (q < 1) throw std::invalid_argument("q must be >= 1");
    switch (block.angle.type) {
        case AngleTag::Type::Irrational:
            throw std::invalid_argument("sign_of_power: irrational angle has no real power");
        case AngleTag::Type::RationalPi: {
            if (q % block.angle.s != 0)
                throw std::invalid_argument("sign_of_power: q*(p/s) is not an integer");
            long e = (q / block.angle.s) * block.angle.p;
            return (e % 2 == 0) ? 1 : -1;
        }
        case AngleTag::Type::None:
            if (block.kind == BlockKind::RealNegative) return (q % 2 == 0) ? 1 : -1;
            return 1;
    }
    return 1;
}

RawSystem realize_matrix(const SpectralSpec& spec) {
    int d = spec.dimension();
    Mat<double> M(d);
    Vec<double> u(d);
    int off = 0;
    for (const auto& b : spec.blocks) {
        double m = b.modulus;
        switch (b.kind) {
            case BlockKind::RealPositive:
            case BlockKind::RealNegative: {
                M.at(off, off) = b.kind == BlockKind::RealNegative ? -m : m;
                u[off] = 1;
                off += 1;
                break;
            }
            case BlockKind::Rotation: {
                double th = b.angle.value();
                M.at(off, off) = m * std::cos(th);
                M.at(off, off + 1) = -m * std::sin(th);
                M.at(off + 1, off) = m * std::sin(th);
                M.at(off + 1, off + 1) = m * std::cos(th);
                u[off] = 1;
                off += 2;
                break;
            }
            case BlockKind::Jordan: {
                if (!b.is_complex()) {
                    for (int i = 0; i < b.size; ++i) {
                        M.at(off + i, off + i) = m;
                        if (i + 1 < b.size) M.at(off + i, off + i + 1) = 1;
                    }
                    u[off + b.size - 1] = 1;
                    off += b.size;
                } else {
                    double th = b.angle.value();
                    for (int i = 0; i < b.size; ++i) {
                        int o = off + 2 * i;
                        M.at(o, o) = m * std::cos(th);
                        M.at(o, o + 1) = -m * std::sin(th);
                        M.at(o + 1, o) = m * std::sin(th);
                        M.at(o + 1, o + 1) = m * std::cos(th);
                        if (i + 1 < b.size) {
                            M.at(o, o + 2) = 1;
                            M.at(o + 1, o + 3) = 1;
                        }
                    }
                    u[off + 2 * b.size - 2] = 1;
                    off += 2 * b.size;
                }
                break;
            }
        }
    }
    return make_raw_system_float(std::move(M), std::move(u));
}

}  // namespace selfaffine
