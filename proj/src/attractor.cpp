#include "selfaffine/attractor.hpp"

#include <Eigen/Dense>
#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace selfaffine {

namespace {

constexpr double kFloatSlack = 1e-9;  // multiplicative guard on float certificates

}  // namespace

int Address::at(std::size_t k) const {
    if (k < head.size()) return head[k];
    if (period.empty())
        throw std::invalid_argument("address has a free tail: no symbol at position " +
                                    std::to_string(k));
    return period[(k - head.size()) % period.size()];
}

Address parse_address(const std::string& text) {
    Address a;
    bool in_period = false, closed = false;
    for (char c : text) {
        if (c == ' ' || c == '\t') continue;
        if (closed) throw std::invalid_argument("trailing characters after period: '" + text + "'");
        switch (c) {
            case '+':
            case '-':
                (in_period ? a.period : a.head).push_back(c == '+' ? 1 : -1);
                break;
            case '(':
                if (in_period) throw std::invalid_argument("nested '(' in address");
                in_period = true;
                break;
            case ')':
                if (!in_period) throw std::invalid_argument("unmatched ')' in address");
                if (a.period.empty()) throw std::invalid_argument("empty period in address");
                closed = true;
                break;
            default:
                throw std::invalid_argument(std::string("bad address symbol '") + c + "'");
        }
    }
    if (in_period && !closed) throw std::invalid_argument("unterminated period in address");
    if (a.head.empty() && a.period.empty()) throw std::invalid_argument("empty address");
    return a;
}

std::string format_address(const Address& a) {
    std::string s;
    for (int x : a.head) s += x > 0 ? '+' : '-';
    if (a.periodic()) {
        s += '(';
        for (int x : a.period) s += x > 0 ? '+' : '-';
        s += ')';
    }
    return s;
}

Rational tail_bound_exact(const RawSystem& sys, int n) {
    if (!sys.exact) throw std::invalid_argument("tail_bound_exact requires an exact system");
    if (n < 0) throw std::invalid_argument("tail depth must be >= 0");
    auto cert = norm_certificate(sys.M_exact);
    Vec<Rational> v = sys.u_exact;
    for (int k = 0; k < n; ++k) v = sys.M_exact * v;
    Rational s(0);
    for (int i = 0; i < cert.m; ++i) {
        s += v.inf_norm();
        v = sys.M_exact * v;
    }
    return s / (1 - cert.rho);
}

double tail_bound(const RawSystem& sys, int n) {
    if (sys.exact) {
        // mpq -> double truncates toward zero; nudge up to keep the bound.
        return std::nextafter(to_double(tail_bound_exact(sys, n)),
                              std::numeric_limits<double>::infinity());
    }
    if (n < 0) throw std::invalid_argument("tail depth must be >= 0");
    auto cert = norm_certificate(sys.M);
    Vec<double> v = sys.u;
    for (int k = 0; k < n; ++k) v = sys.M * v;
    double s = 0;
    for (int i = 0; i < cert.m; ++i) {
        s += v.inf_norm();
        v = sys.M * v;
    }
    return s / (1.0 - cert.rho) * (1.0 + kFloatSlack);
}

Projection project_address(const RawSystem& sys, const Address& a, int n) {
    if (n < 0) throw std::invalid_argument("projection depth must be >= 0");
    Vec<double> acc(sys.d);
    Vec<double> v = sys.u;
    for (int k = 0; k < n; ++k) {
        acc += double(a.at(k)) * v;
        v = sys.M * v;
    }
    return {acc, tail_bound(sys, n)};
}

Vec<Rational> project_exact_periodic(const RawSystem& sys, const Address& a) {
    if (!sys.exact) throw std::invalid_argument("exact projection requires an exact system");
    if (!a.periodic())
        throw std::invalid_argument("exact projection requires an eventually periodic address");
    const std::size_t l = a.preperiod(), p = a.period.size();
    // head part: sum_{k<l} a_k M^k u; tail: M^l y with (I - M^p) y = c.
    Vec<Rational> headsum(sys.d);
    Vec<Rational> v = sys.u_exact;
    for (std::size_t k = 0; k < l; ++k) {
        headsum += Rational(a.head[k]) * v;
        v = sys.M_exact * v;
    }
    Mat<Rational> Ml = mat_pow(sys.M_exact, l);
    Vec<Rational> c(sys.d);
    Vec<Rational> w = sys.u_exact;
    for (std::size_t k = 0; k < p; ++k) {
        c += Rational(a.period[k]) * w;
        w = sys.M_exact * w;
    }
    Mat<Rational> I_minus = Mat<Rational>::identity(sys.d);
    Mat<Rational> Mp = mat_pow(sys.M_exact, p);
    for (std::size_t i = 0; i < I_minus.a.size(); ++i) I_minus.a[i] -= Mp.a[i];
    Vec<Rational> y = solve(I_minus, c);
    return headsum + Ml * y;
}

std::vector<Vec<double>> chaos_game(const RawSystem& sys, std::size_t count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("chaos_game needs count >= 1");
    std::mt19937_64 rng(seed);
    Vec<double> x(sys.d);
    std::vector<Vec<double>> out;
    out.reserve(count);
    for (std::size_t step = 0; step < 64 + count; ++step) {
        Vec<double> mx = sys.M * x;
        if (rng() & 1)
            x = mx + sys.u;
        else
            x = mx - sys.u;
        if (step >= 64) out.push_back(x);
    }
    return out;
}

namespace {

template <class T>
std::vector<Vec<T>> power_table(const Mat<T>& M, const Vec<T>& u, int n) {
    std::vector<Vec<T>> pk;
    pk.reserve(n);
    Vec<T> v = u;
    for (int k = 0; k < n; ++k) {
        pk.push_back(v);
        v = M * v;
    }
    return pk;
}

template <class T>
Vec<T> center_of(const std::vector<Vec<T>>& pk, std::uint64_t idx, std::size_t d) {
    Vec<T> c(d);
    for (std::size_t k = 0; k < pk.size(); ++k) {
        if ((idx >> k) & 1)
            c += pk[k];
        else
            c -= pk[k];
    }
    return c;
}

CylinderCloud cloud_impl(const RawSystem& sys, int depth, bool parallel) {
    if (depth < 0) throw std::invalid_argument("cylinder depth must be >= 0");
    int cap = sys.exact ? 18 : 26;
    if (depth > cap)
        throw std::invalid_argument("depth cap exceeded: " + std::to_string(depth) + " > " +
                                    std::to_string(cap));
    CylinderCloud cloud;
    cloud.depth = depth;
    cloud.tail_radius = tail_bound(sys, depth);
    const std::uint64_t total = 1ull << depth;
    auto pkf = power_table(sys.M, sys.u, depth);
    cloud.centers.assign(total, Vec<double>(sys.d));
#pragma omp parallel for schedule(static) if (parallel)
    for (long long i = 0; i < static_cast<long long>(total); ++i)
        cloud.centers[i] = center_of(pkf, i, sys.d);
    if (sys.exact) {
        auto pkq = power_table(sys.M_exact, sys.u_exact, depth);
        std::vector<Vec<Rational>> ex(total, Vec<Rational>(sys.d));
#pragma omp parallel for schedule(static) if (parallel)
        for (long long i = 0; i < static_cast<long long>(total); ++i)
            ex[i] = center_of(pkq, i, sys.d);
        cloud.centers_exact = std::move(ex);
    }
    return cloud;
}

}  // namespace

CylinderCloud cylinder_cloud(const RawSystem& sys, int depth) { return cloud_impl(sys, depth, true); }
CylinderCloud cylinder_cloud_serial(const RawSystem& sys, int depth) {
    return cloud_impl(sys, depth, false);
}

namespace {

template <class T>
bool lex_less(const Vec<T>& a, const Vec<T>& b) {
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (a[i] < b[i]) return true;
        if (b[i] < a[i]) return false;
    }
    return false;
}

// {0,1}-digit cylinder centers at `depth` for the system (M, u).
template <class T>
std::vector<Vec<T>> binary_centers(const Mat<T>& M, const Vec<T>& u, int depth) {
    auto pk = power_table(M, u, depth);
    std::vector<Vec<T>> out(1ull << depth, Vec<T>(M.d));
    for (std::uint64_t i = 0; i < out.size(); ++i) {
        Vec<T> c(M.d);
        for (int k = 0; k < depth; ++k)
            if ((i >> k) & 1) c += pk[k];
        out[i] = c;
    }
    return out;
}

template <class T>
DecompositionReport decomposition_check(const Mat<T>& M, const Vec<T>& u, int blocks, int depth,
                                        bool exact, double tol) {
    DecompositionReport rep;
    rep.exact = exact;
    rep.depth = depth;
    rep.blocks = blocks;

    std::vector<Vec<T>> lhs = binary_centers(M, u, depth);

    const int n = depth / blocks;
    Mat<T> B = mat_pow(M, blocks);
    std::vector<Vec<T>> base = binary_centers(B, u, n);
    // layer j: M^j * base
    std::vector<std::vector<Vec<T>>> layers(blocks);
    Mat<T> Mj = Mat<T>::identity(M.d);
    for (int j = 0; j < blocks; ++j) {
        layers[j].reserve(base.size());
        for (const auto& v : base) layers[j].push_back(Mj * v);
        Mj = Mj * M;
    }
    std::vector<Vec<T>> rhs;
    rhs.reserve(lhs.size());
    for (std::uint64_t i = 0; i < lhs.size(); ++i) {
        Vec<T> s(M.d);
        std::uint64_t rem = i;
        for (int j = 0; j < blocks; ++j) {
            s += layers[j][rem & ((1ull << n) - 1)];
            rem >>= n;
        }
        rhs.push_back(std::move(s));
    }

    std::sort(lhs.begin(), lhs.end(), lex_less<T>);
    std::sort(rhs.begin(), rhs.end(), lex_less<T>);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        bool same;
        if (exact) {
            same = lhs[i] == rhs[i];
        } else {
            same = true;
            for (std::size_t c = 0; c < lhs[i].dim(); ++c)
                same &= num_abs(lhs[i][c] - rhs[i][c]) <= T(tol);
        }
        if (!same) {
            rep.equal = false;
            rep.first_mismatch_index = i;
            rep.detail = "sorted multisets differ at element " + std::to_string(i);
            return rep;
        }
    }
    rep.equal = true;
    return rep;
}

}  // namespace

DecompositionReport minkowski_decomposition_check(const RawSystem& sys, int blocks, int depth) {
    if (blocks < 1) throw std::invalid_argument("decomposition needs blocks >= 1");
    if (depth < blocks || depth % blocks != 0)
        throw std::invalid_argument("depth must be a positive multiple of the block count");
    int cap = sys.exact ? 16 : 20;
    if (depth > cap)
        throw std::invalid_argument("depth cap exceeded: " + std::to_string(depth) + " > " +
                                    std::to_string(cap));
    if (sys.exact)
        return decomposition_check(sys.M_exact, sys.u_exact, blocks, depth, true, 0.0);
    return decomposition_check(sys.M, sys.u, blocks, depth, false, 1e-9);
}

// ---------------------------------------------------------------------------
// Interior certificate
// ---------------------------------------------------------------------------

namespace {

double sigma_min_of_power(const RawSystem& sys, int depth) {
    Mat<double> Mn = mat_pow(sys.M, static_cast<unsigned long>(depth));
    Eigen::MatrixXd A(sys.d, sys.d);
    for (int r = 0; r < sys.d; ++r)
        for (int c = 0; c < sys.d; ++c) A(r, c) = Mn.at(r, c);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues().minCoeff();
}

struct LatticeBox {
    int d = 0;
    long K = 0;          // indices in [-K, K]^d
    double h = 0;
    double reach = 0;    // r + h*sqrt(d)/2: only points with |g| <= reach matter
    Vec<double> x0;

    std::size_t side() const { return static_cast<std::size_t>(2 * K + 1); }
    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < d; ++i) s *= side();
        return s;
    }
    // flat index from integer tuple in [-K,K]^d
    std::size_t flat(const std::vector<long>& idx) const {
        std::size_t f = 0;
        for (int i = 0; i < d; ++i) f = f * side() + static_cast<std::size_t>(idx[i] + K);
        return f;
    }
    bool in_ball(const std::vector<long>& idx) const {
        double s = 0;
        for (int i = 0; i < d; ++i) {
            double c = h * double(idx[i]);
            s += c * c;
        }
        return s <= reach * reach;
    }
};

// Mark every lattice point within `radius` of `center` (center given relative
// to x0). Window-local: O((2 radius/h)^d) per call.
void mark_covered(const LatticeBox& box, const Vec<double>& center, double radius,
                  std::vector<std::uint8_t>& covered) {
    std::vector<long> lo(box.d), hi(box.d), idx(box.d);
    for (int i = 0; i < box.d; ++i) {
        lo[i] = std::max(-box.K, static_cast<long>(std::ceil((center[i] - radius) / box.h)));
        hi[i] = std::min(box.K, static_cast<long>(std::floor((center[i] + radius) / box.h)));
        if (lo[i] > hi[i]) return;
        idx[i] = lo[i];
    }
    double r2 = radius * radius;
    while (true) {
        double s = 0;
        for (int i = 0; i < box.d; ++i) {
            double diff = box.h * double(idx[i]) - center[i];
            s += diff * diff;
        }
        if (s <= r2) covered[box.flat(idx)] = 1;
        int i = box.d - 1;
        while (i >= 0 && ++idx[i] > hi[i]) idx[i--] = lo[i];
        if (i < 0) break;
    }
}

// Gray-code walk over all 2^depth cylinder centers relative to M^depth x0's
// offset (centers are sign sums of pk); visits every word once, O(d) per step.
template <class Fn>
void for_each_center(const std::vector<Vec<double>>& pk, std::uint64_t begin, std::uint64_t end,
                     Fn&& fn) {
    const std::size_t d = pk.empty() ? 0 : pk[0].dim();
    auto gray = [](std::uint64_t i) { return i ^ (i >> 1); };
    Vec<double> c(d);
    std::uint64_t g = gray(begin);
    for (std::size_t k = 0; k < pk.size(); ++k) {
        if ((g >> k) & 1)
            c += pk[k];
        else
            c -= pk[k];
    }
    fn(c);
    for (std::uint64_t i = begin + 1; i < end; ++i) {
        std::uint64_t bit = gray(i) ^ gray(i - 1);  // single flipped bit
        int k = std::countr_zero(bit);
        if (gray(i) & bit)
            c += 2.0 * pk[k];
        else
            c -= 2.0 * pk[k];
        fn(c);
    }
}

InteriorCertificate certificate_impl(const RawSystem& sys, const Vec<double>& x0, double r,
                                     int depth, double h, bool parallel,
                                     std::size_t lattice_budget) {
    if (!(r > 0)) throw std::invalid_argument("certificate radius must be positive");
    if (!(h > 0 && h <= r)) throw std::invalid_argument("grid spacing must satisfy 0 < h <= r");
    if (depth < 1) throw std::invalid_argument("certificate depth must be >= 1");
    if (x0.dim() != static_cast<std::size_t>(sys.d))
        throw std::invalid_argument("x0 dimension mismatch");

    InteriorCertificate cert;
    cert.depth = depth;
    cert.r = r;
    cert.h = h;
    cert.sigma_min = sigma_min_of_power(sys, depth);
    double sqd = std::sqrt(double(sys.d));
    cert.effective_radius = r * cert.sigma_min - h * sqd / 2.0;
    if (cert.effective_radius <= 0) {
        cert.note = "effective radius nonpositive: shrink h or the depth";
        return cert;
    }

    LatticeBox box;
    box.d = sys.d;
    box.h = h;
    box.reach = r + h * sqd / 2.0;
    box.K = static_cast<long>(std::floor(box.reach / h)) + 1;
    box.x0 = x0;
    if (box.size() > lattice_budget) {
        cert.note = "lattice budget exceeded: coarsen h";
        return cert;
    }

    // Centers are taken relative to x0: covering needs
    // |g_phys - (c_w + M^n x0)| <= R_eff with g_phys = x0 + h*idx, i.e.
    // |h*idx - (c_w + (M^n - I) x0)| <= R_eff.
    Vec<double> shift = mat_pow(sys.M, static_cast<unsigned long>(depth)) * x0 - x0;
    auto pk = power_table(sys.M, sys.u, depth);
    double mark_radius = cert.effective_radius / (1.0 + kFloatSlack);

    std::vector<std::uint8_t> covered(box.size(), 0);
    const std::uint64_t total = 1ull << depth;
    if (parallel) {
#pragma omp parallel
        {
            std::vector<std::uint8_t> local(box.size(), 0);
            int nt = omp_get_num_threads(), tid = omp_get_thread_num();
            std::uint64_t lo = total * tid / nt, hi = total * (tid + 1) / nt;
            if (lo < hi)
                for_each_center(pk, lo, hi, [&](const Vec<double>& c) {
                    mark_covered(box, c + shift, mark_radius, local);
                });
#pragma omp critical
            for (std::size_t i = 0; i < covered.size(); ++i) covered[i] |= local[i];
        }
    } else {
        for_each_center(pk, 0, total, [&](const Vec<double>& c) {
            mark_covered(box, c + shift, mark_radius, covered);
        });
    }

    std::vector<long> idx(sys.d, -box.K);
    std::size_t uncovered = 0, points = 0;
    while (true) {
        if (box.in_ball(idx)) {
            ++points;
            if (!covered[box.flat(idx)]) ++uncovered;
        }
        int i = sys.d - 1;
        while (i >= 0 && ++idx[i] > box.K) idx[i--] = -box.K;
        if (i < 0) break;
    }
    cert.lattice_points = points;
    cert.uncovered = uncovered;
    if (uncovered == 0) {
        cert.status = InteriorCertificate::Status::Certified;
    } else {
        cert.note = std::to_string(uncovered) + " of " + std::to_string(points) +
                    " lattice points uncovered";
    }
    return cert;
}

}  // namespace

InteriorCertificate interior_certificate(const RawSystem& sys, const Vec<double>& x0, double r,
                                         int depth, double h) {
    return certificate_impl(sys, x0, r, depth, h, true, 64000000);
}

InteriorCertificate interior_certificate_serial(const RawSystem& sys, const Vec<double>& x0,
                                                double r, int depth, double h) {
    return certificate_impl(sys, x0, r, depth, h, false, 64000000);
}

std::optional<InteriorCertificate> interior_search(const RawSystem& sys, int max_depth,
                                                   int max_radius_steps,
                                                   std::size_t lattice_budget) {
    double T0 = tail_bound(sys, 0);
    Vec<double> x0(sys.d);
    double sqd = std::sqrt(double(sys.d));
    for (int n = 1; n <= max_depth; ++n) {
        double sigma = sigma_min_of_power(sys, n);
        for (int j = 1; j <= max_radius_steps; ++j) {
            double r = T0 * std::pow(2.0, -j);
            double h = r * sigma / (2.0 * sqd);
            if (!(h > 0)) continue;
            InteriorCertificate cert = certificate_impl(sys, x0, r, n, h, true, lattice_budget);
            if (cert.status == InteriorCertificate::Status::Certified) return cert;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

std::string Pgm::serialize() const {
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    return out;
}

Pgm render_image(const std::vector<Vec<double>>& points, const Viewport& vp, int width, int height,
                 RenderMode mode) {
    if (!(vp.xmax > vp.xmin) || !(vp.ymax > vp.ymin))
        throw std::invalid_argument("empty viewport");
    if (width < 1 || height < 1) throw std::invalid_argument("resolution must be positive");
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(width) * height, 0);
    for (const auto& p : points) {
        double x = p[0];
        double y = p.dim() >= 2 ? p[1] : 0.0;
        if (x < vp.xmin || x > vp.xmax || y < vp.ymin || y > vp.ymax) continue;
        long px = static_cast<long>(std::floor((x - vp.xmin) / (vp.xmax - vp.xmin) * width));
        long py = static_cast<long>(std::floor((vp.ymax - y) / (vp.ymax - vp.ymin) * height));
        px = std::clamp(px, 0L, long(width - 1));
        py = std::clamp(py, 0L, long(height - 1));
        ++counts[static_cast<std::size_t>(py) * width + px];
    }
    Pgm img;
    img.width = width;
    img.height = height;
    img.pixels.assign(counts.size(), 0);
    if (mode == RenderMode::Binary) {
        for (std::size_t i = 0; i < counts.size(); ++i) img.pixels[i] = counts[i] ? 255 : 0;
    } else {
        std::uint32_t peak = 0;
        for (auto c : counts) peak = std::max(peak, c);
        if (peak)
            for (std::size_t i = 0; i < counts.size(); ++i)
                img.pixels[i] = counts[i]
                                    ? static_cast<std::uint8_t>(55 + (200ull * counts[i]) / peak)
                                    : 0;
    }
    return img;
}

}  // namespace selfaffine
