#include "selfaffine/uniqueness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace selfaffine {

namespace {

constexpr double kFloatSlack = 1e-9;

bool is_diagonal(const Mat<Rational>& M) {
    for (std::size_t r = 0; r < M.d; ++r)
        for (std::size_t c = 0; c < M.d; ++c)
            if (r != c && M.at(r, c) != 0) return false;
    return true;
}

double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

}  // namespace

TailTable per_coordinate_tails(const RawSystem& sys, int depth) {
    if (depth < 0) throw std::invalid_argument("tail table depth must be >= 0");
    TailTable table;
    table.approx.assign(depth + 1, Vec<double>(sys.d));
    if (sys.exact) {
        table.exact.assign(depth + 1, Vec<Rational>(sys.d));
        if (is_diagonal(sys.M_exact)) {
            for (int c = 0; c < sys.d; ++c) {
                Rational lam = abs_rational(sys.M_exact.at(c, c));
                Rational term = 2 * abs_rational(sys.u_exact[c]) / (1 - lam);
                for (int j = 0; j <= depth; ++j) {
                    table.exact[j][c] = term;
                    term *= lam;
                }
            }
        } else {
            auto cert = norm_certificate(sys.M_exact);
            const int horizon = depth + 4 * cert.m;
            std::vector<Vec<Rational>> v;
            v.reserve(horizon + cert.m);
            Vec<Rational> w = sys.u_exact;
            for (int k = 0; k < horizon + cert.m; ++k) {
                v.push_back(w);
                w = sys.M_exact * w;
            }
            Rational rem(0);  // bound on sum_{k>=horizon} ||M^k u||, any coordinate
            for (int i = 0; i < cert.m; ++i) rem += v[horizon + i].inf_norm();
            rem /= 1 - cert.rho;
            for (int c = 0; c < sys.d; ++c) {
                Rational acc = rem;
                for (int k = horizon - 1; k >= 0; --k) {
                    acc += abs_rational(v[k][c]);
                    if (k <= depth) table.exact[k][c] = 2 * acc;
                }
            }
        }
        for (int j = 0; j <= depth; ++j)
            for (int c = 0; c < sys.d; ++c) table.approx[j][c] = up(to_double(table.exact[j][c]));
        return table;
    }

    auto cert = norm_certificate(sys.M);
    const int horizon = depth + 4 * cert.m;
    std::vector<Vec<double>> v;
    v.reserve(horizon + cert.m);
    Vec<double> w = sys.u;
    for (int k = 0; k < horizon + cert.m; ++k) {
        v.push_back(w);
        w = sys.M * w;
    }
    double rem = 0;
    for (int i = 0; i < cert.m; ++i) rem += v[horizon + i].inf_norm();
    rem /= 1 - cert.rho;
    for (int c = 0; c < sys.d; ++c) {
        double acc = rem;
        for (int k = horizon - 1; k >= 0; --k) {
            acc += std::fabs(v[k][c]);
            if (k <= depth) table.approx[k][c] = 2 * acc * (1 + kFloatSlack);
        }
    }
    return table;
}

namespace {

struct ShiftOutcome {
    ShiftStats stats;
    std::optional<Witness> witness;
    bool undetermined = false;
};

// Shared per-system tables: power sums, inverse, prune thresholds. Building
// these once makes enumeration over many addresses cheap.
struct SearchContext {
    const RawSystem* sys = nullptr;
    int depth_cap = 0;
    std::uint64_t node_budget = 0;
    TailTable tails;
    std::vector<Vec<Rational>> pk2q;  // 2 M^k u, exact systems
    Vec<Rational> u2q;                // 2u
    Mat<Rational> Minv;
    std::vector<Vec<double>> pk2f;  // 2 M^k u, double
};

SearchContext make_context(const RawSystem& sys, int depth_cap, std::uint64_t node_budget) {
    SearchContext ctx;
    ctx.sys = &sys;
    ctx.depth_cap = depth_cap;
    ctx.node_budget = node_budget;
    ctx.tails = per_coordinate_tails(sys, depth_cap);
    if (sys.exact) {
        ctx.Minv = inverse(sys.M_exact);
        ctx.u2q = Rational(2) * sys.u_exact;
        ctx.pk2q.reserve(depth_cap);
        Vec<Rational> v = sys.u_exact;
        for (int k = 0; k < depth_cap; ++k) {
            ctx.pk2q.push_back(Rational(2) * v);
            v = sys.M_exact * v;
        }
    }
    ctx.pk2f.reserve(depth_cap);
    Vec<double> v = sys.u;
    for (int k = 0; k < depth_cap; ++k) {
        ctx.pk2f.push_back(2.0 * v);
        v = sys.M * v;
    }
    return ctx;
}

std::size_t state_hash(const Vec<Rational>& w, int phase) {
    std::size_t h = static_cast<std::size_t>(phase) * 0x9e3779b97f4a7c15ull;
    for (std::size_t i = 0; i < w.dim(); ++i)
        h = h * 0x100000001b3ull ^ hash_rational(w[i]);
    return h;
}

// Reusable per-thread workspace: frame slots are preallocated so steady-state
// search does no vector allocation (mpq values reuse their limb buffers).
struct ExactWorkspace {
    std::vector<Vec<Rational>> s, w;
    std::vector<int> stage;       // 0: try flip, 1: try zero, 2: done
    std::vector<bool> flipped;    // this depth was entered via a flip
    std::vector<bool> recorded;   // this depth registered an ancestor state
    std::vector<int> flips;
    std::unordered_map<std::size_t, std::vector<int>> seen;
    Vec<Rational> tmp;

    void resize(int depth_cap, int d) {
        if (static_cast<int>(s.size()) >= depth_cap + 1) return;
        s.assign(depth_cap + 1, Vec<Rational>(d));
        w.assign(depth_cap + 1, Vec<Rational>(d));
        stage.assign(depth_cap + 1, 0);
        flipped.assign(depth_cap + 1, false);
        recorded.assign(depth_cap + 1, false);
        tmp = Vec<Rational>(d);
    }
};

// Depth-first search of one collision-start class over c_k in {0, 2 a_{m+k}}.
ShiftOutcome search_shift_exact(const SearchContext& ctx, const Address& a, int m,
                                ExactWorkspace& ws) {
    const int D = ctx.depth_cap;
    const int d = ctx.sys->d;
    const long ell = static_cast<long>(a.preperiod());
    const long p = static_cast<long>(a.period.size());

    ws.resize(D, d);
    ws.flips.clear();
    ws.seen.clear();

    ShiftOutcome out;
    out.stats.shift = m;
    for (int c = 0; c < d; ++c) ws.s[0][c] = 0, ws.w[0][c] = 0;
    ws.stage[0] = 0;
    ws.flipped[0] = false;
    int top = 0;

    auto phase_of = [&](int j) { return static_cast<int>((m + j - ell) % p); };

    while (top >= 0) {
        if (ws.stage[top] == 0) {
            // first visit: node-level checks
            ++out.stats.nodes;
            out.stats.max_depth = std::max(out.stats.max_depth, top);
            if (out.stats.nodes > ctx.node_budget) {
                out.undetermined = true;
                return out;
            }
            if (top >= 1 && ws.s[top].is_zero()) {
                Witness wit;
                wit.shift = m;
                wit.head_flips = ws.flips;
                out.witness = wit;
                return out;
            }
            ws.recorded[top] = false;
            if (m + top >= ell) {
                std::size_t h = state_hash(ws.w[top], phase_of(top));
                auto it = ws.seen.find(h);
                if (it != ws.seen.end()) {
                    for (int dep : it->second) {
                        if (ws.w[dep] == ws.w[top] && phase_of(dep) == phase_of(top)) {
                            Witness wit;
                            wit.shift = m;
                            wit.periodic = true;
                            wit.cycle_begin = dep;
                            wit.cycle_end = top;
                            for (int k : ws.flips)
                                (k < dep ? wit.head_flips : wit.cycle_flips).push_back(k);
                            out.witness = wit;
                            return out;
                        }
                    }
                }
                ws.seen[h].push_back(top);
                ws.recorded[top] = true;
            }
            if (top == D) {
                out.undetermined = true;  // viable at the cap
                ws.stage[top] = 2;
            }
        }
        if (ws.stage[top] >= 2) {
            if (ws.recorded[top]) {
                auto it = ws.seen.find(state_hash(ws.w[top], phase_of(top)));
                it->second.pop_back();
                if (it->second.empty()) ws.seen.erase(it);
            }
            if (ws.flipped[top]) ws.flips.pop_back();
            --top;
            continue;
        }
        const bool flip = ws.stage[top] == 0;
        ++ws.stage[top];
        if (!flip && top == 0) {  // c_0 != 0 at every root
            ws.stage[top] = 2;
            continue;
        }
        const int j = top;
        const int child = top + 1;
        const int sign = flip ? a.at(m + j) : 0;
        // s_{j+1} = s_j - c_j M^j u,  w_{j+1} = M^{-1} (w_j - c_j u)
        if (sign > 0) {
            for (int c = 0; c < d; ++c) ws.s[child][c] = ws.s[j][c] - ctx.pk2q[j][c];
            for (int c = 0; c < d; ++c) ws.tmp[c] = ws.w[j][c] - ctx.u2q[c];
        } else if (sign < 0) {
            for (int c = 0; c < d; ++c) ws.s[child][c] = ws.s[j][c] + ctx.pk2q[j][c];
            for (int c = 0; c < d; ++c) ws.tmp[c] = ws.w[j][c] + ctx.u2q[c];
        } else {
            for (int c = 0; c < d; ++c) ws.s[child][c] = ws.s[j][c];
            for (int c = 0; c < d; ++c) ws.tmp[c] = ws.w[j][c];
        }
        bool viable = true;
        const Vec<Rational>& thr = ctx.tails.exact[child];
        for (int c = 0; c < d && viable; ++c)
            viable = !(abs_rational(ws.s[child][c]) > thr[c]);
        if (!viable) {
            ++out.stats.prunes;
            continue;
        }
        mat_mul_into(ctx.Minv, ws.tmp, ws.w[child]);
        ws.stage[child] = 0;
        ws.flipped[child] = flip;
        if (flip) ws.flips.push_back(j);
        top = child;
    }
    out.stats.exhausted = !out.undetermined;
    return out;
}

struct FloatWorkspace {
    std::vector<Vec<double>> s;
    std::vector<int> stage;

    void resize(int depth_cap, int d) {
        if (static_cast<int>(s.size()) >= depth_cap + 1) return;
        s.assign(depth_cap + 1, Vec<double>(d));
        stage.assign(depth_cap + 1, 0);
    }
};

ShiftOutcome search_shift_float(const SearchContext& ctx, const Address& a, int m,
                                FloatWorkspace& ws) {
    const int D = ctx.depth_cap;
    const int d = ctx.sys->d;
    ws.resize(D, d);

    ShiftOutcome out;
    out.stats.shift = m;
    for (int c = 0; c < d; ++c) ws.s[0][c] = 0;
    ws.stage[0] = 0;
    int top = 0;
    while (top >= 0) {
        if (ws.stage[top] == 0) {
            ++out.stats.nodes;
            out.stats.max_depth = std::max(out.stats.max_depth, top);
            if (out.stats.nodes > ctx.node_budget) {
                out.undetermined = true;
                return out;
            }
            if (top == D) {
                out.undetermined = true;
                ws.stage[top] = 2;
            }
        }
        if (ws.stage[top] >= 2) {
            --top;
            continue;
        }
        const bool flip = ws.stage[top] == 0;
        ++ws.stage[top];
        if (!flip && top == 0) {
            ws.stage[top] = 2;
            continue;
        }
        const int j = top, child = top + 1;
        const int sign = flip ? a.at(m + j) : 0;
        for (int c = 0; c < d; ++c)
            ws.s[child][c] = ws.s[j][c] - double(sign) * ctx.pk2f[j][c];
        bool viable = true;
        const Vec<double>& thr = ctx.tails.approx[child];
        for (int c = 0; c < d && viable; ++c)
            viable = !(std::fabs(ws.s[child][c]) > thr[c]);
        if (!viable) {
            ++out.stats.prunes;
            continue;
        }
        ws.stage[child] = 0;
        top = child;
    }
    out.stats.exhausted = !out.undetermined;
    return out;
}

Certification certify_impl(const RawSystem& sys, const Address& a, int depth_cap,
                           std::uint64_t node_budget, bool parallel) {
    if (!a.periodic())
        throw std::invalid_argument("per-address certification requires eventually periodic input");
    const int shifts = static_cast<int>(a.preperiod() + a.period.size());
    if (depth_cap < shifts)
        throw std::invalid_argument("depth cap must be at least preperiod + period");

    Certification cert;
    cert.exact = sys.exact;
    cert.depth_cap = depth_cap;
    cert.node_budget = node_budget;

    SearchContext ctx = make_context(sys, depth_cap, node_budget);
    std::vector<ShiftOutcome> outcomes(shifts);
    if (sys.exact) {
#pragma omp parallel if (parallel)
        {
            ExactWorkspace ws;
#pragma omp for schedule(dynamic)
            for (int m = 0; m < shifts; ++m) outcomes[m] = search_shift_exact(ctx, a, m, ws);
        }
    } else {
#pragma omp parallel if (parallel)
        {
            FloatWorkspace ws;
#pragma omp for schedule(dynamic)
            for (int m = 0; m < shifts; ++m) outcomes[m] = search_shift_float(ctx, a, m, ws);
        }
    }

    bool any_undetermined = false;
    for (int m = 0; m < shifts; ++m) {
        cert.shifts.push_back(outcomes[m].stats);
        any_undetermined |= outcomes[m].undetermined;
        if (outcomes[m].witness && !cert.witness) cert.witness = outcomes[m].witness;
    }
    if (cert.witness)
        cert.status = Certification::Status::CollisionFound;
    else if (any_undetermined)
        cert.status = Certification::Status::Undetermined;
    else
        cert.status = Certification::Status::UniqueCertified;
    return cert;
}

}  // namespace

Certification certify_address(const RawSystem& sys, const Address& a, int depth_cap,
                              std::uint64_t node_budget) {
    return certify_impl(sys, a, depth_cap, node_budget, true);
}

Certification certify_address_serial(const RawSystem& sys, const Address& a, int depth_cap,
                                     std::uint64_t node_budget) {
    return certify_impl(sys, a, depth_cap, node_budget, false);
}

bool verify_witness(const RawSystem& sys, const Address& a, const Witness& w, int depth_cap) {
    if (!sys.exact || !a.periodic()) return false;
    std::vector<int> flips = w.head_flips;
    flips.insert(flips.end(), w.cycle_flips.begin(), w.cycle_flips.end());
    if (flips.empty() || flips[0] != 0) return false;  // c_0 != 0
    if (!std::is_sorted(flips.begin(), flips.end())) return false;
    const int end = w.periodic ? w.cycle_end : flips.back() + 1;
    if (end > depth_cap) return false;

    TailTable tails = per_coordinate_tails(sys, end);
    Mat<Rational> Minv = inverse(sys.M_exact);
    Vec<Rational> s(sys.d), wn(sys.d);
    std::optional<Vec<Rational>> at_begin;
    Vec<Rational> pk = sys.u_exact;
    std::size_t next = 0;
    const long ell = static_cast<long>(a.preperiod());
    const long p = static_cast<long>(a.period.size());
    for (int j = 0; j <= end; ++j) {
        if (w.periodic && j == w.cycle_begin) {
            if (w.shift + j < ell) return false;  // cycle must sit in the periodic region
            at_begin = wn;
        }
        if (j == end) break;
        Rational c(0);
        if (next < flips.size() && flips[next] == j) {
            c = 2 * a.at(w.shift + j);
            ++next;
        }
        s -= c * pk;
        Vec<Rational> t = wn;
        t -= c * sys.u_exact;
        wn = Minv * t;
        pk = sys.M_exact * pk;
        for (int cc = 0; cc < sys.d; ++cc)
            if (abs_rational(s[cc]) > tails.exact[j + 1][cc]) return false;
    }
    if (next != flips.size()) return false;
    if (!w.periodic) return s.is_zero();
    if ((w.cycle_end - w.cycle_begin) % p != 0) return false;  // phases must match
    return at_begin && *at_begin == wn;
}

namespace {

// Early-exit status for enumeration: 1 unique, 0 collision, 2 capped.
// Evaluates shifts in ascending order and stops at the first failure, which
// is what makes sweeping thousands of non-unique words affordable.
int word_status_exact(const SearchContext& ctx, const Address& a, ExactWorkspace& ws) {
    const int shifts = static_cast<int>(a.preperiod() + a.period.size());
    for (int m = 0; m < shifts; ++m) {
        ShiftOutcome out = search_shift_exact(ctx, a, m, ws);
        if (out.witness) return 0;
        if (out.undetermined) return 2;
    }
    return 1;
}

int word_status_float(const SearchContext& ctx, const Address& a, FloatWorkspace& ws) {
    const int shifts = static_cast<int>(a.preperiod() + a.period.size());
    for (int m = 0; m < shifts; ++m) {
        ShiftOutcome out = search_shift_float(ctx, a, m, ws);
        if (out.witness) return 0;
        if (out.undetermined) return 2;
    }
    return 1;
}

Enumeration enumerate_impl(const RawSystem& sys, int n, int depth_cap, std::uint64_t node_budget,
                           bool parallel) {
    if (n < 1 || n > 20)
        throw std::invalid_argument("enumeration budget exceeded: need 1 <= n <= 20");
    if (depth_cap < n) throw std::invalid_argument("depth cap must be at least the word length");
    Enumeration e;
    e.n = n;
    e.depth_cap = depth_cap;
    const std::uint64_t total = 1ull << n;
    const std::uint64_t mask = total - 1;
    SearchContext ctx = make_context(sys, depth_cap, node_budget);
    std::vector<std::uint8_t> status(total, 0);
    // Negating every symbol of a word negates each candidate difference
    // sequence in the collision search while preserving the pruning bounds,
    // so complementary words share a status; search one representative per
    // pair and mirror afterwards.
    if (sys.exact) {
#pragma omp parallel if (parallel)
        {
            ExactWorkspace ws;
#pragma omp for schedule(dynamic, 16)
            for (long long i = 0; i < static_cast<long long>(total); ++i) {
                const std::uint64_t u = static_cast<std::uint64_t>(i);
                if ((~u & mask) < u) continue;
                Address a;
                a.period.resize(n);
                for (int k = 0; k < n; ++k) a.period[k] = (u >> k) & 1 ? 1 : -1;
                status[u] = static_cast<std::uint8_t>(word_status_exact(ctx, a, ws));
            }
        }
    } else {
#pragma omp parallel if (parallel)
        {
            FloatWorkspace ws;
#pragma omp for schedule(dynamic, 16)
            for (long long i = 0; i < static_cast<long long>(total); ++i) {
                const std::uint64_t u = static_cast<std::uint64_t>(i);
                if ((~u & mask) < u) continue;
                Address a;
                a.period.resize(n);
                for (int k = 0; k < n; ++k) a.period[k] = (u >> k) & 1 ? 1 : -1;
                status[u] = static_cast<std::uint8_t>(word_status_float(ctx, a, ws));
            }
        }
    }
    for (std::uint64_t i = 0; i < total; ++i)
        if ((~i & mask) < i) status[i] = status[~i & mask];
    for (std::uint64_t i = 0; i < total; ++i) {
        if (status[i] == 1) {
            std::string word(n, '-');
            for (int k = 0; k < n; ++k)
                if ((i >> k) & 1) word[k] = '+';
            e.words.push_back(std::move(word));
        } else if (status[i] == 2) {
            ++e.undetermined;
        }
    }
    std::sort(e.words.begin(), e.words.end());
    e.count = e.words.size();
    return e;
}

}  // namespace

Enumeration enumerate_unique_periodic(const RawSystem& sys, int n, int depth_cap,
                                      std::uint64_t node_budget) {
    return enumerate_impl(sys, n, depth_cap, node_budget, true);
}

Enumeration enumerate_unique_periodic_serial(const RawSystem& sys, int n, int depth_cap,
                                             std::uint64_t node_budget) {
    return enumerate_impl(sys, n, depth_cap, node_budget, false);
}

EntropyEstimate entropy_estimate(const std::vector<std::uint64_t>& counts, int n0) {
    if (counts.size() < 4)
        throw std::invalid_argument("entropy estimate needs >= 4 consecutive counts");
    const std::size_t N = counts.size();
    std::vector<double> y(N);
    for (std::size_t i = 0; i < N; ++i) {
        if (counts[i] == 0)
            throw std::invalid_argument("entropy estimate: zero count at n=" +
                                        std::to_string(n0 + long(i)));
        y[i] = std::log2(double(counts[i]));
    }
    double xbar = n0 + (double(N) - 1) / 2, ybar = 0;
    for (double v : y) ybar += v;
    ybar /= double(N);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double dx = n0 + double(i) - xbar;
        sxx += dx * dx;
        sxy += dx * (y[i] - ybar);
    }
    EntropyEstimate est;
    est.slope = sxy / sxx;
    double ss = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double fit = ybar + est.slope * (n0 + double(i) - xbar);
        ss += (y[i] - fit) * (y[i] - fit);
    }
    est.residual = std::sqrt(ss / double(N));
    return est;
}

std::vector<int> constrained_digits(const SpectralSpec& spec, int horizon) {
    if (horizon < 1) throw std::invalid_argument("constraint horizon must be >= 1");
    long q = minimal_real_power(spec);  // throws on irrational angles
    std::vector<int> out(horizon + 1, 0);
    for (int j = 0; j <= horizon; ++j) {
        if (j % q == 0) continue;  // Free
        for (const auto& b : spec.blocks) {
            if (b.angle.type != AngleTag::Type::RationalPi) continue;
            long r = (long(j) * b.angle.p) % (2 * b.angle.s);
            if (r % b.angle.s == 0) continue;  // Im(kappa^j) = 0 for this block
            out[j] = r < b.angle.s ? 1 : -1;
            break;
        }
    }
    return out;
}

Address reduce_subsequence(const Address& a, int q, int j) {
    if (q < 1 || j < 0 || j >= q) throw std::invalid_argument("need 0 <= j < q");
    Address r;
    const long ell = static_cast<long>(a.preperiod());
    if (!a.periodic()) {
        for (long k = j; k < ell; k += q) r.head.push_back(a.head[k]);
        return r;
    }
    const long p = static_cast<long>(a.period.size());
    long lp = std::max(0l, (ell - j + q - 1) / q);  // reduced preperiod
    long g = std::gcd(long(q), p);
    long pp = p / g;  // reduced period
    for (long k = 0; k < lp; ++k) r.head.push_back(a.at(j + q * k));
    for (long k = lp; k < lp + pp; ++k) r.period.push_back(a.at(j + q * k));
    return r;
}

}  // namespace selfaffine
