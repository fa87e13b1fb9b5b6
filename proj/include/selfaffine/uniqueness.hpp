#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfaffine/attractor.hpp"

namespace selfaffine {

// Prune thresholds 2*T_j per coordinate, j = 0..depth. T_j[c] is a certified
// upper bound on sum_{k>=j} |(M^k u)[c]|: exact geometric sums for diagonal
// systems, horizon partial sums plus a norm-certificate remainder otherwise.
// Float tables carry a 1+1e-9 upward guard.
struct TailTable {
    std::vector<Vec<Rational>> exact;  // populated for exact systems
    std::vector<Vec<double>> approx;   // always populated
};

TailTable per_coordinate_tails(const RawSystem& sys, int depth);

struct ShiftStats {
    int shift = 0;
    std::uint64_t nodes = 0;
    std::uint64_t prunes = 0;
    int max_depth = 0;
    bool exhausted = false;  // tree fully explored within caps
};

// Replayable collision description for the shifted difference equation
// sum_k c_k M^k u = 0 with c_k in {0, 2 a_{shift+k}}, c_0 != 0. Finite
// witnesses list every flip; periodic ones repeat the flips of
// [cycle_begin, cycle_end) forever after the head.
struct Witness {
    int shift = 0;
    std::vector<int> head_flips;
    bool periodic = false;
    int cycle_begin = 0, cycle_end = 0;
    std::vector<int> cycle_flips;
};

struct Certification {
    enum class Status { UniqueCertified, CollisionFound, Undetermined };
    Status status = Status::Undetermined;
    bool exact = false;
    std::optional<Witness> witness;
    std::vector<ShiftStats> shifts;
    int depth_cap = 0;
    std::uint64_t node_budget = 0;
};

// Branch-and-bound over collision starts m in {0..preperiod+period-1} (starts
// beyond the preperiod repeat mod the period since M is invertible). Exact
// systems detect finite collisions (partial sum exactly 0) and periodic ones
// (ancestor revisit of the normalized state M^{-j} s_j at equal phase); float
// systems never claim CollisionFound. All trees exhausted -> UniqueCertified;
// any tree still viable at the depth cap or out of node budget -> Undetermined.
// Every shift class is always evaluated, so parallel and serial runs agree.
Certification certify_address(const RawSystem& sys, const Address& a, int depth_cap = 64,
                              std::uint64_t node_budget = 10000000);
Certification certify_address_serial(const RawSystem& sys, const Address& a, int depth_cap = 64,
                                     std::uint64_t node_budget = 10000000);

// Exact replay: confirms the witness flips keep the difference sequence inside
// the viability bounds and close the collision (zero sum, or an exactly
// repeating normalized state). Exact systems only.
bool verify_witness(const RawSystem& sys, const Address& a, const Witness& w, int depth_cap = 64);

struct Enumeration {
    int n = 0;
    int depth_cap = 0;
    std::uint64_t count = 0;               // N_n
    std::vector<std::string> words;        // certified words, sorted
    std::uint64_t undetermined = 0;        // words whose status hit a cap
};

// N_n = #{w in {-1,+1}^n : w^inf is UniqueCertified}. Word i maps symbol a_k
// to +1 iff bit k of i is set; emitted words are sorted lexicographically.
// Shifts are tried in ascending order with an early exit at the first
// collision or capped tree, so the default per-shift budget is much smaller
// than certify_address's: a budget can only turn Unique into Undetermined,
// never the reverse, so the reported N_n stays a certified lower count.
Enumeration enumerate_unique_periodic(const RawSystem& sys, int n, int depth_cap = 64,
                                      std::uint64_t node_budget = 2000);
Enumeration enumerate_unique_periodic_serial(const RawSystem& sys, int n, int depth_cap = 64,
                                             std::uint64_t node_budget = 2000);

struct EntropyEstimate {
    double slope = 0;     // least-squares slope of log2 N_n vs n
    double residual = 0;  // root-mean-square fit residual
};

// Symbolic-entropy proxy only; says nothing about Hausdorff dimension.
// counts[i] = N_{n0+i}; needs >= 4 consecutive positive counts.
EntropyEstimate entropy_estimate(const std::vector<std::uint64_t>& counts, int n0);

// Digit constraints for rational-angle specs, positions j = 0..H inclusive:
// 0 (Free) iff q | j, otherwise the sign of Im(kappa_i^j) for the first block
// in spec order whose imaginary part is nonzero at j.
std::vector<int> constrained_digits(const SpectralSpec& spec, int horizon);

// The address (a_j, a_{q+j}, a_{2q+j}, ...) for the power system M^q;
// eventually periodic structure is preserved. Requires 0 <= j < q.
Address reduce_subsequence(const Address& a, int q, int j);

}  // namespace selfaffine
