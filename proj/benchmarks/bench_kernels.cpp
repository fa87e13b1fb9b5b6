// Benchmark comparing the OpenMP kernels against their serial reference
// implementations. Each kernel is timed over a fixed workload and the outputs
// are compared for exact equality, so the table doubles as a determinism
// check. `--smoke` shrinks the workloads to a fraction of a second for CI.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

#include "selfaffine/attractor.hpp"
#include "selfaffine/spectral.hpp"
#include "selfaffine/uniqueness.hpp"

namespace sa = selfaffine;
using sa::Rational;

namespace {

double time_ms(const std::function<void()>& fn) {
    auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

sa::RawSystem scalar_system(const Rational& l) {
    sa::Mat<Rational> M(1);
    M.at(0, 0) = l;
    sa::Vec<Rational> u(1);
    u[0] = 1;
    return sa::make_raw_system(M, u, true);
}

void row(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-22s %12.2f %12.2f %9.2fx %10s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const bool smoke = argc > 1 && std::strcmp(argv[1], "--smoke") == 0;
    int mismatches = 0;
    std::printf("kernel benchmark: %d OpenMP thread(s), %s workload\n", omp_get_max_threads(),
                smoke ? "smoke" : "full");
    std::printf("%-22s %12s %12s %10s %10s\n", "kernel", "serial ms", "parallel ms", "speedup",
                "outputs");

    {
        auto rot = sa::realize_matrix(
            sa::parse_spec("block rotation modulus=9/10 angle=1/4pi\n").spec());
        const int depth = smoke ? 10 : 19;
        sa::CylinderCloud par, ser;
        double tp = time_ms([&] { par = sa::cylinder_cloud(rot, depth); });
        double ts = time_ms([&] { ser = sa::cylinder_cloud_serial(rot, depth); });
        bool same = par.centers.size() == ser.centers.size();
        for (std::size_t i = 0; same && i < par.centers.size(); ++i)
            for (std::size_t c = 0; same && c < 2; ++c)
                same = std::memcmp(&par.centers[i][c], &ser.centers[i][c], sizeof(double)) == 0;
        mismatches += !same;
        row("cylinder cloud", ts, tp, same);
    }

    {
        auto mid = scalar_system(Rational(11, 20));
        const int n = smoke ? 8 : 13;
        sa::Enumeration par, ser;
        double tp = time_ms([&] { par = sa::enumerate_unique_periodic(mid, n, 60, 200); });
        double ts = time_ms([&] { ser = sa::enumerate_unique_periodic_serial(mid, n, 60, 200); });
        bool same = par.count == ser.count && par.undetermined == ser.undetermined &&
                    par.words == ser.words;
        mismatches += !same;
        row("word enumeration", ts, tp, same);
    }

    {
        auto fat = scalar_system(Rational(4, 5));
        auto addr = sa::parse_address("(+-)");
        const int cap = smoke ? 24 : 40;
        const std::uint64_t budget = smoke ? 2000 : 200000;
        sa::Certification par, ser;
        double tp = time_ms([&] { par = sa::certify_address(fat, addr, cap, budget); });
        double ts = time_ms([&] { ser = sa::certify_address_serial(fat, addr, cap, budget); });
        bool same = par.status == ser.status && par.shifts.size() == ser.shifts.size();
        for (std::size_t i = 0; same && i < par.shifts.size(); ++i)
            same = par.shifts[i].nodes == ser.shifts[i].nodes &&
                   par.shifts[i].prunes == ser.shifts[i].prunes;
        mismatches += !same;
        row("address certification", ts, tp, same);
    }

    {
        auto rot = sa::realize_matrix(
            sa::parse_spec("block rotation modulus=9/10 angle=1/4pi\n").spec());
        const double t0 = sa::tail_bound(rot, 0);
        sa::Vec<double> origin(2);
        const int depth = smoke ? 4 : 8;
        const double r = t0 / 4;
        const double sigma = std::pow(0.9, depth);
        const double h = r * sigma / (smoke ? 2 : 24) / std::sqrt(2.0);
        sa::InteriorCertificate par, ser;
        double tp = time_ms([&] { par = sa::interior_certificate(rot, origin, r, depth, h); });
        double ts =
            time_ms([&] { ser = sa::interior_certificate_serial(rot, origin, r, depth, h); });
        bool same = par.status == ser.status && par.lattice_points == ser.lattice_points &&
                    par.uncovered == ser.uncovered;
        mismatches += !same;
        row("interior covering", ts, tp, same);
    }

    if (mismatches) std::printf("FAILURE: %d kernel(s) diverged from the reference\n", mismatches);
    return mismatches == 0 ? 0 : 1;
}
