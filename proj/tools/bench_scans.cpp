// Timing comparison of the OpenMP scan kernels against the serial reference
// implementations. Usage: bench_scans [threads]
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <memory>

#include "gibbslab/criteria.hpp"
#include "gibbslab/fields.hpp"
#include "gibbslab/parallel.hpp"
#include "gibbslab/potential.hpp"
#include "gibbslab/reference.hpp"
#include "gibbslab/specification.hpp"

using namespace gibbslab;
using clk = std::chrono::steady_clock;

namespace {

Volume line(int a, int b) {
    std::vector<Site> s;
    for (int i = a; i <= b; ++i) s.push_back(Site({i}));
    return Volume(std::move(s));
}

double ms_since(clk::time_point t0) {
    return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

void row(const std::string& name, double serial_ms, double parallel_ms, double a, double b) {
    std::cout << std::left << std::setw(34) << name << std::right << std::fixed
              << std::setprecision(1) << std::setw(10) << serial_ms << std::setw(10)
              << parallel_ms << std::setw(9) << std::setprecision(2)
              << serial_ms / parallel_ms << "x   |diff| " << std::scientific
              << std::setprecision(2) << std::abs(a - b) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) set_threads(std::atoi(argv[1]));
    std::cout << "threads: " << max_threads() << "\n";
    std::cout << std::left << std::setw(34) << "scan" << std::right << std::setw(10)
              << "serial" << std::setw(10) << "omp" << std::setw(10) << "speedup" << "\n";

    {
        // quasilocality modulus, decaying pair potential, 13-site window
        auto phi = std::make_shared<ExpPairPotential>(0.5, 0.4);
        // separate kernel objects keep the element caches cold for each run
        SpecOnePoint<double> q_par(std::make_shared<GibbsSpecKernel>(phi, line(-6, 6), 2, 13));
        SpecOnePoint<double> q_ser(std::make_shared<GibbsSpecKernel>(phi, line(-6, 6), 2, 13));
        const std::vector<int> radii = {1, 2, 3};
        auto t0 = clk::now();
        const auto par = quasilocality_modulus(q_par, Site({0}), 1, radii);
        const double tp = ms_since(t0);
        t0 = clk::now();
        const auto ser = ref::quasilocality_modulus(q_ser, Site({0}), 1, radii);
        const double ts = ms_since(t0);
        row("quasilocality modulus (13 sites)", ts, tp, par[2], ser[2]);
    }
    {
        // oscillation defects of the two-component product mixture, 14 sites
        std::vector<MixtureComponent<double>> comps(2);
        comps[0].weight = 0.5;
        comps[0].site_probs = {0.8, 0.2};
        comps[1].weight = 0.5;
        comps[1].site_probs = {0.2, 0.8};
        auto mix = std::make_shared<MixtureField<double>>(line(0, 13), 2, std::move(comps));
        FieldOnePoint<double> q(mix);
        const Site t({6});
        const Volume ball = window_ball(mix->window(), t, 1);
        auto t0 = clk::now();
        const auto par = oscillation_defects(q, t, 1, ball, 40);
        const double tp = ms_since(t0);
        t0 = clk::now();
        const auto ser = ref::oscillation_defects(q, t, 1, ball);
        const double ts = ms_since(t0);
        row("oscillation defects (14 sites)", ts, tp, par.agreement, ser.agreement);
    }
    {
        // consistency suite for a 10-site nearest-neighbour kernel
        auto phi = std::make_shared<IsingPotential>(0.7, 0.2);
        GibbsSpecKernel Q_par(phi, line(0, 9), 2, 1);
        GibbsSpecKernel Q_ser(phi, line(0, 9), 2, 1);
        const Volume lam = line(3, 5);
        const Volume I({Site({4})});
        auto t0 = clk::now();
        const double par = spec_consistency_defect(Q_par, lam, I);
        const double tp = ms_since(t0);
        t0 = clk::now();
        const double ser = ref::spec_consistency_defect(Q_ser, lam, I);
        const double ts = ms_since(t0);
        row("consistency defect (10 sites)", ts, tp, par, ser);
    }
    return 0;
}
