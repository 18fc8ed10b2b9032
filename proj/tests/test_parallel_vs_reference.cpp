// The OpenMP scan kernels against the plain serial reference implementations.
#include <doctest.h>

#include <memory>
#include <random>

#include "gibbslab/criteria.hpp"
#include "gibbslab/fields.hpp"
#include "gibbslab/potential.hpp"
#include "gibbslab/reference.hpp"
#include "gibbslab/specification.hpp"

using namespace gibbslab;

namespace {

Volume line(int a, int b) {
    std::vector<Site> s;
    for (int i = a; i <= b; ++i) s.push_back(Site({i}));
    return Volume(std::move(s));
}

} // namespace

TEST_CASE("consistency defect: omp scan vs serial reference") {
    auto Q = std::make_shared<GibbsSpecKernel>(std::make_shared<IsingPotential>(0.7, 0.2),
                                               line(0, 7), 2, 1);
    const Volume lam = line(2, 4);
    for (const Volume& I : {Volume({Site({2})}), Volume({Site({2}), Site({4})}), lam}) {
        const double par = spec_consistency_defect(*Q, lam, I);
        const double ser = ref::spec_consistency_defect(*Q, lam, I);
        CHECK(par == doctest::Approx(ser).epsilon(1e-13));
    }
}

TEST_CASE("cycle defect: omp scan vs serial reference") {
    auto Q = std::make_shared<GibbsSpecKernel>(std::make_shared<PottsPotential>(0.8, 0.1),
                                               line(0, 5), 3, 1);
    SpecOnePoint<double> q(Q);
    CHECK(onepoint_cycle_max_defect(q, Site({1}), Site({4})) ==
          doctest::Approx(ref::onepoint_cycle_max_defect(q, Site({1}), Site({4}))).epsilon(1e-13));
}

TEST_CASE("quasilocality modulus: omp scan vs serial pair scan") {
    auto phi = std::make_shared<ExpPairPotential>(0.5, 0.4);
    auto Q = std::make_shared<GibbsSpecKernel>(phi, line(-4, 4), 2, 16);
    SpecOnePoint<double> q(Q);
    const std::vector<int> radii = {1, 2, 3};
    const auto par = quasilocality_modulus(q, Site({0}), 1, radii);
    const auto ser = ref::quasilocality_modulus(q, Site({0}), 1, radii);
    for (std::size_t i = 0; i < radii.size(); ++i)
        CHECK(par[i] == doctest::Approx(ser[i]).epsilon(1e-13));
}

TEST_CASE("oscillation defects: omp scan vs serial grouping") {
    std::mt19937 rng(9);
    DistributionTable t;
    t.domain = line(0, 6);
    t.alphabet_size = 2;
    double total = 0.0;
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    for (std::uint64_t r = 0; r < config_count(7, 2); ++r) t.p.push_back(unif(rng));
    for (double v : t.p) total += v;
    for (double& v : t.p) v /= total;
    auto f = std::make_shared<FieldTable<double>>(std::move(t));
    FieldOnePoint<double> q(f);
    const Site site({3});
    for (int radius : {1, 2}) {
        const auto par = oscillation_defects(q, site, 1, window_ball(f->window(), site, radius));
        const auto ser = ref::oscillation_defects(q, site, 1, window_ball(f->window(), site, radius));
        CHECK(par.agreement == doctest::Approx(ser.agreement).epsilon(1e-13));
        CHECK(par.same_support == doctest::Approx(ser.same_support).epsilon(1e-13));
        CHECK(par.truncation == doctest::Approx(ser.truncation).epsilon(1e-13));
    }
}

TEST_CASE("envelope and nonnullness: omp vs serial") {
    auto Q = std::make_shared<GibbsSpecKernel>(std::make_shared<IsingPotential>(0.5, 0.15),
                                               line(-3, 3), 2, 1);
    auto q = std::make_shared<SpecOnePoint<double>>(Q);
    const Volume lam({Site({-1}), Site({2})});
    Configuration z(lam, {1, 0});
    const auto par = sullivan_envelope(*q, Site({0}), 1, lam, z);
    const auto ser = ref::sullivan_envelope(*q, Site({0}), 1, lam, z);
    CHECK(par.first == doctest::Approx(ser.first).epsilon(1e-13));
    CHECK(par.second == doctest::Approx(ser.second).epsilon(1e-13));

    NonnullScanScope scope;
    scope.sites = {Site({0})};
    CHECK(uniform_nonnullness(*q, scope) ==
          doctest::Approx(ref::uniform_nonnullness(*q, scope.sites)).epsilon(1e-13));
}

TEST_CASE("gibbs element: production path vs brute-force reference") {
    std::mt19937 rng(21);
    auto phi = std::make_shared<PottsPotential>(0.6, 0.3);
    const Volume w = line(0, 5);
    GibbsSpecKernel Q(phi, w, 3, 1);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<Site> lam_sites;
        for (const Site& s : w.sites())
            if (rng() % 3 == 0) lam_sites.push_back(s);
        if (lam_sites.empty()) lam_sites.push_back(w.site(1));
        const Volume lam(lam_sites);
        const Volume rest = volume_difference(w, lam);
        Configuration b = config_from_rank(rest, 3, rng() % config_count(rest.size(), 3));
        CHECK(to_double(max_abs_diff(Q.element(lam, b),
                                     ref::gibbs_element(*phi, w, 3, lam, b, 1))) <= 1e-13);
    }
}
