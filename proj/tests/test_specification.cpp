#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

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

std::shared_ptr<GibbsSpecKernel> ising_kernel(double coupling, double field, int lo, int hi,
                                              int radius = 1) {
    return std::make_shared<GibbsSpecKernel>(
        std::make_shared<IsingPotential>(coupling, field), line(lo, hi), 2, radius);
}

// random strictly positive table on a volume
DistributionTable random_table(const Volume& v, int k, std::mt19937& rng) {
    DistributionTable t;
    t.domain = v;
    t.alphabet_size = k;
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    double total = 0.0;
    for (std::uint64_t r = 0; r < config_count(v.size(), k); ++r) t.p.push_back(unif(rng));
    for (double w : t.p) total += w;
    for (double& w : t.p) w /= total;
    return t;
}

} // namespace

TEST_CASE("gibbs element: zero potential is uniform, empty volume is the unit mass") {
    auto phi = std::make_shared<ZeroPotential>();
    const Volume w = line(0, 3);
    GibbsSpecKernel Q(phi, w, 3, 1);
    const Volume lam = line(1, 2);
    const Volume rest = volume_difference(w, lam);
    auto tbl = Q.element(lam, config_from_rank(rest, 3, 4));
    for (double p : tbl.p) CHECK(p == doctest::Approx(1.0 / 9.0));

    auto empty = Q.element(Volume{}, config_from_rank(w, 3, 17));
    CHECK(empty.p.size() == 1);
    CHECK(empty.p[0] == doctest::Approx(1.0));
}

TEST_CASE("gibbs element: single-site ising value") {
    // coupling 0.5, both neighbours up: q(+1) = e / (e + 1/e)
    auto Q = ising_kernel(0.5, 0.0, -1, 1);
    const Volume lam({Site({0})});
    Configuration boundary(Volume({Site({-1}), Site({1})}), {1, 1});
    auto tbl = Q->element(lam, boundary);
    CHECK(tbl.p[1] == doctest::Approx(0.8807970779778823).epsilon(1e-12));
    CHECK(tbl.tail_halfwidth == 0.0);

    // global spin flip of the boundary maps q(x) to q(flip x) when h = 0
    Configuration flipped(Volume({Site({-1}), Site({1})}), {0, 0});
    auto tbl2 = Q->element(lam, flipped);
    CHECK(tbl2.p[0] == doctest::Approx(tbl.p[1]).epsilon(1e-14));
    CHECK(tbl2.p[1] == doctest::Approx(tbl.p[0]).epsilon(1e-14));
}

TEST_CASE("gibbs element agrees with the serial reference") {
    std::mt19937 rng(17);
    auto phi = std::make_shared<IsingPotential>(0.8, 0.2);
    const Volume w = line(0, 6);
    GibbsSpecKernel Q(phi, w, 2, 1);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Site> lam_sites;
        for (const Site& s : w.sites())
            if (rng() % 3 == 0) lam_sites.push_back(s);
        if (lam_sites.empty()) lam_sites.push_back(w.site(0));
        Volume lam(lam_sites);
        Volume rest = volume_difference(w, lam);
        Configuration b = config_from_rank(rest, 2, rng() % config_count(rest.size(), 2));
        auto fast = Q.element(lam, b);
        auto slow = ref::gibbs_element(*phi, w, 2, lam, b, 1);
        CHECK(to_double(max_abs_diff(fast, slow)) <= 1e-13);
    }
}

TEST_CASE("spec consistency identity holds for gibbs kernels") {
    auto Q = ising_kernel(0.7, 0.3, 0, 5);
    const Volume lam = line(1, 3);
    SUBCASE("proper subset") {
        const Volume I = line(2, 3);
        CHECK(spec_consistency_defect(*Q, lam, I) <= 1e-12);
    }
    SUBCASE("I equal to lambda collapses both sides") {
        CHECK(spec_consistency_defect(*Q, lam, lam) <= 1e-14);
    }
    SUBCASE("empty I") {
        CHECK(spec_consistency_defect(*Q, lam, Volume{}) <= 1e-14);
    }
}

namespace {

// wrapper perturbing one element entry and renormalizing
class PerturbedKernel final : public SpecKernel {
  public:
    PerturbedKernel(std::shared_ptr<const SpecKernel> base, Volume lam, std::uint64_t boundary_rank,
                    std::uint64_t entry, double eps)
        : base_(std::move(base)), lam_(std::move(lam)), brank_(boundary_rank), entry_(entry),
          eps_(eps) {}

    const Volume& window() const override { return base_->window(); }
    int alphabet_size() const override { return base_->alphabet_size(); }
    TablePtr<double> element_ptr(const Volume& lambda,
                                 const Configuration& boundary) const override {
        auto base = base_->element_ptr(lambda, boundary);
        if (!(lambda == lam_) || rank_of(boundary, alphabet_size()) != brank_) return base;
        DistributionTable t = *base;
        t.p[entry_] += eps_;
        double z = 0.0;
        for (double p : t.p) z += p;
        for (double& p : t.p) p /= z;
        return std::make_shared<const DistributionTable>(std::move(t));
    }

  private:
    std::shared_ptr<const SpecKernel> base_;
    Volume lam_;
    std::uint64_t brank_, entry_;
    double eps_;
};

} // namespace

TEST_CASE("perturbed kernel is caught by the consistency validator") {
    auto base = ising_kernel(0.7, 0.0, 0, 5);
    const Volume lam = line(2, 3);
    PerturbedKernel Q(base, lam, 3, 1, 1e-3);
    const double defect = spec_consistency_defect(Q, lam, Volume({Site({2})}));
    CHECK(defect > 1e-4);
}

TEST_CASE("one-point cycle identity") {
    SUBCASE("gibbs kernels satisfy it") {
        auto Q = ising_kernel(0.6, 0.2, 0, 5);
        SpecOnePoint<double> q(Q);
        CHECK(onepoint_cycle_max_defect(q, Site({2}), Site({4})) <= 1e-13);
        CHECK(onepoint_cycle_max_defect(q, Site({0}), Site({1})) <= 1e-13);
    }

    SUBCASE("kernel of any strictly positive field satisfies it") {
        std::mt19937 rng(29);
        const Volume v = line(0, 4);
        auto field = std::make_shared<FieldTable<double>>(random_table(v, 2, rng));
        // full-complement elements drawn from the field's conditionals
        auto spec = std::make_shared<ReconstructedSpecKernel<double>>(
            std::make_shared<FieldOnePoint<double>>(field));
        SpecOnePoint<double> q(spec);
        CHECK(onepoint_cycle_max_defect(q, Site({1}), Site({3})) <= 1e-12);
    }

    SUBCASE("product-measure kernel is exactly zero in rational mode") {
        const Volume v = line(0, 3);
        RationalTable t;
        t.domain = v;
        t.alphabet_size = 2;
        const Rational p(2, 5);
        for (std::uint64_t r = 0; r < 16; ++r) {
            Rational mass = 1;
            std::vector<Symbol> vals(4);
            decode_rank(r, 2, 4, vals.data());
            for (Symbol s : vals) mass *= (s ? p : 1 - p);
            t.p.push_back(mass);
        }
        auto field = std::make_shared<FieldTable<Rational>>(std::move(t));
        FieldOnePoint<Rational> q(field);
        CHECK(onepoint_cycle_max_defect(q, Site({0}), Site({2})) == Rational(0));
    }

    SUBCASE("independent random tables violate it") {
        std::mt19937 rng(31);
        const Volume w = line(0, 3);
        ExplicitOnePointKernel<double> q(w, 2, ConditioningMode::full_complement);
        for (const Site& t : w.sites()) {
            const Volume rest = volume_difference(w, Volume({t}));
            for (std::uint64_t r = 0; r < config_count(rest.size(), 2); ++r) {
                DistributionTable tbl;
                tbl.domain = Volume({t});
                tbl.alphabet_size = 2;
                const double a = 0.05 + 0.9 * (rng() % 1000) / 1000.0;
                tbl.p = {a, 1 - a};
                q.set_element(t, config_from_rank(rest, 2, r), std::move(tbl));
            }
        }
        CHECK(onepoint_cycle_max_defect(q, Site({0}), Site({2})) > 1e-6);
    }
}

TEST_CASE("reconstruction from one-point data") {
    auto Q = ising_kernel(0.5, 0.1, 0, 6);
    auto q = std::make_shared<SpecOnePoint<double>>(Q);

    SUBCASE("single site returns the one-point element") {
        const Volume lam({Site({3})});
        const Volume rest = volume_difference(Q->window(), lam);
        Configuration b = config_from_rank(rest, 2, 21);
        auto rec = reconstruct_from_onepoint(*q, lam, b);
        auto direct = Q->element(lam, b);
        CHECK(to_double(max_abs_diff(rec, direct)) <= 1e-15);
    }

    SUBCASE("zero potential reconstructs to uniform") {
        auto z = std::make_shared<GibbsSpecKernel>(std::make_shared<ZeroPotential>(), line(0, 4),
                                                   2, 1);
        SpecOnePoint<double> zq(z);
        const Volume lam = line(1, 2);
        auto rec = reconstruct_from_onepoint(zq, lam,
                                             config_from_rank(volume_difference(z->window(), lam), 2, 2));
        for (double p : rec.p) CHECK(p == doctest::Approx(0.25));
    }

    SUBCASE("matches the gibbs element and is order/reference independent") {
        std::mt19937 rng(41);
        const Volume lam = line(2, 4);
        const Volume rest = volume_difference(Q->window(), lam);
        for (int trial = 0; trial < 3; ++trial) {
            Configuration b = config_from_rank(rest, 2, rng() % config_count(rest.size(), 2));
            auto direct = Q->element(lam, b);
            DistributionTable first;
            double spread = 0.0;
            for (int perm = 0; perm < 10; ++perm) {
                std::vector<Site> order = lam.sites();
                std::shuffle(order.begin(), order.end(), rng);
                Configuration u = config_from_rank(lam, 2, rng() % config_count(lam.size(), 2));
                auto rec = reconstruct_from_onepoint(*q, lam, b, u, order);
                CHECK(to_double(max_abs_diff(rec, direct)) <= 1e-12);
                if (perm == 0) first = rec;
                else spread = std::max(spread, to_double(max_abs_diff(rec, first)));
            }
            CHECK(spread <= 1e-12);
        }
    }

    SUBCASE("exactly order independent in rational mode") {
        RationalGibbsSpecKernel RQ(
            std::make_shared<RationalIsingWeights>(Rational(3, 2), Rational(1)), line(0, 4), 2);
        auto rq = std::make_shared<SpecOnePoint<Rational>>(
            std::shared_ptr<const RationalSpecKernel>(&RQ, [](const RationalSpecKernel*) {}));
        const Volume lam = line(1, 3);
        const Volume rest = volume_difference(line(0, 4), lam);
        Configuration b = config_from_rank(rest, 2, 1);
        auto direct = RQ.element(lam, b);
        std::mt19937 rng(43);
        for (int perm = 0; perm < 6; ++perm) {
            std::vector<Site> order = lam.sites();
            std::shuffle(order.begin(), order.end(), rng);
            Configuration u = config_from_rank(lam, 2, rng() % 8);
            auto rec = reconstruct_from_onepoint(*rq, lam, b, u, order);
            CHECK(max_abs_diff(rec, direct) == Rational(0));
        }
    }

    SUBCASE("reconstructed kernel satisfies the consistency identity and stays positive") {
        ReconstructedSpecKernel<double> R(q);
        const Volume lam = line(2, 3);
        CHECK(spec_consistency_defect(R, lam, Volume({Site({2})})) <= 1e-12);
        const Volume rest = volume_difference(Q->window(), lam);
        for (std::uint64_t r = 0; r < 8; ++r) {
            auto tbl = R.element(lam, config_from_rank(rest, 2, r));
            CHECK(tbl.min_entry() > 0.0);
        }
    }

    SUBCASE("non-positive kernels are rejected") {
        const Volume w = line(0, 1);
        ExplicitOnePointKernel<double> bad(w, 2, ConditioningMode::full_complement);
        DistributionTable dead;
        dead.domain = Volume({Site({0})});
        dead.alphabet_size = 2;
        dead.p = {1.0, 0.0};
        bad.set_element(Site({0}), Configuration(Volume({Site({1})}), {0}), dead);
        DistributionTable ok;
        ok.domain = Volume({Site({1})});
        ok.alphabet_size = 2;
        ok.p = {0.5, 0.5};
        bad.set_element(Site({1}), Configuration(Volume({Site({0})}), {0}), ok);
        bad.set_element(Site({1}), Configuration(Volume({Site({0})}), {1}), ok);
        CHECK_THROWS_AS(reconstruct_from_onepoint(bad, w, Configuration{}),
                        positivity_error);
    }
}

TEST_CASE("quasilocality modulus") {
    SUBCASE("finite-range kernel collapses at the range") {
        auto Q = ising_kernel(0.5, 0.0, -3, 3, 6);
        SpecOnePoint<double> q(Q);
        auto mods = quasilocality_modulus(q, Site({0}), 1, {1, 2, 3});
        CHECK(mods[0] <= 1e-14); // radius 1 already pins the neighbours
        CHECK(mods[1] <= 1e-14);
        CHECK(mods[2] <= 1e-14);
    }

    SUBCASE("product kernel is flat at every radius") {
        auto z = std::make_shared<GibbsSpecKernel>(std::make_shared<ZeroPotential>(), line(-2, 2),
                                                   2, 1);
        SpecOnePoint<double> q(z);
        for (double m : quasilocality_modulus(q, Site({0}), 0, {1, 2}))
            CHECK(m == doctest::Approx(0.0));
    }

    SUBCASE("decaying potential: non-increasing and below the certified bound") {
        auto phi = std::make_shared<ExpPairPotential>(0.5, 0.4);
        const Volume w = line(-4, 4);
        auto Q = std::make_shared<GibbsSpecKernel>(phi, w, 2, 16);
        SpecOnePoint<double> q(Q);
        const std::vector<int> radii = {1, 2, 3};
        auto mods = quasilocality_modulus(q, Site({0}), 1, radii);
        auto bounds = quasilocality_bound(*phi, Site({0}), radii);
        for (std::size_t i = 0; i < radii.size(); ++i) {
            CHECK(mods[i] <= bounds[i] + 1e-14);
            if (i) CHECK(mods[i] <= mods[i - 1] + 1e-14);
        }
        CHECK(mods[0] > 1e-4); // genuinely non-local below the range
    }

    SUBCASE("budget overrun names the problem") {
        auto Q = ising_kernel(0.5, 0.0, -3, 3, 6);
        SpecOnePoint<double> q(Q);
        CHECK_THROWS_AS(quasilocality_modulus(q, Site({0}), 1, {1}, 3), budget_error);
    }
}
