#include <doctest.h>

#include <random>
#include <set>

#include "gibbslab/lattice.hpp"

using namespace gibbslab;

TEST_CASE("volume canonical order and membership") {
    Volume v({Site({2}), Site({0}), Site({1})});
    CHECK(v.site(0) == Site({0}));
    CHECK(v.site(2) == Site({2}));
    CHECK(v.contains(Site({1})));
    CHECK(!v.contains(Site({3})));
    CHECK(*v.index_of(Site({2})) == 2);
    CHECK_THROWS_AS(Volume({Site({1}), Site({1})}), std::invalid_argument);
}

TEST_CASE("restrict") {
    Volume sup({Site({0}), Site({1}), Site({2})});
    Configuration x(sup, {3, 1, 2});

    CHECK(restrict_to(x, sup) == x);
    CHECK(restrict_to(x, Volume{}) == Configuration{});
    Configuration r = restrict_to(x, Volume({Site({0}), Site({2})}));
    CHECK(r.values() == std::vector<Symbol>{3, 2});
    CHECK_THROWS_AS(restrict_to(x, Volume({Site({5})})), std::domain_error);
}

TEST_CASE("concatenate") {
    Configuration x(Volume({Site({0})}), {1});
    Configuration y(Volume({Site({1})}), {0});
    CHECK(concatenate(x, Configuration{}) == x);
    Configuration xy = concatenate(x, y);
    CHECK(xy.support().size() == 2);
    CHECK(restrict_to(xy, x.support()) == x);
    CHECK_THROWS_AS(concatenate(x, x), std::domain_error);
}

TEST_CASE("neighborhood is an l-infinity shell disjoint from the volume") {
    CHECK(neighborhood(Volume({Site({0})}), 1) == Volume({Site({-1}), Site({1})}));

    Volume n2 = neighborhood(Volume({Site({0, 0})}), 1);
    CHECK(n2.size() == 8);
    for (const Site& s : n2.sites()) CHECK(linf_distance(s, Site({0, 0})) == 1);

    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Site> sites;
        std::set<std::pair<int, int>> seen;
        const int count = 1 + int(rng() % 5);
        for (int i = 0; i < count; ++i) {
            int a = int(rng() % 7) - 3, b = int(rng() % 7) - 3;
            if (seen.insert({a, b}).second) sites.push_back(Site({a, b}));
        }
        Volume lam(sites);
        const int range = 1 + int(rng() % 3);
        Volume nb = neighborhood(lam, range);
        CHECK(volumes_disjoint(nb, lam));
        for (const Site& s : nb.sites()) {
            CHECK(linf_distance(s, lam) >= 1);
            CHECK(linf_distance(s, lam) <= range);
        }
    }
}

TEST_CASE("enumeration counts, determinism and budget guard") {
    CHECK(enumerate_configurations(Volume{}, 2).size() == 1);
    CHECK(enumerate_configurations(Volume{}, 2)[0].empty());

    Volume v3({Site({0}), Site({1}), Site({2})});
    auto all = enumerate_configurations(v3, 2);
    CHECK(all.size() == 8);
    std::set<std::uint64_t> ranks;
    for (const auto& c : all) ranks.insert(rank_of(c, 2));
    CHECK(ranks.size() == 8);

    Volume v4({Site({0}), Site({1}), Site({2}), Site({3})});
    CHECK(enumerate_configurations(v4, 3).size() == 81);

    auto again = enumerate_configurations(v3, 2);
    CHECK(all == again);

    CHECK_THROWS_AS(config_count(40, 2, 30), budget_error);
    CHECK_NOTHROW(config_count(40, 2, 64));
}

TEST_CASE("rank codec round-trips and first site is most significant") {
    Volume v({Site({0}), Site({1})});
    Configuration c = config_from_rank(v, 3, 5); // 5 = 1*3 + 2
    CHECK(c.values() == std::vector<Symbol>{1, 2});
    CHECK(rank_of(c, 3) == 5);

    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + int(rng() % 6);
        const int k = 2 + int(rng() % 3);
        std::vector<Site> sites;
        for (int i = 0; i < n; ++i) sites.push_back(Site({i}));
        Volume vol(sites);
        const std::uint64_t total = config_count(n, k);
        const std::uint64_t r = rng() % total;
        CHECK(rank_of(config_from_rank(vol, k, r), k) == r);
    }
}

TEST_CASE("config stream restarts") {
    Volume v({Site({0}), Site({1})});
    ConfigStream st(v, 2);
    CHECK(st.total() == 4);
    std::vector<Configuration> first;
    while (!st.done()) first.push_back(st.next());
    st.reset();
    std::vector<Configuration> second;
    while (!st.done()) second.push_back(st.next());
    CHECK(first == second);
}

TEST_CASE("box volume") {
    Volume w = box_volume({3, 2});
    CHECK(w.size() == 6);
    CHECK(w.contains(Site({2, 1})));
    CHECK(!w.contains(Site({3, 0})));
}
