#include <doctest.h>

#include <memory>
#include <random>

#include "gibbslab/io.hpp"

using namespace gibbslab;

namespace {

Volume line(int a, int b) {
    std::vector<Site> s;
    for (int i = a; i <= b; ++i) s.push_back(Site({i}));
    return Volume(std::move(s));
}

} // namespace

TEST_CASE("table potential json round trip") {
    TablePotential::Body b1{Volume({Site({0})}), {0.25, -0.5}};
    TablePotential::Body b2{Volume({Site({0}), Site({1})}), {-1.0, 0.5, 0.5, -1.0}};
    TablePotential phi({b1, b2}, 2);
    auto doc = io::table_potential_to_json(phi);
    TablePotential back = io::table_potential_from_json(doc);
    CHECK(back.bodies().size() == 2);
    CHECK(back.value(Configuration(Volume({Site({0})}), {1})) == doctest::Approx(-0.5));
    CHECK(io::table_potential_to_json(back) == doc);
}

TEST_CASE("field table json round trip, float and rational") {
    std::mt19937 rng(3);
    DistributionTable t;
    t.domain = line(0, 2);
    t.alphabet_size = 2;
    double total = 0.0;
    for (int i = 0; i < 8; ++i) t.p.push_back(0.05 + (rng() % 100) / 100.0);
    for (double v : t.p) total += v;
    for (double& v : t.p) v /= total;
    FieldTable<double> f(t);
    auto doc = io::field_table_to_json(f);
    FieldTable<double> back = io::field_table_from_json(doc);
    CHECK(to_double(max_abs_diff(back.table(), t)) == 0.0);

    RationalTable rt;
    rt.domain = line(0, 1);
    rt.alphabet_size = 2;
    rt.p = {Rational(1, 10), Rational(2, 10), Rational(3, 10), Rational(4, 10)};
    FieldTable<Rational> rf(rt);
    auto rdoc = io::field_table_to_json(rf);
    FieldTable<Rational> rback = io::rational_field_table_from_json(rdoc);
    CHECK(max_abs_diff(rback.table(), rt) == Rational(0));

    SUBCASE("integer weights normalize exactly") {
        io::json w;
        w["window"] = io::volume_to_json(line(0, 1));
        w["alphabet_size"] = 2;
        w["order"] = "lexicographic";
        w["probabilities"] = {1, 2, 3, 4};
        FieldTable<Rational> norm = io::rational_field_table_from_json(w);
        CHECK(norm.table().p[0] == Rational(1, 10));
        CHECK(norm.table().sum() == Rational(1));
    }

    SUBCASE("non-lexicographic order is rejected") {
        auto bad = doc;
        bad["order"] = "rowmajor";
        CHECK_THROWS_AS(io::field_table_from_json(bad), std::invalid_argument);
    }
}

TEST_CASE("kernel export lists elements in canonical order") {
    auto f = std::make_shared<FieldTable<double>>(uniform_table<double>(line(0, 2), 2));
    FieldOnePoint<double> q(f);
    auto doc = io::onepoint_kernel_to_json(q, 1);
    CHECK(doc["mode"] == "finite_support");
    // 3 sites x 2 single-site supports x 2 conditioning values
    CHECK(doc["elements"].size() == 12);
    for (const auto& el : doc["elements"]) {
        CHECK(el["probabilities"].size() == 2);
        CHECK(el["probabilities"][0].get<double>() == doctest::Approx(0.5));
    }
}

TEST_CASE("verdict report serialization and csv layout") {
    VerdictReport rep;
    rep.min_positivity = 0.25;
    rep.verdict = Verdict::non_gibbs_flagged;
    DefectSchedule s;
    s.t = Site({1, 2});
    s.x = 1;
    s.condition = "E";
    s.radii = {1, 2};
    s.defects = {0.5, 0.25};
    rep.schedules.push_back(s);
    auto doc = io::verdict_report_to_json(rep);
    CHECK(doc["verdict"] == "non-gibbs-flagged");
    CHECK(doc["schedules"][0]["condition"] == "E");

    const std::string csv = io::defects_csv(rep.schedules);
    CHECK(csv == "site,symbol,radius,condition,defect\n"
                 "1;2,1,1,E,0.5\n"
                 "1;2,1,2,E,0.25\n");
}

TEST_CASE("fnv hash is stable") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("gibbs") == fnv1a64_hex("gibbs"));
    CHECK(fnv1a64_hex("a") != fnv1a64_hex("b"));
}

TEST_CASE("rational literal parsing") {
    CHECK(rational_from_string("3/7") == Rational(3, 7));
    CHECK(rational_from_string("-2") == Rational(-2));
    CHECK(rational_from_string("6/4") == Rational(3, 2));
    CHECK_THROWS_AS(rational_from_string("x"), std::invalid_argument);
    CHECK_THROWS_AS(rational_from_string("1/0"), std::invalid_argument);
}
