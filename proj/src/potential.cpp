#include "gibbslab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "gibbslab/errors.hpp"

namespace gibbslab {

namespace {

void require_nonempty(const Configuration& z) {
    if (z.empty()) throw std::domain_error("potential evaluated on empty support");
}

// Emits {t} singletons and nearest-neighbour pairs once each.
void nn_bodies(const Volume& interior, const Volume& allowed, bool with_singletons,
               const std::function<void(const Volume&)>& visit) {
    if (interior.empty()) return;
    const int nu = interior.site(0).dimension();
    for (const Site& t : interior.sites()) {
        if (with_singletons) visit(Volume({t}));
        for (int axis = 0; axis < nu; ++axis) {
            for (int dir : {-1, +1}) {
                Site s = t;
                s.coords[axis] += dir;
                if (interior.contains(s)) {
                    if (t < s) visit(Volume({t, s}));
                } else if (allowed.contains(s)) {
                    visit(Volume({t, s}));
                }
            }
        }
    }
}

bool is_nn_pair(const Configuration& z) {
    if (z.support().size() != 2) return false;
    const Site& a = z.support().site(0);
    const Site& b = z.support().site(1);
    int l1 = 0;
    for (std::size_t i = 0; i < a.coords.size(); ++i) l1 += std::abs(a.coords[i] - b.coords[i]);
    return l1 == 1;
}

} // namespace

double ZeroPotential::value(const Configuration& z) const {
    require_nonempty(z);
    return 0.0;
}

double IsingPotential::value(const Configuration& z) const {
    require_nonempty(z);
    if (z.support().size() == 1) return -field_ * spin_of(z.values()[0]);
    if (is_nn_pair(z)) return -coupling_ * spin_of(z.values()[0]) * spin_of(z.values()[1]);
    return 0.0;
}

void IsingPotential::for_each_body(const Volume& interior, const Volume& allowed,
                                   const std::function<void(const Volume&)>& visit) const {
    nn_bodies(interior, allowed, field_ != 0.0, visit);
}

double IsingPotential::tail(const Site& t, int radius) const {
    if (radius < 0) throw std::invalid_argument("tail radius must be >= 0");
    if (radius >= 1) return 0.0;
    return 2.0 * t.dimension() * std::abs(coupling_);
}

double PottsPotential::value(const Configuration& z) const {
    require_nonempty(z);
    if (z.support().size() == 1) return z.values()[0] == 0 ? -field_ : 0.0;
    if (is_nn_pair(z)) return z.values()[0] == z.values()[1] ? -coupling_ : 0.0;
    return 0.0;
}

void PottsPotential::for_each_body(const Volume& interior, const Volume& allowed,
                                   const std::function<void(const Volume&)>& visit) const {
    nn_bodies(interior, allowed, field_ != 0.0, visit);
}

double PottsPotential::tail(const Site& t, int radius) const {
    if (radius < 0) throw std::invalid_argument("tail radius must be >= 0");
    if (radius >= 1) return 0.0;
    return 2.0 * t.dimension() * std::abs(coupling_);
}

ExpPairPotential::ExpPairPotential(double amplitude, double decay, double field)
    : amplitude_(amplitude), decay_(decay), field_(field) {
    if (!(decay > 0.0 && decay < 1.0))
        throw std::invalid_argument("decay factor must be in (0,1)");
    if (amplitude < 0.0) throw std::invalid_argument("amplitude must be >= 0");
}

double ExpPairPotential::value(const Configuration& z) const {
    require_nonempty(z);
    if (z.support().site(0).dimension() != 1)
        throw std::domain_error("exponential pair potential is one-dimensional");
    if (z.support().size() == 1) return -field_ * spin_of(z.values()[0]);
    if (z.support().size() == 2) {
        const int d = std::abs(z.support().site(0).coords[0] - z.support().site(1).coords[0]);
        return -amplitude_ * std::pow(decay_, d) * spin_of(z.values()[0]) * spin_of(z.values()[1]);
    }
    return 0.0;
}

void ExpPairPotential::for_each_body(const Volume& interior, const Volume& allowed,
                                     const std::function<void(const Volume&)>& visit) const {
    for (const Site& t : interior.sites()) {
        if (field_ != 0.0) visit(Volume({t}));
        for (const Site& s : interior.sites())
            if (t < s) visit(Volume({t, s}));
        for (const Site& s : allowed.sites()) visit(Volume({t, s}));
    }
}

double ExpPairPotential::tail(const Site&, int radius) const {
    if (radius < 0) throw std::invalid_argument("tail radius must be >= 0");
    return 2.0 * amplitude_ * std::pow(decay_, radius + 1) / (1.0 - decay_);
}

TablePotential::TablePotential(std::vector<Body> bodies, int alphabet_size)
    : bodies_(std::move(bodies)), k_(alphabet_size) {
    if (k_ < 2) throw std::invalid_argument("alphabet size must be >= 2");
    std::sort(bodies_.begin(), bodies_.end(),
              [](const Body& a, const Body& b) { return a.support.sites() < b.support.sites(); });
    for (std::size_t i = 0; i < bodies_.size(); ++i) {
        const Body& b = bodies_[i];
        if (b.support.empty()) throw std::invalid_argument("table potential body with empty support");
        if (i > 0 && bodies_[i - 1].support == b.support)
            throw std::invalid_argument("duplicate body support " + to_string(b.support));
        if (b.values.size() != config_count(b.support.size(), k_, 62))
            throw std::invalid_argument("body value table size mismatch on " + to_string(b.support));
        double mx = 0.0;
        for (double v : b.values) mx = std::max(mx, std::abs(v));
        body_maxabs_.push_back(mx);
        max_body_sites_ = std::max(max_body_sites_, static_cast<int>(b.support.size()));
        int diam = 0;
        for (const Site& p : b.support.sites())
            for (const Site& q : b.support.sites()) diam = std::max(diam, linf_distance(p, q));
        range_ = std::max(range_, diam);
    }
}

double TablePotential::value(const Configuration& z) const {
    require_nonempty(z);
    auto it = std::lower_bound(bodies_.begin(), bodies_.end(), z.support().sites(),
                               [](const Body& b, const std::vector<Site>& s) {
                                   return b.support.sites() < s;
                               });
    if (it == bodies_.end() || !(it->support == z.support())) return 0.0;
    return it->values[rank_of(z, k_)];
}

void TablePotential::for_each_body(const Volume& interior, const Volume& allowed,
                                   const std::function<void(const Volume&)>& visit) const {
    for (const Body& b : bodies_) {
        if (volumes_disjoint(b.support, interior)) continue;
        const Volume ext = volume_difference(b.support, interior);
        if (allowed.contains(ext)) visit(b.support);
    }
}

double TablePotential::tail(const Site& t, int radius) const {
    if (radius < 0) throw std::invalid_argument("tail radius must be >= 0");
    double s = 0.0;
    for (std::size_t i = 0; i < bodies_.size(); ++i) {
        const Volume& sup = bodies_[i].support;
        if (!sup.contains(t)) continue;
        int reach = 0;
        for (const Site& p : sup.sites()) reach = std::max(reach, linf_distance(p, t));
        if (reach > radius) s += body_maxabs_[i];
    }
    return s;
}

EnergyValue energy(const Potential& phi, const Volume& lambda, const Configuration& x,
                   const Configuration& boundary, int truncation_radius) {
    if (!(x.support() == lambda))
        throw std::domain_error("interior configuration support differs from lambda");
    if (!volumes_disjoint(lambda, boundary.support()))
        throw std::domain_error("boundary support overlaps lambda");
    if (truncation_radius < 0) throw std::invalid_argument("truncation radius must be >= 0");
    if (lambda.empty()) return {0.0, 0.0};

    std::vector<Site> within;
    for (const Site& s : boundary.support().sites())
        if (linf_distance(s, lambda) <= truncation_radius) within.push_back(s);
    const Volume allowed(std::move(within));

    // largest certified radius: every shell up to it lies inside the boundary support
    int margin = 0;
    for (int j = 1; j <= truncation_radius; ++j) {
        if (!boundary.support().contains(neighborhood(lambda, j))) break;
        margin = j;
    }

    const Configuration scene =
        allowed.empty() ? x : concatenate(x, restrict_to(boundary, allowed));
    double sum = 0.0;
    phi.for_each_body(lambda, allowed,
                      [&](const Volume& S) { sum += phi.value(restrict_to(scene, S)); });

    double tail = 0.0;
    for (const Site& t : lambda.sites()) tail += phi.tail(t, std::min(truncation_radius, margin));
    return {sum, tail};
}

TablePotential moebius_extract(const DistributionTable& P, Symbol vacuum) {
    check_distribution(P);
    if (!(P.min_entry() > 0.0)) throw std::domain_error("table must be strictly positive");
    if (vacuum >= P.alphabet_size) throw std::domain_error("vacuum symbol outside alphabet");
    const Volume& V = P.domain;
    const int k = P.alphabet_size;
    const std::size_t n = V.size();
    if (n == 0) return TablePotential({}, k);
    if (n > 20) throw budget_error("moebius extraction limited to 20 sites");

    std::vector<double> logp(P.p.size());
    for (std::size_t i = 0; i < P.p.size(); ++i) logp[i] = std::log(P.p[i]);

    std::vector<Symbol> full(n);
    std::vector<std::size_t> sites_of_mask;
    std::vector<TablePotential::Body> bodies;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        sites_of_mask.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) sites_of_mask.push_back(i);
        const std::size_t m = sites_of_mask.size();
        std::vector<Site> body_sites;
        for (std::size_t i : sites_of_mask) body_sites.push_back(V.site(i));
        TablePotential::Body body{Volume(std::move(body_sites)), {}};
        body.values.assign(config_count(m, k, 62), 0.0);

        std::vector<Symbol> z(m);
        bool any_nonzero = false;
        for (std::uint64_t zr = 0; zr < body.values.size(); ++zr) {
            decode_rank(zr, k, m, z.data());
            // bodies touching the vacuum symbol vanish by the gauge choice
            if (std::find(z.begin(), z.end(), vacuum) != z.end()) continue;
            double acc = 0.0;
            for (std::uint32_t sub = mask;; sub = (sub - 1) & mask) {
                std::fill(full.begin(), full.end(), vacuum);
                std::size_t bits = 0;
                for (std::size_t j = 0; j < m; ++j)
                    if (sub & (1u << sites_of_mask[j])) {
                        full[sites_of_mask[j]] = z[j];
                        ++bits;
                    }
                const int sign = ((m - bits) % 2) ? -1 : 1;
                acc += sign * logp[rank_of(full, k)];
                if (sub == 0) break;
            }
            body.values[zr] = -acc;
            if (body.values[zr] != 0.0) any_nonzero = true;
        }
        if (any_nonzero) bodies.push_back(std::move(body));
    }
    return TablePotential(std::move(bodies), k);
}

RationalIsingWeights::RationalIsingWeights(Rational bond, Rational site)
    : bond_(std::move(bond)), site_(std::move(site)) {
    bond_.canonicalize();
    site_.canonicalize();
    if (!(bond_ > 0) || !(site_ > 0))
        throw std::invalid_argument("rational weights must be strictly positive");
    bond_inv_ = Rational(1) / bond_;
    site_inv_ = Rational(1) / site_;
}

Rational RationalIsingWeights::weight(const Configuration& z) const {
    require_nonempty(z);
    if (z.support().size() == 1) return z.values()[0] ? site_ : site_inv_;
    if (is_nn_pair(z)) return z.values()[0] == z.values()[1] ? bond_ : bond_inv_;
    return Rational(1);
}

void RationalIsingWeights::for_each_body(const Volume& interior, const Volume& allowed,
                                         const std::function<void(const Volume&)>& visit) const {
    nn_bodies(interior, allowed, site_ != 1, visit);
}

} // namespace gibbslab
