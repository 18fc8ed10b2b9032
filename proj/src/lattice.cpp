#include "gibbslab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gibbslab {

void validate(const LatticeConfig& cfg) {
    if (cfg.dimension < 1) throw std::invalid_argument("lattice dimension must be >= 1");
    if (cfg.alphabet_size < 2) throw std::invalid_argument("alphabet size must be >= 2");
}

int linf_distance(const Site& a, const Site& b) {
    if (a.dimension() != b.dimension())
        throw std::invalid_argument("sites of different dimension");
    int d = 0;
    for (std::size_t i = 0; i < a.coords.size(); ++i)
        d = std::max(d, std::abs(a.coords[i] - b.coords[i]));
    return d;
}

std::string to_string(const Site& s) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < s.coords.size(); ++i) {
        if (i) os << " ";
        os << s.coords[i];
    }
    os << ")";
    return os.str();
}

Volume::Volume(std::vector<Site> sites) : sites_(std::move(sites)) {
    std::sort(sites_.begin(), sites_.end());
    for (std::size_t i = 1; i < sites_.size(); ++i)
        if (sites_[i] == sites_[i - 1])
            throw std::invalid_argument("duplicate site in volume: " + to_string(sites_[i]));
}

bool Volume::contains(const Site& s) const {
    return std::binary_search(sites_.begin(), sites_.end(), s);
}

bool Volume::contains(const Volume& sub) const {
    return std::includes(sites_.begin(), sites_.end(), sub.sites_.begin(), sub.sites_.end());
}

std::optional<std::size_t> Volume::index_of(const Site& s) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
    if (it == sites_.end() || !(*it == s)) return std::nullopt;
    return static_cast<std::size_t>(it - sites_.begin());
}

bool volumes_disjoint(const Volume& a, const Volume& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a.site(i) < b.site(j)) ++i;
        else if (b.site(j) < a.site(i)) ++j;
        else return false;
    }
    return true;
}

Volume volume_union(const Volume& a, const Volume& b) {
    std::vector<Site> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.sites().begin(), a.sites().end(), b.sites().begin(), b.sites().end(),
                   std::back_inserter(out));
    return Volume(std::move(out));
}

Volume disjoint_union(const Volume& a, const Volume& b) {
    if (!volumes_disjoint(a, b)) throw std::domain_error("volumes overlap");
    return volume_union(a, b);
}

Volume volume_difference(const Volume& a, const Volume& b) {
    std::vector<Site> out;
    std::set_difference(a.sites().begin(), a.sites().end(), b.sites().begin(), b.sites().end(),
                        std::back_inserter(out));
    return Volume(std::move(out));
}

Volume volume_intersection(const Volume& a, const Volume& b) {
    std::vector<Site> out;
    std::set_intersection(a.sites().begin(), a.sites().end(), b.sites().begin(), b.sites().end(),
                          std::back_inserter(out));
    return Volume(std::move(out));
}

int linf_distance(const Site& s, const Volume& v) {
    if (v.empty()) throw std::invalid_argument("distance to empty volume");
    int d = linf_distance(s, v.site(0));
    for (std::size_t i = 1; i < v.size(); ++i) d = std::min(d, linf_distance(s, v.site(i)));
    return d;
}

std::string to_string(const Volume& v) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << " ";
        os << to_string(v.site(i));
    }
    os << "}";
    return os.str();
}

Volume neighborhood(const Volume& lambda, int range) {
    if (range < 1) throw std::invalid_argument("neighborhood range must be >= 1");
    if (lambda.empty()) return Volume{};
    const int nu = lambda.site(0).dimension();
    std::set<Site> out;
    std::vector<int> off(nu, -range);
    for (const Site& base : lambda.sites()) {
        std::fill(off.begin(), off.end(), -range);
        while (true) {
            Site cand = base;
            for (int i = 0; i < nu; ++i) cand.coords[i] += off[i];
            if (!lambda.contains(cand)) out.insert(cand);
            int i = 0;
            for (; i < nu; ++i) {
                if (++off[i] <= range) break;
                off[i] = -range;
            }
            if (i == nu) break;
        }
    }
    return Volume(std::vector<Site>(out.begin(), out.end()));
}

Volume box_volume(const std::vector<int>& extents) {
    const int nu = static_cast<int>(extents.size());
    if (nu < 1) throw std::invalid_argument("window extents empty");
    for (int e : extents)
        if (e < 1) throw std::invalid_argument("window extent must be >= 1");
    std::vector<Site> sites;
    std::vector<std::int32_t> c(nu, 0);
    while (true) {
        sites.push_back(Site(c));
        int i = nu - 1;
        for (; i >= 0; --i) {
            if (++c[i] < extents[i]) break;
            c[i] = 0;
        }
        if (i < 0) break;
    }
    return Volume(std::move(sites));
}

Configuration::Configuration(Volume support, std::vector<Symbol> values)
    : support_(std::move(support)), values_(std::move(values)) {
    if (support_.size() != values_.size())
        throw std::invalid_argument("configuration values/support size mismatch");
}

Symbol Configuration::at(const Site& s) const {
    auto idx = support_.index_of(s);
    if (!idx) throw std::domain_error("site " + to_string(s) + " not in configuration support");
    return values_[*idx];
}

Configuration restrict_to(const Configuration& x, const Volume& T) {
    if (!x.support().contains(T))
        throw std::domain_error("restriction target " + to_string(T) + " not contained in support");
    std::vector<Symbol> vals(T.size());
    for (std::size_t i = 0; i < T.size(); ++i) vals[i] = x.values()[*x.support().index_of(T.site(i))];
    return Configuration(T, std::move(vals));
}

Configuration concatenate(const Configuration& x, const Configuration& y) {
    Volume u = disjoint_union(x.support(), y.support());
    std::vector<Symbol> vals(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Site& s = u.site(i);
        auto ix = x.support().index_of(s);
        vals[i] = ix ? x.values()[*ix] : y.values()[*y.support().index_of(s)];
    }
    return Configuration(std::move(u), std::move(vals));
}

std::string to_string(const Configuration& x) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < x.support().size(); ++i) {
        if (i) os << " ";
        os << to_string(x.support().site(i)) << "=" << int(x.values()[i]);
    }
    os << "]";
    return os.str();
}

std::uint64_t config_count(std::size_t n_sites, int k, int budget_bits) {
    if (k < 2) throw std::invalid_argument("alphabet size must be >= 2");
    const double bits = static_cast<double>(n_sites) * std::log2(static_cast<double>(k));
    if (bits > static_cast<double>(budget_bits)) {
        std::ostringstream os;
        os << "enumeration budget exceeded: " << n_sites << " sites with alphabet " << k << " need "
           << bits << " bits, budget is " << budget_bits << " bits";
        throw budget_error(os.str());
    }
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n_sites; ++i) total *= static_cast<std::uint64_t>(k);
    return total;
}

void decode_rank(std::uint64_t rank, int k, std::size_t n, Symbol* out) {
    for (std::size_t i = n; i-- > 0;) {
        out[i] = static_cast<Symbol>(rank % static_cast<std::uint64_t>(k));
        rank /= static_cast<std::uint64_t>(k);
    }
}

std::uint64_t rank_of(const std::vector<Symbol>& values, int k) {
    std::uint64_t r = 0;
    for (Symbol v : values) r = r * static_cast<std::uint64_t>(k) + v;
    return r;
}

std::uint64_t rank_of(const Configuration& x, int k) { return rank_of(x.values(), k); }

Configuration config_from_rank(const Volume& v, int k, std::uint64_t rank) {
    std::vector<Symbol> vals(v.size());
    decode_rank(rank, k, v.size(), vals.data());
    return Configuration(v, std::move(vals));
}

Configuration ConfigStream::next() {
    if (done()) throw std::out_of_range("configuration stream exhausted");
    return config_from_rank(volume_, k_, next_++);
}

std::vector<Configuration> enumerate_configurations(const Volume& v, int k, int budget_bits) {
    const std::uint64_t total = config_count(v.size(), k, budget_bits);
    std::vector<Configuration> out;
    out.reserve(total);
    for (std::uint64_t r = 0; r < total; ++r) out.push_back(config_from_rank(v, k, r));
    return out;
}

} // namespace gibbslab
