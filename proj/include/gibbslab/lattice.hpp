// Sites, finite volumes and configurations on Z^nu, plus the canonical
// enumeration machinery every other module builds on. All types are
// immutable values; the canonical site order is lexicographic on
// coordinates and the canonical configuration order reads the value tuple
// in site order with the first site most significant.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gibbslab/errors.hpp"

namespace gibbslab {

using Symbol = std::uint8_t;

inline constexpr int default_budget_bits = 30;

struct LatticeConfig {
    int dimension = 1;     // nu >= 1
    int alphabet_size = 2; // k >= 2, symbols are 0..k-1
};

void validate(const LatticeConfig& cfg);

struct Site {
    std::vector<std::int32_t> coords;

    Site() = default;
    explicit Site(std::vector<std::int32_t> c) : coords(std::move(c)) {}
    Site(std::initializer_list<std::int32_t> c) : coords(c) {}

    int dimension() const { return static_cast<int>(coords.size()); }

    friend bool operator==(const Site& a, const Site& b) { return a.coords == b.coords; }
    friend bool operator!=(const Site& a, const Site& b) { return !(a == b); }
    friend bool operator<(const Site& a, const Site& b) { return a.coords < b.coords; }
};

int linf_distance(const Site& a, const Site& b);
std::string to_string(const Site& s);

// Finite set of sites in canonical (lexicographic) order, no duplicates.
class Volume {
  public:
    Volume() = default;
    explicit Volume(std::vector<Site> sites); // sorts; throws std::invalid_argument on duplicates

    std::size_t size() const { return sites_.size(); }
    bool empty() const { return sites_.empty(); }
    const Site& site(std::size_t i) const { return sites_[i]; }
    const std::vector<Site>& sites() const { return sites_; }

    bool contains(const Site& s) const;
    bool contains(const Volume& sub) const;
    // Position of s in canonical order, if present.
    std::optional<std::size_t> index_of(const Site& s) const;

    friend bool operator==(const Volume& a, const Volume& b) { return a.sites_ == b.sites_; }
    friend bool operator!=(const Volume& a, const Volume& b) { return !(a == b); }

  private:
    std::vector<Site> sites_;
};

bool volumes_disjoint(const Volume& a, const Volume& b);
Volume volume_union(const Volume& a, const Volume& b);
Volume disjoint_union(const Volume& a, const Volume& b); // throws std::domain_error on overlap
Volume volume_difference(const Volume& a, const Volume& b);
Volume volume_intersection(const Volume& a, const Volume& b);
int linf_distance(const Site& s, const Volume& v); // min over sites of v; throws if v empty
std::string to_string(const Volume& v);

// All sites at l-infinity distance in [1, range] from lambda (disjoint from lambda).
Volume neighborhood(const Volume& lambda, int range);

// Box window {0..extents[0]-1} x ... as a Volume.
Volume box_volume(const std::vector<int>& extents);

// Assignment of one symbol per site of a support volume. The empty
// configuration (empty support) is legal.
class Configuration {
  public:
    Configuration() = default;
    Configuration(Volume support, std::vector<Symbol> values);

    const Volume& support() const { return support_; }
    const std::vector<Symbol>& values() const { return values_; }
    bool empty() const { return values_.empty(); }
    Symbol at(const Site& s) const; // throws std::domain_error if s not in support

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.support_ == b.support_ && a.values_ == b.values_;
    }
    friend bool operator!=(const Configuration& a, const Configuration& b) { return !(a == b); }

  private:
    Volume support_;
    std::vector<Symbol> values_;
};

// Subconfiguration of x on T. Requires T contained in support(x).
Configuration restrict_to(const Configuration& x, const Volume& T);

// Configuration on the disjoint union of the two supports, equal to x and y
// on their respective supports. Requires disjoint supports.
Configuration concatenate(const Configuration& x, const Configuration& y);

std::string to_string(const Configuration& x);

// ---- canonical rank codec -------------------------------------------------
//
// rank(values) = sum_i values[i] * k^(n-1-i): the first site in canonical
// order is the most significant digit, so ranks sort configurations
// lexicographically by value tuple.

// k^n with the budget guard n*log2(k) <= budget_bits; throws budget_error.
std::uint64_t config_count(std::size_t n_sites, int k, int budget_bits = default_budget_bits);

void decode_rank(std::uint64_t rank, int k, std::size_t n, Symbol* out);
std::uint64_t rank_of(const std::vector<Symbol>& values, int k);
std::uint64_t rank_of(const Configuration& x, int k);
Configuration config_from_rank(const Volume& v, int k, std::uint64_t rank);

// Restartable stream over all configurations on v in canonical order.
class ConfigStream {
  public:
    ConfigStream(Volume v, int k, int budget_bits = default_budget_bits)
        : volume_(std::move(v)), k_(k), total_(config_count(volume_.size(), k, budget_bits)) {}

    bool done() const { return next_ == total_; }
    Configuration next();
    void reset() { next_ = 0; }
    std::uint64_t total() const { return total_; }

  private:
    Volume volume_;
    int k_;
    std::uint64_t total_;
    std::uint64_t next_ = 0;
};

std::vector<Configuration> enumerate_configurations(const Volume& v, int k,
                                                    int budget_bits = default_budget_bits);

} // namespace gibbslab
