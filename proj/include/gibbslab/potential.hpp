// Interaction potentials, energy evaluation with certified truncation, and
// tail bounds; Moebius extraction of a table potential from an explicit
// field; rational Boltzmann-weight interactions for the exact mode.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gibbslab/distribution.hpp"
#include "gibbslab/lattice.hpp"

namespace gibbslab {

// Spin convention for k = 2 models: symbol 0 is spin -1, symbol 1 is +1.
inline int spin_of(Symbol v) { return v ? 1 : -1; }

struct EnergyValue {
    double value = 0.0;
    double tail_bound = 0.0; // certified bound on the omitted terms, 0 when exact
};

class Potential {
  public:
    virtual ~Potential() = default;

    // Phi(z) for a configuration z with non-empty finite support.
    virtual double value(const Configuration& z) const = 0;

    // Visits every support S on which Phi may be nonzero with
    // S ∩ interior != {} and S \ interior ⊆ allowed, each exactly once.
    virtual void for_each_body(const Volume& interior, const Volume& allowed,
                               const std::function<void(const Volume&)>& visit) const = 0;

    // tau(t, R): bound on the absolute sum of interaction terms at t whose
    // exterior part reaches outside the radius-R ball; non-increasing in R.
    // Throws unsupported_potential_error when no bound is available.
    virtual double tail(const Site& t, int radius) const = 0;

    // l-infinity diameter bound when the interaction family is finite.
    virtual std::optional<int> finite_range() const = 0;

    virtual int max_body_size() const = 0;
};

class ZeroPotential final : public Potential {
  public:
    double value(const Configuration&) const override;
    void for_each_body(const Volume&, const Volume&,
                       const std::function<void(const Volume&)>&) const override {}
    double tail(const Site&, int) const override { return 0.0; }
    std::optional<int> finite_range() const override { return 0; }
    int max_body_size() const override { return 0; }
};

// Nearest-neighbour Ising in any dimension: Phi({s,t}) = -J sigma_s sigma_t
// on lattice bonds, Phi({t}) = -h sigma_t. Inverse temperature is folded
// into the couplings; positive J is ferromagnetic.
class IsingPotential final : public Potential {
  public:
    IsingPotential(double coupling, double field) : coupling_(coupling), field_(field) {}

    double value(const Configuration& z) const override;
    void for_each_body(const Volume& interior, const Volume& allowed,
                       const std::function<void(const Volume&)>& visit) const override;
    double tail(const Site&, int radius) const override;
    std::optional<int> finite_range() const override { return 1; }
    int max_body_size() const override { return 2; }

    double coupling() const { return coupling_; }
    double field() const { return field_; }

  private:
    double coupling_;
    double field_;
};

// Nearest-neighbour Potts: Phi({s,t}) = -J [a = b], Phi({t}) = -h [a = 0].
class PottsPotential final : public Potential {
  public:
    PottsPotential(double coupling, double field) : coupling_(coupling), field_(field) {}

    double value(const Configuration& z) const override;
    void for_each_body(const Volume& interior, const Volume& allowed,
                       const std::function<void(const Volume&)>& visit) const override;
    double tail(const Site&, int radius) const override;
    std::optional<int> finite_range() const override { return 1; }
    int max_body_size() const override { return 2; }

  private:
    double coupling_;
    double field_;
};

// 1D exponentially decaying pair coupling J(d) = J0 * decay^d:
// Phi({s,t}) = -J(|s-t|) sigma_s sigma_t, plus an optional single-site field.
// Geometric tail bound tau(t, R) = 2 J0 decay^{R+1} / (1 - decay).
class ExpPairPotential final : public Potential {
  public:
    ExpPairPotential(double amplitude, double decay, double field = 0.0);

    double value(const Configuration& z) const override;
    void for_each_body(const Volume& interior, const Volume& allowed,
                       const std::function<void(const Volume&)>& visit) const override;
    double tail(const Site&, int radius) const override;
    std::optional<int> finite_range() const override { return std::nullopt; }
    int max_body_size() const override { return 2; }

  private:
    double amplitude_;
    double decay_;
    double field_;
};

// Explicit finite family of interaction bodies with dense value tables in
// canonical configuration order.
class TablePotential final : public Potential {
  public:
    struct Body {
        Volume support;
        std::vector<double> values; // size k^{|support|}
    };

    TablePotential(std::vector<Body> bodies, int alphabet_size);

    double value(const Configuration& z) const override;
    void for_each_body(const Volume& interior, const Volume& allowed,
                       const std::function<void(const Volume&)>& visit) const override;
    double tail(const Site& t, int radius) const override;
    std::optional<int> finite_range() const override { return range_; }
    int max_body_size() const override { return max_body_sites_; }

    const std::vector<Body>& bodies() const { return bodies_; }
    int alphabet_size() const { return k_; }

  private:
    std::vector<Body> bodies_; // sorted by support
    std::vector<double> body_maxabs_;
    int k_;
    int range_ = 0;
    int max_body_sites_ = 0;
};

// U over lambda given the boundary, truncated at the given radius. The sum
// runs over every interaction body meeting lambda whose exterior part lies
// in the boundary support within the radius; tail_bound certifies all
// omitted terms and is 0 in the finite-range case with enough margin.
EnergyValue energy(const Potential& phi, const Volume& lambda, const Configuration& x,
                   const Configuration& boundary, int truncation_radius);

// Interaction potential of an explicit strictly positive table: the unique
// body family vanishing on the vacuum symbol whose Boltzmann weights
// reproduce P up to normalization.
TablePotential moebius_extract(const DistributionTable& P, Symbol vacuum);

// Multiplicative interactions with exact rational values, the exact
// counterpart of exp(-Phi) for user-supplied Boltzmann weights.
class RationalWeightPotential {
  public:
    virtual ~RationalWeightPotential() = default;
    virtual Rational weight(const Configuration& body) const = 0; // > 0
    virtual void for_each_body(const Volume& interior, const Volume& allowed,
                               const std::function<void(const Volume&)>& visit) const = 0;
};

// Ising-style weights: bond factor w^{sigma_s sigma_t}, site factor
// v^{sigma_t}; exact for rational w, v > 0.
class RationalIsingWeights final : public RationalWeightPotential {
  public:
    RationalIsingWeights(Rational bond, Rational site);

    Rational weight(const Configuration& body) const override;
    void for_each_body(const Volume& interior, const Volume& allowed,
                       const std::function<void(const Volume&)>& visit) const override;

  private:
    Rational bond_, bond_inv_;
    Rational site_, site_inv_;
};

} // namespace gibbslab
