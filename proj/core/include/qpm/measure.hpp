#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpm/hermitian.hpp"

namespace qpm {

// Finite sample space: an ordered list of distinct point labels.
struct SampleSpace {
    std::vector<std::string> labels;

    SampleSpace() = default;
    explicit SampleSpace(std::vector<std::string> l);

    // Convenience space with labels x1..xn.
    static SampleSpace numbered(std::size_t n);

    std::size_t size() const { return labels.size(); }
    std::optional<std::size_t> index_of(const std::string& label) const;

    bool operator==(const SampleSpace& o) const { return labels == o.labels; }
};

// Sub-sigma-algebra of the power set, represented as a partition into
// disjoint nonempty blocks of point indices covering {0..n-1}.
struct Partition {
    std::vector<std::vector<std::size_t>> blocks;

    static Partition trivial(std::size_t n);
    static Partition singletons(std::size_t n);

    std::size_t num_blocks() const { return blocks.size(); }
    void validate(std::size_t n) const;  // throws domain_error on bad shape
    std::vector<std::size_t> block_of_point(std::size_t n) const;  // point -> block index
};

// Finite POVM: one PSD atom per sample point. is_probability marks the
// normalisation nu(X) = 1.
struct QuantumMeasure {
    SampleSpace space;
    std::size_t dim{0};
    std::vector<HermitianMatrix> atoms;
    bool is_probability{false};

    const HermitianMatrix& atom(std::size_t i) const { return atoms[i]; }
    HermitianMatrix total() const;  // nu(X) = sum of atoms
};

struct ClassicalMeasure {
    SampleSpace space;
    std::vector<double> weights;

    double total() const;
};

struct ValidationReport {
    std::vector<double> atom_min_eigenvalues;
    std::vector<bool> atom_psd;
    std::vector<std::size_t> zero_atoms;
    double sum_identity_deviation{0.0};  // ||sum - 1||_F
    double total_norm{0.0};              // ||nu(X)||_F
    bool additivity_ok{true};            // sampled disjoint-union consistency
    bool valid_povm{false};
    bool valid_probability{false};
};

ValidationReport validate(const QuantumMeasure& nu, const Tolerances& tol = {});

// mu = (1/d) tr o nu.
ClassicalMeasure induced_mu(const QuantumMeasure& nu);

// Restriction of nu to the sigma-algebra generated by f: a measure on the
// quotient space whose points are the blocks, atom(B) = sum over the block.
QuantumMeasure restrict(const QuantumMeasure& nu, const Partition& f);

enum class AbsContinuityMode { weak, strong };

// weak:   atom1(x) = 0 implies atom2(x) = 0 (at the rank cutoff)
// strong: additionally the support of atom1(x) dominates that of atom2(x)
bool is_abs_continuous(const QuantumMeasure& nu2, const QuantumMeasure& nu1,
                       AbsContinuityMode mode, const Tolerances& tol = {});

// ---- seeded generators -------------------------------------------------

// Deterministic counter-based RNG (splitmix64 + Box-Muller); no global
// state, identical streams for identical seeds on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double uniform();        // [0, 1)
    double gaussian();       // standard normal
    cplx complex_gaussian(); // (g1 + i g2)/sqrt(2)
    std::uint64_t below(std::uint64_t n);  // uniform in [0, n)

    // Independent child stream, for deriving per-trial seeds.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

  private:
    std::uint64_t state_;
    bool have_spare_{false};
    double spare_{0.0};
};

struct RandomPovmOptions {
    double ridge = 1e-3;
};

// G_j = A_j A_j^dag + ridge, atoms h_j = S^{-1/2} G_j S^{-1/2} with
// S = sum G_j. Valid probability measure; invertible atoms when ridge > 0.
QuantumMeasure random_povm(const SampleSpace& space, std::size_t d, std::uint64_t seed,
                           const RandomPovmOptions& options = {});

Partition random_partition(const SampleSpace& space, std::uint64_t seed,
                           std::size_t num_blocks);

// Random PSD matrix A A^dag + ridge, rescaled to unit spectral norm.
HermitianMatrix random_psd(std::size_t d, Rng& rng, double ridge = 0.0);

// Random density matrix (PSD, trace 1).
HermitianMatrix random_density(std::size_t d, Rng& rng);

// Random Hermitian matrix with spectrum rescaled into [lo, hi].
HermitianMatrix random_hermitian_in(std::size_t d, Rng& rng, double lo, double hi);

}  // namespace qpm
