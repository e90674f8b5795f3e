#include "qpm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qpm {

SampleSpace::SampleSpace(std::vector<std::string> l) : labels(std::move(l)) {
    if (labels.empty()) throw domain_error("SampleSpace: needs at least one point");
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) throw domain_error("SampleSpace: duplicate labels");
}

SampleSpace SampleSpace::numbered(std::size_t n) {
    std::vector<std::string> l;
    l.reserve(n);
    for (std::size_t i = 0; i < n; ++i) l.push_back("x" + std::to_string(i + 1));
    return SampleSpace(std::move(l));
}

std::optional<std::size_t> SampleSpace::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return i;
    return std::nullopt;
}

Partition Partition::trivial(std::size_t n) {
    Partition p;
    p.blocks.emplace_back();
    for (std::size_t i = 0; i < n; ++i) p.blocks[0].push_back(i);
    return p;
}

Partition Partition::singletons(std::size_t n) {
    Partition p;
    for (std::size_t i = 0; i < n; ++i) p.blocks.push_back({i});
    return p;
}

void Partition::validate(std::size_t n) const {
    std::vector<bool> seen(n, false);
    std::size_t count = 0;
    for (const auto& b : blocks) {
        if (b.empty()) throw domain_error("Partition: empty block");
        for (std::size_t i : b) {
            if (i >= n) throw domain_error("Partition: index out of range");
            if (seen[i]) throw domain_error("Partition: blocks not disjoint");
            seen[i] = true;
            ++count;
        }
    }
    if (count != n) throw domain_error("Partition: blocks do not cover the space");
}

std::vector<std::size_t> Partition::block_of_point(std::size_t n) const {
    std::vector<std::size_t> owner(n, 0);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (std::size_t i : blocks[b]) owner[i] = b;
    return owner;
}

HermitianMatrix QuantumMeasure::total() const {
    HermitianMatrix t(dim);
    for (const auto& a : atoms) t += a;
    return t;
}

double ClassicalMeasure::total() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

ValidationReport validate(const QuantumMeasure& nu, const Tolerances& tol) {
    ValidationReport rep;
    const std::size_t n = nu.space.size();
    if (nu.atoms.size() != n) throw dimension_error("validate: atom count != point count");

    double scale = 0.0;
    for (const auto& a : nu.atoms) scale = std::max(scale, max_abs_eigenvalue(a));

    bool all_psd = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (nu.atoms[i].dim() != nu.dim) throw dimension_error("validate: atom dim mismatch");
        const double lmin = min_eigenvalue(nu.atoms[i]);
        rep.atom_min_eigenvalues.push_back(lmin);
        const bool ok = lmin >= -tol.rank_rel * (scale > 0.0 ? scale : 1.0);
        rep.atom_psd.push_back(ok);
        all_psd = all_psd && ok;
        if (nu.atoms[i].frobenius() <= tol.rank_rel * (scale > 0.0 ? scale : 1.0))
            rep.zero_atoms.push_back(i);
    }

    const HermitianMatrix total = nu.total();
    rep.total_norm = total.frobenius();
    rep.sum_identity_deviation =
        frobenius_distance(total, HermitianMatrix::identity(nu.dim));

    // Finite additivity on sampled disjoint pairs: even/odd split plus a
    // prefix/suffix split. Exact by construction; checked anyway.
    auto sum_over = [&](std::size_t lo, std::size_t hi, std::size_t step) {
        HermitianMatrix s(nu.dim);
        for (std::size_t i = lo; i < hi; i += step) s += nu.atoms[i];
        return s;
    };
    const HermitianMatrix evens = sum_over(0, n, 2);
    const HermitianMatrix odds = sum_over(1, n, 2);
    rep.additivity_ok = frobenius_distance(evens + odds, total) <= tol.residual;

    rep.valid_povm = all_psd && rep.total_norm > tol.rank_rel;
    rep.valid_probability =
        rep.valid_povm && rep.sum_identity_deviation <= tol.residual;
    return rep;
}

ClassicalMeasure induced_mu(const QuantumMeasure& nu) {
    ClassicalMeasure mu;
    mu.space = nu.space;
    mu.weights.reserve(nu.atoms.size());
    for (const auto& a : nu.atoms) mu.weights.push_back(a.trace() / static_cast<double>(nu.dim));
    return mu;
}

QuantumMeasure restrict(const QuantumMeasure& nu, const Partition& f) {
    f.validate(nu.space.size());
    QuantumMeasure out;
    out.dim = nu.dim;
    out.is_probability = nu.is_probability;
    std::vector<std::string> labels;
    for (const auto& block : f.blocks) {
        HermitianMatrix s(nu.dim);
        std::string name;
        for (std::size_t i : block) {
            s += nu.atoms[i];
            if (!name.empty()) name += "+";
            name += nu.space.labels[i];
        }
        out.atoms.push_back(s);
        labels.push_back(name);
    }
    out.space = SampleSpace(std::move(labels));
    return out;
}

bool is_abs_continuous(const QuantumMeasure& nu2, const QuantumMeasure& nu1,
                       AbsContinuityMode mode, const Tolerances& tol) {
    if (!(nu1.space == nu2.space) || nu1.dim != nu2.dim)
        throw dimension_error("is_abs_continuous: measures live on different spaces");
    double scale = 0.0;
    for (const auto& a : nu1.atoms) scale = std::max(scale, a.frobenius());
    for (const auto& a : nu2.atoms) scale = std::max(scale, a.frobenius());
    const double cutoff = tol.rank_rel * (scale > 0.0 ? scale : 1.0);

    for (std::size_t i = 0; i < nu1.atoms.size(); ++i) {
        const bool zero1 = nu1.atoms[i].frobenius() <= cutoff;
        const bool zero2 = nu2.atoms[i].frobenius() <= cutoff;
        if (zero1 && !zero2) return false;
        if (mode == AbsContinuityMode::strong && !zero2) {
            const HermitianMatrix q1 = support_projection(nu1.atoms[i], tol);
            const HermitianMatrix q2 = support_projection(nu2.atoms[i], tol);
            const HermitianMatrix sandwich = hermitize(q1.mat() * q2.mat() * q1.mat());
            if (frobenius_distance(sandwich, q2) > tol.residual) return false;
        }
    }
    return true;
}

// ---- RNG ---------------------------------------------------------------

std::uint64_t Rng::next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

cplx Rng::complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return cplx(re, im) / std::sqrt(2.0);
}

std::uint64_t Rng::below(std::uint64_t n) { return n ? next_u64() % n : 0; }

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed ^ (0x632be59bd9b4e019ULL * (index + 1)));
    return r.next_u64();
}

QuantumMeasure random_povm(const SampleSpace& space, std::size_t d, std::uint64_t seed,
                           const RandomPovmOptions& options) {
    if (d == 0) throw dimension_error("random_povm: dim must be >= 1");
    Rng rng(seed);
    const std::size_t n = space.size();
    std::vector<HermitianMatrix> gs;
    gs.reserve(n);
    HermitianMatrix sum(d);
    for (std::size_t j = 0; j < n; ++j) {
        Mat a(d, d);
        for (cplx& z : a.a) z = rng.complex_gaussian();
        HermitianMatrix g = hermitize(a * a.adjoint());
        if (options.ridge > 0.0) g += options.ridge * HermitianMatrix::identity(d);
        sum += g;
        gs.push_back(std::move(g));
    }
    const HermitianMatrix sinv = generalized_inv_sqrt(sum);
    QuantumMeasure nu;
    nu.space = space;
    nu.dim = d;
    nu.is_probability = true;
    for (auto& g : gs) nu.atoms.push_back(hermitize(sinv.mat() * g.mat() * sinv.mat()));
    return nu;
}

Partition random_partition(const SampleSpace& space, std::uint64_t seed,
                           std::size_t num_blocks) {
    const std::size_t n = space.size();
    if (num_blocks < 1 || num_blocks > n) {
        std::ostringstream os;
        os << "random_partition: num_blocks " << num_blocks << " out of range [1, " << n << "]";
        throw domain_error(os.str());
    }
    Rng rng(seed);
    // Seed each block with one point, then assign the rest uniformly.
    std::vector<std::size_t> points(n);
    for (std::size_t i = 0; i < n; ++i) points[i] = i;
    for (std::size_t i = n; i > 1; --i)
        std::swap(points[i - 1], points[rng.below(i)]);

    Partition p;
    p.blocks.resize(num_blocks);
    for (std::size_t b = 0; b < num_blocks; ++b) p.blocks[b].push_back(points[b]);
    for (std::size_t k = num_blocks; k < n; ++k)
        p.blocks[rng.below(num_blocks)].push_back(points[k]);
    for (auto& b : p.blocks) std::sort(b.begin(), b.end());
    return p;
}

HermitianMatrix random_psd(std::size_t d, Rng& rng, double ridge) {
    Mat a(d, d);
    for (cplx& z : a.a) z = rng.complex_gaussian();
    HermitianMatrix g = hermitize(a * a.adjoint());
    if (ridge > 0.0) g += ridge * HermitianMatrix::identity(d);
    const double top = max_abs_eigenvalue(g);
    return (1.0 / top) * g;
}

HermitianMatrix random_density(std::size_t d, Rng& rng) {
    Mat a(d, d);
    for (cplx& z : a.a) z = rng.complex_gaussian();
    HermitianMatrix g = hermitize(a * a.adjoint());
    return (1.0 / g.trace()) * g;
}

HermitianMatrix random_hermitian_in(std::size_t d, Rng& rng, double lo, double hi) {
    if (hi <= lo) throw domain_error("random_hermitian_in: empty interval");
    Mat a(d, d);
    for (cplx& z : a.a) z = rng.complex_gaussian();
    const HermitianMatrix h = hermitize(a);
    if (d == 1) {
        const double t = 0.5 + 0.5 * std::tanh(h(0, 0).real());
        return HermitianMatrix::diagonal({lo + t * (hi - lo)});
    }
    const SpectralDecomposition sd = spectral_decompose(h);
    const double top = sd.eigenvalues.front(), bot = sd.eigenvalues.back();
    const double span = std::max(top - bot, 1e-12);
    // Affine rescale of the spectrum into [lo, hi].
    return apply_spectral_function(
        h, [&](double l) { return lo + (l - bot) / span * (hi - lo); }, bot - 1.0, top + 1.0);
}

}  // namespace qpm
