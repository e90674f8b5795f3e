#include "qpm/qrv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qpm {

QuantumRandomVariable QuantumRandomVariable::constant(const SampleSpace& space,
                                                      const HermitianMatrix& v) {
    QuantumRandomVariable psi;
    psi.space = space;
    psi.dim = v.dim();
    psi.values.assign(space.size(), v);
    return psi;
}

bool QuantumRandomVariable::psd_valued(const Tolerances& tol) const {
    double scale = 0.0;
    for (const auto& v : values) scale = std::max(scale, max_abs_eigenvalue(v));
    for (const auto& v : values)
        if (min_eigenvalue(v) < -tol.rank_rel * (scale > 0.0 ? scale : 1.0)) return false;
    return true;
}

DensityMatrix::DensityMatrix(HermitianMatrix m, const Tolerances& tol) : matrix(std::move(m)) {
    require_psd(matrix, tol, "DensityMatrix");
    if (std::abs(matrix.trace() - 1.0) > tol.residual)
        throw precondition_error("DensityMatrix: trace != 1");
}

bool Law::injective() const {
    for (const auto& g : members)
        if (g.size() != 1) return false;
    return true;
}

LinearSuperMap LinearSuperMap::identity(std::size_t d) {
    return LinearSuperMap{d, Mat::identity(d * d)};
}

Mat LinearSuperMap::apply(const Mat& z) const {
    if (z.rows != dim || z.cols != dim) throw dimension_error("LinearSuperMap::apply: dim mismatch");
    Mat out(dim, dim);
    for (std::size_t r = 0; r < dim * dim; ++r) {
        cplx s = 0.0;
        for (std::size_t c = 0; c < dim * dim; ++c) s += action(r, c) * z.a[c];
        out.a[r] = s;
    }
    return out;
}

HermitianMatrix LinearSuperMap::apply(const HermitianMatrix& z) const {
    return hermitize(apply(z.mat()));
}

LinearSuperMap LinearSuperMap::compose(const LinearSuperMap& inner) const {
    if (dim != inner.dim) throw dimension_error("LinearSuperMap::compose: dim mismatch");
    return LinearSuperMap{dim, action * inner.action};
}

QuantumRandomVariable dnu_dmu(const QuantumMeasure& nu, const Tolerances& tol) {
    QuantumRandomVariable out;
    out.space = nu.space;
    out.dim = nu.dim;
    double scale = 0.0;
    for (const auto& a : nu.atoms) scale = std::max(scale, a.trace());
    for (const auto& a : nu.atoms) {
        const double t = a.trace();
        if (t > tol.rank_rel * (scale > 0.0 ? scale : 1.0))
            out.values.push_back((static_cast<double>(nu.dim) / t) * a);
        else
            out.values.push_back(HermitianMatrix(nu.dim));
    }
    return out;
}

namespace {

void check_shared(const QuantumRandomVariable& psi, const QuantumMeasure& nu) {
    if (!(psi.space == nu.space) || psi.dim != nu.dim)
        throw dimension_error("qrv/measure pair on different spaces or dims");
}

}  // namespace

HermitianMatrix expectation(const QuantumRandomVariable& psi, const QuantumMeasure& nu) {
    check_shared(psi, nu);
    Mat acc(nu.dim, nu.dim);
    for (std::size_t j = 0; j < nu.atoms.size(); ++j) {
        const HermitianMatrix r = psd_sqrt(nu.atoms[j]);
        acc += r.mat() * psi.values[j].mat() * r.mat();
    }
    return hermitize(acc);
}

HermitianMatrix integral_over(const QuantumRandomVariable& psi, const QuantumMeasure& nu,
                              const std::vector<std::size_t>& e) {
    check_shared(psi, nu);
    Mat acc(nu.dim, nu.dim);
    for (std::size_t j : e) {
        if (j >= nu.atoms.size()) throw dimension_error("integral_over: index out of range");
        const HermitianMatrix r = psd_sqrt(nu.atoms[j]);
        acc += r.mat() * psi.values[j].mat() * r.mat();
    }
    return hermitize(acc);
}

Mat expectation_general(const std::vector<Mat>& values, const QuantumMeasure& nu) {
    Mat acc(nu.dim, nu.dim);
    for (std::size_t j = 0; j < nu.atoms.size(); ++j) {
        const HermitianMatrix r = psd_sqrt(nu.atoms[j]);
        acc += r.mat() * values[j] * r.mat();
    }
    return acc;
}

double pairing_oracle(const QuantumRandomVariable& psi, const QuantumMeasure& nu,
                      const DensityMatrix& rho, const Tolerances& tol) {
    check_shared(psi, nu);
    const ClassicalMeasure mu = induced_mu(nu);
    const QuantumRandomVariable deriv = dnu_dmu(nu, tol);
    double s = 0.0;
    for (std::size_t j = 0; j < nu.atoms.size(); ++j) {
        const HermitianMatrix r = psd_sqrt(deriv.values[j], tol);
        const Mat sandwich = r.mat() * psi.values[j].mat() * r.mat();
        s += mu.weights[j] * (rho.matrix.mat() * sandwich).trace().real();
    }
    return s;
}

bool is_measurable(const QuantumRandomVariable& psi, const Partition& f, const Tolerances& tol) {
    f.validate(psi.space.size());
    for (const auto& block : f.blocks) {
        const HermitianMatrix& rep = psi.values[block.front()];
        for (std::size_t i : block)
            if (frobenius_distance(psi.values[i], rep) > tol.residual) return false;
    }
    return true;
}

Law law(const QuantumRandomVariable& psi, const QuantumMeasure& nu, double grouping_tol) {
    check_shared(psi, nu);
    Law l;
    l.grouping_tol = grouping_tol;
    for (std::size_t j = 0; j < psi.values.size(); ++j) {
        bool placed = false;
        for (std::size_t g = 0; g < l.support.size(); ++g) {
            if (frobenius_distance(psi.values[j], l.support[g]) <= grouping_tol) {
                l.masses[g] += nu.atoms[j];
                l.members[g].push_back(j);
                placed = true;
                break;
            }
        }
        if (!placed) {
            l.support.push_back(psi.values[j]);
            l.masses.push_back(nu.atoms[j]);
            l.members.push_back({j});
        }
    }
    return l;
}

HermitianMatrix expectation_via_law(const Law& l, const Tolerances& tol) {
    if (l.support.empty()) throw domain_error("expectation_via_law: empty law");
    Mat acc(l.support.front().dim(), l.support.front().dim());
    for (std::size_t g = 0; g < l.support.size(); ++g) {
        const HermitianMatrix r = psd_sqrt(l.masses[g], tol);
        acc += r.mat() * l.support[g].mat() * r.mat();
    }
    return hermitize(acc);
}

HermitianMatrix channel_apply(const QuantumMeasure& nu, const HermitianMatrix& z) {
    return expectation(QuantumRandomVariable::constant(nu.space, z), nu);
}

LinearSuperMap channel_as_supermap(const QuantumMeasure& nu) {
    const std::size_t d = nu.dim;
    std::vector<HermitianMatrix> roots;
    roots.reserve(nu.atoms.size());
    for (const auto& a : nu.atoms) roots.push_back(psd_sqrt(a));

    LinearSuperMap sm{d, Mat(d * d, d * d)};
    // Column (i,j) is vec(E(e_ij)); E(e_ij) = sum_k r_k e_ij r_k.
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t col = i * d + j;
            for (const auto& r : roots) {
                // r e_ij r has entries r(k,i) * r(j,l).
                for (std::size_t k = 0; k < d; ++k)
                    for (std::size_t l = 0; l < d; ++l)
                        sm.action(k * d + l, col) += r(k, i) * r(j, l);
            }
        }
    return sm;
}

HermitianMatrix choi_matrix(const QuantumMeasure& nu) {
    const std::size_t d = nu.dim;
    std::vector<HermitianMatrix> roots;
    for (const auto& a : nu.atoms) roots.push_back(psd_sqrt(a));
    Mat c(d * d, d * d);
    // C = sum_ij e_ij (x) E(e_ij); block (i,j) holds E(e_ij).
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (const auto& r : roots)
                for (std::size_t k = 0; k < d; ++k)
                    for (std::size_t l = 0; l < d; ++l)
                        c(i * d + k, j * d + l) += r(k, i) * r(j, l);
    return hermitize(c);
}

std::vector<HermitianMatrix> fixed_points(const QuantumMeasure& nu, const Tolerances& tol) {
    const std::size_t d = nu.dim;
    const LinearSuperMap sm = channel_as_supermap(nu);
    Mat diff = sm.action - Mat::identity(d * d);
    // Null space of (S - I) via the spectral decomposition of (S-I)^dag (S-I).
    const HermitianMatrix gram = hermitize(diff.adjoint() * diff);
    const SpectralDecomposition sd = spectral_decompose(gram);
    const double top = std::max(sd.eigenvalues.front(), 1.0);
    const double cut = std::max(tol.rank_rel * top, 1e-18);

    std::vector<Mat> null_vectors;
    for (std::size_t k = 0; k < sd.eigenvalues.size(); ++k) {
        if (sd.eigenvalues[k] > cut) continue;
        Mat z(d, d);
        for (std::size_t r = 0; r < d * d; ++r) z.a[r] = sd.eigenvectors(r, k);
        null_vectors.push_back(std::move(z));
    }

    // The fixed space is closed under adjoints, so it is spanned by its
    // Hermitian elements. Gram-Schmidt over the real HS inner product,
    // seeded with the identity direction (always fixed by unitality).
    std::vector<HermitianMatrix> basis;
    auto try_add = [&](const HermitianMatrix& cand) {
        Mat v = cand.mat();
        for (const auto& b : basis) {
            cplx ip = 0.0;
            for (std::size_t k = 0; k < v.a.size(); ++k)
                ip += std::conj(b.mat().a[k]) * v.a[k];
            v -= ip.real() * b.mat();
        }
        const double norm = v.frobenius();
        if (norm > 1e-7) basis.push_back(hermitize((1.0 / norm) * v));
    };

    try_add((1.0 / std::sqrt(static_cast<double>(d))) * HermitianMatrix::identity(d));
    for (const auto& z : null_vectors) {
        try_add(hermitize(z));
        Mat skew = cplx(0.0, -0.5) * (z - z.adjoint());
        try_add(hermitize(skew));
    }
    // Real dimension of the Hermitian part equals the complex null dimension.
    while (basis.size() > null_vectors.size()) basis.pop_back();
    return basis;
}

LinearSuperMap cesaro_projection(const QuantumMeasure& nu, std::uint64_t max_n,
                                 const Tolerances& tol) {
    const LinearSuperMap e = channel_as_supermap(nu);
    LinearSuperMap avg = LinearSuperMap::identity(nu.dim);  // A_N
    LinearSuperMap power = e;                               // E^N
    // A_N approaches the limit like 1/N, too slow for the residual target in
    // double precision, so the stopping test runs on the Richardson
    // extrapolant 2 A_2N - A_N, whose 1/N error term cancels exactly.
    Mat extrap(0, 0);
    std::uint64_t n = 1;
    while (true) {
        // A_2N = (A_N + E^N o A_N)/2.
        LinearSuperMap next{nu.dim, 0.5 * (avg.action + power.action * avg.action)};
        Mat r = cplx(2.0) * next.action - avg.action;
        const double gap =
            extrap.rows == 0 ? std::numeric_limits<double>::infinity() : (r - extrap).frobenius();
        extrap = std::move(r);
        avg = std::move(next);
        n *= 2;
        if (gap <= tol.residual) return LinearSuperMap{nu.dim, std::move(extrap)};
        if (n > max_n) {
            std::ostringstream os;
            os << "cesaro_projection: no convergence by N=" << n << ", last gap " << gap;
            throw convergence_error(os.str());
        }
        power = LinearSuperMap{nu.dim, power.action * power.action};
    }
}

namespace {

double cf_square(double t) { return t * t; }
double cf_inverse(double t) { return 1.0 / t; }
double cf_neg_log(double t) { return -std::log(t); }
double cf_xlogx(double t) { return t * std::log(t); }

}  // namespace

const std::vector<ConvexFunction>& convex_catalog() {
    static const std::vector<ConvexFunction> cat = {
        {"square", cf_square, -1e300, 1e300},
        {"inverse", cf_inverse, 1e-300, 1e300},
        {"neg_log", cf_neg_log, 1e-300, 1e300},
        {"xlogx", cf_xlogx, 1e-300, 1e300},
    };
    return cat;
}

const ConvexFunction& convex_by_name(const std::string& name) {
    for (const auto& c : convex_catalog())
        if (c.name == name) return c;
    throw domain_error("unknown convex function: " + name);
}

QuantumRandomVariable compose_spectral(const QuantumRandomVariable& psi, const ConvexFunction& vt,
                                       double lo, double hi, const Tolerances& tol) {
    if (lo < vt.lo || hi > vt.hi)
        throw domain_error("compose_spectral: interval outside the domain of " + vt.name);
    QuantumRandomVariable out;
    out.space = psi.space;
    out.dim = psi.dim;
    for (const auto& v : psi.values)
        out.values.push_back(apply_spectral_function(v, vt.f, lo, hi, tol));
    return out;
}

HermitianMatrix jensen_gap(const QuantumRandomVariable& psi, const QuantumMeasure& nu,
                           const ConvexFunction& vt, double lo, double hi,
                           const Tolerances& tol) {
    const QuantumRandomVariable composed = compose_spectral(psi, vt, lo, hi, tol);
    const HermitianMatrix lhs = expectation(composed, nu);
    const HermitianMatrix mean = expectation(psi, nu);
    const HermitianMatrix rhs = apply_spectral_function(mean, vt.f, lo, hi, tol);
    return lhs - rhs;
}

}  // namespace qpm
