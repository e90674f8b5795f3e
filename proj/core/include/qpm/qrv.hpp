#pragma once

#include "qpm/measure.hpp"

namespace qpm {

// Operator-valued function on a finite sample space.
struct QuantumRandomVariable {
    SampleSpace space;
    std::size_t dim{0};
    std::vector<HermitianMatrix> values;

    const HermitianMatrix& value(std::size_t i) const { return values[i]; }

    static QuantumRandomVariable constant(const SampleSpace& space, const HermitianMatrix& v);
    bool psd_valued(const Tolerances& tol = {}) const;
};

struct DensityMatrix {
    HermitianMatrix matrix;

    // Validates PSD and unit trace.
    explicit DensityMatrix(HermitianMatrix m, const Tolerances& tol = {});
};

// Finitely supported law: distinct values with operator masses
// m_i = nu(psi^{-1}(a_i)).
struct Law {
    std::vector<HermitianMatrix> support;
    std::vector<HermitianMatrix> masses;
    std::vector<std::vector<std::size_t>> members;  // sample points per group
    double grouping_tol{0.0};

    bool injective() const;
};

// Linear map on d x d matrices, stored as its d^2 x d^2 matrix in the
// matrix-unit basis (row-major vectorisation).
struct LinearSuperMap {
    std::size_t dim{0};
    Mat action;

    static LinearSuperMap identity(std::size_t d);

    Mat apply(const Mat& z) const;
    HermitianMatrix apply(const HermitianMatrix& z) const;
    LinearSuperMap compose(const LinearSuperMap& inner) const;  // this o inner

    friend double frobenius_distance(const LinearSuperMap& a, const LinearSuperMap& b) {
        return (a.action - b.action).frobenius();
    }
};

// dnu/dmu: value at x is d * atom(x)/tr(atom(x)), zero on trace-zero atoms.
QuantumRandomVariable dnu_dmu(const QuantumMeasure& nu, const Tolerances& tol = {});

// sum_j h_j^{1/2} psi(x_j) h_j^{1/2}.
HermitianMatrix expectation(const QuantumRandomVariable& psi, const QuantumMeasure& nu);

// Same sum restricted to the points in e.
HermitianMatrix integral_over(const QuantumRandomVariable& psi, const QuantumMeasure& nu,
                              const std::vector<std::size_t>& e);

// Scalar-side evaluation of tr(rho E_nu[psi]) through the induced measure
// and dnu/dmu; independent oracle for `expectation`.
double pairing_oracle(const QuantumRandomVariable& psi, const QuantumMeasure& nu,
                      const DensityMatrix& rho, const Tolerances& tol = {});

// Block-constancy within tol.residual (Frobenius).
bool is_measurable(const QuantumRandomVariable& psi, const Partition& f,
                   const Tolerances& tol = {});

Law law(const QuantumRandomVariable& psi, const QuantumMeasure& nu, double grouping_tol = 1e-9);

// sum_i m_i^{1/2} a_i m_i^{1/2}.
HermitianMatrix expectation_via_law(const Law& l, const Tolerances& tol = {});

// E_nu(z): quantum expectation of the constant function z.
HermitianMatrix channel_apply(const QuantumMeasure& nu, const HermitianMatrix& z);

LinearSuperMap channel_as_supermap(const QuantumMeasure& nu);

// Choi matrix of E_nu; positivity certifies complete positivity.
HermitianMatrix choi_matrix(const QuantumMeasure& nu);

// Hilbert-Schmidt-orthonormal Hermitian basis of the fixed-point algebra
// {z : E_nu(z) = z}; basis[0] is the identity direction.
std::vector<HermitianMatrix> fixed_points(const QuantumMeasure& nu, const Tolerances& tol = {});

// Cesaro averages A_N of channel iterates, N doubling until
// ||A_N - A_2N||_F <= tol.residual or N > max_n.
LinearSuperMap cesaro_projection(const QuantumMeasure& nu, std::uint64_t max_n = 1ULL << 40,
                                 const Tolerances& tol = {});

// Named operator convex functions with their domains.
struct ConvexFunction {
    std::string name;
    double (*f)(double);
    double lo;
    double hi;
};

// t^2, t^{-1}, -log t, t log t on their operator-convexity domains.
const std::vector<ConvexFunction>& convex_catalog();
const ConvexFunction& convex_by_name(const std::string& name);

QuantumRandomVariable compose_spectral(const QuantumRandomVariable& psi, const ConvexFunction& vt,
                                       double lo, double hi, const Tolerances& tol = {});

// E_nu[vt o psi] - vt(E_nu[psi]); PSD in exact arithmetic.
HermitianMatrix jensen_gap(const QuantumRandomVariable& psi, const QuantumMeasure& nu,
                           const ConvexFunction& vt, double lo, double hi,
                           const Tolerances& tol = {});

// Internal: quantum expectation of arbitrary (not necessarily Hermitian)
// matrix values; used by generalized-linearity checks.
Mat expectation_general(const std::vector<Mat>& values, const QuantumMeasure& nu);

}  // namespace qpm
