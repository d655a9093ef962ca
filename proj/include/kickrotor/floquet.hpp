#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kickrotor/params.hpp"
#include "kickrotor/state.hpp"

namespace kr {

enum class FloquetKind {
    KrSingleKick,  // F_KR
    KrPower,       // F_KR^M
    Mkr,           // D F_KR^M
};

std::string_view to_string(FloquetKind kind);

/// Dense one-period (or M-period) propagator in the |m> basis. Row and column
/// index i correspond to m = m_first + i. Elements are column-major.
struct FloquetMatrix {
    RotorParams params;
    FloquetKind kind = FloquetKind::KrSingleKick;
    std::int64_t power = 1;
    int ambient_dim = 0;
    int m_first = 0;
    Eigen::MatrixXcd elements;

    int dim() const { return static_cast<int>(elements.rows()); }
    int m_at(int index) const { return m_first + index; }
    std::string describe() const;
};

/// <m1|F_KR|m2> = exp(i tau m1^2/2) i^(m1-m2) J_(m1-m2)(k) on m in [-n/2, n/2).
FloquetMatrix build_kr_matrix(const RotorParams& params, int ambient_dim);

/// How columns of F_KR^M are generated.
enum class ColumnMethod {
    /// Direct Bessel convolution in the |m> basis with a hard wall at the
    /// ambient edge. Resolves elements far below double-precision epsilon.
    Banded,
    /// Angle-grid transforms on a periodic grid of the ambient size. Faster for
    /// large M but carries a ~1e-16 absolute noise floor.
    Spectral,
};

struct ColumnOptions {
    ColumnMethod method = ColumnMethod::Banded;
    /// Bessel kernel terms with |J_nu(k)| below this are dropped.
    double kernel_tolerance = 1e-40;
    /// Amplitudes below this at the support edges stop being propagated.
    double prune_tolerance = 1e-40;
};

/// Propagates basis columns of a fixed ambient basis through repeated KR periods.
class ColumnPropagator {
public:
    ColumnPropagator(const RotorParams& params, int ambient_dim, const ColumnOptions& options = {});

    int ambient_dim() const { return n_; }
    int m_first() const { return -n_ / 2; }
    int kernel_half_width() const { return static_cast<int>(kernel_.size()) - 1; }

    /// Column of F_KR^periods for the basis vector |m_first + column>.
    std::vector<cplx> column(int column, std::int64_t periods) const;

private:
    RotorParams params_;
    int n_;
    ColumnOptions options_;
    std::vector<double> kernel_;  // J_nu(k), nu = 0..B; the i^nu factor is applied in the loop
    std::vector<cplx> free_;
};

/// D * F_KR^M, built one column at a time by M propagations of each basis vector.
FloquetMatrix build_mkr_matrix(const FloquetMatrix& kr, std::int64_t M, const ColumnOptions& options = {});
FloquetMatrix build_mkr_matrix(const RotorParams& params, int ambient_dim, std::int64_t M,
                               const ColumnOptions& options = {});
/// F_KR^M without the D factor.
FloquetMatrix build_kr_power(const RotorParams& params, int ambient_dim, std::int64_t M,
                             const ColumnOptions& options = {});

/// Central d x d block, m in [-d/2, d - d/2). Throws if d exceeds the matrix size.
FloquetMatrix truncate(const FloquetMatrix& matrix, int d);

struct EigenstateSet {
    Eigen::MatrixXcd vectors;  // one normalized eigenvector per column
    Eigen::VectorXcd values;
    int m_first = 0;

    int count() const { return static_cast<int>(vectors.cols()); }
};

/// Full eigendecomposition of a general complex matrix. Throws NumericalError on failure.
EigenstateSet diagonalize(const FloquetMatrix& matrix);

inline constexpr double kEntropyAlpha = 0.96;

/// exp of the Shannon entropy of |v_m|^2, with 0 ln 0 = 0.
double shannon_width(std::span<const cplx> v);
double shannon_width(const Eigen::Ref<const Eigen::VectorXcd>& v);
/// (2 / (alpha d)) sum_j exp(H_j) over all d eigenvectors.
double shannon_entropy_avg(const EigenstateSet& eigs, double alpha = kEntropyAlpha);

enum class BandAggregate { Mean, Max };

/// w(row) = max |m1 - m2| over elements of that row with magnitude > cutoff
/// (0 when the whole row is below the cutoff).
std::vector<int> band_profile(const FloquetMatrix& matrix, double cutoff);
/// Aggregate of w over the central half of the rows.
double band_width(const FloquetMatrix& matrix, double cutoff, BandAggregate aggregate = BandAggregate::Mean);

struct SpectrumOptions {
    int ambient_dim = 4096;
    int d = 1024;
    double alpha = kEntropyAlpha;
    std::vector<double> cutoffs{1e-20};
    BandAggregate aggregate = BandAggregate::Mean;
    ColumnOptions columns;
};

struct SpectrumPoint {
    std::int64_t M = 0;
    double entropy = 0.0;
    std::vector<double> band_widths;  // one per cutoff
};

/// S_MKR and b_MKR for one M without materializing the ambient matrix: only
/// the d central columns are propagated. The band of row m is read off column
/// m, which is exact because |<m1|F^M|m2>| = |<m2|F^M|m1>| (F_KR = P K with
/// P a diagonal phase and K symmetric). Band rows are those in the central
/// half of the truncation window.
SpectrumPoint mkr_spectrum_point(const RotorParams& params, std::int64_t M, const SpectrumOptions& options = {});

}  // namespace kr
