#include "kickrotor/floquet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "kickrotor/bessel.hpp"
#include "kickrotor/errors.hpp"
#include "kickrotor/propagator.hpp"

namespace kr {

namespace {

// i^nu for integer nu.
cplx i_power(int nu) {
    switch (((nu % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

bool is_odd(int m) { return (m % 2) != 0; }

}  // namespace

std::string_view to_string(FloquetKind kind) {
    switch (kind) {
        case FloquetKind::KrSingleKick: return "kr";
        case FloquetKind::KrPower: return "kr_power";
        case FloquetKind::Mkr: return "mkr";
    }
    return "unknown";
}

std::string FloquetMatrix::describe() const {
    std::ostringstream out;
    out << to_string(kind) << " matrix, dim=" << dim() << ", ambient=" << ambient_dim << ", M=" << power
        << ", k=" << format_double(params.k) << ", tau=" << format_double(params.tau);
    return out.str();
}

FloquetMatrix build_kr_matrix(const RotorParams& raw, int ambient_dim) {
    const RotorParams params = validate(raw);
    if (ambient_dim < 2) throw std::invalid_argument("ambient_dim must be at least 2");
    const int n = ambient_dim;
    const auto bessel = bessel_j_table(params.k, n);

    FloquetMatrix f{params, FloquetKind::KrSingleKick, 1, n, -n / 2, Eigen::MatrixXcd(n, n)};
    const auto phases = free_phases(MGrid{(n + 1) / 2}, params.tau);
    const int phase_offset = (n + 1) / 2;
    for (int c = 0; c < n; ++c) {
        const int m2 = f.m_at(c);
        for (int r = 0; r < n; ++r) {
            const int m1 = f.m_at(r);
            const int nu = m1 - m2;
            const double j = bessel[static_cast<std::size_t>(std::abs(nu))] * ((nu < 0 && is_odd(nu)) ? -1.0 : 1.0);
            f.elements(r, c) = phases[static_cast<std::size_t>(m1 + phase_offset)] * i_power(nu) * j;
        }
    }
    return f;
}

ColumnPropagator::ColumnPropagator(const RotorParams& raw, int ambient_dim, const ColumnOptions& options)
    : params_(validate(raw)), n_(ambient_dim), options_(options) {
    if (ambient_dim < 2) throw std::invalid_argument("ambient_dim must be at least 2");
    const auto bessel = bessel_j_table(params_.k, n_);
    int half_width = 0;
    for (int nu = 0; nu <= n_; ++nu)
        if (std::abs(bessel[static_cast<std::size_t>(nu)]) >= options_.kernel_tolerance) half_width = nu;
    kernel_.assign(bessel.begin(), bessel.begin() + half_width + 1);

    free_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        const double m = m_first() + i;
        free_[static_cast<std::size_t>(i)] = std::polar(1.0, std::fmod(0.5 * params_.tau * (m * m), 2.0 * std::numbers::pi));
    }
}

std::vector<cplx> ColumnPropagator::column(int column, std::int64_t periods) const {
    if (column < 0 || column >= n_) throw std::out_of_range("column outside the ambient basis");
    if (periods < 0) throw std::invalid_argument("periods must be non-negative");

    if (options_.method == ColumnMethod::Spectral) {
        if (n_ % 2 != 0) throw std::invalid_argument("spectral column method needs an even ambient_dim");
        SpectralPropagator prop(n_ / 2);
        std::vector<cplx> v(static_cast<std::size_t>(n_));
        v[static_cast<std::size_t>(column)] = 1.0;
        for (std::int64_t p = 0; p < periods; ++p) prop.step(v, params_.k, params_.tau, 1);
        return v;
    }

    // Kernel K_nu = i^nu J_nu(k) is even in nu, so
    //   w[r] = J_0 v[r] + sum_{nu>=1} i^nu J_nu (v[r-nu] + v[r+nu]).
    // Terms are grouped by nu mod 4 into real-coefficient accumulators so the
    // inner loop is a plain axpy over interleaved doubles.
    const int B = kernel_half_width();
    const std::size_t padded = static_cast<std::size_t>(n_ + 2 * B);
    std::vector<double> v(2 * padded, 0.0);
    std::array<std::vector<double>, 4> acc;
    for (auto& a : acc) a.assign(2 * padded, 0.0);

    auto at = [&](int r) { return 2 * static_cast<std::size_t>(r + B); };
    v[at(column)] = 1.0;
    int lo = column, hi = column;

    for (std::int64_t p = 0; p < periods && lo <= hi; ++p) {
        const int new_lo = std::max(0, lo - B);
        const int new_hi = std::min(n_ - 1, hi + B);
        const std::size_t t0 = at(new_lo), t1 = at(new_hi) + 2;
        for (auto& a : acc) std::fill(a.begin() + t0, a.begin() + t1, 0.0);

        {
            const double j0 = kernel_[0];
            double* a = acc[0].data();
            const double* x = v.data();
            for (std::size_t t = t0; t < t1; ++t) a[t] = j0 * x[t];
        }
        for (int nu = 1; nu <= B; ++nu) {
            const double j = kernel_[static_cast<std::size_t>(nu)];
            double* a = acc[static_cast<std::size_t>(nu % 4)].data();
            const double* below = v.data() - 2 * nu;
            const double* above = v.data() + 2 * nu;
            for (std::size_t t = t0; t < t1; ++t) a[t] += j * (below[t] + above[t]);
        }

        std::fill(v.begin() + at(lo), v.begin() + at(hi) + 2, 0.0);
        for (int r = new_lo; r <= new_hi; ++r) {
            const std::size_t t = at(r);
            // S0 + i S1 - S2 - i S3
            const double re = acc[0][t] - acc[1][t + 1] - acc[2][t] + acc[3][t + 1];
            const double im = acc[0][t + 1] + acc[1][t] - acc[2][t + 1] - acc[3][t];
            const cplx w = cplx(re, im) * free_[static_cast<std::size_t>(r)];
            v[t] = w.real();
            v[t + 1] = w.imag();
        }
        lo = new_lo;
        hi = new_hi;
        const double prune2 = options_.prune_tolerance * options_.prune_tolerance;
        auto mag2 = [&](int r) { return v[at(r)] * v[at(r)] + v[at(r) + 1] * v[at(r) + 1]; };
        while (lo <= hi && mag2(lo) < prune2) { v[at(lo)] = v[at(lo) + 1] = 0.0; ++lo; }
        while (hi >= lo && mag2(hi) < prune2) { v[at(hi)] = v[at(hi) + 1] = 0.0; --hi; }
    }

    std::vector<cplx> out(static_cast<std::size_t>(n_));
    for (int r = 0; r < n_; ++r) out[static_cast<std::size_t>(r)] = {v[at(r)], v[at(r) + 1]};
    return out;
}

namespace {

FloquetMatrix build_power(const RotorParams& params, int ambient_dim, std::int64_t M, bool with_d,
                          const ColumnOptions& options) {
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    ColumnPropagator prop(params, ambient_dim, options);
    const int n = ambient_dim;
    FloquetMatrix f{validate(params), with_d ? FloquetKind::Mkr : FloquetKind::KrPower, M, n, -n / 2,
                    Eigen::MatrixXcd(n, n)};
    for (int c = 0; c < n; ++c) {
        const auto col = prop.column(c, M);
        for (int r = 0; r < n; ++r) {
            const cplx z = col[static_cast<std::size_t>(r)];
            f.elements(r, c) = (with_d && is_odd(f.m_at(r))) ? -z : z;
        }
    }
    return f;
}

}  // namespace

FloquetMatrix build_mkr_matrix(const FloquetMatrix& kr, std::int64_t M, const ColumnOptions& options) {
    if (kr.kind != FloquetKind::KrSingleKick || kr.dim() != kr.ambient_dim)
        throw std::invalid_argument("build_mkr_matrix needs an untruncated single-kick KR matrix");
    return build_power(kr.params, kr.ambient_dim, M, true, options);
}

FloquetMatrix build_mkr_matrix(const RotorParams& params, int ambient_dim, std::int64_t M,
                               const ColumnOptions& options) {
    return build_power(params, ambient_dim, M, true, options);
}

FloquetMatrix build_kr_power(const RotorParams& params, int ambient_dim, std::int64_t M,
                             const ColumnOptions& options) {
    return build_power(params, ambient_dim, M, false, options);
}

FloquetMatrix truncate(const FloquetMatrix& matrix, int d) {
    if (d < 1) throw std::invalid_argument("truncation dimension must be positive");
    if (d > matrix.dim())
        throw std::invalid_argument("truncation dimension " + std::to_string(d) + " exceeds matrix dimension " +
                                    std::to_string(matrix.dim()));
    const int m_first = -d / 2;
    const int offset = m_first - matrix.m_first;
    if (offset < 0 || offset + d > matrix.dim())
        throw std::invalid_argument("matrix does not cover the central block");
    FloquetMatrix out = matrix;
    out.m_first = m_first;
    out.elements = matrix.elements.block(offset, offset, d, d);
    return out;
}

EigenstateSet diagonalize(const FloquetMatrix& matrix) {
    const int n = matrix.dim();
    if (n != static_cast<int>(matrix.elements.cols())) throw std::invalid_argument("matrix must be square");
    Eigen::MatrixXcd a = matrix.elements;
    EigenstateSet out{Eigen::MatrixXcd(n, n), Eigen::VectorXcd(n), matrix.m_first};
    cplx dummy{};
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, out.values.data(), &dummy, 1,
                                          out.vectors.data(), n);
    if (info != 0)
        throw NumericalError("eigensolver failed (info=" + std::to_string(info) + ") on " + matrix.describe());
    for (int j = 0; j < n; ++j) {
        const double norm = out.vectors.col(j).norm();
        if (!(norm > 0.0)) throw NumericalError("zero eigenvector from eigensolver on " + matrix.describe());
        out.vectors.col(j) /= norm;
    }
    return out;
}

double shannon_width(std::span<const cplx> v) {
    double h = 0.0;
    for (const auto& z : v) {
        const double p = std::norm(z);
        if (p > 0.0) h -= p * std::log(p);
    }
    return std::exp(h);
}

double shannon_width(const Eigen::Ref<const Eigen::VectorXcd>& v) {
    return shannon_width(std::span<const cplx>(v.data(), static_cast<std::size_t>(v.size())));
}

double shannon_entropy_avg(const EigenstateSet& eigs, double alpha) {
    const int d = eigs.count();
    if (d < 1) throw std::invalid_argument("need at least one eigenvector");
    double sum = 0.0;
    for (int j = 0; j < d; ++j) sum += shannon_width(eigs.vectors.col(j));
    return 2.0 / (alpha * d) * sum;
}

std::vector<int> band_profile(const FloquetMatrix& matrix, double cutoff) {
    if (!(cutoff > 0.0)) throw std::invalid_argument("cutoff must be positive");
    const int rows = matrix.dim();
    const int cols = static_cast<int>(matrix.elements.cols());
    std::vector<int> w(static_cast<std::size_t>(rows), 0);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            if (std::abs(matrix.elements(r, c)) > cutoff)
                w[static_cast<std::size_t>(r)] = std::max(w[static_cast<std::size_t>(r)], std::abs(r - c));
    return w;
}

double band_width(const FloquetMatrix& matrix, double cutoff, BandAggregate aggregate) {
    const auto w = band_profile(matrix, cutoff);
    const std::size_t n = w.size();
    const std::size_t first = n / 4;
    const std::size_t last = std::max(first + 1, first + n / 2);
    double sum = 0.0;
    int best = 0;
    for (std::size_t i = first; i < last && i < n; ++i) {
        sum += w[i];
        best = std::max(best, w[i]);
    }
    return aggregate == BandAggregate::Max ? best : sum / static_cast<double>(std::min(last, n) - first);
}

SpectrumPoint mkr_spectrum_point(const RotorParams& params, std::int64_t M, const SpectrumOptions& options) {
    const int n = options.ambient_dim;
    const int d = options.d;
    if (d < 1 || d > n) throw std::invalid_argument("need 1 <= d <= ambient_dim");
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    for (double c : options.cutoffs)
        if (!(c > 0.0)) throw std::invalid_argument("cutoff must be positive");

    ColumnPropagator prop(params, n, options.columns);
    const int window_first = -d / 2;               // m of truncated index 0
    const int window_offset = window_first + n / 2;  // ambient index of truncated index 0
    const int band_first = d / 4;
    const int band_last = std::max(band_first + 1, band_first + d / 2);

    FloquetMatrix block{validate(params), FloquetKind::Mkr, M, n, window_first, Eigen::MatrixXcd(d, d)};
    std::vector<std::vector<int>> widths(options.cutoffs.size());

    for (int j = 0; j < d; ++j) {
        const int c = window_offset + j;
        auto col = prop.column(c, M);
        for (int r = 0; r < n; ++r)
            if (is_odd(r - n / 2)) col[static_cast<std::size_t>(r)] = -col[static_cast<std::size_t>(r)];
        for (int i = 0; i < d; ++i) block.elements(i, j) = col[static_cast<std::size_t>(window_offset + i)];
        if (j >= band_first && j < band_last) {
            for (std::size_t q = 0; q < options.cutoffs.size(); ++q) {
                int w = 0;
                for (int r = 0; r < n; ++r)
                    if (std::abs(col[static_cast<std::size_t>(r)]) > options.cutoffs[q]) w = std::max(w, std::abs(r - c));
                widths[q].push_back(w);
            }
        }
    }

    SpectrumPoint out;
    out.M = M;
    out.entropy = shannon_entropy_avg(diagonalize(block), options.alpha);
    for (const auto& w : widths) {
        if (options.aggregate == BandAggregate::Max) {
            out.band_widths.push_back(*std::max_element(w.begin(), w.end()));
        } else {
            double s = 0.0;
            for (int x : w) s += x;
            out.band_widths.push_back(s / static_cast<double>(w.size()));
        }
    }
    return out;
}

}  // namespace kr
