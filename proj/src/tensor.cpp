#include "spinchain/tensor.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "spinchain/kernels.hpp"

namespace spinchain {

namespace {

std::size_t volume(const Shape& shape) {
    std::size_t v = 1;
    for (std::size_t e : shape) v *= e;
    return v;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << ")";
    return os.str();
}

using RowMat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

DenseTensor::DenseTensor(Shape shape)
    : shape_(std::move(shape)), data_(volume(shape_)) {}

DenseTensor::DenseTensor(Shape shape, std::vector<cxd> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
    if (data_.size() != volume(shape_))
        throw dimension_error("tensor data size " + std::to_string(data_.size()) +
                              " does not fill shape " + shape_str(shape_));
}

std::size_t DenseTensor::extent(std::size_t axis) const {
    if (axis >= shape_.size())
        throw dimension_error("axis " + std::to_string(axis) + " out of range for rank " +
                              std::to_string(shape_.size()));
    return shape_[axis];
}

std::size_t DenseTensor::flat_index(const std::size_t* idx, std::size_t n) const {
    if (n != shape_.size())
        throw dimension_error("indexing rank-" + std::to_string(shape_.size()) +
                              " tensor with " + std::to_string(n) + " indices");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (idx[i] >= shape_[i])
            throw dimension_error("index " + std::to_string(idx[i]) + " out of range on axis " +
                                  std::to_string(i) + " of shape " + shape_str(shape_));
        flat = flat * shape_[i] + idx[i];
    }
    return flat;
}

void DenseTensor::require_volume(const Shape& new_shape) const {
    if (volume(new_shape) != data_.size())
        throw dimension_error("cannot reshape " + shape_str(shape_) + " into " +
                              shape_str(new_shape));
}

DenseTensor DenseTensor::permuted(const std::vector<std::size_t>& perm) const {
    const std::size_t r = rank();
    if (perm.size() != r)
        throw dimension_error("permutation length " + std::to_string(perm.size()) +
                              " does not match rank " + std::to_string(r));
    std::vector<bool> seen(r, false);
    for (std::size_t p : perm) {
        if (p >= r || seen[p]) throw dimension_error("invalid axis permutation");
        seen[p] = true;
    }
    Shape new_shape(r);
    for (std::size_t i = 0; i < r; ++i) new_shape[i] = shape_[perm[i]];
    DenseTensor out(new_shape);
    if (r == 0) {
        out.data_[0] = data_[0];
        return out;
    }
    // Destination stride carried by each *source* axis.
    std::vector<std::size_t> inv(r), dstride(r), contrib(r);
    for (std::size_t i = 0; i < r; ++i) inv[perm[i]] = i;
    dstride[r - 1] = 1;
    for (std::size_t i = r - 1; i-- > 0;) dstride[i] = dstride[i + 1] * new_shape[i + 1];
    for (std::size_t j = 0; j < r; ++j) contrib[j] = dstride[inv[j]];

    std::vector<std::size_t> counter(r, 0);
    std::size_t dflat = 0;
    const std::size_t total = size();
    for (std::size_t sflat = 0; sflat < total; ++sflat) {
        out.data_[dflat] = data_[sflat];
        for (std::size_t ax = r; ax-- > 0;) {
            if (++counter[ax] < shape_[ax]) {
                dflat += contrib[ax];
                break;
            }
            counter[ax] = 0;
            dflat -= contrib[ax] * (shape_[ax] - 1);
        }
    }
    return out;
}

DenseTensor DenseTensor::reshaped(Shape new_shape) const& {
    require_volume(new_shape);
    DenseTensor out = *this;
    out.shape_ = std::move(new_shape);
    return out;
}

DenseTensor DenseTensor::reshaped(Shape new_shape) && {
    require_volume(new_shape);
    shape_ = std::move(new_shape);
    return std::move(*this);
}

DenseTensor DenseTensor::conjugated() const {
    DenseTensor out = *this;
    for (cxd& v : out.data_) v = std::conj(v);
    return out;
}

double DenseTensor::norm() const {
    return std::sqrt(kernels::sum_abs2(data_.data(), data_.size()));
}

void DenseTensor::scale(cxd factor) {
    for (cxd& v : data_) v *= factor;
}

bool DenseTensor::all_finite() const {
    for (const cxd& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b, const AxisPairs& pairs) {
    const std::size_t ra = a.rank(), rb = b.rank();
    std::vector<bool> acon(ra, false), bcon(rb, false);
    std::size_t k = 1;
    for (const auto& [ia, ib] : pairs) {
        if (ia >= ra || ib >= rb)
            throw dimension_error("contraction axis out of range");
        if (acon[ia] || bcon[ib])
            throw dimension_error("contraction axis repeated");
        if (a.shape()[ia] != b.shape()[ib])
            throw dimension_error("contracted extents differ: " + std::to_string(a.shape()[ia]) +
                                  " vs " + std::to_string(b.shape()[ib]));
        acon[ia] = bcon[ib] = true;
        k *= a.shape()[ia];
    }

    // a → (free..., contracted...) and b → (contracted..., free...), with the
    // contracted axes in pair order on both sides so the summed index matches.
    std::vector<std::size_t> aperm, bperm;
    Shape out_shape;
    std::size_t m = 1, n = 1;
    for (std::size_t i = 0; i < ra; ++i)
        if (!acon[i]) {
            aperm.push_back(i);
            out_shape.push_back(a.shape()[i]);
            m *= a.shape()[i];
        }
    for (const auto& [ia, ib] : pairs) {
        aperm.push_back(ia);
        (void)ib;
    }
    for (const auto& [ia, ib] : pairs) {
        bperm.push_back(ib);
        (void)ia;
    }
    for (std::size_t i = 0; i < rb; ++i)
        if (!bcon[i]) {
            bperm.push_back(i);
            out_shape.push_back(b.shape()[i]);
            n *= b.shape()[i];
        }

    const DenseTensor ap = a.permuted(aperm);
    const DenseTensor bp = b.permuted(bperm);
    DenseTensor out(out_shape);
    kernels::cgemm(ap.data(), bp.data(), out.data(), m, k, n, false);
    return out;
}

SvdResult svd_truncated(const DenseTensor& m, std::size_t chi_max, double cutoff) {
    if (m.rank() != 2) throw dimension_error("svd_truncated expects a matrix");
    if (chi_max == 0) throw dimension_error("chi_max must be positive");
    if (cutoff < 0.0) throw dimension_error("cutoff must be nonnegative");
    const std::size_t rows = m.shape()[0], cols = m.shape()[1];
    Eigen::Map<const RowMat> mapped(m.data(), static_cast<Eigen::Index>(rows),
                                    static_cast<Eigen::Index>(cols));

    auto count_kept = [chi_max, cutoff](const Eigen::VectorXd& s) {
        const std::size_t full = static_cast<std::size_t>(s.size());
        const double s0 = full ? s[0] : 0.0;
        const double floor = std::max(cutoff, 1e-14) * s0;
        std::size_t kept = 0;
        while (kept < full && kept < chi_max && s[kept] >= floor && s[kept] > 0.0) ++kept;
        if (kept == 0 && full > 0) kept = 1;  // never return an empty factorization
        return kept;
    };

    Eigen::MatrixXcd u_full, v_full;  // V stored column-major, Vh = V.adjoint()
    Eigen::VectorXd sv;
    bool factored = false;

    // Extremely rectangular inputs: the Gram matrix on the short side yields
    // the singular values and the short-side factor from one GEMM plus a small
    // eigendecomposition, and the long-side factor from a second GEMM. This
    // avoids a Householder QR along the long side, which dominates when
    // compressing operator-times-state tensors whose flattened column count
    // runs to tens of thousands. Squaring halves the attainable relative
    // accuracy of the small singular values, so the path is reserved for
    // aspect ratios where the direct route is painful; the short-side factor
    // is orthonormal by construction either way.
    const std::size_t short_side = std::min(rows, cols);
    const std::size_t long_side = std::max(rows, cols);
    if (long_side >= 8 * short_side && long_side >= 4096) {
        if (rows <= cols) {
            Eigen::MatrixXcd g(rows, rows);
            g.noalias() = mapped * mapped.adjoint();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g);
            if (eig.info() == Eigen::Success &&
                eig.eigenvalues()(static_cast<Eigen::Index>(rows) - 1) > 0.0) {
                sv.resize(static_cast<Eigen::Index>(rows));
                u_full.resize(static_cast<Eigen::Index>(rows),
                              static_cast<Eigen::Index>(rows));
                for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(rows); ++i) {
                    const Eigen::Index j = static_cast<Eigen::Index>(rows) - 1 - i;
                    sv(i) = std::sqrt(std::max(eig.eigenvalues()(j), 0.0));
                    u_full.col(i) = eig.eigenvectors().col(j);
                }
                const std::size_t kept = count_kept(sv);
                v_full.noalias() = mapped.adjoint() * u_full.leftCols(
                    static_cast<Eigen::Index>(kept));
                for (std::size_t i = 0; i < kept; ++i)
                    v_full.col(static_cast<Eigen::Index>(i)) /= sv(static_cast<Eigen::Index>(i));
                factored = true;
            }
        } else {
            Eigen::MatrixXcd g(cols, cols);
            g.noalias() = mapped.adjoint() * mapped;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g);
            if (eig.info() == Eigen::Success &&
                eig.eigenvalues()(static_cast<Eigen::Index>(cols) - 1) > 0.0) {
                sv.resize(static_cast<Eigen::Index>(cols));
                v_full.resize(static_cast<Eigen::Index>(cols),
                              static_cast<Eigen::Index>(cols));
                for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(cols); ++i) {
                    const Eigen::Index j = static_cast<Eigen::Index>(cols) - 1 - i;
                    sv(i) = std::sqrt(std::max(eig.eigenvalues()(j), 0.0));
                    v_full.col(i) = eig.eigenvectors().col(j);
                }
                const std::size_t kept = count_kept(sv);
                u_full.noalias() = mapped * v_full.leftCols(
                    static_cast<Eigen::Index>(kept));
                for (std::size_t i = 0; i < kept; ++i)
                    u_full.col(static_cast<Eigen::Index>(i)) /= sv(static_cast<Eigen::Index>(i));
                factored = true;
            }
        }
    }

    // Otherwise: strongly rectangular inputs are first reduced by a thin QR on
    // the long side, so the dense SVD runs on a min(rows,cols) square factor.
    if (factored) {
        // handled above
    } else if (rows >= 2 * cols) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(mapped);
        const Eigen::MatrixXcd r =
            qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success)
            throw numeric_error("singular value decomposition did not converge");
        Eigen::MatrixXcd thin_q = Eigen::MatrixXcd::Identity(
            static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        thin_q = qr.householderQ() * thin_q;
        u_full = thin_q * svd.matrixU();
        v_full = svd.matrixV();
        sv = svd.singularValues();
    } else if (cols >= 2 * rows) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(mapped.adjoint());
        const Eigen::MatrixXcd r =
            qr.matrixQR().topRows(rows).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(r.adjoint(),
                                            Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success)
            throw numeric_error("singular value decomposition did not converge");
        Eigen::MatrixXcd thin_q = Eigen::MatrixXcd::Identity(
            static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(rows));
        thin_q = qr.householderQ() * thin_q;
        u_full = svd.matrixU();
        v_full = thin_q * svd.matrixV();
        sv = svd.singularValues();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(mapped,
                                            Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success)
            throw numeric_error("singular value decomposition did not converge");
        u_full = svd.matrixU();
        v_full = svd.matrixV();
        sv = svd.singularValues();
    }

    const std::size_t full = static_cast<std::size_t>(sv.size());
    double total_sq = 0.0;
    for (std::size_t i = 0; i < full; ++i) total_sq += sv[i] * sv[i];
    const std::size_t kept = count_kept(sv);

    double kept_sq = 0.0;
    for (std::size_t i = 0; i < kept; ++i) kept_sq += sv[i] * sv[i];
    const double discarded = total_sq > 0.0 ? std::max(0.0, 1.0 - kept_sq / total_sq) : 0.0;

    SvdResult out;
    out.s.assign(sv.data(), sv.data() + kept);
    out.discarded_weight = discarded;
    out.u = DenseTensor({rows, kept});
    out.vh = DenseTensor({kept, cols});
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < kept; ++j)
            out.u.data()[i * kept + j] =
                u_full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    for (std::size_t i = 0; i < kept; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            out.vh.data()[i * cols + j] =
                std::conj(v_full(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
    return out;
}

EighResult eigh(const DenseTensor& h) {
    if (h.rank() != 2 || h.shape()[0] != h.shape()[1])
        throw dimension_error("eigh expects a square matrix");
    const std::size_t n = h.shape()[0];
    double herm_err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            herm_err = std::max(herm_err,
                                std::abs(h.data()[i * n + j] - std::conj(h.data()[j * n + i])));
    if (herm_err >= 1e-10)
        throw contract_violation("eigh input is not Hermitian (max deviation " +
                                 std::to_string(herm_err) + ")");

    Eigen::MatrixXcd M(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h.data()[i * n + j];
    M = ((M + M.adjoint()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(M);
    if (solver.info() != Eigen::Success)
        throw numeric_error("hermitian eigensolver did not converge");

    EighResult out;
    out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    out.vectors = DenseTensor({n, n});
    const auto& V = solver.eigenvectors();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.vectors.data()[i * n + j] =
                V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape())
        throw dimension_error("max_abs_diff shape mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
    return d;
}

}  // namespace spinchain
