#include "rgm/block_circulant.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace rgm {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kHermTol = 1e-10;

void check_block_dims(const std::vector<Matrix>& blocks, int m, const char* what) {
    for (const auto& b : blocks) {
        if (b.rows() != m || b.cols() != m) {
            throw std::invalid_argument(std::string(what) + ": block is not m x m");
        }
    }
}

/// Symmetrize within tolerance (relative to scale), reject beyond it.
Matrix symmetrized(const Matrix& A, const char* what) {
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    const double dev = (A - A.transpose()).cwiseAbs().maxCoeff();
    if (dev > kSymTol * scale) {
        throw std::invalid_argument(std::string(what) + ": block not symmetric");
    }
    return 0.5 * (A + A.transpose());
}

/// Real DFT twiddles for one period length, shared across calls.
struct DftPlan {
    Matrix fwd_re, fwd_im;  // (l, k) = cos/-sin(2 pi l k / N)
    Matrix inv_re, inv_im;  // (k, l) = cos/sin(2 pi k l / N) / N

    explicit DftPlan(int N)
        : fwd_re(N, N), fwd_im(N, N), inv_re(N, N), inv_im(N, N) {
        for (int l = 0; l < N; ++l) {
            for (int k = 0; k < N; ++k) {
                const double ang = 2.0 * M_PI * static_cast<double>((static_cast<long long>(l) * k) % N) / N;
                fwd_re(l, k) = std::cos(ang);
                fwd_im(l, k) = -std::sin(ang);
                inv_re(k, l) = std::cos(ang) / N;
                inv_im(k, l) = std::sin(ang) / N;
            }
        }
    }
};

const DftPlan& dft_plan(int N) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<DftPlan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(N);
    if (it == cache.end()) {
        it = cache.emplace(N, std::make_unique<DftPlan>(N)).first;
    }
    return *it->second;
}

}  // namespace

BlockCirculant::BlockCirculant(int m, int N, std::vector<Matrix> blocks)
    : m_(m), N_(N), blocks_(std::move(blocks)) {
    if (m < 1) throw std::invalid_argument("BlockCirculant: m must be >= 1");
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("BlockCirculant: N must be even and >= 2");
    if (static_cast<int>(blocks_.size()) != N / 2 + 1) {
        throw std::invalid_argument("BlockCirculant: expected N/2 + 1 blocks");
    }
    check_block_dims(blocks_, m, "BlockCirculant");
    blocks_.front() = symmetrized(blocks_.front(), "BlockCirculant C_0");
    blocks_.back() = symmetrized(blocks_.back(), "BlockCirculant C_{N/2}");
}

Matrix BlockCirculant::block_full(int k) const {
    k %= N_;
    if (k < 0) k += N_;
    if (k <= N_ / 2) return blocks_[k];
    return blocks_[N_ - k].transpose();
}

BandedBlockCirculant::BandedBlockCirculant(int m, int N, int n, std::vector<Matrix> blocks)
    : m_(m), N_(N), n_(n), blocks_(std::move(blocks)) {
    if (m < 1) throw std::invalid_argument("BandedBlockCirculant: m must be >= 1");
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("BandedBlockCirculant: N must be even and >= 2");
    if (n < 0 || n >= N / 2) throw std::invalid_argument("BandedBlockCirculant: need 0 <= n < N/2");
    if (static_cast<int>(blocks_.size()) != n + 1) {
        throw std::invalid_argument("BandedBlockCirculant: expected n + 1 blocks");
    }
    check_block_dims(blocks_, m, "BandedBlockCirculant");
    blocks_.front() = symmetrized(blocks_.front(), "BandedBlockCirculant B_0");
}

double BandedBlockCirculant::max_offdiag() const {
    double v = 0.0;
    for (const auto& b : blocks_) {
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < m_; ++j) {
                if (i != j) v = std::max(v, std::abs(b(i, j)));
            }
        }
    }
    return v;
}

SymbolSpectrum::SymbolSpectrum(int m, int N, std::vector<ComplexMatrix> samples)
    : m_(m), N_(N), samples_(std::move(samples)) {
    if (m < 1) throw std::invalid_argument("SymbolSpectrum: m must be >= 1");
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("SymbolSpectrum: N must be even and >= 2");
    if (static_cast<int>(samples_.size()) != N) {
        throw std::invalid_argument("SymbolSpectrum: expected N samples");
    }
    for (const auto& s : samples_) {
        if (s.rows() != m || s.cols() != m) {
            throw std::invalid_argument("SymbolSpectrum: sample is not m x m");
        }
    }
}

BlockCirculant make_circulant(int m, int N, std::vector<Matrix> blocks) {
    return BlockCirculant(m, N, std::move(blocks));
}

BandedBlockCirculant make_banded(int m, int N, int n, std::vector<Matrix> blocks) {
    return BandedBlockCirculant(m, N, n, std::move(blocks));
}

BlockCirculant circulant_identity(int m, int N, double scale) {
    std::vector<Matrix> blocks(static_cast<size_t>(N / 2 + 1), Matrix::Zero(m, m));
    blocks[0] = scale * Matrix::Identity(m, m);
    return BlockCirculant(m, N, std::move(blocks));
}

BandedBlockCirculant banded_identity(int m, int N, int n, double scale) {
    std::vector<Matrix> blocks(static_cast<size_t>(n + 1), Matrix::Zero(m, m));
    blocks[0] = scale * Matrix::Identity(m, m);
    return BandedBlockCirculant(m, N, n, std::move(blocks));
}

SymbolSpectrum symbol_eval(const BlockCirculant& C) {
    const int m = C.m();
    const int N = C.N();
    const auto& plan = dft_plan(N);

    // Column k of the data matrix is the k-th generator block, vectorized;
    // the twiddle matrices are symmetric, so data * twiddle transforms along
    // the block index and keeps each sample contiguous in a column.
    Matrix data(m * m, N);
    for (int k = 0; k < N; ++k) {
        const Matrix bk = C.block_full(k);
        data.col(k) = Eigen::Map<const Eigen::VectorXd>(bk.data(), m * m);
    }
    const Matrix re = data * plan.fwd_re;
    const Matrix im = data * plan.fwd_im;

    std::vector<ComplexMatrix> samples(static_cast<size_t>(N));
    double scale = std::max(1.0, std::max(re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff()));
    for (int l = 0; l <= N / 2; ++l) {
        ComplexMatrix s(m, m);
        s.real() = Eigen::Map<const Matrix>(re.col(l).data(), m, m);
        s.imag() = Eigen::Map<const Matrix>(im.col(l).data(), m, m);
        const double dev = (s - s.adjoint()).cwiseAbs().maxCoeff();
        if (dev > kHermTol * scale) {
            throw NumericalError("symbol_eval: sample drifted off Hermitian");
        }
        s = 0.5 * (s + s.adjoint()).eval();
        if (l == 0 || l == N / 2) s.imag().setZero();  // these samples are real symmetric
        samples[static_cast<size_t>(l)] = s;
    }
    for (int l = N / 2 + 1; l < N; ++l) {
        samples[static_cast<size_t>(l)] = samples[static_cast<size_t>(N - l)].conjugate();
    }
    return SymbolSpectrum(m, N, std::move(samples));
}

BlockCirculant from_symbol(const SymbolSpectrum& spec) {
    const int m = spec.m();
    const int N = spec.N();
    double scale = 1.0;
    for (const auto& s : spec.samples()) scale = std::max(scale, s.cwiseAbs().maxCoeff());
    for (int l = 1; l < N; ++l) {
        const double dev = (spec.sample(N - l) - spec.sample(l).conjugate()).cwiseAbs().maxCoeff();
        if (dev > kHermTol * scale) {
            throw NumericalError("from_symbol: conjugate-reflection invariant violated");
        }
    }

    const auto& plan = dft_plan(N);
    Matrix phi_re(m * m, N);
    Matrix phi_im(m * m, N);
    for (int l = 0; l < N; ++l) {
        const ComplexMatrix& s = spec.sample(l);
        const Matrix sr = s.real();
        const Matrix si = s.imag();
        phi_re.col(l) = Eigen::Map<const Eigen::VectorXd>(sr.data(), m * m);
        phi_im.col(l) = Eigen::Map<const Eigen::VectorXd>(si.data(), m * m);
    }
    // Real part of the inverse DFT; the imaginary residue is roundoff once the
    // reflection invariant holds and is dropped.
    const Matrix blocks_flat = phi_re * plan.inv_re - phi_im * plan.inv_im;

    std::vector<Matrix> blocks(static_cast<size_t>(N / 2 + 1));
    for (int k = 0; k <= N / 2; ++k) {
        blocks[static_cast<size_t>(k)] = Eigen::Map<const Matrix>(blocks_flat.col(k).data(), m, m);
    }
    // C_0 and C_{N/2} come out symmetric up to roundoff; make it exact.
    blocks.front() = (0.5 * (blocks.front() + blocks.front().transpose())).eval();
    blocks.back() = (0.5 * (blocks.back() + blocks.back().transpose())).eval();
    return BlockCirculant(m, N, std::move(blocks));
}

BandedBlockCirculant project_band(const BlockCirculant& C, int n) {
    if (n < 0 || n >= C.N() / 2) throw std::invalid_argument("project_band: need 0 <= n < N/2");
    std::vector<Matrix> blocks(C.blocks().begin(), C.blocks().begin() + n + 1);
    return BandedBlockCirculant(C.m(), C.N(), n, std::move(blocks));
}

BlockCirculant embed_banded(const BandedBlockCirculant& B) {
    std::vector<Matrix> blocks(static_cast<size_t>(B.N() / 2 + 1), Matrix::Zero(B.m(), B.m()));
    for (int k = 0; k <= B.band(); ++k) blocks[static_cast<size_t>(k)] = B.block(k);
    return BlockCirculant(B.m(), B.N(), std::move(blocks));
}

namespace {

double inner_product_blocks(const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                            int N, int half_index) {
    // N * sum over all N generator blocks; a mirrored pair contributes twice.
    double s = a[0].cwiseProduct(b[0]).sum();
    for (int k = 1; k < static_cast<int>(a.size()); ++k) {
        const double t = a[static_cast<size_t>(k)].cwiseProduct(b[static_cast<size_t>(k)]).sum();
        s += (k == half_index) ? t : 2.0 * t;
    }
    return N * s;
}

}  // namespace

double inner_product(const BlockCirculant& C, const BlockCirculant& D) {
    if (C.m() != D.m() || C.N() != D.N()) {
        throw std::invalid_argument("inner_product: dimension mismatch");
    }
    return inner_product_blocks(C.blocks(), D.blocks(), C.N(), C.N() / 2);
}

double inner_product(const BandedBlockCirculant& A, const BandedBlockCirculant& B) {
    if (A.m() != B.m() || A.N() != B.N() || A.band() != B.band()) {
        throw std::invalid_argument("inner_product: dimension mismatch");
    }
    return inner_product_blocks(A.blocks(), B.blocks(), A.N(), -1);
}

double logdet(const SymbolSpectrum& spec) {
    const int N = spec.N();
    // log det Phi_{N-l} = log det conj(Phi_l): samples above N/2 double their mirror.
    double total = 0.0;
    for (int l = 0; l <= N / 2; ++l) {
        Eigen::LLT<ComplexMatrix> llt(spec.sample(l));
        if (llt.info() != Eigen::Success) {
            throw NumericalError("logdet: symbol sample not positive definite");
        }
        double ld = 0.0;
        for (int i = 0; i < spec.m(); ++i) ld += std::log(llt.matrixL()(i, i).real());
        ld *= 2.0;
        total += (l == 0 || l == N / 2) ? ld : 2.0 * ld;
    }
    return total;
}

double logdet(const BlockCirculant& C) { return logdet(symbol_eval(C)); }

SymbolSpectrum inverse(const SymbolSpectrum& spec) {
    const int m = spec.m();
    const int N = spec.N();
    std::vector<ComplexMatrix> inv(static_cast<size_t>(N));
    const ComplexMatrix eye = ComplexMatrix::Identity(m, m);
    for (int l = 0; l <= N / 2; ++l) {
        Eigen::LLT<ComplexMatrix> llt(spec.sample(l));
        if (llt.info() != Eigen::Success) {
            throw NumericalError("inverse: symbol sample not positive definite");
        }
        ComplexMatrix s = llt.solve(eye);
        s = 0.5 * (s + s.adjoint()).eval();
        if (l == 0 || l == N / 2) s.imag().setZero();
        inv[static_cast<size_t>(l)] = s;
    }
    for (int l = N / 2 + 1; l < N; ++l) {
        inv[static_cast<size_t>(l)] = inv[static_cast<size_t>(N - l)].conjugate();
    }
    return SymbolSpectrum(m, N, std::move(inv));
}

BlockCirculant inverse(const BlockCirculant& C) { return from_symbol(inverse(symbol_eval(C))); }

double min_symbol_eig(const SymbolSpectrum& spec) {
    double v = std::numeric_limits<double>::infinity();
    // Mirrored samples are conjugates and share eigenvalues.
    for (int l = 0; l <= spec.N() / 2; ++l) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(spec.sample(l), Eigen::EigenvaluesOnly);
        v = std::min(v, es.eigenvalues().minCoeff());
    }
    return v;
}

double min_symbol_eig(const BlockCirculant& C) { return min_symbol_eig(symbol_eval(C)); }

Matrix to_dense(const BlockCirculant& C, int size_limit) {
    const int m = C.m();
    const int N = C.N();
    if (m * N > size_limit) throw std::invalid_argument("to_dense: size limit exceeded");
    Matrix D(m * N, m * N);
    for (int r = 0; r < N; ++r) {
        for (int s = 0; s < N; ++s) {
            D.block(r * m, s * m, m, m) = C.block_full(r - s);
        }
    }
    return D;
}

Matrix to_dense(const BandedBlockCirculant& B, int size_limit) {
    return to_dense(embed_banded(B), size_limit);
}

BlockCirculant lin_comb(double a, const BlockCirculant& C, double b, const BlockCirculant& D) {
    if (C.m() != D.m() || C.N() != D.N()) throw std::invalid_argument("lin_comb: dimension mismatch");
    std::vector<Matrix> blocks(C.blocks().size());
    for (size_t k = 0; k < blocks.size(); ++k) blocks[k] = a * C.blocks()[k] + b * D.blocks()[k];
    return BlockCirculant(C.m(), C.N(), std::move(blocks));
}

BandedBlockCirculant lin_comb(double a, const BandedBlockCirculant& C, double b,
                              const BandedBlockCirculant& D) {
    if (C.m() != D.m() || C.N() != D.N() || C.band() != D.band()) {
        throw std::invalid_argument("lin_comb: dimension mismatch");
    }
    std::vector<Matrix> blocks(C.blocks().size());
    for (size_t k = 0; k < blocks.size(); ++k) blocks[k] = a * C.blocks()[k] + b * D.blocks()[k];
    return BandedBlockCirculant(C.m(), C.N(), C.band(), std::move(blocks));
}

double max_abs(const BlockCirculant& C) {
    double v = 0.0;
    for (const auto& b : C.blocks()) v = std::max(v, b.cwiseAbs().maxCoeff());
    return v;
}

double max_abs(const BandedBlockCirculant& B) {
    double v = 0.0;
    for (const auto& b : B.blocks()) v = std::max(v, b.cwiseAbs().maxCoeff());
    return v;
}

}  // namespace rgm
